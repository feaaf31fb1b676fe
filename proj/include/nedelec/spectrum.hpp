#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "assembly.hpp"
#include "interp.hpp"
#include "localspace.hpp"
#include "mesh.hpp"

namespace nedelec {

struct GevpResult {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< M-orthonormal columns
  double max_residual = 0;  ///< max_k |A x - l M x| / (|A| |x|)
  double max_orthogonality_error = 0;
};

/// A x = lambda M x by Cholesky reduction to a standard symmetric problem.
inline GevpResult gevp_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& m) {
  if (a.rows() != a.cols() || m.rows() != m.cols() || a.rows() != m.rows())
    throw std::invalid_argument("gevp_solve: matrices must be square and of equal size");
  GevpResult r;
  if (a.rows() == 0) return r;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::domain_error("gevp_solve: mass matrix is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw std::runtime_error("gevp_solve: eigensolver did not converge");
  r.values = es.eigenvalues();
  r.vectors = es.eigenvectors();
  const double na = std::max(a.norm(), std::numeric_limits<double>::min());
  for (int k = 0; k < r.values.size(); ++k) {
    const Eigen::VectorXd x = r.vectors.col(k);
    const double res = (a * x - r.values(k) * (m * x)).norm() / (na * x.norm());
    r.max_residual = std::max(r.max_residual, res);
  }
  const Eigen::MatrixXd g = r.vectors.transpose() * m * r.vectors - Eigen::MatrixXd::Identity(a.rows(), a.rows());
  r.max_orthogonality_error = g.cwiseAbs().maxCoeff();
  return r;
}

/// Eigenvalues (pi / L)^2 (k^2 + l^2 + m^2) of the perfectly conducting cube
/// (0, L)^3, at most one index zero, with multiplicity (two for all indices
/// nonzero, one otherwise). Returns the smallest `count` values.
inline std::vector<double> pec_cube_spectrum(int count, double side = std::numbers::pi) {
  std::vector<double> out;
  const double f = (std::numbers::pi / side) * (std::numbers::pi / side);
  const int nmax = int(std::ceil(std::cbrt(double(count)))) + 4;
  for (int i = 0; i <= nmax; ++i)
    for (int j = 0; j <= nmax; ++j)
      for (int k = 0; k <= nmax; ++k) {
        const int zeros = (i == 0) + (j == 0) + (k == 0);
        if (zeros > 1) continue;
        const double v = f * (i * i + j * j + k * k);
        out.push_back(v);
        if (zeros == 0) out.push_back(v);
      }
  std::sort(out.begin(), out.end());
  if (int(out.size()) > count) out.resize(count);
  return out;
}

struct SpectrumOptions {
  double kernel_rel_tol = 1e-8;
  double min_gap = 1e3;
  double delta = 0.05;
  /// Reference first nonzero eigenvalue for the spurious window; when unset,
  /// the first analytic value is used, and without either no window is scanned.
  std::optional<double> window_reference;
  /// Analytic nonzero eigenvalues in ascending order (for error columns).
  std::vector<double> analytic;
  /// Number of retained modes whose divergence defect is measured.
  int defect_modes = 6;
  bool compute_defect = true;
};

enum class ModeClass { Kernel, Physical, Spurious };

inline const char* to_string(ModeClass c) {
  switch (c) {
    case ModeClass::Kernel: return "kernel";
    case ModeClass::Spurious: return "spurious";
    default: return "physical";
  }
}

struct SpectrumReport {
  int p = 0;
  int dofs = 0;
  std::string bc;
  std::vector<double> eigenvalues;
  std::vector<ModeClass> classes;
  double kernel_tol = 0;
  int kernel_count = 0;
  int expected_kernel = 0;
  double gap = 0;
  double window_upper = 0;  ///< spurious window is (kernel_tol, window_upper)
  int spurious_count = 0;
  std::vector<double> analytic;
  std::vector<double> rel_errors;  ///< per nonzero eigenvalue with an analytic partner
  /// Normalized defects against gradients of degree p+1 and p+2 probes.
  std::vector<double> divergence_defect;
  std::vector<double> divergence_defect_higher;
  double max_residual = 0;
  double seconds = 0;

  int nonzero_count() const { return int(eigenvalues.size()) - kernel_count; }
  std::vector<double> nonzero() const { return {eigenvalues.begin() + kernel_count, eigenvalues.end()}; }
  std::optional<double> first_physical() const {
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
      if (classes[i] == ModeClass::Physical) return eigenvalues[i];
    return std::nullopt;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["p"] = p;
    j["dofs"] = dofs;
    j["bc"] = bc;
    j["kernel_tol"] = kernel_tol;
    j["kernel_count"] = kernel_count;
    j["expected_kernel"] = expected_kernel;
    j["nonzero_count"] = nonzero_count();
    j["gap"] = gap;
    j["window_upper"] = window_upper;
    j["spurious_count"] = spurious_count;
    j["max_residual"] = max_residual;
    j["eigenvalues"] = eigenvalues;
    std::vector<std::string> cls;
    for (auto c : classes) cls.push_back(to_string(c));
    j["classes"] = cls;
    j["analytic"] = analytic;
    j["rel_errors"] = rel_errors;
    j["divergence_defect"] = divergence_defect;
    j["divergence_defect_higher"] = divergence_defect_higher;
    return j;
  }

  /// Rows p, dofs, idx, lambda, exact, rel_err, class (no header).
  void write_csv_rows(std::ostream& out) const {
    std::ostringstream s;
    s.precision(12);
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
      s << p << "," << dofs << "," << i << "," << eigenvalues[i] << ",";
      const int k = int(i) - kernel_count;
      if (k >= 0 && k < int(rel_errors.size())) s << analytic[k] << "," << rel_errors[k];
      else s << ",";
      s << "," << to_string(classes[i]) << "\n";
    }
    out << s.str();
  }
  static const char* csv_header() { return "p,dofs,idx,lambda,exact,rel_err,class"; }
};

namespace detail {

/// Linear functionals u -> int eps u . grad phi for a hierarchical continuous
/// degree-q probe basis (vertex hats, extended edge, face and cell bubbles),
/// together with |grad phi|_eps. Computed on the unscaled mesh geometry.
struct ProbeSet {
  std::vector<Eigen::VectorXd> functionals;
  std::vector<double> norms;
};

inline ProbeSet probe_functionals(const Mesh& m, const GlobalDofMap& d, int q, const MaterialSpec& mat) {
  if (q - 1 > d.p + 1) throw std::invalid_argument("probe_functionals: probe degree too high");
  const bool dir = d.bc == BoundaryCondition::Dirichlet;
  const auto ref = reference_matrices(d.p);
  const int deg = d.p + 1;
  const CoefficientLayout lay(3, 1, deg);
  const Eigen::MatrixXd gm = detail::monomial_gram(deg).to_eigen();
  std::array<Eigen::MatrixXd, 3> mom;
  for (int a = 0; a < 3; ++a) mom[a] = ref->moments[a].to_eigen();
  // probes on the reference tet; with sorted vertices the edge and face
  // extensions agree across shared facets
  const Simplex ref_tet = Simplex::reference(3);
  const auto lam = ref_tet.barycentrics();
  auto grads = [&](const Polynomial& ph) {
    std::array<Eigen::VectorXd, 3> dv;
    for (int b = 0; b < 3; ++b) {
      const auto c = lay.vectorize(ph.derivative(b));
      dv[b].resize(int(c.size()));
      for (int i = 0; i < int(c.size()); ++i) dv[b](i) = to_double(c[i]);
    }
    return dv;
  };
  std::array<std::array<Eigen::VectorXd, 3>, 4> vert;
  for (int i = 0; i < 4; ++i) vert[i] = grads(lam[i]);
  std::array<std::vector<std::array<Eigen::VectorXd, 3>>, 6> edge;
  std::array<std::vector<std::array<Eigen::VectorXd, 3>>, 4> face;
  std::vector<std::array<Eigen::VectorXd, 3>> cell;
  for (const auto& u : zero_trace_scalar(1, q))
    for (int le = 0; le < 6; ++le) edge[le].push_back(grads(extend_scalar(u, FacetKind::Edge, le, ref_tet)));
  for (const auto& u : zero_trace_scalar(2, q))
    for (int lf = 0; lf < 4; ++lf) face[lf].push_back(grads(extend_scalar(u, FacetKind::Face, lf, ref_tet)));
  for (const auto& u : zero_trace_scalar(3, q)) cell.push_back(grads(u));

  std::map<std::tuple<int, int, int>, int> ids;  // (kind, entity, k)
  ProbeSet ps;
  std::vector<double> norm2;
  auto id_of = [&](int kind, int ent, int k) {
    auto [it, inserted] = ids.try_emplace({kind, ent, k}, int(ps.functionals.size()));
    if (inserted) {
      ps.functionals.push_back(Eigen::VectorXd::Zero(d.num_dofs));
      norm2.push_back(0.0);
    }
    return it->second;
  };
  for (int t = 0; t < m.num_tets(); ++t) {
    const Simplex s = m.element(t);
    const Matrix jinv = inverse(s.jacobian());
    const Eigen::MatrixXd g = (jinv * mat.epsilon(m.region(t)) * jinv.transpose()).to_eigen();
    const double det = std::abs(to_double(s.det_jacobian()));
    std::vector<std::pair<int, const std::array<Eigen::VectorXd, 3>*>> local;
    for (int i = 0; i < 4; ++i) {
      const int v = m.tet(t)[i];
      if (!(dir && m.boundary_vertex(v))) local.emplace_back(id_of(0, v, 0), &vert[i]);
    }
    for (int le = 0; le < 6; ++le) {
      const int e = m.tet_edge(t, le);
      if (dir && m.boundary_edge(e)) continue;
      for (int k = 0; k < int(edge[le].size()); ++k) local.emplace_back(id_of(1, e, k), &edge[le][k]);
    }
    for (int lf = 0; lf < 4; ++lf) {
      const int f = m.tet_face(t, lf);
      if (dir && m.boundary_face(f)) continue;
      for (int k = 0; k < int(face[lf].size()); ++k) local.emplace_back(id_of(2, f, k), &face[lf][k]);
    }
    for (int k = 0; k < int(cell.size()); ++k) local.emplace_back(id_of(3, t, k), &cell[k]);

    const auto& l2g = d.local_to_global[t];
    for (const auto& [id, dvp] : local) {
      const auto& dv = *dvp;
      Eigen::VectorXd loc = Eigen::VectorXd::Zero(mom[0].rows());
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if (g(a, b) != 0) {
            loc += det * g(a, b) * (mom[a] * dv[b]);
            norm2[id] += det * g(a, b) * dv[a].dot(gm * dv[b]);
          }
      for (int i = 0; i < int(l2g.size()); ++i)
        if (l2g[i] >= 0) ps.functionals[id](l2g[i]) += d.sign[t][i] * loc(i);
    }
  }
  for (double n2 : norm2) ps.norms.push_back(std::sqrt(std::max(n2, 0.0)));
  return ps;
}

inline double max_defect(const ProbeSet& ps, const Eigen::VectorXd& u, const Eigen::MatrixXd& mass) {
  const double nu = std::sqrt(u.dot(mass * u));
  double d = 0;
  for (std::size_t k = 0; k < ps.functionals.size(); ++k)
    if (ps.norms[k] > 0) d = std::max(d, std::abs(ps.functionals[k].dot(u)) / (nu * ps.norms[k]));
  return d;
}

}  // namespace detail

/// Full spectrum of the curl-curl eigenproblem with kernel filtering, spurious
/// scan and optional comparison against analytic eigenvalues.
inline SpectrumReport maxwell_spectrum(const Mesh& m, int p, const MaterialSpec& mat = {},
                                       BoundaryCondition bc = BoundaryCondition::None,
                                       const SpectrumOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  SpectrumReport rep;
  rep.p = p;
  rep.bc = to_string(bc);
  const AssembledSystem sys = assemble(m, p, mat, bc);
  if (!sys.exact_symmetric) throw std::logic_error("maxwell_spectrum: element matrices are not symmetric");
  rep.dofs = sys.dofmap.num_dofs;
  rep.expected_kernel = discrete_gradient_dim(m, p, bc);
  const GevpResult ev = gevp_solve(sys.stiffness, sys.mass);
  rep.max_residual = ev.max_residual;
  rep.eigenvalues.assign(ev.values.data(), ev.values.data() + ev.values.size());
  const double lmax = rep.eigenvalues.empty() ? 0.0 : std::abs(rep.eigenvalues.back());
  rep.kernel_tol = opt.kernel_rel_tol * lmax;
  double largest_kernel = 0;
  for (double l : rep.eigenvalues)
    if (l < rep.kernel_tol) {
      ++rep.kernel_count;
      largest_kernel = std::max(largest_kernel, std::abs(l));
    }
  if (rep.kernel_count > 0 && rep.kernel_count < int(rep.eigenvalues.size())) {
    const double smallest = rep.eigenvalues[rep.kernel_count];
    rep.gap = largest_kernel > 0 ? smallest / largest_kernel : std::numeric_limits<double>::infinity();
    if (rep.gap < opt.min_gap)
      throw std::runtime_error("maxwell_spectrum: no spectral gap between kernel and retained eigenvalues (ratio " +
                               std::to_string(rep.gap) + ")");
  }
  std::optional<double> ref = opt.window_reference;
  if (!ref && !opt.analytic.empty()) ref = opt.analytic.front();
  rep.window_upper = ref ? (1 - opt.delta) * *ref : rep.kernel_tol;
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    const double l = rep.eigenvalues[i];
    ModeClass c = ModeClass::Physical;
    if (int(i) < rep.kernel_count) c = ModeClass::Kernel;
    else if (l < rep.window_upper) c = ModeClass::Spurious, ++rep.spurious_count;
    rep.classes.push_back(c);
  }
  const int nz = rep.nonzero_count();
  for (int k = 0; k < nz && k < int(opt.analytic.size()); ++k) {
    rep.analytic.push_back(opt.analytic[k]);
    rep.rel_errors.push_back(std::abs(rep.eigenvalues[rep.kernel_count + k] - opt.analytic[k]) / opt.analytic[k]);
  }
  if (opt.compute_defect && nz > 0) {
    const Eigen::MatrixXd mass0 = sys.mass / m.scale();
    const auto low = detail::probe_functionals(m, sys.dofmap, p + 1, mat);
    const auto high = detail::probe_functionals(m, sys.dofmap, p + 2, mat);
    for (int k = 0; k < std::min(nz, opt.defect_modes); ++k) {
      const Eigen::VectorXd u = ev.vectors.col(rep.kernel_count + k);
      rep.divergence_defect.push_back(detail::max_defect(low, u, mass0));
      rep.divergence_defect_higher.push_back(detail::max_defect(high, u, mass0));
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

struct CompactnessRow {
  int p = 0;
  double d_p = 0;         ///< defect against probes of degree p+1 (solver level)
  double d_p_higher = 0;  ///< defect against probes of degree p+2
  double g_p = 0;         ///< |u - Pi1_p u|_L2 for the reference solenoidal field
};

/// Discrete compactness diagnostics for the first k nonzero modes over a range
/// of p. The gap proxy uses curl(0, 0, sin x sin y) on the unscaled geometry.
inline std::vector<CompactnessRow> compactness_trend(const Mesh& m, std::span<const int> ps, int k,
                                                     const MaterialSpec& mat = {},
                                                     BoundaryCondition bc = BoundaryCondition::Dirichlet) {
  std::vector<CompactnessRow> rows;
  const VectorField field = solenoidal_sine_field();
  for (int p : ps) {
    SpectrumOptions opt;
    opt.defect_modes = k;
    const auto rep = maxwell_spectrum(m, p, mat, bc, opt);
    CompactnessRow r;
    r.p = p;
    for (double d : rep.divergence_defect) r.d_p = std::max(r.d_p, d);
    for (double d : rep.divergence_defect_higher) r.d_p_higher = std::max(r.d_p_higher, d);
    const auto g = pi_global(m, p, field);
    r.g_p = field_error(m, g.local, field, 2 * p + 10).l2;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace nedelec
