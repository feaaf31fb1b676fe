#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "poincare.hpp"
#include "polynomial.hpp"
#include "simplex.hpp"

namespace nedelec {

enum class SpaceKind { W1, W2 };
enum class FacetKind { Edge, Face, Cell };

inline const char* to_string(FacetKind k) {
  switch (k) {
    case FacetKind::Edge: return "edge";
    case FacetKind::Face: return "face";
    default: return "cell";
  }
}

/// Contiguous range of basis functions (or dofs) attached to one facet.
struct FacetBlock {
  FacetKind kind;
  int index;  ///< local edge / face number, 0 for the cell
  int begin;
  int end;
  int size() const { return end - begin; }
};

struct LocalSpace {
  SpaceKind kind = SpaceKind::W1;
  int p = 0;
  Simplex T;
  std::vector<VectorPolynomial> basis;
  /// Filled for dual bases only: facet blocks in dof order.
  std::vector<FacetBlock> partition;
  int dim() const { return int(basis.size()); }
};

/// One moment functional. Test polynomials live in the facet's reference
/// variables; `component` selects the planar component of the rotated face
/// trace (0, 1) or the covariant cell component (0, 1, 2).
struct DofFunctional {
  FacetKind kind;
  int facet;
  int component;
  Polynomial test;
};

inline int dim_W1(int p) { return p < 0 ? 0 : (p + 1) * (p + 3) * (p + 4) / 2; }
inline int dim_W2(int p) { return p < 0 ? 0 : (p + 1) * (p + 2) * (p + 4) / 2; }
inline int dim_W1_face(int p) { return p < 0 ? 0 : (p + 1) * (p + 3); }

inline int dofs_per_edge(int p) { return p < 0 ? 0 : p + 1; }
inline int dofs_per_face(int p) { return p < 1 ? 0 : p * (p + 1); }
inline int dofs_per_cell(int p) { return p < 2 ? 0 : (p - 1) * p * (p + 1) / 2; }

// Spanning sets ----------------------------------------------------------------

/// Unit-monomial vector fields x^a e_c of degree <= p (graded, component-minor).
inline std::vector<VectorPolynomial> vector_monomials(int ncomp, int dim, int p) {
  std::vector<VectorPolynomial> out;
  for (const auto& e : monomials(dim, p))
    for (int c = 0; c < ncomp; ++c) out.push_back(VectorPolynomial::unit(ncomp, dim, c, Polynomial::monomial(dim, e)));
  return out;
}

inline std::vector<Polynomial> scalar_monomials(int dim, int p) {
  std::vector<Polynomial> out;
  for (const auto& e : monomials(dim, p)) out.push_back(Polynomial::monomial(dim, e));
  return out;
}

/// Basis of the homogeneous divergence-free fields of degree k.
inline std::vector<VectorPolynomial> homogeneous_divfree(int k) {
  std::vector<VectorPolynomial> fields;
  for (const auto& e : homogeneous_monomials(3, k))
    for (int c = 0; c < 3; ++c) fields.push_back(VectorPolynomial::unit(3, 3, c, Polynomial::monomial(3, e)));
  if (k == 0) return fields;
  std::vector<Polynomial> divs;
  for (const auto& f : fields) divs.push_back(div(f));
  Matrix n = nullspace(CoefficientLayout(3, 1, k - 1).matrix(divs));
  std::vector<VectorPolynomial> out;
  for (int j = 0; j < n.cols(); ++j) {
    auto c = n.column(j);
    out.push_back(combine<VectorPolynomial>(fields, c, VectorPolynomial(3, 3)));
  }
  return out;
}

namespace detail {

inline std::vector<Rational> default_anchor(const Simplex& t, std::span<const Rational> anchor) {
  if (!anchor.empty()) return {anchor.begin(), anchor.end()};
  return t.vertex(0);
}

}  // namespace detail

/// W1_p(T) = P_p^3 + R_a(homogeneous divergence-free fields of degree p),
/// rank-reduced. The anchor defaults to the first vertex of T.
inline LocalSpace build_W1(const Simplex& t, int p, std::span<const Rational> anchor = {}) {
  LocalSpace s{SpaceKind::W1, p, t, {}, {}};
  if (p < 0) return s;
  const auto a = detail::default_anchor(t, anchor);
  std::vector<VectorPolynomial> span = vector_monomials(3, 3, p);
  for (const auto& q : homogeneous_divfree(p)) span.push_back(lift_R(q, a));
  s.basis = independent_subset<VectorPolynomial>(span);
  if (s.dim() != dim_W1(p))
    throw std::logic_error("build_W1: spanning set has rank " + std::to_string(s.dim()) + ", expected " +
                           std::to_string(dim_W1(p)));
  return s;
}

/// W2_p(T) = P_p^3 + D_a(P_p), rank-reduced.
inline LocalSpace build_W2(const Simplex& t, int p, std::span<const Rational> anchor = {}) {
  LocalSpace s{SpaceKind::W2, p, t, {}, {}};
  if (p < 0) return s;
  const auto a = detail::default_anchor(t, anchor);
  std::vector<VectorPolynomial> span = vector_monomials(3, 3, p);
  for (const auto& e : homogeneous_monomials(3, p)) span.push_back(lift_D(Polynomial::monomial(3, e), a));
  s.basis = independent_subset<VectorPolynomial>(span);
  if (s.dim() != dim_W2(p))
    throw std::logic_error("build_W2: spanning set has rank " + std::to_string(s.dim()) + ", expected " +
                           std::to_string(dim_W2(p)));
  return s;
}

/// Planar space P_p^2 + R^2D_a(P_p) on the reference triangle (the rotated
/// tangential traces of W1_p on a face).
inline std::vector<VectorPolynomial> build_W1_face(int p, std::span<const Rational> anchor = {}) {
  if (p < 0) return {};
  std::vector<VectorPolynomial> span = vector_monomials(2, 2, p);
  for (const auto& e : homogeneous_monomials(2, p)) span.push_back(lift_R2d(Polynomial::monomial(2, e), anchor));
  auto basis = independent_subset<VectorPolynomial>(span);
  if (int(basis.size()) != dim_W1_face(p)) throw std::logic_error("build_W1_face: unexpected rank");
  return basis;
}

// Whitney forms ----------------------------------------------------------------

/// lambda_i grad lambda_j - lambda_j grad lambda_i for local edge e = (i, j).
inline VectorPolynomial whitney1(const Simplex& t, int e) {
  auto lam = t.barycentrics();
  const auto [i, j] = kTetEdges.at(e);
  return lam[i] * grad(lam[j]) - lam[j] * grad(lam[i]);
}

/// Whitney 2-form of local face f = (i, j, k), scaled to unit flux through f
/// in the orientation of the face chart.
inline VectorPolynomial whitney2(const Simplex& t, int f) {
  auto lam = t.barycentrics();
  const auto [i, j, k] = kTetFaces.at(f);
  VectorPolynomial w = lam[i] * cross(grad(lam[j]), grad(lam[k])) + lam[j] * cross(grad(lam[k]), grad(lam[i])) +
                       lam[k] * cross(grad(lam[i]), grad(lam[j]));
  const Rational flux = integrate_reference(normal_trace_face(w, t.face(f)));
  return w * (1 / flux);
}

// Degrees of freedom -------------------------------------------------------------

/// Homogeneous monomials of degree k in the m+1 barycentric coordinates of the
/// reference m-simplex, as polynomials in its m reference variables.
/// Exponents are enumerated lexicographically descending.
inline std::vector<Polynomial> barycentric_monomials(int m, int k) {
  std::vector<Polynomial> out;
  if (k < 0) return out;
  std::vector<Polynomial> mu;
  Polynomial mu0 = Polynomial::constant(m, 1);
  for (int i = 0; i < m; ++i) mu0 -= Polynomial::variable(m, i);
  mu.push_back(mu0);
  for (int i = 0; i < m; ++i) mu.push_back(Polynomial::variable(m, i));
  std::vector<int> beta(m + 1, 0);
  // recursive enumeration of compositions of k into m+1 parts
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == m) {
      beta[m] = left;
      Polynomial q = Polynomial::constant(m, 1);
      for (int i = 0; i <= m; ++i) q *= mu[i].pow(beta[i]);
      out.push_back(q);
      return;
    }
    for (int b = left; b >= 0; --b) {
      beta[pos] = b;
      self(self, pos + 1, left - b);
    }
  };
  rec(rec, 0, k);
  return out;
}

/// Edge moments (p+1 per edge), face moments (p(p+1) per face) and cell
/// moments ((p-1)p(p+1)/2), in facet order edges, faces, cell.
inline std::vector<DofFunctional> dofs_W1(int p) {
  std::vector<DofFunctional> out;
  if (p < 0) return out;
  for (int e = 0; e < 6; ++e)
    for (const auto& q : barycentric_monomials(1, p)) out.push_back({FacetKind::Edge, e, 0, q});
  for (int f = 0; f < 4; ++f)
    for (const auto& q : barycentric_monomials(2, p - 1))
      for (int c = 0; c < 2; ++c) out.push_back({FacetKind::Face, f, c, q});
  for (const auto& q : barycentric_monomials(3, p - 2))
    for (int c = 0; c < 3; ++c) out.push_back({FacetKind::Cell, 0, c, q});
  return out;
}

inline std::vector<FacetBlock> dof_partition(int p) {
  std::vector<FacetBlock> out;
  int at = 0;
  for (int e = 0; e < 6; ++e, at += dofs_per_edge(p)) out.push_back({FacetKind::Edge, e, at, at + dofs_per_edge(p)});
  for (int f = 0; f < 4; ++f, at += dofs_per_face(p)) out.push_back({FacetKind::Face, f, at, at + dofs_per_face(p)});
  out.push_back({FacetKind::Cell, 0, at, at + dofs_per_cell(p)});
  return out;
}

/// Covariant pullback J^T (u o F) to the reference tetrahedron.
inline VectorPolynomial covariant_pullback(const VectorPolynomial& u, const Simplex& t) {
  std::vector<Polynomial> comps;
  for (int c = 0; c < 3; ++c) comps.push_back(pullback(dot(u, chart_column(t, c, 3)), t));
  return VectorPolynomial(std::move(comps));
}

/// Inverse of covariant_pullback: J^{-T} (u_hat o F^{-1}).
inline VectorPolynomial covariant_pushforward(const VectorPolynomial& uhat, const Simplex& t) {
  auto lam = t.barycentrics();
  std::vector<Polynomial> inv_chart(lam.begin() + 1, lam.end());
  VectorPolynomial v = compose(uhat, inv_chart);
  const Matrix jinv = inverse(t.jacobian());
  VectorPolynomial out(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (jinv(c, r) != 0) out[r] += v[c] * jinv(c, r);
  return out;
}

/// Evaluates one moment functional on a field over T. All moments are taken
/// in the facet reference variables, so they are invariant under covariant
/// pullback.
inline Rational apply_dof(const DofFunctional& k, const VectorPolynomial& u, const Simplex& t) {
  switch (k.kind) {
    case FacetKind::Edge:
      return integrate_reference(k.test * tangential_trace_edge(u, t.edge(k.facet)));
    case FacetKind::Face:
      return integrate_reference(k.test * tangential_trace_face(u, t.face(k.facet))[k.component]);
    default:
      return integrate_reference(k.test * pullback(dot(u, chart_column(t, k.component, 3)), t));
  }
}

/// All dofs of u as a matrix-vector product on its coefficient vector,
/// precomputed per (p, degree) on the reference tetrahedron.
class DofEvaluator {
 public:
  DofEvaluator(int p, int degree) : p_(p), layout_(3, 3, degree) {
    const Simplex ref = Simplex::reference(3);
    const auto dofs = dofs_W1(p);
    const auto monos = monomials(3, degree);
    const int nm = int(monos.size());
    k_ = Matrix(int(dofs.size()), layout_.size());
    // Facet restrictions of each scalar monomial, shared by all tests on that facet.
    std::vector<std::vector<Polynomial>> edge_res(6), face_res(4);
    for (int e = 0; e < 6; ++e)
      for (const auto& m : monos) edge_res[e].push_back(pullback(Polynomial::monomial(3, m), ref.edge(e)));
    for (int f = 0; f < 4; ++f)
      for (const auto& m : monos) face_res[f].push_back(pullback(Polynomial::monomial(3, m), ref.face(f)));
    for (int i = 0; i < int(dofs.size()); ++i) {
      const auto& d = dofs[i];
      if (d.kind == FacetKind::Edge) {
        const auto dir = ref.edge(d.facet).edge_vector(0, 1);
        for (int a = 0; a < nm; ++a) {
          const Rational m = integrate_reference(d.test * edge_res[d.facet][a]);
          for (int c = 0; c < 3; ++c) k_(i, c * nm + a) = m * dir[c];
        }
      } else if (d.kind == FacetKind::Face) {
        const Simplex face = ref.face(d.facet);
        // rotated trace: component 0 is u . J2, component 1 is -u . J1
        const auto j = d.component == 0 ? face.edge_vector(0, 2) : face.edge_vector(0, 1);
        const Rational sign = d.component == 0 ? 1 : -1;
        for (int a = 0; a < nm; ++a) {
          const Rational m = sign * integrate_reference(d.test * face_res[d.facet][a]);
          for (int c = 0; c < 3; ++c) k_(i, c * nm + a) = m * j[c];
        }
      } else {
        for (int a = 0; a < nm; ++a)
          k_(i, d.component * nm + a) = integrate_reference(d.test * Polynomial::monomial(3, monos[a]));
      }
    }
  }

  int p() const { return p_; }
  int degree() const { return layout_.degree(); }
  const CoefficientLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return k_; }

  /// Dofs of a field given on the reference tetrahedron.
  std::vector<Rational> reference_dofs(const VectorPolynomial& uhat) const {
    auto x = layout_.vectorize(uhat);
    return k_ * std::span<const Rational>(x);
  }

 private:
  int p_;
  CoefficientLayout layout_;
  Matrix k_;
};

/// Shared, lazily built evaluator for (p, degree).
inline std::shared_ptr<const DofEvaluator> dof_evaluator(int p, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const DofEvaluator>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({p, degree}); it != cache.end()) return it->second;
  }
  auto ev = std::make_shared<const DofEvaluator>(p, degree);
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(p, degree), ev).first->second;
}

/// All W1_p dofs of u on T.
inline std::vector<Rational> dof_values(int p, const VectorPolynomial& u, const Simplex& t) {
  VectorPolynomial uhat = covariant_pullback(u, t);
  return dof_evaluator(p, std::max(p + 1, uhat.degree()))->reference_dofs(uhat);
}

/// Exact generalized Vandermonde V_ij = kappa_i(s_j) over the spanning basis of W1_p(T).
inline Matrix dof_matrix(const LocalSpace& w1) {
  std::vector<std::vector<Rational>> cols;
  for (const auto& s : w1.basis) cols.push_back(dof_values(w1.p, s, w1.T));
  return Matrix::from_columns(cols, dim_W1(w1.p));
}

namespace detail {

inline LocalSpace reference_dual_basis_uncached(int p) {
  const Simplex ref = Simplex::reference(3);
  LocalSpace w1 = build_W1(ref, p);
  const CoefficientLayout layout(3, 3, p + 1);
  const Matrix s = layout.matrix(std::span<const VectorPolynomial>(w1.basis));
  const Matrix v = dof_evaluator(p, p + 1)->matrix() * s;
  Matrix vinv;
  try {
    vinv = inverse(v);
  } catch (const std::domain_error&) {
    throw std::logic_error("dual_basis: dof matrix is singular (unisolvence violated) at p = " + std::to_string(p));
  }
  const Matrix b = s * vinv;
  LocalSpace out{SpaceKind::W1, p, ref, {}, dof_partition(p)};
  for (int j = 0; j < b.cols(); ++j) {
    auto col = b.column(j);
    out.basis.push_back(layout.devectorize(col));
  }
  return out;
}

}  // namespace detail

/// Basis of W1_p on the reference tetrahedron dual to dofs_W1(p). Cached.
inline std::shared_ptr<const LocalSpace> reference_dual_basis(int p) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const LocalSpace>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(p); it != cache.end()) return it->second;
  }
  auto b = std::make_shared<const LocalSpace>(detail::reference_dual_basis_uncached(p));
  std::lock_guard lock(mutex);
  return cache.emplace(p, b).first->second;
}

/// Basis of W1_p(T) dual to the dofs: kappa_i(b_j) = delta_ij. Built on the
/// reference element and mapped by the covariant Piola transform, which
/// leaves every dof unchanged.
inline LocalSpace dual_basis(const Simplex& t, int p) {
  auto ref = reference_dual_basis(p);
  LocalSpace out{SpaceKind::W1, p, t, {}, ref->partition};
  if (t == ref->T) {
    out.basis = ref->basis;
    return out;
  }
  for (const auto& b : ref->basis) out.basis.push_back(covariant_pushforward(b, t));
  return out;
}

// Extensions -------------------------------------------------------------------

/// Extends u, a polynomial in the reference variables of the sub-simplex with
/// local vertices `facet` of a host simplex, to the host: u is written as a
/// homogeneous polynomial in the facet barycentrics, which are then replaced
/// by the host barycentrics. u must vanish on the boundary of the facet; the
/// extension then vanishes on every other facet of the same dimension.
inline Polynomial extend_from_facet(const Polynomial& u, std::span<const int> facet,
                                    const std::vector<Polynomial>& host_barycentrics) {
  const int m = int(facet.size()) - 1;
  const int host_dim = host_barycentrics.at(0).dim();
  if (u.dim() != m) throw std::invalid_argument("extend_from_facet: polynomial dimension differs from facet");
  if (u.is_zero()) return Polynomial(host_dim);
  // zero boundary trace
  if (m == 1) {
    if (u({Rational(0)}) != 0 || u({Rational(1)}) != 0)
      throw std::invalid_argument("extend_from_facet: input does not vanish at the edge endpoints");
  } else {
    const Simplex ref = Simplex::reference(m);
    for (const auto& e : kTriangleEdges)
      if (!pullback(u, ref.facet(e)).is_zero())
        throw std::invalid_argument("extend_from_facet: input does not vanish on the face boundary");
  }
  const int n = u.degree();
  Polynomial sum(host_dim);
  for (int k : facet) sum += host_barycentrics.at(k);
  std::vector<Polynomial> sum_pow{Polynomial::constant(host_dim, 1)};
  for (int k = 1; k <= n; ++k) sum_pow.push_back(sum_pow.back() * sum);
  Polynomial out(host_dim);
  for (const auto& [e, c] : u.terms()) {
    Polynomial t = Polynomial::constant(host_dim, c);
    for (int i = 0; i < m; ++i) t *= host_barycentrics.at(facet[i + 1]).pow(e[i]);
    out += t * sum_pow[n - total_degree(e)];
  }
  return out;
}

/// E0 for a local edge or face of T.
inline Polynomial extend_scalar(const Polynomial& u, FacetKind kind, int index, const Simplex& t) {
  if (kind == FacetKind::Edge) return extend_from_facet(u, kTetEdges.at(index), t.barycentrics());
  if (kind == FacetKind::Face) return extend_from_facet(u, kTetFaces.at(index), t.barycentrics());
  throw std::invalid_argument("extend_scalar: facet must be an edge or a face");
}

/// E1 for face f: the element of the face-f dual block whose rotated
/// tangential trace on f is v. v must lie in the zero-boundary subspace of the
/// planar trace space.
inline VectorPolynomial extend_face_field(const VectorPolynomial& v, int f, const Simplex& t, int p) {
  const auto ref = reference_dual_basis(p);
  const FacetBlock& blk = ref->partition.at(6 + f);
  const auto dofs = dofs_W1(p);
  VectorPolynomial uhat(3, 3);
  for (int i = blk.begin; i < blk.end; ++i) {
    const Rational m = integrate_reference(dofs[i].test * v[dofs[i].component]);
    if (m != 0) uhat += ref->basis[i] * m;
  }
  VectorPolynomial u = t == ref->T ? uhat : covariant_pushforward(uhat, t);
  if (tangential_trace_face(u, t.face(f)) != v)
    throw std::invalid_argument("extend_face_field: input is not a zero-boundary face trace of W1_p");
  return u;
}

/// E1 for edge e: the element of the edge-e dual block with tangential trace g.
inline VectorPolynomial extend_edge_field(const Polynomial& g, int e, const Simplex& t, int p) {
  const auto ref = reference_dual_basis(p);
  const FacetBlock& blk = ref->partition.at(e);
  const auto dofs = dofs_W1(p);
  VectorPolynomial uhat(3, 3);
  for (int i = blk.begin; i < blk.end; ++i) {
    const Rational m = integrate_reference(dofs[i].test * g);
    if (m != 0) uhat += ref->basis[i] * m;
  }
  VectorPolynomial u = t == ref->T ? uhat : covariant_pushforward(uhat, t);
  if (tangential_trace_edge(u, t.edge(e)) != g)
    throw std::invalid_argument("extend_edge_field: input is not in P_p(e)");
  return u;
}

// Zero-trace subspaces ----------------------------------------------------------

namespace detail {

/// Stacks the coefficient vectors of the given maps of each basis element as
/// constraint rows and returns the basis combinations in the nullspace.
template <class B, class F>
std::vector<B> constrained_subspace(const std::vector<B>& basis, F&& constraints, const B& zero) {
  if (basis.empty()) return {};
  std::vector<std::vector<Rational>> cols;
  for (const auto& b : basis) cols.push_back(constraints(b));
  const Matrix c = Matrix::from_columns(cols, int(cols[0].size()));
  const Matrix n = nullspace(c);
  std::vector<B> out;
  for (int j = 0; j < n.cols(); ++j) {
    auto col = n.column(j);
    out.push_back(combine<B>(basis, col, zero));
  }
  return out;
}

inline void append(std::vector<Rational>& dst, const std::vector<Rational>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace detail

/// Polynomials of degree <= k on the reference d-simplex vanishing on its boundary.
inline std::vector<Polynomial> zero_trace_scalar(int d, int k) {
  const Simplex ref = Simplex::reference(d);
  const auto basis = scalar_monomials(d, k);
  return detail::constrained_subspace(basis, [&](const Polynomial& q) {
    std::vector<Rational> row;
    if (d == 1) {
      row.push_back(q({Rational(0)}));
      row.push_back(q({Rational(1)}));
      return row;
    }
    const CoefficientLayout lay(d - 1, 1, std::max(k, 0));
    if (d == 2)
      for (const auto& e : kTriangleEdges) detail::append(row, lay.vectorize(pullback(q, ref.facet(e))));
    else
      for (const auto& f : kTetFaces) detail::append(row, lay.vectorize(pullback(q, ref.facet(f))));
    return row;
  }, Polynomial(d));
}

/// Polynomials of degree <= k on the reference d-simplex with zero mean.
inline std::vector<Polynomial> zero_mean_scalar(int d, int k) {
  const auto basis = scalar_monomials(d, k);
  return detail::constrained_subspace(
      basis, [](const Polynomial& q) { return std::vector<Rational>{integrate_reference(q)}; }, Polynomial(d));
}

/// Zero-trace edge space: P_p(e) with zero mean.
inline std::vector<Polynomial> zero_trace_W1_edge(int p) { return zero_mean_scalar(1, p); }

/// Planar W1_p fields on the reference triangle with zero in-plane normal trace on all edges.
inline std::vector<VectorPolynomial> zero_trace_W1_face(int p) {
  const Simplex ref = Simplex::reference(2);
  const CoefficientLayout lay(1, 1, p + 1);
  return detail::constrained_subspace(build_W1_face(p), [&](const VectorPolynomial& v) {
    std::vector<Rational> row;
    for (const auto& e : kTriangleEdges) detail::append(row, lay.vectorize(normal_trace_edge2d(v, ref.facet(e))));
    return row;
  }, VectorPolynomial(2, 2));
}

/// W1_p(T) fields with vanishing tangential trace on all faces.
inline std::vector<VectorPolynomial> zero_trace_W1(const LocalSpace& w1) {
  const CoefficientLayout lay(2, 2, w1.p + 1);
  return detail::constrained_subspace(w1.basis, [&](const VectorPolynomial& u) {
    std::vector<Rational> row;
    for (int f = 0; f < 4; ++f) detail::append(row, lay.vectorize(tangential_trace_face(u, w1.T.face(f))));
    return row;
  }, VectorPolynomial(3, 3));
}

/// W2_p(T) fields with vanishing normal trace on all faces.
inline std::vector<VectorPolynomial> zero_trace_W2(const LocalSpace& w2) {
  const CoefficientLayout lay(2, 1, w2.p + 1);
  return detail::constrained_subspace(w2.basis, [&](const VectorPolynomial& u) {
    std::vector<Rational> row;
    for (int f = 0; f < 4; ++f) detail::append(row, lay.vectorize(normal_trace_face(u, w2.T.face(f))));
    return row;
  }, VectorPolynomial(3, 3));
}

/// Polynomials of degree <= k on T vanishing on the boundary of T.
inline std::vector<Polynomial> zero_trace_scalar(const Simplex& t, int k) {
  const auto basis = scalar_monomials(3, k);
  const CoefficientLayout lay(2, 1, std::max(k, 0));
  return detail::constrained_subspace(basis, [&](const Polynomial& q) {
    std::vector<Rational> row;
    for (int f = 0; f < 4; ++f) detail::append(row, lay.vectorize(pullback(q, t.face(f))));
    return row;
  }, Polynomial(3));
}

/// Polynomials of degree <= k on T with zero mean over T.
inline std::vector<Polynomial> zero_mean_scalar(const Simplex& t, int k) {
  const auto basis = scalar_monomials(3, k);
  return detail::constrained_subspace(
      basis, [&](const Polynomial& q) { return std::vector<Rational>{integrate_simplex(q, t)}; }, Polynomial(3));
}

}  // namespace nedelec
