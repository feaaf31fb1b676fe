#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "localspace.hpp"
#include "mesh.hpp"
#include "simplex.hpp"

namespace nedelec {

/// Componentwise Gram blocks of the reference dual basis and of its curls:
/// mass[3a+b](i, j) = int b_i,a b_j,b and stiff[3a+b](i, j) = int (curl b_i)_a (curl b_j)_b
/// over the reference tetrahedron.
struct ReferenceMatrices {
  int p = 0;
  std::array<Matrix, 9> mass;
  std::array<Matrix, 9> stiff;
  /// moments[a] = C_a^T G: int b_i,a y^alpha for monomials of degree <= p + 1.
  std::array<Matrix, 3> moments;
};

namespace detail {

inline Matrix monomial_gram(int degree) {
  const auto m = monomials(3, degree);
  Matrix g(int(m.size()), int(m.size()));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = i; j < g.cols(); ++j) {
      Exponent e{};
      for (int k = 0; k < 3; ++k) e[k] = uint8_t(m[i][k] + m[j][k]);
      g(i, j) = g(j, i) = integrate_reference(Polynomial::monomial(3, e));
    }
  return g;
}

/// Blocks C_a^T G C_b from per-component coefficient matrices C_a (monomials x basis).
inline std::array<Matrix, 9> component_grams(const std::vector<VectorPolynomial>& fields, int degree,
                                             std::array<Matrix, 3>* moments = nullptr) {
  const CoefficientLayout lay(3, 1, degree);
  std::array<Matrix, 3> c;
  for (int a = 0; a < 3; ++a) {
    std::vector<Polynomial> comp;
    for (const auto& f : fields) comp.push_back(f[a]);
    c[a] = lay.matrix(std::span<const Polynomial>(comp));
  }
  const Matrix g = monomial_gram(degree);
  std::array<Matrix, 9> out;
  for (int a = 0; a < 3; ++a) {
    const Matrix left = c[a].transpose() * g;
    if (moments) (*moments)[a] = left;
    for (int b = a; b < 3; ++b) {
      out[3 * a + b] = left * c[b];
      if (b != a) out[3 * b + a] = out[3 * a + b].transpose();
    }
  }
  return out;
}

}  // namespace detail

inline std::shared_ptr<const ReferenceMatrices> reference_matrices(int p) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ReferenceMatrices>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(p); it != cache.end()) return it->second;
  }
  auto ref = reference_dual_basis(p);
  auto r = std::make_shared<ReferenceMatrices>();
  r->p = p;
  r->mass = detail::component_grams(ref->basis, p + 1, &r->moments);
  std::vector<VectorPolynomial> curls;
  for (const auto& b : ref->basis) curls.push_back(curl(b));
  r->stiff = detail::component_grams(curls, std::max(p, 0));
  std::lock_guard lock(mutex);
  return cache.emplace(p, r).first->second;
}

struct ElementMatrices {
  Matrix stiffness;  ///< int mu^-1 curl b_i . curl b_j
  Matrix mass;       ///< int eps b_i . b_j
};

/// Exact element matrices of the dual basis on T. With the covariant map
/// b = J^-T b_hat and curl b = J curl b_hat / det J:
/// mass = |det J| sum G_ab mass_ab with G = J^-1 eps J^-T,
/// stiffness = sum H_ab stiff_ab / |det J| with H = J^T mu^-1 J.
inline ElementMatrices element_matrices(const Simplex& t, int p, const Matrix& eps, const Matrix& mu) {
  const auto ref = reference_matrices(p);
  const Matrix j = t.jacobian();
  const Matrix jinv = inverse(j);
  const Rational det = abs(t.det_jacobian());
  const Matrix g = jinv * eps * jinv.transpose();
  const Matrix h = j.transpose() * inverse(mu) * j;
  const int n = dim_W1(p);
  ElementMatrices out{Matrix(n, n), Matrix(n, n)};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Rational ga = g(a, b) * det, hb = h(a, b) / det;
      if (ga != 0) out.mass = out.mass + ga * ref->mass[3 * a + b];
      if (hb != 0) out.stiffness = out.stiffness + hb * ref->stiff[3 * a + b];
    }
  return out;
}

struct AssembledSystem {
  GlobalDofMap dofmap;
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
  /// Every element matrix was exactly symmetric before conversion.
  bool exact_symmetric = true;
};

/// Global curl-curl and mass matrices. Element matrices are exact and are
/// converted to double once, at insertion. A mesh length scale s maps the
/// dual basis to b / s, so the mass picks up s and the stiffness 1 / s.
inline AssembledSystem assemble(const Mesh& m, int p, const MaterialSpec& mat = {},
                                BoundaryCondition bc = BoundaryCondition::None) {
  AssembledSystem sys;
  sys.dofmap = build_dofmap(m, p, bc);
  const int n = sys.dofmap.num_dofs;
  sys.stiffness = Eigen::MatrixXd::Zero(n, n);
  sys.mass = Eigen::MatrixXd::Zero(n, n);
  const double s = m.scale();
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto em = element_matrices(m.element(t), p, mat.epsilon(m.region(t)), mat.mu(m.region(t)));
    if (!(em.mass == em.mass.transpose()) || !(em.stiffness == em.stiffness.transpose())) sys.exact_symmetric = false;
    const auto& l2g = sys.dofmap.local_to_global[t];
    const auto& sg = sys.dofmap.sign[t];
    const int nl = int(l2g.size());
    for (int i = 0; i < nl; ++i) {
      if (l2g[i] < 0) continue;
      for (int k = 0; k < nl; ++k) {
        if (l2g[k] < 0) continue;
        const double sgn = sg[i] * sg[k];
        sys.mass(l2g[i], l2g[k]) += sgn * s * to_double(em.mass(i, k));
        sys.stiffness(l2g[i], l2g[k]) += sgn / s * to_double(em.stiffness(i, k));
      }
    }
  }
  return sys;
}

/// Coordinate text format: one "row col value" line per nonzero entry.
inline void write_coo(std::ostream& out, const Eigen::MatrixXd& a) {
  out.precision(17);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0) out << i << " " << j << " " << a(i, j) << "\n";
}

/// Tangential trace on local face lf of tet t of the global field with
/// coefficients x (exact), used to probe conformity.
inline VectorPolynomial global_face_trace(const Mesh& m, const GlobalDofMap& d, std::span<const Rational> x, int t,
                                          int lf) {
  const Simplex s = m.element(t);
  const auto basis = dual_basis(s, d.p);
  VectorPolynomial u(3, 3);
  for (int i = 0; i < basis.dim(); ++i) {
    const int g = d.local_to_global[t][i];
    if (g >= 0 && x[g] != 0) u += basis.basis[i] * (x[g] * d.sign[t][i]);
  }
  return tangential_trace_face(u, s.face(lf));
}

}  // namespace nedelec
