#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "polynomial.hpp"

namespace nedelec {

using Point = std::vector<Rational>;

// Local facet numbering. Every facet lists its vertices in ascending order,
// and its affine chart is anchored at the first of them.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
inline constexpr std::array<std::array<int, 3>, 4> kTetFaces{
    {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
inline constexpr std::array<std::array<int, 2>, 3> kTriangleEdges{{{0, 1}, {0, 2}, {1, 2}}};

/// Local edges of each tetrahedron face, as indices into kTetEdges, in
/// kTriangleEdges order.
inline constexpr std::array<std::array<int, 3>, 4> kTetFaceEdges{
    {{0, 1, 3}, {0, 2, 4}, {1, 2, 5}, {3, 4, 5}}};

inline Rational factorial(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(f);
}

/// Simplex of dimension d = #vertices - 1 embedded in R^n, n = coordinate count.
class Simplex {
 public:
  Simplex() = default;
  explicit Simplex(std::vector<Point> vertices) : v_(std::move(vertices)) {
    if (v_.size() < 2) throw std::invalid_argument("Simplex: needs at least two vertices");
    const std::size_t n = v_[0].size();
    if (n < 1 || n > 3) throw std::invalid_argument("Simplex: ambient dimension must be 1..3");
    for (const auto& p : v_)
      if (p.size() != n) throw std::invalid_argument("Simplex: inconsistent coordinates");
    if (dim() > ambient_dim()) throw std::invalid_argument("Simplex: too many vertices");
    if (rank(jacobian()) != dim()) throw std::domain_error("Simplex: degenerate (affinely dependent vertices)");
  }

  /// {0, e_1, ..., e_d} in R^d.
  static Simplex reference(int d) {
    std::vector<Point> v(d + 1, Point(d, Rational(0)));
    for (int i = 0; i < d; ++i) v[i + 1][i] = 1;
    return Simplex(std::move(v));
  }

  int dim() const { return int(v_.size()) - 1; }
  int ambient_dim() const { return int(v_[0].size()); }
  const Point& vertex(int i) const { return v_.at(i); }
  const std::vector<Point>& vertices() const { return v_; }

  /// Columns v_i - v_0, i = 1..d.
  Matrix jacobian() const {
    Matrix j(ambient_dim(), dim());
    for (int c = 0; c < dim(); ++c)
      for (int r = 0; r < ambient_dim(); ++r) j(r, c) = v_[c + 1][r] - v_[0][r];
    return j;
  }

  std::vector<Rational> edge_vector(int i, int j) const {
    std::vector<Rational> d(ambient_dim());
    for (int r = 0; r < ambient_dim(); ++r) d[r] = v_[j][r] - v_[i][r];
    return d;
  }

  /// Affine chart x(y) = v_0 + J y as polynomials in the d reference variables.
  std::vector<Polynomial> chart() const {
    const int d = dim();
    std::vector<Polynomial> x;
    for (int r = 0; r < ambient_dim(); ++r) {
      Polynomial p = Polynomial::constant(d, v_[0][r]);
      for (int c = 0; c < d; ++c)
        p += Polynomial::variable(d, c) * Rational(v_[c + 1][r] - v_[0][r]);
      x.push_back(p);
    }
    return x;
  }

  Rational det_jacobian() const {
    require_full();
    const Matrix j = jacobian();
    const int n = dim();
    if (n == 1) return j(0, 0);
    if (n == 2) return j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    return j(0, 0) * (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1)) -
           j(0, 1) * (j(1, 0) * j(2, 2) - j(1, 2) * j(2, 0)) +
           j(0, 2) * (j(1, 0) * j(2, 1) - j(1, 1) * j(2, 0));
  }

  Rational volume() const { return abs(det_jacobian()) / factorial(dim()); }

  /// Barycentric coordinate functions lambda_0..lambda_d in the ambient
  /// variables (full-dimensional simplices only).
  std::vector<Polynomial> barycentrics() const {
    require_full();
    const int n = dim();
    const Matrix jinv = inverse(jacobian());
    std::vector<Polynomial> lam(n + 1, Polynomial(n));
    for (int i = 0; i < n; ++i) {
      Polynomial p(n);
      Rational c0 = 0;
      for (int k = 0; k < n; ++k) {
        p += Polynomial::variable(n, k) * jinv(i, k);
        c0 -= jinv(i, k) * v_[0][k];
      }
      p += Polynomial::constant(n, c0);
      lam[i + 1] = p;
    }
    Polynomial l0 = Polynomial::constant(n, 1);
    for (int i = 1; i <= n; ++i) l0 -= lam[i];
    lam[0] = l0;
    return lam;
  }

  /// Sub-simplex on the given local vertices (kept in the given order).
  Simplex facet(std::span<const int> local) const {
    std::vector<Point> v;
    for (int i : local) v.push_back(v_.at(i));
    return Simplex(std::move(v));
  }
  Simplex edge(int e) const { return facet(kTetEdges.at(e)); }
  Simplex face(int f) const { return facet(kTetFaces.at(f)); }

  Simplex translated(std::span<const Rational> shift) const {
    auto v = v_;
    for (auto& p : v)
      for (int r = 0; r < ambient_dim(); ++r) p[r] += shift[r];
    return Simplex(std::move(v));
  }

  friend bool operator==(const Simplex& a, const Simplex& b) { return a.v_ == b.v_; }

 private:
  void require_full() const {
    if (dim() != ambient_dim()) throw std::logic_error("Simplex: operation needs a full-dimensional simplex");
  }

  std::vector<Point> v_;
};

/// p composed with the affine chart of S: a polynomial in S.dim() reference variables.
inline Polynomial pullback(const Polynomial& p, const Simplex& s) {
  if (p.dim() != s.ambient_dim()) throw std::invalid_argument("pullback: dimension mismatch");
  auto x = s.chart();
  return compose(p, x);
}
inline VectorPolynomial pullback(const VectorPolynomial& v, const Simplex& s) {
  auto x = s.chart();
  return compose(v, x);
}

/// Exact integral over the reference simplex of dimension p.dim():
/// int y^a dy = a! / (|a| + d)!.
inline Rational integrate_reference(const Polynomial& p) {
  const int d = p.dim();
  Rational sum = 0;
  for (const auto& [e, c] : p.terms()) {
    Rational num = 1;
    for (int i = 0; i < d; ++i) num *= factorial(e[i]);
    sum += c * num / factorial(total_degree(e) + d);
  }
  return sum;
}

/// Exact integral of p over a full-dimensional simplex.
inline Rational integrate_simplex(const Polynomial& p, const Simplex& s) {
  if (s.dim() != s.ambient_dim() || p.dim() != s.dim())
    throw std::invalid_argument("integrate_simplex: polynomial and simplex dimensions differ");
  const Rational det = s.det_jacobian();
  return abs(det) * integrate_reference(pullback(p, s));
}

// Traces. Facet quantities are expressed in the facet's reference variables
// through its affine chart; tangents and normals are the unnormalized chart
// vectors, so all traces stay rational.

inline Polynomial restrict_to(const Polynomial& p, const Simplex& facet) { return pullback(p, facet); }

inline VectorPolynomial chart_column(const Simplex& s, int c, int dim) {
  std::vector<Rational> col;
  for (int r = 0; r < s.ambient_dim(); ++r) col.push_back(s.vertex(c + 1)[r] - s.vertex(0)[r]);
  return constant_field(dim, col);
}

/// u . (b - a) on the edge [a, b], as a polynomial in t in [0, 1].
inline Polynomial tangential_trace_edge(const VectorPolynomial& u, const Simplex& edge) {
  if (edge.dim() != 1) throw std::invalid_argument("tangential_trace_edge: not an edge");
  return pullback(dot(u, chart_column(edge, 0, u.dim())), edge);
}

/// Rotated tangential trace on a face with chart vectors J1, J2:
/// (u . J2, -u . J1). Its planar divergence equals the normal trace of curl u,
/// and its in-plane normal component on a face edge equals the edge tangential trace.
inline VectorPolynomial tangential_trace_face(const VectorPolynomial& u, const Simplex& face) {
  if (face.dim() != 2) throw std::invalid_argument("tangential_trace_face: not a face");
  Polynomial w1 = pullback(dot(u, chart_column(face, 0, u.dim())), face);
  Polynomial w2 = pullback(dot(u, chart_column(face, 1, u.dim())), face);
  return {w2, -w1};
}

/// u . (J1 x J2) on a face, in reference variables (flux density per unit reference area).
inline Polynomial normal_trace_face(const VectorPolynomial& u, const Simplex& face) {
  if (face.dim() != 2) throw std::invalid_argument("normal_trace_face: not a face");
  auto n = cross(chart_column(face, 0, u.dim()), chart_column(face, 1, u.dim()));
  return pullback(dot(u, n), face);
}

/// In-plane normal trace of a planar field on the segment [a, b] of the plane:
/// v . (d_2, -d_1) with d = b - a. This is the rotation partner of
/// tangential_trace_face.
inline Polynomial normal_trace_edge2d(const VectorPolynomial& v, const Simplex& edge) {
  if (edge.dim() != 1 || edge.ambient_dim() != 2 || v.size() != 2)
    throw std::invalid_argument("normal_trace_edge2d: needs a planar field and segment");
  auto d = edge.edge_vector(0, 1);
  VectorPolynomial n{Polynomial::constant(2, d[1]), Polynomial::constant(2, -d[0])};
  return pullback(dot(v, n), edge);
}

inline Polynomial restrict_to_face_edge(const Polynomial& p, const Simplex& edge) { return pullback(p, edge); }

}  // namespace nedelec
