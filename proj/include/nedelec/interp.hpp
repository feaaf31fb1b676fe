#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "localspace.hpp"
#include "mesh.hpp"
#include "poincare.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"
#include "rational.hpp"
#include "simplex.hpp"

namespace nedelec {

// Inner products ----------------------------------------------------------------

enum class EdgeNorm { L2, Fractional };

/// Inner product used by the edge projections. Face projections use L2 on the
/// reference face and cell projections L2 on the element, whatever this says.
struct InnerProductSpec {
  EdgeNorm edge = EdgeNorm::L2;
  double epsilon = 0.25;
  /// Use epsilon = 1 / (10 log(p + 1)) instead of the fixed value.
  bool scheduled = false;

  static InnerProductSpec l2() { return {}; }
  static InnerProductSpec fractional(double eps) {
    if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("fractional inner product: epsilon must be in (0, 1/2)");
    return {EdgeNorm::Fractional, eps, false};
  }
  static InnerProductSpec fractional_scheduled() { return {EdgeNorm::Fractional, 0.25, true}; }

  double epsilon_for(int p) const {
    if (!scheduled) return epsilon;
    return 1.0 / (10.0 * std::log(double(std::max(p, 1)) + 1.0));
  }

  std::string label() const {
    if (edge == EdgeNorm::L2) return "L2";
    if (scheduled) return "H^-1/2+eps(scheduled)";
    return "H^-1/2+eps(" + std::to_string(epsilon) + ")";
  }
};

namespace detail {

inline constexpr int kFracDegree = 32;
inline constexpr int kFracTerms = 128;
inline constexpr int kFracNodes = 256;

/// Shifted Legendre polynomial P_m(2t - 1) on [0, 1], exact.
inline std::vector<Polynomial> shifted_legendre(int n) {
  const Polynomial s = Polynomial::variable(1, 0) * Rational(2) - Polynomial::constant(1, 1);
  std::vector<Polynomial> out{Polynomial::constant(1, 1), s};
  for (int m = 1; m < n; ++m)
    out.push_back((s * out[m] * Rational(2 * m + 1) - out[m - 1] * Rational(m)) * Rational(1, m + 1));
  out.resize(n + 1);
  return out;
}

inline std::vector<double> shifted_legendre_values(int n, double t) {
  std::vector<double> v(n + 1);
  const double s = 2 * t - 1;
  v[0] = 1;
  if (n >= 1) v[1] = s;
  for (int m = 1; m < n; ++m) v[m + 1] = ((2 * m + 1) * s * v[m] - m * v[m - 1]) / (m + 1);
  return v;
}

/// Truncated cosine-series realization of the H^{-1/2+eps} inner product on
/// [0, 1]: sum_k w_k c_k(g) c_k(h), c_k the cosine coefficients and
/// w_k = (1 + (k pi)^2)^(-1/2 + eps - 1/2). The Gram matrix on the shifted
/// Legendre basis of degree <= kFracDegree is computed in double and then
/// frozen as an exact rational matrix, so projections with it are exact.
class FractionalEdgeForm {
 public:
  explicit FractionalEdgeForm(double eps) : eps_(eps) {
    const int n = kFracDegree, kmax = kFracTerms;
    w_.resize(kmax + 1);
    w_[0] = 1;
    for (int k = 1; k <= kmax; ++k) w_[k] = 2 * std::pow(1 + (k * std::numbers::pi) * (k * std::numbers::pi), -1 + eps);
    const QuadratureRule g = gauss_legendre01(kFracNodes);
    ck_.assign(kmax + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double t = g.points[q][0];
      const auto psi = shifted_legendre_values(n, t);
      for (int k = 0; k <= kmax; ++k) {
        const double c = g.weights[q] * std::cos(k * std::numbers::pi * t);
        for (int m = 0; m <= n; ++m) ck_[k][m] += c * psi[m];
      }
    }
    gram_ = Matrix(n + 1, n + 1);
    for (int a = 0; a <= n; ++a)
      for (int b = a; b <= n; ++b) {
        double s = 0;
        for (int k = 0; k <= kmax; ++k) s += w_[k] * ck_[k][a] * ck_[k][b];
        gram_(a, b) = gram_(b, a) = from_double(s);
      }
    const auto psi = shifted_legendre(n);
    to_legendre_ = inverse(CoefficientLayout(1, 1, n).matrix(std::span<const Polynomial>(psi)));
  }

  double epsilon() const { return eps_; }

  std::vector<Rational> legendre_coordinates(const Polynomial& g) const {
    if (g.degree() > kFracDegree)
      throw std::invalid_argument("fractional edge norm: degree exceeds " + std::to_string(kFracDegree));
    auto a = CoefficientLayout(1, 1, kFracDegree).vectorize(g);
    return to_legendre_ * std::span<const Rational>(a);
  }

  Rational form(const Polynomial& g, const Polynomial& h) const {
    const auto lg = legendre_coordinates(g), lh = legendre_coordinates(h);
    Rational s = 0;
    for (int a = 0; a <= kFracDegree; ++a) {
      if (lg[a] == 0) continue;
      for (int b = 0; b <= kFracDegree; ++b)
        if (lh[b] != 0) s += lg[a] * gram_(a, b) * lh[b];
    }
    return s;
  }

  /// Cosine coefficients of a sampled function.
  std::vector<double> cosine_coefficients(const std::function<double(double)>& f) const {
    const QuadratureRule g = gauss_legendre01(kFracNodes);
    std::vector<double> c(kFracTerms + 1, 0.0);
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double t = g.points[q][0], v = g.weights[q] * f(t);
      for (int k = 0; k <= kFracTerms; ++k) c[k] += v * std::cos(k * std::numbers::pi * t);
    }
    return c;
  }

  double form_sampled(const Polynomial& r, const std::vector<double>& cf) const {
    const auto lr = legendre_coordinates(r);
    double s = 0;
    for (int k = 0; k <= kFracTerms; ++k) {
      double cr = 0;
      for (int m = 0; m <= kFracDegree; ++m)
        if (lr[m] != 0) cr += to_double(lr[m]) * ck_[k][m];
      s += w_[k] * cr * cf[k];
    }
    return s;
  }

 private:
  double eps_;
  std::vector<double> w_;
  std::vector<std::vector<double>> ck_;
  Matrix gram_;
  Matrix to_legendre_;
};

inline std::shared_ptr<const FractionalEdgeForm> fractional_edge_form(double eps) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const FractionalEdgeForm>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(eps); it != cache.end()) return it->second;
  return cache.emplace(eps, std::make_shared<const FractionalEdgeForm>(eps)).first->second;
}

/// int_ref q * y^alpha over the reference simplex of q's dimension.
inline Rational moment(const Polynomial& q, const Exponent& alpha) {
  const int d = q.dim();
  Rational sum = 0;
  for (const auto& [e, c] : q.terms()) {
    Rational num = 1;
    int deg = 0;
    for (int i = 0; i < d; ++i) {
      num *= factorial(e[i] + alpha[i]);
      deg += e[i] + alpha[i];
    }
    sum += c * num / factorial(deg + d);
  }
  return sum;
}

}  // namespace detail

// Facet functions and projections ----------------------------------------------

using Vec3 = std::array<double, 3>;

/// A function on a reference facet: an exact polynomial part plus an optional
/// sampled part, evaluated at reference points and returning up to 3 components.
struct FacetFunction {
  VectorPolynomial poly;
  std::function<Vec3(const Vec3&)> sampled;
  int quad_order = 0;
};

/// Orthogonal projector onto the span of `range` (independent fields on a
/// reference facet). The L2 form is the plain reference-facet integral of the
/// componentwise product; the fractional form applies to scalar edge ranges.
class RangeProjector {
 public:
  RangeProjector() = default;
  explicit RangeProjector(std::vector<VectorPolynomial> range,
                          std::shared_ptr<const detail::FractionalEdgeForm> frac = nullptr)
      : range_(std::move(range)), frac_(std::move(frac)) {
    const int n = size();
    if (n == 0) return;
    if (frac_ && (range_[0].dim() != 1 || range_[0].size() != 1))
      throw std::invalid_argument("RangeProjector: fractional form needs scalar edge functions");
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = form(range_[i], range_[j]);
    try {
      gram_inv_ = inverse(g);
    } catch (const std::domain_error&) {
      throw std::logic_error("RangeProjector: range functions are dependent");
    }
  }

  int size() const { return int(range_.size()); }
  const std::vector<VectorPolynomial>& range() const { return range_; }

  /// Coefficients c with P g = sum_i c_i range_i.
  std::vector<Rational> coefficients(const FacetFunction& g) const {
    const int n = size();
    if (n == 0) return {};
    std::vector<Rational> b(n, Rational(0));
    if (!g.poly.is_zero()) {
      if (g.poly.size() != range_[0].size()) throw std::invalid_argument("RangeProjector: component count mismatch");
      for (int i = 0; i < n; ++i) b[i] = form(range_[i], g.poly);
    }
    if (g.sampled) {
      const auto extra = sampled_moments(g);
      for (int i = 0; i < n; ++i) b[i] += from_double(extra[i]);
    }
    return gram_inv_ * std::span<const Rational>(b);
  }

  VectorPolynomial project(const FacetFunction& g) const {
    auto c = coefficients(g);
    if (range_.empty()) return g.poly.is_zero() ? g.poly : g.poly * Rational(0);
    return combine<VectorPolynomial>(range_, c, range_[0] * Rational(0));
  }

 private:
  Rational form(const VectorPolynomial& a, const VectorPolynomial& b) const {
    if (frac_) return frac_->form(a[0], b[0]);
    Rational s = 0;
    for (int c = 0; c < a.size(); ++c)
      for (const auto& [e, coef] : b[c].terms()) s += coef * detail::moment(a[c], e);
    return s;
  }

  std::vector<double> sampled_moments(const FacetFunction& g) const {
    const int n = size();
    std::vector<double> out(n, 0.0);
    if (frac_) {
      auto cf = frac_->cosine_coefficients([&](double t) { return g.sampled({t, 0, 0})[0]; });
      for (int i = 0; i < n; ++i) out[i] = frac_->form_sampled(range_[i][0], cf);
      return out;
    }
    const int dim = range_[0].dim(), nc = range_[0].size();
    const QuadratureRule rule = simplex_rule(dim, std::max(g.quad_order, 2 * (max_degree(std::span(range_)) + 2)));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3& y = rule.points[q];
      const Vec3 s = g.sampled(y);
      for (int i = 0; i < n; ++i) {
        const auto r = range_[i].eval(std::span<const double>(y.data(), dim));
        double dotv = 0;
        for (int c = 0; c < nc; ++c) dotv += r[c] * s[c];
        out[i] += rule.weights[q] * dotv;
      }
    }
    return out;
  }

  std::vector<VectorPolynomial> range_;
  std::shared_ptr<const detail::FractionalEdgeForm> frac_;
  Matrix gram_inv_;
};

// Input fields ------------------------------------------------------------------

/// Scalar field on R^3: polynomial part plus an optional sampled part with its gradient.
struct ScalarField {
  Polynomial poly = Polynomial(3);
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;

  ScalarField() = default;
  ScalarField(Polynomial p) : poly(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  bool sampled() const { return bool(value); }
};

/// Vector field on R^3: polynomial part plus an optional sampled part with its
/// Jacobian (jac[i][j] = d u_i / d x_j).
struct VectorField {
  VectorPolynomial poly = VectorPolynomial(3, 3);
  std::function<Vec3(const Vec3&)> value;
  std::function<std::array<Vec3, 3>(const Vec3&)> jacobian;

  VectorField() = default;
  VectorField(VectorPolynomial p) : poly(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  bool sampled() const { return bool(value); }

  Vec3 curl_sampled(const Vec3& x) const {
    const auto j = jacobian(x);
    return {j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]};
  }
  double div_sampled(const Vec3& x) const {
    const auto j = jacobian(x);
    return j[0][0] + j[1][1] + j[2][2];
  }
};

/// Staged interpolant: the sum of `stages` is `value`. `residuals[k]` is the
/// input minus the first k+1 stages (polynomial inputs only).
template <class P>
struct Breakdown {
  P value;
  std::vector<std::string> names;
  std::vector<P> stages;
  std::vector<P> residuals;
};

struct InterpOptions {
  InnerProductSpec ip;
  /// Quadrature order for sampled inputs; negative means 2p + 6.
  int quad_order = -1;
  /// Deliberately flips the sign of the face lifting inside the tangential
  /// face stage of pi1 (for exercising the failure reporting paths).
  bool fault_lifting_sign = false;
};

namespace detail {

struct AffineD {
  Vec3 origin{};
  std::array<Vec3, 3> cols{};
  int dim = 0;
  explicit AffineD(const Simplex& s) : dim(s.dim()) {
    for (int r = 0; r < 3; ++r) origin[r] = to_double(s.vertex(0)[r]);
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < 3; ++r) cols[c][r] = to_double(s.vertex(c + 1)[r] - s.vertex(0)[r]);
  }
  Vec3 operator()(const Vec3& y) const {
    Vec3 x = origin;
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < 3; ++r) x[r] += cols[c][r] * y[c];
    return x;
  }
};

inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline VectorPolynomial as_field(const Polynomial& p) { return VectorPolynomial(std::vector<Polynomial>{p}); }

/// Antiderivative vanishing at 0 of a polynomial in one variable.
inline Polynomial antiderivative(const Polynomial& g) {
  Polynomial out(1);
  for (const auto& [e, c] : g.terms()) {
    Exponent f = e;
    f[0] = uint8_t(e[0] + 1);
    out.add_term(f, c / Rational(e[0] + 1));
  }
  return out;
}

/// Reference-facet projectors that depend only on p and the edge norm.
struct FacetProjectors {
  std::vector<Polynomial> edge_bubbles;   // zero-trace P_{p+1}(e)
  RangeProjector edge;                    // onto d/dt of edge_bubbles
  std::vector<Polynomial> face_bubbles;   // zero-trace P_{p+1}(f)
  RangeProjector face_curl;               // onto curl2d of face_bubbles
  SpanCoordinates face_curl_coords;
  RangeProjector face_mean;               // onto zero-mean P_p(f)
};

inline std::shared_ptr<const FacetProjectors> facet_projectors(int p, const InnerProductSpec& ip) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::shared_ptr<const FacetProjectors>> cache;
  const double key = ip.edge == EdgeNorm::L2 ? -1.0 : ip.epsilon_for(p);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({p, key}); it != cache.end()) return it->second;
  }
  auto fp = std::make_shared<FacetProjectors>();
  fp->edge_bubbles = zero_trace_scalar(1, p + 1);
  std::vector<VectorPolynomial> er;
  for (const auto& b : fp->edge_bubbles) er.push_back(as_field(b.derivative(0)));
  fp->edge = RangeProjector(er, key < 0 ? nullptr : fractional_edge_form(key));
  fp->face_bubbles = zero_trace_scalar(2, p + 1);
  std::vector<VectorPolynomial> fr;
  for (const auto& b : fp->face_bubbles) fr.push_back(curl2d(b));
  fp->face_curl = RangeProjector(fr);
  if (!fr.empty()) fp->face_curl_coords = SpanCoordinates(CoefficientLayout(2, 2, p).matrix(std::span<const VectorPolynomial>(fr)));
  std::vector<VectorPolynomial> mr;
  for (const auto& q : zero_mean_scalar(2, p)) mr.push_back(as_field(q));
  fp->face_mean = RangeProjector(mr);
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(p, key), fp).first->second;
}

}  // namespace detail

/// Projection-based interpolation on one element. Edge and face projections
/// work in facet reference variables, cell projections in L2(T).
class LocalInterpolator {
 public:
  LocalInterpolator(Simplex t, int p, InterpOptions opt = {})
      : t_(std::move(t)), p_(p), opt_(opt), geo_(t_), lam_(t_.barycentrics()) {
    if (p < 0) throw std::invalid_argument("LocalInterpolator: p must be >= 0");
    fp_ = detail::facet_projectors(p, opt.ip);
    for (int e = 0; e < 6; ++e) edge_geo_.emplace_back(t_.edge(e));
    for (int f = 0; f < 4; ++f) face_geo_.emplace_back(t_.face(f));
  }

  const Simplex& element() const { return t_; }
  int p() const { return p_; }
  const InterpOptions& options() const { return opt_; }
  int quad_order() const { return opt_.quad_order >= 0 ? opt_.quad_order : 2 * p_ + 6; }

  // Projections ---------------------------------------------------------------

  /// Edge projection onto the zero-mean P_p(e); returns the coefficients of
  /// d/dt of the edge bubbles.
  std::vector<Rational> project_edge(const FacetFunction& g) const { return fp_->edge.coefficients(g); }
  std::vector<Rational> project_face_curl(const FacetFunction& v) const { return fp_->face_curl.coefficients(v); }
  Polynomial project_face_mean(const FacetFunction& s) const { return fp_->face_mean.project(s)[0]; }
  std::vector<Rational> project_cell_grad(const FacetFunction& v) const { return cell_grad().coefficients(v); }
  VectorPolynomial project_cell_curl(const FacetFunction& v) const {
    const auto& c = cell_curl();
    return combine<VectorPolynomial>(cell_curl_phys_, c.coefficients(v), VectorPolynomial(3, 3));
  }
  Polynomial project_cell_mean(const FacetFunction& s) const {
    const auto& c = cell_mean();
    return combine<Polynomial>(cell_mean_phys_, c.coefficients(s), Polynomial(3));
  }

  /// Polynomial data on T as a reference-cell facet function (value pullback).
  FacetFunction cell_function(const VectorPolynomial& u) const { return {pullback(u, t_), {}, quad_order()}; }
  FacetFunction cell_function(const Polynomial& u) const { return cell_function(detail::as_field(u)); }

  // Liftings ------------------------------------------------------------------

  /// Inverse of d/dt on the zero-trace P_{p+1}(e).
  Polynomial lift_L1_edge(const Polynomial& g) const {
    Polynomial phi = detail::antiderivative(g);
    if (phi({Rational(1)}) != 0) throw std::invalid_argument("lift_L1_edge: input does not have zero mean");
    return phi;
  }

  /// Inverse of curl2d on the zero-trace P_{p+1}(f).
  Polynomial lift_L1_face(const VectorPolynomial& v) const {
    if (v.is_zero()) return Polynomial(2);
    if (fp_->face_bubbles.empty() || v.degree() > p_)
      throw std::invalid_argument("lift_L1_face: input is not curl2d of a face bubble");
    auto x = CoefficientLayout(2, 2, p_).vectorize(v);
    auto c = fp_->face_curl_coords.coordinates(x);
    if (!c) throw std::invalid_argument("lift_L1_face: input is not curl2d of a face bubble");
    return combine<Polynomial>(fp_->face_bubbles, *c, Polynomial(2));
  }

  /// Inverse of grad on the zero-trace P_{p+1}(T).
  Polynomial lift_L1_cell(const VectorPolynomial& v) const {
    if (v.is_zero()) return Polynomial(3);
    const auto& bub = cell_bubbles();
    if (bub.empty()) throw std::invalid_argument("lift_L1_cell: input is not a gradient of a cell bubble");
    std::vector<VectorPolynomial> g;
    for (const auto& b : bub) g.push_back(grad(b));
    const CoefficientLayout lay(3, 3, std::max(p_, v.degree()));
    auto c = SpanCoordinates(lay.matrix(std::span<const VectorPolynomial>(g))).coordinates(lay.vectorize(v));
    if (!c) throw std::invalid_argument("lift_L1_cell: input is not a gradient of a cell bubble");
    return combine<Polynomial>(bub, *c, Polynomial(3));
  }

  /// Right inverse of div2d from the zero-mean P_p(f) into the zero-boundary
  /// planar trace space: R2d_0 s corrected on the edge opposite vertex 0.
  VectorPolynomial lift_L2_face(const Polynomial& s) const {
    if (s.dim() != 2) throw std::invalid_argument("lift_L2_face: expected a polynomial on the reference triangle");
    if (integrate_reference(s) != 0) throw std::invalid_argument("lift_L2_face: input does not have zero mean");
    if (s.is_zero()) return VectorPolynomial(2, 2);
    const Simplex tri = Simplex::reference(2);
    VectorPolynomial r = lift_R2d(s);
    const std::array<int, 2> opp{1, 2};
    Polynomial g = normal_trace_edge2d(r, tri.facet(opp));
    Polynomial phi = lift_L1_edge(g);
    Polynomial ext = extend_from_facet(phi, opp, tri.barycentrics());
    return r - curl2d(ext);
  }

  /// Right inverse of curl from curl(zero-trace W1_p(T)) into zero-trace W1_p(T).
  VectorPolynomial lift_L2_cell(const VectorPolynomial& u) const {
    if (!div(u).is_zero()) throw std::invalid_argument("lift_L2_cell: input is not divergence free");
    for (int f = 0; f < 4; ++f)
      if (!normal_trace_face(u, t_.face(f)).is_zero())
        throw std::invalid_argument("lift_L2_cell: input has a nonzero normal trace");
    if (u.is_zero()) return u;
    VectorPolynomial r = lift_R(u, t_.vertex(0));
    Polynomial phi = lift_L1_face(tangential_trace_face(r, t_.face(3)));
    return r - grad(extend_scalar(phi, FacetKind::Face, 3, t_));
  }

  /// Right inverse of div from the zero-mean P_p(T) into zero-trace W2_p(T).
  VectorPolynomial lift_L3_cell(const Polynomial& s) const {
    if (integrate_simplex(s, t_) != 0) throw std::invalid_argument("lift_L3_cell: input does not have zero mean");
    if (s.is_zero()) return VectorPolynomial(3, 3);
    VectorPolynomial d = lift_D(s, t_.vertex(0));
    VectorPolynomial v = lift_L2_face(normal_trace_face(d, t_.face(3)));
    return d - curl(extend_face_field(v, 3, t_, p_));
  }

  // Interpolants ----------------------------------------------------------------

  Breakdown<Polynomial> pi0(const ScalarField& u) const {
    Breakdown<Polynomial> out;
    const bool exact = !u.sampled();
    Polynomial cur = u.poly;
    auto push = [&](const char* name, const Polynomial& w) {
      out.names.push_back(name);
      out.stages.push_back(w);
      cur -= w;
      if (exact) out.residuals.push_back(cur);
    };
    // vertex values
    Polynomial w0(3);
    for (int i = 0; i < 4; ++i) {
      Rational v = u.poly(t_.vertex(i));
      if (u.sampled()) v += from_double(u.value(geo_(vertex_ref(i))));
      w0 += lam_[i] * v;
    }
    push("vertex", w0);
    Polynomial w1(3);
    for (int e = 0; e < 6; ++e) {
      FacetFunction g{detail::as_field(pullback(cur, t_.edge(e)).derivative(0)), {}, quad_order()};
      if (u.sampled()) {
        const auto geo = edge_geo_[e];
        g.sampled = [&u, geo](const Vec3& y) -> Vec3 { return {detail::dot3(u.gradient(geo(y)), geo.cols[0]), 0, 0}; };
      }
      auto c = project_edge(g);
      w1 += extend_scalar(combine<Polynomial>(fp_->edge_bubbles, c, Polynomial(1)), FacetKind::Edge, e, t_);
    }
    push("edge", w1);
    Polynomial w2(3);
    for (int f = 0; f < 4; ++f) {
      FacetFunction v{curl2d(pullback(cur, t_.face(f))), {}, quad_order()};
      if (u.sampled()) {
        const auto geo = face_geo_[f];
        v.sampled = [&u, geo](const Vec3& y) -> Vec3 {
          const Vec3 gr = u.gradient(geo(y));
          return {detail::dot3(gr, geo.cols[1]), -detail::dot3(gr, geo.cols[0]), 0};
        };
      }
      auto c = project_face_curl(v);
      w2 += extend_scalar(combine<Polynomial>(fp_->face_bubbles, c, Polynomial(2)), FacetKind::Face, f, t_);
    }
    push("face", w2);
    FacetFunction g = cell_function(grad(cur));
    if (u.sampled()) g.sampled = [&u, this](const Vec3& y) { return u.gradient(geo_(y)); };
    push("cell", combine<Polynomial>(cell_bubbles(), project_cell_grad(g), Polynomial(3)));
    out.value = sum(out.stages, Polynomial(3));
    return out;
  }

  Breakdown<VectorPolynomial> pi1(const VectorField& u) const {
    Breakdown<VectorPolynomial> out;
    const bool exact = !u.sampled();
    VectorPolynomial cur = u.poly;
    auto push = [&](const char* name, const VectorPolynomial& w) {
      out.names.push_back(name);
      out.stages.push_back(w);
      cur -= w;
      if (exact) out.residuals.push_back(cur);
    };
    const VectorPolynomial zero(3, 3);
    // lowest order: Whitney interpolant from edge circulations
    VectorPolynomial w(3, 3);
    for (int e = 0; e < 6; ++e) {
      Rational circ = integrate_reference(tangential_trace_edge(cur, t_.edge(e)));
      if (u.sampled()) circ += from_double(edge_integral(e, [&](const Vec3& x, const detail::AffineD& g) {
        return detail::dot3(u.value(x), g.cols[0]);
      }));
      w += whitney1(t_, e) * circ;
    }
    push("whitney", w);
    // edge tangential traces
    w = zero;
    for (int e = 0; e < 6; ++e) {
      FacetFunction g{detail::as_field(tangential_trace_edge(cur, t_.edge(e))), {}, quad_order()};
      if (u.sampled()) {
        const auto geo = edge_geo_[e];
        g.sampled = [&u, geo](const Vec3& y) -> Vec3 { return {detail::dot3(u.value(geo(y)), geo.cols[0]), 0, 0}; };
      }
      auto c = project_edge(g);
      w += grad(extend_scalar(combine<Polynomial>(fp_->edge_bubbles, c, Polynomial(1)), FacetKind::Edge, e, t_));
    }
    push("edge", w);
    // face: normal trace of the curl
    w = zero;
    for (int f = 0; f < 4; ++f) {
      FacetFunction s{detail::as_field(normal_trace_face(curl(cur), t_.face(f))), {}, quad_order()};
      if (u.sampled()) {
        const auto geo = face_geo_[f];
        const Vec3 n = detail::cross3(geo.cols[0], geo.cols[1]);
        s.sampled = [&u, geo, n](const Vec3& y) -> Vec3 { return {detail::dot3(u.curl_sampled(geo(y)), n), 0, 0}; };
      }
      Polynomial q = project_face_mean(s);
      if (!q.is_zero()) w += extend_face_field(lift_L2_face(q), f, t_, p_);
    }
    push("face-curl", w);
    // face: remaining tangential traces are planar curls of face bubbles
    w = zero;
    for (int f = 0; f < 4; ++f) {
      FacetFunction v{tangential_trace_face(cur, t_.face(f)), {}, quad_order()};
      if (u.sampled()) {
        const auto geo = face_geo_[f];
        v.sampled = [&u, geo](const Vec3& y) -> Vec3 {
          const Vec3 val = u.value(geo(y));
          return {detail::dot3(val, geo.cols[1]), -detail::dot3(val, geo.cols[0]), 0};
        };
      }
      auto c = project_face_curl(v);
      Polynomial phi = combine<Polynomial>(fp_->face_bubbles, c, Polynomial(2));
      if (opt_.fault_lifting_sign) phi = -phi;
      w += grad(extend_scalar(phi, FacetKind::Face, f, t_));
    }
    push("face", w);
    // cell: curl part
    {
      FacetFunction s = cell_function(curl(cur));
      if (u.sampled()) s.sampled = [&u, this](const Vec3& y) { return u.curl_sampled(geo_(y)); };
      VectorPolynomial c = project_cell_curl(s);
      push("cell-curl", c.is_zero() ? zero : lift_L2_cell(c));
    }
    // cell: gradient part
    {
      FacetFunction s = cell_function(cur);
      if (u.sampled()) s.sampled = [&u, this](const Vec3& y) { return u.value(geo_(y)); };
      push("cell", grad(combine<Polynomial>(cell_bubbles(), project_cell_grad(s), Polynomial(3))));
    }
    out.value = sum(out.stages, zero);
    return out;
  }

  Breakdown<VectorPolynomial> pi2(const VectorField& u) const {
    Breakdown<VectorPolynomial> out;
    const bool exact = !u.sampled();
    VectorPolynomial cur = u.poly;
    auto push = [&](const char* name, const VectorPolynomial& w) {
      out.names.push_back(name);
      out.stages.push_back(w);
      cur -= w;
      if (exact) out.residuals.push_back(cur);
    };
    const VectorPolynomial zero(3, 3);
    VectorPolynomial w(3, 3);
    for (int f = 0; f < 4; ++f) {
      Rational flux = integrate_reference(normal_trace_face(cur, t_.face(f)));
      if (u.sampled()) {
        const auto& geo = face_geo_[f];
        const Vec3 n = detail::cross3(geo.cols[0], geo.cols[1]);
        flux += from_double(face_integral(f, [&](const Vec3& x) { return detail::dot3(u.value(x), n); }));
      }
      w += whitney2(t_, f) * flux;
    }
    push("whitney", w);
    w = zero;
    for (int f = 0; f < 4; ++f) {
      FacetFunction s{detail::as_field(normal_trace_face(cur, t_.face(f))), {}, quad_order()};
      if (u.sampled()) {
        const auto geo = face_geo_[f];
        const Vec3 n = detail::cross3(geo.cols[0], geo.cols[1]);
        s.sampled = [&u, geo, n](const Vec3& y) -> Vec3 { return {detail::dot3(u.value(geo(y)), n), 0, 0}; };
      }
      Polynomial q = project_face_mean(s);
      if (!q.is_zero()) w += curl(extend_face_field(lift_L2_face(q), f, t_, p_));
    }
    push("face", w);
    {
      FacetFunction s = cell_function(div(cur));
      if (u.sampled()) s.sampled = [&u, this](const Vec3& y) -> Vec3 { return {u.div_sampled(geo_(y)), 0, 0}; };
      Polynomial q = project_cell_mean(s);
      push("cell-div", q.is_zero() ? zero : lift_L3_cell(q));
    }
    {
      FacetFunction s = cell_function(cur);
      if (u.sampled()) s.sampled = [&u, this](const Vec3& y) { return u.value(geo_(y)); };
      VectorPolynomial c = project_cell_curl(s);
      push("cell", c.is_zero() ? zero : curl(lift_L2_cell(c)));
    }
    out.value = sum(out.stages, zero);
    return out;
  }

  // Cell spaces, built on first use.
  const std::vector<Polynomial>& cell_bubbles() const {
    if (!cell_grad_) {
      cell_bubbles_ = zero_trace_scalar(t_, p_ + 1);
      std::vector<VectorPolynomial> r;
      for (const auto& b : cell_bubbles_) r.push_back(pullback(grad(b), t_));
      cell_grad_.emplace(r);
    }
    return cell_bubbles_;
  }
  /// Independent curls of the zero-trace W1_p(T) (physical fields).
  const std::vector<VectorPolynomial>& cell_curl_range() const {
    cell_curl();
    return cell_curl_phys_;
  }

 private:
  static Vec3 vertex_ref(int i) {
    Vec3 y{0, 0, 0};
    if (i > 0) y[i - 1] = 1;
    return y;
  }

  template <class P>
  static P sum(const std::vector<P>& parts, P zero) {
    for (const auto& s : parts) zero += s;
    return zero;
  }

  double edge_integral(int e, const std::function<double(const Vec3&, const detail::AffineD&)>& f) const {
    const QuadratureRule r = simplex_rule(1, quad_order());
    double s = 0;
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * f(edge_geo_[e](r.points[q]), edge_geo_[e]);
    return s;
  }

  double face_integral(int f, const std::function<double(const Vec3&)>& fn) const {
    const QuadratureRule r = simplex_rule(2, quad_order());
    double s = 0;
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * fn(face_geo_[f](r.points[q]));
    return s;
  }

  const RangeProjector& cell_grad() const {
    cell_bubbles();
    return *cell_grad_;
  }

  const RangeProjector& cell_curl() const {
    if (!cell_curl_) {
      std::vector<VectorPolynomial> curls;
      for (const auto& w : zero_trace_W1(build_W1(t_, p_))) curls.push_back(curl(w));
      cell_curl_phys_ = independent_subset<VectorPolynomial>(curls);
      std::vector<VectorPolynomial> r;
      for (const auto& c : cell_curl_phys_) r.push_back(pullback(c, t_));
      cell_curl_.emplace(r);
    }
    return *cell_curl_;
  }

  const RangeProjector& cell_mean() const {
    if (!cell_mean_) {
      cell_mean_phys_ = zero_mean_scalar(t_, p_);
      std::vector<VectorPolynomial> r;
      for (const auto& q : cell_mean_phys_) r.push_back(detail::as_field(pullback(q, t_)));
      cell_mean_.emplace(r);
    }
    return *cell_mean_;
  }

  Simplex t_;
  int p_;
  InterpOptions opt_;
  detail::AffineD geo_;
  std::vector<detail::AffineD> edge_geo_, face_geo_;
  std::vector<Polynomial> lam_;
  std::shared_ptr<const detail::FacetProjectors> fp_;
  mutable std::vector<Polynomial> cell_bubbles_;
  mutable std::optional<RangeProjector> cell_grad_;
  mutable std::vector<VectorPolynomial> cell_curl_phys_;
  mutable std::optional<RangeProjector> cell_curl_;
  mutable std::vector<Polynomial> cell_mean_phys_;
  mutable std::optional<RangeProjector> cell_mean_;
};

inline Polynomial pi0(const Simplex& t, int p, const ScalarField& u, const InterpOptions& opt = {}) {
  return LocalInterpolator(t, p, opt).pi0(u).value;
}
inline VectorPolynomial pi1(const Simplex& t, int p, const VectorField& u, const InterpOptions& opt = {}) {
  return LocalInterpolator(t, p, opt).pi1(u).value;
}
inline VectorPolynomial pi2(const Simplex& t, int p, const VectorField& u, const InterpOptions& opt = {}) {
  return LocalInterpolator(t, p, opt).pi2(u).value;
}

// Mesh level ------------------------------------------------------------------

/// Global W1_p interpolant as a dof vector (no boundary condition), built
/// element by element. Shared edge and face dofs computed from different
/// elements must agree; `consistent` records whether they did.
struct GlobalInterpolant {
  int p = 0;
  GlobalDofMap dofmap;
  std::vector<Rational> dofs;
  std::vector<VectorPolynomial> local;  ///< element interpolants
  bool consistent = true;
  int mismatches = 0;
};

inline GlobalInterpolant pi_global(const Mesh& m, int p, const VectorField& u, const InterpOptions& opt = {}) {
  GlobalInterpolant g;
  g.p = p;
  g.dofmap = build_dofmap(m, p);
  g.dofs.assign(g.dofmap.num_dofs, Rational(0));
  std::vector<bool> seen(g.dofmap.num_dofs, false);
  for (int t = 0; t < m.num_tets(); ++t) {
    const Simplex s = m.element(t);
    VectorPolynomial v = LocalInterpolator(s, p, opt).pi1(u).value;
    const auto d = dof_values(p, v, s);
    for (int i = 0; i < int(d.size()); ++i) {
      const int gi = g.dofmap.local_to_global[t][i];
      const Rational val = d[i] * g.dofmap.sign[t][i];
      if (seen[gi] && g.dofs[gi] != val) {
        g.consistent = false;
        ++g.mismatches;
      }
      g.dofs[gi] = val;
      seen[gi] = true;
    }
    g.local.push_back(std::move(v));
  }
  return g;
}

/// L2 and H(curl) errors of a polynomial field per element against a sampled
/// field, by quadrature of the given order.
struct FieldError {
  double l2 = 0;
  double curl_l2 = 0;
  double hcurl() const { return std::sqrt(l2 * l2 + curl_l2 * curl_l2); }
};

inline FieldError field_error(const Mesh& m, const std::vector<VectorPolynomial>& local, const VectorField& u, int order) {
  double e0 = 0, e1 = 0;
  const QuadratureRule r = simplex_rule(3, order);
  for (int t = 0; t < m.num_tets(); ++t) {
    const Simplex s = m.element(t);
    const detail::AffineD geo(s);
    const double vol = std::abs(to_double(s.det_jacobian()));
    const VectorPolynomial c = curl(local[t]);
    const VectorPolynomial cp = curl(u.poly);
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Vec3 x = geo(r.points[q]);
      auto v = local[t].eval(std::span<const double>(x.data(), 3));
      auto cv = c.eval(std::span<const double>(x.data(), 3));
      auto up = u.poly.eval(std::span<const double>(x.data(), 3));
      auto cup = cp.eval(std::span<const double>(x.data(), 3));
      Vec3 uv{up[0], up[1], up[2]}, cu{cup[0], cup[1], cup[2]};
      if (u.sampled()) {
        const Vec3 a = u.value(x), b = u.curl_sampled(x);
        for (int k = 0; k < 3; ++k) uv[k] += a[k], cu[k] += b[k];
      }
      for (int k = 0; k < 3; ++k) {
        e0 += r.weights[q] * vol * (uv[k] - v[k]) * (uv[k] - v[k]);
        e1 += r.weights[q] * vol * (cu[k] - cv[k]) * (cu[k] - cv[k]);
      }
    }
  }
  return {std::sqrt(e0), std::sqrt(e1)};
}

struct InterpErrorRow {
  int p = 0;
  int dofs = 0;
  double l2 = 0;
  double hcurl = 0;
  bool consistent = true;
};

inline std::vector<InterpErrorRow> interp_error_study(const Mesh& m, const VectorField& u, std::span<const int> ps,
                                                      const InterpOptions& opt = {}) {
  std::vector<InterpErrorRow> rows;
  for (int p : ps) {
    auto g = pi_global(m, p, u, opt);
    const FieldError e = field_error(m, g.local, u, 2 * p + 10);
    rows.push_back({p, g.dofmap.num_dofs, e.l2, e.hcurl(), g.consistent});
  }
  return rows;
}

/// Least-squares slope of log(err) against log(p).
inline double loglog_slope(std::span<const int> ps, std::span<const double> err) {
  const int n = int(ps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(double(ps[i])), y = std::log(err[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Analytic test fields ------------------------------------------------------------

/// grad(sin x sin y sin z).
inline VectorField grad_sine_field() {
  VectorField f;
  f.value = [](const Vec3& x) -> Vec3 {
    const double sx = std::sin(x[0]), sy = std::sin(x[1]), sz = std::sin(x[2]);
    const double cx = std::cos(x[0]), cy = std::cos(x[1]), cz = std::cos(x[2]);
    return {cx * sy * sz, sx * cy * sz, sx * sy * cz};
  };
  f.jacobian = [](const Vec3& x) -> std::array<Vec3, 3> {
    const double sx = std::sin(x[0]), sy = std::sin(x[1]), sz = std::sin(x[2]);
    const double cx = std::cos(x[0]), cy = std::cos(x[1]), cz = std::cos(x[2]);
    return {{{-sx * sy * sz, cx * cy * sz, cx * sy * cz},
             {cx * cy * sz, -sx * sy * sz, sx * cy * cz},
             {cx * sy * cz, sx * cy * cz, -sx * sy * sz}}};
  };
  return f;
}

/// (sin y, sin z, sin x): analytic with nonzero curl.
inline VectorField rotating_sine_field() {
  VectorField f;
  f.value = [](const Vec3& x) -> Vec3 { return {std::sin(x[1]), std::sin(x[2]), std::sin(x[0])}; };
  f.jacobian = [](const Vec3& x) -> std::array<Vec3, 3> {
    return {{{0, std::cos(x[1]), 0}, {0, 0, std::cos(x[2])}, {std::cos(x[0]), 0, 0}}};
  };
  return f;
}

/// curl(0, 0, sin x sin y) = (sin x cos y, -cos x sin y, 0): divergence free.
inline VectorField solenoidal_sine_field() {
  VectorField f;
  f.value = [](const Vec3& x) -> Vec3 {
    return {std::sin(x[0]) * std::cos(x[1]), -std::cos(x[0]) * std::sin(x[1]), 0};
  };
  f.jacobian = [](const Vec3& x) -> std::array<Vec3, 3> {
    const double sx = std::sin(x[0]), sy = std::sin(x[1]), cx = std::cos(x[0]), cy = std::cos(x[1]);
    return {{{cx * cy, -sx * sy, 0}, {sx * sy, -cx * cy, 0}, {0, 0, 0}}};
  };
  return f;
}

}  // namespace nedelec
