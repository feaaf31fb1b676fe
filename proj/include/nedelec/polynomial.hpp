#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace nedelec {

/// Exponent multi-index. Entries beyond the polynomial's dimension stay zero.
using Exponent = std::array<std::uint8_t, 3>;

inline int total_degree(const Exponent& e) { return int(e[0]) + int(e[1]) + int(e[2]); }

/// All exponents of total degree exactly k in `dim` variables, lexicographically
/// descending (x^2, xy, xz, y^2, ...).
inline std::vector<Exponent> homogeneous_monomials(int dim, int k) {
  std::vector<Exponent> out;
  if (k < 0) return out;
  if (dim == 1) {
    out.push_back({std::uint8_t(k), 0, 0});
  } else if (dim == 2) {
    for (int a = k; a >= 0; --a) out.push_back({std::uint8_t(a), std::uint8_t(k - a), 0});
  } else {
    for (int a = k; a >= 0; --a)
      for (int b = k - a; b >= 0; --b)
        out.push_back({std::uint8_t(a), std::uint8_t(b), std::uint8_t(k - a - b)});
  }
  return out;
}

/// All exponents of total degree <= k, graded (by degree, then lexicographically descending).
inline std::vector<Exponent> monomials(int dim, int k) {
  std::vector<Exponent> out;
  for (int d = 0; d <= k; ++d) {
    auto h = homogeneous_monomials(dim, d);
    out.insert(out.end(), h.begin(), h.end());
  }
  return out;
}

/// dim P_k in `dim` variables.
inline int poly_space_dim(int dim, int k) {
  if (k < 0) return 0;
  long n = 1;
  for (int i = 1; i <= dim; ++i) n = n * (k + i) / i;
  return int(n);
}

/// Sparse multivariate polynomial with exact rational coefficients in 1, 2 or 3
/// variables. Zero coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Rational>;

  explicit Polynomial(int dim = 3) : dim_(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Polynomial: dimension must be 1, 2 or 3");
  }

  static Polynomial constant(int dim, const Rational& c) {
    Polynomial p(dim);
    p.add_term({0, 0, 0}, c);
    return p;
  }
  static Polynomial variable(int dim, int i) {
    Exponent e{0, 0, 0};
    e.at(i) = 1;
    return monomial(dim, e);
  }
  static Polynomial monomial(int dim, const Exponent& e, const Rational& c = 1) {
    Polynomial p(dim);
    p.add_term(e, c);
    return p;
  }

  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  Rational coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Exponent& e, const Rational& c) {
    for (int i = dim_; i < 3; ++i)
      if (e[i] != 0) throw std::invalid_argument("Polynomial: exponent exceeds dimension");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial r(a.dim_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e{std::uint8_t(ea[0] + eb[0]), std::uint8_t(ea[1] + eb[1]),
                   std::uint8_t(ea[2] + eb[2])};
        r.add_term(e, ca * cb);
      }
    return r;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  Rational operator()(std::span<const Rational> x) const {
    Rational s = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }
  Rational operator()(std::initializer_list<Rational> x) const {
    return (*this)(std::span<const Rational>(x.begin(), x.size()));
  }

  double eval(std::span<const double> x) const {
    double s = 0;
    for (const auto& [e, c] : terms_) {
      double t = to_double(c);
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  Polynomial derivative(int i) const {
    if (i < 0 || i >= dim_) throw std::out_of_range("Polynomial::derivative: bad variable");
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponent f = e;
      f[i] -= 1;
      r.add_term(f, c * int(e[i]));
    }
    return r;
  }

  Polynomial homogeneous_part(int k) const {
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) == k) r.terms_.emplace(e, c);
    return r;
  }

  Polynomial pow(int n) const {
    Polynomial r = constant(dim_, 1);
    for (int i = 0; i < n; ++i) r *= *this;
    return r;
  }

 private:
  void check_dim(const Polynomial& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("Polynomial: dimension mismatch");
  }

  int dim_;
  Terms terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
  static const char* names[] = {"x", "y", "z"};
  if (p.is_zero()) return os << "0";
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int i = 0; i < p.dim(); ++i)
      if (e[i]) os << "*" << names[i] << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
  }
  return os;
}

/// Substitutes x_i -> subs[i]. The result lives in the dimension of `subs`.
inline Polynomial compose(const Polynomial& p, std::span<const Polynomial> subs) {
  if (int(subs.size()) != p.dim()) throw std::invalid_argument("compose: wrong substitution count");
  const int target = subs.empty() ? 1 : subs[0].dim();
  std::array<std::vector<Polynomial>, 3> powers;
  for (int i = 0; i < p.dim(); ++i) powers[i].push_back(Polynomial::constant(target, 1));
  Polynomial r(target);
  for (const auto& [e, c] : p.terms()) {
    Polynomial t = Polynomial::constant(target, c);
    for (int i = 0; i < p.dim(); ++i) {
      while (int(powers[i].size()) <= e[i]) powers[i].push_back(powers[i].back() * subs[i]);
      if (e[i]) t *= powers[i][e[i]];
    }
    r += t;
  }
  return r;
}

/// p(x + shift).
inline Polynomial translate(const Polynomial& p, std::span<const Rational> shift) {
  std::vector<Polynomial> subs;
  for (int i = 0; i < p.dim(); ++i)
    subs.push_back(Polynomial::variable(p.dim(), i) + Polynomial::constant(p.dim(), shift[i]));
  return compose(p, subs);
}

/// Vector field with 2 or 3 polynomial components of common dimension.
class VectorPolynomial {
 public:
  VectorPolynomial() = default;
  VectorPolynomial(int ncomp, int dim) : comps_(ncomp, Polynomial(dim)) {}
  VectorPolynomial(std::initializer_list<Polynomial> comps) : comps_(comps) { check(); }
  explicit VectorPolynomial(std::vector<Polynomial> comps) : comps_(std::move(comps)) { check(); }

  static VectorPolynomial unit(int ncomp, int dim, int c, const Polynomial& p) {
    VectorPolynomial v(ncomp, dim);
    v[c] = p;
    return v;
  }

  int size() const { return int(comps_.size()); }
  int dim() const { return comps_.empty() ? 0 : comps_[0].dim(); }
  Polynomial& operator[](int i) { return comps_.at(i); }
  const Polynomial& operator[](int i) const { return comps_.at(i); }
  auto begin() const { return comps_.begin(); }
  auto end() const { return comps_.end(); }

  bool is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Polynomial& p) { return p.is_zero(); });
  }
  int degree() const {
    int d = -1;
    for (const auto& p : comps_) d = std::max(d, p.degree());
    return d;
  }

  VectorPolynomial& operator+=(const VectorPolynomial& o) {
    same_shape(o);
    for (int i = 0; i < size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  VectorPolynomial& operator-=(const VectorPolynomial& o) {
    same_shape(o);
    for (int i = 0; i < size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  VectorPolynomial& operator*=(const Rational& s) {
    for (auto& p : comps_) p *= s;
    return *this;
  }
  friend VectorPolynomial operator+(VectorPolynomial a, const VectorPolynomial& b) { return a += b; }
  friend VectorPolynomial operator-(VectorPolynomial a, const VectorPolynomial& b) { return a -= b; }
  friend VectorPolynomial operator-(VectorPolynomial a) { return a *= Rational(-1); }
  friend VectorPolynomial operator*(VectorPolynomial a, const Rational& s) { return a *= s; }
  friend VectorPolynomial operator*(const Rational& s, VectorPolynomial a) { return a *= s; }
  friend VectorPolynomial operator*(const Polynomial& s, VectorPolynomial a) {
    for (auto& p : a.comps_) p = s * p;
    return a;
  }
  friend bool operator==(const VectorPolynomial& a, const VectorPolynomial& b) {
    return a.comps_ == b.comps_;
  }

  std::vector<Rational> operator()(std::span<const Rational> x) const {
    std::vector<Rational> r;
    for (const auto& p : comps_) r.push_back(p(x));
    return r;
  }
  std::vector<double> eval(std::span<const double> x) const {
    std::vector<double> r;
    for (const auto& p : comps_) r.push_back(p.eval(x));
    return r;
  }

 private:
  void check() const {
    for (const auto& p : comps_)
      if (p.dim() != comps_[0].dim())
        throw std::invalid_argument("VectorPolynomial: component dimensions differ");
  }
  void same_shape(const VectorPolynomial& o) const {
    if (o.size() != size()) throw std::invalid_argument("VectorPolynomial: component count mismatch");
  }

  std::vector<Polynomial> comps_;
};

inline std::ostream& operator<<(std::ostream& os, const VectorPolynomial& v) {
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os << ")";
}

inline Polynomial dot(const VectorPolynomial& a, const VectorPolynomial& b) {
  Polynomial r(a.dim());
  for (int i = 0; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

inline VectorPolynomial cross(const VectorPolynomial& a, const VectorPolynomial& b) {
  if (a.size() != 3 || b.size() != 3) throw std::invalid_argument("cross: needs 3 components");
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Constant vector field.
inline VectorPolynomial constant_field(int dim, std::span<const Rational> c) {
  std::vector<Polynomial> comps;
  for (const auto& v : c) comps.push_back(Polynomial::constant(dim, v));
  return VectorPolynomial(std::move(comps));
}

/// The position field x (or x - a when `anchor` is given).
inline VectorPolynomial position_field(int dim, std::span<const Rational> anchor = {}) {
  std::vector<Polynomial> comps;
  for (int i = 0; i < dim; ++i) {
    Polynomial p = Polynomial::variable(dim, i);
    if (!anchor.empty()) p -= Polynomial::constant(dim, anchor[i]);
    comps.push_back(p);
  }
  return VectorPolynomial(std::move(comps));
}

inline VectorPolynomial compose(const VectorPolynomial& v, std::span<const Polynomial> subs) {
  std::vector<Polynomial> comps;
  for (const auto& p : v) comps.push_back(compose(p, subs));
  return VectorPolynomial(std::move(comps));
}

inline VectorPolynomial translate(const VectorPolynomial& v, std::span<const Rational> shift) {
  std::vector<Polynomial> comps;
  for (const auto& p : v) comps.push_back(translate(p, shift));
  return VectorPolynomial(std::move(comps));
}

// Differential operators -----------------------------------------------------

inline VectorPolynomial grad(const Polynomial& p) {
  std::vector<Polynomial> comps;
  for (int i = 0; i < p.dim(); ++i) comps.push_back(p.derivative(i));
  return VectorPolynomial(std::move(comps));
}

inline VectorPolynomial curl(const VectorPolynomial& v) {
  if (v.size() != 3 || v.dim() != 3) throw std::invalid_argument("curl: needs a 3D field");
  return {v[2].derivative(1) - v[1].derivative(2), v[0].derivative(2) - v[2].derivative(0),
          v[1].derivative(0) - v[0].derivative(1)};
}

inline Polynomial div(const VectorPolynomial& v) {
  Polynomial r(v.dim());
  for (int i = 0; i < v.size(); ++i) r += v[i].derivative(i);
  return r;
}

/// Vector curl of a planar scalar: (d/dy p, -d/dx p).
inline VectorPolynomial curl2d(const Polynomial& p) {
  if (p.dim() != 2) throw std::invalid_argument("curl2d: needs a 2D polynomial");
  return {p.derivative(1), -p.derivative(0)};
}

/// Scalar rotation of a planar field: d/dx v_1 - d/dy v_0.
inline Polynomial rot2d(const VectorPolynomial& v) {
  if (v.size() != 2 || v.dim() != 2) throw std::invalid_argument("rot2d: needs a 2D field");
  return v[1].derivative(0) - v[0].derivative(1);
}

inline Polynomial div2d(const VectorPolynomial& v) {
  if (v.size() != 2 || v.dim() != 2) throw std::invalid_argument("div2d: needs a 2D field");
  return div(v);
}

}  // namespace nedelec
