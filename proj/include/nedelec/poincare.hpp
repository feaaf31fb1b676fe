#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "polynomial.hpp"

namespace nedelec {

namespace detail {

// Shifts the anchor to the origin, divides each homogeneous part of degree k
// by (k + offset), which is the closed form of int_0^1 t^(k + offset - 1) dt.
inline Polynomial radial_weight(const Polynomial& p, std::span<const Rational> anchor, int offset) {
  Polynomial shifted = translate(p, anchor);
  Polynomial out(p.dim());
  for (const auto& [e, c] : shifted.terms()) out.add_term(e, c / (total_degree(e) + offset));
  return out;
}

inline std::vector<Rational> negated(std::span<const Rational> a) {
  std::vector<Rational> n;
  for (const auto& x : a) n.push_back(-x);
  return n;
}

inline std::vector<Rational> anchor_or_origin(int dim, std::span<const Rational> a) {
  if (a.empty()) return std::vector<Rational>(dim, Rational(0));
  if (int(a.size()) != dim) throw std::invalid_argument("Poincare lifting: anchor dimension mismatch");
  return {a.begin(), a.end()};
}

}  // namespace detail

/// R_a u (x) = int_0^1 t u(a + t(x - a)) dt  x  (x - a).
/// Right inverse of curl on divergence-free fields.
inline VectorPolynomial lift_R(const VectorPolynomial& u, std::span<const Rational> anchor = {}) {
  if (u.size() != 3 || u.dim() != 3) throw std::invalid_argument("lift_R: needs a 3D field");
  const auto a = detail::anchor_or_origin(3, anchor);
  std::vector<Polynomial> w;
  for (const auto& c : u) w.push_back(detail::radial_weight(c, a, 2));
  VectorPolynomial r = cross(VectorPolynomial(std::move(w)), position_field(3));
  return translate(r, detail::negated(a));
}

/// Planar lifting int_0^1 t u(a + t(x - a)) dt (x - a); div2d of the result is u.
inline VectorPolynomial lift_R2d(const Polynomial& u, std::span<const Rational> anchor = {}) {
  if (u.dim() != 2) throw std::invalid_argument("lift_R2d: needs a 2D polynomial");
  const auto a = detail::anchor_or_origin(2, anchor);
  VectorPolynomial r = detail::radial_weight(u, a, 2) * position_field(2);
  return translate(r, detail::negated(a));
}

/// D_a u (x) = int_0^1 t^2 u(a + t(x - a)) dt (x - a); div of the result is u.
inline VectorPolynomial lift_D(const Polynomial& u, std::span<const Rational> anchor = {}) {
  if (u.dim() != 3) throw std::invalid_argument("lift_D: needs a 3D polynomial");
  const auto a = detail::anchor_or_origin(3, anchor);
  VectorPolynomial r = detail::radial_weight(u, a, 3) * position_field(3);
  return translate(r, detail::negated(a));
}

}  // namespace nedelec
