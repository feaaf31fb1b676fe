#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nedelec/polynomial.hpp"
#include "nedelec/simplex.hpp"

namespace nedelec::testing {

inline Rational random_rational(std::mt19937& rng, int range = 5, int den = 4) {
  std::uniform_int_distribution<int> num_dist(-range, range);
  std::uniform_int_distribution<int> den_dist(1, den);
  Rational q(num_dist(rng), den_dist(rng));
  q.canonicalize();
  return q;
}

/// Random polynomial with roughly `density` of the monomials of degree <= deg present.
inline Polynomial random_polynomial(std::mt19937& rng, int dim, int deg, double density = 0.6) {
  std::bernoulli_distribution keep(density);
  Polynomial p(dim);
  for (const auto& e : monomials(dim, deg))
    if (keep(rng)) p.add_term(e, random_rational(rng));
  return p;
}

inline VectorPolynomial random_field(std::mt19937& rng, int ncomp, int dim, int deg, double density = 0.6) {
  std::vector<Polynomial> c;
  for (int i = 0; i < ncomp; ++i) c.push_back(random_polynomial(rng, dim, deg, density));
  return VectorPolynomial(std::move(c));
}

inline Point random_point(std::mt19937& rng, int dim = 3) {
  Point p;
  for (int i = 0; i < dim; ++i) p.push_back(random_rational(rng, 6, 5));
  return p;
}

/// A random non-degenerate tetrahedron with small rational coordinates.
inline Simplex random_tet(std::mt19937& rng) {
  for (;;) {
    std::vector<Point> v;
    for (int i = 0; i < 4; ++i) v.push_back(random_point(rng));
    try {
      Simplex s(v);
      if (abs(s.det_jacobian()) > Rational(1, 4)) return s;
    } catch (const std::domain_error&) {
    }
  }
}

/// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
/// Used as an oracle independent of the library's quadrature.
inline void oracle_gauss(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (z * p1 - p0) / (z * z - 1);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1;
    dp = n * (z * p1 - p0) / (z * z - 1);
    x[i] = 0.5 * (z + 1);
    w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
}

/// Floating integral of p over the reference tetrahedron via a Duffy-collapsed tensor rule.
inline double oracle_integrate_ref_tet(const Polynomial& p, int n = 16) {
  std::vector<double> x, w;
  oracle_gauss(n, x, w);
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double u = x[i], v = x[j], t = x[k];
        const double pt[3] = {u, v * (1 - u), t * (1 - u) * (1 - v)};
        s += w[i] * w[j] * w[k] * (1 - u) * (1 - u) * (1 - v) * p.eval(pt);
      }
  return s;
}

}  // namespace nedelec::testing
