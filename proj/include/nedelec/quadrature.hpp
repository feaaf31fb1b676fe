#pragma once

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace nedelec {

/// Quadrature rule on a reference simplex (points in reference coordinates,
/// unused coordinates zero).
struct QuadratureRule {
  int dim = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1].
inline QuadratureRule gauss_legendre01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre01: n must be positive");
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> nodes;
  for (double z : zeros) {
    nodes.push_back(z);
    if (z != 0.0) nodes.push_back(-z);
  }
  std::sort(nodes.begin(), nodes.end());
  QuadratureRule r;
  r.dim = 1;
  for (double x : nodes) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.points.push_back({0.5 * (x + 1.0), 0.0, 0.0});
    r.weights.push_back(0.5 * w);
  }
  cache.emplace(n, r);
  return r;
}

/// Collapsed-coordinate Gauss rule on the reference simplex of dimension `dim`
/// (1, 2 or 3), exact for polynomials of total degree <= `order`.
inline QuadratureRule simplex_rule(int dim, int order) {
  const int n = std::max(1, (order + dim) / 2 + 1);
  const QuadratureRule g = gauss_legendre01(n);
  QuadratureRule r;
  r.dim = dim;
  if (dim == 1) return g;
  if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = g.points[i][0], v = g.points[j][0];
        r.points.push_back({u, v * (1 - u), 0.0});
        r.weights.push_back(g.weights[i] * g.weights[j] * (1 - u));
      }
    return r;
  }
  if (dim == 3) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double u = g.points[i][0], v = g.points[j][0], w = g.points[k][0];
          r.points.push_back({u, v * (1 - u), w * (1 - u) * (1 - v)});
          r.weights.push_back(g.weights[i] * g.weights[j] * g.weights[k] * (1 - u) * (1 - u) * (1 - v));
        }
    return r;
  }
  throw std::invalid_argument("simplex_rule: dimension must be 1, 2 or 3");
}

}  // namespace nedelec
