#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "derham.hpp"
#include "interp.hpp"
#include "localspace.hpp"
#include "mesh.hpp"

namespace nedelec {

/// Seeded generator of random rational polynomials, fields and elements.
class RandomInputs {
 public:
  explicit RandomInputs(std::uint64_t seed) : rng_(seed) {}

  Rational rational(int range = 5, int den = 4) {
    std::uniform_int_distribution<int> num(-range, range), d(1, den);
    Rational q(num(rng_), d(rng_));
    q.canonicalize();
    return q;
  }
  Polynomial polynomial(int dim, int deg, double density = 0.6) {
    std::bernoulli_distribution keep(density);
    Polynomial p(dim);
    for (const auto& e : monomials(dim, deg))
      if (keep(rng_)) p.add_term(e, rational());
    return p;
  }
  VectorPolynomial field(int deg, double density = 0.6) {
    return VectorPolynomial(std::vector<Polynomial>{polynomial(3, deg, density), polynomial(3, deg, density),
                                                    polynomial(3, deg, density)});
  }
  VectorPolynomial combination(const std::vector<VectorPolynomial>& basis) {
    VectorPolynomial u(3, 3);
    for (const auto& b : basis) u += b * rational();
    return u;
  }
  Point point() { return {rational(6, 5), rational(6, 5), rational(6, 5)}; }
  /// Non-degenerate tetrahedron with |det J| > 1/4.
  Simplex tet() {
    for (;;) {
      std::vector<Point> v{point(), point(), point(), point()};
      try {
        Simplex s(v);
        if (abs(s.det_jacobian()) > Rational(1, 4)) return s;
      } catch (const std::domain_error&) {
      }
    }
  }

 private:
  std::mt19937_64 rng_;
};

struct CheckResult {
  std::string id;
  int p = 0;
  bool passed = true;
  std::string detail;
};

inline void to_json(nlohmann::json& j, const CheckResult& c) {
  j = {{"id", c.id}, {"p", c.p}, {"passed", c.passed}, {"detail", c.detail}};
}

struct VerifyOptions {
  int trials = 4;  ///< random inputs per projector / commuting check
  std::uint64_t seed = 1;
  InterpOptions interp;
};

namespace detail {

inline std::vector<Simplex> verify_elements(RandomInputs& rnd) { return {Simplex::reference(3), rnd.tet()}; }

}  // namespace detail

/// W1 and W2 dimension formulas and the alternating sum of the volume row.
inline CheckResult check_dimension(int p) {
  CheckResult c{"dimension", p};
  const int d1 = build_W1(Simplex::reference(3), p).dim();
  const int d2 = build_W2(Simplex::reference(3), p).dim();
  const int formula = (1 + p) * (3 + p) * (4 + p) / 2;
  const auto rep = verify_local_sequence(Simplex::reference(3), p);
  const int alt = rep.rows.at(0).alternating_sum;
  c.passed = d1 == formula && d2 == dim_W2(p) && alt == 0;
  c.detail = "dim W1 = " + std::to_string(d1) + " (formula " + std::to_string(formula) + "), dim W2 = " +
             std::to_string(d2) + ", alternating sum " + std::to_string(alt);
  return c;
}

/// The dof matrix of the spanning basis is invertible over the rationals.
inline CheckResult check_unisolvence(int p, RandomInputs& rnd) {
  CheckResult c{"unisolvence", p};
  for (const Simplex& t : detail::verify_elements(rnd)) {
    const auto w1 = build_W1(t, p);
    const int r = rank(dof_matrix(w1));
    if (r != w1.dim()) {
      c.passed = false;
      c.detail = "dof matrix rank " + std::to_string(r) + " < " + std::to_string(w1.dim());
      return c;
    }
  }
  c.detail = "dof matrix of size " + std::to_string(dim_W1(p)) + " invertible";
  return c;
}

/// Volume, face and edge rows plus zero-trace rows are exact; traces commute.
inline CheckResult check_exactness(int p, RandomInputs& rnd) {
  CheckResult c{"exactness", p};
  std::vector<std::string> bad;
  for (const Simplex& t : detail::verify_elements(rnd)) {
    for (const auto& rep : {verify_local_sequence(t, p), verify_zero_trace_sequence(t, p)})
      for (const auto& f : rep.failures()) bad.push_back(f);
  }
  c.passed = bad.empty();
  for (const auto& b : bad) c.detail += (c.detail.empty() ? "" : "; ") + b;
  if (c.passed) c.detail = "all rows exact, trace checks hold";
  return c;
}

/// pi0, pi1, pi2 reproduce their target spaces and are idempotent.
inline CheckResult check_projector(int p, RandomInputs& rnd, const VerifyOptions& opt) {
  CheckResult c{"projector", p};
  int failures = 0;
  for (const Simplex& t : detail::verify_elements(rnd)) {
    LocalInterpolator li(t, p, opt.interp);
    const auto w1 = build_W1(t, p).basis;
    const auto w2 = build_W2(t, p).basis;
    for (int k = 0; k < opt.trials; ++k) {
      const Polynomial s = rnd.polynomial(3, p + 1);
      failures += li.pi0(s).value != s;
      const VectorPolynomial u = rnd.combination(w1);
      failures += li.pi1(u).value != u;
      const VectorPolynomial v = rnd.combination(w2);
      failures += li.pi2(v).value != v;
      const auto r = li.pi1(rnd.field(p + 2)).value;
      failures += li.pi1(r).value != r;
    }
  }
  c.passed = failures == 0;
  c.detail = std::to_string(failures) + " failures";
  return c;
}

/// grad pi0 = pi1 grad and curl pi1 = pi2 curl on random polynomial inputs.
inline CheckResult check_commuting(int p, RandomInputs& rnd, const VerifyOptions& opt) {
  CheckResult c{"commuting", p};
  int grad_fail = 0, curl_fail = 0;
  for (const Simplex& t : detail::verify_elements(rnd)) {
    LocalInterpolator li(t, p, opt.interp);
    for (int k = 0; k < opt.trials; ++k) {
      const Polynomial s = rnd.polynomial(3, p + 3);
      grad_fail += grad(li.pi0(s).value) != li.pi1(grad(s)).value;
      const VectorPolynomial u = rnd.field(p + 2);
      curl_fail += curl(li.pi1(u).value) != li.pi2(curl(u)).value;
    }
  }
  c.passed = grad_fail == 0 && curl_fail == 0;
  c.detail = "grad square " + std::to_string(grad_fail) + " failures, curl square " + std::to_string(curl_fail) +
             " failures";
  return c;
}

/// Face traces of pi1 u depend only on the face trace of u, and zero traces
/// are preserved; shared dofs on a two-tet mesh agree from both sides.
inline CheckResult check_trace_locality(int p, RandomInputs& rnd, const VerifyOptions& opt) {
  CheckResult c{"trace_locality", p};
  int failures = 0;
  const Simplex t = rnd.tet();
  const auto lam = t.barycentrics();
  LocalInterpolator li(t, p, opt.interp);
  for (int k = 0; k < opt.trials; ++k) {
    const VectorPolynomial u = rnd.field(p + 2);
    const auto base = li.pi1(u).value;
    for (int f = 0; f < 4; ++f) {
      const VectorPolynomial bump = lam[3 - f] * rnd.field(2);
      failures += tangential_trace_face(base, t.face(f)) != tangential_trace_face(li.pi1(u + bump).value, t.face(f));
      failures += !tangential_trace_face(li.pi1(bump).value, t.face(f)).is_zero();
    }
  }
  std::vector<Point> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  const Mesh two(v, {{0, 1, 2, 3}, {1, 2, 3, 4}});
  int mismatches = 0;
  for (int k = 0; k < opt.trials; ++k) mismatches += pi_global(two, p, VectorField(rnd.field(p + 2)), opt.interp).mismatches;
  c.passed = failures == 0 && mismatches == 0;
  c.detail = std::to_string(failures) + " local failures, " + std::to_string(mismatches) + " shared-dof mismatches";
  return c;
}

/// The full local suite for one p.
inline std::vector<CheckResult> verify_suite(int p, const VerifyOptions& opt = {}) {
  RandomInputs rnd(opt.seed * 1000003ULL + std::uint64_t(p));
  return {check_dimension(p),           check_unisolvence(p, rnd),    check_exactness(p, rnd),
          check_projector(p, rnd, opt), check_commuting(p, rnd, opt), check_trace_locality(p, rnd, opt)};
}

}  // namespace nedelec
