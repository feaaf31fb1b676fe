#include <gtest/gtest.h>

#include <random>

#include "nedelec/linalg.hpp"
#include "nedelec/polynomial.hpp"
#include "nedelec/quadrature.hpp"
#include "nedelec/simplex.hpp"
#include "test_util.hpp"

using namespace nedelec;
using nedelec::testing::random_field;
using nedelec::testing::random_polynomial;

namespace {

Polynomial X() { return Polynomial::variable(3, 0); }
Polynomial Y() { return Polynomial::variable(3, 1); }
Polynomial Z() { return Polynomial::variable(3, 2); }
Polynomial C(const Rational& c) { return Polynomial::constant(3, c); }

}  // namespace

TEST(Rational, CanonicalForm) {
  Rational q(6, -4);
  q.canonicalize();
  EXPECT_EQ(q.get_num(), -3);
  EXPECT_EQ(q.get_den(), 2);
  EXPECT_EQ(parse_rational("-2/7"), Rational(-2, 7));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(from_double(0.375), Rational(3, 8));
  EXPECT_THROW(parse_rational("1.2.3"), std::invalid_argument);
}

TEST(Polynomial, ZeroHasDegreeMinusOne) {
  Polynomial p(3);
  EXPECT_EQ(p.degree(), -1);
  p.add_term({1, 0, 0}, 2);
  p.add_term({1, 0, 0}, -2);
  EXPECT_TRUE(p.is_zero());
  EXPECT_TRUE(p.terms().empty());
}

TEST(Polynomial, Grad) {
  EXPECT_TRUE(grad(C(1)).is_zero());
  EXPECT_EQ(grad(X() * Y()), (VectorPolynomial{Y(), X(), C(0)}));
  EXPECT_EQ(grad(X() * X() + Y() * Y() + Z() * Z()), (VectorPolynomial{2 * X(), 2 * Y(), 2 * Z()}));
}

TEST(Polynomial, Curl) {
  EXPECT_TRUE(curl(grad(X() * X() * Y())).is_zero());
  // curl(0,0,x) = (d_y x, -d_x x, 0)
  EXPECT_EQ(curl(VectorPolynomial{C(0), C(0), X()}), (VectorPolynomial{C(0), C(-1), C(0)}));
  EXPECT_EQ(curl(VectorPolynomial{-Y(), X(), C(0)}), (VectorPolynomial{C(0), C(0), C(2)}));
}

TEST(Polynomial, Div) {
  EXPECT_EQ(div(position_field(3)), C(3));
  EXPECT_TRUE(div(curl(VectorPolynomial{X() * X() * Y(), Y() * Z(), X()})).is_zero());
  EXPECT_TRUE(div(VectorPolynomial{Y(), Z(), X()}).is_zero());
}

TEST(Polynomial, DegreeDropsByOneUnderGrad) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial p = random_polynomial(rng, 3, 5);
    VectorPolynomial g = grad(p);
    if (g.is_zero()) continue;
    EXPECT_EQ(g.degree(), p.degree() - 1);
  }
}

TEST(Polynomial, ComplexIdentitiesOnRandomInputs) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int deg = trial % 7;
    Polynomial p = random_polynomial(rng, 3, deg);
    VectorPolynomial v = random_field(rng, 3, 3, deg);
    ASSERT_TRUE(curl(grad(p)).is_zero());
    ASSERT_TRUE(div(curl(v)).is_zero());
  }
}

TEST(Polynomial, PlanarOperators) {
  Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  Polynomial p = x * x * y;
  EXPECT_EQ(curl2d(p), (VectorPolynomial{x * x, -2 * x * y}));
  EXPECT_TRUE(div2d(curl2d(p)).is_zero());
  EXPECT_EQ(rot2d(VectorPolynomial{-y, x}), Polynomial::constant(2, 2));
}

TEST(Polynomial, ComposeIsRingHomomorphism) {
  std::mt19937 rng(5);
  Simplex t = nedelec::testing::random_tet(rng);
  for (int trial = 0; trial < 40; ++trial) {
    Polynomial p = random_polynomial(rng, 3, 3), q = random_polynomial(rng, 3, 3);
    EXPECT_EQ(pullback(p * q, t), pullback(p, t) * pullback(q, t));
    EXPECT_EQ(pullback(p + q, t), pullback(p, t) + pullback(q, t));
    Simplex f = t.face(trial % 4);
    EXPECT_EQ(pullback(p * q, f), pullback(p, f) * pullback(q, f));
  }
}

TEST(Polynomial, ExactAndFloatEvaluationAgree) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    Polynomial p = random_polynomial(rng, 3, 4);
    std::vector<Rational> x{Rational(1, 3), Rational(-2, 5), Rational(3, 7)};
    std::vector<double> xd{1.0 / 3, -2.0 / 5, 3.0 / 7};
    EXPECT_NEAR(to_double(p(x)), p.eval(xd), 1e-12);
  }
}

TEST(Integration, ReferenceTetVolume) {
  Simplex ref = Simplex::reference(3);
  EXPECT_EQ(integrate_simplex(C(1), ref), Rational(1, 6));
  EXPECT_EQ(ref.volume(), Rational(1, 6));
}

TEST(Integration, XYOverReferenceTet) {
  // xy = l1 l2; factorial formula gives |T| 3! 1! 1! / 5! = (1/6)(6/120) = 1/120.
  EXPECT_EQ(integrate_simplex(X() * Y(), Simplex::reference(3)), Rational(1, 120));
}

TEST(Integration, BarycentricMomentsOnRandomTets) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Simplex t = nedelec::testing::random_tet(rng);
    auto lam = t.barycentrics();
    const Rational vol = t.volume();
    for (int i = 0; i < 4; ++i) EXPECT_EQ(integrate_simplex(lam[i], t), vol / 4);
    // alpha = (1,1,0,0): |T| 3! / 5! = |T| / 20
    EXPECT_EQ(integrate_simplex(lam[0] * lam[1], t), vol / 20);
    // alpha = (2,0,0,0): |T| 3! 2! / 5! = |T| / 10
    EXPECT_EQ(integrate_simplex(lam[2] * lam[2], t), vol / 10);
  }
}

TEST(Integration, BarycentricsAreDualToVertices) {
  std::mt19937 rng(4);
  Simplex t = nedelec::testing::random_tet(rng);
  auto lam = t.barycentrics();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(lam[i](t.vertex(j)), Rational(i == j ? 1 : 0));
}

TEST(Integration, AgreesWithFloatingQuadratureOracle) {
  std::mt19937 rng(77);
  Simplex ref = Simplex::reference(3);
  for (int trial = 0; trial < 100; ++trial) {
    Polynomial p = random_polynomial(rng, 3, trial % 9, 0.5);
    const double exact = to_double(integrate_simplex(p, ref));
    const double oracle = nedelec::testing::oracle_integrate_ref_tet(p);
    EXPECT_NEAR(exact, oracle, 1e-12 * std::max(1.0, std::abs(oracle))) << p;
  }
}

TEST(Integration, LibraryQuadratureIsExactToOrder) {
  std::mt19937 rng(9);
  for (int dim = 1; dim <= 3; ++dim)
    for (int order = 0; order <= 10; ++order) {
      Polynomial p = random_polynomial(rng, dim, order, 0.7);
      auto rule = simplex_rule(dim, order);
      double s = 0;
      for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * p.eval(rule.points[q]);
      EXPECT_NEAR(s, to_double(integrate_reference(p)), 1e-13) << "dim " << dim << " order " << order;
    }
}

TEST(Integration, DegenerateSimplexRejected) {
  std::vector<Point> v{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}};
  EXPECT_THROW(Simplex{v}, std::domain_error);
}

TEST(Traces, ConstantFieldOnAxisEdge) {
  Simplex e(std::vector<Point>{{0, 0, 0}, {1, 0, 0}});
  VectorPolynomial u = constant_field(3, std::vector<Rational>{1, 0, 0});
  EXPECT_EQ(tangential_trace_edge(u, e), Polynomial::constant(1, 1));
}

TEST(Traces, GradientTraceIsDerivativeOfRestriction) {
  std::mt19937 rng(12);
  Simplex t = nedelec::testing::random_tet(rng);
  for (int trial = 0; trial < 30; ++trial) {
    Polynomial p = random_polynomial(rng, 3, 4);
    for (int e = 0; e < 6; ++e) {
      Simplex edge = t.edge(e);
      EXPECT_EQ(tangential_trace_edge(grad(p), edge), restrict_to(p, edge).derivative(0));
    }
  }
}

TEST(Traces, FaceTraceMatchesDirectSubstitution) {
  // Face z = 0 of the reference tet: chart (s, r) -> (s, r, 0), J1 = e1, J2 = e2.
  Simplex f = Simplex::reference(3).face(0);
  VectorPolynomial u{-Y(), X(), C(0)};
  Polynomial s = Polynomial::variable(2, 0), r = Polynomial::variable(2, 1);
  // (u . J2, -u . J1) = (x, y) at (s, r, 0).
  EXPECT_EQ(tangential_trace_face(u, f), (VectorPolynomial{s, r}));
  // u x n with n = e3: (u_y, -u_x, 0) = (x, y, 0): same planar components.
  VectorPolynomial uxn = cross(u, constant_field(3, std::vector<Rational>{0, 0, 1}));
  EXPECT_EQ(pullback(uxn[0], f), s);
  EXPECT_EQ(pullback(uxn[1], f), r);
}

TEST(Traces, FaceTraceDivergenceIsNormalTraceOfCurl) {
  std::mt19937 rng(13);
  Simplex t = nedelec::testing::random_tet(rng);
  for (int trial = 0; trial < 20; ++trial) {
    VectorPolynomial u = random_field(rng, 3, 3, 3);
    for (int f = 0; f < 4; ++f) {
      Simplex face = t.face(f);
      EXPECT_EQ(div2d(tangential_trace_face(u, face)), normal_trace_face(curl(u), face));
    }
  }
}

TEST(Traces, FaceEdgeNormalTraceIsEdgeTangentialTrace) {
  std::mt19937 rng(14);
  Simplex t = nedelec::testing::random_tet(rng);
  Simplex tri = Simplex::reference(2);
  for (int trial = 0; trial < 10; ++trial) {
    VectorPolynomial u = random_field(rng, 3, 3, 3);
    for (int f = 0; f < 4; ++f) {
      VectorPolynomial v = tangential_trace_face(u, t.face(f));
      for (int k = 0; k < 3; ++k) {
        Simplex e2 = tri.facet(kTriangleEdges[k]);
        EXPECT_EQ(normal_trace_edge2d(v, e2), tangential_trace_edge(u, t.edge(kTetFaceEdges[f][k])));
      }
    }
  }
}

TEST(Linalg, NullspaceAndInverse) {
  Matrix m(2, 3);
  m(0, 0) = 1, m(0, 1) = 2, m(0, 2) = 3;
  m(1, 0) = 2, m(1, 1) = 4, m(1, 2) = 7;
  EXPECT_EQ(rank(m), 2);
  Matrix n = nullspace(m);
  EXPECT_EQ(n.cols(), 1);
  EXPECT_TRUE((m * n).is_zero());
  Matrix a(2, 2);
  a(0, 0) = 2, a(0, 1) = 1, a(1, 0) = 1, a(1, 1) = 1;
  EXPECT_EQ(a * inverse(a), Matrix::identity(2));
  Matrix s(2, 2);
  s(0, 0) = 1, s(0, 1) = 2, s(1, 0) = 2, s(1, 1) = 4;
  EXPECT_THROW(inverse(s), std::domain_error);
}
