#include <gtest/gtest.h>

#include <random>

#include "nedelec/linalg.hpp"
#include "nedelec/poincare.hpp"
#include "test_util.hpp"

using namespace nedelec;
using nedelec::testing::random_field;
using nedelec::testing::random_point;
using nedelec::testing::random_polynomial;

namespace {

Polynomial X() { return Polynomial::variable(3, 0); }
Polynomial Y() { return Polynomial::variable(3, 1); }
Polynomial Z() { return Polynomial::variable(3, 2); }
Polynomial C(const Rational& c) { return Polynomial::constant(3, c); }

}  // namespace

TEST(LiftR, ZeroMapsToZero) {
  std::vector<Rational> a{1, 2, 3};
  EXPECT_TRUE(lift_R(VectorPolynomial(3, 3), a).is_zero());
}

TEST(LiftR, ConstantFieldAtOrigin) {
  // int_0^1 t dt = 1/2, (0,0,1) x (x,y,z) = (-y, x, 0).
  VectorPolynomial u{C(0), C(0), C(1)};
  EXPECT_EQ(lift_R(u), (VectorPolynomial{-Y() * Rational(1, 2), X() * Rational(1, 2), C(0)}));
}

TEST(LiftR, RightInverseOfCurlOnLinearSolenoidal) {
  VectorPolynomial u{Y(), Z(), X()};
  EXPECT_EQ(curl(lift_R(u)), u);
}

TEST(LiftR, RightInverseOfCurlOnRandomSolenoidalFields) {
  std::mt19937 rng(31);
  std::vector<std::vector<Rational>> anchors;
  for (int k = 0; k < 3; ++k) anchors.push_back(random_point(rng));
  for (int trial = 0; trial < 200; ++trial) {
    const int deg = 1 + trial % 5;  // curl lowers degree by one: result degree <= 5
    VectorPolynomial u = curl(random_field(rng, 3, 3, deg + 1, 0.4));
    ASSERT_TRUE(div(u).is_zero());
    for (const auto& a : anchors) {
      VectorPolynomial r = lift_R(u, a);
      ASSERT_EQ(curl(r), u);
      ASSERT_LE(r.degree(), u.degree() + 1);
    }
  }
}

TEST(LiftR, Linearity) {
  std::mt19937 rng(32);
  auto a = random_point(rng);
  for (int trial = 0; trial < 20; ++trial) {
    VectorPolynomial u = random_field(rng, 3, 3, 3), v = random_field(rng, 3, 3, 3);
    Rational s = nedelec::testing::random_rational(rng);
    EXPECT_EQ(lift_R(u * s + v, a), lift_R(u, a) * s + lift_R(v, a));
  }
}

TEST(LiftR2d, Examples) {
  EXPECT_TRUE(lift_R2d(Polynomial(2)).is_zero());
  Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  VectorPolynomial r = lift_R2d(Polynomial::constant(2, 1));
  EXPECT_EQ(r, (VectorPolynomial{x * Rational(1, 2), y * Rational(1, 2)}));
  EXPECT_EQ(div2d(r), Polynomial::constant(2, 1));
  std::vector<Rational> a{1, 1};
  EXPECT_EQ(div2d(lift_R2d(x * x * y, a)), x * x * y);
}

TEST(LiftR2d, RightInverseOfDivOnRandomInputs) {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    Polynomial u = random_polynomial(rng, 2, trial % 6);
    auto a = random_point(rng, 2);
    VectorPolynomial r = lift_R2d(u, a);
    ASSERT_EQ(div2d(r), u);
    ASSERT_LE(r.degree(), u.degree() + 1);
  }
}

TEST(LiftD, Examples) {
  EXPECT_EQ(lift_D(C(1)), position_field(3) * Rational(1, 3));
  EXPECT_TRUE(lift_D(Polynomial(3)).is_zero());
  std::vector<Rational> a{0, 1, 0};
  EXPECT_EQ(div(lift_D(X() + Y() * Z(), a)), X() + Y() * Z());
}

TEST(LiftD, RightInverseOfDivOnRandomInputs) {
  std::mt19937 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    Polynomial u = random_polynomial(rng, 3, trial % 6);
    auto a = random_point(rng);
    VectorPolynomial r = lift_D(u, a);
    ASSERT_EQ(div(r), u);
    ASSERT_LE(r.degree(), u.degree() + 1);
  }
}

TEST(LiftR, SpanIndependentOfAnchor) {
  // span(P_p + R_a(P_p)) has the same dimension and is the same space for different anchors.
  std::mt19937 rng(35);
  for (int p = 0; p <= 2; ++p) {
    std::vector<std::vector<VectorPolynomial>> spans;
    for (int k = 0; k < 3; ++k) {
      auto a = random_point(rng);
      std::vector<VectorPolynomial> s;
      for (const auto& e : monomials(3, p))
        for (int c = 0; c < 3; ++c) {
          VectorPolynomial v = VectorPolynomial::unit(3, 3, c, Polynomial::monomial(3, e));
          s.push_back(v);
          s.push_back(lift_R(v, a));
        }
      spans.push_back(s);
    }
    const int r0 = span_rank(std::span<const VectorPolynomial>(spans[0]));
    EXPECT_EQ(r0, (p + 1) * (p + 3) * (p + 4) / 2);
    for (int k = 1; k < 3; ++k)
      EXPECT_TRUE(same_span(std::span<const VectorPolynomial>(spans[0]), std::span<const VectorPolynomial>(spans[k])));
  }
}
