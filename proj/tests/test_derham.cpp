#include <gtest/gtest.h>

#include <random>

#include "nedelec/derham.hpp"
#include "test_util.hpp"

using namespace nedelec;

namespace {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(OperatorMatrix, GradOnLinearPolynomials) {
  const Basis src = as_basis(scalar_monomials(3, 1));
  const Basis dst = vector_monomials(3, 3, 0);
  auto m = operator_matrix("grad", src, dst, [](const VectorPolynomial& u) { return grad(u[0]); });
  EXPECT_EQ(m.matrix.rows(), 3);
  EXPECT_EQ(m.matrix.cols(), 4);
  EXPECT_EQ(rank(m.matrix), 3);
}

TEST(OperatorMatrix, RejectsImagesOutsideTarget) {
  const Basis src = as_basis(scalar_monomials(3, 2));
  const Basis dst = vector_monomials(3, 3, 0);
  EXPECT_THROW(operator_matrix("grad", src, dst, [](const VectorPolynomial& u) { return grad(u[0]); }),
               std::domain_error);
}

TEST(LocalSequence, LowestOrderDimensions) {
  auto rep = verify_local_sequence(Simplex::reference(3), 0);
  ASSERT_TRUE(rep.ok()) << rep.to_json().dump(2);
  const auto& v = rep.rows[0];
  EXPECT_EQ(v.dims, (std::vector<int>{4, 6, 4, 1}));
  EXPECT_EQ(v.ranks, (std::vector<int>{3, 3, 1}));
  EXPECT_EQ(v.alternating_sum, 0);
}

TEST(LocalSequence, ExactOnReferenceAndPhysicalElements) {
  std::mt19937 rng(61);
  for (int p = 0; p <= 3; ++p)
    for (const Simplex& t : {Simplex::reference(3), nedelec::testing::random_tet(rng)}) {
      auto rep = verify_local_sequence(t, p);
      EXPECT_TRUE(rep.ok()) << rep.to_json().dump(2);
      const auto& v = rep.rows[0];
      // grad image has dim P_{p+1} - 1, div is onto P_p
      EXPECT_EQ(v.ranks[0], binom(p + 4, 3) - 1);
      EXPECT_EQ(v.ranks[2], binom(p + 3, 3));
      EXPECT_EQ(v.dims[1], (p + 1) * (p + 3) * (p + 4) / 2);
      EXPECT_EQ(rep.rows[1].dims[1], (p + 1) * (p + 3));
      EXPECT_EQ(rep.checks.size(), 6u);
    }
}

TEST(ZeroTraceSequence, ExactWithLiftings) {
  std::mt19937 rng(62);
  for (int p = 0; p <= 3; ++p) {
    const Simplex t = p == 2 ? nedelec::testing::random_tet(rng) : Simplex::reference(3);
    auto rep = verify_zero_trace_sequence(t, p);
    EXPECT_TRUE(rep.ok()) << rep.to_json().dump(2);
    // edge row: d/dt is a bijection of the zero-trace P_{p+1}(e) onto mean-free P_p(e)
    EXPECT_EQ(rep.rows[2].dims[0], p);
    EXPECT_EQ(rep.rows[2].dims[1], p);
    // zero-trace W1 spaces have the interior dof counts
    EXPECT_EQ(rep.rows[0].dims[1], dofs_per_cell(p));
    EXPECT_EQ(rep.rows[1].dims[1], dofs_per_face(p));
  }
}

TEST(ZeroTraceSequence, FaceRowAtFirstOrder) {
  auto rep = verify_zero_trace_sequence(Simplex::reference(3), 1);
  const auto& f = rep.rows[1];
  EXPECT_EQ(f.dims, (std::vector<int>{0, 2, 2}));
  EXPECT_TRUE(f.ok());
}

TEST(SequenceReport, JsonShape) {
  auto j = verify_local_sequence(Simplex::reference(3), 1).to_json();
  EXPECT_TRUE(j["ok"].get<bool>());
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["rows"][0]["dims"][1].get<int>(), 20);
  EXPECT_TRUE(j["failures"].empty());
}

TEST(SequenceReport, BrokenRowIsReported) {
  // a row whose second map misses the image of the first
  const Basis h1 = as_basis(scalar_monomials(1, 2));
  const Basis l2 = as_basis(scalar_monomials(1, 1));
  auto d = operator_matrix("d/dt", h1, l2, [](const VectorPolynomial& u) { return detail::as_field(u[0].derivative(0)); });
  auto r = analyze_row("broken", {"A", "B"}, {3, 3}, {d}, 1);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.alternating_sum, 0);
}
