#include <gtest/gtest.h>

#include <random>

#include "nedelec/localspace.hpp"
#include "test_util.hpp"

using namespace nedelec;
using nedelec::testing::random_point;
using nedelec::testing::random_polynomial;
using nedelec::testing::random_tet;

namespace {

using VP = VectorPolynomial;

int binom3(int k) { return (k + 1) * (k + 2) * (k + 3) / 6; }

Simplex ref() { return Simplex::reference(3); }

}  // namespace

TEST(LocalSpace, W1DimensionFormula) {
  EXPECT_EQ(build_W1(ref(), 0).dim(), 6);
  EXPECT_EQ(build_W1(ref(), 1).dim(), 20);
  EXPECT_EQ(build_W1(ref(), 2).dim(), 45);
  for (int p = 3; p <= 5; ++p) EXPECT_EQ(build_W1(ref(), p).dim(), (1 + p) * (3 + p) * (4 + p) / 2);
}

TEST(LocalSpace, NegativeDegreeIsZeroSpace) {
  EXPECT_EQ(build_W1(ref(), -1).dim(), 0);
  EXPECT_EQ(build_W2(ref(), -2).dim(), 0);
  EXPECT_TRUE(dofs_W1(-1).empty());
}

TEST(LocalSpace, W2Dimension) {
  EXPECT_EQ(build_W2(ref(), 0).dim(), 4);
  EXPECT_EQ(build_W2(ref(), 1).dim(), 15);
  for (int p = 2; p <= 4; ++p) EXPECT_EQ(build_W2(ref(), p).dim(), (p + 1) * (p + 2) * (p + 4) / 2);
}

TEST(LocalSpace, DivOfW2SpansPp) {
  std::mt19937 rng(1);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto w2 = build_W2(t, p);
    std::vector<Polynomial> divs;
    for (const auto& b : w2.basis) divs.push_back(div(b));
    EXPECT_EQ(span_rank<Polynomial>(divs), binom3(p));
    EXPECT_LE(max_degree(std::span<const Polynomial>(divs)), p);
  }
}

TEST(LocalSpace, AnchorInvariance) {
  std::mt19937 rng(2);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto a = build_W1(t, p);
    auto b = build_W1(t, p, t.vertex(2));
    auto c = build_W1(t, p, random_point(rng));
    EXPECT_TRUE(same_span<VP>(a.basis, b.basis));
    EXPECT_TRUE(same_span<VP>(a.basis, c.basis));
    auto d = build_W2(t, p, t.vertex(3));
    EXPECT_TRUE(same_span<VP>(build_W2(t, p).basis, d.basis));
  }
}

TEST(Whitney, EdgeCirculationsAreKronecker) {
  std::mt19937 rng(3);
  for (const Simplex& t : {ref(), random_tet(rng)})
    for (int e = 0; e < 6; ++e) {
      VP b = whitney1(t, e);
      for (int e2 = 0; e2 < 6; ++e2)
        EXPECT_EQ(integrate_reference(tangential_trace_edge(b, t.edge(e2))), Rational(e == e2 ? 1 : 0));
    }
}

TEST(Whitney, FaceFluxesAreKronecker) {
  std::mt19937 rng(4);
  for (const Simplex& t : {ref(), random_tet(rng)})
    for (int f = 0; f < 4; ++f) {
      VP b = whitney2(t, f);
      EXPECT_TRUE(div(b).degree() <= 0);
      for (int f2 = 0; f2 < 4; ++f2)
        EXPECT_EQ(integrate_reference(normal_trace_face(b, t.face(f2))), Rational(f == f2 ? 1 : 0));
    }
}

TEST(Whitney, CirculationAroundFaces) {
  // Stokes: flux of curl b_e through a face equals the circulation of b_e
  // around the face boundary, traversed v0 -> v1 -> v2 -> v0 in the face chart.
  const Simplex t = ref();
  for (int e = 0; e < 6; ++e) {
    VP c = curl(whitney1(t, e));
    for (int f = 0; f < 4; ++f) {
      Rational expected = 0;
      for (int k = 0; k < 3; ++k)
        if (kTetFaceEdges[f][k] == e) expected = (k == 1) ? -1 : 1;
      EXPECT_EQ(integrate_reference(normal_trace_face(c, t.face(f))), expected) << "edge " << e << " face " << f;
    }
  }
}

TEST(Whitney, MidpointValue) {
  // b_01 = l0 grad l1 - l1 grad l0 with l0 = 1-x-y-z, l1 = x; at (1/2,0,0):
  // (1/2)(1,0,0) - (1/2)(-1,-1,-1) = (1, 1/2, 1/2).
  VP b = whitney1(ref(), 0);
  std::vector<Rational> mid{Rational(1, 2), 0, 0};
  EXPECT_EQ(b(mid), (std::vector<Rational>{1, Rational(1, 2), Rational(1, 2)}));
}

TEST(Dofs, Counts) {
  EXPECT_EQ(dofs_W1(0).size(), 6u);
  EXPECT_EQ(dofs_W1(1).size(), 20u);
  EXPECT_EQ(dofs_W1(3).size(), 84u);
  for (int p = 0; p <= 6; ++p) {
    EXPECT_EQ(int(dofs_W1(p).size()), dim_W1(p));
    EXPECT_EQ(6 * dofs_per_edge(p) + 4 * dofs_per_face(p) + dofs_per_cell(p), dim_W1(p));
  }
}

TEST(Dofs, LowestOrderEdgeMomentOfWhitney) {
  auto d = dofs_W1(0);
  for (int e = 0; e < 6; ++e) EXPECT_EQ(apply_dof(d[e], whitney1(ref(), e), ref()), 1);
}

TEST(Dofs, FastPathMatchesDirectEvaluation) {
  std::mt19937 rng(5);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto dofs = dofs_W1(p);
    for (int trial = 0; trial < 3; ++trial) {
      VP u = nedelec::testing::random_field(rng, 3, 3, p + 1);
      auto fast = dof_values(p, u, t);
      for (std::size_t i = 0; i < dofs.size(); ++i) ASSERT_EQ(fast[i], apply_dof(dofs[i], u, t));
    }
  }
}

TEST(Dofs, Unisolvence) {
  std::mt19937 rng(6);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 4; ++p) {
    EXPECT_EQ(rank(dof_matrix(build_W1(ref(), p))), dim_W1(p));
    if (p <= 2) EXPECT_EQ(rank(dof_matrix(build_W1(t, p))), dim_W1(p));
  }
}

TEST(DualBasis, KroneckerProperty) {
  std::mt19937 rng(7);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto dofs = dofs_W1(p);
    for (const Simplex& s : {ref(), t}) {
      auto b = dual_basis(s, p);
      ASSERT_EQ(b.dim(), dim_W1(p));
      for (int j = 0; j < b.dim(); ++j)
        for (int i = 0; i < b.dim(); ++i) ASSERT_EQ(apply_dof(dofs[i], b.basis[j], s), Rational(i == j ? 1 : 0));
    }
  }
}

TEST(DualBasis, SpansW1) {
  std::mt19937 rng(8);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) EXPECT_TRUE(same_span<VP>(dual_basis(t, p).basis, build_W1(t, p).basis));
}

TEST(DualBasis, LowestOrderIsWhitney) {
  std::mt19937 rng(9);
  for (const Simplex& t : {ref(), random_tet(rng)}) {
    auto b = dual_basis(t, 0);
    for (int e = 0; e < 6; ++e) EXPECT_EQ(b.basis[e], whitney1(t, e));
  }
}

TEST(DualBasis, FacetLocality) {
  std::mt19937 rng(10);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto b = dual_basis(t, p);
    for (const auto& blk : b.partition)
      for (int j = blk.begin; j < blk.end; ++j) {
        // vanishing tangential trace on facets of dimension <= dim F other than F
        for (int e = 0; e < 6; ++e)
          if (!(blk.kind == FacetKind::Edge && blk.index == e))
            ASSERT_TRUE(tangential_trace_edge(b.basis[j], t.edge(e)).is_zero());
        if (blk.kind != FacetKind::Edge)
          for (int f = 0; f < 4; ++f)
            if (!(blk.kind == FacetKind::Face && blk.index == f))
              ASSERT_TRUE(tangential_trace_face(b.basis[j], t.face(f)).is_zero());
      }
  }
}

TEST(DualBasis, BlocksFormDirectSum) {
  auto b = dual_basis(ref(), 2);
  int total = 0;
  for (const auto& blk : b.partition) {
    std::vector<VP> part(b.basis.begin() + blk.begin, b.basis.begin() + blk.end);
    EXPECT_EQ(span_rank<VP>(part), blk.size());
    total += blk.size();
  }
  EXPECT_EQ(total, dim_W1(2));
  EXPECT_EQ(span_rank<VP>(b.basis), dim_W1(2));
}

TEST(Extension, ZeroAndBubble) {
  Simplex t = ref();
  EXPECT_TRUE(extend_scalar(Polynomial(1), FacetKind::Edge, 0, t).is_zero());
  auto lam = t.barycentrics();
  Polynomial tt = Polynomial::variable(1, 0);
  Polynomial bubble = tt * (Polynomial::constant(1, 1) - tt);  // l_i l_j along the edge
  for (int e = 0; e < 6; ++e) {
    auto [i, j] = kTetEdges[e];
    EXPECT_EQ(extend_scalar(bubble, FacetKind::Edge, e, t), lam[i] * lam[j]);
  }
}

TEST(Extension, NonzeroBoundaryRejected) {
  EXPECT_THROW(extend_scalar(Polynomial::variable(1, 0), FacetKind::Edge, 0, ref()), std::invalid_argument);
  EXPECT_THROW(extend_scalar(Polynomial::variable(2, 0), FacetKind::Face, 1, ref()), std::invalid_argument);
}

TEST(Extension, RestrictionReproducesAndOtherFacetsVanish) {
  std::mt19937 rng(11);
  Simplex t = random_tet(rng);
  for (int p = 1; p <= 4; ++p) {
    auto edge_space = zero_trace_scalar(1, p + 1);
    auto face_space = zero_trace_scalar(2, p + 1);
    for (int trial = 0; trial < 50 / 4 + 1; ++trial) {
      Polynomial ue(1), uf(2);
      for (const auto& q : edge_space) ue += q * nedelec::testing::random_rational(rng);
      for (const auto& q : face_space) uf += q * nedelec::testing::random_rational(rng);
      const int e = trial % 6, f = trial % 4;
      Polynomial xe = extend_scalar(ue, FacetKind::Edge, e, t);
      Polynomial xf = extend_scalar(uf, FacetKind::Face, f, t);
      EXPECT_EQ(restrict_to(xe, t.edge(e)), ue);
      EXPECT_EQ(restrict_to(xf, t.face(f)), uf);
      EXPECT_LE(xe.degree(), p + 1);
      EXPECT_LE(xf.degree(), p + 1);
      for (int e2 = 0; e2 < 6; ++e2)
        if (e2 != e) EXPECT_TRUE(restrict_to(xe, t.edge(e2)).is_zero());
      for (int f2 = 0; f2 < 4; ++f2)
        if (f2 != f) EXPECT_TRUE(restrict_to(xf, t.face(f2)).is_zero());
    }
  }
}

TEST(Extension, FaceAndEdgeFieldExtensions) {
  std::mt19937 rng(12);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto vf = zero_trace_W1_face(p);
    for (int f = 0; f < 4; ++f) {
      VP v(2, 2);
      for (const auto& b : vf) v += b * nedelec::testing::random_rational(rng);
      VP u = extend_face_field(v, f, t, p);
      EXPECT_EQ(tangential_trace_face(u, t.face(f)), v);
      for (int f2 = 0; f2 < 4; ++f2)
        if (f2 != f) EXPECT_TRUE(tangential_trace_face(u, t.face(f2)).is_zero());
    }
    for (int e = 0; e < 6; ++e) {
      Polynomial g = random_polynomial(rng, 1, p);
      VP u = extend_edge_field(g, e, t, p);
      EXPECT_EQ(tangential_trace_edge(u, t.edge(e)), g);
      for (int e2 = 0; e2 < 6; ++e2)
        if (e2 != e) EXPECT_TRUE(tangential_trace_edge(u, t.edge(e2)).is_zero());
    }
  }
}

TEST(ZeroTrace, EdgeSpaceDimension) {
  for (int p = 0; p <= 5; ++p) EXPECT_EQ(int(zero_trace_W1_edge(p).size()), p);
}

TEST(ZeroTrace, LowestOrderCellSpaceIsTrivial) {
  EXPECT_TRUE(zero_trace_W1(build_W1(ref(), 0)).empty());
}

TEST(ZeroTrace, CellSpaceEqualsCellBlock) {
  std::mt19937 rng(13);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto z = zero_trace_W1(build_W1(t, p));
    EXPECT_EQ(int(z.size()), dofs_per_cell(p));
    for (const auto& u : z)
      for (int f = 0; f < 4; ++f) EXPECT_TRUE(tangential_trace_face(u, t.face(f)).is_zero());
    auto b = dual_basis(t, p);
    const auto& cell = b.partition.back();
    std::vector<VP> block(b.basis.begin() + cell.begin, b.basis.end());
    EXPECT_TRUE(same_span<VP>(z, block));
  }
}

TEST(ZeroTrace, ScalarBubbles) {
  for (int k = 0; k <= 6; ++k) {
    EXPECT_EQ(int(zero_trace_scalar(1, k).size()), std::max(0, k - 1));
    EXPECT_EQ(int(zero_trace_scalar(2, k).size()), k >= 3 ? (k - 2) * (k - 1) / 2 : 0);
    EXPECT_EQ(int(zero_trace_scalar(ref(), k).size()), k >= 4 ? binom3(k - 4) : 0);
  }
}

TEST(ZeroTrace, FaceSpaceHasZeroNormalTraces) {
  const Simplex tri = Simplex::reference(2);
  for (int p = 0; p <= 3; ++p) {
    auto z = zero_trace_W1_face(p);
    EXPECT_EQ(int(z.size()), dofs_per_face(p));
    for (const auto& v : z)
      for (const auto& e : kTriangleEdges) EXPECT_TRUE(normal_trace_edge2d(v, tri.facet(e)).is_zero());
  }
}

TEST(ZeroTrace, W2Space) {
  std::mt19937 rng(14);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto z = zero_trace_W2(build_W2(t, p));
    // the normal trace map onto the four copies of P_p(f) is surjective
    EXPECT_EQ(int(z.size()), dim_W2(p) - 4 * (p + 1) * (p + 2) / 2);
    for (const auto& u : z)
      for (int f = 0; f < 4; ++f) EXPECT_TRUE(normal_trace_face(u, t.face(f)).is_zero());
  }
}

TEST(TraceSpaces, MatchPolynomialSpaces) {
  std::mt19937 rng(15);
  Simplex t = random_tet(rng);
  for (int p = 0; p <= 3; ++p) {
    auto w1 = build_W1(t, p);
    auto w2 = build_W2(t, p);
    auto pe = scalar_monomials(1, p);
    auto pf = scalar_monomials(2, p);
    auto wf = build_W1_face(p);
    for (int e = 0; e < 6; ++e) {
      std::vector<Polynomial> tr;
      for (const auto& b : w1.basis) tr.push_back(tangential_trace_edge(b, t.edge(e)));
      EXPECT_TRUE(same_span<Polynomial>(tr, pe));
    }
    for (int f = 0; f < 4; ++f) {
      std::vector<VP> tr;
      for (const auto& b : w1.basis) tr.push_back(tangential_trace_face(b, t.face(f)));
      EXPECT_TRUE(same_span<VP>(tr, wf));
      std::vector<Polynomial> nr;
      for (const auto& b : w2.basis) nr.push_back(normal_trace_face(b, t.face(f)));
      EXPECT_TRUE(same_span<Polynomial>(nr, pf));
    }
  }
}
