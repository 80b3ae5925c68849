#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shapelim/exactlat.hpp"

using namespace shapelim;

namespace {

bool is_unimodular(const IntMatrix& u) {
  Integer d = determinant(u);
  return d == 1 || d == -1;
}

bool is_column_hermite(const HermiteForm& h) {
  for (std::size_t c = 0; c < h.rank; ++c) {
    std::size_t p = h.pivot_rows[c];
    if (h.H(p, c) <= 0) return false;
    for (std::size_t i = 0; i < p; ++i)
      if (h.H(i, c) != 0) return false;
    for (std::size_t l = 0; l < c; ++l)
      if (h.H(p, l) < 0 || h.H(p, l) >= h.H(p, c)) return false;
    if (c > 0 && p <= h.pivot_rows[c - 1]) return false;
  }
  for (std::size_t c = h.rank; c < h.H.cols(); ++c)
    for (std::size_t i = 0; i < h.H.rows(); ++i)
      if (h.H(i, c) != 0) return false;
  return true;
}

}  // namespace

TEST(Hnf, IdentityIsFixed) {
  auto h = hnf(IntMatrix::identity(2));
  EXPECT_EQ(h.H, IntMatrix::identity(2));
  EXPECT_EQ(h.U, IntMatrix::identity(2));
}

TEST(Hnf, PreservesDeterminant) {
  IntMatrix m = IntMatrix::from_rows({{2, 4}, {6, 8}});
  auto h = hnf(m);
  EXPECT_EQ(abs(determinant(h.H)), 8);
  EXPECT_EQ(m * h.U, h.H);
  EXPECT_TRUE(is_unimodular(h.U));
  EXPECT_TRUE(is_column_hermite(h));
}

TEST(Hnf, ZeroMatrix) {
  IntMatrix z(2, 3);
  auto h = hnf(z);
  EXPECT_EQ(h.H, z);
  EXPECT_EQ(h.U, IntMatrix::identity(3));
  EXPECT_EQ(h.rank, 0u);
}

TEST(Hnf, RandomRectangularIsCanonical) {
  oracle::Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    IntMatrix m = rng.matrix(rng.uniform(1, 4), rng.uniform(1, 5), 9);
    auto h = hnf(m);
    ASSERT_EQ(m * h.U, h.H);
    ASSERT_TRUE(is_unimodular(h.U));
    ASSERT_TRUE(is_column_hermite(h));
    // Same column span gives the same form.
    IntMatrix shuffled = IntMatrix::hcat(m.block(0, 0, m.rows(), m.cols()), m);
    ASSERT_EQ(lattice_basis(shuffled), lattice_basis(m));
  }
}

TEST(Snf, AlreadyDiagonal) {
  auto s = snf(IntMatrix::diagonal({2, 4}));
  EXPECT_EQ(s.S, IntMatrix::diagonal({2, 4}));
}

TEST(Snf, TwoByTwo) {
  auto s = snf(IntMatrix::from_rows({{2, 4}, {6, 8}}));
  EXPECT_EQ(s.S, IntMatrix::diagonal({2, 4}));
}

TEST(Snf, ZeroOneByOne) {
  auto s = snf(IntMatrix(1, 1));
  EXPECT_EQ(s.S, IntMatrix(1, 1));
}

TEST(Snf, TransformsAreExactAndUnimodular) {
  oracle::Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    IntMatrix m = rng.matrix(rng.uniform(1, 4), rng.uniform(1, 4), 9);
    auto s = snf(m);
    ASSERT_EQ(s.U * m * s.V, s.S);
    ASSERT_TRUE(is_unimodular(s.U));
    ASSERT_TRUE(is_unimodular(s.V));
    ASSERT_EQ(s.U * s.Uinv, IntMatrix::identity(m.rows()));
    for (std::size_t i = 0; i < s.S.rows(); ++i)
      for (std::size_t j = 0; j < s.S.cols(); ++j)
        if (i != j) {
          ASSERT_EQ(s.S(i, j), 0);
        }
    for (std::size_t k = 0; k + 1 < s.rank; ++k) {
      ASSERT_TRUE(divides(s.diagonal[k], s.diagonal[k + 1]));
    }
    std::vector<Integer> nonzero(s.diagonal.begin(),
                                 s.diagonal.begin() + static_cast<long>(s.rank));
    ASSERT_EQ(nonzero, oracle::minor_gcd_diagonal(m)) << m;
  }
}

TEST(Present, CyclicGroup) {
  auto g = present(1, IntMatrix::from_rows({{7}}));
  EXPECT_EQ(g.invariants().rank, 0u);
  EXPECT_EQ(g.invariants().torsion, std::vector<Integer>{7});
}

TEST(Present, FreeGroupWithoutRelations) {
  auto g = present(2, IntMatrix(2, 0));
  EXPECT_EQ(g.invariants().rank, 2u);
  EXPECT_TRUE(g.invariants().torsion.empty());
}

TEST(Present, ChineseRemainder) {
  auto g = present(2, IntMatrix::diagonal({2, 3}));
  EXPECT_EQ(g.invariants().rank, 0u);
  EXPECT_EQ(g.invariants().torsion, std::vector<Integer>{6});
}

TEST(Present, RejectsWrongRowCount) {
  EXPECT_THROW(present(3, IntMatrix(2, 1)), DimensionMismatch);
}

TEST(Present, InvariantsAreIdempotent) {
  oracle::Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = rng.uniform(1, 4);
    auto g = present(n, rng.matrix(n, rng.uniform(0, 4), 9));
    auto again = FgAbGroup::from_invariants(g.invariants());
    ASSERT_EQ(again.invariants(), g.invariants());
    auto s = g.simplify();
    ASSERT_EQ(s.group.invariants(), g.invariants());
    // to and from are mutually inverse isomorphisms.
    Homomorphism to(g, s.group, s.to);
    Homomorphism from(s.group, g, s.from);
    ASSERT_TRUE(compose(from, to).equals(Homomorphism::identity(g)));
    ASSERT_TRUE(compose(to, from).equals(Homomorphism::identity(s.group)));
  }
}

TEST(Homomorphism, MultiplicationOnZ) {
  auto z = FgAbGroup::free(1);
  EXPECT_NO_THROW(Homomorphism(z, z, IntMatrix::from_rows({{5}})));
}

TEST(Homomorphism, IllDefinedIntoZ4) {
  auto z2 = FgAbGroup::cyclic(2);
  auto z4 = FgAbGroup::cyclic(4);
  EXPECT_THROW(Homomorphism(z2, z4, IntMatrix::from_rows({{1}})), IllDefined);
  EXPECT_NO_THROW(Homomorphism(z2, z4, IntMatrix::from_rows({{2}})));
}

TEST(Homomorphism, DimensionMismatch) {
  auto z = FgAbGroup::free(1);
  auto z2 = FgAbGroup::free(2);
  EXPECT_THROW(Homomorphism(z, z2, IntMatrix::from_rows({{1}})), DimensionMismatch);
}

TEST(HomParts, MultiplicationByP) {
  auto z = FgAbGroup::free(1);
  auto p = hom_parts(Homomorphism::scalar(z, 5));
  EXPECT_TRUE(p.kernel.source().is_trivial());
  EXPECT_EQ(p.image.source().invariants(), z.invariants());
  EXPECT_EQ(p.cokernel.target().invariants().torsion, std::vector<Integer>{5});
}

TEST(HomParts, ZeroMap) {
  auto z = FgAbGroup::free(1);
  auto p = hom_parts(Homomorphism::scalar(z, 0));
  EXPECT_EQ(p.kernel.source().invariants(), z.invariants());
  EXPECT_TRUE(p.image.source().is_trivial());
  EXPECT_EQ(p.cokernel.target().invariants(), z.invariants());
}

TEST(HomParts, DiagonalTwoThree) {
  auto z2 = FgAbGroup::free(2);
  auto p = hom_parts(Homomorphism(z2, z2, IntMatrix::diagonal({2, 3})));
  EXPECT_TRUE(p.kernel.source().is_trivial());
  EXPECT_EQ(p.image.source().invariants().rank, 2u);
  EXPECT_EQ(p.image_lattice.index_in(Lattice::full(2)), Integer(6));
  EXPECT_EQ(p.cokernel.target().invariants().torsion, std::vector<Integer>{6});
}

TEST(HomParts, TorsionKernel) {
  // x2 : Z/4 -> Z/4 has kernel {0,2} and image {0,2}.
  auto z4 = FgAbGroup::cyclic(4);
  auto p = hom_parts(Homomorphism::scalar(z4, 2));
  EXPECT_EQ(p.kernel.source().invariants().torsion, std::vector<Integer>{2});
  EXPECT_EQ(p.image.source().invariants().torsion, std::vector<Integer>{2});
  EXPECT_EQ(p.cokernel.target().invariants().torsion, std::vector<Integer>{2});
}

TEST(HomParts, CokernelOrderMatchesDeterminant) {
  oracle::Rng rng(3);
  int checked = 0;
  while (checked < 150) {
    std::size_t n = rng.uniform(1, 4);
    IntMatrix m = rng.matrix(n, n, 9);
    Integer d = determinant(m);
    if (d == 0) continue;
    auto z = FgAbGroup::free(n);
    auto p = hom_parts(Homomorphism(z, z, m));
    ASSERT_TRUE(p.kernel.source().is_trivial());
    ASSERT_EQ(p.cokernel.target().order(), abs(d));
    ++checked;
  }
}

TEST(HomParts, ExactnessOnRandomMaps) {
  oracle::Rng rng(17);
  for (int t = 0; t < 60; ++t) {
    std::size_t n = rng.uniform(1, 3), m = rng.uniform(1, 3);
    auto src = FgAbGroup::free(n);
    auto tgt = present(m, rng.matrix(m, rng.uniform(0, 2), 4));
    Homomorphism h(src, tgt, rng.matrix(m, n, 4));
    auto p = hom_parts(h);
    // Composite kernel -> source -> target vanishes.
    ASSERT_TRUE(compose(h, p.kernel).is_zero());
    // Image inclusion is injective.
    ASSERT_TRUE(hom_parts(p.image).kernel.source().is_trivial());
  }
}

TEST(Lattice, IndexOfTwoZInZ2) {
  auto r = lattice_ops(IntMatrix::diagonal({2, 1}), IntMatrix::identity(2));
  EXPECT_EQ(r.index, Integer(2));
}

TEST(Lattice, IntersectionOfMultiples) {
  auto a = Lattice::from_generators(IntMatrix::from_rows({{2}}));
  auto b = Lattice::from_generators(IntMatrix::from_rows({{3}}));
  EXPECT_EQ(a.intersection(b), Lattice::from_generators(IntMatrix::from_rows({{6}})));
}

TEST(Lattice, Saturation) {
  auto r = lattice_ops(IntMatrix::from_rows({{2}, {0}}), IntMatrix::identity(2));
  EXPECT_EQ(r.saturation, Lattice::from_generators(IntMatrix::from_rows({{1}, {0}})));
  EXPECT_FALSE(r.index.has_value());
}

TEST(Lattice, IndexUndefinedWhenNotContained) {
  EXPECT_THROW(lattice_ops(IntMatrix::from_rows({{1}}), IntMatrix::from_rows({{2}})),
               IndexUndefined);
}

TEST(Lattice, IntersectionCommutativeAndAssociative) {
  oracle::Rng rng(23);
  for (int t = 0; t < 60; ++t) {
    std::size_t n = rng.uniform(1, 3);
    auto a = Lattice::from_generators(rng.matrix(n, rng.uniform(1, 3), 6));
    auto b = Lattice::from_generators(rng.matrix(n, rng.uniform(1, 3), 6));
    auto c = Lattice::from_generators(rng.matrix(n, rng.uniform(1, 3), 6));
    ASSERT_EQ(a.intersection(b), b.intersection(a));
    ASSERT_EQ(a.intersection(b).intersection(c), a.intersection(b.intersection(c)));
    auto i = a.intersection(b);
    ASSERT_TRUE(a.contains(i));
    ASSERT_TRUE(b.contains(i));
  }
}

TEST(Solve, FindsIntegerSolutionsOnly) {
  IntMatrix m = IntMatrix::from_rows({{2, 0}, {0, 3}});
  EXPECT_TRUE(solve(m, IntVector{4, 9}).has_value());
  EXPECT_FALSE(solve(m, IntVector{1, 0}).has_value());
}

TEST(RankMod, SmallPrime) {
  IntMatrix m = IntMatrix::diagonal({2, 3});
  EXPECT_EQ(rank_mod(m, 2), 1u);
  EXPECT_EQ(rank_mod(m, 3), 1u);
  EXPECT_EQ(rank_mod(m, 5), 2u);
}
