#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "shapelim/procat.hpp"

using namespace shapelim;

namespace {

FgAbGroup Z(std::size_t n = 1) { return FgAbGroup::free(n); }

Tower mult(long p) { return Tower::periodic({}, {}, Z(), Homomorphism::scalar(Z(), p)); }

Tower cyclic_mult(long m, long p) {
  FgAbGroup g = FgAbGroup::cyclic(m);
  return Tower::periodic({}, {}, g, Homomorphism::scalar(g, p));
}

LevelMap scalar_map(const FgAbGroup& src, const FgAbGroup& tgt, long s) {
  return LevelMap{{}, Homomorphism(src, tgt, IntMatrix::scalar(src.generator_count(), s))};
}

Homomorphism random_endo(oracle::Rng& rng, const std::vector<long>& tors, std::size_t r, long bound) {
  const std::size_t t = tors.size();
  IntMatrix rel(t + r, t);
  for (std::size_t k = 0; k < t; ++k) rel(k, k) = tors[k];
  FgAbGroup g(t + r, rel);
  IntMatrix m(t + r, t + r);
  for (std::size_t j = 0; j < t + r; ++j)
    for (std::size_t i = 0; i < t + r; ++i) {
      if (j < t && i >= t) continue;
      long step = j < t && i < t ? tors[i] / std::gcd(tors[i], tors[j]) : 1;
      m(i, j) = step * rng.uniform(-bound, bound);
    }
  return Homomorphism(g, g, m);
}

Tower random_tower(oracle::Rng& rng) {
  std::size_t r = rng.uniform(0, 2);
  std::vector<long> tors;
  long nt = rng.uniform(0, 1);
  for (long k = 0; k < nt; ++k) tors.push_back(std::vector<long>{2, 3, 4, 6}[rng.uniform(0, 3)]);
  if (r == 0 && tors.empty()) r = 1;
  Homomorphism a = random_endo(rng, tors, r, 4);
  if (rng.uniform(0, 2) == 0) return Tower::periodic({a.source()}, {}, a.source(), a, random_endo(rng, tors, r, 3));
  return Tower::periodic({}, {}, a.source(), a);
}

// Same tail group, tail endo squared: a cofinal subsequence of t.
Tower every_other(const Tower& t) {
  const auto& p = t.periodic_data();
  return Tower::periodic({}, {}, p.tail_group, power(p.tail_endo, 2));
}

}  // namespace

TEST(CheckLevelMap, IdentityIsValid) {
  auto v = check_level_map(mult(5), mult(5), scalar_map(Z(), Z(), 1));
  EXPECT_TRUE(v.symbolic);
}

TEST(CheckLevelMap, UnitMapBetweenDifferentDegreesFails) {
  try {
    check_level_map(mult(2), mult(3), scalar_map(Z(), Z(), 1));
    FAIL() << "expected NotCommuting";
  } catch (const NotCommuting& e) {
    EXPECT_EQ(e.level(), 0u);
  }
}

TEST(CheckLevelMap, MultiplicationByDegreeIsValid) {
  EXPECT_NO_THROW(check_level_map(mult(3), mult(3), scalar_map(Z(), Z(), 3)));
}

TEST(CheckLevelMap, PrefixLevelsAreChecked) {
  // A spliced prefix bond x2 into level 0 needs f_0 compatible with it.
  Tower a = Tower::periodic({Z()}, {}, Z(), Homomorphism::scalar(Z(), 1), Homomorphism::scalar(Z(), 2));
  Tower b = mult(1);
  LevelMap good{{Homomorphism::scalar(Z(), 1)}, Homomorphism::scalar(Z(), 2)};
  EXPECT_NO_THROW(check_level_map(a, b, good));
  LevelMap bad{{Homomorphism::scalar(Z(), 1)}, Homomorphism::scalar(Z(), 1)};
  EXPECT_THROW(check_level_map(a, b, bad), NotCommuting);
}

TEST(CheckLevelMap, StreamedTowersCheckedToDepth) {
  Tower h = make_streamed("hawaiian_h1");
  LevelMap id{{}, Homomorphism()};
  // Streamed groups vary by level; only the prefix is ever consulted.
  for (std::size_t i = 0; i <= 7; ++i) id.prefix.push_back(Homomorphism::identity(h.group(i)));
  auto v = check_level_map(h, h, id, 5);
  EXPECT_FALSE(v.symbolic);
  EXPECT_EQ(v.checked_through, 5u);
}

TEST(FindInterleaving, SubsequenceIsFound) {
  auto il = find_interleaving(mult(4), mult(2), 4);
  ASSERT_TRUE(il);
  EXPECT_TRUE(il->verify(mult(4), mult(2)));
  EXPECT_EQ(il->gap_a, 1u);
  EXPECT_EQ(il->gap_b, 2u);
}

TEST(FindInterleaving, SelfGivesIdentityAtDepthOne) {
  for (long p : {2, 3, -5, 0, 1}) {
    auto il = find_interleaving(mult(p), mult(p), 1);
    ASSERT_TRUE(il) << p;
    EXPECT_TRUE(il->forward.equals(Homomorphism::identity(Z())));
  }
}

TEST(FindInterleaving, CoprimeDegreesAbsent) {
  // g f = 2^m and f g = 3^n are the same integer, so no certificate exists.
  EXPECT_FALSE(find_interleaving(mult(2), mult(3), 6));
}

TEST(FindInterleaving, ProZeroTowersInterleave) {
  // Nilpotent bonds: every such tower is pro-isomorphic to zero.
  Tower nil = Tower::periodic({}, {}, Z(2), Homomorphism(Z(2), Z(2), IntMatrix::from_rows({{0, 1}, {0, 0}})));
  Tower zero = Tower::constant(FgAbGroup::free(0));
  auto il = find_interleaving(nil, zero, 2);
  ASSERT_TRUE(il);
  EXPECT_EQ(il->gap_a, 2u);
  EXPECT_TRUE(il->verify(nil, zero));
}

TEST(FindInterleaving, TorsionPresentationsAreNormalized) {
  // Z/6 presented as Z/2 (+) Z/3 against the cyclic presentation.
  IntMatrix rel = IntMatrix::from_rows({{2, 0}, {0, 3}});
  FgAbGroup g(2, rel);
  Tower a = Tower::periodic({}, {}, g, Homomorphism::identity(g));
  Tower b = cyclic_mult(6, 1);
  auto il = find_interleaving(a, b, 1);
  ASSERT_TRUE(il);
  EXPECT_TRUE(il->forward.is_isomorphism());
  EXPECT_TRUE(il->verify(a, b));
}

TEST(FindInterleaving, StreamedInputRejected) {
  EXPECT_THROW(find_interleaving(make_streamed("padic", {Integer(2)}), mult(2), 2), Error);
}

TEST(FindInterleaving, CorpusProperties) {
  oracle::Rng rng(7);
  int found = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Tower a = random_tower(rng);
    Tower b = rng.uniform(0, 1) ? every_other(a) : random_tower(rng);
    auto self = find_interleaving(a, a, 1);
    ASSERT_TRUE(self) << trial;
    EXPECT_TRUE(self->verify(a, a));
    for (std::size_t d : {1u, 2u}) {
      auto il = find_interleaving(a, b, d);
      auto shifted = find_interleaving(shift(a, 1), b, d + 1);
      if (!il) continue;
      ++found;
      EXPECT_TRUE(il->verify(a, b));
      EXPECT_TRUE(shifted) << trial;
      EXPECT_NE(compare_invariants(a, b).kind, ProIsoVerdict::Kind::NotIsomorphic) << trial;
    }
  }
  EXPECT_GT(found, 20);
}

TEST(CompareInvariants, CoprimeSolenoidsSeparatedByPrimes) {
  auto v = compare_invariants(mult(2), mult(3));
  EXPECT_EQ(v.kind, ProIsoVerdict::Kind::NotIsomorphic);
  EXPECT_EQ(v.reason, "lim1 prime spectra: missing_primes {2} vs {3}");
}

TEST(CompareInvariants, SubsequenceIsIsomorphic) {
  auto v = compare_invariants(mult(2), mult(4));
  EXPECT_EQ(v.kind, ProIsoVerdict::Kind::Isomorphic);
  ASSERT_TRUE(v.witness);
  EXPECT_TRUE(v.witness->verify(mult(2), mult(4)));
}

TEST(CompareInvariants, ConstantGroupsSeparatedByLim) {
  auto v = compare_invariants(mult(1), cyclic_mult(2, 1));
  EXPECT_EQ(v.kind, ProIsoVerdict::Kind::NotIsomorphic);
  EXPECT_EQ(v.reason, "lim invariants Z vs Z/2");
}

TEST(CompareInvariants, EqualInvariantsWithoutMapAreUndecided) {
  // x6 and x(-6) share every invariant; a scalar f with 6^a f = (-6)^b f and
  // g f = 6^a, f g = (-6)^b exists only for even b, so depth 1 gives nothing.
  auto v = compare_invariants(mult(6), mult(-6), {}, nullptr, 1);
  EXPECT_EQ(v.kind, ProIsoVerdict::Kind::Undecided);
  EXPECT_FALSE(v.witness);
}

TEST(CompareInvariants, LevelMapWithProZeroKernelAndCokernel) {
  // (Z^2, diag(2, 0)) -> (Z, x2) projecting onto the first coordinate: the
  // kernel carries the zero bond.
  Tower a = Tower::periodic({}, {}, Z(2), Homomorphism(Z(2), Z(2), IntMatrix::from_rows({{2, 0}, {0, 0}})));
  LevelMap proj{{}, Homomorphism(Z(2), Z(), IntMatrix::from_rows({{1, 0}}))};
  auto v = compare_invariants(a, mult(2), {}, &proj, 0);
  EXPECT_EQ(v.kind, ProIsoVerdict::Kind::Isomorphic);
  EXPECT_EQ(v.reason, "level map with pro-zero kernel and cokernel");
}

TEST(CompareInvariants, LevelMapThatIsNotAProIso) {
  // x3 : (Z, x2) -> (Z, x2) has cokernel tower Z/3 with unit bonds.
  LevelMap three = scalar_map(Z(), Z(), 3);
  auto v = compare_invariants(mult(2), mult(2), {}, &three, 0);
  EXPECT_EQ(v.kind, ProIsoVerdict::Kind::Undecided);
}
