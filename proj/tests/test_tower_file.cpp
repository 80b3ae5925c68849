#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "shapelim/limits.hpp"
#include "shapelim/tower_file.hpp"

using namespace shapelim;

namespace {

std::string fixture(const std::string& name) { return std::string(SHAPELIM_SOURCE_DIR) + "/towers/" + name; }

template <class F>
ParseError parse_error(F f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParseError";
  return ParseError("none", 0, 0);
}

}  // namespace

TEST(TowerFile, SolenoidFixtureParses) {
  TowerFile doc = parse_tower_file(fixture("solenoid_2.tower"));
  Tower t = TowerFileResolver(doc).main_tower();
  ASSERT_TRUE(t.is_periodic());
  EXPECT_TRUE(t.periodic_data().tail_endo.equals(Homomorphism::scalar(FgAbGroup::free(1), 2)));
  EXPECT_EQ(lim1(t).render(), "Z_2/Z");
  EXPECT_TRUE(TowerFileResolver(doc).simplicial_tower().is_periodic());
}

TEST(TowerFile, EveryFixtureParsesAndRoundTrips) {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::string(SHAPELIM_SOURCE_DIR) + "/towers")) {
    if (entry.path().extension() != ".tower") continue;
    ++n;
    TowerFile doc = parse_tower_file(entry.path().string());
    std::string text = serialize(doc);
    TowerFile again = parse_tower_text(text);
    EXPECT_EQ(doc, again) << entry.path();
    EXPECT_EQ(serialize(again), text) << entry.path();
  }
  EXPECT_GE(n, 10u);
}

TEST(TowerFile, PrefixAndSplice) {
  Tower t = TowerFileResolver(parse_tower_file(fixture("spliced.tower"))).main_tower();
  EXPECT_EQ(t.tail_start(), 1u);
  EXPECT_EQ(t.group(0).to_string(), "Z/4");
  EXPECT_EQ(t.group(3).to_string(), "Z (+) Z/2");
}

TEST(TowerFile, ExplicitSesResolves) {
  TowerSES ses = TowerFileResolver(parse_tower_file(fixture("split_ses.tower"))).ses();
  EXPECT_TRUE(ses.is_periodic());
  EXPECT_EQ(lim1(ses.total()).render(), "Λ_A(Z^2)/Z^2 with A = [[3,1],[0,2]]");
}

TEST(TowerFile, UndefinedMapIsUnresolved) {
  const char* text =
      "groups:\n  Z: {generators: 1}\n"
      "tower:\n  tail: {group: Z, endo: missing}\n";
  try {
    parse_tower_text(text);
    FAIL();
  } catch (const UnresolvedReference& e) {
    EXPECT_EQ(e.name(), "missing");
  }
}

TEST(TowerFile, EmptyFileIsParseError) {
  ParseError e = parse_error([] { parse_tower_text(""); });
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(e.column(), 1u);
  parse_error([] { parse_tower_text("# only a comment\n"); });
}

TEST(TowerFile, UnknownKeyRejectedWithLocation) {
  const char* text =
      "groups:\n"
      "  Z: {generators: 1, torsion: 2}\n";
  ParseError e = parse_error([&] { parse_tower_text(text); });
  EXPECT_EQ(e.line(), 2u);
  EXPECT_NE(std::string(e.what()).find("torsion"), std::string::npos);
}

TEST(TowerFile, SyntaxErrorLocation) {
  ParseError e = parse_error([] { parse_tower_text("groups:\n  Z: {generators: 1\n"); });
  EXPECT_GE(e.line(), 2u);
}

TEST(TowerFile, IntegersAreStrictDecimals) {
  parse_error([] { parse_tower_text("groups:\n  Z: {generators: 1}\nmaps:\n  m: {source: Z, target: Z, matrix: [[2.5]]}\n"); });
  parse_error([] { parse_tower_text("groups:\n  Z: {generators: 1}\nmaps:\n  m: {source: Z, target: Z, matrix: [[0x2]]}\n"); });
  TowerFile big = parse_tower_text(
      "groups:\n  Z: {generators: 1}\nmaps:\n  m: {source: Z, target: Z, matrix: [[-123456789012345678901234567890]]}\n");
  EXPECT_EQ(big.maps.at("m").matrix[0][0], Integer("-123456789012345678901234567890"));
}

TEST(TowerFile, DimensionsChecked) {
  EXPECT_THROW(parse_tower_text("groups:\n  Z: {generators: 1}\nmaps:\n  m: {source: Z, target: Z, matrix: [[1, 2]]}\n"),
               DimensionMismatch);
  parse_error([] { parse_tower_text("groups:\n  Z: {generators: 2, relators: [[1]]}\n"); });
}

TEST(TowerFile, IllDefinedMapRejected) {
  // Z/2 -> Z sending the generator to 1 does not respect the relation.
  EXPECT_THROW(parse_tower_text("groups:\n  Z: {generators: 1}\n  Z2: {generators: 1, relators: [[2]]}\n"
                                "maps:\n  m: {source: Z2, target: Z, matrix: [[1]]}\n"),
               IllDefined);
}

TEST(TowerFile, DuplicateNamesRejected) {
  parse_error([] { parse_tower_text("groups:\n  Z: {generators: 1}\n  Z: {generators: 2}\n"); });
}

TEST(TowerFile, DocumentFromTowerRoundTrips) {
  oracle::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix a = rng.matrix(2, 2, 4);
    FgAbGroup g(2, IntMatrix::from_rows({{0}, {3}}));
    a(0, 1) = 0;  // the torsion generator goes to torsion
    Homomorphism endo(g, g, a);
    Tower t = Tower::periodic({FgAbGroup::free(1)}, {}, g, endo,
                              Homomorphism(g, FgAbGroup::free(1), IntMatrix::from_rows({{rng.uniform(-3, 3), 0}})));
    TowerFile doc = tower_document(t);
    TowerFile again = parse_tower_text(serialize(doc));
    EXPECT_EQ(doc, again);
    Tower back = TowerFileResolver(again).main_tower();
    EXPECT_TRUE(back.periodic_data().tail_endo.equals(endo));
    EXPECT_EQ(lim1(back).render(), lim1(t).render());
  }
}
