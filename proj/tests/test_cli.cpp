#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "shapelim/cli.hpp"

using namespace shapelim;

namespace {

const std::string kRoot = SHAPELIM_SOURCE_DIR;

std::string tower(const std::string& stem) { return kRoot + "/towers/" + stem + ".tower"; }

struct CliRun {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "shapelim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name, const std::string& body) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST(Cli, Lim1OfSolenoid) {
  CliRun r = run({"lim1", tower("solenoid_2")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "lim1 = Z_2/Z (uncountable)\ntag: CompletionQuotient\n");
  Json j = run({"lim1", tower("solenoid_2"), "--json"}).json();
  EXPECT_EQ(j["result"]["tag"], "CompletionQuotient");
  EXPECT_EQ(j["result"]["human"], "Z_2/Z (uncountable)");
}

TEST(Cli, SteenrodHawaiianJson) {
  CliRun r = run({"steenrod", tower("hawaiian"), "--degree", "1", "--json"});
  ASSERT_EQ(r.code, 0);
  Json j = r.json();
  EXPECT_EQ(j["result"]["lim_part"]["tag"], "FullProduct");
  EXPECT_EQ(j["result"]["lim1_part"]["tag"], "Zero");
  EXPECT_EQ(j["depth_used"], 16);
  EXPECT_EQ(j["warnings"].size(), 1u);
}

TEST(Cli, LabSuiteExitsZero) {
  CliRun r = run({"lab", "--suite", "ml_equiv", "--seed", "42", "--trials", "200"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("200/200 passed"), std::string::npos);
}

TEST(Cli, EnvelopeFields) {
  Json j = run({"ml", tower("solenoid_3"), "--json"}).json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"tool_version", "input_digest", "task", "inputs", "result",
                                            "verified_joints", "depth_used", "warnings"}));
  EXPECT_EQ(j["tool_version"], SHAPELIM_VERSION);
  EXPECT_EQ(j["task"], "ml");
  EXPECT_EQ(j["result"]["ml"], "false");
  EXPECT_TRUE(j["verified_joints"].is_null());
  EXPECT_EQ(j["depth_used"], 0);
}

TEST(Cli, DigestIsContentHash) {
  const std::string text = read_file(tower("solenoid_2"));
  std::string a = scratch("digest_a.tower", text);
  std::string b = scratch("digest_b.tower", text);
  std::string c = scratch("digest_c.tower", text + "# trailing comment\n");
  auto digest = [](const std::string& f) { return run({"lim", f, "--json"}).json()["input_digest"]; };
  EXPECT_EQ(digest(a), digest(b));
  EXPECT_NE(digest(a), digest(c));
  EXPECT_EQ(digest(a), "sha256:" + cli::sha256_hex(text));
  // Known-answer check of the hash itself.
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, LabDigestDependsOnConfigOnly) {
  auto digest = [](const std::string& seed) {
    return run({"lab", "--suite", "dual_ml", "--seed", seed, "--trials", "2", "--json"}).json()["input_digest"];
  };
  EXPECT_EQ(digest("1"), digest("1"));
  EXPECT_NE(digest("1"), digest("2"));
}

TEST(Cli, SixTermCountsJoints) {
  CliRun r = run({"six-term", tower("padic_ses_2"), "--json"});
  ASSERT_EQ(r.code, 0);
  Json j = r.json();
  EXPECT_EQ(j["verified_joints"], 3);
  EXPECT_EQ(j["result"]["terms"].size(), 6u);
  CliRun split = run({"six-term", tower("split_ses")});
  EXPECT_EQ(split.code, 0);
  EXPECT_NE(split.out.find("verified joints:"), std::string::npos);
}

TEST(Cli, InterleaveAndCompare) {
  CliRun i = run({"interleave", tower("mult_4"), tower("solenoid_2")});
  EXPECT_EQ(i.code, 0);
  EXPECT_NE(i.out.find("gaps: (1, 2)"), std::string::npos);
  CliRun none = run({"interleave", tower("solenoid_2"), tower("solenoid_3"), "--depth", "2"});
  EXPECT_EQ(none.out, "no interleaving with gaps up to 2\n");
  CliRun c = run({"compare", tower("solenoid_2"), tower("solenoid_3"), "--json"});
  EXPECT_EQ(c.json()["result"]["verdict"], "not_isomorphic");
}

TEST(Cli, TelescopeAndCech) {
  CliRun t = run({"telescope", tower("solenoid_2"), "--depth", "1", "--json"});
  ASSERT_EQ(t.code, 0);
  EXPECT_EQ(t.json()["result"]["retracts_to_level0"], true);
  CliRun c = run({"cech", tower("solenoid_2"), "--degree", "1"});
  EXPECT_EQ(c.out, "cech H^1 = Z[1/2]\ntag: Localization\n");
}

TEST(Cli, DepthLimitedExitsThree) {
  CliRun c = run({"cech", tower("hawaiian"), "--degree", "1", "--json"});
  EXPECT_EQ(c.code, 3);
  EXPECT_EQ(c.json()["result"]["tag"], "DepthLimited");
}

TEST(Cli, ParseErrorsExitTwo) {
  CliRun r = run({"lim", scratch("bad.tower", "tower:\n  bogus: 1\n")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("2:3"), std::string::npos);
  EXPECT_EQ(run({"lim", scratch("empty.tower", "")}).code, 2);
  std::string unresolved = "groups:\n  Z: {generators: 1}\ntower:\n  tail: {group: Z, endo: nowhere}\n";
  EXPECT_EQ(run({"lim", scratch("unres.tower", unresolved)}).code, 2);
  std::string dims = "groups:\n  Z: {generators: 1}\nmaps:\n  m: {source: Z, target: Z, matrix: [[1, 2]]}\n"
                     "tower:\n  tail: {group: Z, endo: m}\n";
  EXPECT_EQ(run({"lim", scratch("dims.tower", dims)}).code, 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"lim"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"lim", kRoot + "/towers/missing.tower"}).code, 2);
  EXPECT_EQ(run({"interleave", tower("solenoid_2")}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);
}

TEST(Cli, IllDefinedInputExitsFour) {
  // Z/2 -> Z sending the generator to 1 does not respect the relation.
  std::string ill = "groups:\n  Z: {generators: 1}\n  Z2: {generators: 1, relators: [[2]]}\n"
                    "maps:\n  m: {source: Z2, target: Z, matrix: [[1]]}\n"
                    "tower:\n  tail: {group: Z, endo: m}\n";
  CliRun r = run({"lim", scratch("ill.tower", ill)});
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_EQ(run({"lab", "--suite", "no_such_suite"}).code, 4);
  CliRun family = run({"lim", scratch("fam.tower", "tower:\n  family: {name: no_such_family}\n")});
  EXPECT_EQ(family.code, 4) << family.err;
}
