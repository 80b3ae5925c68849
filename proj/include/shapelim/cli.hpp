#pragma once

// Command-line front end. Exit codes: 0 success, 1 failed lab suite or
// internal error, 2 parse or usage error, 3 depth-limited answer, 4
// ill-defined input.

#include <openssl/evp.h>

#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shapelim/lab.hpp"
#include "shapelim/report.hpp"
#include "shapelim/tower_file.hpp"

#ifndef SHAPELIM_VERSION
#define SHAPELIM_VERSION "0.0.0"
#endif

namespace shapelim::cli {

enum ExitCode : int { Ok = 0, SuiteFailed = 1, ParseFailure = 2, DepthLimitedAnswer = 3, IllDefinedInput = 4 };

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream s;
  for (unsigned int k = 0; k < len; ++k) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return s.str();
}

struct Options {
  std::vector<std::string> files;
  std::size_t degree = 0;
  bool reduced = false;
  std::optional<std::size_t> depth;
  bool json = false;
  std::uint64_t seed = 42;
  std::size_t trials = 100;
  std::string suite;
};

struct Input {
  std::string name;  // file name without directories
  std::string bytes;
  TowerFile doc;
};

/// Everything a command produces besides the envelope.
struct Outcome {
  Json result;
  std::string text;
  Json verified_joints = nullptr;
  std::size_t depth_used = 0;
  std::vector<std::string> warnings;
  int code = Ok;
};

namespace detail {

inline Input load(const std::string& path) {
  Input in;
  in.name = std::filesystem::path(path).filename().string();
  in.bytes = read_file(path);
  in.doc = parse_tower_text(in.bytes);
  return in;
}

inline bool mentions_depth_limit(const Json& j) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if ((k == "tag" || k == "kind") && v == "DepthLimited") return true;
      if (mentions_depth_limit(v)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (mentions_depth_limit(v)) return true;
  }
  return false;
}

inline void note_streamed(const Tower& t, const LimitOptions& opt, Outcome& o) {
  if (t.is_periodic()) return;
  o.depth_used = std::max(o.depth_used, opt.depth);
  o.warnings.push_back("streamed family " + t.streamed_data().family + ": closed-form family rule applied");
}

// The file's `tower`, or H_degree of its simplicial tower.
inline Tower tower_of(const Input& in, const Options& o) {
  TowerFileResolver r(in.doc);
  if (in.doc.tower) return r.main_tower();
  if (in.doc.simplicial_tower) return homology_tower(r.simplicial_tower(), o.degree, o.reduced);
  throw Error(in.name + " has neither a tower nor a simplicial_tower section");
}

inline SimplicialTower simplicial_of(const Input& in) { return TowerFileResolver(in.doc).simplicial_tower(); }

inline Outcome group_outcome(const std::string& label, const StructuredGroup& g) {
  Outcome o;
  o.result = to_json(g);
  o.result["human"] = human(g);
  o.text = label + " = " + human(g) + "\ntag: " + to_string(g.tag()) + "\n";
  return o;
}

inline Outcome cmd_lim(const std::vector<Input>& in, const Options& op, const LimitOptions& opt, bool derived) {
  Tower t = tower_of(in[0], op);
  Outcome o = derived ? group_outcome("lim1", lim1(t, opt)) : group_outcome("lim", lim(t, opt));
  note_streamed(t, opt, o);
  return o;
}

inline Outcome cmd_ml(const std::vector<Input>& in, const Options& op, const LimitOptions& opt) {
  Tower t = tower_of(in[0], op);
  ConditionsReport r = ml_conditions(t, opt);
  Outcome o;
  o.result = to_json(r);
  o.text = render(r);
  note_streamed(t, opt, o);
  return o;
}

inline Outcome cmd_six_term(const std::vector<Input>& in, const LimitOptions& opt) {
  TowerSES ses = TowerFileResolver(in[0].doc).ses(opt.depth);
  SixTermReport r = six_term(ses, opt);
  Outcome o;
  o.result = to_json(r);
  o.text = render(r);
  o.verified_joints = r.verified_count();
  if (!ses.is_periodic()) {
    o.depth_used = opt.depth;
    o.warnings.push_back("streamed SES: levels checked to depth " + std::to_string(opt.depth));
  }
  return o;
}

inline Outcome cmd_steenrod(const std::vector<Input>& in, const Options& op, const LimitOptions& opt) {
  SimplicialTower st = simplicial_of(in[0]);
  SteenrodDescriptor d = steenrod(st, op.degree, op.reduced, opt);
  Outcome o;
  o.result = to_json(d);
  o.text = render(d);
  if (!st.is_periodic()) {
    o.depth_used = opt.depth;
    o.warnings.push_back("streamed builder " + st.streamed_data().family + ": closed-form family rule applied");
  }
  return o;
}

inline Outcome cmd_cech(const std::vector<Input>& in, const Options& op, const LimitOptions& opt) {
  SimplicialTower st = simplicial_of(in[0]);
  Outcome o = group_outcome("cech H^" + std::to_string(op.degree), cech_cohomology(st, op.degree, opt));
  if (!st.is_periodic()) o.depth_used = opt.depth;
  return o;
}

inline Outcome cmd_interleave(const std::vector<Input>& in, const Options& op) {
  Tower a = tower_of(in[0], op), b = tower_of(in[1], op);
  const std::size_t depth = op.depth.value_or(4);
  auto il = find_interleaving(a, b, depth);
  Outcome o;
  o.depth_used = depth;
  if (!il) {
    o.result = {{"found", false}};
    o.text = "no interleaving with gaps up to " + std::to_string(depth) + "\n";
    return o;
  }
  o.result = to_json(*il);
  o.result["found"] = true;
  o.result["verified"] = il->verify(a, b);
  o.text = "interleaving found (verified)\n" + render(*il);
  return o;
}

inline Outcome cmd_compare(const std::vector<Input>& in, const Options& op, const LimitOptions& opt) {
  Tower a = tower_of(in[0], op), b = tower_of(in[1], op);
  ProIsoVerdict v = compare_invariants(a, b, opt);
  Outcome o;
  o.result = to_json(v);
  o.text = render(v);
  note_streamed(a, opt, o);
  note_streamed(b, opt, o);
  return o;
}

inline Outcome cmd_telescope(const std::vector<Input>& in, const Options& op) {
  SimplicialTower st = simplicial_of(in[0]);
  const std::size_t m = op.depth.value_or(2);
  Telescope tel = telescope(st, m);
  const SimplicialComplex& k = tel.complex;
  Outcome o;
  o.depth_used = m;
  Json counts = Json::array();
  for (long d = 0; d <= k.dimension(); ++d) counts.push_back(k.count(static_cast<std::size_t>(d)));
  Json homology = Json::array();
  bool all_match = true;
  std::ostringstream text;
  text << "telescope of levels 0.." << m << ": " << k.vertex_count() << " vertices, simplices by dimension "
       << counts.dump() << "\n";
  for (std::size_t n = 0; n <= static_cast<std::size_t>(std::max<long>(k.dimension(), 0)); ++n) {
    SmithInvariants ht = homology_type(k, n, false);
    SmithInvariants h0 = homology_type(st.level(0), n, false);
    // The inclusion of level 0 must induce the isomorphism.
    const bool iso = induced_hom(tel.levels[0], n).is_isomorphism();
    all_match = all_match && iso && ht == h0;
    homology.push_back({{"degree", n}, {"telescope", ht.to_string()}, {"level0", h0.to_string()}, {"inclusion_iso", iso}});
    text << "H_" << n << ": telescope " << ht.to_string() << ", level 0 " << h0.to_string()
         << (iso ? ", inclusion iso" : ", inclusion NOT iso") << "\n";
  }
  o.result = {{"stages", m},       {"vertices", k.vertex_count()},
              {"simplices", counts}, {"homology", homology}, {"retracts_to_level0", all_match}};
  o.text = text.str();
  if (!all_match) o.code = SuiteFailed;
  return o;
}

inline Outcome cmd_lab(const Options& op) {
  LabConfig cfg;
  cfg.master_seed = op.seed;
  cfg.trials = op.trials;
  if (op.depth) cfg.depth = *op.depth;
  std::vector<std::string> suites = op.suite == "all" ? suite_names() : std::vector<std::string>{op.suite};
  Outcome o;
  o.depth_used = cfg.depth;
  Json reports = Json::array();
  bool ok = true;
  for (const auto& s : suites) {
    LabReport r = run_suite(cfg, s);
    ok = ok && r.ok();
    reports.push_back(to_json(r));
    o.text += render(r);
  }
  o.result = {{"ok", ok}, {"suites", reports}};
  if (!ok) o.code = SuiteFailed;
  return o;
}

}  // namespace detail

/// Runs one invocation; returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Derived limits, Mittag-Leffler conditions and Steenrod homology of inverse sequences", "shapelim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(SHAPELIM_VERSION));
  Options op;
  struct Command {
    std::string name, help;
    std::size_t files;
  };
  const std::vector<Command> commands{
      {"lim", "inverse limit of the tower", 1},
      {"lim1", "derived limit of the tower", 1},
      {"ml", "Mittag-Leffler conditions with certificates", 1},
      {"six-term", "six-term sequence of the file's SES", 1},
      {"steenrod", "Steenrod homology descriptor of the simplicial tower", 1},
      {"cech", "Cech cohomology as a colimit", 1},
      {"interleave", "search for an interleaving between two towers", 2},
      {"compare", "pro-isomorphism verdict for two towers", 2},
      {"telescope", "finite mapping telescope and its homology", 1},
      {"lab", "run randomized property suites", 0},
  };
  std::string chosen;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    if (c.files > 0)
      sub->add_option("files", op.files, c.files == 1 ? "tower file" : "two tower files")
          ->required()
          ->expected(static_cast<int>(c.files))
          ->check(CLI::ExistingFile);
    sub->add_flag("--json", op.json, "machine-readable report");
    sub->add_option("--depth", op.depth, "levels examined (interleave: gap bound; telescope: stages)");
    if (c.name == "steenrod" || c.name == "cech" || c.files > 0) {
      sub->add_option("--degree", op.degree, "homology degree");
      sub->add_flag("--reduced", op.reduced, "reduced homology in degree 0");
    }
    if (c.name == "lab") {
      sub->add_option("--suite", op.suite, "suite name or 'all'")->required();
      sub->add_option("--seed", op.seed, "master seed");
      sub->add_option("--trials", op.trials, "trials per suite");
    }
    sub->callback([&chosen, name = c.name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : ParseFailure;
  }

  LimitOptions opt;
  if (op.depth && chosen != "interleave" && chosen != "telescope") opt.depth = *op.depth;
  try {
    std::vector<Input> inputs;
    for (const auto& f : op.files) inputs.push_back(detail::load(f));
    Outcome o;
    if (chosen == "lim") o = detail::cmd_lim(inputs, op, opt, false);
    else if (chosen == "lim1") o = detail::cmd_lim(inputs, op, opt, true);
    else if (chosen == "ml") o = detail::cmd_ml(inputs, op, opt);
    else if (chosen == "six-term") o = detail::cmd_six_term(inputs, opt);
    else if (chosen == "steenrod") o = detail::cmd_steenrod(inputs, op, opt);
    else if (chosen == "cech") o = detail::cmd_cech(inputs, op, opt);
    else if (chosen == "interleave") o = detail::cmd_interleave(inputs, op);
    else if (chosen == "compare") o = detail::cmd_compare(inputs, op, opt);
    else if (chosen == "telescope") o = detail::cmd_telescope(inputs, op);
    else o = detail::cmd_lab(op);
    if (o.code == Ok && detail::mentions_depth_limit(o.result)) o.code = DepthLimitedAnswer;

    // One file: sha256 of its bytes. Two files: sha256 of the two hex
    // digests concatenated. Lab runs digest their configuration.
    std::string digest_input;
    if (inputs.empty())
      digest_input = "lab " + Json{{"suite", op.suite}, {"seed", op.seed}, {"trials", op.trials},
                                   {"depth", o.depth_used}}.dump();
    else if (inputs.size() == 1)
      digest_input = inputs[0].bytes;
    else
      for (const auto& in : inputs) digest_input += sha256_hex(in.bytes);
    if (op.json) {
      Json env;
      env["tool_version"] = SHAPELIM_VERSION;
      env["input_digest"] = "sha256:" + sha256_hex(digest_input);
      env["task"] = chosen;
      Json names = Json::array();
      for (const auto& in : inputs) names.push_back(in.name);
      env["inputs"] = names;
      env["result"] = o.result;
      env["verified_joints"] = o.verified_joints;
      env["depth_used"] = o.depth_used;
      env["warnings"] = o.warnings;
      out << env.dump(2) << "\n";
    } else {
      out << o.text;
      for (const auto& w : o.warnings) out << "warning: " << w << "\n";
    }
    return o.code;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return ParseFailure;
  } catch (const UnresolvedReference& e) {
    err << "error: " << e.what() << "\n";
    return ParseFailure;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return ParseFailure;
  } catch (const DepthLimited& e) {
    err << "error: " << e.what() << "\n";
    return DepthLimitedAnswer;
  } catch (const NoStabilization& e) {
    err << "error: " << e.what() << "\n";
    return DepthLimitedAnswer;
  } catch (const InternalInconsistency& e) {
    err << "internal error: " << e.what() << "\n";
    return SuiteFailed;
  } catch (const Error& e) {
    // Ill-defined maps, unknown families or suites, inexact sequences.
    err << "error: " << e.what() << "\n";
    return IllDefinedInput;
  }
}

}  // namespace shapelim::cli
