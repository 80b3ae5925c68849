#pragma once

// Machine-readable and text renderings of results. Integers are written as
// decimal strings so arbitrary-precision values survive JSON readers.

#include <string>
#include <vector>

#include "json.hpp"
#include "shapelim/lab.hpp"
#include "shapelim/limits.hpp"
#include "shapelim/procat.hpp"
#include "shapelim/shape.hpp"

namespace shapelim {

using Json = nlohmann::ordered_json;

inline Json json_rows(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j).get_str());
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Json json_invariants(const SmithInvariants& inv) {
  Json t = Json::array();
  for (const auto& d : inv.torsion) t.push_back(d.get_str());
  return {{"rank", inv.rank}, {"torsion", t}};
}

/// render() with a cardinality note for uncountable groups.
inline std::string human(const StructuredGroup& g) { return g.render() + (g.is_uncountable() ? " (uncountable)" : ""); }

inline Json to_json(const StructuredGroup& g) {
  Json j;
  j["tag"] = to_string(g.tag());
  j["render"] = g.render();
  j["trivial"] = g.is_trivial();
  j["uncountable"] = g.is_uncountable();
  switch (g.tag()) {
    case SgTag::FG: j["invariants"] = json_invariants(g.group().invariants()); break;
    case SgTag::CompletionQuotient:
    case SgTag::Completion: {
      j["endo"] = json_rows(g.endo());
      j["det"] = g.det().get_str();
      Json primes = Json::array();
      for (const auto& p : g.missing_primes()) primes.push_back(p.get_str());
      j["missing_primes"] = primes;
      Json tr = Json::object();
      for (const auto& [q, r] : g.torsion_ranks()) tr[q.get_str()] = r;
      j["torsion_ranks"] = tr;
      break;
    }
    case SgTag::Localization:
      j["invariants"] = json_invariants(g.group().invariants());
      j["endo"] = json_rows(g.endo());
      break;
    case SgTag::FullProduct: j["factor"] = g.text(); break;
    case SgTag::ProductOf: {
      Json parts = Json::array();
      for (const auto& p : g.parts()) parts.push_back(to_json(p));
      j["parts"] = parts;
      j["countable"] = g.countable();
      break;
    }
    case SgTag::DepthLimited:
      j["depth"] = g.depth();
      j["note"] = g.text();
      break;
    case SgTag::Zero: break;
  }
  return j;
}

inline std::string to_string(MLCertificate::Kind k) {
  switch (k) {
    case MLCertificate::Kind::StabilizedWitness: return "StabilizedWitness";
    case MLCertificate::Kind::NonML: return "NonML";
    default: return "DepthLimited";
  }
}

inline Json to_json(const MLCertificate& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  switch (c.kind) {
    case MLCertificate::Kind::StabilizedWitness:
      j["witness_offset"] = c.witness_offset;
      j["verified_symbolically"] = c.verified_symbolically;
      break;
    case MLCertificate::Kind::NonML:
      j["stable_index"] = c.stable_index.get_str();
      j["onset"] = c.onset;
      break;
    case MLCertificate::Kind::DepthLimited: j["depth"] = c.depth; break;
  }
  return j;
}

inline std::string describe(const MLCertificate& c) {
  switch (c.kind) {
    case MLCertificate::Kind::StabilizedWitness:
      return "images stabilize: j(i) = i + " + std::to_string(c.witness_offset) +
             (c.verified_symbolically ? " (symbolic)" : "");
    case MLCertificate::Kind::NonML:
      return "consecutive images have index " + c.stable_index.get_str() + " from level " + std::to_string(c.onset);
    default: return "examined to depth " + std::to_string(c.depth);
  }
}

inline Json to_json(const ConditionsReport& r) {
  auto cond = [](Verdict v, const std::string& note) { return Json{{"verdict", to_string(v)}, {"note", note}}; };
  Json j;
  j["ml"] = to_string(r.ml);
  j["certificate"] = to_json(r.certificate);
  j["dual_ml"] = cond(r.dual_ml, r.dual_note);
  j["virtually_ml"] = cond(r.virtually_ml, r.virtually_note);
  j["nearly_ml"] = cond(r.nearly_ml, r.nearly_note);
  return j;
}

inline std::string render(const ConditionsReport& r) {
  return "ml: " + to_string(r.ml) + "\ncertificate: " + describe(r.certificate) + "\ndual_ml: " +
         to_string(r.dual_ml) + " (" + r.dual_note + ")\nvirtually_ml: " + to_string(r.virtually_ml) + " (" +
         r.virtually_note + ")\nnearly_ml: " + to_string(r.nearly_ml) + " (" + r.nearly_note + ")\n";
}

inline Json to_json(const SixTermReport& r) {
  Json terms = Json::array();
  for (std::size_t k = 0; k < 6; ++k)
    terms.push_back({{"name", six_term_names()[k]},
                     {"group", to_json(r.terms[k])},
                     {"joint", {{"status", to_string(r.joints[k].status)}, {"note", r.joints[k].note}}}});
  return {{"terms", terms}, {"connecting_map", r.connecting_map}, {"quotient_check", r.quotient_check}};
}

inline std::string render(const SixTermReport& r) {
  std::string s;
  for (std::size_t k = 0; k < 6; ++k)
    s += six_term_names()[k] + " = " + human(r.terms[k]) + "  [" + to_string(r.joints[k].status) + ": " +
         r.joints[k].note + "]\n";
  s += "connecting map: " + r.connecting_map + "\n";
  s += "quotient check: " + r.quotient_check + "\n";
  s += "verified joints: " + std::to_string(r.verified_count()) + "/6\n";
  return s;
}

inline std::string to_string(Splits s) { return s == Splits::Yes ? "yes" : "unknown"; }

inline Json to_json(const SteenrodDescriptor& d) {
  Json j;
  j["degree"] = d.degree;
  j["reduced"] = d.reduced;
  j["lim_part"] = to_json(d.lim_part);
  j["lim1_part"] = to_json(d.lim1_part);
  j["splits"] = to_string(d.splits);
  auto m = d.middle();
  j["middle"] = m ? to_json(*m) : Json(nullptr);
  return j;
}

inline std::string render(const SteenrodDescriptor& d) {
  std::string s = std::string(d.reduced ? "reduced " : "") + "Steenrod homology in degree " +
                  std::to_string(d.degree) + "\n";
  s += "lim_part = " + human(d.lim_part) + "\n";
  s += "lim1_part = " + human(d.lim1_part) + "\n";
  s += "splits: " + to_string(d.splits) + "\n";
  if (auto m = d.middle()) s += "group = " + human(*m) + "\n";
  return s;
}

inline Json to_json(const Interleaving& il) {
  return {{"gap_a", il.gap_a},       {"gap_b", il.gap_b},           {"start_a", il.start_a},
          {"start_b", il.start_b},   {"forward", json_rows(il.forward.matrix())},
          {"backward", json_rows(il.backward.matrix())}};
}

inline std::string render(const Interleaving& il) {
  return "gaps: (" + std::to_string(il.gap_a) + ", " + std::to_string(il.gap_b) + ")\nstarts: (" +
         std::to_string(il.start_a) + ", " + std::to_string(il.start_b) + ")\nforward: " +
         il.forward.matrix().to_string() + "\nbackward: " + il.backward.matrix().to_string() + "\n";
}

inline Json to_json(const ProIsoVerdict& v) {
  return {{"verdict", to_string(v.kind)},
          {"reason", v.reason},
          {"witness", v.witness ? to_json(*v.witness) : Json(nullptr)}};
}

inline std::string render(const ProIsoVerdict& v) {
  std::string s = "verdict: " + to_string(v.kind) + "\nreason: " + v.reason + "\n";
  if (v.witness) s += render(*v.witness);
  return s;
}

}  // namespace shapelim
