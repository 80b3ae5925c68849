#pragma once

// Randomized property suites. Trial t draws from mt19937_64 seeded with
// splitmix64(splitmix64(master_seed) + t); bounded integers come from
// rejection sampling on the raw 64-bit stream, so a config reproduces the
// same report on every platform.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "shapelim/errors.hpp"
#include "shapelim/limits.hpp"
#include "shapelim/procat.hpp"
#include "shapelim/tower_file.hpp"
#include "shapelim/towers.hpp"

namespace shapelim {

struct LabConfig {
  std::uint64_t master_seed = 0;
  std::size_t trials = 0;
  std::size_t max_rank = 3;  // generators of a generated group
  long entry_bound = 5;      // |entries| of generated maps, before order scaling
  std::size_t depth = 12;    // materialized depth for finite checks
};

struct Counterexample {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string reason;
  std::string dump;  // tower file text
};

struct LabReport {
  std::string suite;
  LabConfig config;
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t vacuous = 0;  // passes where the checked implication had a false premise
  std::vector<Counterexample> counterexamples;
  double elapsed_ms = 0;  // not part of the canonical renderings

  bool ok() const { return failed == 0; }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return splitmix64(splitmix64(master) + trial);
}

class LabRng {
 public:
  explicit LabRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [lo, hi].
  long uniform(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<long>(gen_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    for (;;) {
      const std::uint64_t x = gen_();
      if (x < limit) return lo + static_cast<long>(x % span);
    }
  }

  bool coin(long one_in) { return uniform(0, one_in - 1) == 0; }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Generators

namespace detail {

inline const std::vector<long>& lab_moduli() {
  static const std::vector<long> m{2, 3, 4, 6};
  return m;
}

// Orders of the generators of a diagonal presentation; 0 for free ones.
inline FgAbGroup diagonal_group(const std::vector<long>& orders) {
  std::vector<std::size_t> tors;
  for (std::size_t k = 0; k < orders.size(); ++k)
    if (orders[k] != 0) tors.push_back(k);
  IntMatrix rel(orders.size(), tors.size());
  for (std::size_t c = 0; c < tors.size(); ++c) rel(tors[c], c) = orders[tors[c]];
  return FgAbGroup(orders.size(), rel);
}

inline std::vector<long> random_orders(LabRng& rng, std::size_t n, bool finite) {
  std::vector<long> o(n);
  const auto& mods = lab_moduli();
  for (auto& x : o)
    x = finite || rng.coin(3) ? mods[static_cast<std::size_t>(rng.uniform(0, static_cast<long>(mods.size()) - 1))]
                              : 0;
  return o;
}

// Entry (i, j) is a multiple of e_i / gcd(e_i, d_j) so relators map to
// relations; torsion never maps into a free coordinate.
inline IntMatrix random_hom_matrix(LabRng& rng, const std::vector<long>& src, const std::vector<long>& tgt,
                                   long bound) {
  IntMatrix m(tgt.size(), src.size());
  for (std::size_t i = 0; i < tgt.size(); ++i)
    for (std::size_t j = 0; j < src.size(); ++j) {
      if (src[j] != 0 && tgt[i] == 0) continue;
      const long step = src[j] != 0 ? tgt[i] / std::gcd(tgt[i], src[j]) : 1;
      m(i, j) = step * rng.uniform(-bound, bound);
    }
  return m;
}

inline Homomorphism random_hom(LabRng& rng, const std::vector<long>& src, const std::vector<long>& tgt,
                               long bound) {
  return Homomorphism(diagonal_group(src), diagonal_group(tgt), random_hom_matrix(rng, src, tgt, bound));
}

inline std::size_t draw_size(LabRng& rng, const LabConfig& cfg, std::size_t lo) {
  return static_cast<std::size_t>(rng.uniform(static_cast<long>(lo), static_cast<long>(std::max(cfg.max_rank, lo))));
}

}  // namespace detail

/// Eventually periodic tower with at most max_rank generators per level;
/// one time in three a prefix level is spliced in.
inline Tower gen_tower(LabRng& rng, const LabConfig& cfg, bool finite = false) {
  const std::size_t n = detail::draw_size(rng, cfg, 1);
  std::vector<long> orders = detail::random_orders(rng, n, finite);
  Homomorphism endo = detail::random_hom(rng, orders, orders, cfg.entry_bound);
  if (!rng.coin(3)) return Tower::periodic({}, {}, endo.source(), endo);
  std::vector<long> pre = detail::random_orders(rng, detail::draw_size(rng, cfg, 1), finite);
  Homomorphism splice = detail::random_hom(rng, orders, pre, cfg.entry_bound);
  return Tower::periodic({splice.target()}, {}, endo.source(), endo, splice);
}

/// Upper-triangular extension: total K (+) Q with bond [[alpha, mu], [0, gamma]].
struct GeneratedSes {
  std::vector<long> sub_orders, quot_orders;
  Homomorphism alpha, mu, gamma;

  std::vector<long> total_orders() const {
    std::vector<long> t = sub_orders;
    t.insert(t.end(), quot_orders.begin(), quot_orders.end());
    return t;
  }

  Homomorphism total_endo() const {
    const std::size_t k = sub_orders.size(), q = quot_orders.size();
    IntMatrix m(k + q, k + q);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) m(i, j) = alpha.matrix()(i, j);
      for (std::size_t j = 0; j < q; ++j) m(i, k + j) = mu.matrix()(i, j);
    }
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j) m(k + i, k + j) = gamma.matrix()(i, j);
    FgAbGroup g = detail::diagonal_group(total_orders());
    return Homomorphism(g, g, m);
  }

  Homomorphism inject() const {
    const std::size_t k = sub_orders.size(), q = quot_orders.size();
    IntMatrix m(k + q, k);
    for (std::size_t i = 0; i < k; ++i) m(i, i) = 1;
    return Homomorphism(alpha.source(), detail::diagonal_group(total_orders()), m);
  }

  Homomorphism surject() const {
    const std::size_t k = sub_orders.size(), q = quot_orders.size();
    IntMatrix m(q, k + q);
    for (std::size_t i = 0; i < q; ++i) m(i, k + i) = 1;
    return Homomorphism(detail::diagonal_group(total_orders()), gamma.source(), m);
  }

  TowerSES ses() const {
    Homomorphism t = total_endo();
    return tower_ses(Tower::periodic({}, {}, alpha.source(), alpha), Tower::periodic({}, {}, t.source(), t),
                     Tower::periodic({}, {}, gamma.source(), gamma),
                     PeriodicSesMaps{{}, {}, inject(), surject()});
  }
};

inline GeneratedSes gen_ses(LabRng& rng, const LabConfig& cfg, bool finite = false) {
  const std::size_t n = detail::draw_size(rng, cfg, 1);
  const std::size_t k = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(n)));
  GeneratedSes g;
  g.sub_orders = detail::random_orders(rng, k, finite);
  g.quot_orders = detail::random_orders(rng, n - k, finite);
  g.alpha = detail::random_hom(rng, g.sub_orders, g.sub_orders, cfg.entry_bound);
  g.gamma = detail::random_hom(rng, g.quot_orders, g.quot_orders, cfg.entry_bound);
  g.mu = detail::random_hom(rng, g.quot_orders, g.sub_orders, cfg.entry_bound);
  return g;
}

inline TowerFile ses_document(const TowerSES& ses) {
  TowerFile doc;
  doc.towers["K"] = tower_spec(doc, "K", ses.sub());
  doc.towers["G"] = tower_spec(doc, "G", ses.total());
  doc.towers["Q"] = tower_spec(doc, "Q", ses.quot());
  const auto& m = std::get<PeriodicSesMaps>(ses.maps());
  SesSpec s;
  s.sub = "K";
  s.total = "G";
  s.quot = "Q";
  for (std::size_t i = 0; i < m.prefix_inject.size(); ++i)
    s.inject.prefix.push_back(add_map(doc, "inject" + std::to_string(i), m.prefix_inject[i]));
  for (std::size_t i = 0; i < m.prefix_surject.size(); ++i)
    s.surject.prefix.push_back(add_map(doc, "surject" + std::to_string(i), m.prefix_surject[i]));
  s.inject.tail = add_map(doc, "inject", m.tail_inject);
  s.surject.tail = add_map(doc, "surject", m.tail_surject);
  doc.ses = std::move(s);
  return doc;
}

// ---------------------------------------------------------------------------
// Oracles that avoid the limits module

namespace detail {

/// Image chain alpha^k T in the tail group; it stabilizes as soon as two
/// consecutive terms agree.
inline bool oracle_ml(const Tower& t) {
  const Homomorphism& a = t.periodic_data().tail_endo;
  const FgAbGroup& g = a.source();
  const std::size_t bound = stabilization_bound(g) + 1;
  Homomorphism ak = Homomorphism::identity(g);
  Lattice prev = subgroup_lattice(g, ak.matrix());
  for (std::size_t k = 0; k <= bound; ++k) {
    ak = compose(a, ak);
    Lattice next = subgroup_lattice(g, ak.matrix());
    if (next == prev) return true;
    prev = std::move(next);
  }
  return false;
}

/// Kernel chain of alpha^k; the dual condition holds when it stabilizes.
inline bool oracle_dual_ml(const Tower& t) {
  const Homomorphism& a = t.periodic_data().tail_endo;
  const std::size_t bound = stabilization_bound(a.source()) + 1;
  Homomorphism ak = a;
  Lattice prev = hom_parts(ak).kernel_lattice;
  for (std::size_t k = 1; k <= bound; ++k) {
    ak = compose(a, ak);
    Lattice next = hom_parts(ak).kernel_lattice;
    if (next == prev) return true;
    prev = std::move(next);
  }
  return false;
}

inline bool same_description(const StructuredGroup& a, const StructuredGroup& b) {
  return compare(a, b) == Comparison::Equal && a.render() == b.render();
}

inline Tower every_other(const Tower& t) {
  const auto& p = t.periodic_data();
  return Tower::periodic({}, {}, p.tail_group, power(p.tail_endo, 2));
}

struct TrialResult {
  bool pass = true;
  bool vacuous = false;
  std::string reason;
  std::string dump;
};

inline TrialResult failure(std::string reason, const TowerFile& doc) {
  return {false, false, std::move(reason), serialize(doc)};
}

using Suite = std::function<TrialResult(LabRng&, const LabConfig&)>;

inline TrialResult suite_ml_equiv(LabRng& rng, const LabConfig& cfg) {
  Tower t = gen_tower(rng, cfg);
  const bool images = oracle_ml(t);
  const bool verdict = ml_conditions(t).ml == Verdict::True;
  const bool zero = lim1(t).is_trivial();
  if (images != verdict || verdict != zero)
    return failure("image chain " + std::string(images ? "stable" : "unstable") + ", ML verdict " +
                       (verdict ? "true" : "false") + ", lim1 " + (zero ? "zero" : "nonzero"),
                   tower_document(t));
  return {};
}

inline TrialResult suite_shift_invariance(LabRng& rng, const LabConfig& cfg) {
  Tower t = gen_tower(rng, cfg);
  StructuredGroup l = lim(t), l1 = lim1(t);
  for (std::size_t k = 1; k <= 5; ++k) {
    Tower s = shift(t, k);
    if (!same_description(lim(s), l) || !same_description(lim1(s), l1))
      return failure("shift by " + std::to_string(k) + " changes lim or lim1", tower_document(t));
  }
  // Reduction changes the presenting matrix, so only the comparator applies.
  Tower r = reduce_to_images(t);
  if (compare(lim(r), l) != Comparison::Equal || compare(lim1(r), l1) != Comparison::Equal)
    return failure("reducing to images changes lim or lim1", tower_document(t));
  return {};
}

inline TrialResult suite_finite_oracle(LabRng& rng, const LabConfig& cfg) {
  Tower t = gen_tower(rng, cfg, true);
  StructuredGroup l = lim(t);
  const std::size_t p = t.tail_start();
  const std::size_t depth = std::max(cfg.depth, p + stabilization_bound(t.group(p)) + 2);
  FgAbGroup brute = brute_lim(truncate(t, depth), p);
  if (!l.is_fg() || !(l.group().invariants() == brute.invariants()))
    return failure("lim " + l.render() + " but enumeration gives " + brute.to_string(), tower_document(t));
  return {};
}

inline TrialResult suite_six_term_exact(LabRng& rng, const LabConfig& cfg) {
  GeneratedSes g = gen_ses(rng, cfg, rng.coin(3));
  TowerSES ses = g.ses();
  TowerFile doc = ses_document(ses);
  SixTermReport rep;
  try {
    rep = six_term(ses);
  } catch (const InconsistentSES& e) {
    return failure(e.what(), doc);
  }
  const auto& T = rep.terms;  // lim K, lim G, lim Q, lim1 K, lim1 G, lim1 Q
  if (!T[5].is_trivial() && T[4].is_trivial()) return failure("lim1 G -> lim1 Q cannot be onto", doc);
  if (T[3].is_trivial() && T[5].is_trivial() && !T[4].is_trivial())
    return failure("lim1 G is nonzero between zero terms", doc);
  if (T[0].is_trivial() && T[2].is_trivial() && !T[1].is_trivial())
    return failure("lim G is nonzero between zero terms", doc);
  const FgAbGroup total = ses.total().group(0);
  if (total.is_finite()) {
    // lim1 K = 0, so 0 -> lim K -> lim G -> lim Q -> 0 is exact.
    auto order = [](const StructuredGroup& s) { return s.is_trivial() ? Integer(1) : s.group().order(); };
    if (order(T[1]) != order(T[0]) * order(T[2])) return failure("|lim G| != |lim K| |lim Q| for finite levels", doc);
  }
  if (total.invariants().is_free() &&
      total.invariants().rank != ses.sub().group(0).invariants().rank + ses.quot().group(0).invariants().rank)
    return failure("free ranks do not add", doc);
  return {};
}

inline TrialResult suite_dual_ml(LabRng& rng, const LabConfig& cfg) {
  Tower t = gen_tower(rng, cfg);
  ConditionsReport rep = ml_conditions(t);
  if (rep.dual_ml != Verdict::True) return failure("dual ML verdict is not true", tower_document(t));
  if (!oracle_dual_ml(t)) return failure("kernel chain did not stabilize", tower_document(t));
  // The limit is discrete and injects into the tail level.
  if (!periodic_lim(t).inclusion.is_injective()) return failure("lim does not inject into a level", tower_document(t));
  return {};
}

inline TrialResult suite_nearly_ml(LabRng& rng, const LabConfig& cfg) {
  Tower t = gen_tower(rng, cfg);
  const Verdict expect = oracle_ml(t) ? Verdict::True : Verdict::False;
  if (ml_conditions(t).nearly_ml != expect) return failure("nearly ML verdict differs from ML", tower_document(t));
  return {};
}

inline TrialResult suite_virtually_ml(LabRng& rng, const LabConfig& cfg) {
  Tower t = gen_tower(rng, cfg);
  if (ml_conditions(t).virtually_ml != Verdict::True) return failure("virtually ML verdict is not true", tower_document(t));
  // From k = rank on, consecutive images have finite index in each other.
  const Homomorphism& a = t.periodic_data().tail_endo;
  const FgAbGroup& g = a.source();
  Homomorphism ak = power(a, g.invariants().rank);
  Lattice cur = subgroup_lattice(g, ak.matrix());
  Lattice next = subgroup_lattice(g, compose(a, ak).matrix());
  if (!next.index_in(cur)) return failure("image has infinite index in the previous image", tower_document(t));
  return {};
}

// A -> B -> C -> D with B = A (+) Q upper triangular, C = Q (+) F upper
// triangular and D = F, the maps being inclusion and projection blocks.
inline TrialResult suite_ml_propagation(LabRng& rng, const LabConfig& cfg) {
  GeneratedSes left = gen_ses(rng, cfg);
  const std::size_t nf = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(cfg.max_rank)));
  GeneratedSes right;
  right.sub_orders = left.quot_orders;
  right.quot_orders = random_orders(rng, nf, false);
  right.alpha = left.gamma;
  right.gamma = random_hom(rng, right.quot_orders, right.quot_orders, cfg.entry_bound);
  right.mu = random_hom(rng, right.quot_orders, right.sub_orders, cfg.entry_bound);
  TowerSES l = left.ses(), r = right.ses();
  const Tower &A = l.sub(), &B = l.total(), &C = r.total(), &D = r.quot();
  TowerFile doc;
  doc.towers["A"] = tower_spec(doc, "A", A);
  doc.towers["B"] = tower_spec(doc, "B", B);
  doc.towers["C"] = tower_spec(doc, "C", C);
  doc.towers["D"] = tower_spec(doc, "D", D);
  Homomorphism ab = left.inject(), bc = compose(right.inject(), left.surject()), cd = right.surject();
  add_map(doc, "ab", ab);
  add_map(doc, "bc", bc);
  add_map(doc, "cd", cd);
  if (!(hom_parts(bc).kernel_lattice == subgroup_lattice(B.group(0), ab.matrix())) ||
      !(hom_parts(cd).kernel_lattice == subgroup_lattice(C.group(0), bc.matrix())))
    return failure("generated four-term sequence is not exact", doc);
  if (!(oracle_ml(A) && oracle_ml(C) && oracle_dual_ml(D))) return {true, true, "", ""};
  if (!oracle_ml(B) || ml_conditions(B).ml != Verdict::True)
    return failure("A and C are ML and D is dual ML but B is not ML", doc);
  return {};
}

inline TrialResult suite_pro_zero(LabRng& rng, const LabConfig& cfg) {
  Tower t = gen_tower(rng, cfg, true);
  const std::size_t p = t.tail_start();
  const std::size_t j = p + stabilization_bound(t.group(p)) + 1;
  bool all_zero = true;
  for (std::size_t i = 0; i <= p; ++i) all_zero = all_zero && t.composite(i + j, i).is_zero();
  if (lim(t).is_trivial() != all_zero)
    return failure(std::string("lim is ") + (all_zero ? "nonzero" : "zero") + " but composites are " +
                       (all_zero ? "zero" : "nonzero"),
                   tower_document(t));
  return {};
}

inline TrialResult suite_lim1_surjection(LabRng& rng, const LabConfig& cfg) {
  GeneratedSes g = gen_ses(rng, cfg);
  TowerSES ses = g.ses();
  if (!oracle_ml(ses.quot())) return {true, true, "", ""};
  if (lim1(ses.sub()).is_trivial() && !lim1(ses.total()).is_trivial())
    return failure("quot is ML and lim1 sub is zero but lim1 total is not", ses_document(ses));
  return {};
}

inline TrialResult suite_interleaving(LabRng& rng, const LabConfig& cfg) {
  Tower a = gen_tower(rng, cfg);
  Tower b = rng.coin(2) ? every_other(a) : gen_tower(rng, cfg);
  TowerFile doc;
  doc.towers["A"] = tower_spec(doc, "A", a);
  doc.towers["B"] = tower_spec(doc, "B", b);
  auto self = find_interleaving(a, a, 1);
  if (!self || !self->verify(a, a)) return failure("no self-interleaving at depth 1", doc);
  for (std::size_t d : {1u, 2u}) {
    auto il = find_interleaving(a, b, d);
    const bool shifted = find_interleaving(shift(a, 1), b, d + 1).has_value();
    if (!il) continue;
    if (!il->verify(a, b)) return failure("interleaving fails re-verification", doc);
    if (!shifted) return failure("interleaving lost after shifting", doc);
    if (compare_invariants(a, b).kind == ProIsoVerdict::Kind::NotIsomorphic)
      return failure("interleaved towers reported not isomorphic", doc);
  }
  return {};
}

inline const std::map<std::string, Suite>& suite_registry() {
  static const std::map<std::string, Suite> r{
      {"dual_ml", suite_dual_ml},
      {"finite_oracle", suite_finite_oracle},
      {"interleaving", suite_interleaving},
      {"lim1_surjection", suite_lim1_surjection},
      {"ml_equiv", suite_ml_equiv},
      {"ml_propagation", suite_ml_propagation},
      {"nearly_ml", suite_nearly_ml},
      {"pro_zero", suite_pro_zero},
      {"shift_invariance", suite_shift_invariance},
      {"six_term_exact", suite_six_term_exact},
      {"virtually_ml", suite_virtually_ml},
  };
  return r;
}

}  // namespace detail

inline std::vector<std::string> suite_names() {
  std::vector<std::string> n;
  for (const auto& [k, _] : detail::suite_registry()) n.push_back(k);
  return n;
}

inline LabReport run_suite(const LabConfig& cfg, const std::string& suite) {
  const auto& reg = detail::suite_registry();
  auto it = reg.find(suite);
  if (it == reg.end()) throw UnknownSuite("unknown suite: " + suite);
  const auto start = std::chrono::steady_clock::now();
  LabReport rep;
  rep.suite = suite;
  rep.config = cfg;
  rep.trials = cfg.trials;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = trial_seed(cfg.master_seed, t);
    LabRng rng(seed);
    detail::TrialResult r;
    try {
      r = it->second(rng, cfg);
    } catch (const Error& e) {
      r = {false, false, std::string("error: ") + e.what(), ""};
    }
    if (r.pass) {
      ++rep.passed;
      rep.vacuous += r.vacuous;
    } else {
      ++rep.failed;
      rep.counterexamples.push_back({t, seed, r.reason, r.dump});
    }
  }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Renderings (timing excluded so identical configs give identical bytes)

inline std::string render(const LabReport& r) {
  std::string s = "suite " + r.suite + ": " + std::to_string(r.passed) + "/" + std::to_string(r.trials) + " passed";
  if (r.vacuous) s += " (" + std::to_string(r.vacuous) + " vacuous)";
  s += "\nconfig: seed " + std::to_string(r.config.master_seed) + ", max_rank " + std::to_string(r.config.max_rank) +
       ", entry_bound " + std::to_string(r.config.entry_bound) + ", depth " + std::to_string(r.config.depth) + "\n";
  for (const auto& c : r.counterexamples) {
    s += "counterexample: trial " + std::to_string(c.trial) + ", seed " + std::to_string(c.seed) + ": " + c.reason +
         "\n";
    if (!c.dump.empty()) s += c.dump;
  }
  return s;
}

inline nlohmann::ordered_json to_json(const LabReport& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["config"] = {{"master_seed", r.config.master_seed},
                 {"trials", r.config.trials},
                 {"max_rank", r.config.max_rank},
                 {"entry_bound", r.config.entry_bound},
                 {"depth", r.config.depth}};
  j["trials"] = r.trials;
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  j["vacuous"] = r.vacuous;
  j["counterexamples"] = nlohmann::ordered_json::array();
  for (const auto& c : r.counterexamples)
    j["counterexamples"].push_back({{"trial", c.trial}, {"seed", c.seed}, {"reason", c.reason}, {"dump", c.dump}});
  return j;
}

}  // namespace shapelim
