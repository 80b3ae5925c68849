#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shapelim/errors.hpp"
#include "shapelim/exactlat.hpp"

namespace shapelim {

// ---------------------------------------------------------------------------
// Helpers on endomorphisms

inline Homomorphism power(const Homomorphism& a, std::size_t k) {
  Homomorphism r = Homomorphism::identity(a.source());
  for (std::size_t i = 0; i < k; ++i) r = compose(a, r);
  return r;
}

/// Upper bound on the length of a strictly monotone chain of subgroups of g,
/// padded by the stabilization window.
inline std::size_t stabilization_bound(const FgAbGroup& g) {
  const auto& inv = g.invariants();
  std::size_t bits = 0;
  Integer t = inv.torsion_order();
  if (t > 1) bits = mpz_sizeinbase(t.get_mpz_t(), 2);
  return inv.rank + bits + 2;
}

/// Smallest m with ker A^m = ker A^{m+1}.
inline std::size_t kernel_stabilization(const Homomorphism& a) {
  const std::size_t bound = stabilization_bound(a.source());
  Homomorphism ak = Homomorphism::identity(a.source());
  Lattice prev = hom_parts(ak).kernel_lattice;
  for (std::size_t m = 0; m <= bound; ++m) {
    ak = compose(a, ak);
    Lattice next = hom_parts(ak).kernel_lattice;
    if (next == prev) return m;
    prev = std::move(next);
  }
  throw DepthLimited("kernel chain did not stabilize", bound);
}

/// Subgroup generated by `gens` with the restriction of `endo`, which must
/// map the subgroup into itself. The subgroup is returned in simplified
/// (diagonal) presentation; `inclusion` maps it into endo's group.
struct Restriction {
  Homomorphism inclusion;
  Homomorphism endo;
};

inline Restriction restrict_endo(const Homomorphism& endo, const IntMatrix& gens) {
  const FgAbGroup& g = endo.source();
  Homomorphism inc = subgroup(g, gens);
  const IntMatrix& basis = inc.matrix();
  IntMatrix stacked = IntMatrix::hcat(basis, g.relations());
  auto sol = solve(stacked, endo.matrix() * basis);
  if (!sol) throw InternalInconsistency("subgroup is not invariant under the endomorphism");
  IntMatrix x = sol->block(0, 0, basis.cols(), basis.cols());
  Simplification s = inc.source().simplify();
  Homomorphism new_inc(s.group, g, basis * s.from);
  Homomorphism new_endo(s.group, s.group, s.to * x * s.from);
  return {new_inc, new_endo};
}

// ---------------------------------------------------------------------------
// Streamed family registry

/// Evaluators for a closed family: level j group and bond G_{j+1} -> G_j.
struct FamilyInfo {
  std::string name;
  std::size_t param_count;
  std::function<FgAbGroup(std::size_t, const std::vector<Integer>&)> group;
  std::function<IntMatrix(std::size_t, const std::vector<Integer>&)> bond;
};

namespace detail {

inline const std::map<std::string, FamilyInfo>& family_registry() {
  static const std::map<std::string, FamilyInfo> reg = [] {
    std::map<std::string, FamilyInfo> r;
    // H_0 of {+, 1..j}: generator 0 is the base point; point j+1 merges into +.
    r["finite_sets"] = {
        "finite_sets", 0,
        [](std::size_t j, const std::vector<Integer>&) { return FgAbGroup::free(j + 1); },
        [](std::size_t j, const std::vector<Integer>&) {
          IntMatrix m(j + 1, j + 2);
          for (std::size_t k = 0; k <= j; ++k) m(k, k) = 1;
          m(0, j + 1) = 1;
          return m;
        }};
    r["hawaiian_h1"] = {
        "hawaiian_h1", 0,
        [](std::size_t j, const std::vector<Integer>&) { return FgAbGroup::free(j); },
        [](std::size_t j, const std::vector<Integer>&) {
          IntMatrix m(j, j + 1);
          for (std::size_t k = 0; k < j; ++k) m(k, k) = 1;
          return m;
        }};
    r["cluster_h1"] = {
        "cluster_h1", 1,
        [](std::size_t j, const std::vector<Integer>&) { return FgAbGroup::free(j); },
        [](std::size_t j, const std::vector<Integer>& p) {
          IntMatrix m(j, j + 1);
          for (std::size_t k = 0; k < j; ++k) m(k, k) = p[0];
          return m;
        }};
    r["padic"] = {
        "padic", 1,
        [](std::size_t j, const std::vector<Integer>& p) {
          Integer q;
          Integer base = abs(p[0]);
          mpz_pow_ui(q.get_mpz_t(), base.get_mpz_t(), j);
          return FgAbGroup::cyclic(q);
        },
        [](std::size_t, const std::vector<Integer>&) { return IntMatrix::identity(1); }};
    return r;
  }();
  return reg;
}

}  // namespace detail

inline const FamilyInfo& family_info(const std::string& name) {
  const auto& reg = detail::family_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw UnknownFamily("unknown tower family: " + name);
  return it->second;
}

inline std::vector<std::string> family_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : detail::family_registry()) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Towers

/// Levels 0..P-1 are the prefix, every level >= P is the tail group with
/// bond tail_endo; splice is the bond from level P into level P-1.
struct PeriodicData {
  std::vector<FgAbGroup> prefix_groups;
  std::vector<Homomorphism> prefix_bonds;  // prefix_bonds[i] : G_{i+1} -> G_i
  FgAbGroup tail_group;
  Homomorphism tail_endo;
  std::optional<Homomorphism> splice;
};

/// Level i is family level i + offset.
struct StreamedData {
  std::string family;
  std::vector<Integer> params;
  std::size_t offset = 0;
};

class Tower {
 public:
  Tower() = default;

  static Tower periodic(std::vector<FgAbGroup> prefix, std::vector<Homomorphism> bonds,
                        FgAbGroup tail, Homomorphism endo,
                        std::optional<Homomorphism> splice = std::nullopt) {
    Tower t = periodic_unchecked(std::move(prefix), std::move(bonds), std::move(tail),
                                 std::move(endo), std::move(splice));
    t.validate();
    return t;
  }

  static Tower constant(const FgAbGroup& g) {
    return periodic({}, {}, g, Homomorphism::identity(g));
  }

  static Tower streamed(const std::string& family, std::vector<Integer> params,
                        std::size_t offset = 0) {
    const FamilyInfo& info = family_info(family);
    if (params.size() != info.param_count)
      throw DimensionMismatch("family " + family + " takes " +
                              std::to_string(info.param_count) + " parameter(s)");
    if (info.param_count == 1 && abs(params[0]) < 2)
      throw IllDefined("family " + family + " needs a parameter of absolute value >= 2");
    Tower t;
    t.data_ = StreamedData{family, std::move(params), offset};
    return t;
  }

  bool is_periodic() const { return std::holds_alternative<PeriodicData>(data_); }
  const PeriodicData& periodic_data() const { return std::get<PeriodicData>(data_); }
  const StreamedData& streamed_data() const { return std::get<StreamedData>(data_); }

  // First level that belongs to the tail.
  std::size_t tail_start() const {
    return is_periodic() ? periodic_data().prefix_groups.size() : 0;
  }

  FgAbGroup group(std::size_t i) const {
    if (is_periodic()) {
      const auto& p = periodic_data();
      return i < p.prefix_groups.size() ? p.prefix_groups[i] : p.tail_group;
    }
    const auto& s = streamed_data();
    return family_info(s.family).group(i + s.offset, s.params);
  }

  /// Bond G_{i+1} -> G_i.
  Homomorphism bond(std::size_t i) const {
    if (is_periodic()) {
      const auto& p = periodic_data();
      const std::size_t n = p.prefix_groups.size();
      if (i + 1 < n) return p.prefix_bonds[i];
      if (i + 1 == n) return *p.splice;
      return p.tail_endo;
    }
    const auto& s = streamed_data();
    const FamilyInfo& info = family_info(s.family);
    return Homomorphism(group(i + 1), group(i), info.bond(i + s.offset, s.params));
  }

  /// Composite bond G_j -> G_i for j >= i.
  Homomorphism composite(std::size_t j, std::size_t i) const {
    if (j < i) throw DimensionMismatch("composite bond needs j >= i");
    Homomorphism r = Homomorphism::identity(group(j));
    for (std::size_t k = j; k > i; --k) r = compose(bond(k - 1), r);
    return r;
  }

  std::string describe() const {
    if (!is_periodic()) {
      const auto& s = streamed_data();
      std::string d = s.family + "(";
      for (std::size_t k = 0; k < s.params.size(); ++k)
        d += (k ? "," : "") + s.params[k].get_str();
      d += ")";
      if (s.offset) d += " shifted by " + std::to_string(s.offset);
      return d;
    }
    const auto& p = periodic_data();
    std::string d;
    if (!p.prefix_groups.empty())
      d += "prefix of " + std::to_string(p.prefix_groups.size()) + " level(s), ";
    d += "tail " + p.tail_group.to_string() + " with endo " + p.tail_endo.matrix().to_string();
    return d;
  }

 private:
  static Tower periodic_unchecked(std::vector<FgAbGroup> prefix, std::vector<Homomorphism> bonds,
                                  FgAbGroup tail, Homomorphism endo,
                                  std::optional<Homomorphism> splice) {
    Tower t;
    t.data_ = PeriodicData{std::move(prefix), std::move(bonds), std::move(tail),
                           std::move(endo), std::move(splice)};
    return t;
  }

  void validate() const {
    const auto& p = periodic_data();
    const std::size_t n = p.prefix_groups.size();
    auto same = [](const FgAbGroup& a, const FgAbGroup& b) { return a == b; };
    if (!same(p.tail_endo.source(), p.tail_group) || !same(p.tail_endo.target(), p.tail_group))
      throw DimensionMismatch("tail endomorphism must act on the tail group");
    if (n == 0) {
      if (p.splice) throw DimensionMismatch("splice given without a prefix");
      if (!p.prefix_bonds.empty()) throw DimensionMismatch("prefix bonds given without a prefix");
      return;
    }
    if (p.prefix_bonds.size() + 1 != n)
      throw DimensionMismatch("a prefix of " + std::to_string(n) + " groups needs " +
                              std::to_string(n - 1) + " bonds");
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!same(p.prefix_bonds[i].source(), p.prefix_groups[i + 1]) ||
          !same(p.prefix_bonds[i].target(), p.prefix_groups[i]))
        throw DimensionMismatch("prefix bond " + std::to_string(i) + " has wrong endpoints");
    }
    if (!p.splice) throw DimensionMismatch("a prefix needs a splice from the tail");
    if (!same(p.splice->source(), p.tail_group) || !same(p.splice->target(), p.prefix_groups.back()))
      throw DimensionMismatch("splice must map the tail group into the last prefix group");
  }

  std::variant<PeriodicData, StreamedData> data_;
};

inline Tower periodic_tower(std::vector<FgAbGroup> prefix, std::vector<Homomorphism> bonds,
                            FgAbGroup tail, Homomorphism endo,
                            std::optional<Homomorphism> splice = std::nullopt) {
  return Tower::periodic(std::move(prefix), std::move(bonds), std::move(tail), std::move(endo),
                         std::move(splice));
}

inline Tower make_streamed(const std::string& family, std::vector<Integer> params = {}) {
  return Tower::streamed(family, std::move(params));
}

/// Drops the first k levels.
inline Tower shift(const Tower& t, std::size_t k) {
  if (!t.is_periodic()) {
    const auto& s = t.streamed_data();
    return Tower::streamed(s.family, s.params, s.offset + k);
  }
  const auto& p = t.periodic_data();
  const std::size_t n = p.prefix_groups.size();
  if (k >= n) return Tower::periodic({}, {}, p.tail_group, p.tail_endo);
  std::vector<FgAbGroup> groups(p.prefix_groups.begin() + static_cast<long>(k), p.prefix_groups.end());
  std::vector<Homomorphism> bonds(p.prefix_bonds.begin() + static_cast<long>(k), p.prefix_bonds.end());
  return Tower::periodic(std::move(groups), std::move(bonds), p.tail_group, p.tail_endo, p.splice);
}

/// Levels 0..depth with bonds[i] : groups[i+1] -> groups[i].
struct FiniteTower {
  std::vector<FgAbGroup> groups;
  std::vector<Homomorphism> bonds;
  std::size_t depth = 0;
};

inline FiniteTower truncate(const Tower& t, std::size_t n) {
  FiniteTower ft;
  ft.depth = n;
  for (std::size_t i = 0; i <= n; ++i) ft.groups.push_back(t.group(i));
  for (std::size_t i = 0; i < n; ++i) ft.bonds.push_back(t.bond(i));
  return ft;
}

/// Pure periodic tower on A^m G, m the kernel stabilization index, with the
/// restricted (now injective) endomorphism.
inline Tower reduce_to_images(const Tower& t) {
  if (!t.is_periodic()) throw Error("reduce_to_images needs an eventually periodic tower");
  const auto& a = t.periodic_data().tail_endo;
  const std::size_t m = kernel_stabilization(a);
  Restriction r = restrict_endo(a, power(a, m).matrix());
  return Tower::periodic({}, {}, r.endo.source(), r.endo);
}

// ---------------------------------------------------------------------------
// Certificates

struct MLCertificate {
  enum class Kind { StabilizedWitness, NonML, DepthLimited };
  Kind kind = Kind::DepthLimited;
  // StabilizedWitness: j(i) = i + witness_offset.
  std::size_t witness_offset = 0;
  bool verified_symbolically = false;
  // NonML: the consecutive image index c > 1, constant from level `onset` on.
  Integer stable_index = 0;
  std::size_t onset = 0;
  // DepthLimited and streamed verdicts: levels examined.
  std::size_t depth = 0;
};

// ---------------------------------------------------------------------------
// Short exact sequences of towers

/// Levelwise maps: prefix lists for levels below the common tail start and a
/// template used at every tail level.
struct PeriodicSesMaps {
  std::vector<Homomorphism> prefix_inject;
  std::vector<Homomorphism> prefix_surject;
  Homomorphism tail_inject;
  Homomorphism tail_surject;
};

/// Closed-form SES families. padic_ses(p): (Z,xp) -> (Z,1) -> padic(p) with
/// inject_i = x p^i and surject_i the reduction.
struct StreamedSesMaps {
  std::string family;
  std::vector<Integer> params;
};

using SesMaps = std::variant<PeriodicSesMaps, StreamedSesMaps>;

class TowerSES {
 public:
  TowerSES(Tower sub, Tower total, Tower quot, SesMaps maps, std::size_t depth)
      : sub_(std::move(sub)), total_(std::move(total)), quot_(std::move(quot)),
        maps_(std::move(maps)), depth_(depth) {}

  const Tower& sub() const { return sub_; }
  const Tower& total() const { return total_; }
  const Tower& quot() const { return quot_; }
  const SesMaps& maps() const { return maps_; }
  bool is_periodic() const { return std::holds_alternative<PeriodicSesMaps>(maps_); }
  // Levels checked: every level for periodic data, 0..depth otherwise.
  std::size_t checked_depth() const { return depth_; }

  std::size_t tail_start() const {
    return std::max({sub_.tail_start(), total_.tail_start(), quot_.tail_start()});
  }

  Homomorphism inject(std::size_t i) const {
    if (const auto* p = std::get_if<PeriodicSesMaps>(&maps_))
      return i < p->prefix_inject.size() ? p->prefix_inject[i] : p->tail_inject;
    const auto& s = std::get<StreamedSesMaps>(maps_);
    Integer q;
    mpz_pow_ui(q.get_mpz_t(), s.params[0].get_mpz_t(), i);
    return Homomorphism(sub_.group(i), total_.group(i), IntMatrix::from_rows({{q}}));
  }

  Homomorphism surject(std::size_t i) const {
    if (const auto* p = std::get_if<PeriodicSesMaps>(&maps_))
      return i < p->prefix_surject.size() ? p->prefix_surject[i] : p->tail_surject;
    return Homomorphism(total_.group(i), quot_.group(i), IntMatrix::identity(1));
  }

 private:
  Tower sub_, total_, quot_;
  SesMaps maps_;
  std::size_t depth_;
};

namespace detail {

inline void check_ses_level(const TowerSES& ses, std::size_t i) {
  Homomorphism j = ses.inject(i);
  Homomorphism f = ses.surject(i);
  if (!(j.source() == ses.sub().group(i)) || !(j.target() == ses.total().group(i)) ||
      !(f.source() == ses.total().group(i)) || !(f.target() == ses.quot().group(i)))
    throw NotExact(i, "levelwise maps have the wrong endpoints");
  if (!j.is_injective()) throw NotExact(i, "inject is not injective");
  if (!f.is_surjective()) throw NotExact(i, "surject is not surjective");
  Lattice im = hom_parts(j).image_lattice;
  Lattice ker = hom_parts(f).kernel_lattice;
  if (!(im == ker)) throw NotExact(i, "image of inject differs from kernel of surject");
}

inline void check_ses_square(const TowerSES& ses, std::size_t i) {
  Homomorphism left = compose(ses.total().bond(i), ses.inject(i + 1));
  Homomorphism right = compose(ses.inject(i), ses.sub().bond(i));
  if (!left.equals(right)) throw NotExact(i, "inject does not commute with the bonds");
  left = compose(ses.quot().bond(i), ses.surject(i + 1));
  right = compose(ses.surject(i), ses.total().bond(i));
  if (!left.equals(right)) throw NotExact(i, "surject does not commute with the bonds");
}

}  // namespace detail

/// Validates exactness and commutativity: through the first tail level for
/// periodic data (which covers every level), to `depth` for streamed data.
inline TowerSES tower_ses(Tower sub, Tower total, Tower quot, SesMaps maps,
                          std::size_t depth = 16) {
  if (const auto* s = std::get_if<StreamedSesMaps>(&maps)) {
    if (s->family != "padic_ses") throw UnknownFamily("unknown SES family: " + s->family);
    if (s->params.size() != 1 || abs(s->params[0]) < 2)
      throw IllDefined("padic_ses needs one parameter of absolute value >= 2");
  }
  bool periodic = std::holds_alternative<PeriodicSesMaps>(maps);
  if (periodic && !(sub.is_periodic() && total.is_periodic() && quot.is_periodic()))
    throw Error("periodic SES maps need eventually periodic towers");
  TowerSES ses(std::move(sub), std::move(total), std::move(quot), std::move(maps), depth);
  std::size_t last = periodic ? ses.tail_start() : depth;
  if (periodic) {
    const auto& p = std::get<PeriodicSesMaps>(ses.maps());
    if (p.prefix_inject.size() < ses.tail_start() || p.prefix_surject.size() < ses.tail_start())
      throw DimensionMismatch("SES needs explicit maps for every prefix level");
  }
  for (std::size_t i = 0; i <= last; ++i) detail::check_ses_level(ses, i);
  for (std::size_t i = 0; i <= last; ++i) detail::check_ses_square(ses, i);
  return ses;
}

/// The sequence (Z,xp) -> (Z,1) -> (Z/p^i, reduction).
inline TowerSES padic_ses(const Integer& p, std::size_t depth = 16) {
  FgAbGroup z = FgAbGroup::free(1);
  return tower_ses(Tower::periodic({}, {}, z, Homomorphism::scalar(z, p)), Tower::constant(z),
                   Tower::streamed("padic", {p}), StreamedSesMaps{"padic_ses", {p}}, depth);
}

}  // namespace shapelim
