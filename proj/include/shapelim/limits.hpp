#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shapelim/errors.hpp"
#include "shapelim/exactlat.hpp"
#include "shapelim/polynomial.hpp"
#include "shapelim/towers.hpp"

namespace shapelim {

enum class Verdict { True, False, Unknown };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    default: return "unknown";
  }
}

enum class Comparison { Equal, Different, Undecided };

inline std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::Equal: return "equal";
    case Comparison::Different: return "different";
    default: return "undecided";
  }
}

namespace detail {

inline Integer radical(const Integer& n) {
  Integer r = 1;
  for (const auto& p : prime_factors(n)) r *= p;
  return r;
}

// Action of A on Z^r / ker u(A), u the unit factor of the characteristic
// polynomial. ker u(A) is saturated and A-invariant; A is bijective on it.
inline IntMatrix split_unit_part(const IntMatrix& a) {
  const std::size_t s = a.rows();
  if (s == 0) return a;
  Poly u = unit_split(charpoly(a)).unit;
  if (u.size() == 1) return a;
  IntMatrix k = kernel(poly_eval(u, a));
  const std::size_t l = k.cols();
  SmithForm sf = snf(k);
  IntMatrix x = sf.U * a * sf.Uinv;
  for (std::size_t i = l; i < s; ++i)
    for (std::size_t j = 0; j < l; ++j)
      if (x(i, j) != 0) throw InternalInconsistency("unit lattice is not invariant");
  return x.block(l, l, s - l, s - l);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Structured descriptions of possibly non-finitely-generated groups

/// Tagged description. CompletionQuotient(A) is Λ_A(Z^r)/Z^r with
/// Λ_A(L) = lim L/A^k L and det A != 0; Completion(A) is Λ_A(Z^r) itself;
/// Localization(L, A) is colim(L -A-> L -A-> ...).
class StructuredGroup {
 public:
  enum class Tag { FG, CompletionQuotient, Completion, Localization, FullProduct, ProductOf, Zero, DepthLimited };

  StructuredGroup() = default;

  static StructuredGroup zero() { return StructuredGroup(); }

  static StructuredGroup fg(const FgAbGroup& g) {
    if (g.is_trivial()) return zero();
    StructuredGroup s;
    s.tag_ = Tag::FG;
    s.group_ = g;
    return s;
  }

  /// Both constructors first quotient out the unit part of A, which
  /// contributes nothing; a unimodular A therefore gives Zero.
  static StructuredGroup completion_quotient(const IntMatrix& a) { return with_endo(Tag::CompletionQuotient, a); }

  static StructuredGroup completion(const IntMatrix& a) { return with_endo(Tag::Completion, a); }

  static StructuredGroup localization(const FgAbGroup& l, const IntMatrix& a) {
    if (l.is_trivial()) return zero();
    StructuredGroup s;
    s.tag_ = Tag::Localization;
    s.group_ = l;
    s.endo_ = a;
    return s;
  }

  static StructuredGroup full_product(const std::string& factor) {
    StructuredGroup s;
    s.tag_ = Tag::FullProduct;
    s.text_ = factor;
    return s;
  }

  /// Product of `parts`; when `countable`, the list is one period of a
  /// countably infinite repetition.
  static StructuredGroup product_of(std::vector<StructuredGroup> parts, bool countable) {
    std::vector<StructuredGroup> kept;
    for (auto& p : parts)
      if (!p.is_trivial()) kept.push_back(std::move(p));
    if (kept.empty()) return zero();
    auto all_free_fg = [&] {
      for (const auto& p : kept) {
        if (p.tag_ == Tag::FullProduct && p.text_ == "Z") continue;
        if (p.tag_ != Tag::FG || !p.group_.invariants().is_free()) return false;
      }
      return true;
    };
    // Z^k repeated countably, or Z^k (+) ∏Z, is ∏Z.
    bool has_product = std::any_of(kept.begin(), kept.end(), [](const StructuredGroup& p) {
      return p.tag_ == Tag::FullProduct;
    });
    if (all_free_fg() && (countable || has_product)) return full_product("Z");
    if (!countable && kept.size() == 1) return kept.front();
    if (!countable && std::all_of(kept.begin(), kept.end(),
                                  [](const StructuredGroup& p) { return p.tag_ == Tag::FG; })) {
      FgAbGroup sum = kept.front().group_;
      for (std::size_t k = 1; k < kept.size(); ++k) sum = FgAbGroup::direct_sum(sum, kept[k].group_);
      return fg(sum);
    }
    StructuredGroup s;
    s.tag_ = Tag::ProductOf;
    s.parts_ = std::move(kept);
    s.countable_ = countable;
    return s;
  }

  static StructuredGroup depth_limited(const std::string& report, std::size_t depth) {
    StructuredGroup s;
    s.tag_ = Tag::DepthLimited;
    s.text_ = report;
    s.depth_ = depth;
    return s;
  }

  Tag tag() const { return tag_; }
  const FgAbGroup& group() const { return group_; }
  const IntMatrix& endo() const { return endo_; }
  std::size_t rank() const { return endo_.rows(); }
  const std::vector<StructuredGroup>& parts() const { return parts_; }
  bool countable() const { return countable_; }
  const std::string& text() const { return text_; }
  std::size_t depth() const { return depth_; }
  const Integer& det() const { return det_; }

  bool is_trivial() const { return tag_ == Tag::Zero; }
  bool is_fg() const { return tag_ == Tag::FG || tag_ == Tag::Zero; }

  bool is_uncountable() const {
    switch (tag_) {
      case Tag::CompletionQuotient:
      case Tag::Completion:
      case Tag::FullProduct: return true;
      case Tag::ProductOf:
        return countable_ || std::any_of(parts_.begin(), parts_.end(),
                                         [](const StructuredGroup& p) { return p.is_uncountable(); });
      default: return false;
    }
  }

  /// CompletionQuotient and Completion: primes dividing det A.
  const std::vector<Integer>& missing_primes() const { return primes_; }

  /// Every prime outside missing_primes(), described in words.
  std::string present_primes() const {
    if (primes_.empty()) return "all primes";
    std::string out = "all primes except";
    for (std::size_t k = 0; k < primes_.size(); ++k) out += (k ? ", " : " ") + primes_[k].get_str();
    return out;
  }

  /// CompletionQuotient: dimension over F_q of the q-torsion, for q dividing
  /// det A. Every other prime q has q-torsion of dimension rank().
  const std::map<Integer, std::size_t>& torsion_ranks() const { return torsion_ranks_; }

  std::size_t torsion_rank(const Integer& q) const {
    auto it = torsion_ranks_.find(q);
    return it == torsion_ranks_.end() ? rank() : it->second;
  }

  std::string render() const {
    switch (tag_) {
      case Tag::Zero: return "0";
      case Tag::FG: return group_.to_string();
      case Tag::CompletionQuotient:
        if (rank() == 1) return "Z_" + detail::radical(det_).get_str() + "/Z";
        return "Λ_A(Z^" + std::to_string(rank()) + ")/Z^" + std::to_string(rank()) +
               " with A = " + endo_.to_string();
      case Tag::Completion:
        if (rank() == 1) return "Z_" + detail::radical(det_).get_str();
        return "Λ_A(Z^" + std::to_string(rank()) + ") with A = " + endo_.to_string();
      case Tag::Localization:
        if (endo_.rows() == 1 && group_.invariants() == FgAbGroup::free(1).invariants())
          return "Z[1/" + detail::radical(endo_(0, 0)).get_str() + "]";
        return "(" + group_.to_string() + ")[1/A] with A = " + endo_.to_string();
      case Tag::FullProduct: return "∏ " + text_;
      case Tag::ProductOf: {
        std::string inner;
        for (std::size_t k = 0; k < parts_.size(); ++k) {
          if (k) inner += " (+) ";
          inner += parts_[k].render();
        }
        if (countable_) return "∏ (" + inner + ")";
        return inner;
      }
      case Tag::DepthLimited: return "undetermined beyond depth " + std::to_string(depth_);
    }
    return "?";
  }

 private:
  static StructuredGroup with_endo(Tag tag, const IntMatrix& a) {
    if (!a.is_square()) throw DimensionMismatch("structured endomorphism must be square");
    if (determinant(a) == 0) throw IllDefined("completion needs an injective endomorphism");
    StructuredGroup s;
    s.endo_ = detail::split_unit_part(a);
    if (s.endo_.rows() == 0) return zero();
    s.tag_ = tag;
    s.det_ = determinant(s.endo_);
    s.primes_ = prime_factors(s.det_);
    IntMatrix ar = a.pow(a.rows());
    for (const auto& q : s.primes_) s.torsion_ranks_[q] = rank_mod(ar, q);
    return s;
  }

  Tag tag_ = Tag::Zero;
  FgAbGroup group_;
  IntMatrix endo_;
  Integer det_ = 1;
  std::vector<Integer> primes_;
  std::map<Integer, std::size_t> torsion_ranks_;
  std::vector<StructuredGroup> parts_;
  bool countable_ = false;
  std::string text_;
  std::size_t depth_ = 0;
};

using SgTag = StructuredGroup::Tag;

inline std::string to_string(SgTag t) {
  switch (t) {
    case SgTag::FG: return "FG";
    case SgTag::CompletionQuotient: return "CompletionQuotient";
    case SgTag::Completion: return "Completion";
    case SgTag::Localization: return "Localization";
    case SgTag::FullProduct: return "FullProduct";
    case SgTag::ProductOf: return "ProductOf";
    case SgTag::Zero: return "Zero";
    case SgTag::DepthLimited: return "DepthLimited";
  }
  return "?";
}

/// Three-valued isomorphism test of abstract groups.
///
/// Λ_A(L)/L is divisible of continuum cardinality, so it is determined by the
/// F_q-dimensions of its q-torsion; these are rank(A^r mod q) for q | det A
/// and r otherwise. Λ_A(L) is ∏_q Z_q^{r - t_q} over q | det A.
inline Comparison compare(const StructuredGroup& a, const StructuredGroup& b) {
  using T = SgTag;
  if (a.tag() == T::DepthLimited || b.tag() == T::DepthLimited) return Comparison::Undecided;
  if (a.is_trivial() || b.is_trivial())
    return a.is_trivial() == b.is_trivial() ? Comparison::Equal : Comparison::Different;
  if (a.is_uncountable() != b.is_uncountable()) return Comparison::Different;
  if (a.tag() != b.tag()) {
    // Divisible versus reduced: a completion has no divisible elements.
    auto cq_vs = [](const StructuredGroup& x, const StructuredGroup& y) {
      return x.tag() == T::CompletionQuotient && (y.tag() == T::Completion || y.tag() == T::FullProduct);
    };
    if (cq_vs(a, b) || cq_vs(b, a)) return Comparison::Different;
    return Comparison::Undecided;
  }
  switch (a.tag()) {
    case T::FG:
      return a.group().invariants() == b.group().invariants() ? Comparison::Equal : Comparison::Different;
    case T::CompletionQuotient: {
      if (a.rank() != b.rank()) return Comparison::Different;
      std::set<Integer> qs(a.missing_primes().begin(), a.missing_primes().end());
      qs.insert(b.missing_primes().begin(), b.missing_primes().end());
      for (const auto& q : qs)
        if (a.torsion_rank(q) != b.torsion_rank(q)) return Comparison::Different;
      return Comparison::Equal;
    }
    case T::Completion: {
      std::set<Integer> qs(a.missing_primes().begin(), a.missing_primes().end());
      qs.insert(b.missing_primes().begin(), b.missing_primes().end());
      for (const auto& q : qs)
        if (a.rank() - a.torsion_rank(q) != b.rank() - b.torsion_rank(q)) return Comparison::Different;
      return Comparison::Equal;
    }
    case T::Localization:
      if (a.group() == b.group() && a.endo() == b.endo()) return Comparison::Equal;
      return Comparison::Undecided;
    case T::FullProduct:
      return a.text() == b.text() ? Comparison::Equal : Comparison::Undecided;
    case T::ProductOf: {
      if (a.countable() != b.countable() || a.parts().size() != b.parts().size())
        return Comparison::Undecided;
      for (std::size_t k = 0; k < a.parts().size(); ++k)
        if (compare(a.parts()[k], b.parts()[k]) != Comparison::Equal) return Comparison::Undecided;
      return Comparison::Equal;
    }
    default: return Comparison::Undecided;
  }
}

// ---------------------------------------------------------------------------
// Options and reports

struct LimitOptions {
  std::size_t depth = 16;     // levels examined for streamed towers
  bool family_rules = true;   // use the registered closed-form family rules
};

struct ConditionsReport {
  Verdict ml = Verdict::Unknown;
  MLCertificate certificate;
  Verdict dual_ml = Verdict::Unknown;
  std::string dual_note;
  Verdict virtually_ml = Verdict::Unknown;
  std::string virtually_note;
  Verdict nearly_ml = Verdict::Unknown;
  std::string nearly_note;
};

namespace detail {

// Tail group in diagonal presentation (torsion coordinates first).
struct TailModel {
  FgAbGroup original;
  Simplification simp;
  Homomorphism endo;
  std::size_t torsion = 0;
  std::size_t free_rank = 0;
  IntMatrix free_block;  // action on the free quotient
};

inline TailModel tail_model(const Homomorphism& a) {
  TailModel m;
  m.original = a.source();
  m.simp = a.source().simplify();
  const FgAbGroup& g = m.simp.group;
  m.endo = Homomorphism(g, g, m.simp.to * a.matrix() * m.simp.from);
  m.free_rank = g.invariants().rank;
  m.torsion = g.generator_count() - m.free_rank;
  m.free_block = m.endo.matrix().block(m.torsion, m.torsion, m.free_rank, m.free_rank);
  return m;
}

inline bool family_is_surjective(const std::string& f) {
  return f == "finite_sets" || f == "hawaiian_h1" || f == "padic";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Mittag-Leffler conditions

inline ConditionsReport ml_conditions(const Tower& t, const LimitOptions& opt = {}) {
  ConditionsReport rep;
  if (!t.is_periodic()) {
    const auto& s = t.streamed_data();
    if (opt.family_rules) {
      if (detail::family_is_surjective(s.family)) {
        rep.ml = Verdict::True;
        rep.certificate.kind = MLCertificate::Kind::StabilizedWitness;
        rep.certificate.witness_offset = 0;
        rep.certificate.verified_symbolically = true;
      } else {
        // cluster_h1(p): the image of G_k in G_1 is p^{k-1} Z.
        rep.ml = Verdict::False;
        rep.certificate.kind = MLCertificate::Kind::NonML;
        rep.certificate.stable_index = abs(s.params[0]);
        rep.certificate.onset = 1;
      }
      rep.dual_ml = Verdict::False;
      rep.dual_note = "kernels to level k gain one new coordinate at every level";
      rep.virtually_ml = Verdict::True;
      rep.virtually_note = "images of deeper levels have finite index in each other";
    } else {
      rep.certificate.kind = MLCertificate::Kind::DepthLimited;
      rep.certificate.depth = opt.depth;
      rep.dual_note = rep.virtually_note = "streamed tower examined without family rules";
    }
    rep.nearly_ml = rep.ml;
    rep.nearly_note = "normal closure of an image is the image in an abelian group";
    return rep;
  }

  const auto& p = t.periodic_data();
  detail::TailModel tm = detail::tail_model(p.tail_endo);
  const std::size_t start = p.prefix_groups.size();
  const std::size_t bound = stabilization_bound(tm.simp.group);

  const IntMatrix& b = tm.free_block;
  Integer index = 1;
  std::size_t onset = 0;
  if (tm.free_rank > 0) {
    std::size_t k = 0;
    IntMatrix bk = IntMatrix::identity(tm.free_rank);
    for (;; ++k) {
      if (k > bound) throw NoStabilization("image ranks did not stabilize");
      if (rank(bk) == rank(b * bk)) break;
      bk = b * bk;
    }
    Lattice vk = Lattice::from_generators(bk);
    Lattice vk1 = Lattice::from_generators(b * bk);
    Lattice vk2 = Lattice::from_generators(b * b * bk);
    index = *vk1.index_in(vk);
    if (*vk2.index_in(vk1) != index) throw InternalInconsistency("image index is not constant");
    onset = start + k;
  }
  if (index > 1) {
    rep.ml = Verdict::False;
    rep.certificate.kind = MLCertificate::Kind::NonML;
    rep.certificate.stable_index = index;
    rep.certificate.onset = onset;
  } else {
    Homomorphism ak = Homomorphism::identity(tm.simp.group);
    Lattice prev = subgroup_lattice(tm.simp.group, ak.matrix());
    std::size_t k = 0;
    for (;; ++k) {
      if (k > bound) throw NoStabilization("image chain did not stabilize");
      ak = compose(tm.endo, ak);
      Lattice next = subgroup_lattice(tm.simp.group, ak.matrix());
      if (next == prev) break;
      prev = std::move(next);
    }
    rep.ml = Verdict::True;
    rep.certificate.kind = MLCertificate::Kind::StabilizedWitness;
    rep.certificate.witness_offset = start + k;
    rep.certificate.verified_symbolically = true;
  }
  const std::size_t m = kernel_stabilization(tm.endo);
  rep.dual_ml = Verdict::True;
  rep.dual_note = "kernels of A^k stabilize from k = " + std::to_string(m);
  rep.virtually_ml = Verdict::True;
  rep.virtually_note = "once image ranks are constant, consecutive images have finite index";
  rep.nearly_ml = rep.ml;
  rep.nearly_note = "normal closure of an image is the image in an abelian group";
  return rep;
}

// ---------------------------------------------------------------------------
// lim

/// lim of an eventually periodic tower together with its embedding into the
/// tail group (projection of threads to any tail level is injective).
struct PeriodicLim {
  FgAbGroup group;
  Homomorphism inclusion;  // group -> tail group
};

inline PeriodicLim periodic_lim(const Tower& t) {
  const auto& p = t.periodic_data();
  detail::TailModel tm = detail::tail_model(p.tail_endo);
  const FgAbGroup& g = tm.simp.group;
  const std::size_t n = g.generator_count();
  const std::size_t r = tm.free_rank;
  const std::size_t tors = tm.torsion;

  // Free part: eigen-lattice of the unit factor of the characteristic polynomial.
  IntMatrix lu(r, 0);
  std::size_t unit_degree = 0;
  if (r > 0) {
    Poly u = unit_split(charpoly(tm.free_block)).unit;
    unit_degree = u.size() - 1;
    lu = kernel(poly_eval(u, tm.free_block));
    if (lu.cols() != unit_degree) throw InternalInconsistency("unit eigen-lattice has the wrong rank");
  }
  const std::size_t m = kernel_stabilization(tm.endo);
  IntMatrix am = power(tm.endo, m).matrix();
  Lattice c = Lattice::from_generators(IntMatrix::hcat(am, g.relations()));
  IntMatrix pre(n, tors + lu.cols());
  for (std::size_t k = 0; k < tors; ++k) pre(k, k) = 1;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < lu.cols(); ++j) pre(tors + i, tors + j) = lu(i, j);
  Lattice s = c.intersection(Lattice::from_generators(pre));

  Restriction res = restrict_endo(tm.endo, s.basis());
  if (!res.endo.is_isomorphism())
    throw InternalInconsistency("endomorphism is not bijective on the thread lattice");
  if (res.endo.source().invariants().rank != unit_degree)
    throw InternalInconsistency("thread lattice rank differs from the unit degree");

  // Independent torsion check: eventual image of A on the torsion subgroup.
  IntMatrix tgens(n, tors);
  for (std::size_t k = 0; k < tors; ++k) tgens(k, k) = 1;
  Lattice tl = subgroup_lattice(g, tgens);
  Lattice e = tl;
  const std::size_t bound = stabilization_bound(g);
  IntMatrix img = tgens;
  for (std::size_t k = 0;; ++k) {
    if (k > bound) throw NoStabilization("torsion image chain did not stabilize");
    img = tm.endo.matrix() * img;
    Lattice next = subgroup_lattice(g, img);
    if (next == e) break;
    e = std::move(next);
  }
  if (!(s.intersection(tl) == e)) throw InternalInconsistency("thread torsion differs from the eventual torsion image");

  // Stable-thread check: every thread lies in the image of each A^k.
  IntMatrix ak = IntMatrix::identity(n);
  for (std::size_t k = 0; k <= m + 2; ++k, ak = tm.endo.matrix() * ak)
    if (!subgroup_lattice(g, ak).contains(s))
      throw InternalInconsistency("thread lattice leaves the image of A^" + std::to_string(k));

  Homomorphism inc(res.inclusion.source(), tm.original, tm.simp.from * res.inclusion.matrix());
  return {res.inclusion.source(), inc};
}

inline StructuredGroup lim(const Tower& t, const LimitOptions& opt = {}) {
  if (t.is_periodic()) return StructuredGroup::fg(periodic_lim(t).group);
  const auto& s = t.streamed_data();
  if (!opt.family_rules)
    return StructuredGroup::depth_limited("lim of a streamed tower without family rules", opt.depth);
  if (s.family == "finite_sets" || s.family == "hawaiian_h1") return StructuredGroup::full_product("Z");
  if (s.family == "cluster_h1") return StructuredGroup::zero();
  return StructuredGroup::completion(IntMatrix::from_rows({{abs(s.params[0])}}));
}

// ---------------------------------------------------------------------------
// lim^1

/// lim^1 through the completion quotient of the reduced non-unit part of the
/// free quotient. Does not consult the image chain.
inline StructuredGroup lim1(const Tower& t, const LimitOptions& opt = {}) {
  if (!t.is_periodic()) {
    const auto& s = t.streamed_data();
    if (!opt.family_rules)
      return StructuredGroup::depth_limited("lim1 of a streamed tower without family rules", opt.depth);
    if (detail::family_is_surjective(s.family)) return StructuredGroup::zero();
    return StructuredGroup::product_of(
        {StructuredGroup::completion_quotient(IntMatrix::from_rows({{abs(s.params[0])}}))}, true);
  }
  detail::TailModel tm = detail::tail_model(t.periodic_data().tail_endo);
  const std::size_t r = tm.free_rank;
  if (r == 0) return StructuredGroup::zero();
  const IntMatrix& b = tm.free_block;
  FgAbGroup f = FgAbGroup::free(r);
  const std::size_t m = kernel_stabilization(Homomorphism(f, f, b));
  IntMatrix v = lattice_basis(b.pow(m));
  const std::size_t s = v.cols();
  if (s == 0) return StructuredGroup::zero();
  auto b1 = solve(v, b * v);
  if (!b1) throw InternalInconsistency("image lattice is not invariant");
  IntMatrix a = detail::split_unit_part(*b1);
  if (a.rows() > 0 && determinant(a) == 0) throw InternalInconsistency("reduced endomorphism is not injective");
  return StructuredGroup::completion_quotient(a);
}

// ---------------------------------------------------------------------------
// Oracle: literal thread enumeration

namespace detail {

inline Integer element_order(const FgAbGroup& g, const IntVector& x) {
  IntVector c = g.normal_form(x);
  Integer ord = 1;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Integer& mod = g.moduli()[k];
    if (mod == 1) continue;
    if (mod == 0) {
      if (c[k] != 0) return 0;
      continue;
    }
    Integer gk = gcd_of(mod, c[k]);
    ord = lcm_of(ord, mod / gk);
  }
  return ord;
}

// Invariant factors of a finite abelian group from its order statistics.
inline FgAbGroup group_from_orders(const std::vector<Integer>& orders) {
  std::map<Integer, std::vector<unsigned>> exps;  // prime -> elementary exponents
  Integer size = static_cast<unsigned long>(orders.size());
  for (const auto& q : prime_factors(size)) {
    std::vector<unsigned> logs{0};  // log_q #{x : q^k x = 0}
    for (unsigned k = 1;; ++k) {
      Integer qk;
      mpz_pow_ui(qk.get_mpz_t(), q.get_mpz_t(), k);
      unsigned long cnt = 0;
      for (const auto& o : orders)
        if (divides(o, qk)) ++cnt;
      unsigned lg = 0;
      Integer c = static_cast<unsigned long>(cnt);
      while (c > 1) {
        c /= q;
        ++lg;
      }
      logs.push_back(lg);
      if (lg == logs[k - 1]) break;
    }
    // Number of cyclic q-factors of exponent >= k is logs[k] - logs[k-1].
    std::vector<unsigned> at_least;
    for (std::size_t k = 1; k < logs.size(); ++k) at_least.push_back(logs[k] - logs[k - 1]);
    std::vector<unsigned> e;
    for (std::size_t k = 0; k < at_least.size(); ++k) {
      unsigned here = at_least[k] - (k + 1 < at_least.size() ? at_least[k + 1] : 0);
      for (unsigned c = 0; c < here; ++c) e.push_back(static_cast<unsigned>(k + 1));
    }
    std::sort(e.begin(), e.end(), std::greater<>());
    exps[q] = e;
  }
  std::size_t len = 0;
  for (const auto& [q, e] : exps) len = std::max(len, e.size());
  std::vector<Integer> torsion(len, Integer(1));
  for (const auto& [q, e] : exps)
    for (std::size_t k = 0; k < e.size(); ++k) {
      Integer qk;
      mpz_pow_ui(qk.get_mpz_t(), q.get_mpz_t(), e[k]);
      torsion[len - 1 - k] *= qk;
    }
  SmithInvariants inv;
  inv.torsion = torsion;
  return FgAbGroup::from_invariants(inv);
}

}  // namespace detail

/// Enumerates every thread of a finite tower of finite groups and returns the
/// group of their restrictions to levels 0..s.
inline FgAbGroup brute_lim(const FiniteTower& ft, std::size_t s = 0, std::size_t limit = 1u << 20) {
  for (const auto& g : ft.groups)
    if (!g.is_finite()) throw Error("brute_lim needs finite groups");
  if (s > ft.depth) throw DimensionMismatch("restriction level beyond the tower depth");
  const FgAbGroup& top = ft.groups[ft.depth];
  if (top.order() > Integer(static_cast<unsigned long>(limit)))
    throw TooLarge("top level has " + top.order().get_str() + " elements");
  const auto& mod = top.moduli();
  IntVector coord(top.generator_count(), Integer(0));
  std::set<std::vector<IntVector>> seen;
  std::vector<std::vector<IntVector>> elements;
  for (;;) {
    IntVector x = top.from_coordinates(coord);
    std::vector<IntVector> chain(ft.depth + 1);
    chain[ft.depth] = x;
    for (std::size_t i = ft.depth; i-- > 0;) chain[i] = ft.bonds[i].apply(chain[i + 1]);
    std::vector<IntVector> key;
    for (std::size_t i = 0; i <= s; ++i) key.push_back(ft.groups[i].normal_form(chain[i]));
    if (seen.insert(key).second) elements.push_back(chain);
    std::size_t k = 0;
    for (; k < coord.size(); ++k) {
      if (mod[k] <= 1) continue;
      coord[k] += 1;
      if (coord[k] < mod[k]) break;
      coord[k] = 0;
    }
    if (k == coord.size()) break;
  }
  std::vector<Integer> orders;
  for (const auto& chain : elements) {
    Integer o = 1;
    for (std::size_t i = 0; i <= s; ++i) o = lcm_of(o, detail::element_order(ft.groups[i], chain[i]));
    orders.push_back(o);
  }
  return detail::group_from_orders(orders);
}

// ---------------------------------------------------------------------------
// Six-term sequence

enum class JointStatus { Verified, Consistent, Skipped };

inline std::string to_string(JointStatus s) {
  switch (s) {
    case JointStatus::Verified: return "verified";
    case JointStatus::Consistent: return "consistent";
    default: return "skipped";
  }
}

struct Joint {
  std::string term;
  JointStatus status = JointStatus::Skipped;
  std::string note;
};

struct SixTermReport {
  // lim K, lim G, lim Q, lim1 K, lim1 G, lim1 Q
  std::array<StructuredGroup, 6> terms;
  std::array<Joint, 6> joints;
  std::string connecting_map;
  std::string quotient_check;

  std::size_t verified_count() const {
    return static_cast<std::size_t>(std::count_if(joints.begin(), joints.end(), [](const Joint& j) {
      return j.status == JointStatus::Verified;
    }));
  }
};

inline const std::array<std::string, 6>& six_term_names() {
  static const std::array<std::string, 6> n{"lim K", "lim G", "lim Q", "lim1 K", "lim1 G", "lim1 Q"};
  return n;
}

inline SixTermReport six_term(const TowerSES& ses, const LimitOptions& opt = {}) {
  SixTermReport rep;
  const Tower* towers[3] = {&ses.sub(), &ses.total(), &ses.quot()};
  for (int k = 0; k < 3; ++k) {
    rep.terms[k] = lim(*towers[k], opt);
    rep.terms[k + 3] = lim1(*towers[k], opt);
  }
  const auto& names = six_term_names();
  for (int k = 0; k < 6; ++k) rep.joints[k].term = names[k];
  rep.connecting_map =
      "delta(q) = class of (j_i^{-1}(s_i - g_i(s_{i+1})))_i for lifts s_i of the thread q through f_i";

  const std::size_t level = ses.tail_start();
  std::optional<PeriodicLim> lk, lg, lq;
  if (towers[0]->is_periodic()) lk = periodic_lim(*towers[0]);
  if (towers[1]->is_periodic()) lg = periodic_lim(*towers[1]);
  if (towers[2]->is_periodic()) lq = periodic_lim(*towers[2]);
  const auto& T = rep.terms;
  auto fg = [&](int k) { return T[k].is_fg(); };
  auto limited = [&](int k) { return T[k].tag() == SgTag::DepthLimited; };
  auto fail = [&](int k, const std::string& why) {
    throw InconsistentSES("exactness fails at " + names[k] + ": " + why);
  };
  auto set = [&](int k, JointStatus s, const std::string& note) {
    rep.joints[k].status = s;
    rep.joints[k].note = note;
  };

  Homomorphism m0, m1;
  if (lk && lg) m0 = compose(ses.inject(level), lk->inclusion);
  if (lg) m1 = compose(ses.surject(level), lg->inclusion);

  // lim K: lim K -> lim G injective.
  if (limited(0)) set(0, JointStatus::Skipped, "depth-limited term");
  else if (T[0].is_trivial()) set(0, JointStatus::Verified, "term is zero");
  else if (lk && lg) {
    if (!hom_parts(m0).kernel.source().is_trivial()) fail(0, "lim K -> lim G is not injective");
    set(0, JointStatus::Verified, "lim K -> lim G is injective");
  } else set(0, JointStatus::Consistent, "injectivity holds levelwise");

  // lim G: image of lim K equals the kernel of lim G -> lim Q.
  if (limited(1) || limited(0) || limited(2)) set(1, JointStatus::Skipped, "depth-limited neighbour");
  else if (T[1].is_trivial()) set(1, JointStatus::Verified, "term is zero");
  else if (lg && fg(0) && fg(2) && (lq || T[2].is_trivial())) {
    IntMatrix kergens = T[2].is_trivial()
                            ? lg->inclusion.matrix()
                            : compose(lg->inclusion, hom_parts(m1).kernel).matrix();
    IntMatrix imgens = lk ? m0.matrix() : IntMatrix(ses.total().group(level).generator_count(), 0);
    const FgAbGroup& gp = ses.total().group(level);
    if (!(subgroup_lattice(gp, kergens) == subgroup_lattice(gp, imgens)))
      fail(1, "image of lim K differs from the kernel of lim G -> lim Q");
    set(1, JointStatus::Verified, "image of lim K equals the kernel of lim G -> lim Q");
  } else set(1, JointStatus::Consistent, "lim G -> lim Q is the restriction of the level maps");

  // lim Q: the cokernel of lim G -> lim Q embeds into lim1 K.
  if (limited(1) || limited(2) || limited(3)) set(2, JointStatus::Skipped, "depth-limited neighbour");
  else if (T[2].is_trivial()) set(2, JointStatus::Verified, "term is zero");
  else if (lg && lq) {
    const FgAbGroup& qp = ses.quot().group(level);
    bool onto = subgroup_lattice(qp, m1.matrix()) == subgroup_lattice(qp, lq->inclusion.matrix());
    if (T[3].is_trivial()) {
      if (!onto) fail(2, "lim G -> lim Q is not onto although lim1 K = 0");
      set(2, JointStatus::Verified, "lim G -> lim Q is onto and lim1 K = 0");
    } else if (onto) {
      set(2, JointStatus::Verified, "lim G -> lim Q is onto, so the kernel of delta is everything");
    } else {
      set(2, JointStatus::Consistent, "nonzero cokernel of lim G -> lim Q maps into lim1 K");
    }
  } else set(2, JointStatus::Consistent, "lim Q is not finitely generated; checked through the quotient identity");

  // lim1 K: image of delta equals the kernel of lim1 K -> lim1 G.
  if (limited(2) || limited(3) || limited(4)) set(3, JointStatus::Skipped, "depth-limited neighbour");
  else if (T[3].is_trivial()) set(3, JointStatus::Verified, "term is zero");
  else if (fg(2) && T[4].is_trivial()) fail(3, "a countable lim Q cannot cover an uncountable lim1 K");
  else set(3, JointStatus::Consistent, "delta covers the kernel of lim1 K -> lim1 G");

  // lim1 G
  if (limited(3) || limited(4) || limited(5)) set(4, JointStatus::Skipped, "depth-limited neighbour");
  else if (T[4].is_trivial()) set(4, JointStatus::Verified, "term is zero");
  else if (T[3].is_trivial() && T[5].is_trivial()) fail(4, "lim1 G is nonzero between zero terms");
  else set(4, JointStatus::Consistent, "lim1 G sits between lim1 K and lim1 Q");

  // lim1 Q: lim1 G -> lim1 Q is onto.
  if (limited(4) || limited(5)) set(5, JointStatus::Skipped, "depth-limited neighbour");
  else if (T[5].is_trivial()) set(5, JointStatus::Verified, "term is zero");
  else if (T[4].is_trivial()) fail(5, "lim1 Q is nonzero but lim1 G = 0");
  else set(5, JointStatus::Consistent, "lim1 G -> lim1 Q is onto at the level of cokernels");

  // lim Q / image(lim G) against lim1 K.
  if (T[2].tag() == SgTag::Completion && fg(1)) {
    StructuredGroup quotient = StructuredGroup::completion_quotient(T[2].endo());
    bool ranks = T[1].is_fg() && !T[1].is_trivial() &&
                 T[1].group().invariants().rank == T[2].rank();
    Comparison c = compare(quotient, T[3]);
    if (!ranks || c == Comparison::Different)
      rep.joints[2] = {names[2], JointStatus::Skipped, "quotient identity not confirmed"};
    rep.quotient_check = "lim Q / im(lim G) = " + T[2].render() + "/" + T[1].render() + " = " +
                         quotient.render() + " ~ lim1 K = " + T[3].render() + " (" + to_string(c) + ")";
  } else if (lg && lq) {
    FgAbGroup sq = lq->group;
    auto pre = solve(IntMatrix::hcat(lq->inclusion.matrix(), ses.quot().group(level).relations()),
                     m1.matrix());
    if (!pre) throw InternalInconsistency("lim G does not map into lim Q");
    IntMatrix in_sq = pre->block(0, 0, sq.generator_count(), pre->cols());
    FgAbGroup coker(sq.generator_count(), IntMatrix::hcat(sq.relations(), in_sq));
    StructuredGroup cq = StructuredGroup::fg(coker);
    rep.quotient_check = "lim Q / im(lim G) = " + cq.render() + " embeds into lim1 K = " + T[3].render();
    if (!coker.is_trivial() && T[3].is_trivial()) fail(2, "nonzero lim Q / im(lim G) with lim1 K = 0");
  } else {
    rep.quotient_check = "lim Q / im(lim G) not representable";
  }
  return rep;
}

}  // namespace shapelim
