#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shapelim/errors.hpp"
#include "shapelim/exactlat.hpp"
#include "shapelim/limits.hpp"
#include "shapelim/towers.hpp"

namespace shapelim {

// ---------------------------------------------------------------------------
// Level maps

/// f_i : A_i -> B_i, given explicitly below `prefix.size()` and by `tail`
/// from there on.
struct LevelMap {
  std::vector<Homomorphism> prefix;
  Homomorphism tail;

  Homomorphism at(std::size_t i) const { return i < prefix.size() ? prefix[i] : tail; }
};

struct LevelMapVerdict {
  bool symbolic = false;          // every level covered
  std::size_t checked_through = 0;
};

/// Commutativity B.bond(i) f_{i+1} = f_i A.bond(i). Periodic towers are
/// checked through the first level where both tails and the template apply.
inline LevelMapVerdict check_level_map(const Tower& a, const Tower& b, const LevelMap& f, std::size_t depth = 16) {
  const bool periodic = a.is_periodic() && b.is_periodic();
  const std::size_t last =
      periodic ? std::max({a.tail_start(), b.tail_start(), f.prefix.size()}) : depth;
  for (std::size_t i = 0; i <= last + 1; ++i) {
    Homomorphism fi = f.at(i);
    if (!(fi.source() == a.group(i)) || !(fi.target() == b.group(i)))
      throw DimensionMismatch("level map " + std::to_string(i) + " has the wrong source or target");
  }
  for (std::size_t i = 0; i <= last; ++i) {
    Homomorphism lhs = compose(b.bond(i), f.at(i + 1));
    Homomorphism rhs = compose(f.at(i), a.bond(i));
    if (!lhs.equals(rhs)) throw NotCommuting(i);
  }
  return {periodic, last};
}

// ---------------------------------------------------------------------------
// Interleavings

/// Constant tail maps between the subsequences k_A(i) = start_a + i gap_a and
/// k_B(i) = start_b + i gap_b: forward f_i : A_{k_A(i)} -> B_{k_B(i)} and
/// backward g_i : B_{k_B(i+1)} -> A_{k_A(i)} with g f = A-bond^gap_a and
/// f g = B-bond^gap_b. The two gaps are independent, so (Z, x4) and (Z, x2)
/// interleave with gaps (1, 2).
struct Interleaving {
  std::size_t gap_a = 1;
  std::size_t gap_b = 1;
  std::size_t start_a = 0;
  std::size_t start_b = 0;
  Homomorphism forward;
  Homomorphism backward;

  bool verify(const Tower& a, const Tower& b) const {
    Homomorphism alpha = power(a.periodic_data().tail_endo, gap_a);
    Homomorphism beta = power(b.periodic_data().tail_endo, gap_b);
    return compose(forward, alpha).equals(compose(beta, forward)) &&
           compose(alpha, backward).equals(compose(backward, beta)) &&
           compose(backward, forward).equals(alpha) && compose(forward, backward).equals(beta);
  }
};

namespace detail {

// Integer linear system with congruence rows: sum_k c_k x_k = r (mod m),
// m = 0 meaning equality.
class ModSystem {
 public:
  explicit ModSystem(std::size_t vars) : vars_(vars) {}

  void add(IntVector coeffs, Integer rhs, Integer mod) {
    if (mod == 1) return;
    rows_.push_back(std::move(coeffs));
    rhs_.push_back(std::move(rhs));
    mods_.push_back(std::move(mod));
  }

  IntMatrix stacked() const {
    std::size_t slack = 0;
    for (const auto& m : mods_) slack += m != 0;
    IntMatrix s(rows_.size(), vars_ + slack);
    std::size_t col = vars_;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (std::size_t k = 0; k < vars_; ++k) s(r, k) = rows_[r][k];
      if (mods_[r] != 0) s(r, col++) = mods_[r];
    }
    return s;
  }

  std::optional<IntVector> particular() const {
    if (rows_.empty()) return IntVector(vars_, Integer(0));
    auto x = solve(stacked(), rhs_);
    if (!x) return std::nullopt;
    return IntVector(x->begin(), x->begin() + static_cast<long>(vars_));
  }

  /// Basis of the homogeneous solutions, as columns.
  IntMatrix homogeneous() const {
    if (rows_.empty()) return IntMatrix::identity(vars_);
    IntMatrix k = kernel(stacked());
    return lattice_basis(k.block(0, 0, vars_, k.cols()));
  }

 private:
  std::size_t vars_;
  std::vector<IntVector> rows_;
  IntVector rhs_;
  std::vector<Integer> mods_;
};

inline std::vector<Integer> diagonal_moduli(const FgAbGroup& g) {
  std::vector<Integer> m(g.generator_count(), Integer(0));
  const IntMatrix& r = g.relations();
  for (std::size_t k = 0; k < r.cols(); ++k) m[k] = abs(r(k, k));
  return m;
}

// Entries of x reduced into [0, d_i) by row, for a map into moduli d.
inline IntMatrix reduce_rows(IntMatrix x, const std::vector<Integer>& d) {
  for (std::size_t i = 0; i < x.rows(); ++i)
    if (d[i] > 0)
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = mod_nonneg(x(i, j), d[i]);
  return x;
}

struct SimplifiedTail {
  Simplification s;
  Homomorphism endo;
  std::vector<Integer> mods;
};

inline SimplifiedTail simplified_tail(const Tower& t) {
  const auto& endo = t.periodic_data().tail_endo;
  SimplifiedTail st;
  st.s = endo.source().simplify();
  st.endo = Homomorphism(st.s.group, st.s.group, st.s.to * endo.matrix() * st.s.from);
  st.mods = diagonal_moduli(st.s.group);
  return st;
}

// Well-definedness rows for an (rows x cols) unknown map from a group with
// moduli `src` to one with moduli `tgt`; variables indexed i * cols + k.
inline void add_well_defined(ModSystem& sys, std::size_t rows, std::size_t cols, const std::vector<Integer>& src,
                             const std::vector<Integer>& tgt) {
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      if (src[k] == 0) continue;
      IntVector c(rows * cols, Integer(0));
      c[i * cols + k] = src[k];
      sys.add(c, 0, tgt[i]);
    }
}

inline IntMatrix unvec(const IntVector& v, std::size_t rows, std::size_t cols) {
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = v[i * cols + k];
  return m;
}

// Backward map g with g f = a and f g = b, if one exists.
inline std::optional<IntMatrix> solve_backward(const IntMatrix& f, const IntMatrix& a, const IntMatrix& b,
                                               const std::vector<Integer>& gm, const std::vector<Integer>& hm) {
  const std::size_t n = gm.size(), m = hm.size();
  ModSystem sys(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      IntVector c(n * m, Integer(0));
      for (std::size_t k = 0; k < m; ++k) c[i * m + k] = f(k, j);
      sys.add(c, a(i, j), gm[i]);
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      IntVector c(n * m, Integer(0));
      for (std::size_t k = 0; k < n; ++k) c[k * m + j] += f(i, k);
      sys.add(c, b(i, j), hm[i]);
    }
  add_well_defined(sys, n, m, hm, gm);
  auto x = sys.particular();
  if (!x) return std::nullopt;
  return reduce_rows(unvec(*x, n, m), gm);
}

}  // namespace detail

/// First certificate in lexicographic order of (gap_a, gap_b) in [1, depth]^2,
/// trying forward maps in a fixed order: identity, then the Hermite basis of
/// the intertwiners, then sums and differences of two basis vectors, then zero.
inline std::optional<Interleaving> find_interleaving(const Tower& a, const Tower& b, std::size_t depth) {
  if (!a.is_periodic() || !b.is_periodic()) throw Error("interleaving search needs eventually periodic towers");
  detail::SimplifiedTail ta = detail::simplified_tail(a), tb = detail::simplified_tail(b);
  const std::size_t n = ta.mods.size(), m = tb.mods.size();
  for (std::size_t sa = 1; sa <= depth; ++sa) {
    IntMatrix alpha = power(ta.endo, sa).matrix();
    for (std::size_t sb = 1; sb <= depth; ++sb) {
      IntMatrix beta = power(tb.endo, sb).matrix();
      // Intertwiners f alpha = beta f into H.
      detail::ModSystem sys(m * n);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          IntVector c(m * n, Integer(0));
          for (std::size_t k = 0; k < n; ++k) c[i * n + k] += alpha(k, j);
          for (std::size_t k = 0; k < m; ++k) c[k * n + j] -= beta(i, k);
          sys.add(c, 0, tb.mods[i]);
        }
      detail::add_well_defined(sys, m, n, ta.mods, tb.mods);
      IntMatrix basis = sys.homogeneous();
      std::vector<IntVector> candidates;
      if (m == n) {
        IntVector id(m * n, Integer(0));
        for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1;
        candidates.push_back(id);
      }
      for (std::size_t c = 0; c < basis.cols(); ++c) {
        candidates.push_back(basis.column(c));
        IntVector neg = basis.column(c);
        for (auto& x : neg) x = -x;
        candidates.push_back(neg);
      }
      for (std::size_t c = 0; c < basis.cols(); ++c)
        for (std::size_t d = c + 1; d < basis.cols(); ++d)
          for (int sign : {1, -1}) {
            IntVector v = basis.column(c);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += sign * basis(k, d);
            candidates.push_back(v);
          }
      candidates.emplace_back(m * n, Integer(0));
      for (const auto& cand : candidates) {
        IntMatrix f = detail::reduce_rows(detail::unvec(cand, m, n), tb.mods);
        Homomorphism fh;
        try {
          fh = Homomorphism(ta.s.group, tb.s.group, f);
        } catch (const IllDefined&) {
          continue;
        }
        auto g = detail::solve_backward(f, alpha, beta, ta.mods, tb.mods);
        if (!g) continue;
        // Back to the presentations of the input towers.
        const auto& pa = a.periodic_data();
        const auto& pb = b.periodic_data();
        Interleaving il;
        il.gap_a = sa;
        il.gap_b = sb;
        il.start_a = a.tail_start();
        il.start_b = b.tail_start();
        il.forward = Homomorphism(pa.tail_group, pb.tail_group, tb.s.from * f * ta.s.to);
        il.backward = Homomorphism(pb.tail_group, pa.tail_group, ta.s.from * (*g) * tb.s.to);
        if (!il.verify(a, b)) throw InternalInconsistency("interleaving certificate failed re-verification");
        return il;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Pro-isomorphism

struct ProIsoVerdict {
  enum class Kind { Isomorphic, NotIsomorphic, Undecided };
  Kind kind = Kind::Undecided;
  std::optional<Interleaving> witness;
  std::string reason;
};

inline std::string to_string(ProIsoVerdict::Kind k) {
  switch (k) {
    case ProIsoVerdict::Kind::Isomorphic: return "isomorphic";
    case ProIsoVerdict::Kind::NotIsomorphic: return "not_isomorphic";
    default: return "undecided";
  }
}

namespace detail {

inline bool nilpotent(const Homomorphism& e) {
  return power(e, stabilization_bound(e.source()) + 1).is_zero();
}

inline std::string prime_list(const std::vector<Integer>& ps) {
  std::string s = "{";
  for (std::size_t k = 0; k < ps.size(); ++k) s += (k ? ", " : "") + ps[k].get_str();
  return s + "}";
}

// Kernel and cokernel towers of a tail map are pro-zero.
inline bool level_map_is_pro_iso(const Tower& a, const Tower& b, const LevelMap& f) {
  const auto& alpha = a.periodic_data().tail_endo;
  const auto& beta = b.periodic_data().tail_endo;
  HomParts parts = hom_parts(f.tail);
  Restriction ker = restrict_endo(alpha, parts.kernel.matrix());
  const FgAbGroup& h = beta.source();
  FgAbGroup coker(h.generator_count(), IntMatrix::hcat(h.relations(), f.tail.matrix()));
  Homomorphism cobeta(coker, coker, beta.matrix());
  return nilpotent(ker.endo) && nilpotent(cobeta);
}

}  // namespace detail

/// NotIsomorphic from separating lim / lim^1 invariants; Isomorphic only from
/// a certificate (an interleaving, or a supplied level map whose kernel and
/// cokernel towers are pro-zero); Undecided otherwise.
inline ProIsoVerdict compare_invariants(const Tower& a, const Tower& b, const LimitOptions& opt = {},
                                        const LevelMap* map = nullptr, std::size_t interleave_depth = 4) {
  ProIsoVerdict v;
  StructuredGroup la = lim(a, opt), lb = lim(b, opt);
  StructuredGroup l1a = lim1(a, opt), l1b = lim1(b, opt);
  if (compare(la, lb) == Comparison::Different) {
    v.kind = ProIsoVerdict::Kind::NotIsomorphic;
    v.reason = "lim invariants " + la.render() + " vs " + lb.render();
    return v;
  }
  if (compare(l1a, l1b) == Comparison::Different) {
    v.kind = ProIsoVerdict::Kind::NotIsomorphic;
    if (l1a.tag() == SgTag::CompletionQuotient && l1b.tag() == SgTag::CompletionQuotient)
      v.reason = "lim1 prime spectra: missing_primes " + detail::prime_list(l1a.missing_primes()) + " vs " +
                 detail::prime_list(l1b.missing_primes());
    else
      v.reason = "lim1 invariants " + l1a.render() + " vs " + l1b.render();
    return v;
  }
  if (a.is_periodic() && b.is_periodic()) {
    if (auto il = find_interleaving(a, b, interleave_depth)) {
      v.kind = ProIsoVerdict::Kind::Isomorphic;
      v.reason = "interleaving with gaps (" + std::to_string(il->gap_a) + ", " + std::to_string(il->gap_b) + ")";
      v.witness = std::move(il);
      return v;
    }
    if (map) {
      check_level_map(a, b, *map, opt.depth);
      if (detail::level_map_is_pro_iso(a, b, *map)) {
        v.kind = ProIsoVerdict::Kind::Isomorphic;
        v.reason = "level map with pro-zero kernel and cokernel";
        return v;
      }
      v.reason = "level map has a kernel or cokernel that is not pro-zero";
      return v;
    }
  }
  v.reason = "lim and lim1 descriptions agree but no morphism certifies an isomorphism";
  return v;
}

}  // namespace shapelim
