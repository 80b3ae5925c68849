#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "shapelim/errors.hpp"
#include "shapelim/exactlat.hpp"
#include "shapelim/limits.hpp"
#include "shapelim/towers.hpp"

namespace shapelim {

/// Sorted, duplicate-free vertex list.
using Simplex = std::vector<std::size_t>;

// ---------------------------------------------------------------------------
// Complexes and maps

class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Closes `simplices` under faces; every vertex 0..vertices-1 is present.
  static SimplicialComplex from_simplices(std::size_t vertices, const std::vector<Simplex>& simplices) {
    std::set<Simplex> all;
    for (std::size_t v = 0; v < vertices; ++v) all.insert({v});
    std::vector<Simplex> stack;
    for (Simplex x : simplices) {
      std::sort(x.begin(), x.end());
      if (std::adjacent_find(x.begin(), x.end()) != x.end())
        throw IllDefined("simplex with a repeated vertex");
      if (x.empty()) continue;
      if (x.back() >= vertices) throw DimensionMismatch("simplex vertex out of range");
      stack.push_back(std::move(x));
    }
    while (!stack.empty()) {
      Simplex x = std::move(stack.back());
      stack.pop_back();
      if (!all.insert(x).second || x.size() == 1) continue;
      for (std::size_t i = 0; i < x.size(); ++i) {
        Simplex face = x;
        face.erase(face.begin() + static_cast<long>(i));
        if (!all.count(face)) stack.push_back(std::move(face));
      }
    }
    SimplicialComplex k;
    k.vertices_ = vertices;
    for (const auto& x : all) {
      const std::size_t d = x.size() - 1;
      if (k.by_dim_.size() <= d) k.by_dim_.resize(d + 1);
      k.index_[x] = k.by_dim_[d].size();
      k.by_dim_[d].push_back(x);
    }
    return k;
  }

  static SimplicialComplex point() { return from_simplices(1, {}); }

  static SimplicialComplex discrete(std::size_t n) { return from_simplices(n, {}); }

  /// Boundary of an n-gon, n >= 3, vertices 0..n-1 in cyclic order.
  static SimplicialComplex circle(std::size_t n) {
    if (n < 3) throw IllDefined("a simplicial circle needs at least 3 vertices");
    std::vector<Simplex> edges;
    for (std::size_t k = 0; k < n; ++k) edges.push_back({k, (k + 1) % n});
    return from_simplices(n, edges);
  }

  std::size_t vertex_count() const { return vertices_; }

  long dimension() const { return static_cast<long>(by_dim_.size()) - 1; }

  const std::vector<Simplex>& simplices(std::size_t dim) const {
    static const std::vector<Simplex> none;
    return dim < by_dim_.size() ? by_dim_[dim] : none;
  }

  std::size_t count(std::size_t dim) const { return simplices(dim).size(); }

  bool contains(const Simplex& s) const { return index_.count(s) != 0; }

  std::size_t index_of(const Simplex& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) throw IllDefined("simplex not in complex");
    return it->second;
  }

  long euler_characteristic() const {
    long chi = 0;
    for (std::size_t d = 0; d < by_dim_.size(); ++d)
      chi += (d % 2 == 0 ? 1 : -1) * static_cast<long>(by_dim_[d].size());
    return chi;
  }

  /// Boundary matrix of C_n -> C_{n-1}; for n = 0 the zero map to the empty
  /// group, or the augmentation when `reduced`.
  IntMatrix boundary(std::size_t n, bool reduced = false) const {
    if (n == 0) {
      IntMatrix e(reduced ? 1 : 0, count(0));
      if (reduced)
        for (std::size_t j = 0; j < count(0); ++j) e(0, j) = 1;
      return e;
    }
    IntMatrix d(count(n - 1), count(n));
    const auto& cells = simplices(n);
    for (std::size_t j = 0; j < cells.size(); ++j)
      for (std::size_t i = 0; i <= n; ++i) {
        Simplex face = cells[j];
        face.erase(face.begin() + static_cast<long>(i));
        d(index_of(face), j) = (i % 2 == 0) ? 1 : -1;
      }
    return d;
  }

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    return a.vertices_ == b.vertices_ && a.by_dim_ == b.by_dim_;
  }

 private:
  std::size_t vertices_ = 0;
  std::vector<std::vector<Simplex>> by_dim_;
  std::map<Simplex, std::size_t> index_;
};

class SimplicialMap {
 public:
  SimplicialMap() = default;

  SimplicialMap(SimplicialComplex source, SimplicialComplex target, std::vector<std::size_t> vertex_map)
      : source_(std::move(source)), target_(std::move(target)), map_(std::move(vertex_map)) {
    if (map_.size() != source_.vertex_count()) throw DimensionMismatch("vertex map size");
    for (auto v : map_)
      if (v >= target_.vertex_count()) throw DimensionMismatch("vertex image out of range");
    for (long d = 0; d <= source_.dimension(); ++d)
      for (const auto& s : source_.simplices(static_cast<std::size_t>(d)))
        if (!target_.contains(image(s))) throw IllDefined("vertex map does not send simplices to simplices");
  }

  static SimplicialMap identity(const SimplicialComplex& k) {
    std::vector<std::size_t> m(k.vertex_count());
    for (std::size_t v = 0; v < m.size(); ++v) m[v] = v;
    return SimplicialMap(k, k, m);
  }

  const SimplicialComplex& source() const { return source_; }
  const SimplicialComplex& target() const { return target_; }
  const std::vector<std::size_t>& vertex_map() const { return map_; }

  /// Image simplex (duplicates removed).
  Simplex image(const Simplex& s) const {
    Simplex out;
    for (auto v : s) out.push_back(map_[v]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Chain map in degree n; degenerate images go to zero.
  IntMatrix chain_map(std::size_t n) const {
    IntMatrix m(target_.count(n), source_.count(n));
    const auto& cells = source_.simplices(n);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      std::vector<std::size_t> w;
      for (auto v : cells[j]) w.push_back(map_[v]);
      // Sign of the sorting permutation, by counting inversions.
      int inversions = 0;
      bool degenerate = false;
      for (std::size_t a = 0; a < w.size(); ++a)
        for (std::size_t b = a + 1; b < w.size(); ++b) {
          if (w[a] == w[b]) degenerate = true;
          if (w[a] > w[b]) ++inversions;
        }
      if (degenerate) continue;
      std::sort(w.begin(), w.end());
      m(target_.index_of(w), j) = inversions % 2 == 0 ? 1 : -1;
    }
    return m;
  }

 private:
  SimplicialComplex source_;
  SimplicialComplex target_;
  std::vector<std::size_t> map_;
};

inline SimplicialMap compose(const SimplicialMap& g, const SimplicialMap& f) {
  if (!(f.target() == g.source())) throw DimensionMismatch("simplicial maps do not compose");
  std::vector<std::size_t> m;
  for (auto v : f.vertex_map()) m.push_back(g.vertex_map()[v]);
  return SimplicialMap(f.source(), g.target(), m);
}

// ---------------------------------------------------------------------------
// Homology

/// Homology of a chain complex at C: ker(out) / im(in), in simplified
/// presentation. `cycles` is a basis of ker(out); `to` maps coordinates in
/// that basis to group generators.
struct ChainHomology {
  FgAbGroup group;
  IntMatrix cycles;
  IntMatrix to;
  IntMatrix from;

  /// Class of a cycle z, in group generators.
  IntVector class_of(const IntVector& z) const {
    auto c = solve(cycles, z);
    if (!c) throw IllDefined("chain is not a cycle");
    return to.apply(*c);
  }

  /// Representative cycles of the group generators, as columns.
  IntMatrix representatives() const { return cycles * from; }
};

inline ChainHomology chain_homology(const IntMatrix& out, const IntMatrix& in) {
  if (out.cols() != in.rows()) throw DimensionMismatch("chain complex dimensions");
  ChainHomology h;
  h.cycles = kernel(out);
  auto rel = solve(h.cycles, in);
  if (!rel) throw InternalInconsistency("boundaries are not cycles");
  FgAbGroup raw(h.cycles.cols(), *rel);
  Simplification s = raw.simplify();
  h.group = s.group;
  h.to = s.to;
  h.from = s.from;
  return h;
}

inline ChainHomology homology_data(const SimplicialComplex& k, std::size_t n, bool reduced = false) {
  return chain_homology(k.boundary(n, reduced && n == 0), k.boundary(n + 1));
}

/// Cohomology H^n: ker(d^T_{n+1}) / im(d^T_n).
inline ChainHomology cohomology_data(const SimplicialComplex& k, std::size_t n) {
  IntMatrix in = n == 0 ? IntMatrix(k.count(0), 0) : k.boundary(n).transpose();
  return chain_homology(k.boundary(n + 1).transpose(), in);
}

inline FgAbGroup simplicial_homology(const SimplicialComplex& k, std::size_t n, bool reduced = false) {
  return homology_data(k, n, reduced).group;
}

namespace detail {

// Smith invariants of an integer matrix with mostly unit entries: eliminate
// on +-1 pivots sparsely, then run the dense form on what remains.
struct SparseInvariants {
  std::size_t rank = 0;
  std::vector<Integer> torsion;  // entries > 1 of the diagonal
};

inline SparseInvariants sparse_smith(const IntMatrix& m) {
  using Col = std::map<std::size_t, Integer>;
  std::vector<Col> cols(m.cols());
  std::vector<std::set<std::size_t>> row_cols(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0) {
        cols[j][i] = m(i, j);
        row_cols[i].insert(j);
      }
  std::vector<bool> alive(m.cols(), true);
  SparseInvariants out;
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (!alive[p]) continue;
      // Prefer the unit entry whose row is shortest.
      std::size_t best_row = m.rows();
      for (const auto& [i, v] : cols[p])
        if ((v == 1 || v == -1) && (best_row == m.rows() || row_cols[i].size() < row_cols[best_row].size()))
          best_row = i;
      if (best_row == m.rows()) continue;
      const std::size_t r = best_row;
      const Integer pivot = cols[p][r];
      std::vector<std::size_t> others(row_cols[r].begin(), row_cols[r].end());
      for (std::size_t j : others) {
        if (j == p) continue;
        Integer q = cols[j][r] * pivot;  // pivot is its own inverse
        for (const auto& [i, v] : cols[p]) {
          Integer nv = cols[j][i] - q * v;
          if (nv == 0) {
            cols[j].erase(i);
            row_cols[i].erase(j);
          } else {
            cols[j][i] = nv;
            row_cols[i].insert(j);
          }
        }
      }
      // Row r is now zero outside column p; drop both.
      for (const auto& [i, v] : cols[p]) row_cols[i].erase(p);
      cols[p].clear();
      alive[p] = false;
      ++out.rank;
      progress = true;
    }
  }
  std::vector<std::size_t> rows_left, cols_left;
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (!row_cols[i].empty()) rows_left.push_back(i);
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (alive[j] && !cols[j].empty()) cols_left.push_back(j);
  if (!rows_left.empty()) {
    std::map<std::size_t, std::size_t> rpos;
    for (std::size_t k = 0; k < rows_left.size(); ++k) rpos[rows_left[k]] = k;
    IntMatrix rest(rows_left.size(), cols_left.size());
    for (std::size_t k = 0; k < cols_left.size(); ++k)
      for (const auto& [i, v] : cols[cols_left[k]]) rest(rpos[i], k) = v;
    SmithForm s = snf(rest);
    out.rank += s.rank;
    for (const auto& d : s.diagonal)
      if (abs(d) > 1) out.torsion.push_back(abs(d));
  }
  return out;
}

}  // namespace detail

/// Isomorphism type of H_n(K) from ranks and Smith invariants of the
/// boundary matrices alone. Independent of the cycle-basis route.
inline SmithInvariants homology_type(const SimplicialComplex& k, std::size_t n, bool reduced = false) {
  auto out = detail::sparse_smith(k.boundary(n, reduced && n == 0));
  auto in = detail::sparse_smith(k.boundary(n + 1));
  SmithInvariants inv;
  inv.rank = k.count(n) - out.rank - in.rank;
  inv.torsion = in.torsion;
  std::sort(inv.torsion.begin(), inv.torsion.end());
  return inv;
}

inline Homomorphism induced_hom(const SimplicialMap& f, std::size_t n, bool reduced = false) {
  ChainHomology hs = homology_data(f.source(), n, reduced);
  ChainHomology ht = homology_data(f.target(), n, reduced);
  IntMatrix images = f.chain_map(n) * hs.representatives();
  IntMatrix m(ht.group.generator_count(), hs.group.generator_count());
  for (std::size_t j = 0; j < images.cols(); ++j) {
    IntVector c = ht.class_of(images.column(j));
    for (std::size_t i = 0; i < c.size(); ++i) m(i, j) = c[i];
  }
  return Homomorphism(hs.group, ht.group, m);
}

/// Contravariant map H^n(target) -> H^n(source).
inline Homomorphism induced_cohom(const SimplicialMap& f, std::size_t n) {
  ChainHomology hs = cohomology_data(f.source(), n);
  ChainHomology ht = cohomology_data(f.target(), n);
  IntMatrix images = f.chain_map(n).transpose() * ht.representatives();
  IntMatrix m(hs.group.generator_count(), ht.group.generator_count());
  for (std::size_t j = 0; j < images.cols(); ++j) {
    IntVector c = hs.class_of(images.column(j));
    for (std::size_t i = 0; i < c.size(); ++i) m(i, j) = c[i];
  }
  return Homomorphism(ht.group, hs.group, m);
}

namespace detail {

inline Homomorphism inverse_iso(const Homomorphism& h) {
  if (!h.is_isomorphism()) throw IllDefined("retraction does not induce an isomorphism");
  const FgAbGroup& t = h.target();
  auto sol = solve(IntMatrix::hcat(h.matrix(), t.relations()), IntMatrix::identity(t.generator_count()));
  if (!sol) throw InternalInconsistency("isomorphism without an inverse");
  return Homomorphism(t, h.source(), sol->block(0, 0, h.source().generator_count(), t.generator_count()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Towers of complexes

/// Bond P_{i+1} -> P_i realised through a subdivision: `retract` : Sd -> P_{i+1}
/// is a simplicial approximation of the identity (a homotopy equivalence) and
/// `down` : Sd -> P_i carries the geometry.
struct SubdividedBond {
  SimplicialComplex sd;
  SimplicialMap down;
  SimplicialMap retract;

  static SubdividedBond plain(const SimplicialMap& f) {
    return {f.source(), f, SimplicialMap::identity(f.source())};
  }

  const SimplicialComplex& upper() const { return retract.target(); }
  const SimplicialComplex& lower() const { return down.target(); }
};

inline Homomorphism induced_bond(const SubdividedBond& b, std::size_t n, bool reduced = false) {
  return compose(induced_hom(b.down, n, reduced), detail::inverse_iso(induced_hom(b.retract, n, reduced)));
}

/// Contravariant bond H^n(P_i) -> H^n(P_{i+1}).
inline Homomorphism induced_cobond(const SubdividedBond& b, std::size_t n) {
  return compose(detail::inverse_iso(induced_cohom(b.retract, n)), induced_cohom(b.down, n));
}

struct PeriodicComplexes {
  std::vector<SimplicialComplex> prefix;
  std::vector<SubdividedBond> prefix_bonds;  // level i+1 -> i, i + 1 < prefix.size()
  SimplicialComplex tail;
  SubdividedBond tail_bond;                  // tail -> tail
  std::optional<SubdividedBond> splice;      // tail -> last prefix level
};

struct StreamedComplexes {
  std::string family;
  std::vector<Integer> params;
};

class SimplicialTower {
 public:
  SimplicialTower() = default;

  static SimplicialTower periodic(PeriodicComplexes data) {
    const std::size_t n = data.prefix.size();
    if (data.prefix_bonds.size() + 1 != std::max<std::size_t>(n, 1))
      throw DimensionMismatch("prefix bonds must connect consecutive prefix levels");
    auto check = [](const SubdividedBond& b, const SimplicialComplex& up, const SimplicialComplex& low) {
      if (!(b.upper() == up) || !(b.lower() == low) || !(b.down.source() == b.sd) || !(b.retract.source() == b.sd))
        throw DimensionMismatch("bond does not connect the given levels");
    };
    for (std::size_t i = 0; i + 1 < n; ++i) check(data.prefix_bonds[i], data.prefix[i + 1], data.prefix[i]);
    check(data.tail_bond, data.tail, data.tail);
    if (n > 0) {
      if (!data.splice) throw DimensionMismatch("prefix needs a splice bond from the tail");
      check(*data.splice, data.tail, data.prefix.back());
    }
    SimplicialTower t;
    t.data_ = std::move(data);
    return t;
  }

  static SimplicialTower constant(const SimplicialComplex& k) {
    return periodic({{}, {}, k, SubdividedBond::plain(SimplicialMap::identity(k)), std::nullopt});
  }

  static SimplicialTower streamed(const std::string& family, std::vector<Integer> params);

  bool is_periodic() const { return std::holds_alternative<PeriodicComplexes>(data_); }
  const PeriodicComplexes& periodic_data() const { return std::get<PeriodicComplexes>(data_); }
  const StreamedComplexes& streamed_data() const { return std::get<StreamedComplexes>(data_); }

  SimplicialComplex level(std::size_t i) const;
  SubdividedBond bond(std::size_t i) const;  // level i+1 -> level i

 private:
  std::variant<PeriodicComplexes, StreamedComplexes> data_;
};

namespace detail {

// Wedge of circles of the given lengths at vertex 0. Circle c occupies
// vertices offset_c + 1 .. offset_c + len_c - 1; position 0 is the base point.
struct Wedge {
  std::vector<std::size_t> lengths;
  std::vector<std::size_t> offsets;
  std::size_t vertices = 1;

  explicit Wedge(std::vector<std::size_t> lens) : lengths(std::move(lens)) {
    for (auto l : lengths) {
      offsets.push_back(vertices - 1);
      vertices += l - 1;
    }
  }

  std::size_t vertex(std::size_t c, std::size_t pos) const {
    pos %= lengths[c];
    return pos == 0 ? 0 : offsets[c] + pos;
  }

  SimplicialComplex complex() const {
    std::vector<Simplex> edges;
    for (std::size_t c = 0; c < lengths.size(); ++c)
      for (std::size_t k = 0; k < lengths[c]; ++k) edges.push_back({vertex(c, k), vertex(c, k + 1)});
    return SimplicialComplex::from_simplices(vertices, edges);
  }
};

inline Wedge triangles(std::size_t j) { return Wedge(std::vector<std::size_t>(j, 3)); }

// Bond of the cluster model: the first j circles wind `w` times, circle j+1
// collapses. With w = 1 this is the Hawaiian projection.
inline SubdividedBond winding_wedge_bond(std::size_t j, std::size_t w) {
  std::vector<std::size_t> lens(j, 3 * w);
  lens.push_back(3);
  Wedge sd(lens), up = triangles(j + 1), low = triangles(j);
  std::vector<std::size_t> down(sd.vertices), retract(sd.vertices);
  for (std::size_t c = 0; c <= j; ++c)
    for (std::size_t k = 0; k < lens[c]; ++k) {
      std::size_t v = sd.vertex(c, k);
      down[v] = c < j ? low.vertex(c, k % 3) : 0;
      retract[v] = up.vertex(c, c < j ? k / w : k);
    }
  SimplicialComplex s = sd.complex();
  if (w == 1) return SubdividedBond::plain(SimplicialMap(up.complex(), low.complex(), down));
  return {s, SimplicialMap(s, low.complex(), down), SimplicialMap(s, up.complex(), retract)};
}

}  // namespace detail

inline SimplicialTower SimplicialTower::streamed(const std::string& family, std::vector<Integer> params) {
  if (family == "hawaiian" || family == "null_sequence") {
    if (!params.empty()) throw DimensionMismatch(family + " takes no parameters");
  } else if (family == "cluster_solenoids") {
    if (params.size() != 1) throw DimensionMismatch("cluster_solenoids takes one parameter");
    if (params[0] < 2) throw IllDefined("cluster_solenoids needs p >= 2");
  } else {
    throw UnknownExample("unknown simplicial family: " + family);
  }
  SimplicialTower t;
  t.data_ = StreamedComplexes{family, std::move(params)};
  return t;
}

inline SimplicialComplex SimplicialTower::level(std::size_t i) const {
  if (is_periodic()) {
    const auto& p = periodic_data();
    return i < p.prefix.size() ? p.prefix[i] : p.tail;
  }
  const auto& s = streamed_data();
  if (s.family == "null_sequence") return SimplicialComplex::discrete(i + 1);
  return detail::triangles(i).complex();
}

inline SubdividedBond SimplicialTower::bond(std::size_t i) const {
  if (is_periodic()) {
    const auto& p = periodic_data();
    const std::size_t n = p.prefix.size();
    if (i + 1 < n) return p.prefix_bonds[i];
    if (i + 1 == n) return *p.splice;
    return p.tail_bond;
  }
  const auto& s = streamed_data();
  if (s.family == "null_sequence") {
    std::vector<std::size_t> m(i + 2);
    for (std::size_t k = 0; k <= i; ++k) m[k] = k;
    m[i + 1] = 0;
    return SubdividedBond::plain(SimplicialMap(level(i + 1), level(i), m));
  }
  std::size_t w = s.family == "hawaiian" ? 1 : s.params[0].get_ui();
  return detail::winding_wedge_bond(i, w);
}

/// Builders: solenoid(p), hawaiian, cluster_solenoids(p), null_sequence.
inline SimplicialTower make_example(const std::string& name, const std::vector<Integer>& params = {}) {
  if (name == "solenoid") {
    if (params.size() != 1) throw DimensionMismatch("solenoid takes one parameter");
    const Integer& p = params[0];
    if (abs(p) < 2) throw IllDefined("solenoid needs |p| >= 2");
    const std::size_t w = Integer(abs(p)).get_ui();
    SimplicialComplex c3 = SimplicialComplex::circle(3);
    SimplicialComplex sd = SimplicialComplex::circle(3 * w);
    std::vector<std::size_t> down(3 * w), retract(3 * w);
    for (std::size_t k = 0; k < 3 * w; ++k) {
      down[k] = p > 0 ? k % 3 : (3 - k % 3) % 3;
      retract[k] = k / w;
    }
    SubdividedBond b{sd, SimplicialMap(sd, c3, down), SimplicialMap(sd, c3, retract)};
    return SimplicialTower::periodic({{}, {}, c3, b, std::nullopt});
  }
  if (name == "hawaiian" || name == "null_sequence" || name == "cluster_solenoids")
    return SimplicialTower::streamed(name, params);
  throw UnknownExample("unknown example: " + name);
}

inline std::vector<std::string> example_names() {
  return {"cluster_solenoids", "hawaiian", "null_sequence", "solenoid"};
}

/// Tower of H_n of the levels. Streamed families map to the registered
/// closed-form group towers in the cycle bases used by the builders.
inline Tower homology_tower(const SimplicialTower& st, std::size_t n, bool reduced = false) {
  if (!st.is_periodic()) {
    const auto& s = st.streamed_data();
    FgAbGroup zero = FgAbGroup::free(0);
    if (s.family == "null_sequence") {
      if (n == 0) return make_streamed(reduced ? "hawaiian_h1" : "finite_sets");
      return Tower::constant(zero);
    }
    if (n == 0) return Tower::constant(reduced ? zero : FgAbGroup::free(1));
    if (n == 1) {
      if (s.family == "hawaiian") return make_streamed("hawaiian_h1");
      return make_streamed("cluster_h1", s.params);
    }
    return Tower::constant(zero);
  }
  const auto& p = st.periodic_data();
  std::vector<FgAbGroup> groups;
  for (const auto& k : p.prefix) groups.push_back(simplicial_homology(k, n, reduced));
  std::vector<Homomorphism> bonds;
  for (const auto& b : p.prefix_bonds) bonds.push_back(induced_bond(b, n, reduced));
  std::optional<Homomorphism> splice;
  if (p.splice) splice = induced_bond(*p.splice, n, reduced);
  Homomorphism endo = induced_bond(p.tail_bond, n, reduced);
  return Tower::periodic(std::move(groups), std::move(bonds), endo.source(), endo, splice);
}

// ---------------------------------------------------------------------------
// Steenrod homology

enum class Splits { Yes, Unknown };

struct SteenrodDescriptor {
  std::size_t degree = 0;
  StructuredGroup lim1_part;  // lim^1 H_{n+1}
  StructuredGroup lim_part;   // lim H_n
  Splits splits = Splits::Unknown;
  bool reduced = false;

  /// lim (+) lim^1 when the Milnor sequence splits.
  std::optional<StructuredGroup> middle() const {
    if (splits != Splits::Yes) return std::nullopt;
    return StructuredGroup::product_of({lim_part, lim1_part}, false);
  }
};

namespace detail {

inline Splits splitting(const StructuredGroup& lim_part, const StructuredGroup& lim1_part) {
  if (lim1_part.is_trivial()) return Splits::Yes;
  if (lim_part.is_trivial()) return Splits::Yes;
  if (lim_part.tag() == SgTag::FG && lim_part.group().invariants().is_free()) return Splits::Yes;
  return Splits::Unknown;
}

}  // namespace detail

inline SteenrodDescriptor steenrod(const SimplicialTower& st, std::size_t n, bool reduced = false,
                                   const LimitOptions& opt = {}) {
  SteenrodDescriptor d;
  d.degree = n;
  d.reduced = reduced && n == 0;
  d.lim1_part = lim1(homology_tower(st, n + 1), opt);
  d.lim_part = lim(homology_tower(st, n, d.reduced), opt);
  d.splits = detail::splitting(d.lim_part, d.lim1_part);
  return d;
}

/// Cluster axiom: reduced homology of a shrinking wedge is the product of
/// the reduced parts (one period of a countable repetition when `countable`).
/// Unreduced degree 0 adds a copy of Z for the base point.
inline SteenrodDescriptor cluster(const std::vector<SteenrodDescriptor>& parts, bool countable,
                                  bool reduced = true) {
  if (parts.empty()) throw DimensionMismatch("cluster of no parts");
  const std::size_t n = parts.front().degree;
  std::vector<StructuredGroup> l1, l0;
  for (const auto& p : parts) {
    if (p.degree != n) throw DimensionMismatch("cluster parts of different degrees");
    if (n == 0 && !p.reduced) throw IllDefined("cluster parts must be reduced");
    l1.push_back(p.lim1_part);
    l0.push_back(p.lim_part);
  }
  SteenrodDescriptor d;
  d.degree = n;
  d.reduced = reduced || n != 0;
  d.lim1_part = StructuredGroup::product_of(l1, countable);
  d.lim_part = StructuredGroup::product_of(l0, countable);
  if (!d.reduced) d.lim_part = StructuredGroup::product_of({StructuredGroup::fg(FgAbGroup::free(1)), d.lim_part}, false);
  d.splits = detail::splitting(d.lim_part, d.lim1_part);
  return d;
}

// ---------------------------------------------------------------------------
// Cech cohomology

/// colim H^n(P_i). For a periodic tail (C, A): with K the eventual kernel,
/// the colimit is C/K if A is invertible there, else (C/K)[1/A].
inline StructuredGroup cech_cohomology(const SimplicialTower& st, std::size_t n, const LimitOptions& opt = {}) {
  if (!st.is_periodic())
    return StructuredGroup::depth_limited("colimit of a streamed tower", opt.depth);
  const auto& p = st.periodic_data();
  Homomorphism a = induced_cobond(p.tail_bond, n);
  const FgAbGroup& c = a.source();
  const std::size_t m = kernel_stabilization(a);
  IntMatrix k = hom_parts(power(a, m)).kernel_lattice.basis();
  FgAbGroup q(c.generator_count(), IntMatrix::hcat(c.relations(), k));
  Simplification s = q.simplify();
  Homomorphism induced(s.group, s.group, s.to * a.matrix() * s.from);
  if (induced.is_isomorphism()) return StructuredGroup::fg(s.group);
  // Torsion is finite and A is injective there, hence bijective; only the
  // free block is inverted.
  const std::size_t r = s.group.invariants().rank;
  const std::size_t t = s.group.generator_count() - r;
  return StructuredGroup::localization(s.group, induced.matrix().block(t, t, r, r));
}

// ---------------------------------------------------------------------------
// Finite telescopes

struct Telescope {
  SimplicialComplex complex;
  std::vector<SimplicialMap> levels;  // P_i -> telescope, i = 0..m
};

namespace detail {

// Cohen's cylinder of f : S -> L on the barycentric subdivision of S:
// simplices {b(s_0), ..., b(s_k)} u t for chains s_0 < ... < s_k and t a
// face of f(s_0). `bary` and `lower` give global vertex ids.
inline void cohen_cylinder(const SimplicialMap& f, const std::function<std::size_t(const Simplex&)>& bary,
                           const std::function<std::size_t(std::size_t)>& lower, std::vector<Simplex>& out) {
  const SimplicialComplex& s = f.source();
  std::vector<Simplex> all;
  for (long d = 0; d <= s.dimension(); ++d)
    for (const auto& x : s.simplices(static_cast<std::size_t>(d))) all.push_back(x);
  auto proper_face = [](const Simplex& a, const Simplex& b) {
    return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  std::vector<std::size_t> chain;
  std::function<void()> extend = [&] {
    Simplex cell;
    for (auto idx : chain) cell.push_back(bary(all[idx]));
    for (auto w : f.image(all[chain.front()])) cell.push_back(lower(w));
    std::sort(cell.begin(), cell.end());
    out.push_back(cell);
    for (std::size_t j = 0; j < all.size(); ++j)
      if (proper_face(all[chain.back()], all[j])) {
        chain.push_back(j);
        extend();
        chain.pop_back();
      }
  };
  for (std::size_t i = 0; i < all.size(); ++i) {
    chain = {i};
    extend();
  }
}

}  // namespace detail

/// P_{[0,m]}: consecutive levels joined by M(down_i) and M(retract_i) glued
/// along sd(Sd_i). Deformation retracts to P_0.
inline Telescope telescope(const SimplicialTower& st, std::size_t m) {
  std::map<std::tuple<char, std::size_t, Simplex>, std::size_t> ids;
  auto id = [&](char kind, std::size_t stage, const Simplex& key) {
    auto k = std::make_tuple(kind, stage, key);
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    std::size_t v = ids.size();
    ids.emplace(k, v);
    return v;
  };
  std::vector<SimplicialComplex> levels;
  for (std::size_t i = 0; i <= m; ++i) levels.push_back(st.level(i));
  std::vector<Simplex> cells;
  for (std::size_t i = 0; i <= m; ++i)
    for (long d = 0; d <= levels[i].dimension(); ++d)
      for (const auto& s : levels[i].simplices(static_cast<std::size_t>(d))) {
        Simplex c;
        for (auto v : s) c.push_back(id('P', i, {v}));
        std::sort(c.begin(), c.end());
        cells.push_back(c);
      }
  for (std::size_t i = 0; i < m; ++i) {
    SubdividedBond b = st.bond(i);
    auto bary = [&](const Simplex& s) { return id('B', i, s); };
    detail::cohen_cylinder(b.down, bary, [&](std::size_t v) { return id('P', i, {v}); }, cells);
    detail::cohen_cylinder(b.retract, bary, [&](std::size_t v) { return id('P', i + 1, {v}); }, cells);
  }
  Telescope t;
  t.complex = SimplicialComplex::from_simplices(ids.size(), cells);
  for (std::size_t i = 0; i <= m; ++i) {
    std::vector<std::size_t> vm;
    for (std::size_t v = 0; v < levels[i].vertex_count(); ++v) vm.push_back(id('P', i, {v}));
    t.levels.emplace_back(levels[i], t.complex, vm);
  }
  return t;
}

}  // namespace shapelim
