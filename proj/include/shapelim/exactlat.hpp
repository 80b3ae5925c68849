#pragma once

// Finitely generated abelian groups, homomorphisms between presentations and
// sublattices of Z^n. Everything is exact; relation lattices are compared via
// canonical Hermite forms.

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shapelim/matrix.hpp"
#include "shapelim/normal_form.hpp"

namespace shapelim {

// ---------------------------------------------------------------------------
// Lattices

/// Sublattice of Z^n stored by its canonical Hermite basis.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(std::size_t ambient) : ambient_(ambient), basis_(ambient, 0) {}

  static Lattice from_generators(const IntMatrix& gens) {
    Lattice l(gens.rows());
    l.basis_ = lattice_basis(gens);
    for (std::size_t c = 0; c < l.basis_.cols(); ++c) {
      std::size_t p = 0;
      while (l.basis_(p, c) == 0) ++p;
      l.pivots_.push_back(p);
    }
    return l;
  }

  static Lattice full(std::size_t n) {
    return from_generators(IntMatrix::identity(n));
  }

  std::size_t ambient() const { return ambient_; }
  std::size_t rank() const { return basis_.cols(); }
  const IntMatrix& basis() const { return basis_; }

  bool contains(const IntVector& v) const {
    if (v.size() != ambient_) throw DimensionMismatch("lattice membership");
    if (rank() == 0) {
      for (const auto& x : v)
        if (x != 0) return false;
      return true;
    }
    // Echelon basis: peel pivots top-down.
    IntVector r = v;
    for (std::size_t c = 0; c < pivots_.size(); ++c) {
      std::size_t p = pivots_[c];
      if (!divides(basis_(p, c), r[p])) return false;
      Integer q;
      mpz_divexact(q.get_mpz_t(), r[p].get_mpz_t(), basis_(p, c).get_mpz_t());
      for (std::size_t i = 0; i < ambient_; ++i) r[i] -= q * basis_(i, c);
    }
    for (const auto& x : r)
      if (x != 0) return false;
    return true;
  }

  bool contains(const Lattice& other) const {
    for (std::size_t j = 0; j < other.rank(); ++j)
      if (!contains(other.basis_.column(j))) return false;
    return true;
  }

  Lattice sum(const Lattice& other) const {
    return from_generators(IntMatrix::hcat(basis_, other.basis_));
  }

  Lattice intersection(const Lattice& other) const {
    if (ambient_ != other.ambient_) throw DimensionMismatch("intersection");
    if (rank() == 0 || other.rank() == 0) return Lattice(ambient_);
    IntMatrix stacked = IntMatrix::hcat(basis_, -other.basis_);
    IntMatrix k = kernel(stacked);
    IntMatrix top = k.block(0, 0, rank(), k.cols());
    return from_generators(basis_ * top);
  }

  // (L^perp)^perp, the smallest saturated lattice containing L.
  Lattice saturation() const {
    if (rank() == 0) return *this;
    IntMatrix perp = kernel(basis_.transpose());
    if (perp.cols() == 0) return full(ambient_);
    return from_generators(kernel(perp.transpose()));
  }

  /// Index of this lattice in `outer`; nullopt stands for infinite index.
  std::optional<Integer> index_in(const Lattice& outer) const {
    if (!outer.contains(*this))
      throw IndexUndefined("lattice is not contained in the outer lattice");
    if (rank() != outer.rank()) return std::nullopt;
    if (rank() == 0) return Integer(1);
    auto coords = shapelim::solve(outer.basis_, basis_);
    return abs(determinant(*coords));
  }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }
  friend bool operator!=(const Lattice& a, const Lattice& b) { return !(a == b); }

 private:
  std::size_t ambient_ = 0;
  IntMatrix basis_;
  std::vector<std::size_t> pivots_;
};

struct LatticeOpsResult {
  Lattice intersection;
  Lattice saturation;
  std::optional<Integer> index;  // nullopt: infinite
};

/// Intersection of the two lattices, saturation of the first, and index of
/// the first inside the second.
inline LatticeOpsResult lattice_ops(const IntMatrix& first, const IntMatrix& second) {
  if (first.rows() != second.rows())
    throw DimensionMismatch("lattices live in different ambient ranks");
  Lattice a = Lattice::from_generators(first);
  Lattice b = Lattice::from_generators(second);
  return {a.intersection(b), a.saturation(), a.index_in(b)};
}

// ---------------------------------------------------------------------------
// Groups

struct SmithInvariants {
  std::size_t rank = 0;
  std::vector<Integer> torsion;  // d_1 | d_2 | ..., each >= 2

  bool is_trivial() const { return rank == 0 && torsion.empty(); }
  bool is_finite() const { return rank == 0; }
  bool is_free() const { return torsion.empty(); }

  Integer torsion_order() const {
    Integer o = 1;
    for (const auto& d : torsion) o *= d;
    return o;
  }

  friend bool operator==(const SmithInvariants& a, const SmithInvariants& b) {
    return a.rank == b.rank && a.torsion == b.torsion;
  }
  friend bool operator!=(const SmithInvariants& a, const SmithInvariants& b) {
    return !(a == b);
  }

  // "Z^2 (+) Z/2 (+) Z/6"; the trivial group renders as "0".
  std::string to_string() const {
    std::vector<std::string> parts;
    if (rank == 1) parts.emplace_back("Z");
    if (rank > 1) parts.push_back("Z^" + std::to_string(rank));
    for (const auto& d : torsion) parts.push_back("Z/" + d.get_str());
    if (parts.empty()) return "0";
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += " (+) " + parts[i];
    return s;
  }
};

class FgAbGroup;

/// An isomorphic copy of a group on its nontrivial Smith coordinates.
struct Simplification;

/// Z^n modulo the column span of the relation matrix.
class FgAbGroup {
 public:
  FgAbGroup() : FgAbGroup(0, IntMatrix(0, 0)) {}

  FgAbGroup(std::size_t generators, const IntMatrix& relations)
      : generators_(generators), relations_(relations) {
    if (relations.rows() != generators)
      throw DimensionMismatch("relation matrix must have one row per generator");
    SmithForm s = snf(relations);
    coords_ = s.U;
    coords_inverse_ = s.Uinv;
    moduli_.assign(generators, Integer(0));
    for (std::size_t k = 0; k < s.rank; ++k) moduli_[k] = s.diagonal[k];
    for (std::size_t k = 0; k < generators; ++k) {
      if (moduli_[k] == 0)
        ++invariants_.rank;
      else if (moduli_[k] != 1)
        invariants_.torsion.push_back(moduli_[k]);
    }
  }

  static FgAbGroup present(std::size_t generators, const IntMatrix& relations) {
    return FgAbGroup(generators, relations);
  }

  static FgAbGroup free(std::size_t rank) {
    return FgAbGroup(rank, IntMatrix(rank, 0));
  }

  static FgAbGroup cyclic(const Integer& order) {
    IntMatrix r(1, 1);
    r(0, 0) = order;
    return FgAbGroup(1, r);
  }

  // Torsion generators first, then free ones.
  static FgAbGroup from_invariants(const SmithInvariants& inv) {
    std::size_t t = inv.torsion.size();
    std::size_t n = t + inv.rank;
    IntMatrix r(n, t);
    for (std::size_t k = 0; k < t; ++k) r(k, k) = inv.torsion[k];
    return FgAbGroup(n, r);
  }

  static FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b) {
    return FgAbGroup(a.generators_ + b.generators_,
                     IntMatrix::block_diagonal(a.relations_, b.relations_));
  }

  std::size_t generator_count() const { return generators_; }
  const IntMatrix& relations() const { return relations_; }
  const SmithInvariants& invariants() const { return invariants_; }

  // Per Smith coordinate: 0 free, 1 trivial, d >= 2 cyclic of order d.
  const std::vector<Integer>& moduli() const { return moduli_; }
  const IntMatrix& coordinate_map() const { return coords_; }
  const IntMatrix& coordinate_inverse() const { return coords_inverse_; }

  bool is_trivial() const { return invariants_.is_trivial(); }
  bool is_finite() const { return invariants_.is_finite(); }

  Integer order() const {
    if (!is_finite()) return 0;
    return invariants_.torsion_order();
  }

  /// Canonical Smith coordinates of an element.
  IntVector normal_form(const IntVector& x) const {
    IntVector c = coords_.apply(x);
    for (std::size_t k = 0; k < generators_; ++k) {
      if (moduli_[k] == 1)
        c[k] = 0;
      else if (moduli_[k] != 0)
        c[k] = mod_nonneg(c[k], moduli_[k]);
    }
    return c;
  }

  bool is_zero(const IntVector& x) const {
    IntVector c = coords_.apply(x);
    for (std::size_t k = 0; k < generators_; ++k)
      if (!divides(moduli_[k], c[k])) return false;
    return true;
  }

  bool equal(const IntVector& x, const IntVector& y) const {
    IntVector d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    return is_zero(d);
  }

  // Element given by Smith coordinates.
  IntVector from_coordinates(const IntVector& c) const {
    return coords_inverse_.apply(c);
  }

  Lattice relation_lattice() const {
    return Lattice::from_generators(relations_);
  }

  bool isomorphic(const FgAbGroup& other) const {
    return invariants_ == other.invariants_;
  }

  Simplification simplify() const;

  std::string to_string() const { return invariants_.to_string(); }

  friend bool operator==(const FgAbGroup& a, const FgAbGroup& b) {
    return a.generators_ == b.generators_ &&
           a.relation_lattice() == b.relation_lattice();
  }

 private:
  std::size_t generators_ = 0;
  IntMatrix relations_;
  SmithInvariants invariants_;
  std::vector<Integer> moduli_;
  IntMatrix coords_;
  IntMatrix coords_inverse_;
};

inline FgAbGroup present(std::size_t generators, const IntMatrix& relations) {
  return FgAbGroup::present(generators, relations);
}

struct Simplification {
  FgAbGroup group;  // diagonal presentation, torsion first
  IntMatrix to;     // original generators -> simplified coordinates
  IntMatrix from;   // simplified coordinates -> original generators
};

inline Simplification FgAbGroup::simplify() const {
  std::vector<std::size_t> torsion_idx;
  std::vector<std::size_t> free_idx;
  for (std::size_t k = 0; k < generators_; ++k) {
    if (moduli_[k] == 0)
      free_idx.push_back(k);
    else if (moduli_[k] != 1)
      torsion_idx.push_back(k);
  }
  std::vector<std::size_t> idx = torsion_idx;
  idx.insert(idx.end(), free_idx.begin(), free_idx.end());
  IntMatrix rel(idx.size(), torsion_idx.size());
  for (std::size_t k = 0; k < torsion_idx.size(); ++k)
    rel(k, k) = moduli_[torsion_idx[k]];
  Simplification s{FgAbGroup(idx.size(), rel), coords_.select_rows(idx),
                   coords_inverse_.select_columns(idx)};
  return s;
}

// ---------------------------------------------------------------------------
// Homomorphisms

/// Homomorphism between presented groups, given on generators: column j is
/// the image of source generator j in target generators.
class Homomorphism {
 public:
  Homomorphism() = default;

  Homomorphism(FgAbGroup source, FgAbGroup target, IntMatrix matrix)
      : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != target_.generator_count() ||
        matrix_.cols() != source_.generator_count())
      throw DimensionMismatch("homomorphism matrix is " +
                              std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()) + ", expected " +
                              std::to_string(target_.generator_count()) + "x" +
                              std::to_string(source_.generator_count()));
    IntMatrix images = matrix_ * source_.relations();
    for (std::size_t j = 0; j < images.cols(); ++j)
      if (!target_.is_zero(images.column(j)))
        throw IllDefined("relator " + std::to_string(j) +
                         " is not sent into the target relation lattice");
  }

  static Homomorphism identity(const FgAbGroup& g) {
    return Homomorphism(g, g, IntMatrix::identity(g.generator_count()));
  }

  static Homomorphism zero(const FgAbGroup& src, const FgAbGroup& tgt) {
    return Homomorphism(src, tgt,
                        IntMatrix(tgt.generator_count(), src.generator_count()));
  }

  static Homomorphism scalar(const FgAbGroup& g, const Integer& s) {
    return Homomorphism(g, g, IntMatrix::scalar(g.generator_count(), s));
  }

  const FgAbGroup& source() const { return source_; }
  const FgAbGroup& target() const { return target_; }
  const IntMatrix& matrix() const { return matrix_; }

  IntVector apply(const IntVector& x) const { return matrix_.apply(x); }

  bool is_zero() const {
    for (std::size_t j = 0; j < matrix_.cols(); ++j)
      if (!target_.is_zero(matrix_.column(j))) return false;
    return true;
  }

  // Equality as maps (matrices may differ by relation-lattice elements).
  bool equals(const Homomorphism& other) const {
    if (matrix_.rows() != other.matrix_.rows() ||
        matrix_.cols() != other.matrix_.cols())
      return false;
    IntMatrix d = matrix_ - other.matrix_;
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (!target_.is_zero(d.column(j))) return false;
    return true;
  }

  bool is_injective() const;
  bool is_surjective() const;
  bool is_isomorphism() const { return is_injective() && is_surjective(); }

 private:
  FgAbGroup source_;
  FgAbGroup target_;
  IntMatrix matrix_;
};

// g after f
inline Homomorphism compose(const Homomorphism& g, const Homomorphism& f) {
  if (g.source().generator_count() != f.target().generator_count())
    throw DimensionMismatch("composition of incompatible homomorphisms");
  return Homomorphism(f.source(), g.target(), g.matrix() * f.matrix());
}

/// Subgroup of `g` generated by the columns of `gens`, as an abstract group
/// with its inclusion into `g`.
inline Homomorphism subgroup(const FgAbGroup& g, const IntMatrix& gens) {
  IntMatrix all = IntMatrix::hcat(gens, g.relations());
  IntMatrix basis = lattice_basis(all);
  auto rel = shapelim::solve(basis, g.relations());
  if (!rel) throw InternalInconsistency("relations outside their own span");
  FgAbGroup sub(basis.cols(), *rel);
  return Homomorphism(sub, g, basis);
}

/// Lattice of Z^n (n generators of g) representing the subgroup generated by
/// `gens`; includes the relation lattice so subgroups compare by equality.
inline Lattice subgroup_lattice(const FgAbGroup& g, const IntMatrix& gens) {
  return Lattice::from_generators(IntMatrix::hcat(gens, g.relations()));
}

struct HomParts {
  Homomorphism kernel;      // inclusion kernel -> source
  Homomorphism image;       // inclusion image -> target
  Homomorphism cokernel;    // projection target -> cokernel
  Lattice kernel_lattice;   // preimage of the target relations, in Z^src
  Lattice image_lattice;    // image plus target relations, in Z^tgt
};

inline HomParts hom_parts(const Homomorphism& h) {
  const FgAbGroup& src = h.source();
  const FgAbGroup& tgt = h.target();
  const std::size_t ns = src.generator_count();
  IntMatrix stacked = IntMatrix::hcat(h.matrix(), tgt.relations());
  IntMatrix ker = kernel(stacked);
  IntMatrix top = ker.block(0, 0, ns, ker.cols());
  Homomorphism kernel_inc = subgroup(src, top);
  Homomorphism image_inc = subgroup(tgt, h.matrix());
  FgAbGroup coker(tgt.generator_count(),
                  IntMatrix::hcat(tgt.relations(), h.matrix()));
  Homomorphism proj(tgt, coker, IntMatrix::identity(tgt.generator_count()));
  return {kernel_inc, image_inc, proj, subgroup_lattice(src, top),
          subgroup_lattice(tgt, h.matrix())};
}

inline bool Homomorphism::is_injective() const {
  return hom_parts(*this).kernel.source().is_trivial();
}

inline bool Homomorphism::is_surjective() const {
  return subgroup_lattice(target_, matrix_) ==
         Lattice::full(target_.generator_count());
}

}  // namespace shapelim
