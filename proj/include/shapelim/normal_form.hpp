#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "shapelim/matrix.hpp"

namespace shapelim {

/// Column-style Hermite normal form: H = M * U with U unimodular.
///
/// H is lower-triangular in echelon sense: the first `rank` columns carry
/// strictly increasing pivot rows with positive pivots, entries to the left
/// of a pivot are reduced into [0, pivot), and the remaining columns are
/// zero. Column span of H equals the column span of M.
struct HermiteForm {
  IntMatrix H;
  IntMatrix U;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_rows;
};

namespace detail {

using Columns = std::vector<IntVector>;

inline void axpy_column(IntVector& dst, const Integer& q, const IntVector& src) {
  for (std::size_t k = 0; k < dst.size(); ++k)
    if (src[k] != 0) dst[k] -= q * src[k];
}

inline void negate_column(IntVector& c) {
  for (auto& x : c) x = -x;
}

}  // namespace detail

inline HermiteForm hnf(const IntMatrix& M, bool track_transform = true) {
  const std::size_t n = M.rows();
  const std::size_t m = M.cols();
  detail::Columns A = M.columns();
  detail::Columns U;
  if (track_transform) U = IntMatrix::identity(m).columns();

  auto col_op = [&](std::size_t dst, const Integer& q, std::size_t src) {
    detail::axpy_column(A[dst], q, A[src]);
    if (track_transform) detail::axpy_column(U[dst], q, U[src]);
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    std::swap(A[a], A[b]);
    if (track_transform) std::swap(U[a], U[b]);
  };

  HermiteForm out;
  std::size_t piv = 0;
  for (std::size_t i = 0; i < n && piv < m; ++i) {
    for (;;) {
      std::size_t best = m;
      for (std::size_t c = piv; c < m; ++c) {
        if (A[c][i] == 0) continue;
        if (best == m || abs(A[c][i]) < abs(A[best][i])) best = c;
      }
      if (best == m) break;
      if (best != piv) col_swap(best, piv);
      bool clean = true;
      for (std::size_t c = piv + 1; c < m; ++c) {
        if (A[c][i] == 0) continue;
        Integer q = floor_div(A[c][i], A[piv][i]);
        col_op(c, q, piv);
        if (A[c][i] != 0) clean = false;
      }
      if (clean) break;
    }
    if (A[piv][i] == 0) continue;
    if (A[piv][i] < 0) {
      detail::negate_column(A[piv]);
      if (track_transform) detail::negate_column(U[piv]);
    }
    for (std::size_t c = 0; c < piv; ++c) {
      Integer q = floor_div(A[c][i], A[piv][i]);
      if (q != 0) col_op(c, q, piv);
    }
    out.pivot_rows.push_back(i);
    ++piv;
  }
  out.rank = piv;
  out.H = IntMatrix::from_columns(A, n);
  if (track_transform) out.U = IntMatrix::from_columns(U, m);
  return out;
}

/// Smith normal form: S = U * M * V with U, V unimodular and S diagonal with
/// nonnegative entries d_1 | d_2 | ... ; Uinv = U^{-1} is tracked as well.
struct SmithForm {
  IntMatrix S;
  IntMatrix U;
  IntMatrix V;
  IntMatrix Uinv;
  std::vector<Integer> diagonal;  // min(rows, cols) entries
  std::size_t rank = 0;
};

inline SmithForm snf(const IntMatrix& M) {
  const std::size_t n = M.rows();
  const std::size_t m = M.cols();
  std::vector<IntVector> A = M.to_rows();
  std::vector<IntVector> U = IntMatrix::identity(n).to_rows();
  // Column-oriented storage for the right-hand transforms.
  detail::Columns V = IntMatrix::identity(m).columns();
  detail::Columns Uinv = IntMatrix::identity(n).columns();

  auto row_sub = [&](std::size_t dst, const Integer& q, std::size_t src) {
    // row_dst -= q * row_src
    detail::axpy_column(A[dst], q, A[src]);
    detail::axpy_column(U[dst], q, U[src]);
    // Uinv col_src += q * col_dst
    Integer mq = -q;
    detail::axpy_column(Uinv[src], mq, Uinv[dst]);
  };
  auto row_swap = [&](std::size_t a, std::size_t b) {
    std::swap(A[a], A[b]);
    std::swap(U[a], U[b]);
    std::swap(Uinv[a], Uinv[b]);
  };
  auto col_sub = [&](std::size_t dst, const Integer& q, std::size_t src) {
    for (std::size_t i = 0; i < n; ++i)
      if (A[i][src] != 0) A[i][dst] -= q * A[i][src];
    detail::axpy_column(V[dst], q, V[src]);
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < n; ++i) std::swap(A[i][a], A[i][b]);
    std::swap(V[a], V[b]);
  };

  const std::size_t dmax = std::min(n, m);
  std::size_t t = 0;
  for (; t < dmax; ++t) {
    std::size_t bi = n;
    std::size_t bj = m;
    for (std::size_t i = t; i < n; ++i)
      for (std::size_t j = t; j < m; ++j)
        if (A[i][j] != 0 && (bi == n || abs(A[i][j]) < abs(A[bi][bj]))) {
          bi = i;
          bj = j;
        }
    if (bi == n) break;
    if (bi != t) row_swap(bi, t);
    if (bj != t) col_swap(bj, t);

    for (;;) {
      bool restart = false;
      for (std::size_t i = t + 1; i < n && !restart; ++i) {
        if (A[i][t] == 0) continue;
        Integer q = floor_div(A[i][t], A[t][t]);
        row_sub(i, q, t);
        if (A[i][t] != 0) {
          row_swap(i, t);
          restart = true;
        }
      }
      if (restart) continue;
      for (std::size_t j = t + 1; j < m && !restart; ++j) {
        if (A[t][j] == 0) continue;
        Integer q = floor_div(A[t][j], A[t][t]);
        col_sub(j, q, t);
        if (A[t][j] != 0) {
          col_swap(j, t);
          restart = true;
        }
      }
      if (restart) continue;
      // Row t and column t are clear; enforce divisibility of the rest.
      std::size_t bad = n;
      for (std::size_t i = t + 1; i < n && bad == n; ++i)
        for (std::size_t j = t + 1; j < m; ++j)
          if (!divides(A[t][t], A[i][j])) {
            bad = i;
            break;
          }
      if (bad == n) break;
      // row_t += row_bad
      row_sub(t, Integer(-1), bad);
    }
    if (A[t][t] < 0) {
      detail::negate_column(A[t]);
      detail::negate_column(U[t]);
      detail::negate_column(Uinv[t]);
    }
  }

  SmithForm out;
  out.rank = t;
  out.S = IntMatrix::from_rows(A, m);
  if (n == 0) out.S = IntMatrix(0, m);
  out.U = IntMatrix::from_rows(U, n);
  if (n == 0) out.U = IntMatrix(0, 0);
  out.V = IntMatrix::from_columns(V, m);
  out.Uinv = IntMatrix::from_columns(Uinv, n);
  out.diagonal.resize(dmax);
  for (std::size_t k = 0; k < dmax; ++k) out.diagonal[k] = out.S(k, k);
  return out;
}

/// Basis (as columns, in Hermite form) of the integer kernel of M.
inline IntMatrix kernel(const IntMatrix& M) {
  HermiteForm h = hnf(M);
  std::vector<std::size_t> zero_cols;
  for (std::size_t c = h.rank; c < M.cols(); ++c) zero_cols.push_back(c);
  IntMatrix K = h.U.select_columns(zero_cols);
  if (K.cols() == 0) return K;
  HermiteForm kh = hnf(K, false);
  return kh.H.block(0, 0, K.rows(), kh.rank);
}

/// Nonzero columns of the Hermite form of M: a canonical basis of the
/// column lattice.
inline IntMatrix lattice_basis(const IntMatrix& M) {
  HermiteForm h = hnf(M, false);
  return h.H.block(0, 0, M.rows(), h.rank);
}

/// Integer solution x of M x = b, if any.
class LinearSolver {
 public:
  explicit LinearSolver(const IntMatrix& M) : m_(M), s_(snf(M)) {}

  std::optional<IntVector> solve(const IntVector& b) const {
    if (b.size() != m_.rows()) throw DimensionMismatch("solve rhs size");
    IntVector c = s_.U.apply(b);
    IntVector y(m_.cols());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i < s_.rank) {
        if (!divides(s_.diagonal[i], c[i])) return std::nullopt;
        Integer q;
        mpz_divexact(q.get_mpz_t(), c[i].get_mpz_t(),
                     s_.diagonal[i].get_mpz_t());
        y[i] = q;
      } else if (c[i] != 0) {
        return std::nullopt;
      }
    }
    return s_.V.apply(y);
  }

  std::optional<IntMatrix> solve(const IntMatrix& B) const {
    std::vector<IntVector> cols;
    for (std::size_t j = 0; j < B.cols(); ++j) {
      auto x = solve(B.column(j));
      if (!x) return std::nullopt;
      cols.push_back(std::move(*x));
    }
    return IntMatrix::from_columns(cols, m_.cols());
  }

  // Columns of V beyond the rank span the integer kernel.
  IntMatrix kernel_basis() const {
    std::vector<std::size_t> idx;
    for (std::size_t c = s_.rank; c < m_.cols(); ++c) idx.push_back(c);
    return s_.V.select_columns(idx);
  }

  const SmithForm& smith() const { return s_; }

 private:
  IntMatrix m_;
  SmithForm s_;
};

inline std::optional<IntVector> solve(const IntMatrix& M, const IntVector& b) {
  return LinearSolver(M).solve(b);
}

inline std::optional<IntMatrix> solve(const IntMatrix& M, const IntMatrix& B) {
  return LinearSolver(M).solve(B);
}

inline std::size_t rank(const IntMatrix& M) { return hnf(M, false).rank; }

/// Rank of M over F_q for a prime q.
inline std::size_t rank_mod(const IntMatrix& M, const Integer& q) {
  std::vector<IntVector> a = M.to_rows();
  for (auto& r : a)
    for (auto& x : r) x = mod_nonneg(x, q);
  std::size_t r = 0;
  for (std::size_t c = 0; c < M.cols() && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    Integer inv;
    mpz_invert(inv.get_mpz_t(), a[r][c].get_mpz_t(), q.get_mpz_t());
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      Integer f = mod_nonneg(a[i][c] * inv, q);
      for (std::size_t j = c; j < M.cols(); ++j)
        a[i][j] = mod_nonneg(a[i][j] - f * a[r][j], q);
    }
    ++r;
  }
  return r;
}

}  // namespace shapelim
