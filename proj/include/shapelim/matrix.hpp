#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shapelim/errors.hpp"

namespace shapelim {

using Integer = mpz_class;
using IntVector = std::vector<Integer>;

/// Dense integer matrix with arbitrary-precision entries, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix scalar(std::size_t n, const Integer& value) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
    return m;
  }

  static IntMatrix diagonal(const std::vector<Integer>& d) {
    IntMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  // Rows must all have the same length; an empty list gives a 0x0 matrix.
  static IntMatrix from_rows(const std::vector<std::vector<Integer>>& rows,
                             std::size_t cols_if_empty = 0) {
    if (rows.empty()) return IntMatrix(0, cols_if_empty);
    IntMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_)
        throw DimensionMismatch("ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static IntMatrix from_rows(
      std::initializer_list<std::initializer_list<long>> rows) {
    std::vector<std::vector<Integer>> converted;
    for (const auto& r : rows) {
      std::vector<Integer> row;
      for (long v : r) row.emplace_back(v);
      converted.push_back(std::move(row));
    }
    return from_rows(converted);
  }

  static IntMatrix from_columns(const std::vector<IntVector>& columns,
                                std::size_t rows_if_empty) {
    std::size_t rows = columns.empty() ? rows_if_empty : columns.front().size();
    IntMatrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != rows)
        throw DimensionMismatch("ragged matrix columns");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  static IntMatrix column_vector(const IntVector& v) {
    return from_columns({v}, v.size());
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  const Integer& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  IntVector column(std::size_t j) const {
    IntVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  IntVector row(std::size_t i) const {
    return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                     data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  std::vector<IntVector> columns() const {
    std::vector<IntVector> out;
    out.reserve(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out.push_back(column(j));
    return out;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Integer& x) { return x == 0; });
  }

  bool is_square() const { return rows_ == cols_; }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  IntMatrix block(std::size_t r0, std::size_t c0, std::size_t nr,
                  std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_)
      throw DimensionMismatch("block out of range");
    IntMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  IntMatrix select_columns(const std::vector<std::size_t>& idx) const {
    IntMatrix b(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) b(i, j) = (*this)(i, idx[j]);
    return b;
  }

  IntMatrix select_rows(const std::vector<std::size_t>& idx) const {
    IntMatrix b(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) b(i, j) = (*this)(idx[i], j);
    return b;
  }

  IntMatrix operator-() const {
    IntMatrix r(*this);
    for (auto& x : r.data_) x = -x;
    return r;
  }

  friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
    a.require_same_shape(b);
    IntMatrix r(a);
    for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] += b.data_[k];
    return r;
  }

  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    a.require_same_shape(b);
    IntMatrix r(a);
    for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] -= b.data_[k];
    return r;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product shape");
    IntMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (b(k, j) != 0) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend IntMatrix operator*(const Integer& s, const IntMatrix& a) {
    IntMatrix r(a);
    for (auto& x : r.data_) x *= s;
    return r;
  }

  IntVector apply(const IntVector& v) const {
    if (v.size() != cols_) throw DimensionMismatch("matrix-vector shape");
    IntVector r(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (v[j] != 0 && (*this)(i, j) != 0) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const IntMatrix& a, const IntMatrix& b) {
    return !(a == b);
  }

  // [A | B]
  static IntMatrix hcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows_ != b.rows_) throw DimensionMismatch("hcat row mismatch");
    IntMatrix r(a.rows_, a.cols_ + b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
      for (std::size_t j = 0; j < b.cols_; ++j) r(i, a.cols_ + j) = b(i, j);
    }
    return r;
  }

  // [A ; B]
  static IntMatrix vcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.cols_) throw DimensionMismatch("vcat column mismatch");
    IntMatrix r(a.rows_ + b.rows_, a.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r(a.rows_ + i, j) = b(i, j);
    return r;
  }

  static IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix r(a.rows_ + b.rows_, a.cols_ + b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j)
        r(a.rows_ + i, a.cols_ + j) = b(i, j);
    return r;
  }

  IntMatrix pow(std::size_t k) const {
    if (!is_square()) throw DimensionMismatch("power of non-square matrix");
    IntMatrix result = identity(rows_);
    IntMatrix base = *this;
    while (k > 0) {
      if (k & 1U) result = result * base;
      k >>= 1U;
      if (k > 0) base = base * base;
    }
    return result;
  }

  std::vector<std::vector<Integer>> to_rows() const {
    std::vector<std::vector<Integer>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = row(i);
    return out;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i) os << ',';
      os << '[';
      for (std::size_t j = 0; j < cols_; ++j) {
        if (j) os << ',';
        os << (*this)(i, j).get_str();
      }
      os << ']';
    }
    os << ']';
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    return os << m.to_string();
  }

 private:
  void require_same_shape(const IntMatrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_)
      throw DimensionMismatch("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Remainder in [0, |m|).
inline Integer mod_nonneg(const Integer& a, const Integer& m) {
  Integer r;
  Integer am = abs(m);
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), am.get_mpz_t());
  return r;
}

inline bool divides(const Integer& d, const Integer& a) {
  if (d == 0) return a == 0;
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

inline Integer gcd_of(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Integer lcm_of(const Integer& a, const Integer& b) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

/// Fraction-free (Bareiss) determinant.
inline Integer determinant(const IntMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("determinant of non-square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  int sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = v;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace shapelim
