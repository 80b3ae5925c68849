#pragma once

// Independent reference computations used only by the test suites. None of
// these route through the library's normal-form code.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "shapelim/matrix.hpp"

namespace shapelim::oracle {

// Plain cofactor expansion; fine for the <= 4x4 minors the oracle needs.
inline Integer cofactor_det(const std::vector<std::vector<Integer>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  Integer total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    std::vector<std::vector<Integer>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Integer> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    Integer term = a[0][j] * cofactor_det(minor);
    total += (j % 2 == 0) ? term : Integer(-term);
  }
  return total;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start,
                    std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Smith invariants (nonzero diagonal entries, including 1s) from gcds of
/// k x k minors: d_1 ... d_k = gcd of all k-minors.
inline std::vector<Integer> minor_gcd_diagonal(const IntMatrix& m) {
  std::vector<Integer> out;
  Integer prev = 1;
  const std::size_t kmax = std::min(m.rows(), m.cols());
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(m.rows(), k, 0, cur, rs);
    subsets(m.cols(), k, 0, cur, cs);
    Integer g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        std::vector<std::vector<Integer>> sub(k, std::vector<Integer>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = m(r[i], c[j]);
        Integer d = cofactor_det(sub);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    if (g == 0) break;
    Integer dk = g / prev;
    out.push_back(dk);
    prev = g;
  }
  return out;
}

/// Number of level-0 values of depth-`depth` chains x_k = A x_{k+1} whose
/// coordinates all stay within [-bound, bound]. Enumerates the box directly.
inline std::size_t bounded_thread_values(const IntMatrix& a, std::size_t depth, long bound) {
  const std::size_t r = a.cols();
  std::vector<IntVector> box;
  IntVector cur(r, Integer(-bound));
  if (r == 0) return 1;
  for (;;) {
    box.push_back(cur);
    std::size_t k = 0;
    while (k < r && cur[k] == bound) cur[k++] = -bound;
    if (k == r) break;
    cur[k] += 1;
  }
  auto in_box = [&](const IntVector& v) {
    for (const auto& x : v)
      if (x < -bound || x > bound) return false;
    return true;
  };
  std::vector<IntVector> level = box;
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<IntVector> next;
    for (const auto& v : level) {
      IntVector w = a.apply(v);
      if (in_box(w)) next.push_back(w);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    level = std::move(next);
  }
  return level.size();
}

/// Deterministic bounded integers from a 64-bit Mersenne twister.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  long uniform(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(gen_() % span);
  }
  IntMatrix matrix(std::size_t r, std::size_t c, long bound) {
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform(-bound, bound);
    return m;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace shapelim::oracle
