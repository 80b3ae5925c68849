#pragma once

#include <algorithm>
#include <cstddef>
#include <gmpxx.h>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shapelim/errors.hpp"
#include "shapelim/matrix.hpp"

namespace shapelim {

/// Integer polynomial, coefficients from the constant term upward. The zero
/// polynomial is the empty vector.
using Poly = std::vector<Integer>;

inline void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline long poly_degree(const Poly& p) {
  return static_cast<long>(p.size()) - 1;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  poly_trim(r);
  return r;
}

/// Exact quotient by a monic divisor; nullopt if the remainder is nonzero.
inline std::optional<Poly> poly_divide_monic(const Poly& f, const Poly& g) {
  if (g.empty() || g.back() != 1) throw Error("divisor must be monic");
  if (f.size() < g.size()) {
    if (f.empty()) return Poly{};
    return std::nullopt;
  }
  Poly rem = f;
  Poly q(f.size() - g.size() + 1);
  for (std::size_t k = q.size(); k-- > 0;) {
    Integer c = rem[k + g.size() - 1];
    q[k] = c;
    if (c != 0)
      for (std::size_t j = 0; j < g.size(); ++j) rem[k + j] -= c * g[j];
  }
  for (const auto& x : rem)
    if (x != 0) return std::nullopt;
  poly_trim(q);
  return q;
}

inline Integer poly_eval(const Poly& p, const Integer& x) {
  Integer r = 0;
  for (std::size_t k = p.size(); k-- > 0;) r = r * x + p[k];
  return r;
}

/// p(A) by Horner's rule.
inline IntMatrix poly_eval(const Poly& p, const IntMatrix& a) {
  const std::size_t n = a.rows();
  IntMatrix r(n, n);
  for (std::size_t k = p.size(); k-- > 0;) r = r * a + IntMatrix::scalar(n, p[k]);
  return r;
}

inline std::string poly_to_string(const Poly& p) {
  if (p.empty()) return "0";
  std::string s;
  for (std::size_t k = p.size(); k-- > 0;) {
    if (p[k] == 0) continue;
    Integer c = p[k];
    if (!s.empty()) {
      s += c < 0 ? " - " : " + ";
      c = abs(c);
    } else if (c < 0) {
      s += "-";
      c = abs(c);
    }
    if (k == 0 || c != 1) s += c.get_str();
    if (k >= 1) s += "x";
    if (k >= 2) s += "^" + std::to_string(k);
  }
  return s;
}

/// Characteristic polynomial det(xI - A), monic, by Faddeev–LeVerrier.
/// Every division is exact over Z.
inline Poly charpoly(const IntMatrix& a) {
  if (!a.is_square()) throw DimensionMismatch("charpoly of a non-square matrix");
  const std::size_t n = a.rows();
  Poly c(n + 1);
  c[n] = 1;
  IntMatrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m + IntMatrix::scalar(n, c[n - k + 1]);
    IntMatrix am = a * m;
    Integer tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    Integer q;
    Integer kk = static_cast<unsigned long>(k);
    mpz_divexact(q.get_mpz_t(), tr.get_mpz_t(), kk.get_mpz_t());
    c[n - k] = -q;
  }
  return c;
}

namespace detail {

// Positive divisors of |n|, n != 0, by trial division.
inline std::vector<Integer> positive_divisors(const Integer& n) {
  Integer m = abs(n);
  if (m > Integer("100000000000000"))
    throw TooLarge("integer too large to enumerate divisors: " + m.get_str());
  std::vector<std::pair<Integer, unsigned>> fac;
  for (Integer p = 2; p * p <= m; ++p) {
    unsigned e = 0;
    while (divides(p, m)) {
      m /= p;
      ++e;
    }
    if (e) fac.emplace_back(p, e);
  }
  if (m > 1) fac.emplace_back(m, 1);
  std::vector<Integer> out{1};
  for (const auto& [p, e] : fac) {
    std::size_t sz = out.size();
    Integer pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < sz; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Monic g of degree d with g(x_i) = v_i, if its coefficients are integral.
inline std::optional<Poly> interpolate_monic(const std::vector<Integer>& xs,
                                             const std::vector<Integer>& vs) {
  const std::size_t d = xs.size();
  std::vector<mpq_class> h(d);
  for (std::size_t i = 0; i < d; ++i) {
    Integer xd = 1;
    for (std::size_t k = 0; k < d; ++k) xd *= xs[i];
    mpq_class yi(vs[i] - xd);
    // Lagrange basis polynomial for node i.
    std::vector<mpq_class> basis{mpq_class(1)};
    mpq_class denom(1);
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      std::vector<mpq_class> nb(basis.size() + 1);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        nb[k + 1] += basis[k];
        nb[k] -= basis[k] * mpq_class(xs[j]);
      }
      basis = nb;
      denom *= mpq_class(xs[i] - xs[j]);
    }
    for (std::size_t k = 0; k < d; ++k) h[k] += yi * basis[k] / denom;
  }
  Poly g(d + 1);
  for (std::size_t k = 0; k < d; ++k) {
    h[k].canonicalize();
    if (h[k].get_den() != 1) return std::nullopt;
    g[k] = h[k].get_num();
  }
  g[d] = 1;
  return g;
}

// Smallest-degree monic factor of f of degree exactly d, if any.
inline std::optional<Poly> monic_factor_of_degree(const Poly& f, std::size_t d) {
  struct Node {
    Integer x;
    std::vector<Integer> divs;
  };
  std::vector<Node> nodes;
  for (long a = 0; a <= 24; ++a) {
    for (long s : {a, -a}) {
      if (s == -a && a == 0) continue;
      Integer x = s;
      Integer v = poly_eval(f, x);
      if (v == 0) continue;
      nodes.push_back({x, positive_divisors(v)});
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    if (a.divs.size() != b.divs.size()) return a.divs.size() < b.divs.size();
    return abs(a.x) < abs(b.x);
  });
  if (nodes.size() < d) return std::nullopt;
  nodes.resize(d);
  std::vector<Integer> xs;
  for (const auto& n : nodes) xs.push_back(n.x);
  std::vector<std::size_t> pick(d, 0);
  std::vector<int> sign(d, 0);
  // Odometer over (divisor, sign) per node.
  for (;;) {
    std::vector<Integer> vs(d);
    for (std::size_t i = 0; i < d; ++i)
      vs[i] = sign[i] ? Integer(-nodes[i].divs[pick[i]]) : nodes[i].divs[pick[i]];
    if (auto g = interpolate_monic(xs, vs)) {
      if (poly_degree(*g) >= 1 && poly_divide_monic(f, *g)) return g;
    }
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (!sign[i]) {
        sign[i] = 1;
        break;
      }
      sign[i] = 0;
      if (++pick[i] < nodes[i].divs.size()) break;
      pick[i] = 0;
    }
    if (i == d) return std::nullopt;
  }
}

}  // namespace detail

/// Distinct prime factors of |n|, ascending; empty for 0 and +-1.
inline std::vector<Integer> prime_factors(const Integer& n) {
  std::vector<Integer> out;
  Integer m = abs(n);
  if (m <= 1) return out;
  const Integer limit("10000000");
  for (Integer p = 2; p * p <= m; ++p) {
    if (p > limit) throw TooLarge("integer too large to factor: " + m.get_str());
    if (!divides(p, m)) continue;
    out.push_back(p);
    while (divides(p, m)) m /= p;
  }
  if (m > 1) out.push_back(m);
  return out;
}

/// Irreducible monic factors over Z (with multiplicity) of a monic integer
/// polynomial, ordered by degree then coefficients.
inline std::vector<Poly> factor_monic(Poly f) {
  poly_trim(f);
  if (f.empty() || f.back() != 1) throw Error("factor_monic expects a monic polynomial");
  std::vector<Poly> out;
  while (f.size() > 1 && f[0] == 0) {
    out.push_back({0, 1});
    f.erase(f.begin());
  }
  // Linear factors: integer roots divide the constant term.
  bool again = true;
  while (again && f.size() > 2) {
    again = false;
    for (const auto& d : detail::positive_divisors(f[0])) {
      for (const Integer& r : {d, Integer(-d)}) {
        if (poly_eval(f, r) == 0) {
          Poly lin{Integer(-r), 1};
          f = *poly_divide_monic(f, lin);
          out.push_back(lin);
          again = true;
          break;
        }
      }
      if (again) break;
    }
  }
  while (f.size() > 1) {
    const std::size_t n = f.size() - 1;
    std::optional<Poly> g;
    for (std::size_t d = 1; d <= n / 2 && !g; ++d)
      g = detail::monic_factor_of_degree(f, d);
    if (!g) {
      out.push_back(f);
      break;
    }
    out.push_back(*g);
    f = *poly_divide_monic(f, *g);
  }
  std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

/// Split a monic polynomial as u * v where u collects the irreducible factors
/// with constant term +-1 (all roots algebraic units) and v the rest.
struct UnitSplit {
  Poly unit;
  Poly rest;
};

inline UnitSplit unit_split(const Poly& f) {
  UnitSplit s{{1}, {1}};
  for (const auto& g : factor_monic(f)) {
    if (g[0] == 1 || g[0] == -1)
      s.unit = poly_mul(s.unit, g);
    else
      s.rest = poly_mul(s.rest, g);
  }
  return s;
}

}  // namespace shapelim
