// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "haarlab/errors.hpp"

namespace haarlab {

using Residue = std::int64_t;

inline Residue mod_reduce(Residue x, Residue m) {
  Residue r = x % m;
  return r < 0 ? r + m : r;
}

/// Trial-division factorization, primes ascending with multiplicities.
inline std::vector<std::pair<Residue, int>> factorize(Residue n) {
  if (n < 2) throw std::invalid_argument("factorize: n must be >= 2");
  std::vector<std::pair<Residue, int>> out;
  for (Residue p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline bool is_prime(Residue p) {
  if (p < 2) return false;
  for (Residue d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline Residue ipow(Residue b, int e) {
  Residue r = 1;
  while (e-- > 0) r *= b;
  return r;
}

/// A finite abelian coefficient group: either Z/n or (Z/p^r)^J.
/// Mixed exponents per coordinate are deliberately not representable.
struct Group {
  enum class Kind { cyclic, vector };
  Kind kind = Kind::cyclic;
  Residue n = 2;  // cyclic modulus
  Residue p = 2;  // vector: prime
  int r = 1;      // vector: exponent power
  int J = 1;      // vector: arity

  static Group cyclic(Residue n) {
    if (n < 2) throw std::invalid_argument("cyclic group needs n >= 2");
    Group g;
    g.kind = Kind::cyclic;
    g.n = n;
    return g;
  }

  static Group vector_group(Residue p, int r, int J) {
    if (!is_prime(p)) throw std::invalid_argument("vector group needs prime p");
    if (r < 1 || J < 1) throw std::invalid_argument("vector group needs r,J >= 1");
    Group g;
    g.kind = Kind::vector;
    g.p = p;
    g.r = r;
    g.J = J;
    g.n = ipow(p, r);
    return g;
  }

  bool is_cyclic() const { return kind == Kind::cyclic; }
  /// The common exponent: n for Z/n, p^r for (Z/p^r)^J.
  Residue exponent() const { return n; }
  /// Number of residue coordinates per element.
  int arity() const { return is_cyclic() ? 1 : J; }
  Residue order() const {
    Residue o = 1;
    for (int j = 0; j < arity(); ++j) o *= exponent();
    return o;
  }

  friend bool operator==(const Group& a, const Group& b) {
    return a.kind == b.kind && a.n == b.n && a.p == b.p && a.r == b.r && a.J == b.J;
  }
  friend bool operator!=(const Group& a, const Group& b) { return !(a == b); }
};

inline std::string to_string(const Group& g) {
  if (g.is_cyclic()) return "Z/" + std::to_string(g.n);
  return "(Z/" + std::to_string(g.n) + ")^" + std::to_string(g.J);
}

/// Group element: one residue per coordinate, all reduced mod exponent().
using GroupElement = std::vector<Residue>;

inline GroupElement zero_element(const Group& g) {
  return GroupElement(static_cast<std::size_t>(g.arity()), 0);
}

inline GroupElement make_element(const Group& g, std::vector<Residue> rs) {
  if (static_cast<int>(rs.size()) != g.arity())
    throw std::invalid_argument("element arity mismatch for " + to_string(g));
  for (auto& x : rs) x = mod_reduce(x, g.exponent());
  return rs;
}

inline bool is_zero(const GroupElement& a) {
  for (auto x : a)
    if (x) return false;
  return true;
}

inline GroupElement elem_add(const Group& g, const GroupElement& a, const GroupElement& b) {
  GroupElement s(a);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = mod_reduce(s[i] + b[i], g.exponent());
  return s;
}

inline GroupElement elem_neg(const Group& g, const GroupElement& a) {
  GroupElement s(a);
  for (auto& x : s) x = mod_reduce(-x, g.exponent());
  return s;
}

/// Index of an element in the canonical enumeration (coordinate 0 least
/// significant), and its inverse. Used by measures and MRF tables.
inline std::int64_t element_index(const Group& g, const GroupElement& a) {
  std::int64_t idx = 0;
  for (int j = g.arity() - 1; j >= 0; --j) idx = idx * g.exponent() + a[static_cast<std::size_t>(j)];
  return idx;
}

inline GroupElement element_at(const Group& g, std::int64_t idx) {
  GroupElement a = zero_element(g);
  for (int j = 0; j < g.arity(); ++j) {
    a[static_cast<std::size_t>(j)] = idx % g.exponent();
    idx /= g.exponent();
  }
  return a;
}

/// An endomorphism: a scalar residue on Z/n, a JxJ residue matrix on
/// (Z/p^r)^J (row-major).
struct Endo {
  std::vector<Residue> m;  // size 1, or J*J

  static Endo scalar(const Group& g, Residue f) {
    if (!g.is_cyclic()) throw std::invalid_argument("scalar endo on non-cyclic group");
    return Endo{{mod_reduce(f, g.n)}};
  }
  static Endo matrix(const Group& g, std::vector<Residue> entries) {
    if (g.is_cyclic()) throw std::invalid_argument("matrix endo on cyclic group");
    if (static_cast<int>(entries.size()) != g.J * g.J)
      throw std::invalid_argument("matrix endo needs J*J entries");
    for (auto& x : entries) x = mod_reduce(x, g.exponent());
    return Endo{std::move(entries)};
  }

  Residue at(int i, int j, int J) const { return m[static_cast<std::size_t>(i * J + j)]; }

  friend bool operator==(const Endo& a, const Endo& b) { return a.m == b.m; }
  friend bool operator!=(const Endo& a, const Endo& b) { return !(a == b); }
};

inline Endo identity_endo(const Group& g) {
  if (g.is_cyclic()) return Endo::scalar(g, 1);
  std::vector<Residue> e(static_cast<std::size_t>(g.J * g.J), 0);
  for (int i = 0; i < g.J; ++i) e[static_cast<std::size_t>(i * g.J + i)] = 1;
  return Endo{std::move(e)};
}

inline Endo zero_endo(const Group& g) {
  std::size_t len = g.is_cyclic() ? 1u : static_cast<std::size_t>(g.J * g.J);
  return Endo{std::vector<Residue>(len, 0)};
}

inline bool is_zero(const Endo& f) {
  for (auto x : f.m)
    if (x) return false;
  return true;
}

inline GroupElement endo_apply(const Group& g, const Endo& f, const GroupElement& a) {
  if (static_cast<int>(a.size()) != g.arity())
    throw std::invalid_argument("endo_apply: element arity mismatch");
  if (g.is_cyclic()) {
    if (f.m.size() != 1) throw std::invalid_argument("endo_apply: endo kind mismatch");
    return GroupElement{mod_reduce(f.m[0] * a[0], g.n)};
  }
  if (static_cast<int>(f.m.size()) != g.J * g.J)
    throw std::invalid_argument("endo_apply: endo kind mismatch");
  GroupElement b = zero_element(g);
  for (int i = 0; i < g.J; ++i) {
    Residue acc = 0;
    for (int j = 0; j < g.J; ++j)
      acc = mod_reduce(acc + f.at(i, j, g.J) * a[static_cast<std::size_t>(j)], g.exponent());
    b[static_cast<std::size_t>(i)] = acc;
  }
  return b;
}

/// Adjoint relative to the pairing <c,a> = sum c_j a_j: identity on
/// scalars, transpose on matrices.
inline Endo endo_adjoint(const Group& g, const Endo& f) {
  if (g.is_cyclic()) return f;
  Endo t = f;
  for (int i = 0; i < g.J; ++i)
    for (int j = 0; j < g.J; ++j) t.m[static_cast<std::size_t>(j * g.J + i)] = f.at(i, j, g.J);
  return t;
}

inline Endo endo_add(const Group& g, const Endo& f, const Endo& h) {
  if (f.m.size() != h.m.size()) throw std::invalid_argument("endo_add: kind mismatch");
  Endo s = f;
  for (std::size_t i = 0; i < s.m.size(); ++i) s.m[i] = mod_reduce(s.m[i] + h.m[i], g.exponent());
  return s;
}

/// Composition f after h (matrix product f*h on the vector case).
inline Endo endo_compose(const Group& g, const Endo& f, const Endo& h) {
  if (g.is_cyclic()) return Endo{{mod_reduce(f.m[0] * h.m[0], g.n)}};
  Endo out = zero_endo(g);
  for (int i = 0; i < g.J; ++i)
    for (int k = 0; k < g.J; ++k) {
      Residue fik = f.at(i, k, g.J);
      if (!fik) continue;
      for (int j = 0; j < g.J; ++j)
        out.m[static_cast<std::size_t>(i * g.J + j)] =
            mod_reduce(out.m[static_cast<std::size_t>(i * g.J + j)] + fik * h.at(k, j, g.J),
                       g.exponent());
    }
  return out;
}

/// Automorphism test: gcd(f,n)=1 on Z/n; on (Z/p^r)^J the determinant must
/// be a unit, i.e. nonzero mod p (checked by elimination over F_p).
inline bool is_automorphism(const Group& g, const Endo& f) {
  if (g.is_cyclic()) return std::gcd(f.m[0], g.n) == 1;
  const int J = g.J;
  std::vector<Residue> a(f.m);
  for (auto& x : a) x = mod_reduce(x, g.p);
  for (int col = 0; col < J; ++col) {
    int piv = -1;
    for (int row = col; row < J; ++row)
      if (a[static_cast<std::size_t>(row * J + col)]) {
        piv = row;
        break;
      }
    if (piv < 0) return false;
    if (piv != col)
      for (int j = 0; j < J; ++j)
        std::swap(a[static_cast<std::size_t>(piv * J + j)], a[static_cast<std::size_t>(col * J + j)]);
    // scale rows below to eliminate the pivot column
    Residue inv = 0;
    for (Residue x = 1; x < g.p; ++x)
      if (mod_reduce(x * a[static_cast<std::size_t>(col * J + col)], g.p) == 1) {
        inv = x;
        break;
      }
    for (int row = col + 1; row < J; ++row) {
      Residue factor = mod_reduce(a[static_cast<std::size_t>(row * J + col)] * inv, g.p);
      if (!factor) continue;
      for (int j = col; j < J; ++j)
        a[static_cast<std::size_t>(row * J + j)] =
            mod_reduce(a[static_cast<std::size_t>(row * J + j)] -
                           factor * a[static_cast<std::size_t>(col * J + j)],
                       g.p);
    }
  }
  return true;
}

/// An exact root of unity exp(2*pi*i * num/mod). Phases stay in residue
/// form end to end; doubles appear only at reporting boundaries.
struct Phase {
  Residue num = 0;
  Residue mod = 1;

  Phase() = default;
  Phase(Residue numerator, Residue modulus) {
    if (modulus < 1) throw std::invalid_argument("phase modulus must be positive");
    mod = modulus;
    num = mod_reduce(numerator, modulus);
  }

  /// Reduced form with gcd(num,mod)=1 (or (0,1) for the trivial phase).
  Phase canonical() const {
    if (num == 0) return Phase(0, 1);
    Residue g = std::gcd(num, mod);
    return Phase(num / g, mod / g);
  }

  bool is_trivial() const { return num == 0; }

  std::complex<double> to_complex() const {
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::polar(1.0, two_pi * static_cast<double>(num) / static_cast<double>(mod));
  }

  friend Phase operator+(const Phase& a, const Phase& b) {
    Residue l = std::lcm(a.mod, b.mod);
    return Phase(a.num * (l / a.mod) + b.num * (l / b.mod), l);
  }
  friend Phase operator-(const Phase& a, const Phase& b) {
    Residue l = std::lcm(a.mod, b.mod);
    return Phase(a.num * (l / a.mod) - b.num * (l / b.mod), l);
  }
  friend bool operator==(const Phase& a, const Phase& b) {
    Phase ca = a.canonical(), cb = b.canonical();
    return ca.num == cb.num && ca.mod == cb.mod;
  }
  friend bool operator!=(const Phase& a, const Phase& b) { return !(a == b); }
};

/// The dual pairing <c,a> as a phase over the group exponent.
inline Phase pair_phase(const Group& g, const GroupElement& c, const GroupElement& a) {
  if (c.size() != a.size()) throw std::invalid_argument("pair: element arity mismatch");
  Residue acc = 0;
  for (std::size_t j = 0; j < c.size(); ++j) acc = mod_reduce(acc + c[j] * a[j], g.exponent());
  return Phase(acc, g.exponent());
}

}  // namespace haarlab
