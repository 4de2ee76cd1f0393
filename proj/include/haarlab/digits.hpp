// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "haarlab/group.hpp"

namespace haarlab {

/// Base-p expansion, least-significant digit first, no stored leading
/// zeros. The printed convention "P(34) = ...0001021" reads most
/// significant on the left, so digits[0] is the rightmost printed digit.
struct DigitString {
  Residue base = 2;
  std::vector<int> digits;

  std::int64_t value() const {
    std::int64_t v = 0;
    for (std::size_t i = digits.size(); i-- > 0;) v = v * base + digits[i];
    return v;
  }
  int digit(std::size_t i) const {
    return i < digits.size() ? digits[i] : 0;
  }
};

inline DigitString p_ary(std::int64_t n, Residue p) {
  if (!is_prime(p)) throw std::invalid_argument("p_ary: base must be prime");
  if (n < 0) throw std::invalid_argument("p_ary: n must be nonnegative");
  DigitString d;
  d.base = p;
  while (n > 0) {
    d.digits.push_back(static_cast<int>(n % p));
    n /= p;
  }
  return d;
}

/// C(N,n) mod p by Lucas' theorem: the digitwise product of small
/// binomials. Returns 0 whenever some digit of n exceeds that of N.
inline Residue lucas_binom(std::int64_t N, std::int64_t n, Residue p) {
  if (!is_prime(p)) throw std::invalid_argument("lucas_binom: p must be prime");
  if (n < 0 || N < 0) return 0;
  Residue out = 1;
  while (n > 0 || N > 0) {
    Residue Nd = N % p, nd = n % p;
    if (nd > Nd) return 0;
    // C(Nd, nd) for digits < p, exact in 64 bits
    Residue c = 1;
    for (Residue i = 1; i <= nd; ++i) c = c * (Nd - nd + i) / i;
    out = mod_reduce(out * c, p);
    N /= p;
    n /= p;
  }
  return out;
}

/// Digit domination n << N: every base-p digit of n is <= that of N.
/// Equivalent to lucas_binom(N,n,p) != 0.
inline bool digit_dominates(std::int64_t n, std::int64_t N, Residue p) {
  if (!is_prime(p)) throw std::invalid_argument("digit_dominates: p must be prime");
  if (n < 0 || N < 0) return false;
  while (n > 0) {
    if (n % p > N % p) return false;
    n /= p;
    N /= p;
  }
  return true;
}

/// Gap and pattern census of P(j). A gap is a maximal run of zeros of
/// length >= gamma with nonzero digits on BOTH sides; a zero run touching
/// either end of the expansion is not delimited and does not count.
/// Pattern positions are least-significant indices: "0 q 1" (q = p-1)
/// occurring as digits [1, q, 0] at (i, i+1, i+2), and "1 0" as digits
/// [0, 1] at (i, i+1).
struct GapCensus {
  int gap_count = 0;
  std::vector<int> zq1_positions;
  std::vector<int> one_zero_positions;
};

inline GapCensus gap_census(std::int64_t j, Residue p, int gamma) {
  if (gamma < 1) throw std::invalid_argument("gap_census: gamma must be >= 1");
  DigitString d = p_ary(j, p);
  GapCensus out;
  const int len = static_cast<int>(d.digits.size());
  int run = 0;
  bool delimited_below = false;  // a nonzero digit seen below the current run
  for (int i = 0; i < len; ++i) {
    if (d.digits[static_cast<std::size_t>(i)] == 0) {
      ++run;
    } else {
      if (run >= gamma && delimited_below) ++out.gap_count;
      run = 0;
      delimited_below = true;
    }
  }
  // a trailing (most-significant) run has no delimiter above: not a gap
  // Patterns may use the implicit zeros above the top digit.
  const Residue q = p - 1;
  for (int i = 0; i + 1 < len; ++i) {
    if (d.digit(static_cast<std::size_t>(i)) == 1 &&
        d.digit(static_cast<std::size_t>(i + 1)) == q &&
        d.digit(static_cast<std::size_t>(i + 2)) == 0)
      out.zq1_positions.push_back(i);
  }
  for (int i = 0; i + 1 < len; ++i) {
    if (d.digits[static_cast<std::size_t>(i)] == 0 &&
        d.digits[static_cast<std::size_t>(i + 1)] == 1)
      out.one_zero_positions.push_back(i);
  }
  return out;
}

}  // namespace haarlab
