// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace haarlab {

/// A lattice site in Z^D, D in {1,2}. Ordered lexicographically so that
/// coefficient maps have a canonical, reproducible iteration order.
struct Site {
  std::array<std::int64_t, 2> c{0, 0};
  int dim = 1;

  Site() = default;
  explicit Site(std::int64_t x) : c{x, 0}, dim(1) {}
  Site(std::int64_t x, std::int64_t y) : c{x, y}, dim(2) {}

  static Site of(const std::initializer_list<std::int64_t>& xs) {
    if (xs.size() != 1 && xs.size() != 2)
      throw std::invalid_argument("site dimension must be 1 or 2");
    Site s;
    s.dim = static_cast<int>(xs.size());
    int i = 0;
    for (auto x : xs) s.c[i++] = x;
    return s;
  }

  std::int64_t operator[](int i) const { return c[i]; }

  friend Site operator+(const Site& a, const Site& b) {
    Site s = a;
    for (int i = 0; i < a.dim; ++i) s.c[i] += b.c[i];
    return s;
  }
  friend Site operator-(const Site& a, const Site& b) {
    Site s = a;
    for (int i = 0; i < a.dim; ++i) s.c[i] -= b.c[i];
    return s;
  }
  friend bool operator==(const Site& a, const Site& b) {
    return a.dim == b.dim && a.c == b.c;
  }
  friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
  friend bool operator<(const Site& a, const Site& b) {
    if (a.c[0] != b.c[0]) return a.c[0] < b.c[0];
    return a.c[1] < b.c[1];
  }
};

inline std::string to_string(const Site& s) {
  std::string out = "(" + std::to_string(s.c[0]);
  if (s.dim == 2) out += "," + std::to_string(s.c[1]);
  return out + ")";
}

}  // namespace haarlab
