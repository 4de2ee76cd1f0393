// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "haarlab/digits.hpp"

using namespace haarlab;

namespace {

/// Pascal-recurrence oracle: full triangle mod p up to row N.
std::vector<std::vector<Residue>> pascal_mod(int N, Residue p) {
  std::vector<std::vector<Residue>> tri(static_cast<std::size_t>(N + 1));
  for (int i = 0; i <= N; ++i) {
    auto& row = tri[static_cast<std::size_t>(i)];
    row.assign(static_cast<std::size_t>(i + 1), 1);
    for (int j = 1; j < i; ++j)
      row[static_cast<std::size_t>(j)] =
          (tri[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
           tri[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)]) % p;
  }
  return tri;
}

}  // namespace

TEST_CASE("p_ary expansions") {
  CHECK(p_ary(34, 3).digits == std::vector<int>{1, 2, 0, 1});
  CHECK(p_ary(0, 2).digits.empty());
  CHECK(p_ary(7, 2).digits == std::vector<int>{1, 1, 1});
  CHECK_THROWS_AS(p_ary(5, 4), std::invalid_argument);
}

TEST_CASE("p_ary round trip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100000; ++trial) {
    std::int64_t n = static_cast<std::int64_t>(rng() % 1000000007ull);
    Residue p = std::vector<Residue>{2, 3, 5, 7, 11}[trial % 5];
    CHECK(p_ary(n, p).value() == n);
  }
}

TEST_CASE("lucas_binom examples") {
  CHECK(lucas_binom(34, 7, 3) == 1);
  CHECK(lucas_binom(200, 0, 5) == 1);
  CHECK(lucas_binom(4, 2, 2) == 0);
  CHECK(lucas_binom(3, 7, 2) == 0);  // n > N
}

TEST_CASE("lucas matches the Pascal oracle") {
  const int Nmax = 140;
  for (Residue p : {2, 3, 5, 7}) {
    auto tri = pascal_mod(Nmax, p);
    for (int N = 0; N <= Nmax; ++N)
      for (int n = 0; n <= N; ++n)
        REQUIRE(lucas_binom(N, n, p) == tri[static_cast<std::size_t>(N)][static_cast<std::size_t>(n)]);
  }
}

TEST_CASE("digit domination") {
  CHECK(digit_dominates(5, 7, 2));
  CHECK_FALSE(digit_dominates(2, 5, 2));
  CHECK(digit_dominates(41, 41, 3));
  // domination is exactly nonvanishing of the Lucas binomial
  for (Residue p : {2, 3, 5, 7})
    for (std::int64_t N = 0; N <= 160; ++N)
      for (std::int64_t n = 0; n <= N; ++n)
        REQUIRE(digit_dominates(n, N, p) == (lucas_binom(N, n, p) != 0));
}

TEST_CASE("gap census") {
  SECTION("delimited runs") {
    CHECK(gap_census(34, 3, 1).gap_count == 1);     // digits [1,2,0,1]
    CHECK(gap_census(7, 2, 1).gap_count == 0);      // all ones
    CHECK(gap_census(81, 3, 3).gap_count == 0);     // p^4: low run undelimited
    CHECK(gap_census(82, 3, 3).gap_count == 1);     // 1 0 0 0 1
    CHECK(gap_census(82, 3, 4).gap_count == 0);     // run shorter than gamma
  }
  SECTION("pattern positions") {
    // j = 18624 base 2: ones at 6,7,11,14
    GapCensus c = gap_census(18624, 2, 1);
    CHECK(c.zq1_positions == std::vector<int>{6});
    CHECK(c.one_zero_positions == std::vector<int>{5, 10, 13});
    // base 3: "0q1" means digits [1, 2, 0]
    std::int64_t j = 1 + 2 * 3 + 0 * 9 + 1 * 27;  // digits [1,2,0,1]
    CHECK(gap_census(j, 3, 1).zq1_positions == std::vector<int>{0});
  }
  SECTION("implicit leading zero can close a 0q1") {
    // digits [1, 1] over p=2: the zero above the top digit counts
    CHECK(gap_census(3, 2, 1).zq1_positions == std::vector<int>{0});
  }
}

TEST_CASE("gap density is nondecreasing once L clears gamma*R + 2R") {
  const Residue p = 2;
  for (auto [gamma, R] : {std::pair<int, int>{1, 1}, {2, 1}, {1, 2}}) {
    double prev = -1.0;
    for (int L = gamma * R + 2 * R; L <= 14; ++L) {
      std::int64_t total = std::int64_t{1} << L;
      std::int64_t hits = 0;
      for (std::int64_t j = 0; j < total; ++j) hits += (gap_census(j, p, gamma).gap_count >= R);
      double frac = static_cast<double>(hits) / static_cast<double>(total);
      CHECK(frac >= prev - 1e-15);
      prev = frac;
    }
  }
}
