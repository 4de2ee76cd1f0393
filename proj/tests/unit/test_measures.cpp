// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "haarlab/measures.hpp"

using namespace haarlab;
using Catch::Matchers::WithinAbs;

namespace {

Dmatrix matrix2(double a00, double a01, double a10, double a11) {
  Dmatrix Q(2);
  Q.at(0, 0) = a00;
  Q.at(0, 1) = a01;
  Q.at(1, 0) = a10;
  Q.at(1, 1) = a11;
  return Q;
}

/// Brute-force chain Fourier oracle: enumerate every path over the span.
Complex brute_chain_fourier(const Measure& mu, const Character& chi) {
  const std::int64_t n0 = chi.coeffs.begin()->first.c[0];
  const std::int64_t n1 = chi.coeffs.rbegin()->first.c[0];
  const std::int64_t S = mu.group.order();
  const std::int64_t len = n1 - n0 + 1;
  std::int64_t combos = 1;
  for (std::int64_t i = 0; i < len; ++i) combos *= S;
  Complex total{0.0, 0.0};
  for (std::int64_t idx = 0; idx < combos; ++idx) {
    std::vector<std::int64_t> path(static_cast<std::size_t>(len));
    std::int64_t rest = idx;
    for (std::int64_t i = 0; i < len; ++i) {
      path[static_cast<std::size_t>(i)] = rest % S;
      rest /= S;
    }
    double prob = mu.eta_at(n0)[static_cast<std::size_t>(path[0])];
    for (std::int64_t t = 0; t + 1 < len; ++t)
      prob *= mu.q_at(n0 + t).at(path[static_cast<std::size_t>(t + 1)], path[static_cast<std::size_t>(t)]);
    Complex val{1.0, 0.0};
    for (const auto& [site, c] : chi.coeffs)
      val *= pair_phase(mu.group, c, element_at(mu.group, path[static_cast<std::size_t>(site.c[0] - n0)]))
                 .to_complex();
    total += prob * val;
  }
  return total;
}

/// A random fully supported stationary 2-step spec on Z/2: random positive
/// conditionals closed with the stationary pair distribution.
NStepMarkovSpec random_two_step(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Group z2 = Group::cyclic(2);
  double cond[2][2][2];  // P(c | a,b)
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double u = 0.05 + 0.9 * (static_cast<double>(rng() % 10000) / 10000.0);
      cond[a][b][0] = u;
      cond[a][b][1] = 1.0 - u;
    }
  // stationary distribution of the pair chain (a,b) -> (b,c)
  Dmatrix pair_chain(4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) pair_chain.at(b + 2 * c, a + 2 * b) = cond[a][b][c];
  std::vector<double> pi = detail::solve_stationary(pair_chain);
  NStepMarkovSpec spec;
  spec.group = z2;
  spec.steps = 2;
  spec.probs.assign(8, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        spec.probs[static_cast<std::size_t>(a + 2 * b + 4 * c)] =
            pi[static_cast<std::size_t>(a + 2 * b)] * cond[a][b][c];
  return spec;
}

/// Direct cylinder probability of a stationary 2-step spec, bypassing the
/// recoding entirely.
double two_step_cylinder(const NStepMarkovSpec& spec, const std::vector<int>& word) {
  auto probs = [&](int a, int b, int c) {
    return spec.probs[static_cast<std::size_t>(a + 2 * b + 4 * c)];
  };
  if (word.empty()) return 1.0;
  if (word.size() == 1) {
    double total = 0.0;
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) total += probs(word[0], b, c);
    return total;
  }
  if (word.size() == 2) {
    double total = 0.0;
    for (int c = 0; c < 2; ++c) total += probs(word[0], word[1], c);
    return total;
  }
  double value = probs(word[0], word[1], word[2]);
  for (std::size_t i = 3; i < word.size(); ++i) {
    double marg = 0.0;
    for (int c = 0; c < 2; ++c) marg += probs(word[i - 2], word[i - 1], c);
    value *= probs(word[i - 2], word[i - 1], word[i]) / marg;
  }
  return value;
}

}  // namespace

TEST_CASE("make_measure validation and flags") {
  Group z2 = Group::cyclic(2);
  SECTION("uniform bernoulli has full support") {
    Measure mu = make_measure(BernoulliSpec{z2, {0.5, 0.5}});
    CHECK(mu.full_support);
  }
  SECTION("weights must sum to one") {
    CHECK_THROWS_AS(make_measure(BernoulliSpec{z2, {0.5, 0.4}}), std::invalid_argument);
  }
  SECTION("a zero transition entry clears the full-support flag") {
    Measure mu = make_measure(MarkovChainSpec{z2, {matrix2(1.0, 0.5, 0.0, 0.5)}, {}});
    CHECK_FALSE(mu.full_support);
  }
  SECTION("rows summing to one are rejected under the column convention") {
    CHECK_THROWS_AS(make_measure(MarkovChainSpec{z2, {matrix2(0.9, 0.1, 0.2, 0.8)}, {}}),
                    std::invalid_argument);
  }
  SECTION("semistationary closure is enforced") {
    Dmatrix Q = matrix2(0.9, 0.1, 0.1, 0.9);
    CHECK_THROWS_AS(make_measure(MarkovChainSpec{z2, {Q}, {{0.9, 0.1}}}), std::invalid_argument);
    Measure ok = make_measure(MarkovChainSpec{z2, {Q}, {{0.5, 0.5}}});
    CHECK(ok.full_support);
  }
}

TEST_CASE("measure_fourier") {
  Group z2 = Group::cyclic(2);
  Measure bern = make_measure(BernoulliSpec{z2, {0.9, 0.1}});
  SECTION("the trivial character integrates to one") {
    FourierReport rep = measure_fourier(bern, trivial_character(z2, 1));
    CHECK(rep.value == Complex{1.0, 0.0});
  }
  SECTION("rank-R coefficients are 0.8^R") {
    for (int R : {1, 2, 3, 5}) {
      std::vector<std::pair<Site, GroupElement>> entries;
      for (int i = 0; i < R; ++i) entries.emplace_back(Site(2 * i), GroupElement{1});
      FourierReport rep = measure_fourier(bern, make_character(z2, 1, entries));
      CHECK_THAT(rep.modulus, WithinAbs(std::pow(0.8, R), 1e-12));
      CHECK(rep.rank == R);
    }
  }
  SECTION("an iid chain degenerates to the bernoulli transform") {
    // every column equal to beta makes the chain independent
    Measure chain = make_measure(
        MarkovChainSpec{z2, {matrix2(0.9, 0.9, 0.1, 0.1)}, {}});
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<std::pair<Site, GroupElement>> entries;
      int terms = 1 + static_cast<int>(rng() % 4);
      for (int t = 0; t < terms; ++t)
        entries.emplace_back(Site(static_cast<std::int64_t>(rng() % 11)),
                             GroupElement{static_cast<Residue>(rng() % 2)});
      Character chi = make_character(z2, 1, entries);
      CHECK_THAT(std::abs(measure_fourier(chain, chi).value - measure_fourier(bern, chi).value),
                 WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("haar annihilates every nontrivial character") {
    Measure haar = make_measure(HaarSpec{z2});
    Character chi = make_character(z2, 1, {{Site(0), {1}}});
    CHECK(measure_fourier(haar, chi).modulus == 0.0);
  }
}

TEST_CASE("transfer product equals brute-force summation") {
  std::mt19937_64 rng(67);
  SECTION("binary chains on windows up to 12") {
    Group z2 = Group::cyclic(2);
    double eps = 0.1 + 0.8 * (static_cast<double>(rng() % 1000) / 1000.0);
    Measure chain = make_measure(MarkovChainSpec{z2, {matrix2(1 - eps, eps, eps, 1 - eps)}, {}});
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::pair<Site, GroupElement>> entries;
      int terms = 1 + static_cast<int>(rng() % 4);
      for (int t = 0; t < terms; ++t)
        entries.emplace_back(Site(static_cast<std::int64_t>(rng() % 12) - 4),
                             GroupElement{1 + static_cast<Residue>(rng() % 1)});
      Character chi = make_character(z2, 1, entries);
      if (chi.is_trivial()) continue;
      Complex fast = measure_fourier(chain, chi).value;
      CHECK_THAT(std::abs(fast - brute_chain_fourier(chain, chi)), WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("ternary chains on windows up to 8") {
    Group z3 = Group::cyclic(3);
    Dmatrix Q(3);
    double raw[3][3] = {{0.6, 0.2, 0.3}, {0.3, 0.5, 0.2}, {0.1, 0.3, 0.5}};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) Q.at(r, c) = raw[r][c];
    Measure chain = make_measure(MarkovChainSpec{z3, {Q}, {}});
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::pair<Site, GroupElement>> entries;
      int terms = 1 + static_cast<int>(rng() % 3);
      for (int t = 0; t < terms; ++t)
        entries.emplace_back(Site(static_cast<std::int64_t>(rng() % 8)),
                             GroupElement{1 + static_cast<Residue>(rng() % 2)});
      Character chi = make_character(z3, 1, entries);
      if (chi.is_trivial()) continue;
      Complex fast = measure_fourier(chain, chi).value;
      CHECK_THAT(std::abs(fast - brute_chain_fourier(chain, chi)), WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("a 2-periodic semistationary family") {
    Group z2 = Group::cyclic(2);
    Dmatrix Q1 = matrix2(0.8, 0.3, 0.2, 0.7);
    Dmatrix Q2 = matrix2(0.6, 0.4, 0.4, 0.6);
    // eta0 stationary for the full cycle Q2*Q1
    Dmatrix cycle(2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 2; ++k) cycle.at(r, c) += Q2.at(r, k) * Q1.at(k, c);
    std::vector<double> eta0 = detail::solve_stationary(cycle);
    std::vector<double> eta1 = {Q1.at(0, 0) * eta0[0] + Q1.at(0, 1) * eta0[1],
                                Q1.at(1, 0) * eta0[0] + Q1.at(1, 1) * eta0[1]};
    Measure chain = make_measure(MarkovChainSpec{z2, {Q1, Q2}, {eta0, eta1}});
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::pair<Site, GroupElement>> entries;
      int terms = 1 + static_cast<int>(rng() % 4);
      for (int t = 0; t < terms; ++t)
        entries.emplace_back(Site(static_cast<std::int64_t>(rng() % 10) - 5), GroupElement{1});
      Character chi = make_character(z2, 1, entries);
      if (chi.is_trivial()) continue;
      CHECK_THAT(std::abs(measure_fourier(chain, chi).value - brute_chain_fourier(chain, chi)),
                 WithinAbs(0.0, 1e-10));
    }
  }
}

TEST_CASE("ehm_lambda") {
  Group z2 = Group::cyclic(2);
  SECTION("the symmetric 0.9/0.1 chain") {
    double lambda = ehm_lambda({matrix2(0.9, 0.1, 0.1, 0.9)}, z2);
    CHECK_THAT(lambda, WithinAbs(-0.5 * std::log(0.8), 1e-12));
  }
  SECTION("the uniform chain mixes instantly") {
    CHECK(std::isinf(ehm_lambda({matrix2(0.5, 0.5, 0.5, 0.5)}, z2)));
  }
  SECTION("near-deterministic chains give small positive lambda") {
    double lambda = ehm_lambda({matrix2(0.999, 0.001, 0.001, 0.999)}, z2);
    CHECK(lambda > 0.0);
    CHECK(lambda < 0.01);
  }
  SECTION("empty families are rejected") {
    CHECK_THROWS_AS(ehm_lambda({}, z2), std::invalid_argument);
  }
}

TEST_CASE("ehm envelope bounds every enumerated character") {
  Group z2 = Group::cyclic(2);
  SECTION("stationary chain, window 10") {
    Measure chain = make_measure(MarkovChainSpec{z2, {matrix2(0.9, 0.1, 0.1, 0.9)}, {}});
    double lambda = ehm_lambda(chain);
    for (std::int64_t mask = 1; mask < (1 << 10); ++mask) {
      std::vector<std::pair<Site, GroupElement>> entries;
      for (int i = 0; i < 10; ++i)
        if (mask & (1 << i)) entries.emplace_back(Site(i), GroupElement{1});
      Character chi = make_character(z2, 1, entries);
      double modulus = measure_fourier(chain, chi).modulus;
      REQUIRE(modulus <= std::exp(-lambda * chi.rank()) + 1e-12);
    }
  }
  SECTION("semistationary chain assembled from a two-matrix family") {
    Dmatrix Q1 = matrix2(0.85, 0.25, 0.15, 0.75);
    Dmatrix Q2 = matrix2(0.7, 0.4, 0.3, 0.6);
    Dmatrix cycle(2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 2; ++k) cycle.at(r, c) += Q2.at(r, k) * Q1.at(k, c);
    std::vector<double> eta0 = detail::solve_stationary(cycle);
    std::vector<double> eta1 = {Q1.at(0, 0) * eta0[0] + Q1.at(0, 1) * eta0[1],
                                Q1.at(1, 0) * eta0[0] + Q1.at(1, 1) * eta0[1]};
    Measure chain = make_measure(MarkovChainSpec{z2, {Q1, Q2}, {eta0, eta1}});
    double lambda = ehm_lambda(chain);
    for (std::int64_t mask = 1; mask < (1 << 10); ++mask) {
      std::vector<std::pair<Site, GroupElement>> entries;
      for (int i = 0; i < 10; ++i)
        if (mask & (1 << i)) entries.emplace_back(Site(i), GroupElement{1});
      Character chi = make_character(z2, 1, entries);
      double modulus = measure_fourier(chain, chi).modulus;
      REQUIRE(modulus <= std::exp(-lambda * chi.rank()) + 1e-12);
    }
  }
}

TEST_CASE("pushforward_fourier") {
  Group z2 = Group::cyclic(2);
  Measure bern = make_measure(BernoulliSpec{z2, {0.9, 0.1}});
  Lca lind = make_scalar_lca(z2, 1, {{Site(-1), 1}, {Site(1), 1}});
  Character chi = make_character(z2, 1, {{Site(0), {1}}});
  SECTION("N=0 is the plain transform") {
    CHECK(pushforward_fourier(bern, chi, lind, 0).value == measure_fourier(bern, chi).value);
  }
  SECTION("uniform product measures stay at zero") {
    Measure haar_like = make_measure(BernoulliSpec{z2, {0.5, 0.5}});
    for (int N : {0, 1, 5}) {
      CHECK_THAT(pushforward_fourier(haar_like, chi, lind, N).modulus, WithinAbs(0.0, 1e-15));
    }
  }
  SECTION("modulus follows the rank trajectory") {
    for (int N : {1, 2, 3, 4, 7}) {
      int rank = char_power(chi, lind, N).rank();
      CHECK_THAT(pushforward_fourier(bern, chi, lind, N).modulus,
                 WithinAbs(std::pow(0.8, rank), 1e-12));
    }
  }
}

TEST_CASE("cesaro_scan") {
  Group z2 = Group::cyclic(2);
  Lca lind = make_scalar_lca(z2, 1, {{Site(-1), 1}, {Site(1), 1}});
  Cylinder cyl;
  cyl.sites = {Site(0)};
  cyl.values = {GroupElement{0}};
  SECTION("per-N values follow the digit-sum formula") {
    Measure bern = make_measure(BernoulliSpec{z2, {0.9, 0.1}});
    CesaroReport rep = cesaro_scan(bern, cyl, lind, 64, "pow2");
    for (std::int64_t N = 1; N <= 64; ++N) {
      int ones = 0;
      for (std::int64_t v = N; v; v >>= 1) ones += static_cast<int>(v & 1);
      double expect = (1.0 + std::pow(0.8, 1 << ones)) / 2.0;
      CHECK_THAT(rep.values[static_cast<std::size_t>(N - 1)], WithinAbs(expect, 1e-12));
    }
    REQUIRE(rep.subsequence.size() == 7);  // 1,2,4,...,64
    for (const auto& [N, v] : rep.subsequence) CHECK_THAT(v, WithinAbs(0.82, 1e-12));
  }
  SECTION("haar reference stays at one half") {
    Measure haar = make_measure(HaarSpec{z2});
    CesaroReport rep = cesaro_scan(haar, cyl, lind, 32, "none");
    for (double v : rep.values) CHECK_THAT(v, WithinAbs(0.5, 1e-15));
    CHECK(rep.density[0].second == 1.0);
  }
  SECTION("character targets trace the coefficient modulus") {
    Measure bern = make_measure(BernoulliSpec{z2, {0.9, 0.1}});
    Character chi = make_character(z2, 1, {{Site(0), {1}}});
    CesaroReport rep = cesaro_scan(bern, chi, lind, 16, "none");
    CHECK_FALSE(rep.cylinder_mode);
    for (std::int64_t N = 1; N <= 16; ++N) {
      int rank = char_power(chi, lind, N).rank();
      CHECK_THAT(rep.values[static_cast<std::size_t>(N - 1)],
                 WithinAbs(std::pow(0.8, rank), 1e-12));
    }
  }
}

TEST_CASE("fourier inversion produces a true distribution") {
  Group z2 = Group::cyclic(2);
  Measure bern = make_measure(BernoulliSpec{z2, {0.7, 0.3}});
  Lca lind = make_scalar_lca(z2, 1, {{Site(-1), 1}, {Site(1), 1}});
  std::vector<Site> B = {Site(0), Site(3)};
  const int N = 2;
  double total = 0.0;
  for (int b0 = 0; b0 < 2; ++b0)
    for (int b1 = 0; b1 < 2; ++b1) {
      Complex acc{1.0, 0.0};  // trivial character
      for (int c0 = 0; c0 < 2; ++c0)
        for (int c1 = 0; c1 < 2; ++c1) {
          if (!c0 && !c1) continue;
          Character chi = make_character(
              z2, 1, {{B[0], GroupElement{c0}}, {B[1], GroupElement{c1}}});
          Phase at_b = pair_phase(z2, {c0}, {b0}) + pair_phase(z2, {c1}, {b1});
          acc += std::conj(at_b.to_complex()) * measure_fourier(bern, char_power(chi, lind, N)).value;
        }
      double prob = acc.real() / 4.0;
      CHECK(prob >= -1e-12);
      CHECK(prob <= 1.0 + 1e-12);
      total += prob;
    }
  CHECK_THAT(total, WithinAbs(1.0, 1e-10));
}

TEST_CASE("n-step recoding") {
  NStepMarkovSpec spec = random_two_step(101);
  Measure mu = make_measure(spec);
  REQUIRE(mu.full_support);
  REQUIRE(mu.alphabet == 4);
  SECTION("recoded chain reproduces all length-4 words") {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            double direct = two_step_cylinder(spec, {a, b, c, d});
            // path x0=(a,b), x1=(b,c), x2=(c,d) through the recoded chain
            std::int64_t x0 = a + 2 * b, x1 = b + 2 * c, x2 = c + 2 * d;
            double recoded = mu.etas[0][static_cast<std::size_t>(x0)] *
                             mu.matrices[0].at(x1, x0) * mu.matrices[0].at(x2, x1);
            CHECK_THAT(recoded, WithinAbs(direct, 1e-12));
          }
  }
  SECTION("cylinders up to length U+3 match the direct formula") {
    for (int len = 1; len <= 5; ++len) {
      for (std::int64_t mask = 0; mask < (1 << len); ++mask) {
        std::vector<int> word;
        Cylinder cyl;
        for (int i = 0; i < len; ++i) {
          int letter = static_cast<int>((mask >> i) & 1);
          word.push_back(letter);
          cyl.sites.push_back(Site(i));
          cyl.values.push_back(GroupElement{letter});
        }
        CHECK_THAT(measure_cylinder(mu, cyl), WithinAbs(two_step_cylinder(spec, word), 1e-10));
      }
    }
  }
  SECTION("fourier through the recoding matches full enumeration") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::pair<Site, GroupElement>> entries;
      int terms = 1 + static_cast<int>(rng() % 3);
      for (int t = 0; t < terms; ++t)
        entries.emplace_back(Site(static_cast<std::int64_t>(rng() % 6)), GroupElement{1});
      Character chi = make_character(Group::cyclic(2), 1, entries);
      if (chi.is_trivial()) continue;
      // oracle: sum over all words covering the span
      std::int64_t n0 = chi.coeffs.begin()->first.c[0];
      std::int64_t n1 = chi.coeffs.rbegin()->first.c[0];
      int len = static_cast<int>(n1 - n0 + 1);
      Complex oracle{0.0, 0.0};
      for (std::int64_t mask = 0; mask < (std::int64_t{1} << len); ++mask) {
        std::vector<int> word;
        for (int i = 0; i < len; ++i) word.push_back(static_cast<int>((mask >> i) & 1));
        Complex val{1.0, 0.0};
        for (const auto& [site, c] : chi.coeffs)
          val *= pair_phase(Group::cyclic(2), c, {word[static_cast<std::size_t>(site.c[0] - n0)]})
                     .to_complex();
        oracle += two_step_cylinder(spec, word) * val;
      }
      CHECK_THAT(std::abs(measure_fourier(mu, chi).value - oracle), WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("inconsistent marginals are rejected") {
    NStepMarkovSpec bad = spec;
    // moving mass between (0,0,0) and (1,0,0) keeps the total but skews
    // the left window marginal against the right one
    bad.probs[0] += 0.01;
    bad.probs[1] -= 0.01;
    CHECK_THROWS_AS(make_measure(bad), std::invalid_argument);
  }
}

TEST_CASE("hm_scan") {
  Group z2 = Group::cyclic(2);
  SECTION("uniform bernoulli maxima vanish") {
    Measure uniform = make_measure(BernoulliSpec{z2, {0.5, 0.5}});
    HmScanReport rep = hm_scan(uniform, 4, 8);
    REQUIRE(rep.exhaustive);
    for (const auto& row : rep.rows) CHECK_THAT(row.max_modulus, WithinAbs(0.0, 1e-15));
  }
  SECTION("biased bernoulli maxima are 0.8^r") {
    Measure bern = make_measure(BernoulliSpec{z2, {0.9, 0.1}});
    HmScanReport rep = hm_scan(bern, 4, 8);
    REQUIRE(rep.exhaustive);
    for (const auto& row : rep.rows)
      CHECK_THAT(row.max_modulus, WithinAbs(std::pow(0.8, row.rank), 1e-12));
  }
  SECTION("markov scan stays under the lambda envelope") {
    Measure chain = make_measure(MarkovChainSpec{z2, {matrix2(0.9, 0.1, 0.1, 0.9)}, {}});
    double lambda = ehm_lambda(chain);
    HmScanReport rep = hm_scan(chain, 5, 12, 0, 0, lambda);
    for (const auto& row : rep.rows) {
      CHECK(row.max_modulus <= row.envelope + 1e-12);
      CHECK_THAT(row.envelope, WithinAbs(std::exp(-lambda * row.rank), 1e-15));
    }
  }
  SECTION("sampled mode is deterministic in the seed") {
    Group z4 = Group::cyclic(4);
    Measure bern = make_measure(BernoulliSpec{z4, {0.4, 0.3, 0.2, 0.1}});
    HmScanReport a = hm_scan(bern, 3, 40, 99, 50);
    HmScanReport b = hm_scan(bern, 3, 40, 99, 50);
    REQUIRE_FALSE(a.exhaustive);
    for (std::size_t i = 0; i < a.rows.size(); ++i)
      CHECK(a.rows[i].max_modulus == b.rows[i].max_modulus);
  }
}

TEST_CASE("monte_carlo_check") {
  Group z2 = Group::cyclic(2);
  Lca lind = make_scalar_lca(z2, 1, {{Site(-1), 1}, {Site(1), 1}});
  Cylinder cyl;
  cyl.sites = {Site(0)};
  cyl.values = {GroupElement{0}};
  SECTION("haar sampling hits the exact cylinder weight") {
    Measure haar = make_measure(HaarSpec{z2});
    McReport rep = monte_carlo_check(haar, lind, {4}, cyl, 20000, 7, 2);
    double sigma = std::sqrt(0.25 / 20000.0);
    CHECK(std::abs(rep.rows[0].frequency - 0.5) <= 4.0 * sigma);
  }
  SECTION("agreement with the exact scan at N=8") {
    Measure bern = make_measure(BernoulliSpec{z2, {0.9, 0.1}});
    CesaroReport exact = cesaro_scan(bern, cyl, lind, 8, "none");
    McReport rep = monte_carlo_check(bern, lind, {8}, cyl, 20000, 12345, 2);
    double q = exact.values[7];
    double sigma = std::sqrt(q * (1.0 - q) / 20000.0);
    CHECK(std::abs(rep.rows[0].frequency - q) <= 4.0 * sigma);
  }
  SECTION("markov window sampling agrees with the exact scan") {
    Measure chain = make_measure(
        MarkovChainSpec{z2, {matrix2(0.8, 0.3, 0.2, 0.7)}, {}});
    CesaroReport exact = cesaro_scan(chain, cyl, lind, 4, "none");
    McReport rep = monte_carlo_check(chain, lind, {4}, cyl, 40000, 2024, 2);
    double q = exact.values[3];
    double sigma = std::sqrt(q * (1.0 - q) / 40000.0);
    CHECK(std::abs(rep.rows[0].frequency - q) <= 4.0 * sigma);
  }
  SECTION("zero samples are rejected") {
    Measure haar = make_measure(HaarSpec{z2});
    CHECK_THROWS_AS(monte_carlo_check(haar, lind, {4}, cyl, 0, 7), std::invalid_argument);
  }
  SECTION("results are identical across worker counts") {
    Measure bern = make_measure(BernoulliSpec{z2, {0.9, 0.1}});
    McReport one = monte_carlo_check(bern, lind, {4, 8}, cyl, 5000, 42, 1);
    McReport four = monte_carlo_check(bern, lind, {4, 8}, cyl, 5000, 42, 4);
    REQUIRE(one.rows.size() == four.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i)
      CHECK(one.rows[i].frequency == four.rows[i].frequency);
  }
}
