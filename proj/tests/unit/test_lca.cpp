// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "haarlab/lca.hpp"

using namespace haarlab;

namespace {

Character random_character(std::mt19937_64& rng, const Group& g, int dim, int radius,
                           int max_terms) {
  std::vector<std::pair<Site, GroupElement>> entries;
  int terms = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_terms));
  for (int t = 0; t < terms; ++t) {
    std::int64_t x = static_cast<std::int64_t>(rng() % (2 * radius + 1)) - radius;
    Site s = dim == 1 ? Site(x)
                      : Site(x, static_cast<std::int64_t>(rng() % (2 * radius + 1)) - radius);
    GroupElement c = zero_element(g);
    for (auto& v : c) v = static_cast<Residue>(rng() % static_cast<std::uint64_t>(g.exponent()));
    entries.emplace_back(s, c);
  }
  return make_character(g, dim, entries);
}

Lca random_lca(std::mt19937_64& rng, const Group& g, int dim, int radius, int max_terms) {
  std::vector<std::pair<Site, Endo>> entries;
  int terms = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_terms));
  for (int t = 0; t < terms; ++t) {
    std::int64_t x = static_cast<std::int64_t>(rng() % (2 * radius + 1)) - radius;
    Site s = dim == 1 ? Site(x)
                      : Site(x, static_cast<std::int64_t>(rng() % (2 * radius + 1)) - radius);
    if (g.is_cyclic()) {
      entries.emplace_back(s, Endo::scalar(g, static_cast<Residue>(rng() % static_cast<std::uint64_t>(g.n))));
    } else {
      std::vector<Residue> e;
      for (int i = 0; i < g.J * g.J; ++i)
        e.push_back(static_cast<Residue>(rng() % static_cast<std::uint64_t>(g.exponent())));
      entries.emplace_back(s, Endo::matrix(g, e));
    }
  }
  return make_lca(g, dim, entries);
}

Configuration random_configuration(std::mt19937_64& rng, const Group& g,
                                   const std::vector<std::int64_t>& lengths) {
  Configuration a = make_configuration(g, lengths);
  for (auto& cell : a.cells)
    for (auto& v : cell) v = static_cast<Residue>(rng() % static_cast<std::uint64_t>(g.exponent()));
  return a;
}

}  // namespace

TEST_CASE("make_lca prunes and flags") {
  Group z8 = Group::cyclic(8);
  Lca F = make_scalar_lca(z8, 1, {{Site(-1), 1}, {Site(1), 3}, {Site(2), 5}});
  CHECK(F.coeffs.size() == 3);
  CHECK(F.is_nontrivial());

  Lca id = make_lca(z8, 1, {{Site(0), identity_endo(z8)}});
  CHECK_FALSE(id.is_nontrivial());

  Lca zero = make_scalar_lca(z8, 1, {{Site(0), 4}, {Site(0), 4}});
  CHECK(zero.coeffs.empty());
  CHECK_FALSE(zero.is_nontrivial());
}

TEST_CASE("apply_lca") {
  SECTION("delta propagation with torus wrap") {
    Group z7 = Group::cyclic(7);
    Lca F = make_scalar_lca(z7, 1, {{Site(-1), 1}, {Site(1), 3}, {Site(2), 5}});
    Configuration a = make_configuration(z7, {8});
    a.at(Site(0)) = GroupElement{1};
    Configuration b = apply_lca(F, a);
    CHECK(b.at(Site(1)) == GroupElement{1});
    CHECK(b.at(Site(-1)) == GroupElement{3});
    CHECK(b.at(Site(-2)) == GroupElement{5});
    CHECK(b.at(Site(0)) == GroupElement{0});
    CHECK(b.at(Site(2)) == GroupElement{0});
    CHECK(b.at(Site(3)) == GroupElement{0});
  }
  SECTION("identity leaves configurations alone") {
    Group z8 = Group::cyclic(8);
    std::mt19937_64 rng(5);
    Configuration a = random_configuration(rng, z8, {6});
    Lca id = make_lca(z8, 1, {{Site(0), identity_endo(z8)}});
    CHECK(apply_lca(id, a).cells == a.cells);
  }
  SECTION("the two-sided neighbor automaton") {
    Group z2 = Group::cyclic(2);
    Lca F = make_scalar_lca(z2, 1, {{Site(-1), 1}, {Site(1), 1}});
    Configuration a = make_configuration(z2, {4});
    a.at(Site(0)) = GroupElement{1};
    Configuration b = apply_lca(F, a);
    CHECK(b.cells == std::vector<GroupElement>{{0}, {1}, {0}, {1}});
  }
  SECTION("window too small aliases and throws") {
    Group z2 = Group::cyclic(2);
    Lca F = make_scalar_lca(z2, 1, {{Site(-1), 1}, {Site(1), 1}});
    Configuration a = make_configuration(z2, {2});
    CHECK_THROWS_AS(apply_lca(F, a), std::invalid_argument);
  }
}

TEST_CASE("char_eval") {
  Group z6 = Group::cyclic(6);
  Configuration a = make_configuration(z6, {5});
  a.at(Site(0)) = GroupElement{1};
  a.at(Site(1)) = GroupElement{1};
  CHECK(char_eval(trivial_character(z6, 1), a) == Phase(0, 1));
  Character chi = make_character(z6, 1, {{Site(0), {2}}, {Site(1), {3}}});
  Phase got = char_eval(chi, a);
  CHECK(got == Phase(5, 6));
  // cross-check through complex arithmetic
  CHECK(std::abs(got.to_complex() -
                 pair_phase(z6, {2}, {1}).to_complex() * pair_phase(z6, {3}, {1}).to_complex()) < 1e-12);

  Group z2 = Group::cyclic(2);
  Configuration b = make_configuration(z2, {3});
  b.at(Site(0)) = GroupElement{1};
  CHECK(char_eval(make_character(z2, 1, {{Site(0), {1}}}), b) == Phase(1, 2));
}

TEST_CASE("compose_char") {
  SECTION("trivial stays trivial") {
    Group z8 = Group::cyclic(8);
    Lca F = make_scalar_lca(z8, 1, {{Site(0), 1}, {Site(1), 2}});
    CHECK(compose_char(trivial_character(z8, 1), F).is_trivial());
  }
  SECTION("the example automaton's adjoint kills the second term") {
    Group v2 = Group::vector_group(2, 1, 2);
    Lca F = make_lca(v2, 1, {{Site(0), Endo::matrix(v2, {0, 1, 1, 0})},
                             {Site(1), Endo::matrix(v2, {0, 0, 0, 1})}});
    Character chi = make_character(v2, 1, {{Site(0), {1, 0}}});
    Character out = compose_char(chi, F);
    CHECK(out.rank() == 1);
    REQUIRE(out.coeffs.count(Site(0)) == 1);
    CHECK(out.coeffs.at(Site(0)) == GroupElement{0, 1});
  }
  SECTION("binary two-term push") {
    Group z2 = Group::cyclic(2);
    Lca F = make_scalar_lca(z2, 1, {{Site(0), 1}, {Site(1), 1}});
    Character chi = make_character(z2, 1, {{Site(0), {1}}});
    Character out = compose_char(chi, F);
    CHECK(out.rank() == 2);
    CHECK(out.coeffs.count(Site(0)) == 1);
    CHECK(out.coeffs.count(Site(1)) == 1);
  }
  SECTION("defining identity chi(F a) = (chi o F)(a)") {
    std::mt19937_64 rng(17);
    for (const Group& g : {Group::cyclic(6), Group::vector_group(2, 1, 2)}) {
      for (int trial = 0; trial < 100; ++trial) {
        Character chi = random_character(rng, g, 1, 2, 3);
        Lca F = random_lca(rng, g, 1, 2, 3);
        Configuration a = random_configuration(rng, g, {11});
        CHECK(char_eval(compose_char(chi, F), a) == char_eval(chi, apply_lca(F, a)));
      }
    }
  }
}

TEST_CASE("char_power") {
  SECTION("the mod-8 identity power") {
    Group z8 = Group::cyclic(8);
    Lca F = make_scalar_lca(z8, 1, {{Site(0), 1}, {Site(1), 2}});
    Character chi = make_character(z8, 1, {{Site(0), {1}}});
    Character out = char_power(chi, F, 4);
    CHECK(out.rank() == 1);
    CHECK(out.coeffs.at(Site(0)) == GroupElement{1});
  }
  SECTION("freshman's dream") {
    Group z2 = Group::cyclic(2);
    Lca F = make_scalar_lca(z2, 1, {{Site(0), 1}, {Site(1), 1}});
    Character chi = make_character(z2, 1, {{Site(0), {1}}});
    Character out = char_power(chi, F, 2);
    CHECK(out.rank() == 2);
    CHECK(out.coeffs.count(Site(0)) == 1);
    CHECK(out.coeffs.count(Site(2)) == 1);
  }
  SECTION("N=0 is the identity") {
    Group z6 = Group::cyclic(6);
    std::mt19937_64 rng(23);
    Character chi = random_character(rng, z6, 1, 3, 4);
    Lca F = random_lca(rng, z6, 1, 2, 3);
    CHECK(char_power(chi, F, 0).coeffs == chi.coeffs);
  }
  SECTION("squaring path equals the N-fold pushforward") {
    std::mt19937_64 rng(29);
    for (const Group& g : {Group::cyclic(12), Group::cyclic(2)}) {
      for (int trial = 0; trial < 10; ++trial) {
        Character chi = random_character(rng, g, 1, 2, 3);
        Lca F = random_lca(rng, g, 1, 1, 2);
        Character fold = chi;
        for (int N = 1; N <= 64; ++N) {
          fold = compose_char(fold, F);
          if (N <= 8 || N == 64) {
            Character fast = char_power(chi, F, N);
            CHECK(fast.coeffs == fold.coeffs);
          }
        }
      }
    }
  }
  SECTION("two-dimensional scalar powers agree with the fold") {
    Group z4 = Group::cyclic(4);
    std::mt19937_64 rng(31);
    Character chi = random_character(rng, z4, 2, 1, 2);
    Lca F = random_lca(rng, z4, 2, 1, 3);
    Character fold = chi;
    for (int N = 1; N <= 6; ++N) fold = compose_char(fold, F);
    CHECK(char_power(chi, F, 6).coeffs == fold.coeffs);
  }
}

TEST_CASE("lca_power_coeffs") {
  Group z8 = Group::cyclic(8);
  Lca F = make_scalar_lca(z8, 1, {{Site(0), 1}, {Site(1), 2}});
  SECTION("mod-8 counterexample returns to the identity") {
    Lca P4 = lca_power_coeffs(F, 4);
    REQUIRE(P4.coeffs.size() == 1);
    CHECK(P4.coeffs.at(Site(0)) == Endo::scalar(z8, 1));
  }
  SECTION("binary fourth power") {
    Group z2 = Group::cyclic(2);
    Lca G = make_scalar_lca(z2, 1, {{Site(0), 1}, {Site(1), 1}});
    Lca P4 = lca_power_coeffs(G, 4);
    CHECK(P4.coeffs.size() == 2);
    CHECK(P4.coeffs.count(Site(0)) == 1);
    CHECK(P4.coeffs.count(Site(4)) == 1);
  }
  SECTION("first power is the automaton itself") {
    CHECK(lca_power_coeffs(F, 1).coeffs == F.coeffs);
  }
  SECTION("matrix powers by convolution match step-by-step composition") {
    Group v2 = Group::vector_group(2, 1, 2);
    std::mt19937_64 rng(37);
    Lca G = random_lca(rng, v2, 1, 1, 3);
    // fold with one extra convolution at a time
    Lca fold = lca_power_coeffs(G, 1);
    for (int N = 2; N <= 10; ++N) {
      Lca direct = lca_power_coeffs(G, N);
      // fold * G
      std::vector<std::pair<Site, Endo>> entries;
      for (const auto& [sa, fa] : fold.coeffs)
        for (const auto& [sb, fb] : G.coeffs)
          entries.emplace_back(sa + sb, endo_compose(v2, fa, fb));
      fold = make_lca(v2, 1, entries);
      CHECK(direct.coeffs == fold.coeffs);
    }
  }
}

TEST_CASE("crt_split") {
  SECTION("groups") {
    auto comps = crt_split(Group::cyclic(12));
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == Group::cyclic(4));
    CHECK(comps[1] == Group::cyclic(3));
    CHECK(crt_split(Group::cyclic(8)) == std::vector<Group>{Group::cyclic(8)});
  }
  SECTION("automata") {
    Group z6 = Group::cyclic(6);
    Lca F = make_scalar_lca(z6, 1, {{Site(0), 1}, {Site(1), 1}});
    auto parts = crt_split(F);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].group == Group::cyclic(2));
    CHECK(parts[0].coeffs.at(Site(0)) == Endo::scalar(parts[0].group, 1));
    CHECK(parts[1].group == Group::cyclic(3));
    CHECK(parts[1].coeffs.size() == 2);
  }
  SECTION("characters reduce and recombine") {
    Group z12 = Group::cyclic(12);
    Character chi = make_character(z12, 1, {{Site(0), {10}}});
    auto parts = crt_split(chi);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].coeffs.at(Site(0)) == GroupElement{2});  // 10 mod 4
    CHECK(parts[1].coeffs.at(Site(0)) == GroupElement{1});  // 10 mod 3
    Character back = crt_combine(z12, parts);
    CHECK(back.coeffs == chi.coeffs);
  }
  SECTION("prime powers are singletons") {
    Group z9 = Group::cyclic(9);
    Character chi = make_character(z9, 1, {{Site(2), {4}}});
    auto parts = crt_split(chi);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].coeffs == chi.coeffs);
  }
}

TEST_CASE("crt coherence of evaluation") {
  std::mt19937_64 rng(43);
  for (Residue n : {6, 12}) {
    Group g = Group::cyclic(n);
    for (int trial = 0; trial < 200; ++trial) {
      Character chi = random_character(rng, g, 1, 3, 3);
      Configuration a = random_configuration(rng, g, {9});
      auto parts = crt_split(chi);
      Phase total(0, 1);
      for (const Character& part : parts) {
        Configuration ap = make_configuration(part.group, {9});
        for (std::size_t i = 0; i < a.cells.size(); ++i)
          ap.cells[i] = GroupElement{mod_reduce(a.cells[i][0], part.group.n)};
        total = total + char_eval(part, ap);
      }
      CHECK(total == char_eval(chi, a));
    }
  }
}

TEST_CASE("shift commutation") {
  Group z6 = Group::cyclic(6);
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    Character chi = random_character(rng, z6, 1, 2, 3);
    Lca F = random_lca(rng, z6, 1, 2, 3);
    std::int64_t e = static_cast<std::int64_t>(rng() % 7) - 3;
    // sigma^e o F has every coefficient site translated by e
    std::vector<std::pair<Site, Endo>> shifted;
    for (const auto& [s, f] : F.coeffs) shifted.emplace_back(s + Site(e), f);
    Lca G = make_lca(z6, 1, shifted);
    Character lhs = compose_char(chi, G);
    Character rhs = char_translate(compose_char(chi, F), Site(e));
    CHECK(lhs.coeffs == rhs.coeffs);
  }
}

TEST_CASE("rank bound under crt components") {
  std::mt19937_64 rng(53);
  Group z12 = Group::cyclic(12);
  for (int trial = 0; trial < 50; ++trial) {
    Character chi = random_character(rng, z12, 1, 2, 2);
    if (chi.is_trivial()) continue;
    Lca F = random_lca(rng, z12, 1, 1, 3);
    auto chis = crt_split(chi);
    auto Fs = crt_split(F);
    for (int N = 1; N <= 6; ++N) {
      int full = char_power(chi, F, N).rank();
      for (std::size_t j = 0; j < chis.size(); ++j)
        CHECK(full >= char_power(chis[j], Fs[j], N).rank());
    }
  }
}

TEST_CASE("pushforward soundness on random cases") {
  std::mt19937_64 rng(59);
  for (const Group& g : {Group::cyclic(2), Group::cyclic(6), Group::vector_group(2, 1, 2)}) {
    for (int trial = 0; trial < 50; ++trial) {
      Character chi = random_character(rng, g, 1, 2, 2);
      Lca F = random_lca(rng, g, 1, 2, 3);
      int N = 1 + static_cast<int>(rng() % 5);
      std::int64_t L = 2 * (2 + static_cast<std::int64_t>(N) * 2) + 1;
      Configuration a = random_configuration(rng, g, {L});
      Configuration b = a;
      for (int i = 0; i < N; ++i) b = apply_lca(F, b);
      CHECK(char_eval(char_power(chi, F, N), a) == char_eval(chi, b));
    }
  }
}

TEST_CASE("diffusion_hypothesis") {
  Group z6 = Group::cyclic(6);
  Lca F6 = make_scalar_lca(z6, 1, {{Site(0), 1}, {Site(1), 1}});
  DiffusionHypothesis h6 = diffusion_hypothesis(F6);
  CHECK(h6.coprime_counts == std::map<Residue, int>{{2, 2}, {3, 2}});
  CHECK(h6.satisfied);

  Group z8 = Group::cyclic(8);
  Lca F8 = make_scalar_lca(z8, 1, {{Site(0), 1}, {Site(1), 2}});
  DiffusionHypothesis h8 = diffusion_hypothesis(F8);
  CHECK(h8.coprime_counts == std::map<Residue, int>{{2, 1}});
  CHECK_FALSE(h8.satisfied);

  Group z12 = Group::cyclic(12);
  Lca F12 = make_scalar_lca(z12, 1, {{Site(0), 3}, {Site(1), 4}});
  DiffusionHypothesis h12 = diffusion_hypothesis(F12);
  CHECK(h12.coprime_counts == std::map<Residue, int>{{2, 1}, {3, 1}});
  CHECK_FALSE(h12.satisfied);

  Group v2 = Group::vector_group(2, 1, 2);
  Lca M = make_lca(v2, 1, {{Site(0), identity_endo(v2)}});
  CHECK_THROWS_AS(diffusion_hypothesis(M), std::invalid_argument);
}
