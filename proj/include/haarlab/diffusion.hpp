// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "haarlab/digits.hpp"
#include "haarlab/hash.hpp"
#include "haarlab/lca.hpp"

namespace haarlab {

inline std::uint64_t identity_hash(const Character& chi) {
  std::string s = to_string(chi.group) + "|" + std::to_string(chi.dim) + "|" + to_string(chi);
  return fnv1a64(s);
}

inline std::uint64_t identity_hash(const Lca& F) {
  std::string s = to_string(F.group) + "|" + std::to_string(F.dim) + "|";
  for (const auto& [site, f] : F.coeffs) {
    s += to_string(site) + "->[";
    for (std::size_t i = 0; i < f.m.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(f.m[i]);
    }
    s += "];";
  }
  return fnv1a64(s);
}

/// rank[chi o F^N] for N = 1..Nmax. ranks[N-1] holds the value at N.
struct RankTrajectory {
  std::uint64_t lca_hash = 0;
  std::uint64_t chi_hash = 0;
  std::vector<int> ranks;
};

inline RankTrajectory rank_trajectory(const Character& chi, const Lca& F, std::int64_t Nmax) {
  if (Nmax < 1) throw std::invalid_argument("rank_trajectory: Nmax must be >= 1");
  if (chi.is_trivial())
    throw std::invalid_argument("rank_trajectory: trivial character has rank identically 0");
  RankTrajectory out;
  out.lca_hash = identity_hash(F);
  out.chi_hash = identity_hash(chi);
  out.ranks.reserve(static_cast<std::size_t>(Nmax));
  if (chi.group.is_cyclic() && chi.dim == 1) {
    auto cur = detail::DensePoly::from_map(detail::scalar_of_character(chi));
    auto f = detail::DensePoly::from_map(detail::scalar_of_lca(F));
    for (std::int64_t N = 1; N <= Nmax; ++N) {
      cur = detail::dense_mul(cur, f, chi.group.n);
      int r = 0;
      for (auto v : cur.c) r += (v != 0);
      out.ranks.push_back(r);
    }
    return out;
  }
  Character cur = chi;
  for (std::int64_t N = 1; N <= Nmax; ++N) {
    cur = compose_char(cur, F);
    out.ranks.push_back(cur.rank());
  }
  return out;
}

/// Fraction of N <= Nmax whose rank meets each threshold. An empirical
/// stand-in for the density-1 sets in the diffusion definition; finite
/// Nmax proves nothing about the limit.
inline std::vector<double> density_report(const RankTrajectory& traj,
                                          const std::vector<std::int64_t>& thresholds) {
  if (traj.ranks.empty()) throw std::invalid_argument("density_report: empty trajectory");
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (auto R : thresholds) {
    std::int64_t hits = 0;
    for (int r : traj.ranks) hits += (r >= R);
    out.push_back(static_cast<double>(hits) / static_cast<double>(traj.ranks.size()));
  }
  return out;
}

/// A W set of automorphic coefficient sites for some F^j, each shielded by
/// V-shaped zero-coefficient gaps.
struct SeparatingCertificate {
  std::int64_t power = 0;
  std::vector<Site> V;
  std::vector<Site> W;
  bool verified = false;
};

inline SeparatingCertificate verify_separating(const Lca& power_coeffs,
                                               const std::vector<Site>& W,
                                               const std::vector<Site>& V,
                                               std::int64_t power_label) {
  SeparatingCertificate cert;
  cert.power = power_label;
  cert.V = V;
  cert.W = W;
  const Site origin = power_coeffs.dim == 1 ? Site(0) : Site(0, 0);
  for (const Site& v : V)
    if (v == origin) throw std::invalid_argument("verify_separating: V must not contain 0");
  cert.verified = true;
  for (const Site& w : W) {
    auto it = power_coeffs.coeffs.find(w);
    if (it == power_coeffs.coeffs.end() || !is_automorphism(power_coeffs.group, it->second)) {
      cert.verified = false;
      return cert;
    }
    for (const Site& v : V) {
      if (power_coeffs.coeffs.count(w - v)) {
        cert.verified = false;
        return cert;
      }
    }
  }
  return cert;
}

/// Scalar part of the commuting-automorphism power coefficient
/// f^{[J]}_(k) = C(J,k1) C(k1,k2) ... C(k_{U-1},k_U) mod p. Nonzero
/// exactly when k_U << ... << k_1 << J.
inline Residue calca_coefficient(std::int64_t J, const std::vector<std::int64_t>& ks, Residue p) {
  Residue out = 1;
  std::int64_t prev = J;
  for (std::int64_t k : ks) {
    out = mod_reduce(out * lucas_binom(prev, k, p), p);
    if (!out) return 0;
    prev = k;
  }
  return out;
}

/// phi^{(N)}_m: C((N+m)/2, m) mod p when m = N (mod 2), else 0.
inline Residue ledrappier_phi(std::int64_t N, std::int64_t m, Residue p) {
  if (N < 0 || m < 0) return 0;
  if (((N - m) & 1) != 0) return 0;
  return lucas_binom((N + m) / 2, m, p);
}

/// The (Z/p)^2 automaton with local map (y0, x0 + y1).
inline Lca ledrappier_automaton(Residue p) {
  Group g = Group::vector_group(p, 1, 2);
  return make_lca(g, 1,
                  {{Site(0), Endo::matrix(g, {0, 1, 1, 0})},
                   {Site(1), Endo::matrix(g, {0, 0, 0, 1})}});
}

/// Closed form for the site-m coefficient of the N-th power of the
/// (Z/p)^2 example automaton.
inline Endo ledrappier_matrix(std::int64_t N, std::int64_t m, Residue p) {
  if (N < 2) throw std::invalid_argument("ledrappier_matrix: N must be >= 2");
  Group g = Group::vector_group(p, 1, 2);
  return Endo::matrix(g, {ledrappier_phi(N - 2, m, p), ledrappier_phi(N - 1, m, p),
                          ledrappier_phi(N - 1, m, p), ledrappier_phi(N, m, p)});
}

/// The digit-pattern construction behind the example automaton's
/// separating sets: where the patterns landed and the certificate for
/// F^{2j} over sites 2W with V = (0..2*V_extent].
struct ExampleSeparating {
  SeparatingCertificate certificate;
  int zq1_position = -1;            // i_0
  std::vector<int> choice_positions;  // i_1 < i_2 < ...
  std::vector<std::int64_t> w_values;
};

/// Build the 2^{ceil(log2 R)} candidate sites w for F^{2j} from the
/// digit words of P(j): "010" at i_0+..; "01" or "00" at each i_k. Every
/// candidate is checked against the domination inequalities; the
/// certificate verifies only if all of them hold.
inline ExampleSeparating build_example_separating(std::int64_t j, Residue p,
                                                  std::int64_t V_extent, std::int64_t R) {
  if (V_extent < 1 || R < 1)
    throw std::invalid_argument("build_example_separating: V_extent and R must be >= 1");
  DigitString dj = p_ary(j, p);
  int ceil_logp = 0;  // smallest k with p^k >= V_extent
  for (std::int64_t pw = 1; pw < V_extent; pw *= p) ++ceil_logp;
  const int L_V = ceil_logp + 1;
  int L_R = 0;
  while ((std::int64_t{1} << L_R) < R) ++L_R;

  GapCensus census = gap_census(j, p, 1);
  int i0 = -1;
  for (int pos : census.zq1_positions)
    if (pos > L_V) {
      i0 = pos;
      break;
    }
  if (i0 < 0)
    throw computation_error("build_example_separating: P(j) has no \"0q1\" above digit " +
                            std::to_string(L_V));
  std::vector<int> chosen;
  int min_next = i0 + 3;  // keep clear of the "010" word written into w
  for (int pos : census.one_zero_positions) {
    if (pos < min_next) continue;
    chosen.push_back(pos);
    min_next = pos + 2;  // separate instances
    if (static_cast<int>(chosen.size()) == L_R) break;
  }
  if (static_cast<int>(chosen.size()) < L_R)
    throw computation_error("build_example_separating: P(j) has only " +
                            std::to_string(chosen.size()) + " usable \"10\" words above the \"0q1\"; " +
                            std::to_string(L_R) + " needed");

  ExampleSeparating out;
  out.zq1_position = i0;
  out.choice_positions = chosen;
  const std::int64_t base_w = ipow(p, i0 + 1);
  bool all_ok = true;
  for (std::int64_t mask = 0; mask < (std::int64_t{1} << L_R); ++mask) {
    std::int64_t w = base_w;
    for (int k = 0; k < L_R; ++k)
      if (mask & (std::int64_t{1} << k)) w += ipow(p, chosen[static_cast<std::size_t>(k)]);
    out.w_values.push_back(w);
    // automorphism at 2w
    bool ok = digit_dominates(2 * w, j + w, p) && digit_dominates(2 * w, j + w - 1, p);
    // zero coefficients across the (0..2V] gap
    for (std::int64_t u = 1; ok && u <= V_extent; ++u) {
      ok = !digit_dominates(2 * w - 2 * u, j + w - u, p) &&
           !digit_dominates(2 * w - 2 * u, j + w - u - 1, p) &&
           !digit_dominates(2 * w - 2 * u - 1, j + w - u - 1, p);
    }
    all_ok = all_ok && ok;
  }
  out.certificate.power = 2 * j;
  for (std::int64_t v = 1; v <= 2 * V_extent; ++v) out.certificate.V.push_back(Site(v));
  for (std::int64_t w : out.w_values) out.certificate.W.push_back(Site(2 * w));
  out.certificate.verified = all_ok;
  return out;
}

}  // namespace haarlab
