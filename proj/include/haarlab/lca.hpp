// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "haarlab/character.hpp"
#include "haarlab/errors.hpp"
#include "haarlab/group.hpp"
#include "haarlab/site.hpp"

namespace haarlab {

/// A finite torus window standing in for A^(Z^D). Site indices wrap, and
/// the operations below guard against wrap aliasing so that results agree
/// with the infinite-lattice semantics.
struct Configuration {
  Group group;
  int dim = 1;
  std::array<std::int64_t, 2> len{1, 1};
  std::vector<GroupElement> cells;  // row-major, x fastest

  std::int64_t cell_count() const { return dim == 1 ? len[0] : len[0] * len[1]; }

  std::int64_t index_of(const Site& s) const {
    std::int64_t x = mod_reduce(s.c[0], len[0]);
    if (dim == 1) return x;
    return x + len[0] * mod_reduce(s.c[1], len[1]);
  }
  const GroupElement& at(const Site& s) const { return cells[static_cast<std::size_t>(index_of(s))]; }
  GroupElement& at(const Site& s) { return cells[static_cast<std::size_t>(index_of(s))]; }
};

inline Configuration make_configuration(const Group& g, const std::vector<std::int64_t>& lengths) {
  if (lengths.empty() || lengths.size() > 2)
    throw std::invalid_argument("configuration dimension must be 1 or 2");
  Configuration a;
  a.group = g;
  a.dim = static_cast<int>(lengths.size());
  a.len = {lengths[0], a.dim == 2 ? lengths[1] : 1};
  for (auto l : lengths)
    if (l < 1) throw std::invalid_argument("configuration window lengths must be positive");
  a.cells.assign(static_cast<std::size_t>(a.cell_count()), zero_element(g));
  return a;
}

/// A linear cellular automaton as a finite-support map site -> endo (the
/// "polynomial of shift maps"), zero endos pruned. "Nontrivial" means more
/// than one stored coefficient.
struct Lca {
  Group group;
  int dim = 1;
  std::map<Site, Endo> coeffs;

  bool is_nontrivial() const { return coeffs.size() > 1; }
};

inline Lca make_lca(const Group& g, int dim, const std::vector<std::pair<Site, Endo>>& entries) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("lca dimension must be 1 or 2");
  Lca F;
  F.group = g;
  F.dim = dim;
  const std::size_t want = g.is_cyclic() ? 1u : static_cast<std::size_t>(g.J * g.J);
  for (const auto& [site, f] : entries) {
    if (site.dim != dim) throw std::invalid_argument("lca site dimension mismatch");
    if (f.m.size() != want) throw std::invalid_argument("lca coefficient kind mismatch for group");
    Endo e = f;
    for (auto& x : e.m) x = mod_reduce(x, g.exponent());
    if (is_zero(e)) continue;
    auto it = F.coeffs.find(site);
    if (it == F.coeffs.end()) {
      F.coeffs.emplace(site, std::move(e));
    } else {
      it->second = endo_add(g, it->second, e);
      if (is_zero(it->second)) F.coeffs.erase(it);
    }
  }
  return F;
}

/// Convenience for cyclic groups: {site -> scalar}.
inline Lca make_scalar_lca(const Group& g, int dim,
                           const std::vector<std::pair<Site, Residue>>& entries) {
  std::vector<std::pair<Site, Endo>> es;
  es.reserve(entries.size());
  for (const auto& [s, f] : entries) es.emplace_back(s, Endo::scalar(g, f));
  return make_lca(g, dim, es);
}

namespace detail {

/// True when all listed sites stay distinct after torus reduction.
inline bool sites_injective_mod(const std::vector<Site>& sites, const Configuration& a) {
  std::set<std::int64_t> seen;
  for (const auto& s : sites)
    if (!seen.insert(a.index_of(s)).second) return false;
  return true;
}

template <typename M>
std::vector<Site> support_of(const M& coeffs) {
  std::vector<Site> sites;
  sites.reserve(coeffs.size());
  for (const auto& kv : coeffs) sites.push_back(kv.first);
  return sites;
}

}  // namespace detail

/// One automaton step on a torus window: b_m = sum_u f_u(a_{m+u}).
/// Windows too small to keep F's support unaliased are rejected.
inline Configuration apply_lca(const Lca& F, const Configuration& a) {
  if (F.group != a.group) throw std::invalid_argument("apply_lca: group mismatch");
  if (F.dim != a.dim) throw std::invalid_argument("apply_lca: dimension mismatch");
  if (!detail::sites_injective_mod(detail::support_of(F.coeffs), a))
    throw std::invalid_argument("apply_lca: window smaller than the automaton support (wrap would alias)");
  Configuration b = a;
  for (std::int64_t i = 0; i < a.cell_count(); ++i)
    b.cells[static_cast<std::size_t>(i)] = zero_element(a.group);
  for (std::int64_t y = 0; y < (a.dim == 2 ? a.len[1] : 1); ++y) {
    for (std::int64_t x = 0; x < a.len[0]; ++x) {
      Site m = a.dim == 1 ? Site(x) : Site(x, y);
      GroupElement acc = zero_element(a.group);
      for (const auto& [u, f] : F.coeffs)
        acc = elem_add(a.group, acc, endo_apply(a.group, f, a.at(m + u)));
      b.at(m) = std::move(acc);
    }
  }
  return b;
}

/// Evaluate a character on a torus window as an exact phase. Support
/// sites are torus-reduced; two support sites landing on the same cell
/// means the window cannot faithfully host the character.
inline Phase char_eval(const Character& chi, const Configuration& a) {
  if (chi.group != a.group) throw std::invalid_argument("char_eval: group mismatch");
  if (!chi.coeffs.empty() && chi.dim != a.dim)
    throw std::invalid_argument("char_eval: dimension mismatch");
  if (!detail::sites_injective_mod(detail::support_of(chi.coeffs), a))
    throw computation_error("char_eval: character support wraps onto itself in this window");
  Phase total(0, 1);
  for (const auto& [site, c] : chi.coeffs) total = total + pair_phase(chi.group, c, a.at(site));
  return total;
}

namespace detail {

using ScalarMap = std::map<Site, Residue>;

inline ScalarMap scalar_convolve(const ScalarMap& a, const ScalarMap& b, Residue n) {
  ScalarMap out;
  for (const auto& [sa, va] : a)
    for (const auto& [sb, vb] : b) {
      Site s = sa + sb;
      Residue v = mod_reduce(out.count(s) ? out[s] + va * vb : va * vb, n);
      if (v)
        out[s] = v;
      else
        out.erase(s);
    }
  return out;
}

/// Dense 1-D convolution for the hot cyclic paths (rank trajectories,
/// Cesaro scans). Represents sum c_i x^{lo+i} with coefficients mod n.
struct DensePoly {
  std::int64_t lo = 0;
  std::vector<Residue> c;  // c[i] is the coefficient at site lo+i

  static DensePoly from_map(const ScalarMap& m) {
    DensePoly p;
    if (m.empty()) return p;
    std::int64_t lo = m.begin()->first.c[0], hi = m.rbegin()->first.c[0];
    p.lo = lo;
    p.c.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const auto& [s, v] : m) p.c[static_cast<std::size_t>(s.c[0] - lo)] = v;
    return p;
  }
  ScalarMap to_map() const {
    ScalarMap m;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i]) m.emplace(Site(lo + static_cast<std::int64_t>(i)), c[i]);
    return m;
  }
  bool empty() const {
    for (auto v : c)
      if (v) return false;
    return true;
  }
};

inline DensePoly dense_mul(const DensePoly& a, const DensePoly& b, Residue n) {
  DensePoly out;
  if (a.c.empty() || b.c.empty()) return out;
  out.lo = a.lo + b.lo;
  out.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (!a.c[i]) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j) {
      if (!b.c[j]) continue;
      out.c[i + j] = mod_reduce(out.c[i + j] + a.c[i] * b.c[j], n);
    }
  }
  return out;
}

inline DensePoly dense_pow(DensePoly base, std::int64_t e, Residue n) {
  DensePoly acc;
  acc.c = {1};
  while (e > 0) {
    if (e & 1) acc = dense_mul(acc, base, n);
    e >>= 1;
    if (e) base = dense_mul(base, base, n);
  }
  return acc;
}

inline ScalarMap scalar_of_character(const Character& chi) {
  ScalarMap m;
  for (const auto& [s, c] : chi.coeffs) m.emplace(s, c[0]);
  return m;
}

inline ScalarMap scalar_of_lca(const Lca& F) {
  ScalarMap m;
  for (const auto& [s, f] : F.coeffs) m.emplace(s, f.m[0]);
  return m;
}

inline Character character_of_scalar(const Group& g, int dim, const ScalarMap& m) {
  Character chi;
  chi.group = g;
  chi.dim = dim;
  for (const auto& [s, v] : m) chi.coeffs.emplace(s, GroupElement{v});
  return chi;
}

}  // namespace detail

/// Pushforward of a character through an automaton: chi o F has
/// coefficients d_n = sum_u adj(f_u)(c_{n-u}).
inline Character compose_char(const Character& chi, const Lca& F) {
  if (chi.group != F.group) throw std::invalid_argument("compose_char: group mismatch");
  if (!chi.coeffs.empty() && chi.dim != F.dim)
    throw std::invalid_argument("compose_char: dimension mismatch");
  if (chi.group.is_cyclic()) {
    auto m = detail::scalar_convolve(detail::scalar_of_character(chi), detail::scalar_of_lca(F),
                                     chi.group.n);
    return detail::character_of_scalar(chi.group, chi.dim, m);
  }
  Character out;
  out.group = chi.group;
  out.dim = chi.dim;
  for (const auto& [u, f] : F.coeffs) {
    Endo adj = endo_adjoint(F.group, f);
    for (const auto& [m, c] : chi.coeffs) {
      Site n = m + u;
      GroupElement v = endo_apply(F.group, adj, c);
      if (is_zero(v)) continue;
      auto it = out.coeffs.find(n);
      if (it == out.coeffs.end()) {
        out.coeffs.emplace(n, std::move(v));
      } else {
        it->second = elem_add(F.group, it->second, v);
        if (is_zero(it->second)) out.coeffs.erase(it);
      }
    }
  }
  return out;
}

/// chi o F^N. Cyclic 1-D groups go through Laurent exponentiation by
/// squaring; everything else folds compose_char N times.
inline Character char_power(const Character& chi, const Lca& F, std::int64_t N) {
  if (N < 0) throw std::invalid_argument("char_power: N must be nonnegative");
  if (chi.group != F.group) throw std::invalid_argument("char_power: group mismatch");
  if (N == 0) return chi;
  if (chi.group.is_cyclic() && chi.dim == 1) {
    auto c = detail::DensePoly::from_map(detail::scalar_of_character(chi));
    auto f = detail::DensePoly::from_map(detail::scalar_of_lca(F));
    auto prod = detail::dense_mul(c, detail::dense_pow(f, N, chi.group.n), chi.group.n);
    return detail::character_of_scalar(chi.group, chi.dim, prod.to_map());
  }
  if (chi.group.is_cyclic()) {
    auto f = detail::scalar_of_lca(F);
    detail::ScalarMap acc{{chi.dim == 1 ? Site(0) : Site(0, 0), Residue(1)}};
    detail::ScalarMap base = f;
    std::int64_t e = N;
    while (e > 0) {
      if (e & 1) acc = detail::scalar_convolve(acc, base, chi.group.n);
      e >>= 1;
      if (e) base = detail::scalar_convolve(base, base, chi.group.n);
    }
    auto prod = detail::scalar_convolve(detail::scalar_of_character(chi), acc, chi.group.n);
    return detail::character_of_scalar(chi.group, chi.dim, prod);
  }
  Character out = chi;
  for (std::int64_t i = 0; i < N; ++i) out = compose_char(out, F);
  return out;
}

/// Exact coefficients of F^N, as an Lca. Matrix coefficients use
/// noncommutative convolution under binary powering; scalar coefficients
/// use polynomial powering.
inline Lca lca_power_coeffs(const Lca& F, std::int64_t N) {
  if (N < 0) throw std::invalid_argument("lca_power_coeffs: N must be nonnegative");
  const Group& g = F.group;
  if (N == 0) return make_lca(g, F.dim, {{F.dim == 1 ? Site(0) : Site(0, 0), identity_endo(g)}});
  if (g.is_cyclic()) {
    auto f = detail::scalar_of_lca(F);
    detail::ScalarMap acc{{F.dim == 1 ? Site(0) : Site(0, 0), Residue(1)}};
    detail::ScalarMap base = f;
    std::int64_t e = N;
    while (e > 0) {
      if (e & 1) acc = detail::scalar_convolve(acc, base, g.n);
      e >>= 1;
      if (e) base = detail::scalar_convolve(base, base, g.n);
    }
    Lca out;
    out.group = g;
    out.dim = F.dim;
    for (const auto& [s, v] : acc) out.coeffs.emplace(s, Endo{{v}});
    return out;
  }
  // noncommutative: out_w = sum_{u+v=w} a_u * b_v, composing left factors
  // onto right factors
  auto convolve = [&g](const std::map<Site, Endo>& a, const std::map<Site, Endo>& b) {
    std::map<Site, Endo> out;
    for (const auto& [sa, fa] : a)
      for (const auto& [sb, fb] : b) {
        Endo prod = endo_compose(g, fa, fb);
        if (is_zero(prod)) continue;
        Site s = sa + sb;
        auto it = out.find(s);
        if (it == out.end()) {
          out.emplace(s, std::move(prod));
        } else {
          it->second = endo_add(g, it->second, prod);
          if (is_zero(it->second)) out.erase(it);
        }
      }
    return out;
  };
  std::map<Site, Endo> acc{{F.dim == 1 ? Site(0) : Site(0, 0), identity_endo(g)}};
  std::map<Site, Endo> base = F.coeffs;
  std::int64_t e = N;
  while (e > 0) {
    if (e & 1) acc = convolve(acc, base);
    e >>= 1;
    if (e) base = convolve(base, base);
  }
  Lca out;
  out.group = g;
  out.dim = F.dim;
  out.coeffs = std::move(acc);
  return out;
}

/// CRT decomposition of a cyclic group into its prime-power components.
inline std::vector<Group> crt_split(const Group& g) {
  if (!g.is_cyclic()) throw std::invalid_argument("crt_split: only cyclic groups decompose here");
  std::vector<Group> out;
  for (const auto& [p, r] : factorize(g.n)) out.push_back(Group::cyclic(ipow(p, r)));
  return out;
}

namespace detail {

/// Unit u with u * (n/q) = 1 (mod q); the dual CRT component of a
/// character coefficient is c * u mod q, so that phases of the components
/// sum exactly to the original phase. Multiplying by the unit u does not
/// change which coefficients vanish, so ranks agree with the plain
/// residue reduction.
inline Residue crt_dual_unit(Residue n, Residue q) {
  Residue m = mod_reduce(n / q, q);
  for (Residue u = 1; u < q; ++u)
    if (mod_reduce(m * u, q) == 1) return u;
  return 1;  // q == 1 cannot happen for prime powers
}

}  // namespace detail

inline std::vector<Character> crt_split(const Character& chi) {
  std::vector<Character> out;
  for (const Group& comp : crt_split(chi.group)) {
    Residue unit = detail::crt_dual_unit(chi.group.n, comp.n);
    Character part;
    part.group = comp;
    part.dim = chi.dim;
    for (const auto& [s, c] : chi.coeffs) {
      Residue v = mod_reduce(c[0] * unit, comp.n);
      if (v) part.coeffs.emplace(s, GroupElement{v});
    }
    out.push_back(std::move(part));
  }
  return out;
}

inline std::vector<Lca> crt_split(const Lca& F) {
  std::vector<Lca> out;
  for (const Group& comp : crt_split(F.group)) {
    Lca part;
    part.group = comp;
    part.dim = F.dim;
    for (const auto& [s, f] : F.coeffs) {
      Residue v = mod_reduce(f.m[0], comp.n);
      if (v) part.coeffs.emplace(s, Endo{{v}});
    }
    out.push_back(std::move(part));
  }
  return out;
}

/// Reassemble a CRT-split family of characters into one over Z/n.
inline Character crt_combine(const Group& g, const std::vector<Character>& parts) {
  if (!g.is_cyclic()) throw std::invalid_argument("crt_combine: cyclic target only");
  Character out;
  out.group = g;
  out.dim = parts.empty() ? 1 : parts[0].dim;
  std::set<Site> sites;
  for (const auto& part : parts)
    for (const auto& [s, c] : part.coeffs) sites.insert(s);
  for (const Site& s : sites) {
    // undo the dual unit, then lift: find x with x = c_j * (n/q_j) mod q_j
    Residue x = 0, m = 1;
    for (const auto& part : parts) {
      Residue q = part.group.n;
      Residue cj = part.coeffs.count(s) ? part.coeffs.at(s)[0] : 0;
      Residue target = mod_reduce(cj * mod_reduce(g.n / q, q), q);
      // solve x + m*t = target (mod q)
      Residue minv = 0;
      for (Residue t = 0; t < q; ++t)
        if (mod_reduce(m * t, q) == 1) {
          minv = t;
          break;
        }
      Residue t = mod_reduce((target - x) * minv, q);
      x += m * t;
      m *= q;
    }
    Residue v = mod_reduce(x, g.n);
    if (v) out.coeffs.emplace(s, GroupElement{v});
  }
  return out;
}

/// Per-prime census for the diffusion hypothesis on Z/n: each prime
/// divisor of n needs at least two coefficients coprime to it.
struct DiffusionHypothesis {
  std::map<Residue, int> coprime_counts;
  bool satisfied = false;
};

inline DiffusionHypothesis diffusion_hypothesis(const Lca& F) {
  if (!F.group.is_cyclic())
    throw std::invalid_argument(
        "diffusion_hypothesis: scalar automata only; use separating-set tools for matrix "
        "coefficients");
  DiffusionHypothesis out;
  out.satisfied = true;
  for (const auto& [p, r] : factorize(F.group.n)) {
    int count = 0;
    for (const auto& [s, f] : F.coeffs)
      if (f.m[0] % p != 0) ++count;
    out.coprime_counts[p] = count;
    if (count < 2) out.satisfied = false;
  }
  return out;
}

}  // namespace haarlab
