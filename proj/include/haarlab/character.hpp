// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "haarlab/group.hpp"
#include "haarlab/site.hpp"

namespace haarlab {

/// A character of A^(Z^D) given by its finite-support coefficient system
/// c_m. Canonical form: zero coefficients are never stored, so rank() is
/// just the entry count.
struct Character {
  Group group;
  int dim = 1;
  std::map<Site, GroupElement> coeffs;

  int rank() const { return static_cast<int>(coeffs.size()); }
  bool is_trivial() const { return coeffs.empty(); }
};

inline Character make_character(const Group& g, int dim,
                                const std::vector<std::pair<Site, GroupElement>>& entries) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("character dimension must be 1 or 2");
  Character chi;
  chi.group = g;
  chi.dim = dim;
  for (const auto& [site, c] : entries) {
    if (site.dim != dim) throw std::invalid_argument("character site dimension mismatch");
    GroupElement v = make_element(g, c);
    if (is_zero(v)) continue;
    auto it = chi.coeffs.find(site);
    if (it == chi.coeffs.end()) {
      chi.coeffs.emplace(site, std::move(v));
    } else {
      it->second = elem_add(g, it->second, v);
      if (is_zero(it->second)) chi.coeffs.erase(it);
    }
  }
  return chi;
}

inline Character trivial_character(const Group& g, int dim) {
  return make_character(g, dim, {});
}

inline int char_rank(const Character& chi) { return chi.rank(); }

/// Add delta into the coefficient at `site`, re-pruning. Rank stays
/// invariant under add-then-subtract of any coefficient.
inline Character char_add_coeff(const Character& chi, const Site& site, const GroupElement& delta) {
  Character out = chi;
  GroupElement v = make_element(chi.group, delta);
  auto it = out.coeffs.find(site);
  if (it == out.coeffs.end()) {
    if (!is_zero(v)) out.coeffs.emplace(site, v);
  } else {
    it->second = elem_add(chi.group, it->second, v);
    if (is_zero(it->second)) out.coeffs.erase(it);
  }
  return out;
}

inline Character char_negate(const Character& chi) {
  Character out = chi;
  for (auto& [site, c] : out.coeffs) c = elem_neg(chi.group, c);
  return out;
}

/// Translate every support site by e.
inline Character char_translate(const Character& chi, const Site& e) {
  Character out;
  out.group = chi.group;
  out.dim = chi.dim;
  for (const auto& [site, c] : chi.coeffs) out.coeffs.emplace(site + e, c);
  return out;
}

inline std::string to_string(const Character& chi) {
  std::string s = "{";
  bool first = true;
  for (const auto& [site, c] : chi.coeffs) {
    if (!first) s += " ";
    first = false;
    s += to_string(site) + "->(";
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j) s += ",";
      s += std::to_string(c[j]);
    }
    s += ")";
  }
  return s + "}";
}

}  // namespace haarlab
