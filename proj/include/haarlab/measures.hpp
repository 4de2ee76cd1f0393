// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "haarlab/errors.hpp"
#include "haarlab/lca.hpp"
#include "haarlab/parallel.hpp"
#include "haarlab/rng.hpp"

namespace haarlab {

using Complex = std::complex<double>;

/// Column-stochastic transition matrix: at(next, prev), columns sum to 1,
/// so that eta_{n+1} = Q^{(n)} * eta_n.
struct Dmatrix {
  std::int64_t n = 0;
  std::vector<double> a;

  Dmatrix() = default;
  explicit Dmatrix(std::int64_t size) : n(size), a(static_cast<std::size_t>(size * size), 0.0) {}
  double& at(std::int64_t r, std::int64_t c) { return a[static_cast<std::size_t>(r * n + c)]; }
  double at(std::int64_t r, std::int64_t c) const { return a[static_cast<std::size_t>(r * n + c)]; }
};

struct BernoulliSpec {
  Group group;
  std::vector<double> weights;  // one per group element, canonical order
};

/// Semistationary 1-step chain: matrices cycled over time, state
/// distributions matched per phase. A single matrix with no eta means the
/// stationary chain.
struct MarkovChainSpec {
  Group group;
  std::vector<Dmatrix> matrices;
  std::vector<std::vector<double>> etas;  // may be empty for a single stationary Q
};

/// Stationary U-step process given by its (U+1)-dimensional marginal;
/// site 0 is the least-significant index digit.
struct NStepMarkovSpec {
  Group group;
  int steps = 1;
  std::vector<double> probs;
};

struct HaarSpec {
  Group group;
};

struct FourierReport {
  std::string character_desc;
  Complex value{0.0, 0.0};
  double modulus = 0.0;
  int rank = 0;
};

struct Cylinder {
  std::vector<Site> sites;
  std::vector<GroupElement> values;
};

namespace detail {

constexpr double kStochasticTol = 1e-12;
constexpr double kClosureTol = 1e-9;
constexpr std::int64_t kEnumerationCapBits = 24;

inline int bits_per_letter(std::int64_t order) {
  int b = 0;
  while ((std::int64_t{1} << b) < order) ++b;
  return b;
}

inline std::vector<double> solve_stationary(const Dmatrix& Q) {
  // (Q - I) eta = 0 with sum(eta) = 1, by elimination with partial pivoting
  const std::int64_t S = Q.n;
  std::vector<double> m(static_cast<std::size_t>(S * (S + 1)), 0.0);
  auto at = [&](std::int64_t r, std::int64_t c) -> double& {
    return m[static_cast<std::size_t>(r * (S + 1) + c)];
  };
  for (std::int64_t r = 0; r + 1 < S; ++r)
    for (std::int64_t c = 0; c < S; ++c) at(r, c) = Q.at(r, c) - (r == c ? 1.0 : 0.0);
  for (std::int64_t c = 0; c < S; ++c) at(S - 1, c) = 1.0;
  at(S - 1, S) = 1.0;
  for (std::int64_t col = 0; col < S; ++col) {
    std::int64_t piv = col;
    for (std::int64_t r = col; r < S; ++r)
      if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
    if (std::abs(at(piv, col)) < 1e-14)
      throw std::invalid_argument("markov spec: stationary distribution is not unique");
    if (piv != col)
      for (std::int64_t c = 0; c <= S; ++c) std::swap(at(piv, c), at(col, c));
    for (std::int64_t r = 0; r < S; ++r) {
      if (r == col) continue;
      double f = at(r, col) / at(col, col);
      if (f == 0.0) continue;
      for (std::int64_t c = col; c <= S; ++c) at(r, c) -= f * at(col, c);
    }
  }
  std::vector<double> eta(static_cast<std::size_t>(S));
  for (std::int64_t r = 0; r < S; ++r) eta[static_cast<std::size_t>(r)] = at(r, S) / at(r, r);
  return eta;
}

}  // namespace detail

/// Validated handle over an exactly evaluable measure on A^Z.
class Measure {
 public:
  enum class Kind { haar, bernoulli, markov, nstep };

  Kind kind = Kind::haar;
  Group group;
  bool full_support = true;

  // bernoulli
  std::vector<double> weights;

  // the evaluation chain: for markov, the chain itself; for nstep, the
  // 1-step recoding over the alphabet A^U (letter 0 least significant)
  std::int64_t alphabet = 0;  // chain alphabet size
  int letters = 1;            // letters per chain state (1, or U for nstep)
  std::vector<Dmatrix> matrices;
  std::vector<std::vector<double>> etas;

  // original U-step data
  int steps = 0;
  std::vector<double> nstep_probs;

  std::int64_t period() const { return static_cast<std::int64_t>(matrices.size()); }
  const Dmatrix& q_at(std::int64_t t) const {
    return matrices[static_cast<std::size_t>(mod_reduce(t, period()))];
  }
  const std::vector<double>& eta_at(std::int64_t t) const {
    return etas[static_cast<std::size_t>(mod_reduce(t, period()))];
  }
  /// Element index of letter `k` inside chain state `x`.
  std::int64_t letter(std::int64_t x, int k) const {
    for (int i = 0; i < k; ++i) x /= group.order();
    return x % group.order();
  }
};

inline Measure make_measure(const HaarSpec& spec) {
  Measure mu;
  mu.kind = Measure::Kind::haar;
  mu.group = spec.group;
  return mu;
}

inline Measure make_measure(const BernoulliSpec& spec) {
  Measure mu;
  mu.kind = Measure::Kind::bernoulli;
  mu.group = spec.group;
  if (static_cast<std::int64_t>(spec.weights.size()) != spec.group.order())
    throw std::invalid_argument("bernoulli spec: need one weight per group element");
  double sum = 0.0;
  for (double w : spec.weights) {
    if (w < 0.0) throw std::invalid_argument("bernoulli spec: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > detail::kStochasticTol)
    throw std::invalid_argument("bernoulli spec: weights must sum to 1");
  mu.weights = spec.weights;
  mu.full_support = *std::min_element(spec.weights.begin(), spec.weights.end()) > 0.0;
  return mu;
}

inline Measure make_measure(const MarkovChainSpec& spec) {
  Measure mu;
  mu.kind = Measure::Kind::markov;
  mu.group = spec.group;
  mu.alphabet = spec.group.order();
  mu.letters = 1;
  if (spec.matrices.empty()) throw std::invalid_argument("markov spec: empty matrix family");
  mu.full_support = true;
  for (const auto& Q : spec.matrices) {
    if (Q.n != mu.alphabet) throw std::invalid_argument("markov spec: matrix size mismatch");
    for (std::int64_t c = 0; c < Q.n; ++c) {
      double col = 0.0;
      for (std::int64_t r = 0; r < Q.n; ++r) {
        double v = Q.at(r, c);
        if (v < 0.0) throw std::invalid_argument("markov spec: negative transition probability");
        if (v == 0.0) mu.full_support = false;
        col += v;
      }
      if (std::abs(col - 1.0) > detail::kStochasticTol)
        throw std::invalid_argument("markov spec: columns must sum to 1 (eta_{n+1} = Q eta_n)");
    }
  }
  mu.matrices = spec.matrices;
  if (spec.etas.empty()) {
    if (spec.matrices.size() != 1)
      throw std::invalid_argument("markov spec: state distributions required for a cycled family");
    mu.etas.push_back(detail::solve_stationary(spec.matrices[0]));
  } else {
    if (spec.etas.size() != spec.matrices.size())
      throw std::invalid_argument("markov spec: need one state distribution per matrix");
    mu.etas = spec.etas;
  }
  for (const auto& eta : mu.etas) {
    if (static_cast<std::int64_t>(eta.size()) != mu.alphabet)
      throw std::invalid_argument("markov spec: state distribution size mismatch");
    double sum = 0.0;
    for (double v : eta) {
      if (v < 0.0) throw std::invalid_argument("markov spec: negative state probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > detail::kStochasticTol)
      throw std::invalid_argument("markov spec: state distributions must sum to 1");
  }
  // semistationary closure: Q^{(i)} eta_i must reproduce eta_{i+1}
  const std::int64_t P = mu.period();
  for (std::int64_t i = 0; i < P; ++i) {
    const Dmatrix& Q = mu.matrices[static_cast<std::size_t>(i)];
    const auto& eta = mu.etas[static_cast<std::size_t>(i)];
    const auto& next = mu.etas[static_cast<std::size_t>((i + 1) % P)];
    for (std::int64_t r = 0; r < Q.n; ++r) {
      double acc = 0.0;
      for (std::int64_t c = 0; c < Q.n; ++c) acc += Q.at(r, c) * eta[static_cast<std::size_t>(c)];
      if (std::abs(acc - next[static_cast<std::size_t>(r)]) > detail::kClosureTol)
        throw std::invalid_argument("markov spec: family is not semistationary-closed");
    }
  }
  return mu;
}

inline Measure make_measure(const NStepMarkovSpec& spec) {
  Measure mu;
  mu.kind = Measure::Kind::nstep;
  mu.group = spec.group;
  const int U = spec.steps;
  if (U < 1) throw std::invalid_argument("nstep spec: steps must be >= 1");
  const std::int64_t A = spec.group.order();
  if ((U + 1) * detail::bits_per_letter(A) > detail::kEnumerationCapBits)
    throw cap_error("nstep spec: (U+1)-dimensional marginal exceeds the materialization cap");
  std::int64_t table = 1;
  for (int i = 0; i <= U; ++i) table *= A;
  if (static_cast<std::int64_t>(spec.probs.size()) != table)
    throw std::invalid_argument("nstep spec: marginal table size mismatch");
  double sum = 0.0;
  mu.full_support = true;
  for (double v : spec.probs) {
    if (v < 0.0) throw std::invalid_argument("nstep spec: negative probability");
    if (v == 0.0) mu.full_support = false;
    sum += v;
  }
  if (std::abs(sum - 1.0) > detail::kStochasticTol)
    throw std::invalid_argument("nstep spec: marginal must sum to 1");
  const std::int64_t X = table / A;  // alphabet of the recoded chain
  // overlapping-window consistency: left and right U-marginals must agree
  for (std::int64_t x = 0; x < X; ++x) {
    double left = 0.0, right = 0.0;
    for (std::int64_t b = 0; b < A; ++b) {
      left += spec.probs[static_cast<std::size_t>(x + b * X)];
      right += spec.probs[static_cast<std::size_t>(x * A + b)];
    }
    if (std::abs(left - right) > detail::kStochasticTol)
      throw std::invalid_argument("nstep spec: overlapping-window marginals are inconsistent");
  }
  mu.steps = U;
  mu.nstep_probs = spec.probs;
  mu.alphabet = X;
  mu.letters = U;
  // recode as a fully supported 1-step chain on A^U
  std::vector<double> eta(static_cast<std::size_t>(X), 0.0);
  for (std::int64_t x = 0; x < X; ++x)
    for (std::int64_t b = 0; b < A; ++b)
      eta[static_cast<std::size_t>(x)] += spec.probs[static_cast<std::size_t>(x + b * X)];
  Dmatrix Q(X);
  for (std::int64_t x = 0; x < X; ++x) {
    const double margin = eta[static_cast<std::size_t>(x)];
    for (std::int64_t b = 0; b < A; ++b) {
      std::int64_t y = x / A + b * (X / A);  // shift letters down, append b
      Q.at(y, x) = spec.probs[static_cast<std::size_t>(x + b * X)] / margin;
    }
  }
  mu.matrices.push_back(std::move(Q));
  mu.etas.push_back(std::move(eta));
  return mu;
}

namespace detail {

inline void require_line(const Measure& mu, int dim) {
  (void)mu;
  if (dim != 1) throw std::invalid_argument("measures live on A^Z: sites must be 1-dimensional");
}

/// Complex multiplier contributed by coefficient c at a chain state x
/// (letter 0 of the state is the letter at that site).
inline Complex state_phase(const Measure& mu, std::int64_t x, const GroupElement& c) {
  GroupElement a = element_at(mu.group, mu.kind == Measure::Kind::nstep ? mu.letter(x, 0) : x);
  return pair_phase(mu.group, c, a).to_complex();
}

/// Transfer-product evaluation across the support span: alternate adjoint
/// transition operators with diagonal character multipliers, closing with
/// the state distribution at the left end.
inline Complex chain_fourier(const Measure& mu, const std::map<Site, GroupElement>& coeffs) {
  const std::int64_t n0 = coeffs.begin()->first.c[0];
  const std::int64_t n1 = coeffs.rbegin()->first.c[0];
  if (n1 - n0 > 4'000'000) throw cap_error("chain fourier: character span exceeds the window cap");
  const std::int64_t S = mu.alphabet;
  const auto& eta0 = mu.eta_at(n0);
  std::vector<Complex> v(eta0.begin(), eta0.end());
  auto clamp_site = [&](std::int64_t t) {
    auto it = coeffs.find(Site(t));
    if (it == coeffs.end()) return;
    for (std::int64_t x = 0; x < S; ++x)
      v[static_cast<std::size_t>(x)] *= state_phase(mu, x, it->second);
  };
  clamp_site(n0);
  std::vector<Complex> w(static_cast<std::size_t>(S));
  for (std::int64_t t = n0; t < n1; ++t) {
    const Dmatrix& Q = mu.q_at(t);
    for (std::int64_t r = 0; r < S; ++r) {
      Complex acc{0.0, 0.0};
      for (std::int64_t c = 0; c < S; ++c)
        acc += Q.at(r, c) * v[static_cast<std::size_t>(c)];
      w[static_cast<std::size_t>(r)] = acc;
    }
    v.swap(w);
    clamp_site(t + 1);
  }
  Complex total{0.0, 0.0};
  for (const Complex& z : v) total += z;
  return total;
}

}  // namespace detail

/// mu-hat[chi], exact up to double rounding of the measure weights.
inline FourierReport measure_fourier(const Measure& mu, const Character& chi) {
  if (chi.group != mu.group) throw std::invalid_argument("measure_fourier: group mismatch");
  FourierReport rep;
  rep.character_desc = to_string(chi);
  rep.rank = chi.rank();
  if (chi.is_trivial()) {
    rep.value = Complex{1.0, 0.0};
    rep.modulus = 1.0;
    return rep;
  }
  detail::require_line(mu, chi.dim);
  switch (mu.kind) {
    case Measure::Kind::haar:
      rep.value = Complex{0.0, 0.0};
      break;
    case Measure::Kind::bernoulli: {
      Complex prod{1.0, 0.0};
      for (const auto& [site, c] : chi.coeffs) {
        Complex letter{0.0, 0.0};
        for (std::int64_t i = 0; i < mu.group.order(); ++i)
          letter += mu.weights[static_cast<std::size_t>(i)] *
                    pair_phase(mu.group, c, element_at(mu.group, i)).to_complex();
        prod *= letter;
      }
      rep.value = prod;
      break;
    }
    case Measure::Kind::markov:
    case Measure::Kind::nstep:
      rep.value = detail::chain_fourier(mu, chi.coeffs);
      break;
  }
  rep.modulus = std::abs(rep.value);
  return rep;
}

/// Exact probability of a finite cylinder {a_s = values_s}.
inline double measure_cylinder(const Measure& mu, const Cylinder& cyl) {
  if (cyl.sites.size() != cyl.values.size())
    throw std::invalid_argument("cylinder: site/value count mismatch");
  if (cyl.sites.empty()) return 1.0;
  std::map<Site, GroupElement> fixed;
  for (std::size_t i = 0; i < cyl.sites.size(); ++i) {
    detail::require_line(mu, cyl.sites[i].dim);
    if (!fixed.emplace(cyl.sites[i], make_element(mu.group, cyl.values[i])).second)
      throw std::invalid_argument("cylinder: duplicate site");
  }
  switch (mu.kind) {
    case Measure::Kind::haar: {
      double prob = 1.0;
      for (std::size_t i = 0; i < cyl.sites.size(); ++i) prob /= static_cast<double>(mu.group.order());
      return prob;
    }
    case Measure::Kind::bernoulli: {
      double prob = 1.0;
      for (const auto& [site, val] : fixed)
        prob *= mu.weights[static_cast<std::size_t>(element_index(mu.group, val))];
      return prob;
    }
    case Measure::Kind::markov:
    case Measure::Kind::nstep: {
      const std::int64_t n0 = fixed.begin()->first.c[0];
      const std::int64_t n1 = fixed.rbegin()->first.c[0];
      const std::int64_t S = mu.alphabet;
      const auto& eta0 = mu.eta_at(n0);
      std::vector<double> v(eta0.begin(), eta0.end());
      auto clamp = [&](std::int64_t t) {
        auto it = fixed.find(Site(t));
        if (it == fixed.end()) return;
        std::int64_t want = element_index(mu.group, it->second);
        for (std::int64_t x = 0; x < S; ++x) {
          std::int64_t l0 = mu.kind == Measure::Kind::nstep ? mu.letter(x, 0) : x;
          if (l0 != want) v[static_cast<std::size_t>(x)] = 0.0;
        }
      };
      clamp(n0);
      std::vector<double> w(static_cast<std::size_t>(S));
      for (std::int64_t t = n0; t < n1; ++t) {
        const Dmatrix& Q = mu.q_at(t);
        for (std::int64_t r = 0; r < S; ++r) {
          double acc = 0.0;
          for (std::int64_t c = 0; c < S; ++c) acc += Q.at(r, c) * v[static_cast<std::size_t>(c)];
          w[static_cast<std::size_t>(r)] = acc;
        }
        v.swap(w);
        clamp(t + 1);
      }
      double total = 0.0;
      for (double x : v) total += x;
      return total;
    }
  }
  return 0.0;
}

/// The exponential harmonic-mixing constant of a transition family:
/// lambda = -1/2 * log sup ||xi. * adj(Q) * chi. * adj(P)||_inf, the sup
/// ranging over all dual pairs (chi nontrivial) and ordered matrix pairs.
/// A zero supremum reports +infinity.
inline double ehm_lambda(const std::vector<Dmatrix>& family, const Group& g) {
  if (family.empty()) throw std::invalid_argument("ehm_lambda: empty family");
  const std::int64_t S = g.order();
  for (const auto& Q : family)
    if (Q.n != S) throw std::invalid_argument("ehm_lambda: matrix size mismatch");
  // character table: chars[c][a] = exp(2 pi i <c,a> / exponent)
  std::vector<std::vector<Complex>> chars(static_cast<std::size_t>(S));
  for (std::int64_t c = 0; c < S; ++c) {
    auto& row = chars[static_cast<std::size_t>(c)];
    row.resize(static_cast<std::size_t>(S));
    GroupElement ce = element_at(g, c);
    for (std::int64_t a = 0; a < S; ++a)
      row[static_cast<std::size_t>(a)] = pair_phase(g, ce, element_at(g, a)).to_complex();
  }
  double sup = 0.0;
  std::vector<Complex> M(static_cast<std::size_t>(S * S));
  for (const auto& Q : family)
    for (const auto& P : family)
      for (std::int64_t cxi = 0; cxi < S; ++cxi)
        for (std::int64_t cchi = 1; cchi < S; ++cchi) {
          const auto& xi = chars[static_cast<std::size_t>(cxi)];
          const auto& chi = chars[static_cast<std::size_t>(cchi)];
          // M[i][j] = xi_i * sum_k Q[k][i] chi_k P[j][k]
          double norm = 0.0;
          for (std::int64_t i = 0; i < S; ++i) {
            double rowsum = 0.0;
            for (std::int64_t j = 0; j < S; ++j) {
              Complex acc{0.0, 0.0};
              for (std::int64_t k = 0; k < S; ++k)
                acc += Q.at(k, i) * chi[static_cast<std::size_t>(k)] * P.at(j, k);
              rowsum += std::abs(xi[static_cast<std::size_t>(i)] * acc);
            }
            norm = std::max(norm, rowsum);
          }
          sup = std::max(sup, norm);
        }
  if (sup <= 1e-14) return std::numeric_limits<double>::infinity();  // annihilated up to roundoff
  return -0.5 * std::log(sup);
}

inline double ehm_lambda(const Measure& mu) {
  if (mu.kind != Measure::Kind::markov)
    throw std::invalid_argument("ehm_lambda: defined for 1-step Markov measures");
  return ehm_lambda(mu.matrices, mu.group);
}

/// (F^N mu)-hat[chi] = mu-hat[chi o F^N].
inline FourierReport pushforward_fourier(const Measure& mu, const Character& chi, const Lca& F,
                                         std::int64_t N) {
  return measure_fourier(mu, char_power(chi, F, N));
}

struct CesaroReport {
  bool cylinder_mode = true;
  double haar_value = 0.0;
  std::vector<double> values;             // per N = 1..Nmax
  std::vector<Complex> complex_values;    // character mode only
  std::vector<double> cesaro;             // running means of values
  std::vector<std::pair<double, double>> density;  // (eps, fraction with |v - haar| <= eps)
  std::vector<std::pair<std::int64_t, double>> subsequence;
};

using CesaroTarget = std::variant<Character, Cylinder>;

/// Track a cylinder probability (via Fourier inversion over characters
/// supported on the cylinder sites) or a single Fourier coefficient along
/// the orbit mu, F mu, F^2 mu, ...
inline CesaroReport cesaro_scan(const Measure& mu, const CesaroTarget& target, const Lca& F,
                                std::int64_t Nmax, const std::string& subsequence = "none") {
  if (Nmax < 1) throw std::invalid_argument("cesaro_scan: Nmax must be >= 1");
  if (F.group != mu.group) throw std::invalid_argument("cesaro_scan: group mismatch");
  if (subsequence != "none" && subsequence != "pow2")
    throw std::invalid_argument("cesaro_scan: unknown subsequence \"" + subsequence + "\"");

  CesaroReport rep;
  // the tracked characters and their conjugate evaluation factors at the
  // cylinder contents (inversion weights)
  std::vector<Character> tracked;
  std::vector<Complex> inv_weight;
  double inv_scale = 1.0;
  if (std::holds_alternative<Cylinder>(target)) {
    const Cylinder& cyl = std::get<Cylinder>(target);
    if (cyl.sites.empty()) throw std::invalid_argument("cesaro_scan: empty cylinder");
    if (cyl.sites.size() != cyl.values.size())
      throw std::invalid_argument("cesaro_scan: cylinder site/value count mismatch");
    const std::int64_t A = mu.group.order();
    const int B = static_cast<int>(cyl.sites.size());
    if (B * detail::bits_per_letter(A) > detail::kEnumerationCapBits)
      throw cap_error("cesaro_scan: inversion set exceeds |B|*log2|A| <= 24 bits");
    rep.cylinder_mode = true;
    std::int64_t combos = 1;
    for (int i = 0; i < B; ++i) combos *= A;
    rep.haar_value = 1.0 / static_cast<double>(combos);
    inv_scale = rep.haar_value;
    for (std::int64_t idx = 1; idx < combos; ++idx) {
      std::vector<std::pair<Site, GroupElement>> entries;
      Phase at_contents(0, 1);
      std::int64_t rest = idx;
      for (int i = 0; i < B; ++i) {
        GroupElement c = element_at(mu.group, rest % A);
        rest /= A;
        if (is_zero(c)) continue;
        entries.emplace_back(cyl.sites[static_cast<std::size_t>(i)], c);
        at_contents = at_contents +
                      pair_phase(mu.group, c, make_element(mu.group, cyl.values[static_cast<std::size_t>(i)]));
      }
      tracked.push_back(make_character(mu.group, F.dim, entries));
      inv_weight.push_back(std::conj(at_contents.to_complex()));
    }
  } else {
    const Character& chi = std::get<Character>(target);
    if (chi.is_trivial()) throw std::invalid_argument("cesaro_scan: trivial character");
    rep.cylinder_mode = false;
    rep.haar_value = 0.0;
    tracked.push_back(chi);
    inv_weight.emplace_back(1.0, 0.0);
  }

  rep.values.reserve(static_cast<std::size_t>(Nmax));
  rep.cesaro.reserve(static_cast<std::size_t>(Nmax));
  double running = 0.0;
  for (std::int64_t N = 1; N <= Nmax; ++N) {
    Complex acc = rep.cylinder_mode ? Complex{1.0, 0.0} : Complex{0.0, 0.0};  // trivial character term
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      tracked[i] = compose_char(tracked[i], F);
      acc += inv_weight[i] * measure_fourier(mu, tracked[i]).value;
    }
    double v;
    if (rep.cylinder_mode) {
      v = inv_scale * acc.real();
    } else {
      rep.complex_values.push_back(acc);
      v = std::abs(acc);
    }
    rep.values.push_back(v);
    running += v;
    rep.cesaro.push_back(running / static_cast<double>(N));
    if (subsequence == "pow2" && (N & (N - 1)) == 0)
      rep.subsequence.emplace_back(N, v);
  }
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    std::int64_t hits = 0;
    for (double v : rep.values) hits += (std::abs(v - rep.haar_value) <= eps);
    rep.density.emplace_back(eps, static_cast<double>(hits) / static_cast<double>(Nmax));
  }
  return rep;
}

struct HmScanRow {
  int rank = 0;
  double max_modulus = 0.0;
  double envelope = std::numeric_limits<double>::quiet_NaN();  // e^{-lambda r} when lambda known
};

struct HmScanReport {
  bool exhaustive = true;
  std::vector<HmScanRow> rows;
};

/// Per-rank maxima of |mu-hat| over characters living on window sites
/// [0..window). Exhaustive when the space fits in 24 bits, else seeded
/// rank-stratified sampling.
inline HmScanReport hm_scan(const Measure& mu, int max_rank, int window,
                            std::uint64_t seed = 0, std::int64_t budget = 2000,
                            double lambda = std::numeric_limits<double>::quiet_NaN()) {
  if (max_rank < 1) throw std::invalid_argument("hm_scan: max_rank must be >= 1");
  if (window < 1) throw std::invalid_argument("hm_scan: window must be >= 1");
  const std::int64_t A = mu.group.order();
  HmScanReport rep;
  rep.rows.resize(static_cast<std::size_t>(max_rank));
  for (int r = 1; r <= max_rank; ++r) {
    rep.rows[static_cast<std::size_t>(r - 1)].rank = r;
    if (!std::isnan(lambda))
      rep.rows[static_cast<std::size_t>(r - 1)].envelope = std::exp(-lambda * r);
  }
  auto consider = [&](const Character& chi) {
    int r = chi.rank();
    if (r < 1 || r > max_rank) return;
    double m = measure_fourier(mu, chi).modulus;
    auto& row = rep.rows[static_cast<std::size_t>(r - 1)];
    row.max_modulus = std::max(row.max_modulus, m);
  };
  rep.exhaustive = window * detail::bits_per_letter(A) <= detail::kEnumerationCapBits;
  if (rep.exhaustive) {
    std::int64_t combos = 1;
    for (int i = 0; i < window; ++i) combos *= A;
    for (std::int64_t idx = 1; idx < combos; ++idx) {
      std::vector<std::pair<Site, GroupElement>> entries;
      std::int64_t rest = idx;
      for (int i = 0; i < window; ++i) {
        std::int64_t ci = rest % A;
        rest /= A;
        if (ci) entries.emplace_back(Site(i), element_at(mu.group, ci));
      }
      consider(make_character(mu.group, 1, entries));
    }
  } else {
    for (int r = 1; r <= max_rank; ++r) {
      for (std::int64_t trial = 0; trial < budget; ++trial) {
        // one stream per (rank, trial): rejection may draw arbitrarily often
        CounterRng rng(seed, (static_cast<std::uint64_t>(r) << 40) | static_cast<std::uint64_t>(trial));
        std::uint64_t ctr = 0;
        std::vector<std::int64_t> sites;
        while (static_cast<int>(sites.size()) < r) {
          std::int64_t s = static_cast<std::int64_t>(rng.uniform(ctr++) * window);
          if (s >= window) s = window - 1;
          if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
        }
        std::vector<std::pair<Site, GroupElement>> entries;
        for (std::int64_t s : sites) {
          std::int64_t ci = 1 + static_cast<std::int64_t>(rng.uniform(ctr++) * (A - 1));
          if (ci >= A) ci = A - 1;
          entries.emplace_back(Site(s), element_at(mu.group, ci));
        }
        consider(make_character(mu.group, 1, entries));
      }
    }
  }
  return rep;
}

struct McRow {
  std::int64_t N = 0;
  double frequency = 0.0;
  double ci_radius = 0.0;  // 4 * sqrt(p(1-p)/samples) at the empirical p
};

struct McReport {
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<McRow> rows;
};

namespace detail {

/// Draw one window from mu. Cells are indexed by absolute site s0+i; all
/// randomness is a pure function of (seed, sample, cell), so the draw is
/// reproducible under any parallel schedule.
inline void sample_window(const Measure& mu, std::int64_t s0, std::int64_t L,
                          const CounterRng& rng, std::vector<std::int64_t>& out) {
  const std::int64_t A = mu.group.order();
  out.resize(static_cast<std::size_t>(L));
  switch (mu.kind) {
    case Measure::Kind::haar:
      for (std::int64_t i = 0; i < L; ++i) {
        std::int64_t v = static_cast<std::int64_t>(rng.uniform(static_cast<std::uint64_t>(i)) * A);
        out[static_cast<std::size_t>(i)] = v >= A ? A - 1 : v;
      }
      return;
    case Measure::Kind::bernoulli:
      for (std::int64_t i = 0; i < L; ++i) {
        double u = rng.uniform(static_cast<std::uint64_t>(i));
        double cum = 0.0;
        std::int64_t pick = A - 1;
        for (std::int64_t a = 0; a < A; ++a) {
          cum += mu.weights[static_cast<std::size_t>(a)];
          if (u < cum) {
            pick = a;
            break;
          }
        }
        out[static_cast<std::size_t>(i)] = pick;
      }
      return;
    case Measure::Kind::markov:
    case Measure::Kind::nstep: {
      const std::int64_t S = mu.alphabet;
      const auto& eta = mu.eta_at(s0);
      double u = rng.uniform(0);
      double cum = 0.0;
      std::int64_t x = S - 1;
      for (std::int64_t s = 0; s < S; ++s) {
        cum += eta[static_cast<std::size_t>(s)];
        if (u < cum) {
          x = s;
          break;
        }
      }
      out[0] = mu.kind == Measure::Kind::nstep ? mu.letter(x, 0) : x;
      for (std::int64_t i = 1; i < L; ++i) {
        const Dmatrix& Q = mu.q_at(s0 + i - 1);
        u = rng.uniform(static_cast<std::uint64_t>(i));
        cum = 0.0;
        std::int64_t y = S - 1;
        for (std::int64_t s = 0; s < S; ++s) {
          cum += Q.at(s, x);
          if (u < cum) {
            y = s;
            break;
          }
        }
        x = y;
        out[static_cast<std::size_t>(i)] = mu.kind == Measure::Kind::nstep ? mu.letter(x, 0) : x;
      }
      return;
    }
  }
}

}  // namespace detail

/// Seeded empirical check of cylinder frequencies along the automaton
/// orbit, on a torus window wide enough that the cylinder's light cone
/// never wraps.
inline McReport monte_carlo_check(const Measure& mu, const Lca& F,
                                  const std::vector<std::int64_t>& N_list, const Cylinder& cyl,
                                  std::int64_t samples, std::uint64_t seed,
                                  unsigned threads = 1) {
  if (samples < 1) throw std::invalid_argument("monte_carlo_check: samples must be >= 1");
  if (N_list.empty()) throw std::invalid_argument("monte_carlo_check: empty N list");
  if (F.dim != 1) throw std::invalid_argument("monte_carlo_check: measures live on A^Z");
  if (F.group != mu.group) throw std::invalid_argument("monte_carlo_check: group mismatch");
  if (cyl.sites.empty() || cyl.sites.size() != cyl.values.size())
    throw std::invalid_argument("monte_carlo_check: bad cylinder");
  if (F.coeffs.empty()) throw std::invalid_argument("monte_carlo_check: zero automaton");

  std::vector<std::int64_t> Ns(N_list);
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  if (Ns.front() < 1) throw std::invalid_argument("monte_carlo_check: N must be >= 1");
  const std::int64_t maxN = Ns.back();
  std::int64_t umin = 0, umax = 0;
  for (const auto& [u, f] : F.coeffs) {
    umin = std::min(umin, u.c[0]);
    umax = std::max(umax, u.c[0]);
  }
  std::int64_t cmin = cyl.sites.front().c[0], cmax = cmin;
  for (const Site& s : cyl.sites) {
    cmin = std::min(cmin, s.c[0]);
    cmax = std::max(cmax, s.c[0]);
  }
  // light cone of the cylinder after maxN steps, aligned down to the chain
  // period so semistationary phases match the infinite-lattice measure
  std::int64_t lo = cmin + maxN * std::min<std::int64_t>(umin, 0);
  std::int64_t hi = cmax + maxN * std::max<std::int64_t>(umax, 0);
  const std::int64_t P = mu.kind == Measure::Kind::markov || mu.kind == Measure::Kind::nstep
                             ? mu.period()
                             : 1;
  while (mod_reduce(lo, P) != 0) --lo;
  const std::int64_t L = hi - lo + 1;
  if (L > 1'000'000) throw cap_error("monte_carlo_check: window exceeds the materialization cap");

  // scalar automaton data for the update loop
  const bool scalar = mu.group.is_cyclic();
  std::vector<std::pair<std::int64_t, Residue>> taps;     // cyclic path
  std::vector<std::pair<std::int64_t, Endo>> endo_taps;   // vector path
  for (const auto& [u, f] : F.coeffs) {
    if (scalar)
      taps.emplace_back(u.c[0], f.m[0]);
    else
      endo_taps.emplace_back(u.c[0], f);
  }
  std::vector<std::int64_t> cyl_cells;
  std::vector<std::int64_t> cyl_want;
  for (std::size_t i = 0; i < cyl.sites.size(); ++i) {
    cyl_cells.push_back(cyl.sites[i].c[0] - lo);
    cyl_want.push_back(element_index(mu.group, make_element(mu.group, cyl.values[i])));
  }

  const unsigned workers = threads ? threads : 1;
  std::vector<std::vector<std::int64_t>> hits_by_worker(
      workers, std::vector<std::int64_t>(Ns.size(), 0));
  std::int64_t chunk = (samples + workers - 1) / workers;
  parallel_for(static_cast<std::int64_t>(workers), workers, [&](std::int64_t w) {
    std::vector<std::int64_t> cells, next;
    std::vector<GroupElement> ecells, enext;
    auto& hits = hits_by_worker[static_cast<std::size_t>(w)];
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(samples, begin + chunk);
    for (std::int64_t sample = begin; sample < end; ++sample) {
      CounterRng rng(seed, static_cast<std::uint64_t>(sample));
      detail::sample_window(mu, lo, L, rng, cells);
      if (!scalar) {
        ecells.resize(static_cast<std::size_t>(L));
        for (std::int64_t i = 0; i < L; ++i)
          ecells[static_cast<std::size_t>(i)] = element_at(mu.group, cells[static_cast<std::size_t>(i)]);
      }
      std::size_t next_check = 0;
      for (std::int64_t step = 1; step <= maxN && next_check < Ns.size(); ++step) {
        if (scalar) {
          next.assign(static_cast<std::size_t>(L), 0);
          const Residue n = mu.group.n;
          for (std::int64_t i = 0; i < L; ++i) {
            Residue acc = 0;
            for (const auto& [off, fu] : taps) {
              std::int64_t j = mod_reduce(i + off, L);
              acc += fu * cells[static_cast<std::size_t>(j)];
            }
            next[static_cast<std::size_t>(i)] = mod_reduce(acc, n);
          }
          cells.swap(next);
        } else {
          enext.assign(static_cast<std::size_t>(L), zero_element(mu.group));
          for (std::int64_t i = 0; i < L; ++i) {
            GroupElement acc = zero_element(mu.group);
            for (const auto& [off, fu] : endo_taps) {
              std::int64_t j = mod_reduce(i + off, L);
              acc = elem_add(mu.group, acc, endo_apply(mu.group, fu, ecells[static_cast<std::size_t>(j)]));
            }
            enext[static_cast<std::size_t>(i)] = std::move(acc);
          }
          ecells.swap(enext);
        }
        if (step == Ns[next_check]) {
          bool match = true;
          for (std::size_t k = 0; k < cyl_cells.size() && match; ++k) {
            std::int64_t got = scalar
                                   ? cells[static_cast<std::size_t>(cyl_cells[k])]
                                   : element_index(mu.group, ecells[static_cast<std::size_t>(cyl_cells[k])]);
            match = got == cyl_want[k];
          }
          hits[next_check] += match;
          ++next_check;
        }
      }
    }
  });

  McReport rep;
  rep.samples = samples;
  rep.seed = seed;
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    std::int64_t total = 0;
    for (const auto& h : hits_by_worker) total += h[k];
    double p = static_cast<double>(total) / static_cast<double>(samples);
    McRow row;
    row.N = Ns[k];
    row.frequency = p;
    row.ci_radius = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace haarlab
