// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "haarlab/errors.hpp"
#include "haarlab/group.hpp"
#include "haarlab/measures.hpp"
#include "haarlab/site.hpp"

namespace haarlab {

enum class GridBoundary { torus, free_strip };  // free_strip: x wraps, y is free

/// One family of strictly positive patch potentials: the same weight
/// table applied at every grid position where the shape fits. Patch
/// letter k (shape order) is the least-significant digit of the contents
/// index.
struct PatchFamily {
  std::vector<Site> shape;      // dim-2 offsets, (0,0) conventionally included
  std::vector<double> weights;  // |A|^{|shape|} strictly positive entries
};

struct GridMrfSpec {
  Group group;
  int width = 1;
  int height = 1;
  GridBoundary boundary = GridBoundary::free_strip;
  std::vector<PatchFamily> patches;
};

struct SandwichQuery {
  std::int64_t lower = 0;  // row k-1 contents, A^W index
  std::int64_t upper = 0;  // row k+1 contents
  int k = 1;
};

/// A finite-grid Gibbs measure materialized as an exact joint table.
/// Strictly positive potentials guarantee both the Markov-field property
/// (w.r.t. the difference-set interaction range) and full support.
struct GridMrf {
  GridMrfSpec spec;
  std::vector<Site> interaction;  // Markov blanket shape: differences of patch shapes
  std::vector<double> joint;      // over |A|^{W*H}; cell (x,y) is digit y*W+x

  std::int64_t order() const { return spec.group.order(); }
  std::int64_t cells() const { return static_cast<std::int64_t>(spec.width) * spec.height; }
  std::int64_t configs() const { return static_cast<std::int64_t>(joint.size()); }
  std::int64_t cell_id(std::int64_t x, int y) const {
    return static_cast<std::int64_t>(y) * spec.width + x;
  }
  std::int64_t cell_value(std::int64_t cfg, std::int64_t cell) const {
    for (std::int64_t i = 0; i < cell; ++i) cfg /= order();
    return cfg % order();
  }
  std::int64_t row_of(std::int64_t cfg, int y) const {
    std::int64_t key = 0, mul = 1;
    for (int x = 0; x < spec.width; ++x) {
      key += cell_value(cfg, cell_id(x, y)) * mul;
      mul *= order();
    }
    return key;
  }
  std::int64_t row_states() const {
    std::int64_t s = 1;
    for (int x = 0; x < spec.width; ++x) s *= order();
    return s;
  }
};

inline GridMrf make_grid_mrf(const GridMrfSpec& spec) {
  if (spec.width < 1 || spec.height < 1)
    throw std::invalid_argument("grid mrf: width and height must be >= 1");
  if (spec.patches.empty()) throw std::invalid_argument("grid mrf: no patch potentials");
  const std::int64_t A = spec.group.order();
  const std::int64_t cells = static_cast<std::int64_t>(spec.width) * spec.height;
  if (cells * detail::bits_per_letter(A) > detail::kEnumerationCapBits)
    throw cap_error("grid mrf: |A|^(W*H) exceeds the materialization cap");
  for (const auto& fam : spec.patches) {
    if (fam.shape.empty()) throw std::invalid_argument("grid mrf: empty patch shape");
    std::int64_t want = 1;
    std::int64_t dy_min = fam.shape[0].c[1], dy_max = dy_min;
    for (const Site& s : fam.shape) {
      if (s.dim != 2) throw std::invalid_argument("grid mrf: patch offsets must be 2-dimensional");
      dy_min = std::min(dy_min, s.c[1]);
      dy_max = std::max(dy_max, s.c[1]);
      want *= A;
    }
    if (dy_max - dy_min > 1)
      throw std::invalid_argument(
          "grid mrf: patch vertical extent must be <= 1; pre-block larger ranges");
    if (static_cast<std::int64_t>(fam.weights.size()) != want)
      throw std::invalid_argument("grid mrf: weight table size mismatch");
    for (double w : fam.weights)
      if (!(w > 0.0)) throw std::invalid_argument("grid mrf: potentials must be strictly positive");
  }

  GridMrf mrf;
  mrf.spec = spec;
  std::set<Site> diffs;
  for (const auto& fam : spec.patches)
    for (const Site& s : fam.shape)
      for (const Site& t : fam.shape) diffs.insert(s - t);
  mrf.interaction.assign(diffs.begin(), diffs.end());

  // positions where each family applies; x always wraps, y wraps only on
  // the torus
  struct Placement {
    const PatchFamily* fam;
    std::vector<std::int64_t> cell_ids;  // per shape offset
  };
  std::vector<Placement> placements;
  for (const auto& fam : spec.patches) {
    std::int64_t dy_min = fam.shape[0].c[1], dy_max = dy_min;
    for (const Site& s : fam.shape) {
      dy_min = std::min(dy_min, s.c[1]);
      dy_max = std::max(dy_max, s.c[1]);
    }
    for (int y = 0; y < spec.height; ++y) {
      if (spec.boundary == GridBoundary::free_strip &&
          (y + dy_min < 0 || y + dy_max >= spec.height))
        continue;
      for (int x = 0; x < spec.width; ++x) {
        Placement pl;
        pl.fam = &fam;
        for (const Site& s : fam.shape) {
          std::int64_t px = mod_reduce(x + s.c[0], spec.width);
          std::int64_t py = spec.boundary == GridBoundary::torus
                                ? mod_reduce(y + s.c[1], spec.height)
                                : y + s.c[1];
          pl.cell_ids.push_back(py * spec.width + px);
        }
        placements.push_back(std::move(pl));
      }
    }
  }

  std::int64_t total = 1;
  for (std::int64_t i = 0; i < cells; ++i) total *= A;
  mrf.joint.assign(static_cast<std::size_t>(total), 0.0);
  std::vector<std::int64_t> value(static_cast<std::size_t>(cells));
  double Z = 0.0;
  for (std::int64_t cfg = 0; cfg < total; ++cfg) {
    std::int64_t rest = cfg;
    for (std::int64_t i = 0; i < cells; ++i) {
      value[static_cast<std::size_t>(i)] = rest % A;
      rest /= A;
    }
    double w = 1.0;
    for (const auto& pl : placements) {
      std::int64_t patch = 0, mul = 1;
      for (std::int64_t cid : pl.cell_ids) {
        patch += value[static_cast<std::size_t>(cid)] * mul;
        mul *= A;
      }
      w *= pl.fam->weights[static_cast<std::size_t>(patch)];
    }
    mrf.joint[static_cast<std::size_t>(cfg)] = w;
    Z += w;
  }
  for (double& p : mrf.joint) p /= Z;
  return mrf;
}

struct MrfPropertyReport {
  bool holds = false;
  double worst_deviation = 0.0;
};

/// Exhaustive conditional-independence check: inside the region vs
/// outside its closure, conditional on every positive-probability
/// boundary content.
inline MrfPropertyReport verify_mrf_property(const GridMrf& mrf,
                                             const std::vector<Site>& region) {
  const std::int64_t A = mrf.order();
  std::set<std::int64_t> in_set;
  for (const Site& s : region) {
    if (s.dim != 2) throw std::invalid_argument("verify_mrf_property: region cells must be 2-d");
    std::int64_t x = mod_reduce(s.c[0], mrf.spec.width);
    std::int64_t y = s.c[1];
    if (mrf.spec.boundary == GridBoundary::torus) y = mod_reduce(y, mrf.spec.height);
    if (y < 0 || y >= mrf.spec.height)
      throw std::invalid_argument("verify_mrf_property: region cell outside the strip");
    in_set.insert(y * mrf.spec.width + x);
  }
  if (in_set.empty()) throw std::invalid_argument("verify_mrf_property: empty region");
  std::set<std::int64_t> cl_set(in_set);
  for (std::int64_t cid : in_set) {
    std::int64_t x = cid % mrf.spec.width;
    std::int64_t y = cid / mrf.spec.width;
    for (const Site& u : mrf.interaction) {
      std::int64_t px = mod_reduce(x + u.c[0], mrf.spec.width);
      std::int64_t py = y + u.c[1];
      if (mrf.spec.boundary == GridBoundary::torus) py = mod_reduce(py, mrf.spec.height);
      if (py < 0 || py >= mrf.spec.height) continue;
      cl_set.insert(py * mrf.spec.width + px);
    }
  }
  std::vector<std::int64_t> in_cells(in_set.begin(), in_set.end());
  std::vector<std::int64_t> bd_cells, out_cells;
  for (std::int64_t cid = 0; cid < mrf.cells(); ++cid) {
    if (in_set.count(cid)) continue;
    if (cl_set.count(cid))
      bd_cells.push_back(cid);
    else
      out_cells.push_back(cid);
  }

  MrfPropertyReport rep;
  rep.holds = true;
  if (out_cells.empty()) return rep;  // nothing outside the closure

  auto key_of = [&](std::int64_t cfg, const std::vector<std::int64_t>& cs) {
    std::int64_t key = 0, mul = 1;
    for (std::int64_t cid : cs) {
      key += mrf.cell_value(cfg, cid) * mul;
      mul *= A;
    }
    return key;
  };
  std::map<std::int64_t, double> pa;
  std::map<std::pair<std::int64_t, std::int64_t>, double> pin, pout;
  std::map<std::pair<std::int64_t, std::pair<std::int64_t, std::int64_t>>, double> pjoint;
  for (std::int64_t cfg = 0; cfg < mrf.configs(); ++cfg) {
    double p = mrf.joint[static_cast<std::size_t>(cfg)];
    if (p == 0.0) continue;
    std::int64_t kb = key_of(cfg, bd_cells);
    std::int64_t ki = key_of(cfg, in_cells);
    std::int64_t ko = key_of(cfg, out_cells);
    pa[kb] += p;
    pin[{kb, ki}] += p;
    pout[{kb, ko}] += p;
    pjoint[{kb, {ki, ko}}] += p;
  }
  for (const auto& [kb, total] : pa) {
    for (const auto& [ik, pi] : pin) {
      if (ik.first != kb) continue;
      for (const auto& [ok, po] : pout) {
        if (ok.first != kb) continue;
        auto it = pjoint.find({kb, {ik.second, ok.second}});
        double pj = it == pjoint.end() ? 0.0 : it->second;
        double dev = std::abs(pj / total - (pi / total) * (po / total));
        rep.worst_deviation = std::max(rep.worst_deviation, dev);
      }
    }
  }
  rep.holds = rep.worst_deviation <= 1e-10;
  return rep;
}

struct LayerKernel {
  int row = 0;      // transition from row `row` to row `row+1`
  Dmatrix Q;        // column-stochastic over the row alphabet A^W
};

struct LaminationReport {
  std::vector<LayerKernel> kernels;
  std::vector<double> first_row;          // distribution of row 0
  double reconstruction_deviation = 0.0;  // kernel chain vs exact row cylinders
  int distinct_kernels = 0;               // observed local-transition variety
};

/// Realize the field row by row: kernels Q^{(n)} give the conditional of
/// row n+1 given row n. Valid on the free strip, where the vertical
/// interaction extent <= 1 makes the row process a 1-step chain.
inline LaminationReport lamination_kernels(const GridMrf& mrf) {
  if (mrf.spec.boundary != GridBoundary::free_strip)
    throw std::invalid_argument("lamination_kernels: row chain needs the free-strip boundary");
  if (mrf.spec.height < 2)
    throw std::invalid_argument("lamination_kernels: need at least two rows");
  const std::int64_t S = mrf.row_states();
  const int H = mrf.spec.height;
  std::vector<std::vector<double>> rowm(static_cast<std::size_t>(H),
                                        std::vector<double>(static_cast<std::size_t>(S), 0.0));
  std::vector<Dmatrix> pair(static_cast<std::size_t>(H - 1), Dmatrix(S));  // pair[n].at(b,a)
  std::map<std::vector<std::int64_t>, double> row_cyl;
  for (std::int64_t cfg = 0; cfg < mrf.configs(); ++cfg) {
    double p = mrf.joint[static_cast<std::size_t>(cfg)];
    std::vector<std::int64_t> rows(static_cast<std::size_t>(H));
    for (int y = 0; y < H; ++y) rows[static_cast<std::size_t>(y)] = mrf.row_of(cfg, y);
    for (int y = 0; y < H; ++y) rowm[static_cast<std::size_t>(y)][static_cast<std::size_t>(rows[static_cast<std::size_t>(y)])] += p;
    for (int y = 0; y + 1 < H; ++y)
      pair[static_cast<std::size_t>(y)].at(rows[static_cast<std::size_t>(y + 1)], rows[static_cast<std::size_t>(y)]) += p;
    row_cyl[rows] += p;
  }
  LaminationReport rep;
  rep.first_row = rowm[0];
  for (int n = 0; n + 1 < H; ++n) {
    LayerKernel k;
    k.row = n;
    k.Q = Dmatrix(S);
    for (std::int64_t a = 0; a < S; ++a) {
      double margin = rowm[static_cast<std::size_t>(n)][static_cast<std::size_t>(a)];
      if (margin <= 0.0)
        throw computation_error("lamination_kernels: zero-probability row content under a "
                                "full-support field");
      for (std::int64_t b = 0; b < S; ++b)
        k.Q.at(b, a) = pair[static_cast<std::size_t>(n)].at(b, a) / margin;
    }
    rep.kernels.push_back(std::move(k));
  }
  // chain reconstruction must reproduce all full row cylinders
  for (const auto& [rows, p] : row_cyl) {
    double rec = rep.first_row[static_cast<std::size_t>(rows[0])];
    for (int n = 0; n + 1 < H; ++n)
      rec *= rep.kernels[static_cast<std::size_t>(n)].Q.at(rows[static_cast<std::size_t>(n + 1)],
                                                           rows[static_cast<std::size_t>(n)]);
    rep.reconstruction_deviation = std::max(rep.reconstruction_deviation, std::abs(rec - p));
  }
  std::vector<std::vector<double>> seen;
  for (const auto& k : rep.kernels) {
    bool dup = false;
    for (const auto& other : seen) {
      double d = 0.0;
      for (std::size_t i = 0; i < other.size(); ++i) d = std::max(d, std::abs(other[i] - k.Q.a[i]));
      if (d <= 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) seen.push_back(k.Q.a);
  }
  rep.distinct_kernels = static_cast<int>(seen.size());
  return rep;
}

struct SandwichMeasure {
  std::vector<double> dist;   // over the row alphabet A^W
  double beyond_deviation = 0.0;  // sensitivity to rows beyond k-1 and k+1
};

/// Exact conditional of row k given rows k-1 and k+1. The returned
/// deviation certifies independence from every further row.
inline SandwichMeasure sandwich_measure(const GridMrf& mrf, const SandwichQuery& query) {
  const int H = mrf.spec.height;
  if (query.k < 1 || query.k > H - 2)
    throw std::invalid_argument("sandwich_measure: k needs rows k-1 and k+1 inside the grid");
  const std::int64_t S = mrf.row_states();
  if (query.lower < 0 || query.lower >= S || query.upper < 0 || query.upper >= S)
    throw std::invalid_argument("sandwich_measure: row contents out of range");
  std::vector<double> base(static_cast<std::size_t>(S), 0.0);
  // conditionals refined by one extra row's contents, per beyond-row
  std::vector<std::map<std::int64_t, std::vector<double>>> refined;
  std::vector<int> beyond_rows;
  for (int y = 0; y < H; ++y)
    if (y < query.k - 1 || y > query.k + 1) beyond_rows.push_back(y);
  refined.resize(beyond_rows.size());

  for (std::int64_t cfg = 0; cfg < mrf.configs(); ++cfg) {
    if (mrf.row_of(cfg, query.k - 1) != query.lower) continue;
    if (mrf.row_of(cfg, query.k + 1) != query.upper) continue;
    double p = mrf.joint[static_cast<std::size_t>(cfg)];
    std::int64_t b = mrf.row_of(cfg, query.k);
    base[static_cast<std::size_t>(b)] += p;
    for (std::size_t i = 0; i < beyond_rows.size(); ++i) {
      std::int64_t rb = mrf.row_of(cfg, beyond_rows[i]);
      auto& slot = refined[i][rb];
      if (slot.empty()) slot.assign(static_cast<std::size_t>(S), 0.0);
      slot[static_cast<std::size_t>(b)] += p;
    }
  }
  double total = 0.0;
  for (double v : base) total += v;
  if (total <= 0.0)
    throw computation_error("sandwich_measure: conditioning event has zero probability");
  SandwichMeasure out;
  out.dist.assign(static_cast<std::size_t>(S), 0.0);
  for (std::int64_t b = 0; b < S; ++b) out.dist[static_cast<std::size_t>(b)] = base[static_cast<std::size_t>(b)] / total;
  for (std::size_t i = 0; i < beyond_rows.size(); ++i) {
    for (const auto& [rb, tab] : refined[i]) {
      double sub = 0.0;
      for (double v : tab) sub += v;
      if (sub <= 0.0) continue;
      for (std::int64_t b = 0; b < S; ++b)
        out.beyond_deviation = std::max(
            out.beyond_deviation,
            std::abs(tab[static_cast<std::size_t>(b)] / sub - out.dist[static_cast<std::size_t>(b)]));
    }
  }
  return out;
}

struct UhmEhmReport {
  double lambda_sandwich = 0.0;  // empirical; +inf when every modulus vanishes
  bool sandwich_full_support = false;
  double min_sandwich_prob = 0.0;
  bool uhm_ok = false;
  double uhm_margin = 0.0;  // max over checks of (norm - bound); <= tol passes
  bool ehm_ok = false;
  double ehm_margin = 0.0;
  std::vector<std::pair<int, double>> grid_rank_max;  // per-rank max |mu-hat|
  int distinct_kernels = 0;
};

/// The finite-scale bound chain: empirical EHM constant of all sandwich
/// measures, the two-step operator-norm (UHM) inequality on the
/// lamination kernels at that constant, and the grid EHM envelope at half
/// of it.
inline UhmEhmReport uhm_ehm_check(const GridMrf& mrf, int max_rank) {
  if (max_rank < 1) throw std::invalid_argument("uhm_ehm_check: max_rank must be >= 1");
  const Group& g = mrf.spec.group;
  const std::int64_t A = g.order();
  const int W = mrf.spec.width;
  const int H = mrf.spec.height;
  const std::int64_t S = mrf.row_states();
  constexpr double tol = 1e-10;

  // row character table: rchar[c][x] = prod_k <c_k, x_k>
  std::vector<std::vector<Complex>> rchar(static_cast<std::size_t>(S));
  std::vector<int> rrank(static_cast<std::size_t>(S), 0);
  for (std::int64_t c = 0; c < S; ++c) {
    auto& row = rchar[static_cast<std::size_t>(c)];
    row.assign(static_cast<std::size_t>(S), Complex{1.0, 0.0});
    std::int64_t rest = c;
    std::vector<GroupElement> letters;
    for (int k = 0; k < W; ++k) {
      letters.push_back(element_at(g, rest % A));
      rest /= A;
      if (!is_zero(letters.back())) ++rrank[static_cast<std::size_t>(c)];
    }
    for (std::int64_t x = 0; x < S; ++x) {
      Phase ph(0, 1);
      std::int64_t xr = x;
      for (int k = 0; k < W; ++k) {
        ph = ph + pair_phase(g, letters[static_cast<std::size_t>(k)], element_at(g, xr % A));
        xr /= A;
      }
      row[static_cast<std::size_t>(x)] = ph.to_complex();
    }
  }

  UhmEhmReport rep;
  LaminationReport lam = lamination_kernels(mrf);
  rep.distinct_kernels = lam.distinct_kernels;

  rep.lambda_sandwich = std::numeric_limits<double>::infinity();
  rep.min_sandwich_prob = 1.0;
  const int row_rank_cap = std::min(max_rank, W);
  for (int k = 1; k <= H - 2; ++k) {
    for (std::int64_t a = 0; a < S; ++a) {
      for (std::int64_t c = 0; c < S; ++c) {
        SandwichMeasure nu = sandwich_measure(mrf, SandwichQuery{a, c, k});
        for (double v : nu.dist) rep.min_sandwich_prob = std::min(rep.min_sandwich_prob, v);
        for (int r = 1; r <= row_rank_cap; ++r) {
          double mx = 0.0;
          for (std::int64_t cc = 1; cc < S; ++cc) {
            if (rrank[static_cast<std::size_t>(cc)] != r) continue;
            Complex acc{0.0, 0.0};
            for (std::int64_t b = 0; b < S; ++b)
              acc += rchar[static_cast<std::size_t>(cc)][static_cast<std::size_t>(b)] *
                     nu.dist[static_cast<std::size_t>(b)];
            mx = std::max(mx, std::abs(acc));
          }
          if (mx > 1e-14)  // zero up to roundoff does not constrain lambda
            rep.lambda_sandwich = std::min(rep.lambda_sandwich, -std::log(mx) / r);
        }
      }
    }
  }
  rep.sandwich_full_support = rep.min_sandwich_prob > 0.0;

  // UHM: || adj(Q^{(n+1)}) chi. adj(Q^{(n)}) ||_inf <= e^{-lambda rank}
  rep.uhm_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < lam.kernels.size(); ++n) {
    const Dmatrix& Q0 = lam.kernels[n].Q;
    const Dmatrix& Q1 = lam.kernels[n + 1].Q;
    for (std::int64_t cc = 1; cc < S; ++cc) {
      int r = rrank[static_cast<std::size_t>(cc)];
      if (r > max_rank) continue;
      const auto& chi = rchar[static_cast<std::size_t>(cc)];
      // M = Q1^T D Q0^T: M[x][z] = sum_y Q1[y][x] chi[y] Q0[z][y]
      double norm = 0.0;
      for (std::int64_t x = 0; x < S; ++x) {
        double rowsum = 0.0;
        for (std::int64_t z = 0; z < S; ++z) {
          Complex acc{0.0, 0.0};
          for (std::int64_t y = 0; y < S; ++y)
            acc += Q1.at(y, x) * chi[static_cast<std::size_t>(y)] * Q0.at(z, y);
          rowsum += std::abs(acc);
        }
        norm = std::max(norm, rowsum);
      }
      rep.uhm_margin = std::max(rep.uhm_margin, norm - std::exp(-rep.lambda_sandwich * r));
    }
  }
  if (lam.kernels.size() < 2) rep.uhm_margin = 0.0;  // no consecutive pair to test
  rep.uhm_ok = rep.uhm_margin <= tol;

  // EHM at lambda/2 over grid characters of rank <= max_rank
  rep.ehm_margin = -std::numeric_limits<double>::infinity();
  const std::int64_t ncell = mrf.cells();
  std::vector<std::pair<int, double>> rank_max(static_cast<std::size_t>(max_rank));
  for (int r = 1; r <= max_rank; ++r) rank_max[static_cast<std::size_t>(r - 1)] = {r, 0.0};
  std::vector<std::int64_t> sites;
  std::vector<std::int64_t> coeff;
  auto scan_support = [&](auto&& self, std::int64_t first, int depth, int target) -> void {
    if (depth == target) {
      // odometer over nonzero coefficients at the chosen cells
      coeff.assign(static_cast<std::size_t>(target), 1);
      while (true) {
        Complex acc{0.0, 0.0};
        for (std::int64_t cfg = 0; cfg < mrf.configs(); ++cfg) {
          double p = mrf.joint[static_cast<std::size_t>(cfg)];
          Phase ph(0, 1);
          for (int i = 0; i < target; ++i)
            ph = ph + pair_phase(g, element_at(g, coeff[static_cast<std::size_t>(i)]),
                                 element_at(g, mrf.cell_value(cfg, sites[static_cast<std::size_t>(i)])));
          acc += p * ph.to_complex();
        }
        double mod = std::abs(acc);
        auto& slot = rank_max[static_cast<std::size_t>(target - 1)];
        slot.second = std::max(slot.second, mod);
        rep.ehm_margin = std::max(rep.ehm_margin,
                                  mod - std::exp(-(rep.lambda_sandwich / 2.0) * target));
        int i = 0;
        for (; i < target; ++i) {
          if (++coeff[static_cast<std::size_t>(i)] < A) break;
          coeff[static_cast<std::size_t>(i)] = 1;
        }
        if (i == target) break;
      }
      return;
    }
    for (std::int64_t cell = first; cell < ncell; ++cell) {
      sites.push_back(cell);
      self(self, cell + 1, depth + 1, target);
      sites.pop_back();
    }
  };
  for (int r = 1; r <= max_rank && r <= ncell; ++r) {
    sites.clear();
    scan_support(scan_support, 0, 0, r);
  }
  rep.ehm_ok = rep.ehm_margin <= tol;
  rep.grid_rank_max = rank_max;
  return rep;
}

}  // namespace haarlab
