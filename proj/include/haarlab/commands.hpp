// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "haarlab/config.hpp"
#include "haarlab/diffusion.hpp"
#include "haarlab/parallel.hpp"
#include "haarlab/report.hpp"

namespace haarlab {

namespace cmd_detail {

inline std::vector<ReportCell> row(std::initializer_list<ReportCell> cells) { return cells; }

inline std::string site_list(const std::vector<Site>& sites) {
  std::string out;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i) out += ' ';
    out += to_string(sites[i]);
  }
  return out;
}

inline Report base_report(const std::string& command, const RunConfig& cfg) {
  Report rep;
  rep.command = command;
  rep.config_echo = canonical_config_json(cfg);
  rep.config_digest = hex64(fnv1a64(rep.config_echo));
  return rep;
}

inline Report cmd_group_info(const RunConfig& cfg) {
  Report rep = base_report("group-info", cfg);
  Group g = build_group(cfg);
  rep.table.name = "group-info";
  rep.table.columns = {"field", "value"};
  rep.table.rows.push_back(row({std::string("kind"), std::string(g.is_cyclic() ? "cyclic" : "vector")}));
  rep.table.rows.push_back(row({std::string("group"), to_string(g)}));
  rep.table.rows.push_back(row({std::string("exponent"), g.exponent()}));
  rep.table.rows.push_back(row({std::string("order"), g.order()}));
  if (g.is_cyclic()) {
    auto comps = crt_split(g);
    for (std::size_t i = 0; i < comps.size(); ++i)
      rep.table.rows.push_back(row({"component[" + std::to_string(i) + "]", to_string(comps[i])}));
  } else {
    rep.table.rows.push_back(row({std::string("p"), g.p}));
    rep.table.rows.push_back(row({std::string("r"), static_cast<std::int64_t>(g.r)}));
    rep.table.rows.push_back(row({std::string("J"), static_cast<std::int64_t>(g.J)}));
  }
  return rep;
}

inline Report cmd_lucas(const RunConfig& cfg) {
  Report rep = base_report("lucas", cfg);
  if (!cfg.analysis.lucas) throw config_error("analysis.lucas: required (fields N, n, p)");
  const LucasCfg& l = *cfg.analysis.lucas;
  Residue value;
  try {
    value = lucas_binom(l.N, l.n, l.p);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("analysis.lucas: ") + e.what());
  }
  rep.table.name = "lucas";
  rep.table.columns = {"N", "n", "p", "binom_mod_p"};
  rep.table.rows.push_back(row({l.N, l.n, l.p, value}));
  return rep;
}

inline Report cmd_rank_traj(const RunConfig& cfg) {
  Report rep = base_report("rank-traj", cfg);
  Group g = build_group(cfg);
  Lca F = build_lca(cfg, g);
  Character chi = build_character(cfg, g);
  if (!cfg.analysis.nmax) throw config_error("analysis.nmax: required");
  RankTrajectory traj;
  try {
    traj = rank_trajectory(chi, F, *cfg.analysis.nmax);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("analysis: ") + e.what());
  }
  rep.table.name = "rank-traj";
  rep.table.columns = {"N", "rank"};
  for (std::size_t i = 0; i < traj.ranks.size(); ++i)
    rep.table.rows.push_back(
        row({static_cast<std::int64_t>(i + 1), static_cast<std::int64_t>(traj.ranks[i])}));
  return rep;
}

inline Report cmd_diffusion_report(const RunConfig& cfg) {
  Report rep = base_report("diffusion-report", cfg);
  Group g = build_group(cfg);
  Lca F = build_lca(cfg, g);
  rep.table.name = "diffusion-report";
  rep.table.columns = {"item", "key", "value"};
  if (!g.is_cyclic())
    throw config_error(
        "lca: diffusion-report covers scalar automata; use the separating command for matrix "
        "coefficients");
  DiffusionHypothesis hyp = diffusion_hypothesis(F);
  for (const auto& [p, count] : hyp.coprime_counts)
    rep.table.rows.push_back(row({std::string("coprime-coefficients"), "p=" + std::to_string(p),
                                  std::to_string(count)}));
  rep.table.rows.push_back(row({std::string("hypothesis"), std::string("two-coprime-per-prime"),
                                std::string(hyp.satisfied ? "satisfied" : "not satisfied")}));
  if (cfg.character && cfg.analysis.nmax) {
    Character chi = build_character(cfg, g);
    RankTrajectory traj = rank_trajectory(chi, F, *cfg.analysis.nmax);
    std::vector<std::int64_t> thresholds = cfg.analysis.thresholds;
    if (thresholds.empty()) thresholds = {2, 4, 8, 16};
    std::vector<double> fractions = density_report(traj, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      rep.table.rows.push_back(row({std::string("rank-density"), "R=" + std::to_string(thresholds[i]),
                                    detail::format_double(fractions[i])}));
    rep.warnings.push_back(
        "rank densities are empirical lower bounds at finite Nmax, not limit statements");
  }
  return rep;
}

inline Report cmd_separating(const RunConfig& cfg) {
  Report rep = base_report("separating", cfg);
  if (!cfg.analysis.separating) throw config_error("analysis.separating: required");
  const SeparatingCfg& s = *cfg.analysis.separating;
  rep.table.name = "separating";
  rep.table.columns = {"field", "value"};
  if (s.mode == "verify") {
    Group g = build_group(cfg);
    Lca F = build_lca(cfg, g);
    std::vector<Site> W, V;
    for (std::size_t i = 0; i < s.W.size(); ++i)
      W.push_back(build_site(s.W[i], cfg.dimension, "analysis.separating.W[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < s.V.size(); ++i)
      V.push_back(build_site(s.V[i], cfg.dimension, "analysis.separating.V[" + std::to_string(i) + "]"));
    Lca Fj = lca_power_coeffs(F, s.power);
    SeparatingCertificate cert;
    try {
      cert = verify_separating(Fj, W, V, s.power);
    } catch (const std::invalid_argument& e) {
      throw config_error(std::string("analysis.separating: ") + e.what());
    }
    rep.table.rows.push_back(row({std::string("mode"), std::string("verify")}));
    rep.table.rows.push_back(row({std::string("power"), cert.power}));
    rep.table.rows.push_back(row({std::string("W"), site_list(cert.W)}));
    rep.table.rows.push_back(row({std::string("V"), site_list(cert.V)}));
    rep.table.rows.push_back(row({std::string("verified"), std::string(cert.verified ? "true" : "false")}));
    return rep;
  }
  ExampleSeparating ex = build_example_separating(s.j, s.p, s.V_extent, s.R);
  rep.table.rows.push_back(row({std::string("mode"), std::string("ledrappier")}));
  rep.table.rows.push_back(row({std::string("j"), s.j}));
  rep.table.rows.push_back(row({std::string("p"), s.p}));
  rep.table.rows.push_back(row({std::string("power"), ex.certificate.power}));
  rep.table.rows.push_back(row({std::string("zq1_position"), static_cast<std::int64_t>(ex.zq1_position)}));
  std::string chosen;
  for (std::size_t i = 0; i < ex.choice_positions.size(); ++i) {
    if (i) chosen += ' ';
    chosen += std::to_string(ex.choice_positions[i]);
  }
  rep.table.rows.push_back(row({std::string("choice_positions"), chosen}));
  rep.table.rows.push_back(row({std::string("W"), site_list(ex.certificate.W)}));
  rep.table.rows.push_back(row({std::string("V"), site_list(ex.certificate.V)}));
  rep.table.rows.push_back(
      row({std::string("verified"), std::string(ex.certificate.verified ? "true" : "false")}));
  return rep;
}

inline Report cmd_ledrappier(const RunConfig& cfg) {
  Report rep = base_report("ledrappier", cfg);
  if (!cfg.analysis.ledrappier) throw config_error("analysis.ledrappier: required (fields N, p)");
  const LedrappierCfg& l = *cfg.analysis.ledrappier;
  if (l.N < 2) throw config_error("analysis.ledrappier.N: must be >= 2");
  if (!is_prime(l.p)) throw config_error("analysis.ledrappier.p: must be prime");
  rep.table.name = "ledrappier";
  rep.table.columns = {"m", "a00", "a01", "a10", "a11"};
  for (std::int64_t m = 0; m <= l.N; ++m) {
    Endo e = ledrappier_matrix(l.N, m, l.p);
    rep.table.rows.push_back(row({m, e.m[0], e.m[1], e.m[2], e.m[3]}));
  }
  return rep;
}

inline Report cmd_fourier(const RunConfig& cfg) {
  Report rep = base_report("fourier", cfg);
  Group g = build_group(cfg);
  Measure mu = build_measure(cfg, g);
  Character chi = build_character(cfg, g);
  FourierReport fr;
  if (cfg.analysis.power) {
    Lca F = build_lca(cfg, g);
    fr = pushforward_fourier(mu, chi, F, *cfg.analysis.power);
  } else {
    fr = measure_fourier(mu, chi);
  }
  rep.table.name = "fourier";
  rep.table.columns = {"character", "rank", "re", "im", "modulus"};
  rep.table.rows.push_back(row({fr.character_desc, static_cast<std::int64_t>(fr.rank),
                                fr.value.real(), fr.value.imag(), fr.modulus}));
  return rep;
}

inline Report cmd_ehm_lambda(const RunConfig& cfg) {
  Report rep = base_report("ehm-lambda", cfg);
  Group g = build_group(cfg);
  Measure mu = build_measure(cfg, g);
  if (mu.kind != Measure::Kind::markov)
    throw config_error("measure: ehm-lambda needs a markov measure");
  double lambda = ehm_lambda(mu);
  rep.table.name = "ehm-lambda";
  rep.table.columns = {"lambda", "sup_norm", "matrices"};
  double sup = std::isinf(lambda) ? 0.0 : std::exp(-2.0 * lambda);
  rep.table.rows.push_back(
      row({lambda, sup, static_cast<std::int64_t>(mu.matrices.size())}));
  return rep;
}

inline Report cmd_cesaro(const RunConfig& cfg) {
  Report rep = base_report("cesaro", cfg);
  Group g = build_group(cfg);
  Measure mu = build_measure(cfg, g);
  Lca F = build_lca(cfg, g);
  if (!cfg.analysis.nmax) throw config_error("analysis.nmax: required");
  std::string subseq = cfg.analysis.subsequence.value_or("none");
  CesaroTarget target = [&]() -> CesaroTarget {
    if (cfg.analysis.cylinder) return build_cylinder(cfg, g);
    if (cfg.character) return build_character(cfg, g);
    throw config_error("analysis.cylinder or character: one target required");
  }();
  CesaroReport scan;
  try {
    scan = cesaro_scan(mu, target, F, *cfg.analysis.nmax, subseq);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("analysis: ") + e.what());
  }
  rep.table.name = "cesaro";
  rep.table.columns = {"N", "value", "cesaro_mean", "subseq"};
  std::size_t next_sub = 0;
  for (std::size_t i = 0; i < scan.values.size(); ++i) {
    std::int64_t N = static_cast<std::int64_t>(i + 1);
    std::int64_t in_sub = 0;
    if (next_sub < scan.subsequence.size() && scan.subsequence[next_sub].first == N) {
      in_sub = 1;
      ++next_sub;
    }
    rep.table.rows.push_back(row({N, scan.values[i], scan.cesaro[i], in_sub}));
  }
  rep.warnings.push_back("haar_value " + detail::format_double(scan.haar_value));
  for (const auto& [eps, frac] : scan.density)
    rep.warnings.push_back("density |value-haar| <= " + detail::format_double(eps) + ": " +
                           detail::format_double(frac));
  return rep;
}

inline Report cmd_hm_scan(const RunConfig& cfg) {
  Report rep = base_report("hm-scan", cfg);
  Group g = build_group(cfg);
  Measure mu = build_measure(cfg, g);
  if (!cfg.analysis.max_rank) throw config_error("analysis.max_rank: required");
  if (!cfg.analysis.window) throw config_error("analysis.window: required");
  const int window = static_cast<int>(*cfg.analysis.window);
  const int max_rank = static_cast<int>(*cfg.analysis.max_rank);
  double lambda = std::numeric_limits<double>::quiet_NaN();
  if (cfg.analysis.lambda)
    lambda = *cfg.analysis.lambda;
  else if (mu.kind == Measure::Kind::markov)
    lambda = ehm_lambda(mu);
  const bool exhaustive =
      window * detail::bits_per_letter(g.order()) <= detail::kEnumerationCapBits;
  if (!exhaustive && !cfg.analysis.seed)
    throw config_error("analysis.seed: required for sampled hm-scan");
  HmScanReport scan = hm_scan(mu, max_rank, window, cfg.analysis.seed.value_or(0),
                              cfg.analysis.budget.value_or(2000), lambda);
  rep.table.name = "hm-scan";
  rep.table.columns = {"rank", "max_modulus", "envelope"};
  for (const auto& r : scan.rows)
    rep.table.rows.push_back(row({static_cast<std::int64_t>(r.rank), r.max_modulus, r.envelope}));
  if (!scan.exhaustive)
    rep.warnings.push_back("sampled scan: maxima are lower bounds on the per-rank suprema");
  return rep;
}

inline Report cmd_mrf_check(const RunConfig& cfg) {
  Report rep = base_report("mrf-check", cfg);
  Group g = build_group(cfg);
  GridMrf mrf = build_mrf(cfg, g);
  rep.table.name = "mrf-check";
  rep.table.columns = {"field", "value"};
  // MRF property over all single cells and horizontal 1x2 regions
  double worst = 0.0;
  bool holds = true;
  for (int y = 0; y < mrf.spec.height; ++y)
    for (int x = 0; x < mrf.spec.width; ++x) {
      auto one = verify_mrf_property(mrf, {Site(x, y)});
      worst = std::max(worst, one.worst_deviation);
      holds = holds && one.holds;
      if (mrf.spec.width >= 2) {
        auto two = verify_mrf_property(mrf, {Site(x, y), Site((x + 1) % mrf.spec.width, y)});
        worst = std::max(worst, two.worst_deviation);
        holds = holds && two.holds;
      }
    }
  rep.table.rows.push_back(row({std::string("mrf_property"), std::string(holds ? "true" : "false")}));
  rep.table.rows.push_back(row({std::string("mrf_worst_deviation"), worst}));
  if (mrf.spec.boundary != GridBoundary::free_strip) {
    rep.warnings.push_back("lamination, sandwich, and UHM/EHM checks need the strip boundary");
    return rep;
  }
  const int max_rank = static_cast<int>(cfg.analysis.max_rank.value_or(4));
  UhmEhmReport chk = uhm_ehm_check(mrf, max_rank);
  LaminationReport lam = lamination_kernels(mrf);
  rep.table.rows.push_back(row({std::string("lambda_sandwich"), chk.lambda_sandwich}));
  rep.table.rows.push_back(row({std::string("sandwich_full_support"),
                                std::string(chk.sandwich_full_support ? "true" : "false")}));
  rep.table.rows.push_back(row({std::string("min_sandwich_prob"), chk.min_sandwich_prob}));
  rep.table.rows.push_back(row({std::string("uhm_ok"), std::string(chk.uhm_ok ? "true" : "false")}));
  rep.table.rows.push_back(row({std::string("uhm_margin"), chk.uhm_margin}));
  rep.table.rows.push_back(row({std::string("ehm_ok"), std::string(chk.ehm_ok ? "true" : "false")}));
  rep.table.rows.push_back(row({std::string("ehm_margin"), chk.ehm_margin}));
  rep.table.rows.push_back(
      row({std::string("lamination_reconstruction_deviation"), lam.reconstruction_deviation}));
  rep.table.rows.push_back(
      row({std::string("distinct_kernels"), static_cast<std::int64_t>(chk.distinct_kernels)}));
  for (const auto& [r, mx] : chk.grid_rank_max)
    rep.table.rows.push_back(row({"grid_max_modulus[rank=" + std::to_string(r) + "]", mx}));
  rep.warnings.push_back("lambda_sandwich is the empirical minimum over enumerated sandwiches");
  return rep;
}

inline Report cmd_simulate(const RunConfig& cfg) {
  Report rep = base_report("simulate", cfg);
  Group g = build_group(cfg);
  Measure mu = build_measure(cfg, g);
  Lca F = build_lca(cfg, g);
  Cylinder cyl = build_cylinder(cfg, g);
  if (cfg.analysis.n_list.empty()) throw config_error("analysis.n_list: required");
  if (!cfg.analysis.samples) throw config_error("analysis.samples: required");
  if (!cfg.analysis.seed) throw config_error("analysis.seed: required (simulate is randomized)");
  McReport mc;
  try {
    mc = monte_carlo_check(mu, F, cfg.analysis.n_list, cyl, *cfg.analysis.samples,
                           *cfg.analysis.seed, thread_cap());
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("analysis: ") + e.what());
  }
  rep.table.name = "simulate";
  rep.table.columns = {"N", "frequency", "ci_radius"};
  for (const auto& r : mc.rows) rep.table.rows.push_back(row({r.N, r.frequency, r.ci_radius}));
  return rep;
}

}  // namespace cmd_detail

/// Dispatch a named command against a loaded config.
inline Report run_command(const std::string& name, const RunConfig& cfg) {
  if (name == "group-info") return cmd_detail::cmd_group_info(cfg);
  if (name == "lucas") return cmd_detail::cmd_lucas(cfg);
  if (name == "rank-traj") return cmd_detail::cmd_rank_traj(cfg);
  if (name == "diffusion-report") return cmd_detail::cmd_diffusion_report(cfg);
  if (name == "separating") return cmd_detail::cmd_separating(cfg);
  if (name == "ledrappier") return cmd_detail::cmd_ledrappier(cfg);
  if (name == "fourier") return cmd_detail::cmd_fourier(cfg);
  if (name == "ehm-lambda") return cmd_detail::cmd_ehm_lambda(cfg);
  if (name == "cesaro") return cmd_detail::cmd_cesaro(cfg);
  if (name == "hm-scan") return cmd_detail::cmd_hm_scan(cfg);
  if (name == "mrf-check") return cmd_detail::cmd_mrf_check(cfg);
  if (name == "simulate") return cmd_detail::cmd_simulate(cfg);
  throw config_error("unknown command \"" + name + "\"");
}

}  // namespace haarlab
