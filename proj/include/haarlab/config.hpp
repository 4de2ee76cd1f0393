// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "haarlab/errors.hpp"
#include "haarlab/group.hpp"
#include "haarlab/hash.hpp"
#include "haarlab/lca.hpp"
#include "haarlab/measures.hpp"
#include "haarlab/mrf.hpp"
#include "haarlab/report.hpp"

namespace haarlab {

struct GroupCfg {
  bool cyclic = true;
  std::int64_t n = 2;  // cyclic modulus
  std::int64_t p = 2;  // vector prime
  std::int64_t r = 1;
  std::int64_t J = 1;
};

struct LcaCoeffCfg {
  std::vector<std::int64_t> site;
  bool scalar = true;
  std::int64_t value = 0;
  std::vector<std::vector<std::int64_t>> matrix;
};

struct CharCoeffCfg {
  std::vector<std::int64_t> site;
  std::vector<std::int64_t> coeff;
};

struct MeasureCfg {
  enum class Kind { haar, bernoulli, markov, nstep } kind = Kind::haar;
  std::vector<double> weights;
  std::vector<std::vector<std::vector<double>>> matrices;  // [matrix][row][col]
  std::vector<std::vector<double>> etas;
  std::int64_t steps = 1;
  std::vector<double> probs;
};

struct PatchCfg {
  std::vector<std::vector<std::int64_t>> shape;
  std::vector<double> weights;
};

struct MrfCfg {
  std::int64_t width = 1;
  std::int64_t height = 1;
  std::string boundary = "strip";
  std::vector<PatchCfg> patches;
};

struct CylinderCfg {
  std::vector<std::vector<std::int64_t>> sites;
  std::vector<std::vector<std::int64_t>> values;
};

struct LucasCfg {
  std::int64_t N = 0, n = 0, p = 2;
};

struct SeparatingCfg {
  std::string mode = "verify";  // "verify" | "ledrappier"
  std::int64_t power = 1;       // verify: which F^j to check
  std::vector<std::vector<std::int64_t>> W, V;
  std::int64_t j = 0, p = 2, V_extent = 1, R = 1;  // ledrappier mode
};

struct LedrappierCfg {
  std::int64_t N = 2, p = 2;
};

struct AnalysisCfg {
  std::optional<std::int64_t> nmax;
  std::vector<std::int64_t> thresholds;
  std::optional<std::int64_t> window;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<std::int64_t> max_rank;
  std::optional<std::int64_t> budget;
  std::optional<std::string> subsequence;
  std::vector<std::int64_t> n_list;
  std::optional<double> lambda;
  std::optional<std::int64_t> power;  // pushforward step count for `fourier`
  std::optional<CylinderCfg> cylinder;
  std::optional<LucasCfg> lucas;
  std::optional<SeparatingCfg> separating;
  std::optional<LedrappierCfg> ledrappier;
};

struct RunConfig {
  std::optional<GroupCfg> group;
  std::int64_t dimension = 1;
  std::optional<std::vector<LcaCoeffCfg>> lca;
  std::optional<std::vector<CharCoeffCfg>> character;
  std::optional<MeasureCfg> measure;
  std::optional<MrfCfg> mrf;
  AnalysisCfg analysis;
};

namespace cfg_detail {

using njson = nlohmann::json;

inline void reject_unknown(const njson& obj, const std::vector<std::string>& allowed,
                           const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || k == it.key();
    if (!ok) throw config_error(path + ": unknown key \"" + it.key() + "\"");
  }
}

inline const njson& need(const njson& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw config_error(path + "." + key + ": missing");
  return *it;
}

inline std::int64_t as_int(const njson& v, const std::string& path) {
  if (!v.is_number_integer()) throw config_error(path + ": expected an integer");
  return v.get<std::int64_t>();
}

inline double as_double(const njson& v, const std::string& path) {
  if (!v.is_number()) throw config_error(path + ": expected a number");
  return v.get<double>();
}

inline std::string as_string(const njson& v, const std::string& path) {
  if (!v.is_string()) throw config_error(path + ": expected a string");
  return v.get<std::string>();
}

inline std::vector<std::int64_t> as_int_array(const njson& v, const std::string& path) {
  if (!v.is_array()) throw config_error(path + ": expected an array of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<double> as_double_array(const njson& v, const std::string& path) {
  if (!v.is_array()) throw config_error(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

/// Site / element lists: accept a bare integer as shorthand for [x].
inline std::vector<std::int64_t> as_tuple(const njson& v, const std::string& path) {
  if (v.is_number_integer()) return {v.get<std::int64_t>()};
  return as_int_array(v, path);
}

inline GroupCfg parse_group(const njson& v, const std::string& path) {
  if (!v.is_object()) throw config_error(path + ": expected an object");
  reject_unknown(v, {"cyclic", "vector"}, path);
  GroupCfg g;
  if (v.contains("cyclic") && v.contains("vector"))
    throw config_error(path + ": give either cyclic or vector, not both");
  if (v.contains("cyclic")) {
    g.cyclic = true;
    g.n = as_int(v["cyclic"], path + ".cyclic");
  } else if (v.contains("vector")) {
    const njson& vec = v["vector"];
    if (!vec.is_object()) throw config_error(path + ".vector: expected an object");
    reject_unknown(vec, {"p", "r", "J"}, path + ".vector");
    g.cyclic = false;
    g.p = as_int(need(vec, "p", path + ".vector"), path + ".vector.p");
    g.r = as_int(need(vec, "r", path + ".vector"), path + ".vector.r");
    g.J = as_int(need(vec, "J", path + ".vector"), path + ".vector.J");
  } else {
    throw config_error(path + ": expected cyclic or vector");
  }
  return g;
}

inline LcaCoeffCfg parse_lca_coeff(const njson& v, const std::string& path) {
  if (!v.is_object()) throw config_error(path + ": expected an object");
  reject_unknown(v, {"site", "scalar", "matrix"}, path);
  LcaCoeffCfg c;
  c.site = as_tuple(need(v, "site", path), path + ".site");
  if (v.contains("scalar") == v.contains("matrix"))
    throw config_error(path + ": give exactly one of scalar or matrix");
  if (v.contains("scalar")) {
    c.scalar = true;
    c.value = as_int(v["scalar"], path + ".scalar");
  } else {
    c.scalar = false;
    const njson& m = v["matrix"];
    if (!m.is_array() || m.empty()) throw config_error(path + ".matrix: expected a row array");
    for (std::size_t i = 0; i < m.size(); ++i)
      c.matrix.push_back(as_int_array(m[i], path + ".matrix[" + std::to_string(i) + "]"));
  }
  return c;
}

inline MeasureCfg parse_measure(const njson& v, const std::string& path) {
  if (!v.is_object()) throw config_error(path + ": expected an object");
  reject_unknown(v, {"haar", "bernoulli", "markov", "nstep"}, path);
  if (v.size() != 1) throw config_error(path + ": expected exactly one measure kind");
  MeasureCfg m;
  if (v.contains("haar")) {
    if (!v["haar"].is_object() || !v["haar"].empty())
      throw config_error(path + ".haar: expected {}");
    m.kind = MeasureCfg::Kind::haar;
  } else if (v.contains("bernoulli")) {
    const njson& b = v["bernoulli"];
    if (!b.is_object()) throw config_error(path + ".bernoulli: expected an object");
    reject_unknown(b, {"weights"}, path + ".bernoulli");
    if (!b.contains("weights")) throw config_error(path + ".weights: missing");
    m.kind = MeasureCfg::Kind::bernoulli;
    m.weights = as_double_array(b["weights"], path + ".bernoulli.weights");
  } else if (v.contains("markov")) {
    const njson& mk = v["markov"];
    if (!mk.is_object()) throw config_error(path + ".markov: expected an object");
    reject_unknown(mk, {"matrices", "etas"}, path + ".markov");
    m.kind = MeasureCfg::Kind::markov;
    const njson& ms = need(mk, "matrices", path + ".markov");
    if (!ms.is_array() || ms.empty())
      throw config_error(path + ".markov.matrices: expected a nonempty array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string mp = path + ".markov.matrices[" + std::to_string(i) + "]";
      if (!ms[i].is_array()) throw config_error(mp + ": expected a row array");
      std::vector<std::vector<double>> rows;
      for (std::size_t rix = 0; rix < ms[i].size(); ++rix)
        rows.push_back(as_double_array(ms[i][rix], mp + "[" + std::to_string(rix) + "]"));
      m.matrices.push_back(std::move(rows));
    }
    if (mk.contains("etas")) {
      const njson& es = mk["etas"];
      if (!es.is_array()) throw config_error(path + ".markov.etas: expected an array");
      for (std::size_t i = 0; i < es.size(); ++i)
        m.etas.push_back(as_double_array(es[i], path + ".markov.etas[" + std::to_string(i) + "]"));
    }
  } else {
    const njson& ns = v["nstep"];
    if (!ns.is_object()) throw config_error(path + ".nstep: expected an object");
    reject_unknown(ns, {"steps", "probs"}, path + ".nstep");
    m.kind = MeasureCfg::Kind::nstep;
    m.steps = as_int(need(ns, "steps", path + ".nstep"), path + ".nstep.steps");
    m.probs = as_double_array(need(ns, "probs", path + ".nstep"), path + ".nstep.probs");
  }
  return m;
}

inline MrfCfg parse_mrf(const njson& v, const std::string& path) {
  if (!v.is_object()) throw config_error(path + ": expected an object");
  reject_unknown(v, {"width", "height", "boundary", "patches"}, path);
  MrfCfg m;
  m.width = as_int(need(v, "width", path), path + ".width");
  m.height = as_int(need(v, "height", path), path + ".height");
  if (v.contains("boundary")) {
    m.boundary = as_string(v["boundary"], path + ".boundary");
    if (m.boundary != "strip" && m.boundary != "torus")
      throw config_error(path + ".boundary: expected \"strip\" or \"torus\"");
  }
  const njson& ps = need(v, "patches", path);
  if (!ps.is_array() || ps.empty()) throw config_error(path + ".patches: expected a nonempty array");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::string pp = path + ".patches[" + std::to_string(i) + "]";
    if (!ps[i].is_object()) throw config_error(pp + ": expected an object");
    reject_unknown(ps[i], {"shape", "weights"}, pp);
    PatchCfg patch;
    const njson& shape = need(ps[i], "shape", pp);
    if (!shape.is_array() || shape.empty()) throw config_error(pp + ".shape: expected site offsets");
    for (std::size_t k = 0; k < shape.size(); ++k)
      patch.shape.push_back(as_tuple(shape[k], pp + ".shape[" + std::to_string(k) + "]"));
    patch.weights = as_double_array(need(ps[i], "weights", pp), pp + ".weights");
    m.patches.push_back(std::move(patch));
  }
  return m;
}

inline CylinderCfg parse_cylinder(const njson& v, const std::string& path) {
  if (!v.is_object()) throw config_error(path + ": expected an object");
  reject_unknown(v, {"sites", "values"}, path);
  CylinderCfg c;
  const njson& ss = need(v, "sites", path);
  if (!ss.is_array()) throw config_error(path + ".sites: expected an array");
  for (std::size_t i = 0; i < ss.size(); ++i)
    c.sites.push_back(as_tuple(ss[i], path + ".sites[" + std::to_string(i) + "]"));
  const njson& vs = need(v, "values", path);
  if (!vs.is_array()) throw config_error(path + ".values: expected an array");
  for (std::size_t i = 0; i < vs.size(); ++i)
    c.values.push_back(as_tuple(vs[i], path + ".values[" + std::to_string(i) + "]"));
  if (c.sites.size() != c.values.size())
    throw config_error(path + ": sites and values must have equal length");
  return c;
}

inline SeparatingCfg parse_separating(const njson& v, const std::string& path) {
  if (!v.is_object()) throw config_error(path + ": expected an object");
  SeparatingCfg s;
  s.mode = as_string(need(v, "mode", path), path + ".mode");
  if (s.mode == "verify") {
    reject_unknown(v, {"mode", "power", "W", "V"}, path);
    s.power = as_int(need(v, "power", path), path + ".power");
    const njson& W = need(v, "W", path);
    if (!W.is_array()) throw config_error(path + ".W: expected an array of sites");
    for (std::size_t i = 0; i < W.size(); ++i)
      s.W.push_back(as_tuple(W[i], path + ".W[" + std::to_string(i) + "]"));
    if (v.contains("V")) {
      const njson& V = v["V"];
      if (!V.is_array()) throw config_error(path + ".V: expected an array of sites");
      for (std::size_t i = 0; i < V.size(); ++i)
        s.V.push_back(as_tuple(V[i], path + ".V[" + std::to_string(i) + "]"));
    }
  } else if (s.mode == "ledrappier") {
    reject_unknown(v, {"mode", "j", "p", "V", "R"}, path);
    s.j = as_int(need(v, "j", path), path + ".j");
    s.p = as_int(need(v, "p", path), path + ".p");
    s.V_extent = as_int(need(v, "V", path), path + ".V");
    s.R = as_int(need(v, "R", path), path + ".R");
  } else {
    throw config_error(path + ".mode: expected \"verify\" or \"ledrappier\"");
  }
  return s;
}

inline AnalysisCfg parse_analysis(const njson& v, const std::string& path) {
  if (!v.is_object()) throw config_error(path + ": expected an object");
  reject_unknown(v,
                 {"nmax", "thresholds", "window", "seed", "samples", "max_rank", "budget",
                  "subsequence", "n_list", "lambda", "power", "cylinder", "lucas", "separating",
                  "ledrappier"},
                 path);
  AnalysisCfg a;
  if (v.contains("nmax")) a.nmax = as_int(v["nmax"], path + ".nmax");
  if (v.contains("thresholds")) a.thresholds = as_int_array(v["thresholds"], path + ".thresholds");
  if (v.contains("window")) a.window = as_int(v["window"], path + ".window");
  if (v.contains("seed")) {
    std::int64_t s = as_int(v["seed"], path + ".seed");
    a.seed = static_cast<std::uint64_t>(s);
  }
  if (v.contains("samples")) a.samples = as_int(v["samples"], path + ".samples");
  if (v.contains("max_rank")) a.max_rank = as_int(v["max_rank"], path + ".max_rank");
  if (v.contains("budget")) a.budget = as_int(v["budget"], path + ".budget");
  if (v.contains("subsequence")) a.subsequence = as_string(v["subsequence"], path + ".subsequence");
  if (v.contains("n_list")) a.n_list = as_int_array(v["n_list"], path + ".n_list");
  if (v.contains("lambda")) a.lambda = as_double(v["lambda"], path + ".lambda");
  if (v.contains("power")) a.power = as_int(v["power"], path + ".power");
  if (v.contains("cylinder")) a.cylinder = parse_cylinder(v["cylinder"], path + ".cylinder");
  if (v.contains("lucas")) {
    const njson& l = v["lucas"];
    if (!l.is_object()) throw config_error(path + ".lucas: expected an object");
    reject_unknown(l, {"N", "n", "p"}, path + ".lucas");
    LucasCfg lc;
    lc.N = as_int(need(l, "N", path + ".lucas"), path + ".lucas.N");
    lc.n = as_int(need(l, "n", path + ".lucas"), path + ".lucas.n");
    lc.p = as_int(need(l, "p", path + ".lucas"), path + ".lucas.p");
    a.lucas = lc;
  }
  if (v.contains("separating")) a.separating = parse_separating(v["separating"], path + ".separating");
  if (v.contains("ledrappier")) {
    const njson& l = v["ledrappier"];
    if (!l.is_object()) throw config_error(path + ".ledrappier: expected an object");
    reject_unknown(l, {"N", "p"}, path + ".ledrappier");
    LedrappierCfg lc;
    lc.N = as_int(need(l, "N", path + ".ledrappier"), path + ".ledrappier.N");
    lc.p = as_int(need(l, "p", path + ".ledrappier"), path + ".ledrappier.p");
    a.ledrappier = lc;
  }
  return a;
}

}  // namespace cfg_detail

/// Parse and validate a run configuration. Unknown keys anywhere are
/// rejected; every diagnostic names the offending field path.
inline RunConfig load_config(const std::string& text) {
  cfg_detail::njson doc;
  try {
    doc = cfg_detail::njson::parse(text);
  } catch (const std::exception& e) {
    throw config_error(std::string("config: JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config: expected a JSON object");
  cfg_detail::reject_unknown(
      doc, {"group", "dimension", "lca", "character", "measure", "mrf", "analysis"}, "config");
  RunConfig cfg;
  if (doc.contains("group")) cfg.group = cfg_detail::parse_group(doc["group"], "group");
  if (doc.contains("dimension")) {
    cfg.dimension = cfg_detail::as_int(doc["dimension"], "dimension");
    if (cfg.dimension != 1 && cfg.dimension != 2)
      throw config_error("dimension: expected 1 or 2");
  }
  if (doc.contains("lca")) {
    const auto& arr = doc["lca"];
    if (!arr.is_array()) throw config_error("lca: expected an array");
    std::vector<LcaCoeffCfg> coeffs;
    for (std::size_t i = 0; i < arr.size(); ++i)
      coeffs.push_back(cfg_detail::parse_lca_coeff(arr[i], "lca[" + std::to_string(i) + "]"));
    cfg.lca = std::move(coeffs);
  }
  if (doc.contains("character")) {
    const auto& arr = doc["character"];
    if (!arr.is_array()) throw config_error("character: expected an array");
    std::vector<CharCoeffCfg> coeffs;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "character[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) throw config_error(path + ": expected an object");
      cfg_detail::reject_unknown(arr[i], {"site", "coeff"}, path);
      CharCoeffCfg c;
      c.site = cfg_detail::as_tuple(cfg_detail::need(arr[i], "site", path), path + ".site");
      c.coeff = cfg_detail::as_tuple(cfg_detail::need(arr[i], "coeff", path), path + ".coeff");
      coeffs.push_back(std::move(c));
    }
    cfg.character = std::move(coeffs);
  }
  if (doc.contains("measure")) cfg.measure = cfg_detail::parse_measure(doc["measure"], "measure");
  if (doc.contains("mrf")) cfg.mrf = cfg_detail::parse_mrf(doc["mrf"], "mrf");
  if (doc.contains("analysis")) cfg.analysis = cfg_detail::parse_analysis(doc["analysis"], "analysis");
  return cfg;
}

namespace cfg_detail {

inline std::string ints(const std::vector<std::int64_t>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out + "]";
}

inline std::string doubles(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += detail::format_double(xs[i]);
  }
  return out + "]";
}

inline std::string tuples(const std::vector<std::vector<std::int64_t>>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += ints(xs[i]);
  }
  return out + "]";
}

}  // namespace cfg_detail

/// Canonical JSON echo of a parsed config: stable key order and the same
/// float formatting as reports, so digests are reproducible.
inline std::string canonical_config_json(const RunConfig& cfg) {
  using cfg_detail::doubles;
  using cfg_detail::ints;
  using cfg_detail::tuples;
  std::string out = "{";
  bool first = true;
  auto field = [&](const std::string& key, const std::string& value) {
    if (!first) out += ',';
    first = false;
    out += "\"" + key + "\":" + value;
  };
  if (cfg.group) {
    if (cfg.group->cyclic)
      field("group", "{\"cyclic\":" + std::to_string(cfg.group->n) + "}");
    else
      field("group", "{\"vector\":{\"p\":" + std::to_string(cfg.group->p) +
                         ",\"r\":" + std::to_string(cfg.group->r) +
                         ",\"J\":" + std::to_string(cfg.group->J) + "}}");
  }
  field("dimension", std::to_string(cfg.dimension));
  if (cfg.lca) {
    std::string arr = "[";
    for (std::size_t i = 0; i < cfg.lca->size(); ++i) {
      const auto& c = (*cfg.lca)[i];
      if (i) arr += ',';
      arr += "{\"site\":" + ints(c.site);
      if (c.scalar) {
        arr += ",\"scalar\":" + std::to_string(c.value) + "}";
      } else {
        arr += ",\"matrix\":[";
        for (std::size_t rix = 0; rix < c.matrix.size(); ++rix) {
          if (rix) arr += ',';
          arr += ints(c.matrix[rix]);
        }
        arr += "]}";
      }
    }
    field("lca", arr + "]");
  }
  if (cfg.character) {
    std::string arr = "[";
    for (std::size_t i = 0; i < cfg.character->size(); ++i) {
      const auto& c = (*cfg.character)[i];
      if (i) arr += ',';
      arr += "{\"site\":" + ints(c.site) + ",\"coeff\":" + ints(c.coeff) + "}";
    }
    field("character", arr + "]");
  }
  if (cfg.measure) {
    const auto& m = *cfg.measure;
    switch (m.kind) {
      case MeasureCfg::Kind::haar:
        field("measure", "{\"haar\":{}}");
        break;
      case MeasureCfg::Kind::bernoulli:
        field("measure", "{\"bernoulli\":{\"weights\":" + doubles(m.weights) + "}}");
        break;
      case MeasureCfg::Kind::markov: {
        std::string s = "{\"markov\":{\"matrices\":[";
        for (std::size_t i = 0; i < m.matrices.size(); ++i) {
          if (i) s += ',';
          s += "[";
          for (std::size_t rix = 0; rix < m.matrices[i].size(); ++rix) {
            if (rix) s += ',';
            s += doubles(m.matrices[i][rix]);
          }
          s += "]";
        }
        s += "]";
        if (!m.etas.empty()) {
          s += ",\"etas\":[";
          for (std::size_t i = 0; i < m.etas.size(); ++i) {
            if (i) s += ',';
            s += doubles(m.etas[i]);
          }
          s += "]";
        }
        field("measure", s + "}}");
        break;
      }
      case MeasureCfg::Kind::nstep:
        field("measure", "{\"nstep\":{\"steps\":" + std::to_string(m.steps) +
                             ",\"probs\":" + doubles(m.probs) + "}}");
        break;
    }
  }
  if (cfg.mrf) {
    std::string s = "{\"width\":" + std::to_string(cfg.mrf->width) +
                    ",\"height\":" + std::to_string(cfg.mrf->height) + ",\"boundary\":\"" +
                    cfg.mrf->boundary + "\",\"patches\":[";
    for (std::size_t i = 0; i < cfg.mrf->patches.size(); ++i) {
      if (i) s += ',';
      s += "{\"shape\":" + tuples(cfg.mrf->patches[i].shape) +
           ",\"weights\":" + doubles(cfg.mrf->patches[i].weights) + "}";
    }
    field("mrf", s + "]}");
  }
  {
    const AnalysisCfg& a = cfg.analysis;
    std::string s = "{";
    bool afirst = true;
    auto afield = [&](const std::string& key, const std::string& value) {
      if (!afirst) s += ',';
      afirst = false;
      s += "\"" + key + "\":" + value;
    };
    if (a.nmax) afield("nmax", std::to_string(*a.nmax));
    if (!a.thresholds.empty()) afield("thresholds", ints(a.thresholds));
    if (a.window) afield("window", std::to_string(*a.window));
    if (a.seed) afield("seed", std::to_string(static_cast<std::int64_t>(*a.seed)));
    if (a.samples) afield("samples", std::to_string(*a.samples));
    if (a.max_rank) afield("max_rank", std::to_string(*a.max_rank));
    if (a.budget) afield("budget", std::to_string(*a.budget));
    if (a.subsequence) afield("subsequence", "\"" + *a.subsequence + "\"");
    if (!a.n_list.empty()) afield("n_list", ints(a.n_list));
    if (a.lambda) afield("lambda", detail::format_double(*a.lambda));
    if (a.power) afield("power", std::to_string(*a.power));
    if (a.cylinder)
      afield("cylinder",
             "{\"sites\":" + tuples(a.cylinder->sites) + ",\"values\":" + tuples(a.cylinder->values) + "}");
    if (a.lucas)
      afield("lucas", "{\"N\":" + std::to_string(a.lucas->N) + ",\"n\":" + std::to_string(a.lucas->n) +
                          ",\"p\":" + std::to_string(a.lucas->p) + "}");
    if (a.separating) {
      if (a.separating->mode == "verify")
        afield("separating", "{\"mode\":\"verify\",\"power\":" + std::to_string(a.separating->power) +
                                 ",\"W\":" + tuples(a.separating->W) + ",\"V\":" + tuples(a.separating->V) +
                                 "}");
      else
        afield("separating",
               "{\"mode\":\"ledrappier\",\"j\":" + std::to_string(a.separating->j) +
                   ",\"p\":" + std::to_string(a.separating->p) + ",\"V\":" +
                   std::to_string(a.separating->V_extent) + ",\"R\":" + std::to_string(a.separating->R) + "}");
    }
    if (a.ledrappier)
      afield("ledrappier", "{\"N\":" + std::to_string(a.ledrappier->N) +
                               ",\"p\":" + std::to_string(a.ledrappier->p) + "}");
    field("analysis", s + "}");
  }
  return out + "}";
}

inline std::string config_digest(const RunConfig& cfg) {
  return hex64(fnv1a64(canonical_config_json(cfg)));
}

// ---- builders: raw config -> validated domain objects -------------------

inline Group build_group(const RunConfig& cfg) {
  if (!cfg.group) throw config_error("group: required by this command");
  try {
    if (cfg.group->cyclic) return Group::cyclic(cfg.group->n);
    return Group::vector_group(cfg.group->p, static_cast<int>(cfg.group->r),
                               static_cast<int>(cfg.group->J));
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("group: ") + e.what());
  }
}

inline Site build_site(const std::vector<std::int64_t>& raw, std::int64_t dimension,
                       const std::string& path) {
  if (static_cast<std::int64_t>(raw.size()) != dimension)
    throw config_error(path + ": expected " + std::to_string(dimension) + " coordinate(s)");
  return raw.size() == 1 ? Site(raw[0]) : Site(raw[0], raw[1]);
}

inline Lca build_lca(const RunConfig& cfg, const Group& g) {
  if (!cfg.lca) throw config_error("lca: required by this command");
  std::vector<std::pair<Site, Endo>> entries;
  for (std::size_t i = 0; i < cfg.lca->size(); ++i) {
    const auto& c = (*cfg.lca)[i];
    const std::string path = "lca[" + std::to_string(i) + "]";
    Site s = build_site(c.site, cfg.dimension, path + ".site");
    if (c.scalar) {
      if (!g.is_cyclic())
        throw config_error(path + ".scalar: scalar coefficients need a cyclic group");
      entries.emplace_back(s, Endo::scalar(g, c.value));
    } else {
      if (g.is_cyclic())
        throw config_error(path + ".matrix: matrix coefficients need a vector group");
      if (static_cast<int>(c.matrix.size()) != g.J)
        throw config_error(path + ".matrix: expected " + std::to_string(g.J) + " rows");
      std::vector<Residue> flat;
      for (const auto& row : c.matrix) {
        if (static_cast<int>(row.size()) != g.J)
          throw config_error(path + ".matrix: expected " + std::to_string(g.J) + " columns");
        flat.insert(flat.end(), row.begin(), row.end());
      }
      entries.emplace_back(s, Endo::matrix(g, flat));
    }
  }
  try {
    return make_lca(g, static_cast<int>(cfg.dimension), entries);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("lca: ") + e.what());
  }
}

inline Character build_character(const RunConfig& cfg, const Group& g) {
  if (!cfg.character) throw config_error("character: required by this command");
  std::vector<std::pair<Site, GroupElement>> entries;
  for (std::size_t i = 0; i < cfg.character->size(); ++i) {
    const auto& c = (*cfg.character)[i];
    const std::string path = "character[" + std::to_string(i) + "]";
    Site s = build_site(c.site, cfg.dimension, path + ".site");
    if (static_cast<int>(c.coeff.size()) != g.arity())
      throw config_error(path + ".coeff: expected " + std::to_string(g.arity()) + " residue(s)");
    entries.emplace_back(s, c.coeff);
  }
  try {
    return make_character(g, static_cast<int>(cfg.dimension), entries);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("character: ") + e.what());
  }
}

inline Measure build_measure(const RunConfig& cfg, const Group& g) {
  if (!cfg.measure) throw config_error("measure: required by this command");
  const MeasureCfg& m = *cfg.measure;
  try {
    switch (m.kind) {
      case MeasureCfg::Kind::haar:
        return make_measure(HaarSpec{g});
      case MeasureCfg::Kind::bernoulli:
        return make_measure(BernoulliSpec{g, m.weights});
      case MeasureCfg::Kind::markov: {
        MarkovChainSpec spec;
        spec.group = g;
        for (const auto& rows : m.matrices) {
          Dmatrix Q(static_cast<std::int64_t>(rows.size()));
          for (std::size_t rix = 0; rix < rows.size(); ++rix) {
            if (rows[rix].size() != rows.size())
              throw std::invalid_argument("transition matrices must be square");
            for (std::size_t cix = 0; cix < rows[rix].size(); ++cix)
              Q.at(static_cast<std::int64_t>(rix), static_cast<std::int64_t>(cix)) = rows[rix][cix];
          }
          spec.matrices.push_back(std::move(Q));
        }
        spec.etas = m.etas;
        return make_measure(spec);
      }
      case MeasureCfg::Kind::nstep:
        return make_measure(NStepMarkovSpec{g, static_cast<int>(m.steps), m.probs});
    }
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("measure: ") + e.what());
  } catch (const cap_error&) {
    throw;
  }
  throw config_error("measure: unknown kind");
}

inline GridMrf build_mrf(const RunConfig& cfg, const Group& g) {
  if (!cfg.mrf) throw config_error("mrf: required by this command");
  GridMrfSpec spec;
  spec.group = g;
  spec.width = static_cast<int>(cfg.mrf->width);
  spec.height = static_cast<int>(cfg.mrf->height);
  spec.boundary = cfg.mrf->boundary == "torus" ? GridBoundary::torus : GridBoundary::free_strip;
  for (std::size_t i = 0; i < cfg.mrf->patches.size(); ++i) {
    const auto& p = cfg.mrf->patches[i];
    PatchFamily fam;
    for (std::size_t k = 0; k < p.shape.size(); ++k) {
      if (p.shape[k].size() != 2)
        throw config_error("mrf.patches[" + std::to_string(i) + "].shape[" + std::to_string(k) +
                           "]: expected [dx,dy]");
      fam.shape.push_back(Site(p.shape[k][0], p.shape[k][1]));
    }
    fam.weights = p.weights;
    spec.patches.push_back(std::move(fam));
  }
  try {
    return make_grid_mrf(spec);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("mrf: ") + e.what());
  }
}

inline Cylinder build_cylinder(const RunConfig& cfg, const Group& g) {
  if (!cfg.analysis.cylinder) throw config_error("analysis.cylinder: required by this command");
  const CylinderCfg& c = *cfg.analysis.cylinder;
  Cylinder out;
  for (std::size_t i = 0; i < c.sites.size(); ++i) {
    out.sites.push_back(build_site(c.sites[i], cfg.dimension,
                                   "analysis.cylinder.sites[" + std::to_string(i) + "]"));
    if (static_cast<int>(c.values[i].size()) != g.arity())
      throw config_error("analysis.cylinder.values[" + std::to_string(i) + "]: expected " +
                         std::to_string(g.arity()) + " residue(s)");
    out.values.push_back(c.values[i]);
  }
  return out;
}

}  // namespace haarlab
