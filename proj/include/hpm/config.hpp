#pragma once

// INI model and sweep configuration, plus seeded instance generation.
//
//   [model]     kind = counts|bisection|cuts|motif, n, m, seed, repeats_mode = sample|zero
//   [counts]    T, alpha = a0,a1,...
//   [bisection] q
//   [cuts]      alpha
//   [motif]     motif_edges = 0->1, 1->2, ...   alpha4 = a11,a22,a12,a21

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hpm/error.hpp"
#include "hpm/model.hpp"
#include "hpm/samplers.hpp"
#include "hpm/solver.hpp"
#include "hpm/tensor_io.hpp"

namespace hpm::config {

enum class ModelKind { counts, bisection, cuts, motif };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::counts: return "counts";
    case ModelKind::bisection: return "bisection";
    case ModelKind::cuts: return "cuts";
    case ModelKind::motif: return "motif";
  }
  return "?";
}

inline ModelKind parse_kind(const std::string& s) {
  if (s == "counts") return ModelKind::counts;
  if (s == "bisection") return ModelKind::bisection;
  if (s == "cuts") return ModelKind::cuts;
  if (s == "motif") return ModelKind::motif;
  throw DataError("kind: unknown model kind '" + s + "' (expected counts, bisection, cuts or motif)");
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    out.push_back(trim(s.substr(start, at == std::string_view::npos ? s.npos : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) {
    if (tok.empty()) throw DataError(key + ": empty list element");
    out.push_back(io::parse_double(tok, key));
  }
  return out;
}

inline std::vector<long> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<long> out;
  for (const auto& tok : split(text, ',')) {
    if (tok.empty()) throw DataError(key + ": empty list element");
    out.push_back(io::parse_int(tok, key));
  }
  return out;
}

inline std::vector<std::pair<int, int>> parse_edges(const std::string& text, const std::string& key) {
  std::vector<std::pair<int, int>> out;
  if (trim(text).empty()) return out;
  for (const auto& tok : split(text, ',')) {
    const auto arrow = tok.find("->");
    if (arrow == std::string::npos) throw DataError(key + ": expected 'i->j', got '" + tok + "'");
    out.emplace_back(static_cast<int>(io::parse_int(trim(tok.substr(0, arrow)), key)),
                     static_cast<int>(io::parse_int(trim(tok.substr(arrow + 2)), key)));
  }
  return out;
}

inline std::array<double, 4> parse_alpha4(const std::string& text, const std::string& key) {
  const auto v = parse_real_list(text, key);
  if (v.size() != 4) throw DataError(key + ": expected 4 comma-separated probabilities");
  return {v[0], v[1], v[2], v[3]};
}

inline RepeatsMode parse_repeats(const std::string& s) {
  if (s == "sample") return RepeatsMode::sample;
  if (s == "zero") return RepeatsMode::zero;
  throw DataError("repeats_mode: expected 'sample' or 'zero', got '" + s + "'");
}

using Sections = std::map<std::string, std::map<std::string, std::string>>;

/// Reads an INI stream and rejects any section or key outside `allowed`.
inline Sections read_ini(std::istream& in, const std::map<std::string, std::set<std::string>>& allowed) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  Sections out;
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) {
      if (!body.data().empty()) throw DataError("config: key '" + section + "' must be inside a section");
      throw DataError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw DataError("config: unknown key '" + key + "' in section [" + section + "]");
      }
      out[section][key] = trim(value.data());
    }
  }
  return out;
}

inline const std::string* lookup(const Sections& s, const std::string& section, const std::string& key) {
  const auto sec = s.find(section);
  if (sec == s.end()) return nullptr;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? nullptr : &it->second;
}

inline const std::string& require(const Sections& s, const std::string& section, const std::string& key) {
  const auto* v = lookup(s, section, key);
  if (!v) throw DataError("config: missing key '" + key + "' in section [" + section + "]");
  return *v;
}

inline int int_key(const Sections& s, const std::string& section, const std::string& key, int fallback) {
  const auto* v = lookup(s, section, key);
  return v ? static_cast<int>(io::parse_int(*v, key)) : fallback;
}

struct ModelConfig {
  ModelKind kind = ModelKind::counts;
  int n = 0;
  int m = 4;
  std::uint64_t seed = 0;
  std::optional<RepeatsMode> repeats;
  CountsParams counts;
  BisectionParams bisection;
  CutsParams cuts;
  MotifParams motif;
};

inline const std::map<std::string, std::set<std::string>>& model_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"kind", "n", "m", "seed", "repeats_mode"}},
      {"counts", {"T", "alpha"}},
      {"bisection", {"q"}},
      {"cuts", {"alpha"}},
      {"motif", {"motif_edges", "alpha4"}},
  };
  return keys;
}

inline ModelConfig model_from_sections(const Sections& s) {
  ModelConfig c;
  c.kind = parse_kind(require(s, "model", "kind"));
  c.n = static_cast<int>(io::parse_int(require(s, "model", "n"), "n"));
  if (c.n < 2 || c.n % 2 != 0) throw DataError("n: must be an even integer >= 2");
  c.m = int_key(s, "model", "m", 4);
  if (const auto* v = lookup(s, "model", "seed")) {
    const long seed = io::parse_int(*v, "seed");
    if (seed < 0) throw DataError("seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (const auto* v = lookup(s, "model", "repeats_mode")) c.repeats = parse_repeats(*v);

  switch (c.kind) {
    case ModelKind::counts:
      c.counts.m = c.m;
      c.counts.T = int_key(s, "counts", "T", 1);
      c.counts.alpha = parse_real_list(require(s, "counts", "alpha"), "alpha");
      if (c.repeats) c.counts.repeats = *c.repeats;
      break;
    case ModelKind::bisection:
      c.bisection.q = io::parse_double(require(s, "bisection", "q"), "q");
      if (c.repeats) c.bisection.repeats = *c.repeats;
      break;
    case ModelKind::cuts:
      if (c.m != 4) throw DataError("m: the cuts model requires m = 4");
      c.cuts.alpha = parse_real_list(require(s, "cuts", "alpha"), "alpha");
      break;
    case ModelKind::motif:
      c.motif.motif = Motif::from_edges(c.m, parse_edges(require(s, "motif", "motif_edges"), "motif_edges"));
      c.motif.alpha4 = parse_alpha4(require(s, "motif", "alpha4"), "alpha4");
      break;
  }
  if ((c.kind == ModelKind::cuts || c.kind == ModelKind::motif) && c.repeats == RepeatsMode::sample) {
    throw DataError("repeats_mode: the cuts and motif models support only 'zero'");
  }
  return c;
}

inline ModelConfig parse_model_config(std::istream& in) { return model_from_sections(read_ini(in, model_keys())); }

inline ModelConfig parse_model_config(const std::string& text) {
  std::istringstream is(text);
  return parse_model_config(is);
}

struct Instance {
  SymmetricTensor w;
  Assignment truth;
};

/// Draws y* uniformly among balanced assignments, then W from the model,
/// both from one RNG seeded with `seed`.
inline Instance generate(const ModelConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Assignment y = random_balanced_assignment(c.n, rng);
  switch (c.kind) {
    case ModelKind::counts: return {sample_counts(c.counts, y, rng), y};
    case ModelKind::bisection: return {sample_bisection(c.bisection, y, rng, c.m), y};
    case ModelKind::cuts: return {sample_cuts(c.cuts, y, rng, c.m), y};
    case ModelKind::motif: return {sample_motif(c.motif, y, rng), y};
  }
  throw DataError("unknown model kind");
}

inline Instance generate(const ModelConfig& c) { return generate(c, c.seed); }

inline HpmSpec model_spec(const ModelConfig& c) {
  switch (c.kind) {
    case ModelKind::counts: return hpm_of_counts(c.counts, c.n);
    case ModelKind::bisection: return hpm_of_bisection(c.bisection, c.m, c.n);
    case ModelKind::cuts: return hpm_of_cuts(c.cuts, c.n);
    case ModelKind::motif: return hpm_of_motif(c.motif, c.n);
  }
  throw DataError("unknown model kind");
}

// ---------------------------------------------------------------------------
// Sweeps
//
//   [sweep]  kind, n = 8,12, m, trials, seed, repeats_mode,
//            T, alpha = a|b|c (one comma list per grid point), q = 0.1,0.2,
//            alpha4 = a|b, motif_edges
//   [solver] zeta, outer, inner, descent, gamma, starts

struct SweepPoint {
  ModelConfig model;
  /// Human-readable parameter label for CSV output.
  std::string label;
};

struct SweepConfig {
  std::vector<SweepPoint> points;
  int trials = 1;
  std::uint64_t seed = 0;
  SolverConfig solver;
};

inline const std::map<std::string, std::set<std::string>>& sweep_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"sweep", {"kind", "n", "m", "trials", "seed", "repeats_mode", "T", "alpha", "q", "alpha4", "motif_edges"}},
      {"solver", {"zeta", "outer", "inner", "descent", "gamma", "starts"}},
  };
  return keys;
}

inline SweepConfig parse_sweep_config(std::istream& in) {
  const Sections s = read_ini(in, sweep_keys());
  SweepConfig sc;
  sc.trials = int_key(s, "sweep", "trials", 1);
  if (sc.trials < 1) throw DataError("trials: must be >= 1");
  if (const auto* v = lookup(s, "sweep", "seed")) {
    const long seed = io::parse_int(*v, "seed");
    if (seed < 0) throw DataError("seed: must be nonnegative");
    sc.seed = static_cast<std::uint64_t>(seed);
  }
  if (const auto* v = lookup(s, "solver", "zeta")) sc.solver.zeta = io::parse_double(*v, "zeta");
  sc.solver.outer_iters = int_key(s, "solver", "outer", sc.solver.outer_iters);
  sc.solver.inner_iters = int_key(s, "solver", "inner", sc.solver.inner_iters);
  sc.solver.descent_iters = int_key(s, "solver", "descent", sc.solver.descent_iters);
  if (const auto* v = lookup(s, "solver", "gamma")) sc.solver.ascent.step_gamma = io::parse_double(*v, "gamma");
  sc.solver.ascent.num_starts = int_key(s, "solver", "starts", sc.solver.ascent.num_starts);
  sc.solver.validate();

  // Per-point parameter variants; the '|' list is the grid axis.
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> variants;
  const std::string kind = require(s, "sweep", "kind");
  const ModelKind k = parse_kind(kind);
  auto axis = [&](const std::string& key, char sep) {
    std::vector<std::string> vals;
    for (auto& v : split(require(s, "sweep", key), sep)) {
      if (v.empty()) throw DataError(key + ": empty grid value");
      vals.push_back(std::move(v));
    }
    return vals;
  };
  switch (k) {
    case ModelKind::counts:
    case ModelKind::cuts:
      for (const auto& a : axis("alpha", '|')) variants.push_back({"alpha=" + a, {{"alpha", a}}});
      break;
    case ModelKind::bisection:
      for (const auto& q : axis("q", ',')) variants.push_back({"q=" + q, {{"q", q}}});
      break;
    case ModelKind::motif:
      for (const auto& a : axis("alpha4", '|')) variants.push_back({"alpha4=" + a, {{"alpha4", a}}});
      break;
  }
  const auto ns = parse_int_list(require(s, "sweep", "n"), "n");
  for (long n : ns) {
    for (const auto& [label, params] : variants) {
      Sections ms;
      ms["model"]["kind"] = kind;
      ms["model"]["n"] = std::to_string(n);
      if (const auto* v = lookup(s, "sweep", "m")) ms["model"]["m"] = *v;
      if (const auto* v = lookup(s, "sweep", "repeats_mode")) ms["model"]["repeats_mode"] = *v;
      const std::string section = to_string(k);
      for (const auto& [key, value] : params) ms[section][key] = value;
      if (k == ModelKind::counts) {
        if (const auto* v = lookup(s, "sweep", "T")) ms["counts"]["T"] = *v;
      }
      if (k == ModelKind::motif) ms["motif"]["motif_edges"] = require(s, "sweep", "motif_edges");
      sc.points.push_back({model_from_sections(ms), label});
    }
  }
  if (sc.points.empty()) throw DataError("sweep: empty grid");
  return sc;
}

inline SweepConfig parse_sweep_config(const std::string& text) {
  std::istringstream is(text);
  return parse_sweep_config(is);
}

}  // namespace hpm::config
