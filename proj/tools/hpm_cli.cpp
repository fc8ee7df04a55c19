#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hpm/config.hpp"
#include "hpm/error.hpp"
#include "hpm/model.hpp"
#include "hpm/samplers.hpp"
#include "hpm/solver.hpp"
#include "hpm/tensor.hpp"
#include "hpm/tensor_io.hpp"

namespace {

using hpm::io::format_double;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct SolverFlags {
  double zeta = 0.05;
  int outer = 100;
  int inner = 40;
  int descent = 20;
  double gamma = 0.05;
  int starts = 8;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--zeta", zeta, "gradient step on W")->capture_default_str();
    app->add_option("--outer", outer, "outer iterations")->capture_default_str();
    app->add_option("--inner", inner, "inner projection iterations")->capture_default_str();
    app->add_option("--descent", descent, "negative-eigenvector descent iterations")->capture_default_str();
    app->add_option("--gamma", gamma, "descent step")->capture_default_str();
    app->add_option("--starts", starts, "random starts per eigenvector search")->capture_default_str();
    app->add_option("--seed", seed, "RNG seed")->capture_default_str();
  }

  hpm::SolverConfig config(std::uint64_t s) const {
    hpm::SolverConfig c;
    c.zeta = zeta;
    c.outer_iters = outer;
    c.inner_iters = inner;
    c.descent_iters = descent;
    c.ascent.step_gamma = gamma;
    c.ascent.num_starts = starts;
    c.seed = s;
    c.validate();
    return c;
  }
};

// Writes to `path`, or to stdout when `path` is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") file_ = std::make_unique<std::ofstream>(hpm::io::open_output(path));
  }
  std::ostream& operator*() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

hpm::Assignment load_assignment(const std::string& path) {
  hpm::Assignment y(hpm::io::load_labels(path));
  hpm::require_balanced(y, path);
  return y;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& config_path, const std::string& out, const std::string& truth_out,
                 std::optional<std::uint64_t> seed) {
  auto in = hpm::io::open_input(config_path);
  hpm::config::ModelConfig cfg;
  try {
    cfg = hpm::config::parse_model_config(in);
  } catch (const hpm::DataError& e) {
    throw hpm::DataError(config_path + ": " + e.what());
  }
  const auto inst = hpm::config::generate(cfg, seed.value_or(cfg.seed));
  Sink w(out);
  hpm::io::write_symtensor(*w, inst.w);
  if (!truth_out.empty()) {
    auto t = hpm::io::open_output(truth_out);
    t << hpm::io::format_labels(inst.truth.labels()) << '\n';
  }
  return 0;
}

int cmd_solve(const std::string& tensor_path, const SolverFlags& flags, const std::string& truth_path,
              const std::string& out, const std::string& trace_out, const std::string& y_out) {
  const auto w = hpm::io::load_symtensor(tensor_path);
  if (w.order() % 2 != 0) throw hpm::DataError(tensor_path + ": solver requires an even order m");
  std::optional<hpm::Assignment> truth;
  if (!truth_path.empty()) {
    truth = load_assignment(truth_path);
    if (truth->size() != w.dim()) throw hpm::DataError(truth_path + ": label count does not match tensor");
  }
  const auto cfg = flags.config(flags.seed);
  auto res = hpm::pgd_solve(w, cfg);
  res.y_hat = hpm::extract_assignment(res.Y, cfg.ascent);
  if (truth) res.h = hpm::agreement(res.Y, *truth);

  Sink sink(out);
  std::ostream& os = *sink;
  os << "HPMRESULT v1\n";
  os << "n = " << w.dim() << "\nm = " << w.order() << '\n';
  os << "seed = " << flags.seed << '\n';
  os << "y_hat = " << hpm::io::format_labels(res.y_hat->labels()) << '\n';
  os << "objective = " << format_double(res.objective) << '\n';
  os << "label_objective = " << format_double(hpm::objective(w, *res.y_hat)) << '\n';
  os << "h = " << (res.h ? format_double(*res.h) : std::string("none")) << '\n';
  if (truth) os << "recovered = " << (res.y_hat->equal_up_to_sign(*truth) ? "true" : "false") << '\n';
  os << "psd_corrections = " << res.psd_corrections << '\n';
  if (!trace_out.empty()) {
    auto t = hpm::io::open_output(trace_out);
    t << "outer,objective,psd_corrections\n";
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
      t << k << ',' << format_double(res.trace[k].objective) << ',' << res.trace[k].psd_corrections << '\n';
    }
  }
  if (!y_out.empty()) hpm::io::save_symtensor(y_out, res.Y);
  return 0;
}

int cmd_oracle(const std::string& tensor_path) {
  const auto w = hpm::io::load_symtensor(tensor_path);
  const auto r = hpm::brute_force(w);
  std::cout << "y_opt = " << hpm::io::format_labels(r.y_opt.labels()) << '\n';
  std::cout << "value = " << format_double(r.value) << '\n';
  std::cout << "tie = " << (r.tie ? "true" : "false") << '\n';
  return 0;
}

int cmd_certify(const std::string& tensor_path, const std::string& labels_path, const hpm::CertifyConfig& cfg) {
  const auto w = hpm::io::load_symtensor(tensor_path);
  const auto y = load_assignment(labels_path);
  if (y.size() != w.dim()) throw hpm::DataError(labels_path + ": label count does not match tensor");
  const auto c = hpm::certify(w, y, cfg);
  std::cout << "lambda1_estimate = " << format_double(c.lambda1_estimate) << '\n';
  std::cout << "verdict = " << hpm::to_string(c.verdict) << '\n';
  std::cout << "heuristic = " << (c.heuristic ? "true" : "false") << '\n';
  std::cout << "witness =";
  for (int i = 0; i < c.witness.size(); ++i) std::cout << ' ' << format_double(c.witness[i]);
  std::cout << '\n';
  return 0;
}

int cmd_experiment(const SolverFlags& flags, int trials, const std::string& out) {
  if (trials < 1) throw hpm::DataError("--trials must be >= 1");
  struct Setting {
    const char* name;
    std::vector<double> alpha;
    double reference;
  };
  const std::vector<Setting> settings{{"strong", {0.9, 0.1, 0.0, 0.1, 0.9}, 0.298},
                                      {"weak", {0.6, 0.4, 0.0, 0.4, 0.6}, -0.249}};
  Sink sink(out);
  std::ostream& csv = *sink;
  std::ostream& log = (out.empty() || out == "-") ? std::cerr : std::cout;
  csv << "setting,trial,seed,h,objective,recovered,psd_corrections,wall_ms\n";
  std::vector<double> means;
  for (const auto& s : settings) {
    hpm::config::ModelConfig mc;
    mc.kind = hpm::config::ModelKind::counts;
    mc.n = 20;
    mc.m = 4;
    mc.counts.m = 4;
    mc.counts.T = 1;
    mc.counts.alpha = s.alpha;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t seed = flags.seed + static_cast<std::uint64_t>(t);
      const auto inst = hpm::config::generate(mc, seed);
      const auto cfg = flags.config(seed);
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = hpm::pgd_solve(inst.w, cfg);
      const auto y_hat = hpm::extract_assignment(res.Y, cfg.ascent);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      const double h = hpm::agreement(res.Y, inst.truth);
      sum += h;
      csv << s.name << ',' << t << ',' << seed << ',' << format_double(h) << ',' << format_double(res.objective)
          << ',' << (y_hat.equal_up_to_sign(inst.truth) ? "true" : "false") << ',' << res.psd_corrections << ','
          << static_cast<long long>(ms) << '\n';
      csv.flush();
    }
    means.push_back(sum / trials);
    log << s.name << ": mean h = " << format_double(means.back()) << " over " << trials
        << " trials (reference " << s.reference << ")\n";
  }
  log << "separation = " << format_double(means[0] - means[1]) << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out, const std::string& summary) {
  auto in = hpm::io::open_input(config_path);
  hpm::config::SweepConfig sc;
  try {
    sc = hpm::config::parse_sweep_config(in);
  } catch (const hpm::DataError& e) {
    throw hpm::DataError(config_path + ": " + e.what());
  }
  Sink sink(out);
  std::ostream& rows = *sink;
  rows << "point,kind,n,params,trial,seed,h,objective,recovered,psd_corrections\n";
  std::optional<std::ofstream> agg;
  if (!summary.empty()) {
    agg = hpm::io::open_output(summary);
    *agg << "point,kind,n,params,trials,recovery_rate,mean_h,F,F_positive,lhs_B,rhs_B,lhs_sigma,rhs_sigma,"
            "theorem1_satisfied\n";
  }
  auto quoted = [](const std::string& s) { return '"' + s + '"'; };
  for (std::size_t p = 0; p < sc.points.size(); ++p) {
    const auto& pt = sc.points[p];
    int recovered = 0;
    double sum_h = 0.0;
    for (int t = 0; t < sc.trials; ++t) {
      const std::uint64_t seed = sc.seed + static_cast<std::uint64_t>(t);
      const auto inst = hpm::config::generate(pt.model, seed);
      auto cfg = sc.solver;
      cfg.seed = seed;
      const auto res = hpm::pgd_solve(inst.w, cfg);
      const auto y_hat = hpm::extract_assignment(res.Y, cfg.ascent);
      const double h = hpm::agreement(res.Y, inst.truth);
      const bool ok = y_hat.equal_up_to_sign(inst.truth);
      recovered += ok;
      sum_h += h;
      rows << p << ',' << hpm::config::to_string(pt.model.kind) << ',' << pt.model.n << ',' << quoted(pt.label)
           << ',' << t << ',' << seed << ',' << format_double(h) << ',' << format_double(res.objective) << ','
           << (ok ? "true" : "false") << ',' << res.psd_corrections << '\n';
    }
    if (agg) {
      const auto rep = hpm::theorem1_check(hpm::config::model_spec(pt.model));
      *agg << p << ',' << hpm::config::to_string(pt.model.kind) << ',' << pt.model.n << ',' << quoted(pt.label)
           << ',' << sc.trials << ',' << format_double(static_cast<double>(recovered) / sc.trials) << ','
           << format_double(sum_h / sc.trials) << ',' << format_double(rep.F) << ','
           << (rep.F_positive ? "true" : "false") << ',' << format_double(rep.lhs_B) << ','
           << format_double(rep.rhs_B) << ',' << format_double(rep.lhs_sigma) << ','
           << format_double(rep.rhs_sigma) << ',' << (rep.satisfied ? "true" : "false") << '\n';
    }
  }
  return 0;
}

int cmd_convert(const std::string& in_path, const std::string& out_path) {
  auto in = hpm::io::open_input(in_path);
  std::string header;
  std::getline(in, header);
  in.seekg(0);
  constexpr int kMaxDenseN = 5;
  Sink sink(out_path);
  if (header.rfind("SYMTENSOR", 0) == 0) {
    const auto a = hpm::io::read_symtensor(in);
    if (a.dim() > kMaxDenseN) {
      throw hpm::DataError("tensor-convert: dense output is limited to n <= " + std::to_string(kMaxDenseN));
    }
    hpm::io::write_dense(*sink, hpm::to_dense(a));
  } else if (header.rfind("DENSETENSOR", 0) == 0) {
    const auto d = hpm::io::read_dense(in);
    if (d.n > kMaxDenseN) {
      throw hpm::DataError("tensor-convert: dense input is limited to n <= " + std::to_string(kMaxDenseN));
    }
    hpm::io::write_symtensor(*sink, hpm::from_dense(d));
  } else {
    throw hpm::DataError(in_path + ": line 1: unrecognized header");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact partitioning of homogeneous polynomial models"};
  app.require_subcommand(1);

  std::string config_path, tensor_path, labels_path, out, truth_out, truth, trace_out, y_out, summary;
  std::optional<std::uint64_t> gen_seed;
  auto* gen = app.add_subcommand("generate", "sample W and y* from a model config");
  gen->add_option("config", config_path, "model config (INI)")->required();
  gen->add_option("--out", out, "tensor output (default stdout)");
  gen->add_option("--truth-out", truth_out, "ground-truth label output");
  gen->add_option("--seed", gen_seed, "override the config seed");

  SolverFlags sflags;
  auto* solve = app.add_subcommand("solve", "run the projected-gradient solver on a tensor file");
  solve->add_option("tensor", tensor_path, "SYMTENSOR file")->required();
  sflags.attach(solve);
  solve->add_option("--truth", truth, "ground-truth labels for h");
  solve->add_option("--out", out, "result output (default stdout)");
  solve->add_option("--trace", trace_out, "per-outer-iteration CSV");
  solve->add_option("--y-out", y_out, "write the solver tensor Y");

  auto* oracle = app.add_subcommand("oracle", "exhaustive maximization over balanced labels (n <= 16)");
  oracle->add_option("tensor", tensor_path, "SYMTENSOR file")->required();

  hpm::CertifyConfig ccfg;
  auto* cert = app.add_subcommand("certify", "estimate the dual certificate for given labels");
  cert->add_option("tensor", tensor_path, "SYMTENSOR file")->required();
  cert->add_option("labels", labels_path, "label file")->required();
  cert->add_option("--starts", ccfg.ascent.num_starts, "random starts")->capture_default_str();
  cert->add_option("--iters", ccfg.ascent.max_iters, "ascent iterations per start")->capture_default_str();
  cert->add_option("--seed", ccfg.ascent.seed, "RNG seed")->capture_default_str();
  cert->add_option("--threshold", ccfg.threshold, "verdict threshold")->capture_default_str();

  SolverFlags eflags;
  int trials = 10;
  auto* exp = app.add_subcommand("experiment-appendix-d", "n=20, m=4 strong/weak reproduction");
  eflags.attach(exp);
  exp->add_option("--trials", trials, "trials per setting")->capture_default_str();
  exp->add_option("--out", out, "CSV output (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "grid experiment from a sweep config");
  sweep->add_option("config", config_path, "sweep config (INI)")->required();
  sweep->add_option("--out", out, "per-trial CSV (default stdout)");
  sweep->add_option("--summary", summary, "aggregated CSV");

  std::string in_path;
  auto* conv = app.add_subcommand("tensor-convert", "SYMTENSOR <-> DENSETENSOR (n <= 5)");
  conv->add_option("input", in_path, "input file")->required();
  conv->add_option("--out", out, "output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(config_path, out, truth_out, gen_seed);
    if (*solve) return cmd_solve(tensor_path, sflags, truth, out, trace_out, y_out);
    if (*oracle) return cmd_oracle(tensor_path);
    if (*cert) return cmd_certify(tensor_path, labels_path, ccfg);
    if (*exp) return cmd_experiment(eflags, trials, out);
    if (*sweep) return cmd_sweep(config_path, out, summary);
    if (*conv) return cmd_convert(in_path, out);
  } catch (const hpm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const hpm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
