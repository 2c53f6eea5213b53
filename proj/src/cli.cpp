#include "sdenet/cli.hpp"

#include "sdenet/dsf.hpp"
#include "sdenet/errors.hpp"
#include "sdenet/grid.hpp"
#include "sdenet/model.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace sdenet {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json metadata(const std::string& command) {
  return Json{{"tool", "sdenet"}, {"version", kVersion}, {"command", command}, {"generated_at", utc_timestamp()}};
}

fs::path resolve(const fs::path& p) { return p.is_absolute() ? p : output_root() / p; }

InputMode parse_input_mode(const std::string& s) {
  if (s == "none") return InputMode::kNone;
  if (s == "excitation") return InputMode::kExcitation;
  if (s == "signal") return InputMode::kSignal;
  throw ConfigError("unknown input mode '" + s + "' (expected none, excitation or signal)");
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the first
// exception after all workers finish.
template <class Fn>
void parallel_for(int count, int jobs, Fn fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  for (int t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Json model_to_json(const ModelConfig& m, const NetworkModel& model) {
  return Json{{"a0", m.a0},
              {"b0", m.b0},
              {"a1", m.a1},
              {"p_s", m.p_s},
              {"kernel", std::string(to_string(m.kernel.kind))},
              {"filter", m.filter},
              {"lags", model.lags()},
              {"pseudo_points", model.basis().pseudo().size()},
              {"known_inputs", m.known_inputs}};
}

Json sampler_to_json(const SamplerConfig& s) {
  return Json{{"k_max", s.k_max},
              {"eps_traj", s.eps_traj},
              {"eps_gamma", s.eps_gamma},
              {"beta_window", s.beta_window},
              {"p_switch", s.p_switch},
              {"seed", s.seed},
              {"thin", s.thin},
              {"pin_diagonal", s.pin_diagonal},
              {"adapt_steps", s.adapt_steps},
              {"proposal", s.proposal == TrajectoryProposal::kPcn ? "pcn" : "random-walk"}};
}

Json binary_to_json(const BinaryMetrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}, {"tpr", opt(m.tpr)}, {"prec", opt(m.prec)}};
}

Json ranked_to_json(const std::optional<RankedMetrics>& m) {
  if (!m) return nullptr;
  return Json{{"auroc", m->auroc}, {"auprec", m->auprec}};
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const GridError*>(&e)) return kExitData;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  return kExitOther;
}

fs::path output_root() {
  const char* env = std::getenv("SDENET_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::current_path();
}

// ---------------------------------------------------------------------------
// simulate

SimulateResult cmd_simulate(const SimulateConfig& cfg) {
  if (cfg.measurements < 2) throw ConfigError("measurements must be at least 2");
  if (!(cfg.spacing > 0.0)) throw ConfigError("spacing must be positive");
  SystemMatrices sys;
  if (cfg.kind == "random") {
    sys = generate_random_network(cfg.n, cfg.p, cfg.density, cfg.seed);
  } else if (cfg.kind == "ring") {
    sys = generate_ring_network(cfg.p, cfg.seed, cfg.hidden);
  } else {
    throw ConfigError("unknown network kind '" + cfg.kind + "' (expected random or ring)");
  }
  std::vector<double> times(cfg.measurements);
  for (int k = 0; k < cfg.measurements; ++k) times[k] = k * cfg.spacing;
  SimulationOptions opt;
  opt.snr_db = cfg.snr_db;
  opt.lambda_meas = cfg.lambda_meas;
  opt.dt_internal = cfg.dt_internal;
  opt.inputs = parse_input_mode(cfg.inputs);
  opt.seed = cfg.seed;
  const SimulationOutput sim = simulate_sde(sys, times, opt);

  SimulateResult res;
  res.csv = resolve(cfg.out);
  res.sidecar = sidecar_path(res.csv);
  res.data = sim.data();
  res.meta.kind = cfg.kind;
  res.meta.seed = cfg.seed;
  res.meta.snr_db = cfg.snr_db;
  res.meta.lambda_meas = cfg.lambda_meas;
  res.meta.sigma_e = sim.sigma_e;
  res.meta.input_mode = cfg.inputs;
  res.meta.system = sys;
  res.meta.truth = ground_truth_topology(sys);
  write_dataset(res.csv, res.data);
  write_json(res.sidecar, meta_to_json(res.meta));
  return res;
}

// ---------------------------------------------------------------------------
// infer

InferResult cmd_infer(const InferConfig& cfg) {
  if (cfg.chains < 1) throw ConfigError("chains must be at least 1");
  if (cfg.refinement < 1) throw ConfigError("refinement factor must be a positive integer");
  if (cfg.data.empty()) throw ConfigError("no dataset given");
  cfg.sampler.validate();
  const TimeSeriesData data = read_dataset(cfg.data);
  const FineGrid grid = cfg.dt > 0.0 ? build_grid_with_step(data.times, cfg.dt) : build_grid(data.times, cfg.refinement);
  const NetworkModel model(data, grid, cfg.model);
  const fs::path out = resolve(cfg.out);
  fs::create_directories(out);

  std::vector<ChainSamples> chains(cfg.chains);
  std::vector<int> reached(cfg.chains, 0);
  std::vector<bool> done(cfg.chains, false);
  std::mutex log_mutex;
  parallel_for(cfg.chains, cfg.jobs, [&](int c) {
    const fs::path ckpt = out / ("chain_" + std::to_string(c) + ".ckpt");
    SamplerConfig sc = cfg.sampler;
    sc.chain = c;
    Sampler sampler = [&] {
      if (cfg.resume) {
        if (!fs::exists(ckpt)) throw DataError("no checkpoint to resume: " + ckpt.string());
        return Sampler::resume(model, ckpt);
      }
      return Sampler(model, sc);
    }();
    RunHooks hooks;
    hooks.checkpoint_path = ckpt;
    hooks.checkpoint_every = cfg.checkpoint_every;
    hooks.stop_after = cfg.stop_after;
    hooks.progress_every = cfg.progress_every;
    if (cfg.progress_every > 0) {
      hooks.progress = [&, c](const ProgressInfo& info) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "chain " << c << " iteration " << info.iteration << "/" << info.k_max << "  acceptance"
                  << " trajectory " << std::fixed << std::setprecision(3) << info.stats->trajectory.rate()
                  << " switch " << info.stats->switch_move.rate() << " update " << info.stats->update_move.rate()
                  << std::defaultfloat << "\n";
      };
    }
    chains[c] = sampler.run(hooks);
    reached[c] = sampler.iteration();
    done[c] = sampler.finished();
  });

  InferResult res;
  res.iteration = *std::min_element(reached.begin(), reached.end());
  res.completed = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  if (!res.completed) return res;

  PosteriorSummary summary = summarize(chains);
  Json j;
  j["metadata"] = metadata("infer");
  j["dataset"] = cfg.data.filename().string();
  j["grid"] = Json{{"refinement", cfg.dt > 0.0 ? 0 : cfg.refinement},
                   {"dt", grid.dt},
                   {"intervals", grid.intervals},
                   {"max_snap", grid.max_snap}};
  SamplerConfig sc = cfg.sampler;
  j["model"] = model_to_json(cfg.model, model);
  j["sampler"] = sampler_to_json(sc);
  j["chains"] = cfg.chains;
  j.update(summary_to_json(summary));
  res.result_json = out / "result.json";
  write_json(res.result_json, j);
  if (summary.y_mean.size()) write_trajectory_csv(out / "y_mean.csv", grid.times, summary.y_mean);
  res.summary = std::move(summary);
  return res;
}

// ---------------------------------------------------------------------------
// eval

EvalResult cmd_eval(const EvalConfig& cfg) {
  if (cfg.result.empty()) throw ConfigError("no result file given");
  if (cfg.truth.empty()) throw ConfigError("no truth file given");
  if (!fs::exists(cfg.truth)) throw DataError("truth file not found: " + cfg.truth.string());
  if (!fs::exists(cfg.result)) throw DataError("result file not found: " + cfg.result.string());
  const Json result = read_json(cfg.result);
  const DatasetMeta meta = meta_from_json(read_json(cfg.truth));
  const bool exclude = !cfg.include_diagonal;

  EvalResult ev;
  Eigen::MatrixXd link_prob;
  Adjacency s_map, s_threshold;
  try {
    link_prob = matrix_from_json(result.at("link_prob"));
    s_map = adjacency_from_json(result.at("s_map"));
    s_threshold = adjacency_from_json(result.at("s_threshold"));
  } catch (const Json::exception& e) {
    throw DataError(cfg.result.string() + ": missing result fields: " + e.what());
  }
  if (link_prob.rows() != meta.truth.rows()) throw DataError("result and truth have different node counts");
  ev.map = binary_metrics(s_map, meta.truth, exclude);
  ev.threshold = binary_metrics(s_threshold, meta.truth, exclude);
  auto ranked = [&](const Eigen::MatrixXd& scores) -> std::optional<RankedMetrics> {
    try {
      return ranked_metrics(scores, meta.truth, exclude);
    } catch (const ArgumentError&) {
      return std::nullopt;  // AUROC undefined for this truth
    }
  };
  ev.ranked = ranked(link_prob);
  if (result.contains("w_mean") && result.contains("lags")) {
    ev.norm_ratio = ranked(norm_ratio_scores(matrix_from_json(result["w_mean"]), result["lags"].get<int>()));
  }

  Json& j = ev.report;
  j["metadata"] = metadata("eval");
  j["diagonal_excluded"] = exclude;
  j["map"] = binary_to_json(ev.map);
  j["threshold"] = binary_to_json(ev.threshold);
  j["link_prob"] = ranked_to_json(ev.ranked);
  j["norm_ratio"] = ranked_to_json(ev.norm_ratio);
  const fs::path out = cfg.out.empty() ? cfg.result.parent_path() / "metrics.json" : resolve(cfg.out);
  write_json(out, j);
  return ev;
}

// ---------------------------------------------------------------------------
// benchmark

SuiteSpec suite_spec(const std::string& name) {
  SuiteSpec s;
  s.simulate.snr_db = 10.0;
  s.simulate.lambda_meas = 1e-3;
  s.simulate.measurements = 100;
  s.simulate.spacing = 1.0;
  s.infer.refinement = 3;
  s.infer.model.kernel.kind = KernelKind::kTC;
  s.infer.sampler.k_max = 5000;
  // The joint trajectory move stalls at eps_traj = 0.2 on these datasets.
  s.infer.sampler.adapt_steps = true;
  if (name == "ring-desk") {
    s.simulate.kind = "ring";
    s.simulate.p = 5;
    s.simulate.hidden = 2;
  } else if (name == "random-desk") {
    s.simulate.kind = "random";
    s.simulate.n = 8;
    s.simulate.p = 6;
    s.simulate.density = 0.2;
  } else {
    throw ConfigError("unknown benchmark suite '" + name + "' (expected ring-desk or random-desk)");
  }
  return s;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * v;
  return os.str();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Json nan_to_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

BenchmarkResult cmd_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  SuiteSpec spec = suite_spec(cfg.suite);
  if (cfg.k_max) spec.infer.sampler.k_max = *cfg.k_max;
  if (cfg.measurements) spec.simulate.measurements = *cfg.measurements;
  if (cfg.kernel) spec.infer.model.kernel.kind = parse_kernel_kind(*cfg.kernel);
  const fs::path out = resolve(cfg.out);
  fs::create_directories(out);

  BenchmarkResult res;
  res.replicates.resize(cfg.replicates);
  parallel_for(cfg.replicates, cfg.jobs, [&](int i) {
    ReplicateOutcome& rep = res.replicates[i];
    rep.index = i;
    rep.seed = cfg.base_seed + static_cast<std::uint64_t>(i);
    std::ostringstream name;
    name << "replicate_" << std::setw(2) << std::setfill('0') << i;
    const fs::path dir = out / name.str();
    try {
      SimulateConfig sim = spec.simulate;
      sim.seed = rep.seed;
      sim.out = dir / "data.csv";
      const SimulateResult data = cmd_simulate(sim);
      InferConfig inf = spec.infer;
      inf.data = data.csv;
      inf.out = dir;
      inf.sampler.seed = rep.seed;
      const InferResult ir = cmd_infer(inf);
      EvalConfig ev;
      ev.result = ir.result_json;
      ev.truth = data.sidecar;
      rep.eval = cmd_eval(ev);
      rep.ok = true;
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.error = e.what();
    }
  });

  std::vector<double> tpr, prec, auroc_v, auprec_v;
  Json reps = Json::array();
  std::ostringstream csv;
  csv << "replicate,seed,status,tpr,prec,auroc,auprec\n";
  for (const auto& rep : res.replicates) {
    Json r{{"replicate", rep.index}, {"seed", rep.seed}, {"ok", rep.ok}};
    double t = NAN, p = NAN, a = NAN, ap = NAN;
    if (rep.ok) {
      const EvalResult& e = *rep.eval;
      if (e.map.tpr) tpr.push_back(t = *e.map.tpr);
      if (e.map.prec) prec.push_back(p = *e.map.prec);
      if (e.ranked) {
        auroc_v.push_back(a = e.ranked->auroc);
        auprec_v.push_back(ap = e.ranked->auprec);
      }
      r["metrics"] = Json{{"map", binary_to_json(e.map)}, {"link_prob", ranked_to_json(e.ranked)}};
    } else {
      ++res.failures;
      r["error"] = rep.error;
    }
    reps.push_back(r);
    auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    csv << rep.index << ',' << rep.seed << ',' << (rep.ok ? "ok" : "failed") << ',' << cell(t) << ',' << cell(p)
        << ',' << cell(a) << ',' << cell(ap) << "\n";
  }
  res.mean_tpr = mean_of(tpr);
  res.mean_prec = mean_of(prec);
  res.mean_auroc = mean_of(auroc_v);
  res.mean_auprec = mean_of(auprec_v);
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  csv << "mean,," << (cfg.replicates - res.failures) << " ok," << cell(res.mean_tpr) << ',' << cell(res.mean_prec)
      << ',' << cell(res.mean_auroc) << ',' << cell(res.mean_auprec) << "\n";

  const std::string method = "SDE_" + std::string(to_string(spec.infer.model.kernel.kind));
  const int m = spec.simulate.measurements;
  std::ostringstream md;
  md << "# Benchmark `" << cfg.suite << "`\n\n"
     << cfg.replicates << " replicates (seeds " << cfg.base_seed << ".." << cfg.base_seed + cfg.replicates - 1
     << "), " << res.failures << " failed. SNR " << spec.simulate.snr_db << " dB, refinement "
     << spec.infer.refinement << ", k_max " << spec.infer.sampler.k_max
     << ". Self-links excluded from all metrics. Values in percent.\n\n"
     << "| Method | PREC (M=" << m << ") | TPR (M=" << m << ") |\n|---|---|---|\n"
     << "| " << method << " | " << fmt(res.mean_prec) << " | " << fmt(res.mean_tpr) << " |\n\n"
     << "| Method | AUPREC (M=" << m << ") | AUROC (M=" << m << ") |\n|---|---|---|\n"
     << "| " << method << " | " << fmt(res.mean_auprec) << " | " << fmt(res.mean_auroc) << " |\n";

  Json& j = res.report;
  j["metadata"] = metadata("benchmark");
  j["suite"] = cfg.suite;
  j["settings"] = Json{{"replicates", cfg.replicates},
                       {"base_seed", cfg.base_seed},
                       {"kind", spec.simulate.kind},
                       {"n", spec.simulate.kind == "ring" ? spec.simulate.p + spec.simulate.hidden : spec.simulate.n},
                       {"p", spec.simulate.p},
                       {"snr_db", spec.simulate.snr_db},
                       {"measurements", m},
                       {"refinement", spec.infer.refinement},
                       {"k_max", spec.infer.sampler.k_max},
                       {"kernel", std::string(to_string(spec.infer.model.kernel.kind))},
                       {"diagonal_excluded", true}};
  j["replicates"] = reps;
  j["failures"] = res.failures;
  j["mean"] = Json{{"tpr", nan_to_null(res.mean_tpr)},
                   {"prec", nan_to_null(res.mean_prec)},
                   {"auroc", nan_to_null(res.mean_auroc)},
                   {"auprec", nan_to_null(res.mean_auprec)}};
  write_json(out / "benchmark.json", j);
  write_text(out / "benchmark.csv", csv.str());
  write_text(out / "benchmark.md", md.str());
  return res;
}

// ---------------------------------------------------------------------------
// Command-line surface

namespace {

// Applies JSON config values to options not given on the command line.
// Nested objects are flattened; keys match long option names with
// underscores or dashes.
void apply_config(CLI::App* app, const Json& j, const std::string& origin) {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      apply_config(app, value, origin);
      continue;
    }
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    CLI::Option* opt = app->get_option_no_throw("--" + dashed);
    if (!opt) throw ConfigError(origin + ": unknown key '" + key + "' for command '" + app->get_name() + "'");
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      text = value.dump();
    } else {
      throw ConfigError(origin + ": key '" + key + "' must be a scalar");
    }
    try {
      opt->add_result(text);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(origin + ": key '" + key + "': " + e.what());
    }
  }
}

void add_config_option(CLI::App* app, std::string& path) {
  app->add_option("--config", path,
                  "JSON config file; keys are long option names (nesting allowed), command-line flags win");
}

void load_config(CLI::App* app, const std::string& path) {
  if (path.empty()) return;
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  Json j;
  try {
    std::ifstream in(path);
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": top level must be an object");
  apply_config(app, j, path);
}

struct InferOptions {
  InferConfig cfg;
  std::string data, out = "infer", kernel = "TC", proposal = "pcn", config;
  int stop_after = -1;
};

void add_model_options(CLI::App* app, InferOptions& o) {
  ModelConfig& m = o.cfg.model;
  app->add_option("--kernel", o.kernel, "Impulse-response kernel: TC, DC or SS")->capture_default_str();
  app->add_option("--a0", m.a0, "Inverse-Gamma shape of sigma and lambda priors")->capture_default_str();
  app->add_option("--b0", m.b0, "Inverse-Gamma scale of sigma and lambda priors")->capture_default_str();
  app->add_option("--a1", m.a1, "Rate of the symmetric exponential prior on gamma")->capture_default_str();
  app->add_option("--p-s", m.p_s, "Prior link probability")->capture_default_str();
  app->add_option("--filter", m.filter, "Filter constant a of the filtered trajectories")->capture_default_str();
  app->add_option("--lags", m.lags, "Impulse-response length l (0: min(N, ceil(8/dt)))")->capture_default_str();
  app->add_option("--pseudo-points", m.pseudo_points, "Pseudo-points d (0: min(l, 30))")->capture_default_str();
  app->add_flag("--known-inputs", m.known_inputs, "Use recorded inputs as known regressors");
}

void add_sampler_options(CLI::App* app, InferOptions& o) {
  SamplerConfig& s = o.cfg.sampler;
  app->add_option("--k-max", s.k_max, "Sampler iterations")->capture_default_str();
  app->add_option("--eps-traj", s.eps_traj, "pCN step size in (0,1]")->capture_default_str();
  app->add_option("--eps-gamma", s.eps_gamma, "Random-walk scale of gamma proposals")->capture_default_str();
  app->add_option("--beta-window", s.beta_window, "Window width of beta update proposals")->capture_default_str();
  app->add_option("--p-switch", s.p_switch, "Probability of a switch move (update otherwise)")->capture_default_str();
  app->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  app->add_option("--thin", s.thin, "Store every thin-th draw")->capture_default_str();
  app->add_flag("--pin-diagonal", s.pin_diagonal, "Keep self-links active");
  app->add_flag("--adapt", s.adapt_steps, "Burn-in step-size adaptation toward 25% acceptance");
  app->add_option("--proposal", o.proposal, "Trajectory proposal: pcn or random-walk")->capture_default_str();
  app->add_flag("--store-trajectories", s.store_trajectories, "Keep every trajectory draw in memory");
}

void finish_infer_options(InferOptions& o) {
  o.cfg.model.kernel.kind = parse_kernel_kind(o.kernel);
  if (o.proposal == "pcn") {
    o.cfg.sampler.proposal = TrajectoryProposal::kPcn;
  } else if (o.proposal == "random-walk") {
    o.cfg.sampler.proposal = TrajectoryProposal::kRandomWalk;
  } else {
    throw ConfigError("unknown proposal '" + o.proposal + "'");
  }
  o.cfg.data = o.data;
  o.cfg.out = o.out;
  if (o.stop_after >= 0) o.cfg.stop_after = o.stop_after;
}

std::string optional_text(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << *v;
  return os.str();
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Bayesian inference of sparse stochastic dynamical networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // simulate
  SimulateConfig sim;
  std::string sim_config, sim_out = sim.out.string();
  auto* cs = app.add_subcommand("simulate", "Generate a network and simulate a dataset (CSV + JSON sidecar)");
  add_config_option(cs, sim_config);
  cs->add_option("--kind", sim.kind, "Network kind: random or ring")->capture_default_str();
  cs->add_option("--n", sim.n, "Total states (random networks)")->capture_default_str();
  cs->add_option("--p", sim.p, "Measured nodes")->capture_default_str();
  cs->add_option("--hidden", sim.hidden, "Hidden nodes (ring networks)")->capture_default_str();
  cs->add_option("--density", sim.density, "Nonzero fraction of A (random networks)")->capture_default_str();
  cs->add_option("--snr-db", sim.snr_db, "SNR in dB: 10 log10(sigma_u / sigma_e)")->capture_default_str();
  cs->add_option("--lambda-meas", sim.lambda_meas, "Measurement-noise variance")->capture_default_str();
  cs->add_option("--measurements", sim.measurements, "Number of measurement instants M")->capture_default_str();
  cs->add_option("--spacing", sim.spacing, "Sampling interval")->capture_default_str();
  cs->add_option("--inputs", sim.inputs, "Input mode: none, excitation or signal")->capture_default_str();
  cs->add_option("--dt-internal", sim.dt_internal, "Integrator step (0: spacing/100)")->capture_default_str();
  cs->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  cs->add_option("--out", sim_out, "Output CSV path (sidecar written next to it)")->capture_default_str();

  // infer
  InferOptions inf;
  auto* ci = app.add_subcommand("infer", "Run the sampler on a dataset and write the posterior summary");
  add_config_option(ci, inf.config);
  ci->add_option("--data", inf.data, "Dataset CSV");
  ci->add_option("--refinement", inf.cfg.refinement, "Grid refinement factor (3 gives dt = spacing/3)")
      ->capture_default_str();
  ci->add_option("--dt", inf.cfg.dt, "Manual grid step; measurement instants are snapped (0: off)")
      ->capture_default_str();
  add_model_options(ci, inf);
  add_sampler_options(ci, inf);
  ci->add_option("--chains", inf.cfg.chains, "Independent chains")->capture_default_str();
  ci->add_option("--jobs", inf.cfg.jobs, "Parallel threads")->capture_default_str();
  ci->add_option("--out", inf.out, "Output directory")->capture_default_str();
  ci->add_option("--stop-after", inf.stop_after, "Stop and checkpoint after this many iterations");
  ci->add_flag("--resume", inf.cfg.resume, "Resume from the checkpoints in the output directory");
  ci->add_option("--checkpoint-every", inf.cfg.checkpoint_every, "Checkpoint interval (0: at the end only)")
      ->capture_default_str();
  ci->add_option("--progress-every", inf.cfg.progress_every, "Progress report interval (0: silent)")
      ->capture_default_str();

  // eval
  EvalConfig ev;
  std::string ev_config, ev_result, ev_truth, ev_out;
  auto* ce = app.add_subcommand("eval", "Score a result against the dataset's ground truth");
  add_config_option(ce, ev_config);
  ce->add_option("--result", ev_result, "result.json from infer");
  ce->add_option("--truth", ev_truth, "Dataset sidecar JSON with truth_adjacency");
  ce->add_flag("--include-diagonal", ev.include_diagonal, "Count self-links in the metrics");
  ce->add_option("--out", ev_out, "Metrics JSON (default: metrics.json next to the result)");

  // benchmark
  BenchmarkConfig bc;
  std::string bc_config, bc_out = bc.out.string(), bc_kernel;
  int bc_kmax = -1, bc_m = -1;
  auto* cb = app.add_subcommand("benchmark", "Run a Monte Carlo benchmark suite (simulate, infer, eval)");
  add_config_option(cb, bc_config);
  cb->add_option("--suite", bc.suite, "Suite: ring-desk or random-desk")->capture_default_str();
  cb->add_option("--replicates", bc.replicates, "Replicates (seeds base-seed + index)")->capture_default_str();
  cb->add_option("--base-seed", bc.base_seed, "Seed of replicate 0")->capture_default_str();
  cb->add_option("--jobs", bc.jobs, "Parallel replicates")->capture_default_str();
  cb->add_option("--k-max", bc_kmax, "Override sampler iterations");
  cb->add_option("--measurements", bc_m, "Override the number of measurements");
  cb->add_option("--kernel", bc_kernel, "Override the kernel");
  cb->add_option("--out", bc_out, "Output directory")->capture_default_str();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? kExitOk : kExitConfig;
    }

    if (cs->parsed()) {
      load_config(cs, sim_config);
      sim.out = sim_out;
      const SimulateResult r = cmd_simulate(sim);
      std::cout << "wrote " << r.csv.string() << " and " << r.sidecar.string() << "\n";
    } else if (ci->parsed()) {
      load_config(ci, inf.config);
      finish_infer_options(inf);
      const InferResult r = cmd_infer(inf.cfg);
      if (!r.completed) {
        std::cout << "stopped at iteration " << r.iteration << "; checkpoints in " << resolve(inf.cfg.out).string()
                  << " (continue with --resume)\n";
      } else {
        const auto& s = *r.summary;
        std::cout << "wrote " << r.result_json.string() << "\n"
                  << "acceptance: trajectory " << s.stats.trajectory.rate() << ", switch "
                  << s.stats.switch_move.rate() << ", update " << s.stats.update_move.rate() << "\n";
      }
    } else if (ce->parsed()) {
      load_config(ce, ev_config);
      ev.result = ev_result;
      ev.truth = ev_truth;
      ev.out = ev_out;
      const EvalResult r = cmd_eval(ev);
      std::cout << (ev.include_diagonal ? "self-links INCLUDED" : "self-links EXCLUDED") << "\n"
                << "MAP topology: TPR " << optional_text(r.map.tpr) << ", PREC " << optional_text(r.map.prec)
                << "\n";
      if (r.ranked) {
        std::cout << "link probabilities: AUROC " << r.ranked->auroc << ", AUPREC " << r.ranked->auprec << "\n";
      } else {
        std::cout << "link probabilities: AUROC undefined (truth is all-positive or all-negative)\n";
      }
    } else if (cb->parsed()) {
      load_config(cb, bc_config);
      bc.out = bc_out;
      if (bc_kmax >= 0) bc.k_max = bc_kmax;
      if (bc_m >= 0) bc.measurements = bc_m;
      if (!bc_kernel.empty()) bc.kernel = bc_kernel;
      const BenchmarkResult r = cmd_benchmark(bc);
      std::cout << "suite " << bc.suite << ": " << bc.replicates - r.failures << "/" << bc.replicates
                << " replicates ok; mean AUROC " << r.mean_auroc << ", AUPREC " << r.mean_auprec << ", TPR "
                << r.mean_tpr << ", PREC " << r.mean_prec << " (self-links excluded)\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace sdenet
