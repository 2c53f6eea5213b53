#pragma once

#include "sdenet/io.hpp"
#include "sdenet/metrics.hpp"
#include "sdenet/posterior.hpp"
#include "sdenet/results.hpp"
#include "sdenet/sampler.hpp"
#include "sdenet/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sdenet {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

// Maps an exception to an exit code.
int exit_code_for(const std::exception& e);

// Output root for relative output paths: $SDENET_OUTPUT_ROOT or the current
// directory.
std::filesystem::path output_root();

struct SimulateConfig {
  std::string kind = "random";  // random | ring
  int n = 8;
  int p = 6;
  int hidden = 2;  // ring only
  double density = 0.2;
  double snr_db = 10.0;
  double lambda_meas = 1e-3;
  int measurements = 100;
  double spacing = 1.0;
  std::string inputs = "signal";  // none | excitation | signal
  double dt_internal = 0.0;
  std::uint64_t seed = 1;
  std::filesystem::path out = "dataset.csv";
};

struct SimulateResult {
  std::filesystem::path csv;
  std::filesystem::path sidecar;
  DatasetMeta meta;
  TimeSeriesData data;
};

SimulateResult cmd_simulate(const SimulateConfig& cfg);

struct InferConfig {
  std::filesystem::path data;
  int refinement = 3;
  double dt = 0.0;  // > 0 selects a manual grid step
  ModelConfig model;
  SamplerConfig sampler;
  int chains = 1;
  int jobs = 1;
  std::filesystem::path out = "infer";
  std::optional<int> stop_after;
  bool resume = false;
  int checkpoint_every = 0;
  int progress_every = 0;
};

struct InferResult {
  bool completed = false;
  int iteration = 0;  // smallest iteration reached across chains
  std::optional<PosteriorSummary> summary;
  std::filesystem::path result_json;
};

InferResult cmd_infer(const InferConfig& cfg);

struct EvalConfig {
  std::filesystem::path result;
  std::filesystem::path truth;  // dataset sidecar JSON
  bool include_diagonal = false;
  std::filesystem::path out;  // empty: metrics.json next to the result
};

struct EvalResult {
  BinaryMetrics map;
  BinaryMetrics threshold;
  std::optional<RankedMetrics> ranked;      // link probabilities
  std::optional<RankedMetrics> norm_ratio;  // ||w_ij|| / ||w_i||
  Json report;
};

EvalResult cmd_eval(const EvalConfig& cfg);

struct BenchmarkConfig {
  std::string suite = "ring-desk";  // ring-desk | random-desk
  int replicates = 10;
  std::uint64_t base_seed = 1;
  int jobs = 1;
  std::optional<int> k_max;
  std::optional<int> measurements;
  std::optional<std::string> kernel;
  std::filesystem::path out = "benchmark";
};

struct ReplicateOutcome {
  int index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::optional<EvalResult> eval;
};

struct BenchmarkResult {
  std::vector<ReplicateOutcome> replicates;
  int failures = 0;
  // Means over successful replicates; NaN when no replicate defines the value.
  double mean_tpr = 0.0;
  double mean_prec = 0.0;
  double mean_auroc = 0.0;
  double mean_auprec = 0.0;
  Json report;
};

// Suite defaults: simulation and inference settings of one replicate.
struct SuiteSpec {
  SimulateConfig simulate;
  InferConfig infer;
};
SuiteSpec suite_spec(const std::string& name);

BenchmarkResult cmd_benchmark(const BenchmarkConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace sdenet
