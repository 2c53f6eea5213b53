#include "sdenet/cli.hpp"
#include "sdenet/dsf.hpp"
#include "sdenet/errors.hpp"
#include "sdenet/grid.hpp"
#include "sdenet/kernels.hpp"
#include "sdenet/metrics.hpp"
#include "sdenet/model.hpp"
#include "sdenet/results.hpp"
#include "sdenet/sampler.hpp"
#include "sdenet/simulator.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace sdenet;

namespace {

// Boolean matrices cross the boundary as 0/1 integer arrays.
Eigen::MatrixXi to_int(const Adjacency& a) { return a.cast<int>(); }
Adjacency to_adjacency(const Eigen::MatrixXi& a) { return a.array() != 0; }

py::object optional_float(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::object(py::none());
}

InputMode input_mode(const std::string& name) {
  if (name == "none") return InputMode::kNone;
  if (name == "excitation") return InputMode::kExcitation;
  if (name == "signal") return InputMode::kSignal;
  throw ArgumentError("unknown input mode '" + name + "'");
}

py::dict simulate(const std::string& kind, int n, int p, int hidden, double density, double snr_db,
                  double lambda_meas, int measurements, double spacing, const std::string& inputs,
                  std::uint64_t seed) {
  if (measurements < 2) throw ArgumentError("measurements must be at least 2");
  if (!(spacing > 0.0)) throw ArgumentError("spacing must be positive");
  SystemMatrices sys;
  if (kind == "random") {
    sys = generate_random_network(n, p, density, seed);
  } else if (kind == "ring") {
    sys = generate_ring_network(p, seed, hidden);
  } else {
    throw ArgumentError("unknown network kind '" + kind + "'");
  }
  std::vector<double> times(measurements);
  for (int k = 0; k < measurements; ++k) times[k] = k * spacing;
  SimulationOptions opt;
  opt.snr_db = snr_db;
  opt.lambda_meas = lambda_meas;
  opt.inputs = input_mode(inputs);
  opt.seed = seed;
  const SimulationOutput out = simulate_sde(sys, times, opt);
  py::dict d;
  d["times"] = out.times;
  d["Z"] = out.Z;
  d["U"] = out.U;
  d["A"] = sys.A;
  d["B"] = sys.B;
  d["K"] = sys.K;
  d["truth"] = to_int(ground_truth_topology(sys));
  d["sigma_e"] = out.sigma_e;
  return d;
}

py::dict infer(const std::vector<double>& times, const Eigen::MatrixXd& Z, int refinement, int k_max,
               std::uint64_t seed, const std::string& kernel, double eps_traj, bool adapt, int lags,
               int pseudo_points, double p_s, bool pin_diagonal) {
  if (static_cast<Eigen::Index>(times.size()) != Z.rows()) {
    throw ArgumentError("times and Z have different numbers of rows");
  }
  ModelConfig mc;
  mc.kernel.kind = parse_kernel_kind(kernel);
  mc.lags = lags;
  mc.pseudo_points = pseudo_points;
  mc.p_s = p_s;
  SamplerConfig sc;
  sc.k_max = k_max;
  sc.seed = seed;
  sc.eps_traj = eps_traj;
  sc.adapt_steps = adapt;
  sc.pin_diagonal = pin_diagonal;
  sc.store_w = true;

  PosteriorSummary s;
  {
    py::gil_scoped_release release;
    TimeSeriesData data{times, Z, Eigen::MatrixXd(Z.rows(), 0)};
    FineGrid grid = build_grid(data.times, refinement);
    const NetworkModel model(std::move(data), std::move(grid), mc);
    s = summarize(run_chain(model, sc));
  }
  py::dict d;
  d["link_prob"] = s.link_prob;
  d["s_map"] = to_int(s.s_map);
  d["map_frequency"] = s.map_frequency;
  d["s_threshold"] = to_int(s.s_threshold);
  d["gamma_mean"] = s.gamma_mean;
  d["w_mean"] = s.w_mean;
  d["y_mean"] = s.y_mean;
  d["sigma_mean"] = s.sigma_mean;
  d["lambda_mean"] = s.lambda_mean;
  d["lags"] = s.lags;
  d["retained"] = s.retained;
  d["trajectory_acceptance"] = s.stats.trajectory.rate();
  d["switch_acceptance"] = s.stats.switch_move.rate();
  d["update_acceptance"] = s.stats.update_move.rate();
  return d;
}

py::dict binary(const Eigen::MatrixXi& predicted, const Eigen::MatrixXi& truth, bool exclude_diagonal) {
  const BinaryMetrics m = binary_metrics(to_adjacency(predicted), to_adjacency(truth), exclude_diagonal);
  py::dict d;
  d["tp"] = m.tp;
  d["fp"] = m.fp;
  d["fn"] = m.fn;
  d["tn"] = m.tn;
  d["tpr"] = optional_float(m.tpr);
  d["prec"] = optional_float(m.prec);
  return d;
}

py::dict ranked(const Eigen::MatrixXd& scores, const Eigen::MatrixXi& truth, bool exclude_diagonal) {
  const RankedMetrics m = ranked_metrics(scores, to_adjacency(truth), exclude_diagonal);
  py::dict d;
  d["auroc"] = m.auroc;
  d["auprec"] = m.auprec;
  return d;
}

py::dict grid(const std::vector<double>& times, int refinement) {
  const FineGrid g = build_grid(times, refinement);
  py::dict d;
  d["dt"] = g.dt;
  d["times"] = g.times;
  d["measurement_index"] = g.measurement_index;
  d["segment_lengths"] = g.segment_lengths;
  return d;
}

int cli(const std::vector<std::string>& args) {
  std::vector<std::string> owned{"sdenet"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : owned) argv.push_back(a.data());
  argv.push_back(nullptr);
  py::gil_scoped_release release;
  return run_cli(static_cast<int>(owned.size()), argv.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian inference of sparse stochastic dynamical networks";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<GridError>(m, "GridError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<GenerationError>(m, "GenerationError", base.ptr());

  m.def("simulate", &simulate, py::arg("kind") = "ring", py::arg("n") = 8, py::arg("p") = 6,
        py::arg("hidden") = 2, py::arg("density") = 0.2, py::arg("snr_db") = 10.0,
        py::arg("lambda_meas") = 1e-3, py::arg("measurements") = 100, py::arg("spacing") = 1.0,
        py::arg("inputs") = "signal", py::arg("seed") = 1,
        "Simulate a random or ring network and return its measurements and ground truth.");
  m.def("infer", &infer, py::arg("times"), py::arg("Z"), py::arg("refinement") = 3, py::arg("k_max") = 1000,
        py::arg("seed") = 1, py::arg("kernel") = "tc", py::arg("eps_traj") = 0.2, py::arg("adapt") = true,
        py::arg("lags") = 0, py::arg("pseudo_points") = 0, py::arg("p_s") = 0.1,
        py::arg("pin_diagonal") = false,
        "Run one chain on (times, Z) and return the posterior summary.");
  m.def("binary_metrics", &binary, py::arg("predicted"), py::arg("truth"), py::arg("exclude_diagonal") = true);
  m.def("ranked_metrics", &ranked, py::arg("scores"), py::arg("truth"), py::arg("exclude_diagonal") = true);
  m.def(
      "kernel_matrix",
      [](const std::string& kind, double beta1, double beta2, int lags, double dt) {
        KernelSpec spec;
        spec.kind = parse_kernel_kind(kind);
        return kernel_matrix(spec, ShapeParams{beta1, beta2}, lags, dt);
      },
      py::arg("kind"), py::arg("beta1"), py::arg("beta2") = 0.5, py::arg("lags"), py::arg("dt"));
  m.def("bridge_covariance", &bridge_covariance, py::arg("intervals"));
  m.def("build_grid", &grid, py::arg("times"), py::arg("refinement"));
  m.def("run_cli", &cli, py::arg("args"), "Run the command-line interface; returns its exit code.");
}
