#pragma once

#include "sdenet/rng.hpp"
#include "sdenet/system.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sdenet {

// Random sparse network with roughly density * n^2 nonzero entries of A.
// Off-diagonal entries are N(0,1); the diagonal is shifted left past the
// spectral abscissa so the result is Hurwitz.
// B = [I_p; 0], K = [I_p; 0].
SystemMatrices generate_random_network(int n, int p, double density, std::uint64_t seed,
                                       int max_tries = 1'000'000);

// Directed ring 1 -> 2 -> ... -> p -> 1 among measured nodes with negative
// self-dynamics. Each hidden node h is wired to measured node h mod p in both
// directions, so it only adds self-loop paths. Rejection-sampled until Hurwitz.
SystemMatrices generate_ring_network(int p, std::uint64_t seed, int hidden = 0);

// How the recorded input path U(t) enters the dynamics.
enum class InputMode {
  kNone,        // inputs disabled, U has zero columns
  kExcitation,  // dx includes B dU: inputs act as Wiener excitation on measured nodes
  kSignal,      // dx includes B U(t) dt: the Wiener path itself is the input signal
};

struct SimulationOptions {
  double snr_db = 10.0;
  double lambda_meas = 1e-3;
  double dt_internal = 0.0;  // 0 selects (min T1 spacing) / 100
  double input_variance = 1.0;  // sigma_u
  InputMode inputs = InputMode::kSignal;
  Eigen::VectorXd x0;  // empty means zero
  std::uint64_t seed = 1;
  bool keep_states = false;
};

struct SimulationOutput {
  std::vector<double> times;  // T1
  Eigen::MatrixXd Z;  // M x p
  Eigen::MatrixXd U;  // M x q recorded input path
  std::vector<double> internal_times;
  Eigen::MatrixXd X;  // internal grid x n, only when keep_states
  double sigma_e = 0.0;
  bool hurwitz = true;

  TimeSeriesData data() const { return {times, Z, U}; }
};

// sigma_e = sigma_u * 10^(-snr_db / 10).
double process_noise_variance(double snr_db, double input_variance = 1.0);

// Euler-Maruyama integration on an internal grid that contains every T1
// instant. Measurement noise with variance lambda_meas is added at T1.
SimulationOutput simulate_sde(const SystemMatrices& sys, std::span<const double> measurement_times,
                              const SimulationOptions& options);

// Sampled paths on a uniform internal grid with step h: row k holds the value
// at k*h. W has m columns (Wiener path, W(0)=0), u has q columns.
struct PathGrid {
  double h = 0.0;
  Eigen::MatrixXd W;
  Eigen::MatrixXd u;
  int steps() const { return static_cast<int>(W.rows()) - 1; }
};

// Wiener path with unit-variance increments (scale K to change intensity).
Eigen::MatrixXd sample_wiener_path(int steps, int dims, double h, Rng& rng);

enum class Integrator { kEuler, kHeun };

// Output y = Cx of the SDE dx = (Ax + Bu) dt + K dW driven by the increments
// of paths.W (Euler-Maruyama). Returns (steps+1) x p.
Eigen::MatrixXd integrate_sde_output(const SystemMatrices& sys, const PathGrid& paths,
                                     const Eigen::VectorXd& x0);

// Output of the equivalent realization  xdot = Ax + Bu + AKW,  y = Cx + CKW
// driven by the path values of paths.W.
Eigen::MatrixXd simulate_equivalent_realization(const SystemMatrices& sys, const PathGrid& paths,
                                                const Eigen::VectorXd& x0,
                                                Integrator integrator = Integrator::kHeun);

}  // namespace sdenet
