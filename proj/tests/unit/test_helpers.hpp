#pragma once

#include "sdenet/dsf.hpp"
#include "sdenet/grid.hpp"
#include "sdenet/kernels.hpp"
#include "sdenet/posterior.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/simulator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace sdenet::testing {

inline std::vector<double> integer_times(int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = i;
  return t;
}

// Random-walk trajectories with mild mean reversion on a refined integer grid.
inline Eigen::MatrixXd random_trajectory(const FineGrid& grid, int nodes, Rng& rng) {
  Eigen::MatrixXd y(grid.num_points(), nodes);
  for (int r = 0; r < nodes; ++r) {
    y(0, r) = rng.normal();
    for (int i = 1; i < grid.num_points(); ++i) {
      y(i, r) = 0.9 * y(i - 1, r) + std::sqrt(grid.dt) * rng.normal();
    }
  }
  return y;
}

// Noise-free measurements of a small simulated ring network on every grid point.
inline Eigen::MatrixXd simulated_trajectory(const FineGrid& grid, int nodes, Rng& rng) {
  const SystemMatrices sys = generate_ring_network(std::max(nodes, 2), rng.engine()(), 1);
  SimulationOptions opt;
  opt.seed = rng.engine()();
  opt.lambda_meas = 0.0;
  return simulate_sde(sys, grid.times, opt).Z.leftCols(nodes);
}

inline LinkPrior random_prior(Rng& rng, bool active = true) {
  return {active, rng.uniform(0.2, 3.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0),
          {rng.uniform(0.2, 0.95), rng.uniform(0.2, 0.95)}};
}

// Prior covariance of the stacked w_r with the same jitter the factor uses.
inline Eigen::MatrixXd stacked_covariance(std::span<const LinkPrior> row, const KernelSpec& spec, int lags,
                                          double dt) {
  const int nb = static_cast<int>(row.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nb * lags, nb * lags);
  for (int b = 0; b < nb; ++b) {
    if (!row[b].active) continue;
    Eigen::MatrixXd kb = kernel_matrix(spec, row[b].beta, lags, dt);
    add_jitter(kb);
    k.block(b * lags, b * lags, lags, lags) = std::abs(row[b].gamma) * kb;
  }
  return k;
}

// log N(dY_r; 0, sigma dt I + dt^2 Phi K Phi') evaluated with an N x N factorization.
inline double direct_log_marginal(const RegressionData& reg, int r, const Eigen::MatrixXd& k, double sigma) {
  const int n = reg.rows();
  const Eigen::MatrixXd cov = sigma * reg.dt * Eigen::MatrixXd::Identity(n, n) +
                              reg.dt * reg.dt * reg.Phi * k * reg.Phi.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::VectorXd dy = reg.dY.col(r);
  const double log_det = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + dy.dot(llt.solve(dy)));
}

}  // namespace sdenet::testing
