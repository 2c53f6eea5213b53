#pragma once

#include "sdenet/grid.hpp"
#include "sdenet/system.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace sdenet {

// Off-diagonal and diagonal structure of F_y: (r, j) is set iff A11(r, j) != 0
// or a directed path j -> hidden nodes -> r exists. Generic cancellation is
// ignored.
Adjacency ground_truth_topology(const SystemMatrices& sys);

using ComplexMatrix = Eigen::MatrixXcd;

// F_y, F_u, F_w at one complex frequency.
struct DsfEval {
  ComplexMatrix Fy;
  ComplexMatrix Fu;
  ComplexMatrix Fw;
};

// Input-output maps G_u = C (sI - A)^{-1} B and G_w = C (sI - A)^{-1} A K + C K
// of the equivalent realization.
struct IoEval {
  ComplexMatrix Gu;
  ComplexMatrix Gw;
};

DsfEval dsf_transfer_eval(const SystemMatrices& sys, std::complex<double> s);
IoEval io_transfer_eval(const SystemMatrices& sys, std::complex<double> s);

// Recovers (F_y, F_u, F_w) from the IO map when F_w = K1 is diagonal:
// F_y = I - K1 G_w^{-1}, F_u = (I - F_y) G_u.
DsfEval recover_dsf_from_io(const IoEval& io, const Eigen::MatrixXd& k1);
std::vector<DsfEval> recover_dsf_from_io(const std::vector<IoEval>& io, const Eigen::MatrixXd& k1);

// Finite regression  dY_r ~ dt * Phi * w_r  assembled from refined
// trajectories. Rows are ordered t_N, t_{N-1}, ..., t_1. Column block b
// (b < nodes) holds the l lags of the filtered trajectory of node b; blocks
// past `nodes` hold filtered known inputs when enabled.
struct RegressionData {
  double dt = 0.0;
  double filter = 0.0;  // a
  int lags = 0;  // l
  int nodes = 0;  // p
  int input_blocks = 0;
  Eigen::MatrixXd Phi;  // N x (blocks * l)
  Eigen::MatrixXd dY;   // N x p
  Eigen::MatrixXd gram;  // Phi' Phi
  Eigen::MatrixXd phi_t_dy;  // Phi' dY, (blocks * l) x p
  Eigen::VectorXd dy_sq;  // ||dY_r||^2

  int rows() const { return static_cast<int>(Phi.rows()); }
  int blocks() const { return nodes + input_blocks; }
  int cols() const { return static_cast<int>(Phi.cols()); }
};

// Filtered trajectory  yhat(t_i) = y(t_i) + a dt sum_{v<i} y(t_v)  (left
// endpoint rule), column-wise.
Eigen::MatrixXd filtered_trajectory(const Eigen::MatrixXd& y, double dt, double a);

// y holds the refined trajectories on the whole grid ((N+1) x p). `inputs`,
// when non-empty, holds known inputs on the same grid ((N+1) x q). Throws
// ArgumentError when lags > N.
RegressionData build_regression(const Eigen::MatrixXd& y, const FineGrid& grid, double a, int lags,
                                const Eigen::MatrixXd& inputs = {});

// min(N, ceil(8 / dt)).
int default_lags(const FineGrid& grid);

}  // namespace sdenet
