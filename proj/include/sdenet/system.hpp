#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sdenet {

// Linear SDE  dx = (A x + B u) dt + K dW,  y = C x  with C = [I_p, 0].
// K is the noise shape; simulate_sde scales it by sqrt(sigma_e) derived from
// the requested SNR.
struct SystemMatrices {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd K;
  int measured = 0;  // p

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int noises() const { return static_cast<int>(K.cols()); }
  int hidden() const { return states() - measured; }
  Eigen::MatrixXd C() const;

  // Partition blocks (measured first).
  Eigen::MatrixXd A11() const { return A.topLeftCorner(measured, measured); }
  Eigen::MatrixXd A12() const { return A.topRightCorner(measured, hidden()); }
  Eigen::MatrixXd A21() const { return A.bottomLeftCorner(hidden(), measured); }
  Eigen::MatrixXd A22() const { return A.bottomRightCorner(hidden(), hidden()); }
  Eigen::MatrixXd B1() const { return B.topRows(measured); }
  Eigen::MatrixXd B2() const { return B.bottomRows(hidden()); }
  Eigen::MatrixXd K1() const { return K.topRows(measured); }
  Eigen::MatrixXd K2() const { return K.bottomRows(hidden()); }
};

// Max real part of the spectrum below -1e-8.
bool is_hurwitz(const Eigen::MatrixXd& a);
double spectral_abscissa(const Eigen::MatrixXd& a);

using Adjacency = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Measured times, noisy measurements Z (M x p) and optional recorded inputs U
// (M x q, possibly zero columns).
struct TimeSeriesData {
  std::vector<double> times;
  Eigen::MatrixXd Z;
  Eigen::MatrixXd U;

  int num_measurements() const { return static_cast<int>(Z.rows()); }
  int num_nodes() const { return static_cast<int>(Z.cols()); }
  int num_inputs() const { return static_cast<int>(U.cols()); }
};

}  // namespace sdenet
