#include "sdenet/system.hpp"

#include <Eigen/Eigenvalues>

#include <limits>

namespace sdenet {

Eigen::MatrixXd SystemMatrices::C() const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(measured, states());
  c.leftCols(measured).setIdentity();
  return c;
}

double spectral_abscissa(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  return solver.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Eigen::MatrixXd& a) { return spectral_abscissa(a) < -1e-8; }

}  // namespace sdenet
