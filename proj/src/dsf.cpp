#include "sdenet/dsf.hpp"

#include "sdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdenet {

Adjacency ground_truth_topology(const SystemMatrices& sys) {
  const int p = sys.measured;
  const int n = sys.states();
  Adjacency adj(p, p);
  for (int r = 0; r < p; ++r) {
    for (int j = 0; j < p; ++j) adj(r, j) = sys.A(r, j) != 0.0;
  }
  // For each source j, collect the hidden nodes reachable via hidden-only paths.
  for (int j = 0; j < p; ++j) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack;
    for (int h = p; h < n; ++h) {
      if (sys.A(h, j) != 0.0) {
        seen[h] = true;
        stack.push_back(h);
      }
    }
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = p; b < n; ++b) {
        if (!seen[b] && sys.A(b, a) != 0.0) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    for (int h = p; h < n; ++h) {
      if (!seen[h]) continue;
      for (int r = 0; r < p; ++r) {
        if (sys.A(r, h) != 0.0) adj(r, j) = true;
      }
    }
  }
  return adj;
}

namespace {

std::string format_point(std::complex<double> s) {
  std::ostringstream out;
  out << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i";
  return out.str();
}

// Solves (sI - M) X = rhs, throwing NumericError when sI - M is singular.
ComplexMatrix resolvent_solve(const Eigen::MatrixXd& m, std::complex<double> s, const ComplexMatrix& rhs,
                              const char* what) {
  const Eigen::Index k = m.rows();
  if (k == 0) return ComplexMatrix(0, rhs.cols());
  ComplexMatrix lhs = s * ComplexMatrix::Identity(k, k) - m.cast<std::complex<double>>();
  Eigen::FullPivLU<ComplexMatrix> lu(lhs);
  if (!lu.isInvertible()) {
    throw NumericError(std::string("singular resolvent ") + what + " at s = " + format_point(s));
  }
  return lu.solve(rhs);
}

}  // namespace

DsfEval dsf_transfer_eval(const SystemMatrices& sys, std::complex<double> s) {
  if (s == std::complex<double>(0.0, 0.0)) throw ArgumentError("DSF evaluation point must be nonzero");
  using C = std::complex<double>;
  const Eigen::MatrixXd a12 = sys.A12();
  const Eigen::MatrixXd a22 = sys.A22();
  const int hidden = sys.hidden();
  const int q = sys.inputs();
  const int m = sys.noises();

  // R = (sI - A22)^{-1} applied to [A21, B2, A22 K2].
  ComplexMatrix rhs(hidden, sys.measured + q + m);
  rhs << sys.A21().cast<C>(), sys.B2().cast<C>(), (a22 * sys.K2()).cast<C>();
  const ComplexMatrix solved = resolvent_solve(a22, s, rhs, "(sI - A22)");
  const ComplexMatrix a12c = a12.cast<C>();
  const C inv_s = 1.0 / s;

  DsfEval out;
  out.Fy = inv_s * (sys.A11().cast<C>() + a12c * solved.leftCols(sys.measured));
  out.Fu = inv_s * (a12c * solved.middleCols(sys.measured, q) + sys.B1().cast<C>());
  out.Fw = inv_s * (a12c * sys.K2().cast<C>() + a12c * solved.rightCols(m)) + sys.K1().cast<C>();
  return out;
}

IoEval io_transfer_eval(const SystemMatrices& sys, std::complex<double> s) {
  using C = std::complex<double>;
  const int q = sys.inputs();
  const int m = sys.noises();
  ComplexMatrix rhs(sys.states(), q + m);
  rhs << sys.B.cast<C>(), (sys.A * sys.K).cast<C>();
  const ComplexMatrix solved = resolvent_solve(sys.A, s, rhs, "(sI - A)");
  const ComplexMatrix c = sys.C().cast<C>();
  IoEval out;
  out.Gu = c * solved.leftCols(q);
  out.Gw = c * solved.rightCols(m) + (sys.C() * sys.K).cast<C>();
  return out;
}

DsfEval recover_dsf_from_io(const IoEval& io, const Eigen::MatrixXd& k1) {
  using C = std::complex<double>;
  const Eigen::Index p = io.Gw.rows();
  if (io.Gw.cols() != p || k1.rows() != p || k1.cols() != p) {
    throw ArgumentError("recovery needs square G_w and K1 of matching size");
  }
  Eigen::FullPivLU<ComplexMatrix> lu(io.Gw);
  if (!lu.isInvertible()) throw NumericError("G_w is singular; DSF recovery impossible");
  DsfEval out;
  out.Fw = k1.cast<C>();
  out.Fy = ComplexMatrix::Identity(p, p) - out.Fw * lu.inverse();
  out.Fu = (ComplexMatrix::Identity(p, p) - out.Fy) * io.Gu;
  return out;
}

std::vector<DsfEval> recover_dsf_from_io(const std::vector<IoEval>& io, const Eigen::MatrixXd& k1) {
  std::vector<DsfEval> out;
  out.reserve(io.size());
  for (const auto& g : io) out.push_back(recover_dsf_from_io(g, k1));
  return out;
}

Eigen::MatrixXd filtered_trajectory(const Eigen::MatrixXd& y, double dt, double a) {
  Eigen::MatrixXd out(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    double running = 0.0;  // sum_{v<i} y(t_v)
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      out(i, c) = y(i, c) + a * dt * running;
      running += y(i, c);
    }
  }
  return out;
}

RegressionData build_regression(const Eigen::MatrixXd& y, const FineGrid& grid, double a, int lags,
                                const Eigen::MatrixXd& inputs) {
  const int n = grid.intervals;
  if (y.rows() != grid.num_points()) throw ArgumentError("trajectory rows do not match the grid");
  if (lags < 1 || lags > n) {
    throw ArgumentError("lag count " + std::to_string(lags) + " must lie in [1, N=" + std::to_string(n) + "]");
  }
  if (inputs.size() && inputs.rows() != grid.num_points()) {
    throw ArgumentError("input rows do not match the grid");
  }
  RegressionData reg;
  reg.dt = grid.dt;
  reg.filter = a;
  reg.lags = lags;
  reg.nodes = static_cast<int>(y.cols());
  reg.input_blocks = inputs.size() ? static_cast<int>(inputs.cols()) : 0;

  Eigen::MatrixXd source(y.rows(), reg.blocks());
  source.leftCols(reg.nodes) = y;
  if (reg.input_blocks) source.rightCols(reg.input_blocks) = inputs;
  const Eigen::MatrixXd yhat = filtered_trajectory(source, grid.dt, a);
  auto hat = [&](int idx, int b) { return idx < 0 ? 0.0 : yhat(idx, b); };

  reg.Phi.resize(n, reg.blocks() * lags);
  reg.dY.resize(n, reg.nodes);
  for (int i = n; i >= 1; --i) {
    const int row = n - i;
    for (int b = 0; b < reg.blocks(); ++b) {
      for (int k = 1; k <= lags; ++k) {
        reg.Phi(row, b * lags + k - 1) = hat(i - k, b) - hat(i - 1 - k, b);
      }
    }
    reg.dY.row(row) = y.row(i) - y.row(i - 1);
  }
  reg.gram.noalias() = reg.Phi.transpose() * reg.Phi;
  reg.phi_t_dy.noalias() = reg.Phi.transpose() * reg.dY;
  reg.dy_sq = reg.dY.colwise().squaredNorm().transpose();
  return reg;
}

int default_lags(const FineGrid& grid) {
  const int want = static_cast<int>(std::ceil(8.0 / grid.dt - 1e-9));
  return std::max(1, std::min(grid.intervals, want));
}

}  // namespace sdenet
