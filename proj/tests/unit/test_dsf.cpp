#include "sdenet/dsf.hpp"
#include "sdenet/errors.hpp"
#include "sdenet/grid.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/simulator.hpp"

#include <doctest.h>

#include <complex>

using namespace sdenet;
using C = std::complex<double>;

namespace {

const C kPoints[] = {{1.0, 0.0}, {0.5, 2.0}, {2.0, -1.0}, {0.1, 0.3}, {5.0, 7.0}};

// Random system with diagonal K1 and K2 = 0.
SystemMatrices random_system(Rng& rng) {
  const int n = 3 + static_cast<int>(rng.index(4));
  const int p = 1 + static_cast<int>(rng.index(n));
  SystemMatrices sys = generate_random_network(n, p, 0.4, rng.engine()());
  for (int i = 0; i < p; ++i) sys.K(i, i) = rng.uniform(0.5, 2.0);
  return sys;
}

std::vector<double> integer_times(int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = i;
  return t;
}

}  // namespace

TEST_SUITE("dsf") {

TEST_CASE("ground truth without hidden nodes is the pattern of A") {
  SystemMatrices sys;
  sys.A.resize(3, 3);
  sys.A << -1, 0, 2, 0.5, -1, 0, 0, 0, -1;
  sys.measured = 3;
  const Adjacency adj = ground_truth_topology(sys);
  for (int r = 0; r < 3; ++r) {
    for (int j = 0; j < 3; ++j) CHECK(adj(r, j) == (sys.A(r, j) != 0.0));
  }
}

TEST_CASE("paths through hidden nodes create links") {
  SystemMatrices sys;
  sys.A.resize(2, 2);
  sys.A << 0, 1, 1, -3;
  sys.measured = 1;
  CHECK(ground_truth_topology(sys)(0, 0));

  // chain 1 -> h1 -> h2 -> 2 but A12 row of node 1 empty
  sys.A = Eigen::MatrixXd::Zero(4, 4);
  sys.A.diagonal().setConstant(-1.0);
  sys.measured = 2;
  sys.A(2, 0) = 1.0;
  sys.A(3, 2) = 1.0;
  sys.A(1, 3) = 1.0;
  const Adjacency adj = ground_truth_topology(sys);
  CHECK(adj(1, 0));
  CHECK_FALSE(adj(0, 1));

  // decoupled hidden block
  sys.A(1, 3) = 0.0;
  CHECK_FALSE(ground_truth_topology(sys)(1, 0));
}

TEST_CASE("ground truth is invariant under positive diagonal scaling") {
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const SystemMatrices sys = random_system(rng);
    SystemMatrices scaled = sys;
    const Eigen::VectorXd d = Eigen::VectorXd::Random(sys.states()).cwiseAbs().array() + 0.1;
    scaled.A = d.asDiagonal() * sys.A * d.cwiseInverse().asDiagonal();
    CHECK(ground_truth_topology(scaled) == ground_truth_topology(sys));
  }
}

TEST_CASE("no hidden nodes: F_y at s=1 equals A") {
  Rng rng(4);
  SystemMatrices sys = generate_random_network(4, 4, 0.5, 3);
  const DsfEval f = dsf_transfer_eval(sys, 1.0);
  CHECK((f.Fy - sys.A.cast<C>()).norm() < 1e-14);
  CHECK_THROWS_AS(dsf_transfer_eval(sys, 0.0), ArgumentError);
}

TEST_CASE("identifiability identities") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemMatrices sys = random_system(rng);
    const int p = sys.measured;
    for (C s : kPoints) {
      const DsfEval f = dsf_transfer_eval(sys, s);
      const IoEval g = io_transfer_eval(sys, s);
      const ComplexMatrix i_fy = ComplexMatrix::Identity(p, p) - f.Fy;
      CHECK((i_fy.lu().solve(f.Fu) - g.Gu).norm() < 1e-10 * (1.0 + g.Gu.norm()));
      CHECK((i_fy * g.Gw - f.Fw).norm() < 1e-10 * (1.0 + f.Fw.norm()));
      const DsfEval back = recover_dsf_from_io(g, sys.K1().leftCols(p));
      CHECK((back.Fy - f.Fy).norm() < 1e-9 * (1.0 + f.Fy.norm()));
      CHECK((back.Fu - f.Fu).norm() < 1e-9 * (1.0 + f.Fu.norm()));
      CHECK((back.Fw - f.Fw).norm() < 1e-9 * (1.0 + f.Fw.norm()));
    }
    const DsfEval far = dsf_transfer_eval(sys, 1e6);
    CHECK((far.Fw - sys.K1().leftCols(p).cast<C>()).norm() < 1e-4);
  }
}

TEST_CASE("scalar recovery") {
  SystemMatrices sys;
  sys.A = Eigen::MatrixXd::Constant(1, 1, -0.7);
  sys.B = Eigen::MatrixXd::Ones(1, 1);
  sys.K = Eigen::MatrixXd::Constant(1, 1, 1.3);
  sys.measured = 1;
  const C s(0.4, 1.1);
  const DsfEval back = recover_dsf_from_io(io_transfer_eval(sys, s), sys.K);
  CHECK(std::abs(back.Fy(0, 0) - (-0.7) / s) < 1e-12);
}

TEST_CASE("zero rows survive recovery") {
  Rng rng(12);
  SystemMatrices sys = generate_random_network(3, 3, 0.5, 21);
  sys.A.row(1).setZero();
  sys.A(1, 1) = -1.0;
  for (C s : kPoints) {
    const DsfEval back = recover_dsf_from_io(io_transfer_eval(sys, s), sys.K1());
    CHECK(std::abs(back.Fy(1, 0)) < 1e-9);
    CHECK(std::abs(back.Fy(1, 2)) < 1e-9);
  }
}

TEST_CASE("singular resolvent raises a numeric error") {
  SystemMatrices sys;
  sys.A = Eigen::MatrixXd::Identity(2, 2) * -1.0;
  sys.A(1, 1) = 2.0;
  sys.A(0, 1) = 1.0;
  sys.A(1, 0) = 1.0;
  sys.B = Eigen::MatrixXd::Zero(2, 1);
  sys.K = Eigen::MatrixXd::Zero(2, 1);
  sys.measured = 1;
  CHECK_THROWS_AS(dsf_transfer_eval(sys, 2.0), NumericError);
}

TEST_CASE("filter") {
  Eigen::MatrixXd y(4, 1);
  y << 1, 2, 3, 4;
  CHECK(filtered_trajectory(y, 0.5, 0.0) == y);
  const Eigen::MatrixXd f = filtered_trajectory(y, 0.5, 2.0);
  CHECK(f(0, 0) == 1.0);
  CHECK(f(3, 0) == doctest::Approx(4.0 + 1.0 * (1 + 2 + 3)));
}

TEST_CASE("hand-expanded regression") {
  const FineGrid grid = build_grid(integer_times(3), 1);
  Eigen::MatrixXd y(3, 1);
  y << 0.7, 1.9, 2.6;
  const RegressionData reg = build_regression(y, grid, 0.0, 1);
  REQUIRE(reg.rows() == 2);
  REQUIRE(reg.cols() == 1);
  CHECK(reg.Phi(0, 0) == doctest::Approx(1.9 - 0.7));
  CHECK(reg.Phi(1, 0) == doctest::Approx(0.7));
  CHECK(reg.dY(0, 0) == doctest::Approx(2.6 - 1.9));
  CHECK(reg.dY(1, 0) == doctest::Approx(1.9 - 0.7));
  CHECK_THROWS_AS(build_regression(y, grid, 0.0, 3), ArgumentError);
}

TEST_CASE("regression reproduces a noiseless lagged system") {
  const int n = 40, p = 2, l = 3;
  const double dt = 0.25, a = 0.8;
  const FineGrid grid = build_grid(integer_times(11), 4);
  REQUIRE(grid.intervals == n);
  Rng rng(5);
  const Eigen::MatrixXd w = 0.3 * Eigen::MatrixXd::Random(p, p * l);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n + 1, p), yh = Eigen::MatrixXd::Zero(n + 1, p);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);  // running left-endpoint sum
  y.row(0) << 1.0, -0.5;
  auto yh_at = [&](int i) -> Eigen::RowVectorXd {
    return i < 0 ? Eigen::RowVectorXd::Zero(p) : Eigen::RowVectorXd(yh.row(i));
  };
  yh.row(0) = y.row(0);
  for (int i = 1; i <= n; ++i) {
    Eigen::RowVectorXd inc = Eigen::RowVectorXd::Zero(p);
    for (int r = 0; r < p; ++r) {
      for (int b = 0; b < p; ++b) {
        for (int k = 1; k <= l; ++k) inc(r) += dt * w(r, b * l + k - 1) * (yh_at(i - k)(b) - yh_at(i - 1 - k)(b));
      }
    }
    y.row(i) = y.row(i - 1) + inc;
    acc += y.row(i - 1).transpose();
    yh.row(i) = y.row(i) + a * dt * acc.transpose();
  }
  const RegressionData reg = build_regression(y, grid, a, l);
  CHECK(reg.cols() == p * l);
  for (int r = 0; r < p; ++r) {
    const Eigen::VectorXd resid = reg.dY.col(r) - dt * reg.Phi * w.row(r).transpose();
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK((reg.gram - reg.Phi.transpose() * reg.Phi).norm() < 1e-10);
  CHECK((reg.phi_t_dy - reg.Phi.transpose() * reg.dY).norm() < 1e-10);
}

TEST_CASE("default lag count") {
  CHECK(default_lags(build_grid(integer_times(101), 3)) == 24);
  CHECK(default_lags(build_grid(integer_times(4), 3)) == 9);
  CHECK(default_lags(build_grid(integer_times(30), 2)) == 16);
}

}
