#include "sdenet/errors.hpp"
#include "sdenet/sparse_approx.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace sdenet;
using namespace sdenet::testing;

TEST_SUITE("sparse_approx") {

TEST_CASE("pseudo-point selection") {
  const PseudoGrid full = select_pseudo_points(12, 12);
  CHECK(full.full());
  CHECK(full.rest.empty());
  for (int i = 0; i < 12; ++i) CHECK(full.selected[i] == i + 1);

  CHECK(select_pseudo_points(12, 1).selected == std::vector<int>{1});

  const PseudoGrid g = select_pseudo_points(100, 10);
  REQUIRE(g.size() == 10);
  CHECK(g.selected.front() == 1);
  CHECK(g.selected.back() == 100);
  for (int i = 1; i < 10; ++i) CHECK(g.selected[i] > g.selected[i - 1]);
  CHECK(g.selected[1] - g.selected[0] < g.selected[9] - g.selected[8]);
  CHECK(static_cast<int>(g.rest.size()) == 90);

  // rounding collisions are backfilled from the smallest unused indices
  for (int l = 1; l <= 60; ++l) {
    for (int d = 1; d <= l; ++d) {
      const PseudoGrid p = select_pseudo_points(l, d);
      CHECK(p.size() == d);
      CHECK(p.size() + static_cast<int>(p.rest.size()) == l);
    }
  }
  CHECK_THROWS_AS(select_pseudo_points(5, 6), ArgumentError);
  CHECK_THROWS_AS(select_pseudo_points(5, 0), ArgumentError);
  CHECK(default_pseudo_points(24) == 24);
  CHECK(default_pseudo_points(80) == 30);
}

TEST_CASE("projection rows") {
  const KernelSpec spec{KernelKind::kTC};
  const LinkPrior prior{true, 1.0, {0.8, 0.5}};
  const double dt = 0.25;
  const int l = 16;

  const Eigen::MatrixXd eye = build_projection(prior, spec, dt, select_pseudo_points(l, l));
  CHECK(eye.isIdentity(0.0));

  const PseudoGrid g = select_pseudo_points(l, 5);
  const Eigen::MatrixXd d = build_projection(prior, spec, dt, g);
  const Eigen::MatrixXd k = kernel_matrix(spec, prior.beta, l, dt);
  Eigen::MatrixXd kdd(5, 5), krd(g.rest.size(), 5), krr(g.rest.size(), g.rest.size());
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) kdd(i, j) = k(g.selected[i] - 1, g.selected[j] - 1);
  }
  add_jitter(kdd);
  for (std::size_t i = 0; i < g.rest.size(); ++i) {
    for (int j = 0; j < 5; ++j) krd(i, j) = k(g.rest[i] - 1, g.selected[j] - 1);
    for (std::size_t j = 0; j < g.rest.size(); ++j) krr(i, j) = k(g.rest[i] - 1, g.rest[j] - 1);
  }
  const Eigen::MatrixXd cond = krd * kdd.inverse();
  for (std::size_t i = 0; i < g.rest.size(); ++i) {
    CHECK((d.row(g.rest[i] - 1) - cond.row(i)).norm() < 1e-8 * (1.0 + cond.row(i).norm()));
  }
  for (int i = 0; i < 5; ++i) CHECK(d.row(g.selected[i] - 1) == Eigen::RowVectorXd::Unit(5, i));

  const Eigen::MatrixXd schur = krr - krd * kdd.ldlt().solve(krd.transpose());
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(schur).eigenvalues().minCoeff();
  CHECK(min_eig >= -1e-8 * std::max(schur.trace(), 1e-300));
}

TEST_CASE("projection route is exact with every lag selected") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const FineGrid grid = build_grid(integer_times(15), 2);
    const int l = 8;
    const RegressionData reg = build_regression(random_trajectory(grid, 2, rng), grid, 1.0, l);
    const KernelSpec spec{static_cast<KernelKind>(rng.index(3))};
    const std::vector<LinkPrior> row{random_prior(rng), random_prior(rng)};
    const PriorBasis basis(spec, l, grid.dt);
    const double exact = log_collapsed_marginal(reg, 0, row, 0.3, basis);

    const PseudoGrid all = select_pseudo_points(l, l);
    std::vector<Eigen::MatrixXd> fs;
    for (const auto& lp : row) {
      Eigen::MatrixXd kdd = kernel_matrix(spec, lp.beta, l, grid.dt);
      add_jitter(kdd);
      fs.push_back(std::sqrt(std::abs(lp.gamma)) * build_projection(lp, spec, grid.dt, all) *
                   Eigen::MatrixXd(kdd.llt().matrixL()));
    }
    const std::vector<const Eigen::MatrixXd*> ptrs{&fs[0], &fs[1]};
    CHECK(std::abs(factorize_node(reg, 0, ptrs, 0.3).log_marginal - exact) < 1e-10);
  }
}

TEST_CASE("approximation error shrinks as pseudo points are added") {
  Rng rng(4);
  int monotone = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const FineGrid grid = build_grid(integer_times(40), 3);
    const int l = 32;
    const RegressionData reg = build_regression(simulated_trajectory(grid, 2, rng), grid, 1.0, l);
    const KernelSpec spec{static_cast<KernelKind>(rng.index(3))};
    const std::vector<LinkPrior> row{random_prior(rng), random_prior(rng)};
    const double sigma = rng.uniform(0.1, 1.0);
    const double exact = log_collapsed_marginal(reg, 0, row, sigma, PriorBasis(spec, l, grid.dt));
    double prev = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int d : {l / 8, l / 4, l / 2, l}) {
      const double err = std::abs(log_collapsed_marginal(reg, 0, row, sigma, PriorBasis(spec, l, grid.dt, d)) - exact);
      ok = ok && err <= prev;
      prev = err;
    }
    CHECK(prev < 1e-10);
    monotone += ok;
  }
  CHECK(monotone >= 16);
}

}
