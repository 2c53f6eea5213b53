#include "sdenet/sparse_approx.hpp"

#include "sdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace sdenet {

PseudoGrid select_pseudo_points(int lags, int count) {
  if (lags < 1) throw ArgumentError("lag grid must be non-empty");
  if (count < 1 || count > lags) {
    throw ArgumentError("pseudo-point count " + std::to_string(count) + " must lie in [1, " +
                        std::to_string(lags) + "]");
  }
  std::set<int> chosen;
  if (count == 1) {
    chosen.insert(1);
  } else {
    for (int k = 0; k < count; ++k) {
      const double v = std::pow(static_cast<double>(lags), static_cast<double>(k) / (count - 1));
      chosen.insert(std::clamp(static_cast<int>(std::lround(v)), 1, lags));
    }
    for (int cand = 1; static_cast<int>(chosen.size()) < count; ++cand) chosen.insert(cand);
  }
  PseudoGrid g;
  g.lags = lags;
  g.selected.assign(chosen.begin(), chosen.end());
  for (int i = 1; i <= lags; ++i) {
    if (!chosen.count(i)) g.rest.push_back(i);
  }
  return g;
}

Eigen::MatrixXd build_projection(const LinkPrior& prior, const KernelSpec& spec, double dt,
                                 const PseudoGrid& pseudo) {
  const int l = pseudo.lags;
  const int d = pseudo.size();
  const Eigen::MatrixXd k = kernel_matrix(spec, prior.beta, l, dt);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(l, d);
  for (int i = 0; i < d; ++i) proj(pseudo.selected[i] - 1, i) = 1.0;
  if (pseudo.rest.empty()) return proj;

  Eigen::MatrixXd kdd(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) kdd(i, j) = k(pseudo.selected[i] - 1, pseudo.selected[j] - 1);
  }
  add_jitter(kdd);
  Eigen::LLT<Eigen::MatrixXd> llt(kdd);
  if (llt.info() != Eigen::Success) throw NumericError("pseudo-point kernel matrix is not positive definite");
  const int rcount = static_cast<int>(pseudo.rest.size());
  Eigen::MatrixXd kdr(d, rcount);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < rcount; ++j) kdr(i, j) = k(pseudo.selected[i] - 1, pseudo.rest[j] - 1);
  }
  const Eigen::MatrixXd cond = llt.solve(kdr).transpose();  // K^RD (K^DD)^{-1}
  for (int j = 0; j < rcount; ++j) proj.row(pseudo.rest[j] - 1) = cond.row(j);
  return proj;
}

int default_pseudo_points(int lags) { return std::min(lags, 30); }

}  // namespace sdenet
