#pragma once

#include "sdenet/kernels.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sdenet {

// Pseudo-point subset D of the lag grid {1..l} (1-based lag indices) and its
// complement R, both increasing.
struct PseudoGrid {
  int lags = 0;
  std::vector<int> selected;
  std::vector<int> rest;

  int size() const { return static_cast<int>(selected.size()); }
  bool full() const { return static_cast<int>(selected.size()) == lags; }
};

// Approximately log-spaced lags in {1..l}, always containing 1 and l; rounding
// duplicates are replaced by the smallest unused lags.
PseudoGrid select_pseudo_points(int lags, int count);

// D = P [I; K^{RD} (K^{DD})^{-1}]: maps w^D to the full lag grid via the prior
// conditional mean. l x d. gamma cancels, so only the shape parameters matter.
Eigen::MatrixXd build_projection(const LinkPrior& prior, const KernelSpec& spec, double dt,
                                 const PseudoGrid& pseudo);

// min(l, 30).
int default_pseudo_points(int lags);

}  // namespace sdenet
