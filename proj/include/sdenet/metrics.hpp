#pragma once

#include "sdenet/system.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>

namespace sdenet {

struct BinaryMetrics {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int tn = 0;
  std::optional<double> tpr;   // undefined when the truth has no links
  std::optional<double> prec;  // undefined when nothing is predicted
  bool diagonal_excluded = true;
};

struct RankedMetrics {
  double auroc = 0.0;
  double auprec = 0.0;
  bool diagonal_excluded = true;
};

// Throws ArgumentError on shape mismatch.
BinaryMetrics binary_metrics(const Adjacency& predicted, const Adjacency& truth,
                             bool exclude_diagonal = true);

// AUROC by the Mann-Whitney rank statistic (ties averaged) and AUPREC by
// step integration of the precision-recall curve over all distinct
// thresholds. Throws ArgumentError if the truth is all-positive or
// all-negative, or scores are not finite.
RankedMetrics ranked_metrics(const Eigen::MatrixXd& scores, const Adjacency& truth,
                             bool exclude_diagonal = true);

double auroc(std::span<const double> scores, std::span<const bool> labels);
double auprec(std::span<const double> scores, std::span<const bool> labels);

// Kernel-method confidence ||w_ij|| / ||w_i|| from stacked impulse responses
// (p x (blocks * l)); only the first p blocks are scored.
Eigen::MatrixXd norm_ratio_scores(const Eigen::MatrixXd& w, int lags);

}  // namespace sdenet
