#pragma once

#include "sdenet/sampler.hpp"
#include "sdenet/system.hpp"

#include <Eigen/Dense>

#include <span>

namespace sdenet {

struct PosteriorSummary {
  int nodes = 0;
  int blocks = 0;
  int lags = 0;
  KernelSpec kernel;
  std::int64_t retained = 0;
  Eigen::MatrixXd link_prob;  // p x p
  Adjacency s_map;            // most frequent full topology among retained draws
  double map_frequency = 0.0;
  Adjacency s_threshold;      // link_prob > 0.5
  // Means over retained draws in which the link is active; NaN if never active.
  Eigen::MatrixXd gamma_mean;  // p x blocks
  Eigen::MatrixXd beta1_mean;
  Eigen::MatrixXd beta2_mean;
  Eigen::MatrixXd w_mean;  // p x (blocks * l), inactive draws contribute zeros
  Eigen::MatrixXd y_mean;  // (N+1) x p, empty if trajectories were not tracked
  Eigen::VectorXd sigma_mean;
  double lambda_mean = 0.0;
  AcceptanceStats stats;
};

// Discards the first floor(S/2) of S draws and reduces the rest. Throws
// ArgumentError when nothing is retained.
PosteriorSummary summarize(const ChainSamples& samples);
// Pools the retained draws of several chains.
PosteriorSummary summarize(std::span<const ChainSamples> chains);

}  // namespace sdenet
