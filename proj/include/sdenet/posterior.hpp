#pragma once

#include "sdenet/dsf.hpp"
#include "sdenet/kernels.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/sparse_approx.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace sdenet {

struct ModelConfig {
  double a0 = 1e-3;  // Inverse-Gamma shape for sigma and lambda
  double b0 = 1e-3;  // Inverse-Gamma scale
  double a1 = 1.0;   // rate of the symmetric exponential prior on gamma
  double p_s = 0.1;  // prior link probability
  KernelSpec kernel;
  double filter = 1.0;  // a
  int lags = 0;  // 0 selects default_lags
  int pseudo_points = 0;  // 0 selects default_pseudo_points
  bool known_inputs = false;

  void validate() const;
};

// Row-major p x blocks matrix of link priors. Columns past the node count
// belong to known-input blocks, which are always active.
class LinkMatrix {
 public:
  LinkMatrix() = default;
  LinkMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  LinkPrior& operator()(int r, int j) { return data_[std::size_t(r) * cols_ + j]; }
  const LinkPrior& operator()(int r, int j) const { return data_[std::size_t(r) * cols_ + j]; }
  std::span<LinkPrior> row(int r) { return {data_.data() + std::size_t(r) * cols_, std::size_t(cols_)}; }
  std::span<const LinkPrior> row(int r) const {
    return {data_.data() + std::size_t(r) * cols_, std::size_t(cols_)};
  }
  // Number of active entries among the first `topology_cols` columns.
  int active_count(int topology_cols) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<LinkPrior> data_;
};

// Square-root factors of impulse-response priors. With the full lag grid the
// factor is chol(K); with pseudo-points it is D chol(K^DD), so that F F' is
// the Nystrom covariance used by the sparse likelihood.
class PriorBasis {
 public:
  PriorBasis(KernelSpec spec, int lags, double dt, int pseudo_points = 0);

  // gamma = 1 factor, l x d. Throws NumericError if the jittered kernel
  // matrix is not positive definite.
  Eigen::MatrixXd unit_factor(const ShapeParams& beta) const;
  Eigen::MatrixXd factor(const LinkPrior& prior) const;

  const KernelSpec& kernel() const { return spec_; }
  const PseudoGrid& pseudo() const { return pseudo_; }
  int lags() const { return lags_; }
  double dt() const { return dt_; }
  bool exact() const { return pseudo_.full(); }

 private:
  KernelSpec spec_;
  int lags_;
  double dt_;
  PseudoGrid pseudo_;
};

// Collapsed (w integrated out) terms for one target node, evaluated through
// the inner matrix B = I + (dt/sigma) F' Phi' Phi F over active blocks.
struct NodePosterior {
  int node = 0;
  double sigma = 0.0;
  std::vector<int> active;  // active block indices
  std::vector<Eigen::MatrixXd> factors;  // l x d_b per active block, includes sqrt|gamma|
  std::vector<int> offsets;  // column offset of each active block in the inner system
  Eigen::LLT<Eigen::MatrixXd> inner;
  Eigen::VectorXd projected;  // F' Phi' dY_r
  double log_det_inner = 0.0;
  double quad = 0.0;  // projected' B^{-1} projected
  double log_marginal = 0.0;

  int inner_dim() const { return offsets.empty() ? 0 : offsets.back(); }
};

// block_factors[b] is null for inactive blocks.
NodePosterior factorize_node(const RegressionData& reg, int r,
                             std::span<const Eigen::MatrixXd* const> block_factors, double sigma);

// log N(dY_r; 0, sigma dt I + dt^2 Phi K_r Phi') including the 2*pi constant.
double log_collapsed_marginal(const RegressionData& reg, int r, std::span<const LinkPrior> row,
                              double sigma, const PriorBasis& basis);

// Draw of the stacked w_r (blocks * l) from N(mu_r, Sigma_r); inactive
// blocks are zero.
Eigen::VectorXd sample_w_conditional(const NodePosterior& post, const RegressionData& reg, Rng& rng);

// Posterior mean of w_r, for tests and diagnostics.
Eigen::VectorXd w_conditional_mean(const NodePosterior& post, const RegressionData& reg);

struct InverseGammaParams {
  double shape = 0.0;
  double scale = 0.0;
};

// IG(a0 + N/2, b0 + ||dY_r - dt Phi w_r||^2 / (2 dt)). Throws ArgumentError
// when N = 0.
InverseGammaParams sigma_conditional_params(const RegressionData& reg, int r,
                                            const Eigen::VectorXd& w_r, const ModelConfig& cfg);
double sample_sigma_conditional(const RegressionData& reg, int r, const Eigen::VectorXd& w_r,
                                const ModelConfig& cfg, Rng& rng);

// IG(a0 + pM/2, b0 + sum_q ||z(q) - y(t_kq)||^2 / 2).
InverseGammaParams lambda_conditional_params(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& y_t1,
                                             const ModelConfig& cfg);
double sample_lambda_conditional(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& y_t1,
                                 const ModelConfig& cfg, Rng& rng);

enum class GammaPriorScope { kActiveOnly, kAllLinks };

// sum of -a1 |gamma| over links in scope + N_s log p_s + (p^2 - N_s) log(1 - p_s);
// -inf if any used shape parameter leaves (0,1). Only the first p columns
// count as topology.
double log_prior_hyper(const LinkMatrix& links, const ModelConfig& cfg,
                       GammaPriorScope scope = GammaPriorScope::kActiveOnly);

}  // namespace sdenet
