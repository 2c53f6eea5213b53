#pragma once

#include "sdenet/model.hpp"
#include "sdenet/posterior.hpp"
#include "sdenet/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sdenet {

enum class TrajectoryProposal {
  kPcn,         // AR(1) proposal around the measurement / Brownian-bridge reference
  kRandomWalk,  // centred Gaussian random walk (ablation only)
};

struct SamplerConfig {
  int k_max = 1000;
  double eps_traj = 0.2;
  double eps_gamma = 0.3;
  double beta_window = 0.1;
  double p_switch = 0.6;  // P_U = 1 - P_S
  std::uint64_t seed = 1;
  int chain = 0;
  int thin = 1;
  bool pin_diagonal = false;
  TrajectoryProposal proposal = TrajectoryProposal::kPcn;
  // Burn-in only: scale eps_traj and eps_gamma by 1.05 toward 25% acceptance.
  bool adapt_steps = false;

  // Block switches; all on for the full sampler.
  bool sample_trajectories = true;
  bool sample_hyper = true;
  bool switch_resamples_hyper = true;  // off: switch moves toggle s only
  bool sample_w = true;
  bool sample_sigma = true;
  bool sample_lambda = true;

  bool store_w = true;
  bool store_trajectories = false;

  void validate() const;
};

// One state of the chain. Trajectories live on the whole fine grid; the T1
// and T2 parts are views through the grid index maps.
struct ChainState {
  Eigen::MatrixXd Y;  // (N+1) x p
  LinkMatrix links;   // p x blocks
  Eigen::MatrixXd w;  // p x (blocks * l), row r stacks w_r
  Eigen::VectorXd sigma;
  double lambda = 0.0;
};

struct MoveStats {
  std::int64_t proposed = 0;
  std::int64_t accepted = 0;
  double rate() const { return proposed ? double(accepted) / double(proposed) : 0.0; }
};

struct AcceptanceStats {
  MoveStats trajectory;
  MoveStats switch_move;
  MoveStats update_move;
  std::int64_t numeric_rejections = 0;  // proposals rejected because a factorization failed
};

struct Draw {
  int iteration = 0;
  LinkMatrix links;
  Eigen::VectorXd sigma;
  double lambda = 0.0;
  Eigen::MatrixXd w;  // empty unless store_w
  Eigen::MatrixXd Y;  // empty unless store_trajectories
};

// Draws in iteration order (index 0 is the initial state) plus running sums
// of w and Y over the retained second half, so that means are available
// without storing every trajectory.
struct ChainSamples {
  int nodes = 0;
  int blocks = 0;
  int lags = 0;
  KernelSpec kernel;
  std::vector<Draw> draws;
  int retained_from = 0;  // first retained draw index, fixed before sampling
  std::int64_t retained_count = 0;
  Eigen::MatrixXd w_sum;
  Eigen::MatrixXd y_sum;
  AcceptanceStats stats;
};

// Brownian-bridge reference of one segment with n intervals: mean
// y0 + i/n (y1 - y0) and covariance [C]_pq = p (n - q) / n for p <= q.
Eigen::VectorXd bridge_mean(double start, double end, int intervals);
Eigen::MatrixXd bridge_covariance(int intervals);

// pCN proposal: T1 values around Z with variance lambda, T2 segments around
// the bridge reference with covariance sigma_r dt C_j.
Eigen::MatrixXd propose_trajectories(const Eigen::MatrixXd& y, const Eigen::MatrixXd& Z,
                                     double lambda, const Eigen::VectorXd& sigma,
                                     const FineGrid& grid, double eps, Rng& rng);

// Plain random walk with per-point scales eps*sqrt(lambda) at T1 and
// eps*sqrt(sigma_r dt) at T2.
Eigen::MatrixXd propose_random_walk(const Eigen::MatrixXd& y, double lambda,
                                    const Eigen::VectorXd& sigma, const FineGrid& grid,
                                    double eps, Rng& rng);

// log q(to | from) of the pCN proposal. Used to check the acceptance ratio.
double pcn_log_density(const Eigen::MatrixXd& to, const Eigen::MatrixXd& from,
                       const Eigen::MatrixXd& Z, double lambda, const Eigen::VectorXd& sigma,
                       const FineGrid& grid, double eps);

// Supplies the prior factor of block b of node r (null when inactive).
class FactorCache {
 public:
  FactorCache() = default;
  FactorCache(const PriorBasis* basis, int nodes, int blocks);

  // Scaled factor sqrt|gamma| * unit_factor(beta); null if !prior.active.
  const Eigen::MatrixXd* get(int r, int b, const LinkPrior& prior);
  std::vector<const Eigen::MatrixXd*> row(int r, std::span<const LinkPrior> priors);

 private:
  // Two slots per link so that a rejected proposal does not evict the
  // factor of the current state.
  struct Slot {
    bool valid = false;
    ShapeParams beta{-1.0, -1.0};
    double gamma = 0.0;
    std::uint64_t used = 0;
    Eigen::MatrixXd unit;
    Eigen::MatrixXd scaled;
  };
  const PriorBasis* basis_ = nullptr;
  int blocks_ = 0;
  std::uint64_t clock_ = 0;
  std::vector<std::array<Slot, 2>> entries_;
};

// State-dependent part of the pCN trajectory acceptance ratio for node r:
// -1/2 log|B_r| - (1/(2 sigma_r dt)) dY_T1' Nbar^{-1} dY_T1 + quad_r / (2 sigma_r^2).
double trajectory_residual_term(const NodePosterior& post, const Eigen::MatrixXd& y,
                                const FineGrid& grid, int r);

// log r of the pCN move from `current` to `proposal`; both are sums of
// trajectory_residual_term over nodes.
double trajectory_log_ratio(double current_residual, double proposal_residual);

// Full log density of the trajectory target: Gaussian measurement term plus
// the collapsed marginals of all nodes.
double log_trajectory_target(const NetworkModel& model, const Eigen::MatrixXd& y,
                             const LinkMatrix& links, const Eigen::VectorXd& sigma, double lambda);

// log r_S for toggling one link: collapsed-marginal difference, prior odds
// (p_s/(1-p_s))^{s_p - s_k} and exp(-a1(|gamma_p| - |gamma_k|)).
double switch_log_ratio(const LinkPrior& current, const LinkPrior& proposal,
                        double log_marginal_current, double log_marginal_proposal,
                        const ModelConfig& cfg);

// Windowed uniform proposal p_U(theta; center, lo, hi, eps).
double window_density(double theta, double center, double lo, double hi, double eps);
double sample_window(double center, double lo, double hi, double eps, Rng& rng);

// log r_U over all active links of a row, including the proposal-density
// ratio of the windowed beta proposal (0 or -inf off the interior).
double update_log_ratio(std::span<const LinkPrior> current, std::span<const LinkPrior> proposal,
                        double log_marginal_current, double log_marginal_proposal,
                        const ModelConfig& cfg, int shape_params, double window);

struct MoveOutcome {
  bool accepted = false;
  double log_ratio = 0.0;
  int link = -1;  // switched link, -1 for update moves
};

// Switch move on row r. `current` is the factorized node at the current row
// and is replaced by the proposal's factorization on acceptance.
MoveOutcome switch_move(int r, std::span<LinkPrior> row, NodePosterior& current,
                        const RegressionData& reg, const NetworkModel& model,
                        const SamplerConfig& cfg, FactorCache& cache, Rng& rng);

MoveOutcome update_move(int r, std::span<LinkPrior> row, NodePosterior& current,
                        const RegressionData& reg, const NetworkModel& model,
                        const SamplerConfig& cfg, FactorCache& cache, Rng& rng);

struct ProgressInfo {
  int iteration = 0;
  int k_max = 0;
  const AcceptanceStats* stats = nullptr;
};

struct RunHooks {
  std::function<void(const ProgressInfo&)> progress;
  int progress_every = 0;
  std::optional<std::filesystem::path> checkpoint_path;
  int checkpoint_every = 0;  // 0: only on stop / completion
  std::optional<int> stop_after;  // stop (and checkpoint) after this many iterations
};

// MH-within-PCG sampler. Per iteration: trajectories, then for every node a
// switch or update move followed by Gibbs draws of w_r and sigma_r, then
// lambda.
class Sampler {
 public:
  Sampler(const NetworkModel& model, SamplerConfig cfg);

  // Default starting state: interpolated measurements, self-links on,
  // off-diagonal links Bernoulli(p_s), data-scaled sigma and lambda.
  void initialize();
  // Starts from a caller-supplied state (links, Y, sigma, lambda); w is drawn
  // from its conditional.
  void initialize(const ChainState& start);
  void step();
  // Runs until k_max (or hooks.stop_after) and returns the stored samples.
  ChainSamples run(const RunHooks& hooks = {});

  const ChainState& state() const { return state_; }
  const ChainSamples& samples() const { return samples_; }
  int iteration() const { return iteration_; }
  bool finished() const { return iteration_ >= cfg_.k_max; }
  const SamplerConfig& config() const { return cfg_; }

  void save_checkpoint(const std::filesystem::path& path) const;
  // Restores state, RNG streams and stored samples; the model must match.
  static Sampler resume(const NetworkModel& model, const std::filesystem::path& path);

 private:
  void record();
  void refresh_regression();
  NodePosterior factorize(int r);
  void trajectory_step();
  void node_step(int r);
  void adapt();

  const NetworkModel* model_;
  SamplerConfig cfg_;
  ChainState state_;
  ChainSamples samples_;
  RegressionData reg_;
  std::vector<NodePosterior> posts_;
  FactorCache cache_;
  Rng traj_rng_;
  std::vector<Rng> node_rngs_;
  int iteration_ = 0;
  bool initialized_ = false;
  AcceptanceStats window_stats_;
};

ChainSamples run_chain(const NetworkModel& model, const SamplerConfig& cfg,
                       const RunHooks& hooks = {});

}  // namespace sdenet
