#include "sdenet/sampler.hpp"

#include "sdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace sdenet {

namespace {

constexpr double kLogClamp = 700.0;

double uniform_open(Rng& rng) {
  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  return u;
}

}  // namespace

void SamplerConfig::validate() const {
  if (k_max < 0) throw ConfigError("k_max must be non-negative");
  if (!(eps_traj > 0.0 && eps_traj <= 1.0)) throw ConfigError("eps_traj must lie in (0,1]");
  if (!(eps_gamma > 0.0)) throw ConfigError("eps_gamma must be positive");
  if (!(beta_window > 0.0 && beta_window <= 1.0)) throw ConfigError("beta_window must lie in (0,1]");
  if (!(p_switch >= 0.0 && p_switch <= 1.0)) throw ConfigError("p_switch must lie in [0,1]");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (chain < 0) throw ConfigError("chain index must be non-negative");
}

// ---------------------------------------------------------------------------
// Brownian-bridge reference and trajectory proposals

Eigen::VectorXd bridge_mean(double start, double end, int intervals) {
  Eigen::VectorXd m(std::max(intervals - 1, 0));
  for (int i = 1; i < intervals; ++i) m(i - 1) = start + (end - start) * i / intervals;
  return m;
}

Eigen::MatrixXd bridge_covariance(int intervals) {
  const int k = std::max(intervals - 1, 0);
  Eigen::MatrixXd c(k, k);
  for (int p = 1; p <= k; ++p) {
    for (int q = p; q <= k; ++q) {
      const double v = static_cast<double>(p) * (intervals - q) / intervals;
      c(p - 1, q - 1) = v;
      c(q - 1, p - 1) = v;
    }
  }
  return c;
}

namespace {

class BridgeFactors {
 public:
  const Eigen::MatrixXd& lower(int intervals) {
    auto it = cache_.find(intervals);
    if (it == cache_.end()) {
      Eigen::MatrixXd l = bridge_covariance(intervals).llt().matrixL();
      it = cache_.emplace(intervals, std::move(l)).first;
    }
    return it->second;
  }
  const Eigen::LLT<Eigen::MatrixXd>& llt(int intervals) {
    auto it = llt_.find(intervals);
    if (it == llt_.end()) it = llt_.emplace(intervals, bridge_covariance(intervals).llt()).first;
    return it->second;
  }

 private:
  std::map<int, Eigen::MatrixXd> cache_;
  std::map<int, Eigen::LLT<Eigen::MatrixXd>> llt_;
};

void check_trajectory(const Eigen::MatrixXd& y, const Eigen::VectorXd& sigma, const FineGrid& grid) {
  if (y.rows() != grid.num_points()) throw ArgumentError("trajectory rows do not match the grid");
  if (sigma.size() != y.cols()) throw ArgumentError("sigma has wrong length");
}

}  // namespace

Eigen::MatrixXd propose_trajectories(const Eigen::MatrixXd& y, const Eigen::MatrixXd& Z, double lambda,
                                     const Eigen::VectorXd& sigma, const FineGrid& grid, double eps,
                                     Rng& rng) {
  check_trajectory(y, sigma, grid);
  if (Z.rows() != grid.num_measurements() || Z.cols() != y.cols()) throw ArgumentError("Z does not match the grid");
  const double rho = std::sqrt(std::max(0.0, 1.0 - eps * eps));
  const int p = static_cast<int>(y.cols());
  Eigen::MatrixXd out = y;
  const double sl = eps * std::sqrt(lambda);
  for (int q = 0; q < grid.num_measurements(); ++q) {
    const int k = grid.measurement_index[q];
    for (int r = 0; r < p; ++r) out(k, r) = Z(q, r) + rho * (y(k, r) - Z(q, r)) + sl * rng.normal();
  }
  BridgeFactors bridges;
  for (int j = 0; j < grid.num_segments(); ++j) {
    const int n = grid.segment_lengths[j];
    if (n < 2) continue;
    const int k0 = grid.measurement_index[j];
    const int k1 = grid.measurement_index[j + 1];
    const Eigen::MatrixXd& chol = bridges.lower(n);
    Eigen::VectorXd xi(n - 1);
    for (int r = 0; r < p; ++r) {
      const Eigen::VectorXd mk = bridge_mean(y(k0, r), y(k1, r), n);
      const Eigen::VectorXd mp = bridge_mean(out(k0, r), out(k1, r), n);
      for (int i = 0; i < n - 1; ++i) xi(i) = rng.normal();
      const Eigen::VectorXd noise = eps * std::sqrt(sigma(r) * grid.dt) * (chol * xi);
      out.col(r).segment(k0 + 1, n - 1) = mp + rho * (y.col(r).segment(k0 + 1, n - 1) - mk) + noise;
    }
  }
  return out;
}

Eigen::MatrixXd propose_random_walk(const Eigen::MatrixXd& y, double lambda, const Eigen::VectorXd& sigma,
                                    const FineGrid& grid, double eps, Rng& rng) {
  check_trajectory(y, sigma, grid);
  Eigen::MatrixXd out = y;
  const double sl = eps * std::sqrt(lambda);
  for (int i = 0; i < grid.num_points(); ++i) {
    const bool measured = grid.is_measurement(i);
    for (int r = 0; r < y.cols(); ++r) {
      out(i, r) += (measured ? sl : eps * std::sqrt(sigma(r) * grid.dt)) * rng.normal();
    }
  }
  return out;
}

double pcn_log_density(const Eigen::MatrixXd& to, const Eigen::MatrixXd& from, const Eigen::MatrixXd& Z,
                       double lambda, const Eigen::VectorXd& sigma, const FineGrid& grid, double eps) {
  check_trajectory(from, sigma, grid);
  if (!(eps > 0.0)) throw ArgumentError("proposal density needs eps > 0");
  const double rho = std::sqrt(std::max(0.0, 1.0 - eps * eps));
  const double log2pi = std::log(2.0 * std::numbers::pi);
  const int p = static_cast<int>(from.cols());
  double out = 0.0;
  const double v1 = eps * eps * lambda;
  for (int q = 0; q < grid.num_measurements(); ++q) {
    const int k = grid.measurement_index[q];
    for (int r = 0; r < p; ++r) {
      const double d = to(k, r) - (Z(q, r) + rho * (from(k, r) - Z(q, r)));
      out += -0.5 * (log2pi + std::log(v1) + d * d / v1);
    }
  }
  BridgeFactors bridges;
  for (int j = 0; j < grid.num_segments(); ++j) {
    const int n = grid.segment_lengths[j];
    if (n < 2) continue;
    const int k0 = grid.measurement_index[j];
    const int k1 = grid.measurement_index[j + 1];
    const auto& llt = bridges.llt(n);
    const double logdet_c = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    for (int r = 0; r < p; ++r) {
      const double scale = eps * eps * sigma(r) * grid.dt;
      const Eigen::VectorXd mk = bridge_mean(from(k0, r), from(k1, r), n);
      const Eigen::VectorXd mp = bridge_mean(to(k0, r), to(k1, r), n);
      const Eigen::VectorXd d =
          to.col(r).segment(k0 + 1, n - 1) - (mp + rho * (from.col(r).segment(k0 + 1, n - 1) - mk));
      out += -0.5 * ((n - 1) * (log2pi + std::log(scale)) + logdet_c + d.dot(llt.solve(d)) / scale);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Factor cache

FactorCache::FactorCache(const PriorBasis* basis, int nodes, int blocks)
    : basis_(basis), blocks_(blocks), entries_(std::size_t(nodes) * blocks) {}

const Eigen::MatrixXd* FactorCache::get(int r, int b, const LinkPrior& prior) {
  if (!prior.active) return nullptr;
  auto& slots = entries_[std::size_t(r) * blocks_ + b];
  const int used = basis_->kernel().num_shape_params();
  auto same_beta = [&](const Slot& s) {
    for (int c = 0; c < used; ++c) {
      if (s.beta[c] != prior.beta[c]) return false;
    }
    return true;
  };
  Slot* hit = nullptr;
  for (auto& s : slots) {
    if (s.valid && same_beta(s)) hit = &s;
  }
  if (!hit) {
    hit = slots[0].used <= slots[1].used ? &slots[0] : &slots[1];
    hit->unit = basis_->unit_factor(prior.beta);
    hit->beta = prior.beta;
    hit->valid = true;
    hit->gamma = std::numeric_limits<double>::quiet_NaN();
  }
  if (!(hit->gamma == prior.gamma)) {
    hit->scaled = std::sqrt(std::abs(prior.gamma)) * hit->unit;
    hit->gamma = prior.gamma;
  }
  hit->used = ++clock_;
  return &hit->scaled;
}

std::vector<const Eigen::MatrixXd*> FactorCache::row(int r, std::span<const LinkPrior> priors) {
  std::vector<const Eigen::MatrixXd*> out(priors.size());
  for (std::size_t b = 0; b < priors.size(); ++b) out[b] = get(r, static_cast<int>(b), priors[b]);
  return out;
}

// ---------------------------------------------------------------------------
// Acceptance ratios

double trajectory_residual_term(const NodePosterior& post, const Eigen::MatrixXd& y, const FineGrid& grid,
                                int r) {
  double incr = 0.0;
  for (int j = 0; j < grid.num_segments(); ++j) {
    const double d = y(grid.measurement_index[j + 1], r) - y(grid.measurement_index[j], r);
    incr += d * d / grid.segment_lengths[j];
  }
  return -0.5 * post.log_det_inner - incr / (2.0 * post.sigma * grid.dt) +
         post.quad / (2.0 * post.sigma * post.sigma);
}

double trajectory_log_ratio(double current_residual, double proposal_residual) {
  return proposal_residual - current_residual;
}

double log_trajectory_target(const NetworkModel& model, const Eigen::MatrixXd& y, const LinkMatrix& links,
                             const Eigen::VectorXd& sigma, double lambda) {
  const RegressionData reg = model.regression(y);
  const Eigen::MatrixXd y1 = measured_rows(y, model.grid());
  const Eigen::MatrixXd& Z = model.data().Z;
  double out = -0.5 * static_cast<double>(Z.size()) * std::log(2.0 * std::numbers::pi * lambda) -
               0.5 * (Z - y1).squaredNorm() / lambda;
  for (int r = 0; r < model.nodes(); ++r) {
    out += log_collapsed_marginal(reg, r, links.row(r), sigma(r), model.basis());
  }
  return out;
}

double switch_log_ratio(const LinkPrior& current, const LinkPrior& proposal, double log_marginal_current,
                        double log_marginal_proposal, const ModelConfig& cfg) {
  const double odds = std::log(cfg.p_s) - std::log1p(-cfg.p_s);
  const double ds = static_cast<double>(proposal.active) - static_cast<double>(current.active);
  return (log_marginal_proposal - log_marginal_current) + ds * odds -
         cfg.a1 * (std::abs(proposal.gamma) - std::abs(current.gamma));
}

double window_density(double theta, double center, double lo, double hi, double eps) {
  double a;
  if (center <= lo + 0.5 * eps) {
    a = lo;
  } else if (center >= hi - 0.5 * eps) {
    a = hi - eps;
  } else {
    a = center - 0.5 * eps;
  }
  return (theta >= a && theta <= a + eps) ? 1.0 / eps : 0.0;
}

double sample_window(double center, double lo, double hi, double eps, Rng& rng) {
  double a;
  if (center <= lo + 0.5 * eps) {
    a = lo;
  } else if (center >= hi - 0.5 * eps) {
    a = hi - eps;
  } else {
    a = center - 0.5 * eps;
  }
  double v = a + eps * rng.uniform();
  while (!(v > lo && v < hi)) v = a + eps * rng.uniform();
  return v;
}

double update_log_ratio(std::span<const LinkPrior> current, std::span<const LinkPrior> proposal,
                        double log_marginal_current, double log_marginal_proposal, const ModelConfig& cfg,
                        int shape_params, double window) {
  if (current.size() != proposal.size()) throw ArgumentError("update rows differ in length");
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double out = log_marginal_proposal - log_marginal_current;
  for (std::size_t b = 0; b < current.size(); ++b) {
    if (!current[b].active) continue;
    out -= cfg.a1 * (std::abs(proposal[b].gamma) - std::abs(current[b].gamma));
    for (int c = 0; c < shape_params; ++c) {
      const double bk = current[b].beta[c];
      const double bp = proposal[b].beta[c];
      if (!(bp > 0.0 && bp < 1.0)) return neg_inf;
      const double forward = window_density(bp, bk, 0.0, 1.0, window);
      const double reverse = window_density(bk, bp, 0.0, 1.0, window);
      if (forward == 0.0 || reverse == 0.0) return neg_inf;
      out += std::log(reverse) - std::log(forward);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Topology and hyperparameter moves

namespace {

// Factorizes a proposal; a failed factorization counts as a rejection.
std::optional<NodePosterior> try_factorize(const RegressionData& reg, int r, std::span<const LinkPrior> row,
                                           double sigma, FactorCache& cache) {
  try {
    const auto factors = cache.row(r, row);
    return factorize_node(reg, r, factors, sigma);
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

}  // namespace

MoveOutcome switch_move(int r, std::span<LinkPrior> row, NodePosterior& current, const RegressionData& reg,
                        const NetworkModel& model, const SamplerConfig& cfg, FactorCache& cache, Rng& rng) {
  const int p = model.nodes();
  std::vector<int> candidates;
  for (int j = 0; j < p; ++j) {
    if (!(cfg.pin_diagonal && j == r)) candidates.push_back(j);
  }
  MoveOutcome out;
  if (candidates.empty()) return out;
  const int j = candidates[rng.index(candidates.size())];
  out.link = j;

  std::vector<LinkPrior> proposal(row.begin(), row.end());
  LinkPrior& lp = proposal[j];
  lp.active = !lp.active;
  if (cfg.switch_resamples_hyper) {
    lp.gamma = rng.normal(row[j].gamma, cfg.eps_gamma);
    for (int c = 0; c < model.config().kernel.num_shape_params(); ++c) lp.beta[c] = uniform_open(rng);
  }
  auto post = try_factorize(reg, r, proposal, current.sigma, cache);
  const double log_u = std::log(rng.uniform());
  if (!post) {
    out.log_ratio = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_ratio = switch_log_ratio(row[j], lp, current.log_marginal, post->log_marginal, model.config());
  out.accepted = !std::isnan(out.log_ratio) && log_u < std::clamp(out.log_ratio, -kLogClamp, kLogClamp);
  if (out.accepted) {
    row[j] = lp;
    current = std::move(*post);
  }
  return out;
}

MoveOutcome update_move(int r, std::span<LinkPrior> row, NodePosterior& current, const RegressionData& reg,
                        const NetworkModel& model, const SamplerConfig& cfg, FactorCache& cache, Rng& rng) {
  MoveOutcome out;
  const int shape = model.config().kernel.num_shape_params();
  std::vector<LinkPrior> proposal(row.begin(), row.end());
  bool any = false;
  for (auto& lp : proposal) {
    if (!lp.active) continue;
    any = true;
    lp.gamma += cfg.eps_gamma * rng.normal();
    for (int c = 0; c < shape; ++c) lp.beta[c] = sample_window(lp.beta[c], 0.0, 1.0, cfg.beta_window, rng);
  }
  if (!any) {
    out.accepted = true;
    return out;
  }
  auto post = try_factorize(reg, r, proposal, current.sigma, cache);
  const double log_u = std::log(rng.uniform());
  if (!post) {
    out.log_ratio = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_ratio = update_log_ratio(row, proposal, current.log_marginal, post->log_marginal, model.config(),
                                   shape, cfg.beta_window);
  out.accepted = !std::isnan(out.log_ratio) && log_u < std::clamp(out.log_ratio, -kLogClamp, kLogClamp);
  if (out.accepted) {
    std::copy(proposal.begin(), proposal.end(), row.begin());
    current = std::move(*post);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampler

Sampler::Sampler(const NetworkModel& model, SamplerConfig cfg)
    : model_(&model), cfg_(cfg), cache_(&model.basis(), model.nodes(), model.blocks()),
      traj_rng_(cfg.seed, static_cast<std::uint64_t>(cfg.chain), 0) {
  cfg_.validate();
  for (int r = 0; r < model.nodes(); ++r) {
    node_rngs_.emplace_back(cfg.seed, static_cast<std::uint64_t>(cfg.chain), static_cast<std::uint64_t>(r) + 1);
  }
  samples_.nodes = model.nodes();
  samples_.blocks = model.blocks();
  samples_.lags = model.lags();
  samples_.kernel = model.config().kernel;
  const int stored = cfg_.k_max / cfg_.thin + 1;
  samples_.retained_from = stored / 2;
}

namespace {

double diff_variance(const Eigen::MatrixXd& z) {
  if (z.rows() < 3) return 1e-6;
  const Eigen::MatrixXd d = z.bottomRows(z.rows() - 1) - z.topRows(z.rows() - 1);
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / static_cast<double>(d.size() - 1);
  return std::max(var, 1e-6);
}

}  // namespace

void Sampler::initialize() {
  const NetworkModel& m = *model_;
  const int p = m.nodes();
  const int blocks = m.blocks();
  const Eigen::MatrixXd& Z = m.data().Z;
  ChainState start;
  start.Y = m.initial_trajectory();
  start.links = LinkMatrix(p, blocks);
  for (int r = 0; r < p; ++r) {
    for (int b = 0; b < blocks; ++b) {
      LinkPrior& lp = start.links(r, b);
      lp.gamma = 1.0;
      lp.beta = {0.5, 0.5};
      if (b >= p || b == r) {
        lp.active = true;
      } else {
        lp.active = node_rngs_[r].bernoulli(m.config().p_s);
      }
    }
  }
  start.sigma.resize(p);
  for (int r = 0; r < p; ++r) start.sigma(r) = diff_variance(Z.col(r));
  start.lambda = diff_variance(Z);
  initialize(start);
}

void Sampler::initialize(const ChainState& start) {
  const NetworkModel& m = *model_;
  const int p = m.nodes();
  const int blocks = m.blocks();
  if (start.Y.rows() != m.grid().num_points() || start.Y.cols() != p || start.links.rows() != p ||
      start.links.cols() != blocks || start.sigma.size() != p) {
    throw ArgumentError("starting state does not match the model");
  }
  if (!((start.sigma.array() > 0.0).all() && start.lambda > 0.0)) {
    throw ArgumentError("starting sigma and lambda must be positive");
  }
  state_ = start;
  refresh_regression();
  state_.w = Eigen::MatrixXd::Zero(p, blocks * m.lags());
  for (int r = 0; r < p; ++r) state_.w.row(r) = sample_w_conditional(posts_[r], reg_, node_rngs_[r]).transpose();

  samples_.draws.clear();
  samples_.retained_count = 0;
  samples_.w_sum = Eigen::MatrixXd::Zero(p, blocks * m.lags());
  samples_.y_sum = Eigen::MatrixXd::Zero(state_.Y.rows(), p);
  samples_.stats = {};
  window_stats_ = {};
  iteration_ = 0;
  initialized_ = true;
  record();
}

void Sampler::refresh_regression() {
  reg_ = model_->regression(state_.Y);
  posts_.clear();
  for (int r = 0; r < model_->nodes(); ++r) posts_.push_back(factorize(r));
}

NodePosterior Sampler::factorize(int r) {
  const auto factors = cache_.row(r, state_.links.row(r));
  return factorize_node(reg_, r, factors, state_.sigma(r));
}

void Sampler::record() {
  if (iteration_ % cfg_.thin != 0) return;
  Draw d;
  d.iteration = iteration_;
  d.links = state_.links;
  d.sigma = state_.sigma;
  d.lambda = state_.lambda;
  if (cfg_.store_w) d.w = state_.w;
  if (cfg_.store_trajectories) d.Y = state_.Y;
  const int index = static_cast<int>(samples_.draws.size());
  samples_.draws.push_back(std::move(d));
  if (index >= samples_.retained_from) {
    samples_.w_sum += state_.w;
    samples_.y_sum += state_.Y;
    ++samples_.retained_count;
  }
}

void Sampler::trajectory_step() {
  const NetworkModel& m = *model_;
  const FineGrid& grid = m.grid();
  const int p = m.nodes();
  Eigen::MatrixXd prop;
  if (cfg_.proposal == TrajectoryProposal::kPcn) {
    prop = propose_trajectories(state_.Y, m.data().Z, state_.lambda, state_.sigma, grid, cfg_.eps_traj, traj_rng_);
  } else {
    prop = propose_random_walk(state_.Y, state_.lambda, state_.sigma, grid, cfg_.eps_traj, traj_rng_);
  }
  const double log_u = std::log(traj_rng_.uniform());
  ++samples_.stats.trajectory.proposed;
  ++window_stats_.trajectory.proposed;

  RegressionData reg = m.regression(prop);
  std::vector<NodePosterior> posts;
  posts.reserve(p);
  try {
    for (int r = 0; r < p; ++r) {
      const auto factors = cache_.row(r, state_.links.row(r));
      posts.push_back(factorize_node(reg, r, factors, state_.sigma(r)));
    }
  } catch (const NumericError&) {
    ++samples_.stats.numeric_rejections;
    return;
  }
  double log_ratio = 0.0;
  if (cfg_.proposal == TrajectoryProposal::kPcn) {
    for (int r = 0; r < p; ++r) {
      log_ratio += trajectory_log_ratio(trajectory_residual_term(posts_[r], state_.Y, grid, r),
                                        trajectory_residual_term(posts[r], prop, grid, r));
    }
  } else {
    const Eigen::MatrixXd& Z = m.data().Z;
    const double meas_cur = (Z - measured_rows(state_.Y, grid)).squaredNorm();
    const double meas_prop = (Z - measured_rows(prop, grid)).squaredNorm();
    log_ratio = -0.5 * (meas_prop - meas_cur) / state_.lambda;
    for (int r = 0; r < p; ++r) log_ratio += posts[r].log_marginal - posts_[r].log_marginal;
  }
  if (!std::isnan(log_ratio) && log_u < std::clamp(log_ratio, -kLogClamp, kLogClamp)) {
    state_.Y = std::move(prop);
    reg_ = std::move(reg);
    posts_ = std::move(posts);
    ++samples_.stats.trajectory.accepted;
    ++window_stats_.trajectory.accepted;
  }
}

void Sampler::node_step(int r) {
  const NetworkModel& m = *model_;
  Rng& rng = node_rngs_[r];
  auto row = state_.links.row(r);
  if (cfg_.sample_hyper) {
    const double u = rng.uniform();
    if (u <= cfg_.p_switch) {
      const MoveOutcome o = switch_move(r, row, posts_[r], reg_, m, cfg_, cache_, rng);
      if (o.link >= 0) {
        ++samples_.stats.switch_move.proposed;
        samples_.stats.switch_move.accepted += o.accepted;
        if (std::isinf(o.log_ratio) && o.log_ratio < 0) ++samples_.stats.numeric_rejections;
      }
    } else {
      const MoveOutcome o = update_move(r, row, posts_[r], reg_, m, cfg_, cache_, rng);
      ++samples_.stats.update_move.proposed;
      ++window_stats_.update_move.proposed;
      samples_.stats.update_move.accepted += o.accepted;
      window_stats_.update_move.accepted += o.accepted;
    }
  }
  if (cfg_.sample_w) {
    state_.w.row(r) = sample_w_conditional(posts_[r], reg_, rng).transpose();
  } else {
    // Keep w consistent with the topology when it is not resampled.
    for (int b = 0; b < m.blocks(); ++b) {
      if (!row[b].active) state_.w.row(r).segment(b * m.lags(), m.lags()).setZero();
    }
  }
  if (cfg_.sample_sigma) {
    state_.sigma(r) = sample_sigma_conditional(reg_, r, state_.w.row(r).transpose(), m.config(), rng);
    posts_[r] = factorize(r);
  }
}

void Sampler::adapt() {
  constexpr int kWindow = 50;
  if (!cfg_.adapt_steps || iteration_ % kWindow != 0) return;
  const std::int64_t burn_in = static_cast<std::int64_t>(samples_.retained_from) * cfg_.thin;
  if (iteration_ > burn_in) return;
  auto tune = [](double& eps, const MoveStats& s, double cap) {
    if (!s.proposed) return;
    eps = s.rate() > 0.25 ? std::min(eps * 1.05, cap) : eps / 1.05;
  };
  tune(cfg_.eps_traj, window_stats_.trajectory, 1.0);
  tune(cfg_.eps_gamma, window_stats_.update_move, std::numeric_limits<double>::infinity());
  window_stats_ = {};
}

void Sampler::step() {
  if (!initialized_) initialize();
  if (finished()) return;
  try {
    if (cfg_.sample_trajectories) trajectory_step();
    for (int r = 0; r < model_->nodes(); ++r) node_step(r);
    if (cfg_.sample_lambda) {
      state_.lambda =
          sample_lambda_conditional(model_->data().Z, measured_rows(state_.Y, model_->grid()), model_->config(),
                                    traj_rng_);
    }
  } catch (const NumericError& e) {
    throw NumericError("iteration " + std::to_string(iteration_ + 1) + ": " + e.what());
  }
  ++iteration_;
  adapt();
  record();
}

ChainSamples Sampler::run(const RunHooks& hooks) {
  if (!initialized_) initialize();
  while (!finished()) {
    if (hooks.stop_after && iteration_ >= *hooks.stop_after) break;
    step();
    if (hooks.progress && hooks.progress_every > 0 && iteration_ % hooks.progress_every == 0) {
      hooks.progress({iteration_, cfg_.k_max, &samples_.stats});
    }
    if (hooks.checkpoint_path && hooks.checkpoint_every > 0 && iteration_ % hooks.checkpoint_every == 0) {
      save_checkpoint(*hooks.checkpoint_path);
    }
  }
  if (hooks.checkpoint_path) save_checkpoint(*hooks.checkpoint_path);
  return samples_;
}

// ---------------------------------------------------------------------------
// Binary checkpoint

namespace {

constexpr char kMagic[8] = {'S', 'D', 'N', 'C', 'K', 'P', 'T', '1'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void pod(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void mat(const Eigen::MatrixXd& m) {
    pod<std::int64_t>(m.rows());
    pod<std::int64_t>(m.cols());
    os_.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  }
  void vec(const Eigen::VectorXd& v) { mat(v); }
  void links(const LinkMatrix& l) {
    pod<std::int32_t>(l.rows());
    pod<std::int32_t>(l.cols());
    for (int r = 0; r < l.rows(); ++r) {
      for (const auto& lp : l.row(r)) {
        pod<std::uint8_t>(lp.active);
        pod(lp.gamma);
        pod(lp.beta[0]);
        pod(lp.beta[1]);
      }
    }
  }
  void stats(const MoveStats& s) {
    pod(s.proposed);
    pod(s.accepted);
  }
  void stats(const AcceptanceStats& s) {
    stats(s.trajectory);
    stats(s.switch_move);
    stats(s.update_move);
    pod(s.numeric_rejections);
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  template <class T>
  T pod() {
    T v;
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is_) throw DataError("truncated checkpoint");
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    if (n > (1u << 26)) throw DataError("corrupt checkpoint string");
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    if (!is_) throw DataError("truncated checkpoint");
    return s;
  }
  Eigen::MatrixXd mat() {
    const auto rows = pod<std::int64_t>();
    const auto cols = pod<std::int64_t>();
    if (rows < 0 || cols < 0 || rows * cols > (std::int64_t(1) << 31)) throw DataError("corrupt checkpoint matrix");
    Eigen::MatrixXd m(rows, cols);
    is_.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!is_) throw DataError("truncated checkpoint");
    return m;
  }
  Eigen::VectorXd vec() {
    Eigen::MatrixXd m = mat();
    if (m.cols() != 1 && m.size() != 0) throw DataError("corrupt checkpoint vector");
    return Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
  }
  LinkMatrix links() {
    const auto rows = pod<std::int32_t>();
    const auto cols = pod<std::int32_t>();
    if (rows < 0 || cols < 0 || rows > 100000 || cols > 100000) throw DataError("corrupt checkpoint links");
    LinkMatrix l(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (auto& lp : l.row(r)) {
        lp.active = pod<std::uint8_t>() != 0;
        lp.gamma = pod<double>();
        lp.beta[0] = pod<double>();
        lp.beta[1] = pod<double>();
      }
    }
    return l;
  }
  MoveStats move_stats() {
    MoveStats s;
    s.proposed = pod<std::int64_t>();
    s.accepted = pod<std::int64_t>();
    return s;
  }
  AcceptanceStats stats() {
    AcceptanceStats s;
    s.trajectory = move_stats();
    s.switch_move = move_stats();
    s.update_move = move_stats();
    s.numeric_rejections = pod<std::int64_t>();
    return s;
  }

 private:
  std::istream& is_;
};

void write_config(Writer& w, const SamplerConfig& c) {
  w.pod(c.k_max);
  w.pod(c.eps_traj);
  w.pod(c.eps_gamma);
  w.pod(c.beta_window);
  w.pod(c.p_switch);
  w.pod(c.seed);
  w.pod(c.chain);
  w.pod(c.thin);
  w.pod(static_cast<std::int32_t>(c.proposal));
  for (bool b : {c.pin_diagonal, c.adapt_steps, c.sample_trajectories, c.sample_hyper, c.switch_resamples_hyper,
                 c.sample_w, c.sample_sigma, c.sample_lambda, c.store_w, c.store_trajectories}) {
    w.pod<std::uint8_t>(b);
  }
}

SamplerConfig read_config(Reader& r) {
  SamplerConfig c;
  c.k_max = r.pod<int>();
  c.eps_traj = r.pod<double>();
  c.eps_gamma = r.pod<double>();
  c.beta_window = r.pod<double>();
  c.p_switch = r.pod<double>();
  c.seed = r.pod<std::uint64_t>();
  c.chain = r.pod<int>();
  c.thin = r.pod<int>();
  c.proposal = static_cast<TrajectoryProposal>(r.pod<std::int32_t>());
  bool* flags[] = {&c.pin_diagonal, &c.adapt_steps, &c.sample_trajectories, &c.sample_hyper,
                   &c.switch_resamples_hyper, &c.sample_w, &c.sample_sigma, &c.sample_lambda,
                   &c.store_w, &c.store_trajectories};
  for (bool* f : flags) *f = r.pod<std::uint8_t>() != 0;
  return c;
}

}  // namespace

void Sampler::save_checkpoint(const std::filesystem::path& path) const {
  if (!initialized_) throw ArgumentError("cannot checkpoint an uninitialized sampler");
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write checkpoint " + tmp.string());
    Writer w(os);
    os.write(kMagic, sizeof(kMagic));
    w.pod<std::int32_t>(model_->nodes());
    w.pod<std::int32_t>(model_->blocks());
    w.pod<std::int32_t>(model_->lags());
    w.pod<std::int32_t>(model_->grid().intervals);
    w.pod(model_->data().Z.sum());
    write_config(w, cfg_);
    w.pod(iteration_);
    w.mat(state_.Y);
    w.links(state_.links);
    w.mat(state_.w);
    w.vec(state_.sigma);
    w.pod(state_.lambda);
    w.str(traj_rng_.serialize());
    w.pod<std::uint64_t>(node_rngs_.size());
    for (const auto& rng : node_rngs_) w.str(rng.serialize());
    w.stats(window_stats_);
    w.pod(samples_.retained_from);
    w.pod(samples_.retained_count);
    w.mat(samples_.w_sum);
    w.mat(samples_.y_sum);
    w.stats(samples_.stats);
    w.pod<std::uint64_t>(samples_.draws.size());
    for (const Draw& d : samples_.draws) {
      w.pod(d.iteration);
      w.links(d.links);
      w.vec(d.sigma);
      w.pod(d.lambda);
      w.mat(d.w);
      w.mat(d.Y);
    }
    if (!os) throw DataError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Sampler Sampler::resume(const NetworkModel& model, const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw DataError("not a checkpoint file: " + path.string());
  Reader r(is);
  const auto nodes = r.pod<std::int32_t>();
  const auto blocks = r.pod<std::int32_t>();
  const auto lags = r.pod<std::int32_t>();
  const auto intervals = r.pod<std::int32_t>();
  const double zsum = r.pod<double>();
  if (nodes != model.nodes() || blocks != model.blocks() || lags != model.lags() ||
      intervals != model.grid().intervals || zsum != model.data().Z.sum()) {
    throw DataError("checkpoint does not match the dataset/model configuration");
  }
  const SamplerConfig cfg = read_config(r);
  Sampler s(model, cfg);
  s.iteration_ = r.pod<int>();
  s.state_.Y = r.mat();
  s.state_.links = r.links();
  s.state_.w = r.mat();
  s.state_.sigma = r.vec();
  s.state_.lambda = r.pod<double>();
  s.traj_rng_.deserialize(r.str());
  const auto nrng = r.pod<std::uint64_t>();
  if (nrng != s.node_rngs_.size()) throw DataError("checkpoint RNG count mismatch");
  for (auto& rng : s.node_rngs_) rng.deserialize(r.str());
  s.window_stats_ = r.stats();
  s.samples_.retained_from = r.pod<int>();
  s.samples_.retained_count = r.pod<std::int64_t>();
  s.samples_.w_sum = r.mat();
  s.samples_.y_sum = r.mat();
  s.samples_.stats = r.stats();
  const auto ndraws = r.pod<std::uint64_t>();
  s.samples_.draws.clear();
  s.samples_.draws.reserve(ndraws);
  for (std::uint64_t i = 0; i < ndraws; ++i) {
    Draw d;
    d.iteration = r.pod<int>();
    d.links = r.links();
    d.sigma = r.vec();
    d.lambda = r.pod<double>();
    d.w = r.mat();
    d.Y = r.mat();
    s.samples_.draws.push_back(std::move(d));
  }
  if (s.state_.Y.rows() != model.grid().num_points() || s.state_.Y.cols() != model.nodes()) {
    throw DataError("checkpoint trajectory does not match the grid");
  }
  s.initialized_ = true;
  s.refresh_regression();
  return s;
}

ChainSamples run_chain(const NetworkModel& model, const SamplerConfig& cfg, const RunHooks& hooks) {
  Sampler sampler(model, cfg);
  return sampler.run(hooks);
}

}  // namespace sdenet
