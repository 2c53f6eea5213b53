#include "sdenet/posterior.hpp"

#include "sdenet/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sdenet {

void ModelConfig::validate() const {
  if (!(a0 > 0.0 && b0 > 0.0)) throw ConfigError("a0 and b0 must be positive");
  if (!(a1 > 0.0)) throw ConfigError("a1 must be positive");
  if (!(p_s > 0.0 && p_s < 1.0)) throw ConfigError("p_s must lie in (0,1)");
  if (!std::isfinite(filter) || filter < 0.0) throw ConfigError("filter constant must be finite and non-negative");
  if (lags < 0) throw ConfigError("lags must be non-negative (0 selects the default)");
  if (pseudo_points < 0) throw ConfigError("pseudo_points must be non-negative (0 selects the default)");
}

int LinkMatrix::active_count(int topology_cols) const {
  int n = 0;
  for (int r = 0; r < rows_; ++r) {
    for (int j = 0; j < topology_cols; ++j) n += (*this)(r, j).active;
  }
  return n;
}

PriorBasis::PriorBasis(KernelSpec spec, int lags, double dt, int pseudo_points)
    : spec_(spec), lags_(lags), dt_(dt),
      pseudo_(select_pseudo_points(lags, pseudo_points > 0 ? pseudo_points : lags)) {}

Eigen::MatrixXd PriorBasis::unit_factor(const ShapeParams& beta) const {
  if (exact()) {
    Eigen::MatrixXd k = kernel_matrix(spec_, beta, lags_, dt_);
    add_jitter(k);
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) throw NumericError("kernel matrix is not positive definite after jitter");
    return llt.matrixL();
  }
  const int d = pseudo_.size();
  Eigen::MatrixXd kdd(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = kernel_eval(spec_, pseudo_.selected[i] * dt_, pseudo_.selected[j] * dt_, beta);
      kdd(i, j) = v;
      kdd(j, i) = v;
    }
  }
  add_jitter(kdd);
  Eigen::LLT<Eigen::MatrixXd> llt(kdd);
  if (llt.info() != Eigen::Success) throw NumericError("pseudo-point kernel matrix is not positive definite");
  LinkPrior unit;
  unit.active = true;
  unit.beta = beta;
  return build_projection(unit, spec_, dt_, pseudo_) * Eigen::MatrixXd(llt.matrixL());
}

Eigen::MatrixXd PriorBasis::factor(const LinkPrior& prior) const {
  return std::sqrt(std::abs(prior.gamma)) * unit_factor(prior.beta);
}

NodePosterior factorize_node(const RegressionData& reg, int r,
                             std::span<const Eigen::MatrixXd* const> block_factors, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("process-noise variance must be positive");
  if (static_cast<int>(block_factors.size()) != reg.blocks()) {
    throw ArgumentError("factor list does not match the regression block count");
  }
  const int l = reg.lags;
  const double dt = reg.dt;
  NodePosterior post;
  post.node = r;
  post.sigma = sigma;
  post.offsets.push_back(0);
  for (int b = 0; b < reg.blocks(); ++b) {
    if (!block_factors[b]) continue;
    post.active.push_back(b);
    post.factors.push_back(*block_factors[b]);
    post.offsets.push_back(post.offsets.back() + static_cast<int>(block_factors[b]->cols()));
  }
  const int dim = post.inner_dim();
  const int na = static_cast<int>(post.active.size());

  Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(dim, dim);
  post.projected.resize(dim);
  const double scale = dt / sigma;
  for (int a = 0; a < na; ++a) {
    const Eigen::MatrixXd& fa = post.factors[a];
    const int ba = post.active[a];
    post.projected.segment(post.offsets[a], fa.cols()).noalias() =
        fa.transpose() * reg.phi_t_dy.block(ba * l, r, l, 1);
    for (int c = a; c < na; ++c) {
      const Eigen::MatrixXd& fc = post.factors[c];
      const Eigen::MatrixXd gf = reg.gram.block(ba * l, post.active[c] * l, l, l) * fc;
      Eigen::MatrixXd blk = scale * (fa.transpose() * gf);
      inner.block(post.offsets[a], post.offsets[c], fa.cols(), fc.cols()) += blk;
      if (c != a) inner.block(post.offsets[c], post.offsets[a], fc.cols(), fa.cols()) += blk.transpose();
    }
  }
  post.inner.compute(inner);
  if (post.inner.info() != Eigen::Success) {
    throw NumericError("inner matrix of node " + std::to_string(r) + " is not positive definite");
  }
  post.log_det_inner = 2.0 * post.inner.matrixLLT().diagonal().array().log().sum();
  post.quad = dim ? post.projected.dot(post.inner.solve(post.projected)) : 0.0;
  const double n = reg.rows();
  post.log_marginal = -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma * dt) + post.log_det_inner) -
                      reg.dy_sq(r) / (2.0 * sigma * dt) + post.quad / (2.0 * sigma * sigma);
  return post;
}

double log_collapsed_marginal(const RegressionData& reg, int r, std::span<const LinkPrior> row,
                              double sigma, const PriorBasis& basis) {
  if (static_cast<int>(row.size()) != reg.blocks()) throw ArgumentError("link row does not match the regression");
  std::vector<Eigen::MatrixXd> storage;
  storage.reserve(row.size());
  std::vector<const Eigen::MatrixXd*> ptrs(row.size(), nullptr);
  for (std::size_t b = 0; b < row.size(); ++b) {
    if (!row[b].active) continue;
    storage.push_back(basis.factor(row[b]));
    ptrs[b] = &storage.back();
  }
  return factorize_node(reg, r, ptrs, sigma).log_marginal;
}

namespace {

Eigen::VectorXd expand(const NodePosterior& post, const RegressionData& reg, const Eigen::VectorXd& v) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(reg.blocks() * reg.lags);
  for (std::size_t a = 0; a < post.active.size(); ++a) {
    const Eigen::MatrixXd& f = post.factors[a];
    w.segment(post.active[a] * reg.lags, reg.lags).noalias() = f * v.segment(post.offsets[a], f.cols());
  }
  return w;
}

}  // namespace

Eigen::VectorXd w_conditional_mean(const NodePosterior& post, const RegressionData& reg) {
  if (post.inner_dim() == 0) return Eigen::VectorXd::Zero(reg.blocks() * reg.lags);
  return expand(post, reg, post.inner.solve(post.projected) / post.sigma);
}

Eigen::VectorXd sample_w_conditional(const NodePosterior& post, const RegressionData& reg, Rng& rng) {
  const int dim = post.inner_dim();
  if (dim == 0) return Eigen::VectorXd::Zero(reg.blocks() * reg.lags);
  Eigen::VectorXd xi(dim);
  for (int i = 0; i < dim; ++i) xi(i) = rng.normal();
  Eigen::VectorXd v = post.inner.solve(post.projected) / post.sigma;
  v += post.inner.matrixU().solve(xi);  // L^{-T} xi has covariance B^{-1}
  return expand(post, reg, v);
}

InverseGammaParams sigma_conditional_params(const RegressionData& reg, int r, const Eigen::VectorXd& w_r,
                                            const ModelConfig& cfg) {
  if (reg.rows() == 0) throw ArgumentError("sigma conditional needs at least one increment");
  const Eigen::VectorXd resid = reg.dY.col(r) - reg.dt * (reg.Phi * w_r);
  return {cfg.a0 + 0.5 * reg.rows(), cfg.b0 + resid.squaredNorm() / (2.0 * reg.dt)};
}

double sample_sigma_conditional(const RegressionData& reg, int r, const Eigen::VectorXd& w_r,
                                const ModelConfig& cfg, Rng& rng) {
  const auto ig = sigma_conditional_params(reg, r, w_r, cfg);
  return rng.inverse_gamma(ig.shape, ig.scale);
}

InverseGammaParams lambda_conditional_params(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& y_t1,
                                             const ModelConfig& cfg) {
  if (Z.rows() != y_t1.rows() || Z.cols() != y_t1.cols()) throw ArgumentError("Z and Y_T1 shapes differ");
  return {cfg.a0 + 0.5 * static_cast<double>(Z.size()), cfg.b0 + 0.5 * (Z - y_t1).squaredNorm()};
}

double sample_lambda_conditional(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& y_t1, const ModelConfig& cfg,
                                 Rng& rng) {
  const auto ig = lambda_conditional_params(Z, y_t1, cfg);
  return rng.inverse_gamma(ig.shape, ig.scale);
}

double log_prior_hyper(const LinkMatrix& links, const ModelConfig& cfg, GammaPriorScope scope) {
  const int p = links.rows();
  double out = 0.0;
  int ns = 0;
  for (int r = 0; r < p; ++r) {
    for (int j = 0; j < p; ++j) {
      const LinkPrior& lp = links(r, j);
      ns += lp.active;
      if (!lp.active && scope == GammaPriorScope::kActiveOnly) continue;
      for (int c = 0; c < cfg.kernel.num_shape_params(); ++c) {
        if (!(lp.beta[c] > 0.0 && lp.beta[c] < 1.0)) return -std::numeric_limits<double>::infinity();
      }
      out -= cfg.a1 * std::abs(lp.gamma);
    }
  }
  out += ns * std::log(cfg.p_s) + (double(p) * p - ns) * std::log1p(-cfg.p_s);
  return out;
}

}  // namespace sdenet
