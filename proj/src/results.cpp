#include "sdenet/results.hpp"

#include "sdenet/errors.hpp"

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace sdenet {

namespace {

std::string topology_key(const LinkMatrix& links, int p) {
  std::string key(std::size_t(p) * p, '0');
  for (int r = 0; r < p; ++r) {
    for (int j = 0; j < p; ++j) key[std::size_t(r) * p + j] = links(r, j).active ? '1' : '0';
  }
  return key;
}

// Mean over retained draws: accumulator when it covers exactly the retained
// draws, otherwise the stored per-draw matrices, otherwise empty.
struct MeanSource {
  Eigen::MatrixXd sum;
  std::int64_t count = 0;
  bool ok = true;
};

}  // namespace

PosteriorSummary summarize(std::span<const ChainSamples> chains) {
  if (chains.empty()) throw ArgumentError("no chains to summarize");
  const ChainSamples& first = chains.front();
  PosteriorSummary out;
  out.nodes = first.nodes;
  out.blocks = first.blocks;
  out.lags = first.lags;
  out.kernel = first.kernel;
  const int p = out.nodes;
  const int nb = out.blocks;

  std::vector<const Draw*> kept;
  MeanSource w_src, y_src;
  for (const ChainSamples& c : chains) {
    if (c.nodes != p || c.blocks != nb || c.lags != out.lags) throw ArgumentError("chains have different shapes");
    const std::size_t total = c.draws.size();
    const std::size_t burn = total / 2;
    for (std::size_t i = burn; i < total; ++i) kept.push_back(&c.draws[i]);

    const std::int64_t retained = static_cast<std::int64_t>(total - burn);
    const bool acc_ok = static_cast<std::size_t>(c.retained_from) == burn && c.retained_count == retained;
    auto add = [&](MeanSource& src, const Eigen::MatrixXd& acc, auto member) {
      if (!src.ok) return;
      Eigen::MatrixXd part;
      if (acc_ok && acc.size()) {
        part = acc;
      } else {
        for (std::size_t i = burn; i < total; ++i) {
          const Eigen::MatrixXd& m = c.draws[i].*member;
          if (!m.size()) {
            src.ok = false;
            return;
          }
          if (!part.size()) part = Eigen::MatrixXd::Zero(m.rows(), m.cols());
          part += m;
        }
      }
      if (!part.size()) {
        src.ok = retained == 0;
        return;
      }
      if (src.sum.size() && (src.sum.rows() != part.rows() || src.sum.cols() != part.cols())) {
        src.ok = false;
        return;
      }
      if (!src.sum.size()) src.sum = Eigen::MatrixXd::Zero(part.rows(), part.cols());
      src.sum += part;
      src.count += retained;
    };
    add(w_src, c.w_sum, &Draw::w);
    add(y_src, c.y_sum, &Draw::Y);

    out.stats.trajectory.proposed += c.stats.trajectory.proposed;
    out.stats.trajectory.accepted += c.stats.trajectory.accepted;
    out.stats.switch_move.proposed += c.stats.switch_move.proposed;
    out.stats.switch_move.accepted += c.stats.switch_move.accepted;
    out.stats.update_move.proposed += c.stats.update_move.proposed;
    out.stats.update_move.accepted += c.stats.update_move.accepted;
    out.stats.numeric_rejections += c.stats.numeric_rejections;
  }
  if (kept.empty()) throw ArgumentError("no retained samples to summarize");
  out.retained = static_cast<std::int64_t>(kept.size());
  const double inv = 1.0 / static_cast<double>(kept.size());

  out.link_prob = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd active_count = Eigen::MatrixXd::Zero(p, nb);
  out.gamma_mean = Eigen::MatrixXd::Zero(p, nb);
  out.beta1_mean = Eigen::MatrixXd::Zero(p, nb);
  out.beta2_mean = Eigen::MatrixXd::Zero(p, nb);
  out.sigma_mean = Eigen::VectorXd::Zero(p);
  out.lambda_mean = 0.0;

  std::map<std::string, std::pair<std::int64_t, std::size_t>> freq;  // key -> (count, first index)
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Draw& d = *kept[i];
    for (int r = 0; r < p; ++r) {
      for (int b = 0; b < nb; ++b) {
        const LinkPrior& lp = d.links(r, b);
        if (!lp.active) continue;
        if (b < p) out.link_prob(r, b) += 1.0;
        active_count(r, b) += 1.0;
        out.gamma_mean(r, b) += lp.gamma;
        out.beta1_mean(r, b) += lp.beta[0];
        out.beta2_mean(r, b) += lp.beta[1];
      }
    }
    out.sigma_mean += d.sigma;
    out.lambda_mean += d.lambda;
    auto [it, inserted] = freq.try_emplace(topology_key(d.links, p), 0, i);
    ++it->second.first;
  }
  out.link_prob *= inv;
  out.sigma_mean *= inv;
  out.lambda_mean *= inv;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int r = 0; r < p; ++r) {
    for (int b = 0; b < nb; ++b) {
      const double n = active_count(r, b);
      out.gamma_mean(r, b) = n > 0 ? out.gamma_mean(r, b) / n : nan;
      out.beta1_mean(r, b) = n > 0 ? out.beta1_mean(r, b) / n : nan;
      out.beta2_mean(r, b) = n > 0 && out.kernel.num_shape_params() == 2 ? out.beta2_mean(r, b) / n : nan;
    }
  }

  const std::pair<std::int64_t, std::size_t>* best = nullptr;
  const std::string* best_key = nullptr;
  for (const auto& [key, cf] : freq) {
    if (!best || cf.first > best->first || (cf.first == best->first && cf.second < best->second)) {
      best = &cf;
      best_key = &key;
    }
  }
  out.s_map = Adjacency(p, p);
  for (int r = 0; r < p; ++r) {
    for (int j = 0; j < p; ++j) out.s_map(r, j) = (*best_key)[std::size_t(r) * p + j] == '1';
  }
  out.map_frequency = static_cast<double>(best->first) * inv;
  out.s_threshold = (out.link_prob.array() > 0.5).matrix();

  if (w_src.ok && w_src.count > 0) out.w_mean = w_src.sum / static_cast<double>(w_src.count);
  if (y_src.ok && y_src.count > 0) out.y_mean = y_src.sum / static_cast<double>(y_src.count);
  return out;
}

PosteriorSummary summarize(const ChainSamples& samples) { return summarize(std::span<const ChainSamples>(&samples, 1)); }

}  // namespace sdenet
