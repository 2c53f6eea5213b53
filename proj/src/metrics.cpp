#include "sdenet/metrics.hpp"

#include "sdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

namespace sdenet {

namespace {

void check_shapes(Eigen::Index rows, Eigen::Index cols, const Adjacency& truth) {
  if (rows != truth.rows() || cols != truth.cols()) throw ArgumentError("prediction and truth shapes differ");
  if (rows != cols) throw ArgumentError("adjacency matrices must be square");
}

}  // namespace

BinaryMetrics binary_metrics(const Adjacency& predicted, const Adjacency& truth, bool exclude_diagonal) {
  check_shapes(predicted.rows(), predicted.cols(), truth);
  BinaryMetrics m;
  m.diagonal_excluded = exclude_diagonal;
  for (Eigen::Index r = 0; r < truth.rows(); ++r) {
    for (Eigen::Index c = 0; c < truth.cols(); ++c) {
      if (exclude_diagonal && r == c) continue;
      const bool p = predicted(r, c);
      const bool t = truth(r, c);
      m.tp += p && t;
      m.fp += p && !t;
      m.fn += !p && t;
      m.tn += !p && !t;
    }
  }
  if (m.tp + m.fn > 0) m.tpr = static_cast<double>(m.tp) / (m.tp + m.fn);
  if (m.tp + m.fp > 0) m.prec = static_cast<double>(m.tp) / (m.tp + m.fp);
  return m;
}

namespace {

void check_ranked(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
  for (double s : scores) {
    if (!std::isfinite(s)) throw ArgumentError("scores must be finite");
  }
  const auto pos = std::count(labels.begin(), labels.end(), true);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
    throw ArgumentError("AUROC undefined: truth is all-positive or all-negative");
  }
}

std::vector<std::size_t> order_descending(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const bool> labels) {
  check_ranked(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over ties (1-based).
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
    i = j + 1;
  }
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i]) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  }
  const double neg = static_cast<double>(n) - pos;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double auprec(std::span<const double> scores, std::span<const bool> labels) {
  check_ranked(scores, labels);
  const auto idx = order_descending(scores);
  const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  double tp = 0.0, fp = 0.0, prev_recall = 0.0, area = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    // Consume every entry tied at this threshold.
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      labels[idx[j]] ? tp += 1.0 : fp += 1.0;
      ++j;
    }
    const double recall = tp / pos;
    const double precision = tp / (tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

RankedMetrics ranked_metrics(const Eigen::MatrixXd& scores, const Adjacency& truth, bool exclude_diagonal) {
  check_shapes(scores.rows(), scores.cols(), truth);
  std::vector<double> s;
  std::vector<char> l;
  for (Eigen::Index r = 0; r < truth.rows(); ++r) {
    for (Eigen::Index c = 0; c < truth.cols(); ++c) {
      if (exclude_diagonal && r == c) continue;
      s.push_back(scores(r, c));
      l.push_back(truth(r, c));
    }
  }
  std::unique_ptr<bool[]> labels(new bool[l.size()]);
  for (std::size_t i = 0; i < l.size(); ++i) labels[i] = l[i] != 0;
  const std::span<const bool> lab(labels.get(), l.size());
  RankedMetrics m;
  m.diagonal_excluded = exclude_diagonal;
  m.auroc = auroc(s, lab);
  m.auprec = auprec(s, lab);
  return m;
}

Eigen::MatrixXd norm_ratio_scores(const Eigen::MatrixXd& w, int lags) {
  const Eigen::Index p = w.rows();
  if (lags < 1 || w.cols() < p * lags) throw ArgumentError("impulse-response matrix too narrow for p blocks");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double total = w.row(i).head(p * lags).norm();
    if (total == 0.0) continue;
    for (Eigen::Index j = 0; j < p; ++j) out(i, j) = w.row(i).segment(j * lags, lags).norm() / total;
  }
  return out;
}

}  // namespace sdenet
