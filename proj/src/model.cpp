#include "sdenet/model.hpp"

#include "sdenet/errors.hpp"

#include <string>

namespace sdenet {

namespace {

int resolve_lags(const ModelConfig& cfg, const FineGrid& grid) {
  const int l = cfg.lags > 0 ? cfg.lags : default_lags(grid);
  if (l > grid.intervals) {
    throw ConfigError("lags = " + std::to_string(l) + " exceeds the grid length N = " +
                      std::to_string(grid.intervals));
  }
  return l;
}

int resolve_pseudo(const ModelConfig& cfg, int lags) {
  const int d = cfg.pseudo_points > 0 ? cfg.pseudo_points : default_pseudo_points(lags);
  if (d > lags) {
    throw ConfigError("pseudo_points = " + std::to_string(d) + " exceeds lags = " + std::to_string(lags));
  }
  return d;
}

const FineGrid& checked(const TimeSeriesData& data, const FineGrid& grid, const ModelConfig& cfg) {
  cfg.validate();
  if (data.num_nodes() < 1) throw DataError("dataset has no measured nodes");
  if (static_cast<int>(data.times.size()) != data.num_measurements()) {
    throw DataError("time column and measurement rows differ in length");
  }
  if (grid.num_measurements() != data.num_measurements()) {
    throw ArgumentError("grid does not match the measurement instants");
  }
  if (data.U.size() && data.U.rows() != data.num_measurements()) {
    throw DataError("input rows do not match measurement rows");
  }
  if (cfg.known_inputs && data.num_inputs() == 0) {
    throw ConfigError("known_inputs requires recorded inputs in the dataset");
  }
  return grid;
}

}  // namespace

NetworkModel::NetworkModel(TimeSeriesData data, FineGrid grid, ModelConfig cfg)
    : data_(std::move(data)),
      grid_(checked(data_, grid, cfg)),
      cfg_(cfg),
      lags_(resolve_lags(cfg_, grid_)),
      basis_(cfg_.kernel, lags_, grid_.dt, resolve_pseudo(cfg_, lags_)) {
  if (cfg_.known_inputs) inputs_ = interpolate_on_grid(grid_, data_.U);
}

RegressionData NetworkModel::regression(const Eigen::MatrixXd& y) const {
  return build_regression(y, grid_, cfg_.filter, lags_, inputs_);
}

Eigen::MatrixXd NetworkModel::initial_trajectory() const { return interpolate_on_grid(grid_, data_.Z); }

Eigen::MatrixXd measured_rows(const Eigen::MatrixXd& y, const FineGrid& grid) {
  Eigen::MatrixXd out(grid.num_measurements(), y.cols());
  for (int q = 0; q < grid.num_measurements(); ++q) out.row(q) = y.row(grid.measurement_index[q]);
  return out;
}

Eigen::MatrixXd interior_rows(const Eigen::MatrixXd& y, const FineGrid& grid) {
  const std::vector<int> idx = grid.interior_indices();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), y.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = y.row(idx[i]);
  return out;
}

Eigen::MatrixXd assemble_trajectory(const FineGrid& grid, const Eigen::MatrixXd& y_t1,
                                    const Eigen::MatrixXd& y_t2) {
  const std::vector<int> idx = grid.interior_indices();
  if (y_t1.rows() != grid.num_measurements() || y_t2.rows() != static_cast<Eigen::Index>(idx.size()) ||
      (y_t2.rows() && y_t1.cols() != y_t2.cols())) {
    throw ArgumentError("trajectory parts do not match the grid");
  }
  Eigen::MatrixXd y(grid.num_points(), y_t1.cols());
  for (int q = 0; q < grid.num_measurements(); ++q) y.row(grid.measurement_index[q]) = y_t1.row(q);
  for (std::size_t i = 0; i < idx.size(); ++i) y.row(idx[i]) = y_t2.row(static_cast<Eigen::Index>(i));
  return y;
}

Eigen::MatrixXd interpolate_on_grid(const FineGrid& grid, const Eigen::MatrixXd& values) {
  if (values.rows() != grid.num_measurements()) throw ArgumentError("values do not match the measurement count");
  Eigen::MatrixXd y(grid.num_points(), values.cols());
  for (int q = 0; q < grid.num_segments(); ++q) {
    const int k0 = grid.measurement_index[q];
    const int n = grid.segment_lengths[q];
    for (int i = 0; i < n; ++i) {
      const double frac = static_cast<double>(i) / n;
      y.row(k0 + i) = (1.0 - frac) * values.row(q) + frac * values.row(q + 1);
    }
  }
  y.row(grid.intervals) = values.row(grid.num_measurements() - 1);
  return y;
}

}  // namespace sdenet
