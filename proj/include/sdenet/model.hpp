#pragma once

#include "sdenet/dsf.hpp"
#include "sdenet/grid.hpp"
#include "sdenet/posterior.hpp"
#include "sdenet/system.hpp"

#include <Eigen/Dense>

namespace sdenet {

// Everything the sampler needs that does not change during a chain: data,
// fine grid, model configuration and the prior basis.
class NetworkModel {
 public:
  NetworkModel(TimeSeriesData data, FineGrid grid, ModelConfig cfg);

  const TimeSeriesData& data() const { return data_; }
  const FineGrid& grid() const { return grid_; }
  const ModelConfig& config() const { return cfg_; }
  const PriorBasis& basis() const { return basis_; }
  int nodes() const { return data_.num_nodes(); }
  int input_blocks() const { return cfg_.known_inputs ? data_.num_inputs() : 0; }
  int blocks() const { return nodes() + input_blocks(); }
  int lags() const { return lags_; }

  RegressionData regression(const Eigen::MatrixXd& y) const;
  // Z at measurement instants, linear interpolation in between.
  Eigen::MatrixXd initial_trajectory() const;
  // Recorded inputs linearly interpolated onto the grid (empty when unused).
  const Eigen::MatrixXd& inputs_on_grid() const { return inputs_; }

 private:
  TimeSeriesData data_;
  FineGrid grid_;
  ModelConfig cfg_;
  int lags_;
  PriorBasis basis_;
  Eigen::MatrixXd inputs_;
};

// Values at T1 and T2 in increasing grid order.
Eigen::MatrixXd measured_rows(const Eigen::MatrixXd& y, const FineGrid& grid);
Eigen::MatrixXd interior_rows(const Eigen::MatrixXd& y, const FineGrid& grid);
// Inverse of the two above.
Eigen::MatrixXd assemble_trajectory(const FineGrid& grid, const Eigen::MatrixXd& y_t1,
                                    const Eigen::MatrixXd& y_t2);

// Linear interpolation of per-measurement values onto the grid.
Eigen::MatrixXd interpolate_on_grid(const FineGrid& grid, const Eigen::MatrixXd& values);

}  // namespace sdenet
