#pragma once

#include <span>
#include <vector>

namespace sdenet {

// Uniform refinement T = {t_0, ..., t_N} of the measurement instants T1.
// Measurement q sits at global index measurement_index[q]; segment q spans
// measurement_index[q] .. measurement_index[q+1] and has
// segment_lengths[q] = N_q intervals.
struct FineGrid {
  double dt = 0.0;
  int intervals = 0;  // N
  std::vector<double> times;  // N + 1 entries; measurement slots hold T1 exactly
  std::vector<int> measurement_index;
  std::vector<int> segment_lengths;
  // Largest |snap| applied when T1 was snapped onto a manually chosen step.
  double max_snap = 0.0;

  int num_points() const { return intervals + 1; }
  int num_measurements() const { return static_cast<int>(measurement_index.size()); }
  int num_segments() const { return static_cast<int>(segment_lengths.size()); }
  // Global indices of the interior points (T2) of segment q.
  std::vector<int> interior_indices(int segment) const;
  // Global indices of all of T2 in increasing order.
  std::vector<int> interior_indices() const;
  bool is_measurement(int index) const;
};

// Builds T from T1 by inserting refinement-1 points per common step. For
// non-uniform spacings the common step is the largest h such that every
// spacing is an integer multiple of h (relative tolerance 1e-9); dt = h /
// refinement. Throws GridError listing offending intervals if none exists.
FineGrid build_grid(std::span<const double> measurement_times, int refinement);

// Builds T with a user-chosen step, snapping each T1 instant onto the nearest
// grid point. max_snap records the largest displacement.
FineGrid build_grid_with_step(std::span<const double> measurement_times, double dt);

}  // namespace sdenet
