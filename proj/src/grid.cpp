#include "sdenet/grid.hpp"

#include "sdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdenet {

namespace {

constexpr double kRelTol = 1e-9;
constexpr int kMaxDivisor = 1000;

void check_increasing(std::span<const double> t) {
  if (t.size() < 2) throw GridError("need at least two measurement instants");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      std::ostringstream msg;
      msg << "measurement times must be strictly increasing (index " << i << ": " << t[i - 1]
          << " -> " << t[i] << ")";
      throw GridError(msg.str());
    }
  }
}

bool is_multiple(double spacing, double step) {
  const double k = std::round(spacing / step);
  return k >= 1.0 && std::abs(spacing - k * step) <= kRelTol * spacing;
}

FineGrid assemble(std::span<const double> t, double dt, const std::vector<int>& steps) {
  FineGrid g;
  g.dt = dt;
  g.segment_lengths = steps;
  g.measurement_index.reserve(t.size());
  int k = 0;
  g.measurement_index.push_back(0);
  for (int s : steps) {
    k += s;
    g.measurement_index.push_back(k);
  }
  g.intervals = k;
  g.times.resize(std::size_t(k) + 1);
  for (int i = 0; i <= k; ++i) g.times[i] = t[0] + i * dt;
  for (std::size_t q = 0; q < t.size(); ++q) {
    g.max_snap = std::max(g.max_snap, std::abs(g.times[g.measurement_index[q]] - t[q]));
    g.times[g.measurement_index[q]] = t[q];
  }
  return g;
}

}  // namespace

std::vector<int> FineGrid::interior_indices(int segment) const {
  std::vector<int> out;
  for (int i = measurement_index[segment] + 1; i < measurement_index[segment + 1]; ++i) out.push_back(i);
  return out;
}

std::vector<int> FineGrid::interior_indices() const {
  std::vector<int> out;
  out.reserve(std::size_t(intervals) + 1 - measurement_index.size());
  for (int q = 0; q < num_segments(); ++q) {
    for (int i = measurement_index[q] + 1; i < measurement_index[q + 1]; ++i) out.push_back(i);
  }
  return out;
}

bool FineGrid::is_measurement(int index) const {
  return std::binary_search(measurement_index.begin(), measurement_index.end(), index);
}

FineGrid build_grid(std::span<const double> t, int refinement) {
  check_increasing(t);
  if (refinement < 1) throw GridError("refinement factor must be a positive integer");
  std::vector<double> spacing(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) spacing[i] = t[i + 1] - t[i];
  const double smallest = *std::min_element(spacing.begin(), spacing.end());

  double step = 0.0;
  for (int div = 1; div <= kMaxDivisor && step == 0.0; ++div) {
    const double h = smallest / div;
    if (std::all_of(spacing.begin(), spacing.end(), [h](double s) { return is_multiple(s, h); })) step = h;
  }
  if (step == 0.0) {
    std::ostringstream msg;
    msg << "measurement spacings share no common step; offending intervals:";
    for (std::size_t i = 0; i < spacing.size(); ++i) {
      if (!is_multiple(spacing[i], smallest)) msg << " [" << t[i] << ", " << t[i + 1] << "]";
    }
    msg << ". Choose a step manually (build_grid_with_step / --dt).";
    throw GridError(msg.str());
  }

  std::vector<int> steps(spacing.size());
  for (std::size_t i = 0; i < spacing.size(); ++i) {
    steps[i] = static_cast<int>(std::lround(spacing[i] / step)) * refinement;
  }
  return assemble(t, step / refinement, steps);
}

FineGrid build_grid_with_step(std::span<const double> t, double dt) {
  check_increasing(t);
  if (!(dt > 0.0)) throw GridError("grid step must be positive");
  std::vector<int> steps;
  long prev = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    long k = std::lround((t[i] - t[0]) / dt);
    if (k <= prev) {
      std::ostringstream msg;
      msg << "step " << dt << " too coarse: instants " << t[i - 1] << " and " << t[i]
          << " snap onto the same grid point";
      throw GridError(msg.str());
    }
    steps.push_back(static_cast<int>(k - prev));
    prev = k;
  }
  return assemble(t, dt, steps);
}

}  // namespace sdenet
