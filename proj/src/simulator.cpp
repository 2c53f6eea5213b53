#include "sdenet/simulator.hpp"

#include "sdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

namespace sdenet {

namespace {

Eigen::MatrixXd stacked_identity(int n, int p) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, p);
  m.topRows(p).setIdentity();
  return m;
}

// A zero row or column forces a zero eigenvalue.
bool has_empty_line(const Eigen::MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a.row(i).isZero(0.0) || a.col(i).isZero(0.0)) return true;
  }
  return false;
}

double signed_magnitude(Rng& rng, double lo, double hi) {
  const double mag = rng.uniform(lo, hi);
  return rng.bernoulli(0.5) ? mag : -mag;
}

}  // namespace

SystemMatrices generate_random_network(int n, int p, double density, std::uint64_t seed,
                                       int max_tries) {
  if (!(p > 0 && p <= n)) throw ArgumentError("need 0 < p <= n");
  if (!(density > 0.0 && density <= 1.0)) throw ArgumentError("density must lie in (0,1]");
  // Plain rejection of i.i.d. sparse Gaussian matrices almost never yields a
  // Hurwitz matrix beyond a handful of nodes. Instead the off-diagonal
  // pattern is drawn at a rate that keeps the expected fill at density * n^2
  // once the diagonal is counted, and the spectrum is shifted left.
  const double off_rate =
      n > 1 ? std::clamp((density * n * n - n) / double(n * n - n), 0.0, 1.0) : 0.0;
  Rng rng(seed, 0x6e6574);
  for (int attempt = 1; attempt <= max_tries; ++attempt) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i != j && rng.bernoulli(off_rate)) a(i, j) = rng.normal();
      }
    }
    const double shift = std::max(spectral_abscissa(a), 0.0) + rng.uniform(0.5, 1.5);
    a.diagonal().array() -= shift;
    if (has_empty_line(a) || !is_hurwitz(a)) continue;
    SystemMatrices sys;
    sys.A = a;
    sys.B = stacked_identity(n, p);
    sys.K = stacked_identity(n, p);
    sys.measured = p;
    return sys;
  }
  throw GenerationError("no Hurwitz network found after " + std::to_string(max_tries) +
                        " attempts (n=" + std::to_string(n) + ", density=" + std::to_string(density) + ")");
}

SystemMatrices generate_ring_network(int p, std::uint64_t seed, int hidden) {
  if (p < 2) throw ArgumentError("ring network needs p >= 2");
  if (hidden < 0) throw ArgumentError("hidden node count must be non-negative");
  const int n = p + hidden;
  Rng rng(seed, 0x72696e67);
  double coupling = 1.0;
  for (int attempt = 1;; ++attempt) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = -rng.uniform(1.0, 2.0);
    for (int i = 0; i < p; ++i) a((i + 1) % p, i) = coupling * signed_magnitude(rng, 0.5, 1.5);
    for (int k = 0; k < hidden; ++k) {
      const int h = p + k;
      const int m = k % p;
      a(h, m) = coupling * signed_magnitude(rng, 0.5, 1.5);
      a(m, h) = coupling * signed_magnitude(rng, 0.5, 1.5);
    }
    if (is_hurwitz(a)) {
      SystemMatrices sys;
      sys.A = a;
      sys.B = stacked_identity(n, p);
      sys.K = stacked_identity(n, p);
      sys.measured = p;
      return sys;
    }
    if (attempt % 100 == 0) coupling *= 0.9;
  }
}

double process_noise_variance(double snr_db, double input_variance) {
  return input_variance * std::pow(10.0, -snr_db / 10.0);
}

Eigen::MatrixXd sample_wiener_path(int steps, int dims, double h, Rng& rng) {
  Eigen::MatrixXd w(steps + 1, dims);
  w.row(0).setZero();
  const double sd = std::sqrt(h);
  for (int k = 0; k < steps; ++k) {
    for (int d = 0; d < dims; ++d) w(k + 1, d) = w(k, d) + sd * rng.normal();
  }
  return w;
}

SimulationOutput simulate_sde(const SystemMatrices& sys, std::span<const double> t,
                              const SimulationOptions& opt) {
  if (t.size() < 2) throw ArgumentError("need at least two measurement instants");
  double min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ArgumentError("measurement times must be strictly increasing");
    min_spacing = std::min(min_spacing, t[i] - t[i - 1]);
  }
  const double dt = opt.dt_internal > 0.0 ? opt.dt_internal : min_spacing / 100.0;
  if (dt > min_spacing / 50.0 * (1.0 + 1e-12)) {
    throw ArgumentError("dt_internal must not exceed (min measurement spacing) / 50");
  }
  if (opt.lambda_meas < 0.0) throw ArgumentError("measurement noise variance must be non-negative");

  SimulationOutput out;
  out.hurwitz = is_hurwitz(sys.A);
  if (!out.hurwitz) {
    std::cerr << "warning: simulating a non-Hurwitz system (spectral abscissa "
              << spectral_abscissa(sys.A) << ")\n";
  }
  out.sigma_e = process_noise_variance(opt.snr_db, opt.input_variance);
  out.times.assign(t.begin(), t.end());

  const int n = sys.states();
  const int p = sys.measured;
  const int q = opt.inputs == InputMode::kNone ? 0 : sys.inputs();
  const int m = sys.noises();
  const double noise_scale = std::sqrt(out.sigma_e);
  const double input_sd = std::sqrt(opt.input_variance);

  Rng rng(opt.seed, 0x73696d);
  Eigen::VectorXd x = opt.x0.size() ? opt.x0 : Eigen::VectorXd::Zero(n);
  if (x.size() != n) throw ArgumentError("x0 has wrong dimension");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(q);  // recorded input path value
  Eigen::VectorXd du(q), dw(m);

  const int M = static_cast<int>(t.size());
  out.Z.resize(M, p);
  out.U.resize(M, q);
  std::vector<Eigen::VectorXd> states;
  auto record_state = [&](double time) {
    if (!opt.keep_states) return;
    out.internal_times.push_back(time);
    states.push_back(x);
  };
  auto measure = [&](int idx) {
    for (int r = 0; r < p; ++r) out.Z(idx, r) = x(r) + std::sqrt(opt.lambda_meas) * rng.normal();
    out.U.row(idx) = u.transpose();
  };

  record_state(t[0]);
  measure(0);
  for (int iv = 0; iv + 1 < M; ++iv) {
    const double span = t[iv + 1] - t[iv];
    const int steps = static_cast<int>(std::ceil(span / dt - 1e-9));
    const double h = span / steps;
    const double sh = std::sqrt(h);
    for (int k = 0; k < steps; ++k) {
      for (int i = 0; i < m; ++i) dw(i) = sh * rng.normal();
      for (int i = 0; i < q; ++i) du(i) = input_sd * sh * rng.normal();
      Eigen::VectorXd drift = sys.A * x;
      if (opt.inputs == InputMode::kSignal) drift += sys.B.leftCols(q) * u;
      x += h * drift + noise_scale * (sys.K * dw);
      if (opt.inputs == InputMode::kExcitation) x += sys.B.leftCols(q) * du;
      u += du;
      record_state(t[iv] + (k + 1) * h);
    }
    measure(iv + 1);
  }
  if (opt.keep_states) {
    out.X.resize(static_cast<Eigen::Index>(states.size()), n);
    for (std::size_t i = 0; i < states.size(); ++i) out.X.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
  }
  return out;
}

namespace {

void check_paths(const SystemMatrices& sys, const PathGrid& paths, const Eigen::VectorXd& x0) {
  if (paths.W.cols() != sys.noises()) throw ArgumentError("Wiener path has wrong dimension");
  if (paths.u.size() && (paths.u.rows() != paths.W.rows() || paths.u.cols() != sys.inputs())) {
    throw ArgumentError("input path does not match the Wiener path grid");
  }
  if (x0.size() != sys.states()) throw ArgumentError("x0 has wrong dimension");
  if (!(paths.h > 0.0)) throw ArgumentError("path step must be positive");
}

Eigen::VectorXd input_at(const SystemMatrices& sys, const PathGrid& paths, int k) {
  if (!paths.u.size()) return Eigen::VectorXd::Zero(sys.inputs());
  return paths.u.row(k).transpose();
}

}  // namespace

Eigen::MatrixXd integrate_sde_output(const SystemMatrices& sys, const PathGrid& paths,
                                     const Eigen::VectorXd& x0) {
  check_paths(sys, paths, x0);
  const int steps = paths.steps();
  const Eigen::MatrixXd c = sys.C();
  Eigen::MatrixXd y(steps + 1, sys.measured);
  Eigen::VectorXd x = x0;
  y.row(0) = (c * x).transpose();
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd drift = sys.A * x + sys.B * input_at(sys, paths, k);
    const Eigen::VectorXd dw = (paths.W.row(k + 1) - paths.W.row(k)).transpose();
    x = x + paths.h * drift + sys.K * dw;
    y.row(k + 1) = (c * x).transpose();
  }
  return y;
}

Eigen::MatrixXd simulate_equivalent_realization(const SystemMatrices& sys, const PathGrid& paths,
                                                const Eigen::VectorXd& x0, Integrator integrator) {
  check_paths(sys, paths, x0);
  const int steps = paths.steps();
  const Eigen::MatrixXd c = sys.C();
  const Eigen::MatrixXd ak = sys.A * sys.K;
  const Eigen::MatrixXd ck = c * sys.K;
  auto rhs = [&](const Eigen::VectorXd& x, int k) -> Eigen::VectorXd {
    return sys.A * x + sys.B * input_at(sys, paths, k) + ak * paths.W.row(k).transpose();
  };
  Eigen::MatrixXd y(steps + 1, sys.measured);
  Eigen::VectorXd x = x0;
  y.row(0) = (c * x + ck * paths.W.row(0).transpose()).transpose();
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd f0 = rhs(x, k);
    if (integrator == Integrator::kEuler) {
      x = x + paths.h * f0;
    } else {
      const Eigen::VectorXd pred = x + paths.h * f0;
      x = x + 0.5 * paths.h * (f0 + rhs(pred, k + 1));
    }
    y.row(k + 1) = (c * x + ck * paths.W.row(k + 1).transpose()).transpose();
  }
  return y;
}

}  // namespace sdenet
