#include "sdenet/kernels.hpp"

#include "sdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sdenet {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kTC: return "TC";
    case KernelKind::kDC: return "DC";
    case KernelKind::kSS: return "SS";
  }
  return "?";
}

KernelKind parse_kernel_kind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "TC") return KernelKind::kTC;
  if (upper == "DC") return KernelKind::kDC;
  if (upper == "SS") return KernelKind::kSS;
  throw ArgumentError("unknown kernel kind '" + std::string(name) + "' (expected TC, DC or SS)");
}

void check_shape_params(const KernelSpec& spec, const ShapeParams& beta) {
  for (int i = 0; i < spec.num_shape_params(); ++i) {
    if (!(beta[i] > 0.0 && beta[i] < 1.0)) {
      throw DomainError("kernel shape parameter beta[" + std::to_string(i) + "] = " +
                        std::to_string(beta[i]) + " outside (0,1)");
    }
  }
}

namespace {

// No validation; callers check once per matrix.
double kernel_raw(KernelKind kind, double t, double s, const ShapeParams& beta) {
  const double hi = std::max(t, s);
  switch (kind) {
    case KernelKind::kTC:
      return std::pow(beta[0], hi);
    case KernelKind::kDC:
      return std::pow(beta[0], 0.5 * (t + s)) * std::pow(beta[1], std::abs(t - s));
    case KernelKind::kSS:
      return 0.5 * std::pow(beta[0], t + s + hi) - std::pow(beta[0], 3.0 * hi) / 6.0;
  }
  return 0.0;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, double t, double s, const ShapeParams& beta) {
  check_shape_params(spec, beta);
  if (!(t > 0.0 && s > 0.0)) throw DomainError("kernel arguments must be positive times");
  return kernel_raw(spec.kind, t, s, beta);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const ShapeParams& beta, int lags, double dt) {
  check_shape_params(spec, beta);
  if (lags < 1) throw ArgumentError("kernel matrix needs at least one lag");
  if (!(dt > 0.0)) throw ArgumentError("kernel grid step must be positive");
  Eigen::MatrixXd k(lags, lags);
  for (int p = 0; p < lags; ++p) {
    for (int q = 0; q <= p; ++q) {
      const double v = kernel_raw(spec.kind, (p + 1) * dt, (q + 1) * dt, beta);
      k(p, q) = v;
      k(q, p) = v;
    }
  }
  return k;
}

Eigen::MatrixXd build_link_covariance(const LinkPrior& prior, const KernelSpec& spec, int lags,
                                      double dt) {
  Eigen::MatrixXd k = kernel_matrix(spec, prior.beta, lags, dt);
  if (!prior.active) return Eigen::MatrixXd::Zero(lags, lags);
  return std::abs(prior.gamma) * k;
}

void add_jitter(Eigen::MatrixXd& k) {
  if (k.rows() == 0) return;
  const double scale = k.diagonal().maxCoeff();
  k.diagonal().array() += kKernelJitter * scale;
}

}  // namespace sdenet
