#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>

namespace sdenet {

enum class KernelKind { kTC, kDC, kSS };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

// Stable impulse-response kernel family. TC and SS use beta[0] only; DC uses
// both components.
struct KernelSpec {
  KernelKind kind = KernelKind::kTC;

  int num_shape_params() const { return kind == KernelKind::kDC ? 2 : 1; }
};

using ShapeParams = std::array<double, 2>;

// Prior of one impulse response w_rj: indicator, scale and kernel shape.
struct LinkPrior {
  bool active = false;
  double gamma = 1.0;  // the kernel is scaled by |gamma|
  ShapeParams beta{0.5, 0.5};
};

// Throws DomainError unless the used shape components lie in (0,1).
void check_shape_params(const KernelSpec& spec, const ShapeParams& beta);

// k(t, s; beta) for the TC, DC and SS closed forms. Requires t, s > 0.
double kernel_eval(const KernelSpec& spec, double t, double s, const ShapeParams& beta);

// Unit-scale kernel matrix on the lag grid {dt, 2dt, ..., l*dt}.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const ShapeParams& beta, int lags, double dt);

// [K]_pq = s |gamma| k(p dt, q dt; beta). Zero matrix when the link is off.
Eigen::MatrixXd build_link_covariance(const LinkPrior& prior, const KernelSpec& spec, int lags,
                                      double dt);

// Diagonal jitter applied before factorizing kernel matrices.
inline constexpr double kKernelJitter = 1e-10;

// Adds kKernelJitter * max(diag) to the diagonal in place.
void add_jitter(Eigen::MatrixXd& k);

}  // namespace sdenet
