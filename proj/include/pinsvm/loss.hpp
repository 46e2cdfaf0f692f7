#pragma once

#include "pinsvm/data.hpp"
#include "pinsvm/kernel.hpp"

#include <Eigen/Dense>

namespace pinsvm {

/// Pinball asymmetry parameter, restricted to the convex range [-1, 1].
class Tau {
  public:
    /// Throws std::invalid_argument outside [-1, 1] or for NaN.
    explicit Tau(double value);

    [[nodiscard]] double value() const noexcept { return value_; }
    /// +1 when tau >= 0, -1 otherwise.
    [[nodiscard]] int signum() const noexcept { return value_ >= 0.0 ? 1 : -1; }

    friend bool operator==(const Tau &, const Tau &) = default;

  private:
    double value_;
};

/// max(u, -tau u). Negative when tau < 0 and u < 0.
[[nodiscard]] inline double pinball(double u, Tau tau) noexcept {
    return u >= 0.0 ? u : -tau.value() * u;
}

/// u_i = 1 - y_i (sum_j lambda_j y_j K_ji + b).
[[nodiscard]] Eigen::VectorXd margin_residuals(const Eigen::Ref<const Eigen::VectorXd> &lambda, double bias,
                                               const Eigen::Ref<const GramMatrix> &gram,
                                               const Eigen::Ref<const Eigen::VectorXd> &labels);

/// 1/2 lambda' Q lambda + sum_i C_i pinball(u_i, tau), i.e. the primal objective
/// evaluated at w = sum_j lambda_j y_j phi(x_j).
[[nodiscard]] double primal_objective(const Eigen::Ref<const Eigen::VectorXd> &lambda, double bias,
                                      const Eigen::Ref<const GramMatrix> &gram,
                                      const Eigen::Ref<const Eigen::VectorXd> &labels, const WeightVector &weights,
                                      Tau tau);

}  // namespace pinsvm
