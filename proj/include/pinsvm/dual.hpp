#pragma once

#include "pinsvm/data.hpp"
#include "pinsvm/loss.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>

namespace pinsvm {

enum class Formulation { unified, legacy_positive, corrected_negative, incorrect_negative };

/// CLI names: unified, legacy-pos, corrected-neg, incorrect-neg.
[[nodiscard]] std::string to_string(Formulation f);
[[nodiscard]] Formulation parse_formulation(const std::string &name);

/// Whether `f` accepts this tau (legacy-pos: tau >= 0, corrected-neg: tau < 0,
/// incorrect-neg: -1 < tau < 0, unified: any).
[[nodiscard]] bool accepts(Formulation f, Tau tau) noexcept;

/// Multiplier applied to C_i to bound the otherwise unbounded incorrect baseline.
inline constexpr double incorrect_upper_cap = 1e6;

/**
 * Canonical reduced dual:
 *
 *   minimize 1/2 x'Qx + linear'x  subject to  lower <= x <= upper,  eq_coeffs'x = eq_rhs.
 *
 * Q is held by shared pointer so several problems built from one Gram matrix
 * share storage.
 */
struct BoxQP {
    std::shared_ptr<const Eigen::MatrixXd> quad;
    Eigen::VectorXd linear;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd eq_coeffs;
    double eq_rhs = 0.0;
    /// Set when `upper` is an artificial cap (incorrect baseline): upper = cap * C.
    std::optional<double> upper_cap;

    [[nodiscard]] const Eigen::MatrixXd &q() const noexcept { return *quad; }
    [[nodiscard]] Eigen::Index size() const noexcept { return linear.size(); }
    [[nodiscard]] double objective(const Eigen::Ref<const Eigen::VectorXd> &x) const;
};

/// Dual multipliers of the pinball primal: one for each of the two slack constraints.
struct AlphaBeta {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
};

/// Unified dual for any tau in [-1, 1]. Eliminating beta = |tau| (C - alpha) leaves
/// lambda = alpha - s_tau beta = (1 + tau) alpha - tau C on the box [-tau C_i, C_i].
[[nodiscard]] BoxQP reduce_unified(const WeightVector &weights, Tau tau, std::shared_ptr<const Eigen::MatrixXd> quad,
                                   const Eigen::VectorXd &labels);

/// Positive-tau Pin-SVM dual, lambda = alpha - beta with C - alpha - beta / tau = 0.
/// Throws std::invalid_argument for tau < 0.
[[nodiscard]] BoxQP reduce_legacy_positive(const WeightVector &weights, Tau tau,
                                           std::shared_ptr<const Eigen::MatrixXd> quad, const Eigen::VectorXd &labels);

/// Negative-tau dual derived from the true pinball minimizer, lambda = alpha + beta
/// with C - alpha + beta / tau = 0. Throws std::invalid_argument for tau >= 0.
[[nodiscard]] BoxQP reduce_corrected_negative(const WeightVector &weights, Tau tau,
                                              std::shared_ptr<const Eigen::MatrixXd> quad,
                                              const Eigen::VectorXd &labels);

/// Negative-tau baseline that reuses the positive-tau constraints. Forces alpha >= C,
/// so lambda lives on [C_i, +inf), capped at incorrect_upper_cap * C_i.
/// Throws std::invalid_argument unless -1 < tau < 0.
[[nodiscard]] BoxQP build_incorrect_negative(const WeightVector &weights, Tau tau,
                                             std::shared_ptr<const Eigen::MatrixXd> quad,
                                             const Eigen::VectorXd &labels);

/// Dispatch on `f`.
[[nodiscard]] BoxQP build_dual(Formulation f, const WeightVector &weights, Tau tau,
                               std::shared_ptr<const Eigen::MatrixXd> quad, const Eigen::VectorXd &labels);

/// Tolerance for box membership in recover_alpha_beta.
inline constexpr double recover_tolerance = 1e-8;

/// Inverts the unified reduction: alpha = (lambda + tau C) / (1 + tau), beta = |tau| (C - alpha).
/// Throws std::domain_error at tau = -1 (alpha is indeterminate there) and
/// std::invalid_argument if lambda leaves the unified box by more than recover_tolerance.
[[nodiscard]] AlphaBeta recover_alpha_beta(const Eigen::Ref<const Eigen::VectorXd> &lambda,
                                           const WeightVector &weights, Tau tau);

}  // namespace pinsvm
