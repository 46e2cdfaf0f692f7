#pragma once

#include "pinsvm/data.hpp"
#include "pinsvm/dual.hpp"
#include "pinsvm/kernel.hpp"
#include "pinsvm/loss.hpp"
#include "pinsvm/solver.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <memory>
#include <optional>

namespace pinsvm {

struct TrainConfig {
    double c0 = 1.0;
    Tau tau{0.0};
    KernelSpec kernel = KernelSpec::linear();
    Formulation formulation = Formulation::unified;
    SolverConfig solver{};
    /// Apply the class-ratio weights C_i; otherwise C_i = C0 for every sample.
    bool weighting = true;
};

/// Throws std::invalid_argument if c0 <= 0 or the formulation does not accept tau.
void validate(const TrainConfig &cfg);

struct TrainDiagnostics {
    std::size_t iterations = 0;
    double dual_objective = 0.0;
    double kkt_residual = 0.0;
    bool converged = false;
    /// Number of coordinates used to average the bias; 0 means the fallback was used.
    std::size_t bias_support = 0;
    /// Some lambda_i sits on the artificial cap of the incorrect baseline.
    bool hit_upper_cap = false;
};

/// Trained classifier: f(x) = sum_j coeffs_j k(x_j, x) + bias.
struct Model {
    KernelSpec kernel = KernelSpec::linear();
    Eigen::MatrixXd support_x;
    /// lambda_j * y_j for each retained sample.
    Eigen::VectorXd coeffs;
    double bias = 0.0;
    TrainConfig config{};
    TrainDiagnostics diagnostics{};
    /// Feature map applied to raw inputs before the kernel, if the training data was normalized.
    std::optional<NormalizationParams> normalization;

    [[nodiscard]] double decision_value(const Eigen::Ref<const Eigen::VectorXd> &x) const;
    /// Primal weight vector; only meaningful for the linear kernel.
    [[nodiscard]] Eigen::VectorXd linear_weights() const;
};

/// Everything produced along the way by a training run.
struct Fit {
    Model model;
    WeightVector weights;
    BoxQP qp;
    DualSolution solution;
};

/// Coefficient magnitude below which a sample is dropped from the model.
inline constexpr double retain_threshold = 1e-12;
/// Relative interior margin for the bias support set.
inline constexpr double bias_support_tol = 1e-6;

/// Weights -> Gram -> dual -> solve -> bias. At tau = -1 the box is a single point and
/// lambda = C is taken directly. Throws infeasible_problem, std::invalid_argument.
[[nodiscard]] Fit fit(const Dataset &train_set, const TrainConfig &cfg);
/// As above with a precomputed Gram matrix of train_set under cfg.kernel.
[[nodiscard]] Fit fit(const Dataset &train_set, const TrainConfig &cfg, const std::shared_ptr<const GramMatrix> &gram);

[[nodiscard]] Model train(const Dataset &train_set, const TrainConfig &cfg);

struct BiasResult {
    double bias = 0.0;
    /// Size of the support set S; 0 when the fallback rule chose the bias.
    std::size_t support = 0;
};

/**
 * Bias from a solved dual.
 *
 * S holds coordinates strictly inside the box by more than tol * width_i, where
 * width_i = min(upper_i - lower_i, (1 + |tau|) C_i). For the unified family this is
 * exactly alpha_i > 0 and beta_i > 0. The bias is the mean of y_i - sum_j lambda_j y_j K_ji
 * over S.
 *
 * When S is empty the bound coordinates still confine b to an interval
 * (y_i f(x_i) >= 1 at the lower bound, <= 1 at the upper bound). Within it, b is
 * chosen to maximize training accuracy over midpoints of the sorted decision values,
 * ties going to the smaller |b|.
 */
[[nodiscard]] BiasResult fit_bias(const BoxQP &qp, const Eigen::Ref<const Eigen::VectorXd> &lambda,
                                  const WeightVector &weights, Tau tau, const Eigen::Ref<const GramMatrix> &gram,
                                  const Eigen::Ref<const Eigen::VectorXd> &labels, double tol = bias_support_tol);

/// Bias for the unified box [-tau C_i, C_i].
[[nodiscard]] double bias(const Eigen::Ref<const Eigen::VectorXd> &lambda, const WeightVector &weights, Tau tau,
                          const Eigen::Ref<const GramMatrix> &gram, const Eigen::Ref<const Eigen::VectorXd> &labels,
                          double tol = bias_support_tol);

/// sign(f(x)) with sign(0) = +1. Throws std::invalid_argument on dimension mismatch.
[[nodiscard]] int predict(const Model &model, const Eigen::Ref<const Eigen::VectorXd> &x);

/// Fraction of test rows predicted correctly. Throws std::invalid_argument on an empty set.
[[nodiscard]] double accuracy(const Model &model, const Dataset &test);

/// Versioned text format; doubles are written with 17 significant digits.
void save(const Model &model, const std::filesystem::path &path);
[[nodiscard]] Model load(const std::filesystem::path &path);

}  // namespace pinsvm
