#include "pinsvm/model.hpp"

#include "pinsvm/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pinsvm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double training_accuracy(const Eigen::VectorXd &decision, const Eigen::Ref<const Eigen::VectorXd> &labels,
                         double b) {
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        const double predicted = decision(i) + b >= 0.0 ? 1.0 : -1.0;
        hits += predicted == labels(i) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double fallback_bias(const Eigen::VectorXd &decision, const Eigen::Ref<const Eigen::VectorXd> &labels, double b_lo,
                     double b_hi) {
    if (b_lo > b_hi) {
        // inexact solve: the bound constraints overlap slightly
        return 0.5 * (b_lo + b_hi);
    }
    std::vector<double> sorted(decision.data(), decision.data() + decision.size());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> candidates{0.0, -sorted.back() - 1.0, -sorted.front() + 1.0};
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        candidates.push_back(-0.5 * (sorted[k] + sorted[k + 1]));
    }
    if (std::isfinite(b_lo)) {
        candidates.push_back(b_lo);
    }
    if (std::isfinite(b_hi)) {
        candidates.push_back(b_hi);
    }
    if (std::isfinite(b_lo) && std::isfinite(b_hi)) {
        candidates.push_back(0.5 * (b_lo + b_hi));
    }

    double best_b = 0.0;
    double best_acc = -1.0;
    for (const double b : candidates) {
        if (b < b_lo || b > b_hi) {
            continue;
        }
        const double acc = training_accuracy(decision, labels, b);
        const bool better = acc > best_acc ||
                            (acc == best_acc && (std::abs(b) < std::abs(best_b) ||
                                                 (std::abs(b) == std::abs(best_b) && b < best_b)));
        if (better) {
            best_acc = acc;
            best_b = b;
        }
    }
    return best_b;
}

BiasResult bias_from_box(const Eigen::VectorXd &lower, const Eigen::VectorXd &upper,
                         const Eigen::Ref<const Eigen::VectorXd> &lambda, const WeightVector &weights, Tau tau,
                         const Eigen::Ref<const GramMatrix> &gram, const Eigen::Ref<const Eigen::VectorXd> &labels,
                         double tol) {
    const Eigen::Index l = labels.size();
    if (lambda.size() != l || weights.size() != l || gram.rows() != l || lower.size() != l) {
        throw std::invalid_argument("bias: inconsistent sizes");
    }
    const Eigen::VectorXd decision = gram * lambda.cwiseProduct(labels);

    double sum = 0.0;
    std::size_t count = 0;
    double b_lo = -inf;
    double b_hi = inf;
    for (Eigen::Index i = 0; i < l; ++i) {
        const double width = std::min(upper(i) - lower(i), (1.0 + std::abs(tau.value())) * weights(i));
        if (width <= 0.0) {
            continue;
        }
        const double eps = tol * width;
        const double candidate = labels(i) - decision(i);
        const bool off_lower = lambda(i) - lower(i) > eps;
        const bool off_upper = upper(i) - lambda(i) > eps;
        if (off_lower && off_upper) {
            sum += candidate;
            ++count;
            continue;
        }
        // at the lower bound y_i f(x_i) >= 1, at the upper bound y_i f(x_i) <= 1
        const bool at_lower = !off_lower;
        if (at_lower == (labels(i) > 0)) {
            b_lo = std::max(b_lo, candidate);
        } else {
            b_hi = std::min(b_hi, candidate);
        }
    }
    if (count > 0) {
        return {sum / static_cast<double>(count), count};
    }
    return {fallback_bias(decision, labels, b_lo, b_hi), 0};
}

}  // namespace

void validate(const TrainConfig &cfg) {
    if (!(cfg.c0 > 0.0) || !std::isfinite(cfg.c0)) {
        throw std::invalid_argument(fmt::format("C0 must be positive, got {}", cfg.c0));
    }
    if (!accepts(cfg.formulation, cfg.tau)) {
        throw std::invalid_argument(
            fmt::format("formulation {} does not accept tau = {}", to_string(cfg.formulation), cfg.tau.value()));
    }
}

double Model::decision_value(const Eigen::Ref<const Eigen::VectorXd> &x) const {
    if (x.size() != support_x.cols()) {
        throw std::invalid_argument(fmt::format("input has {} features, model expects {}", x.size(), support_x.cols()));
    }
    if (coeffs.size() == 0) {
        return bias;
    }
    return coeffs.dot(kernel_column(kernel, support_x, x)) + bias;
}

Eigen::VectorXd Model::linear_weights() const {
    return support_x.transpose() * coeffs;
}

Fit fit(const Dataset &train_set, const TrainConfig &cfg) {
    return fit(train_set, cfg, std::make_shared<const GramMatrix>(gram(cfg.kernel, train_set.features())));
}

Fit fit(const Dataset &train_set, const TrainConfig &cfg, const std::shared_ptr<const GramMatrix> &gram_matrix) {
    validate(cfg);
    const Eigen::VectorXd &y = train_set.labels();
    if (train_set.num_positive() == 0 || train_set.num_negative() == 0) {
        throw std::invalid_argument("training needs samples from both classes");
    }
    if (!gram_matrix || gram_matrix->rows() != y.size()) {
        throw std::invalid_argument("Gram matrix does not match the training set");
    }
    WeightVector weights = cfg.weighting ? class_weights(y, cfg.c0) : WeightVector::Constant(y.size(), cfg.c0);
    auto quad = std::make_shared<const Eigen::MatrixXd>(label_scaled_gram(*gram_matrix, y));
    BoxQP qp = build_dual(cfg.formulation, weights, cfg.tau, std::move(quad), y);

    DualSolution solution;
    if (cfg.tau.value() == -1.0) {
        // the box is the single point lambda = C
        const double imbalance = y.dot(weights);
        if (std::abs(imbalance) > 1e-10 * weights.sum()) {
            throw infeasible_problem(fmt::format(
                "tau = -1 forces lambda = C, which needs sum_i y_i C_i = 0 (got {:.6g}); enable class weighting",
                imbalance));
        }
        solution.lambda = weights;
        solution.objective = qp.objective(solution.lambda);
        solution.converged = true;
    } else {
        solution = solve_smo(qp, cfg.solver);
    }

    const BiasResult b = fit_bias(qp, solution.lambda, weights, cfg.tau, *gram_matrix, y);

    Fit out{Model{}, std::move(weights), std::move(qp), std::move(solution)};
    Model &model = out.model;
    model.kernel = cfg.kernel;
    model.bias = b.bias;
    model.config = cfg;
    model.normalization = train_set.normalization();

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (std::abs(out.solution.lambda(i)) > retain_threshold) {
            kept.push_back(i);
        }
    }
    model.support_x.resize(static_cast<Eigen::Index>(kept.size()), train_set.features().cols());
    model.coeffs.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        model.support_x.row(r) = train_set.features().row(kept[k]);
        model.coeffs(r) = out.solution.lambda(kept[k]) * y(kept[k]);
    }

    auto &diag = model.diagnostics;
    diag.iterations = out.solution.iterations;
    diag.dual_objective = out.solution.objective;
    diag.kkt_residual = out.solution.kkt_residual;
    diag.converged = out.solution.converged;
    diag.bias_support = b.support;
    if (out.qp.upper_cap) {
        diag.hit_upper_cap =
            ((out.solution.lambda.array() >= out.qp.upper.array() * (1.0 - 1e-12))).any();
    }
    return out;
}

Model train(const Dataset &train_set, const TrainConfig &cfg) {
    return fit(train_set, cfg).model;
}

BiasResult fit_bias(const BoxQP &qp, const Eigen::Ref<const Eigen::VectorXd> &lambda, const WeightVector &weights,
                    Tau tau, const Eigen::Ref<const GramMatrix> &gram, const Eigen::Ref<const Eigen::VectorXd> &labels,
                    double tol) {
    return bias_from_box(qp.lower, qp.upper, lambda, weights, tau, gram, labels, tol);
}

double bias(const Eigen::Ref<const Eigen::VectorXd> &lambda, const WeightVector &weights, Tau tau,
            const Eigen::Ref<const GramMatrix> &gram, const Eigen::Ref<const Eigen::VectorXd> &labels, double tol) {
    const Eigen::VectorXd lower = -tau.value() * weights;
    return bias_from_box(lower, weights, lambda, weights, tau, gram, labels, tol).bias;
}

int predict(const Model &model, const Eigen::Ref<const Eigen::VectorXd> &x) {
    return model.decision_value(x) >= 0.0 ? 1 : -1;
}

double accuracy(const Model &model, const Dataset &test) {
    if (test.size() == 0) {
        throw std::invalid_argument("accuracy needs a nonempty test set");
    }
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < test.features().rows(); ++i) {
        const int p = predict(model, test.features().row(i).transpose());
        hits += static_cast<double>(p) == test.labels()(i) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

}  // namespace pinsvm
