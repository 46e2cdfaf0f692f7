#include "pinsvm/dual.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinsvm {

namespace {

void check_sizes(const WeightVector &weights, const Eigen::MatrixXd *quad, const Eigen::VectorXd &labels) {
    if (quad == nullptr) {
        throw std::invalid_argument("dual builder: missing quadratic term");
    }
    if (weights.size() != labels.size() || quad->rows() != labels.size() || quad->cols() != labels.size()) {
        throw std::invalid_argument(fmt::format("dual builder: sizes differ (C {}, Q {}x{}, y {})", weights.size(),
                                                quad->rows(), quad->cols(), labels.size()));
    }
    if ((weights.array() <= 0.0).any()) {
        throw std::invalid_argument("dual builder: weights must be positive");
    }
}

// Builds the box by pushing the admissible alpha range [alpha_lo, alpha_hi] through
// the formulation's own lambda(alpha, C) map (increasing in alpha for tau > -1).
template <typename LambdaOf, typename AlphaLo, typename AlphaHi>
BoxQP assemble(const WeightVector &weights, std::shared_ptr<const Eigen::MatrixXd> quad,
               const Eigen::VectorXd &labels, LambdaOf lambda_of, AlphaLo alpha_lo, AlphaHi alpha_hi) {
    check_sizes(weights, quad.get(), labels);
    const Eigen::Index l = labels.size();
    BoxQP qp;
    qp.quad = std::move(quad);
    qp.linear = Eigen::VectorXd::Constant(l, -1.0);
    qp.lower.resize(l);
    qp.upper.resize(l);
    for (Eigen::Index i = 0; i < l; ++i) {
        const double c = weights(i);
        qp.lower(i) = lambda_of(alpha_lo(c), c);
        qp.upper(i) = lambda_of(alpha_hi(c), c);
    }
    qp.eq_coeffs = labels;
    qp.eq_rhs = 0.0;
    return qp;
}

}  // namespace

double BoxQP::objective(const Eigen::Ref<const Eigen::VectorXd> &x) const {
    return 0.5 * x.dot(q() * x) + linear.dot(x);
}

std::string to_string(Formulation f) {
    switch (f) {
    case Formulation::unified:
        return "unified";
    case Formulation::legacy_positive:
        return "legacy-pos";
    case Formulation::corrected_negative:
        return "corrected-neg";
    case Formulation::incorrect_negative:
        return "incorrect-neg";
    }
    return "?";
}

Formulation parse_formulation(const std::string &name) {
    for (auto f : {Formulation::unified, Formulation::legacy_positive, Formulation::corrected_negative,
                   Formulation::incorrect_negative}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw std::invalid_argument(fmt::format("unknown formulation '{}'", name));
}

bool accepts(Formulation f, Tau tau) noexcept {
    const double t = tau.value();
    switch (f) {
    case Formulation::unified:
        return true;
    case Formulation::legacy_positive:
        return t >= 0.0;
    case Formulation::corrected_negative:
        return t < 0.0;
    case Formulation::incorrect_negative:
        return t < 0.0 && t > -1.0;
    }
    return false;
}

BoxQP reduce_unified(const WeightVector &weights, Tau tau, std::shared_ptr<const Eigen::MatrixXd> quad,
                     const Eigen::VectorXd &labels) {
    const double t = tau.value();
    const double abs_tau = std::abs(t);
    const double s = tau.signum();
    // beta := |tau| beta turns C - alpha - beta/|tau| = 0 into beta = |tau| (C - alpha)
    auto lambda_of = [=](double alpha, double c) { return alpha - s * (abs_tau * (c - alpha)); };
    return assemble(
        weights, std::move(quad), labels, lambda_of, [](double) { return 0.0; }, [](double c) { return c; });
}

BoxQP reduce_legacy_positive(const WeightVector &weights, Tau tau, std::shared_ptr<const Eigen::MatrixXd> quad,
                             const Eigen::VectorXd &labels) {
    const double t = tau.value();
    if (t < 0.0) {
        throw std::invalid_argument(fmt::format("legacy positive dual requires tau >= 0, got {}", t));
    }
    // C - alpha - beta/tau = 0  =>  beta = tau (C - alpha); lambda = alpha - beta
    auto lambda_of = [=](double alpha, double c) { return alpha - t * (c - alpha); };
    return assemble(
        weights, std::move(quad), labels, lambda_of, [](double) { return 0.0; }, [](double c) { return c; });
}

BoxQP reduce_corrected_negative(const WeightVector &weights, Tau tau, std::shared_ptr<const Eigen::MatrixXd> quad,
                                const Eigen::VectorXd &labels) {
    const double t = tau.value();
    if (t >= 0.0) {
        throw std::invalid_argument(fmt::format("corrected negative dual requires tau < 0, got {}", t));
    }
    // C - alpha + beta/tau = 0  =>  beta = tau (alpha - C) >= 0; lambda = alpha + beta
    auto lambda_of = [=](double alpha, double c) { return alpha + t * (alpha - c); };
    return assemble(
        weights, std::move(quad), labels, lambda_of, [](double) { return 0.0; }, [](double c) { return c; });
}

BoxQP build_incorrect_negative(const WeightVector &weights, Tau tau, std::shared_ptr<const Eigen::MatrixXd> quad,
                               const Eigen::VectorXd &labels) {
    const double t = tau.value();
    if (!(t < 0.0 && t > -1.0)) {
        throw std::invalid_argument(fmt::format("incorrect negative baseline requires -1 < tau < 0, got {}", t));
    }
    // C - alpha - beta/tau = 0 with tau < 0  =>  beta = tau (C - alpha) >= 0 iff alpha >= C
    auto lambda_of = [=](double alpha, double c) { return alpha - t * (c - alpha); };
    auto qp = assemble(
        weights, std::move(quad), labels, lambda_of, [](double c) { return c; }, [](double c) { return c; });
    // alpha is unbounded above; cap lambda instead
    qp.upper = incorrect_upper_cap * weights;
    qp.upper_cap = incorrect_upper_cap;
    return qp;
}

BoxQP build_dual(Formulation f, const WeightVector &weights, Tau tau, std::shared_ptr<const Eigen::MatrixXd> quad,
                 const Eigen::VectorXd &labels) {
    switch (f) {
    case Formulation::unified:
        return reduce_unified(weights, tau, std::move(quad), labels);
    case Formulation::legacy_positive:
        return reduce_legacy_positive(weights, tau, std::move(quad), labels);
    case Formulation::corrected_negative:
        return reduce_corrected_negative(weights, tau, std::move(quad), labels);
    case Formulation::incorrect_negative:
        return build_incorrect_negative(weights, tau, std::move(quad), labels);
    }
    throw std::invalid_argument("unknown formulation");
}

AlphaBeta recover_alpha_beta(const Eigen::Ref<const Eigen::VectorXd> &lambda, const WeightVector &weights, Tau tau) {
    const double t = tau.value();
    if (t == -1.0) {
        throw std::domain_error("alpha is indeterminate at tau = -1 (the box collapses to lambda = C)");
    }
    if (lambda.size() != weights.size()) {
        throw std::invalid_argument("recover_alpha_beta: sizes differ");
    }
    AlphaBeta out{Eigen::VectorXd(lambda.size()), Eigen::VectorXd(lambda.size())};
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double c = weights(i);
        const double lo = -t * c;
        if (lambda(i) < lo - recover_tolerance || lambda(i) > c + recover_tolerance) {
            throw std::invalid_argument(
                fmt::format("lambda[{}] = {} outside [{}, {}]", i, lambda(i), lo, c));
        }
        const double alpha = std::clamp((lambda(i) + t * c) / (1.0 + t), 0.0, c);
        out.alpha(i) = alpha;
        out.beta(i) = std::abs(t) * (c - alpha);
    }
    return out;
}

}  // namespace pinsvm
