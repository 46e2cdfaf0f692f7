#include "pinsvm/loss.hpp"

#include <fmt/core.h>

#include <cmath>
#include <stdexcept>

namespace pinsvm {

Tau::Tau(double value) : value_(value) {
    if (!(value >= -1.0 && value <= 1.0)) {
        throw std::invalid_argument(fmt::format("tau must lie in [-1, 1], got {}", value));
    }
}

Eigen::VectorXd margin_residuals(const Eigen::Ref<const Eigen::VectorXd> &lambda, double bias,
                                 const Eigen::Ref<const GramMatrix> &gram,
                                 const Eigen::Ref<const Eigen::VectorXd> &labels) {
    if (lambda.size() != labels.size() || gram.rows() != labels.size() || gram.cols() != labels.size()) {
        throw std::invalid_argument("margin_residuals: inconsistent sizes");
    }
    const Eigen::VectorXd f = gram * lambda.cwiseProduct(labels);
    return (1.0 - labels.array() * (f.array() + bias)).matrix();
}

double primal_objective(const Eigen::Ref<const Eigen::VectorXd> &lambda, double bias,
                        const Eigen::Ref<const GramMatrix> &gram, const Eigen::Ref<const Eigen::VectorXd> &labels,
                        const WeightVector &weights, Tau tau) {
    if (weights.size() != labels.size()) {
        throw std::invalid_argument("primal_objective: weights and labels differ in size");
    }
    const Eigen::VectorXd u = margin_residuals(lambda, bias, gram, labels);
    const Eigen::VectorXd signed_lambda = lambda.cwiseProduct(labels);
    double risk = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        risk += weights(i) * pinball(u(i), tau);
    }
    return 0.5 * signed_lambda.dot(gram * signed_lambda) + risk;
}

}  // namespace pinsvm
