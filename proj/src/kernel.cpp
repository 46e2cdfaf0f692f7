#include "pinsvm/kernel.hpp"

#include <fmt/core.h>

#include <cmath>
#include <stdexcept>

namespace pinsvm {

KernelSpec KernelSpec::rbf(double q) {
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument(fmt::format("RBF width q must be positive, got {}", q));
    }
    return KernelSpec(KernelKind::rbf, q);
}

std::string to_string(KernelKind kind) {
    return kind == KernelKind::linear ? "linear" : "rbf";
}

KernelKind parse_kernel_kind(const std::string &name) {
    if (name == "linear") {
        return KernelKind::linear;
    }
    if (name == "rbf") {
        return KernelKind::rbf;
    }
    throw std::invalid_argument(fmt::format("unknown kernel '{}'", name));
}

double kernel_eval(const KernelSpec &spec, const Eigen::Ref<const Eigen::VectorXd> &x,
                   const Eigen::Ref<const Eigen::VectorXd> &y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument(fmt::format("kernel arguments differ in dimension ({} vs {})", x.size(), y.size()));
    }
    if (spec.kind() == KernelKind::linear) {
        return x.dot(y);
    }
    return std::exp(-(x - y).squaredNorm() / (2.0 * spec.q() * spec.q()));
}

GramMatrix gram(const KernelSpec &spec, const Eigen::Ref<const Eigen::MatrixXd> &rows) {
    const Eigen::Index l = rows.rows();
    GramMatrix k(l, l);
    if (spec.kind() == KernelKind::linear) {
        for (Eigen::Index i = 0; i < l; ++i) {
            for (Eigen::Index j = i; j < l; ++j) {
                k(i, j) = k(j, i) = rows.row(i).dot(rows.row(j));
            }
        }
        return k;
    }
    const double denom = 2.0 * spec.q() * spec.q();
    for (Eigen::Index i = 0; i < l; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < l; ++j) {
            k(i, j) = k(j, i) = std::exp(-(rows.row(i) - rows.row(j)).squaredNorm() / denom);
        }
    }
    return k;
}

Eigen::VectorXd kernel_column(const KernelSpec &spec, const Eigen::Ref<const Eigen::MatrixXd> &rows,
                              const Eigen::Ref<const Eigen::VectorXd> &x) {
    if (rows.cols() != x.size()) {
        throw std::invalid_argument(
            fmt::format("input has {} features, expected {}", x.size(), rows.cols()));
    }
    Eigen::VectorXd out(rows.rows());
    for (Eigen::Index j = 0; j < rows.rows(); ++j) {
        out(j) = kernel_eval(spec, rows.row(j).transpose(), x);
    }
    return out;
}

Eigen::MatrixXd label_scaled_gram(const Eigen::Ref<const GramMatrix> &gram,
                                  const Eigen::Ref<const Eigen::VectorXd> &labels) {
    if (gram.rows() != labels.size() || gram.cols() != labels.size()) {
        throw std::invalid_argument(
            fmt::format("Gram matrix is {}x{} but there are {} labels", gram.rows(), gram.cols(), labels.size()));
    }
    return labels.asDiagonal() * gram * labels.asDiagonal();
}

}  // namespace pinsvm
