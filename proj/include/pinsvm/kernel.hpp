#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace pinsvm {

enum class KernelKind { linear, rbf };

/// Kernel identity. For RBF, k(x, y) = exp(-||x - y||^2 / (2 q^2)).
class KernelSpec {
  public:
    [[nodiscard]] static KernelSpec linear() noexcept { return KernelSpec(KernelKind::linear, 0.0); }
    /// Throws std::invalid_argument unless q > 0.
    [[nodiscard]] static KernelSpec rbf(double q);

    [[nodiscard]] KernelKind kind() const noexcept { return kind_; }
    /// RBF width; 0 for the linear kernel.
    [[nodiscard]] double q() const noexcept { return q_; }

    friend bool operator==(const KernelSpec &, const KernelSpec &) = default;

  private:
    KernelSpec(KernelKind kind, double q) noexcept : kind_(kind), q_(q) {}

    KernelKind kind_;
    double q_;
};

[[nodiscard]] std::string to_string(KernelKind kind);
/// Accepts "linear" and "rbf"; throws std::invalid_argument otherwise.
[[nodiscard]] KernelKind parse_kernel_kind(const std::string &name);

using GramMatrix = Eigen::MatrixXd;

[[nodiscard]] double kernel_eval(const KernelSpec &spec, const Eigen::Ref<const Eigen::VectorXd> &x,
                                 const Eigen::Ref<const Eigen::VectorXd> &y);

/// K_ij = k(x_i, x_j) over the rows of X; only the upper triangle is evaluated.
[[nodiscard]] GramMatrix gram(const KernelSpec &spec, const Eigen::Ref<const Eigen::MatrixXd> &rows);

/// k(x_j, x) for every row x_j of `rows`.
[[nodiscard]] Eigen::VectorXd kernel_column(const KernelSpec &spec, const Eigen::Ref<const Eigen::MatrixXd> &rows,
                                            const Eigen::Ref<const Eigen::VectorXd> &x);

/// Q_ij = y_i y_j K_ij.
[[nodiscard]] Eigen::MatrixXd label_scaled_gram(const Eigen::Ref<const GramMatrix> &gram,
                                                const Eigen::Ref<const Eigen::VectorXd> &labels);

}  // namespace pinsvm
