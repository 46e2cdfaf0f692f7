#pragma once

#include "pinsvm/dual.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pinsvm {

struct SolverConfig {
    /// Stopping threshold on the maximal violating pair gap.
    double tol = 1e-6;
    std::size_t max_iter = 10'000'000;
    /// Fixes the scan order used to break ties between equally violating pairs.
    std::uint64_t seed = 0;
    /// Record the objective after every pair update in DualSolution::trace.
    bool record_trace = false;
};

struct DualSolution {
    Eigen::VectorXd lambda;
    /// 1/2 lambda'Q lambda + linear'lambda
    double objective = 0.0;
    std::size_t iterations = 0;
    double kkt_residual = 0.0;
    bool converged = false;
    std::vector<double> trace;
};

/**
 * SMO on a BoxQP with a single +-1 equality constraint.
 *
 * Starts from the lower corner of the box, repairs the equality constraint, then
 * repeatedly moves the maximal violating pair by an exact clipped line search.
 * Throws infeasible_problem when the box is empty or the equality cannot be met.
 * When max_iter is exhausted the last (best) iterate is returned with converged = false.
 */
[[nodiscard]] DualSolution solve_smo(const BoxQP &qp, const SolverConfig &cfg = {});

/**
 * Dense projected-gradient reference solver, used as an oracle for solve_smo.
 *
 * Iterates spectral projected-gradient steps with an exact projection onto
 * {box} ∩ {eq_coeffs'x = eq_rhs}, polishing each iterate with a Newton step on the
 * face of currently active bounds. Requires qp.size() <= reference_max_size.
 */
[[nodiscard]] DualSolution solve_reference(const BoxQP &qp, const SolverConfig &cfg = {});

inline constexpr Eigen::Index reference_max_size = 500;

/// Euclidean projection of `point` onto {lower <= x <= upper, eq_coeffs'x = eq_rhs}.
/// Throws infeasible_problem if that set is empty.
[[nodiscard]] Eigen::VectorXd project_feasible(const BoxQP &qp, const Eigen::Ref<const Eigen::VectorXd> &point);

/// Largest projected-gradient KKT violation of `lambda` with the equality multiplier
/// estimated from the free coordinates (midpoint of their max/min), or from the
/// bound-derived interval when no coordinate is free. Zero for a point-feasible box.
[[nodiscard]] double kkt_residual(const BoxQP &qp, const Eigen::Ref<const Eigen::VectorXd> &lambda);

}  // namespace pinsvm
