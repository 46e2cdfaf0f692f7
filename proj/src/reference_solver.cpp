#include "pinsvm/error.hpp"
#include "pinsvm/solver.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pinsvm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// eq_coeffs' clip(point - mu * eq_coeffs) - eq_rhs, non-increasing in mu
double constraint_gap(const BoxQP &qp, const Eigen::Ref<const Eigen::VectorXd> &point, double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < point.size(); ++i) {
        const double a = qp.eq_coeffs(i);
        s += a * std::clamp(point(i) - mu * a, qp.lower(i), qp.upper(i));
    }
    return s - qp.eq_rhs;
}

double step_to_boundary(const BoxQP &qp, const Eigen::VectorXd &x, const Eigen::VectorXd &d) {
    double t = inf;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (d(i) > 0.0) {
            t = std::min(t, (qp.upper(i) - x(i)) / d(i));
        } else if (d(i) < 0.0) {
            t = std::min(t, (qp.lower(i) - x(i)) / d(i));
        }
    }
    return std::max(t, 0.0);
}

}  // namespace

Eigen::VectorXd project_feasible(const BoxQP &qp, const Eigen::Ref<const Eigen::VectorXd> &point) {
    const Eigen::Index l = qp.size();
    for (Eigen::Index i = 0; i < l; ++i) {
        if (qp.lower(i) > qp.upper(i)) {
            throw infeasible_problem(fmt::format("empty box at coordinate {}", i));
        }
    }
    double reach_hi = -qp.eq_rhs;
    double reach_lo = -qp.eq_rhs;
    std::vector<double> breaks;
    breaks.reserve(2 * static_cast<std::size_t>(l));
    for (Eigen::Index i = 0; i < l; ++i) {
        const double a = qp.eq_coeffs(i);
        reach_hi += a > 0 ? a * qp.upper(i) : a * qp.lower(i);
        reach_lo += a > 0 ? a * qp.lower(i) : a * qp.upper(i);
        if (a != 0.0) {
            breaks.push_back((point(i) - qp.lower(i)) / a);
            breaks.push_back((point(i) - qp.upper(i)) / a);
        }
    }
    const double eps = 1e-10 * (1.0 + qp.lower.cwiseAbs().sum());
    if (reach_hi < -eps || reach_lo > eps) {
        throw infeasible_problem("equality constraint cannot be met inside the box");
    }
    if (breaks.empty()) {
        return point.cwiseMax(qp.lower).cwiseMin(qp.upper);
    }
    std::sort(breaks.begin(), breaks.end());

    // the gap is piecewise linear between consecutive breakpoints; find the piece
    // holding the root by bisection over the sorted list, then interpolate exactly
    std::size_t lo_idx = 0;
    std::size_t hi_idx = breaks.size() - 1;
    double mu = 0.0;
    const double g_first = constraint_gap(qp, point, breaks.front());
    const double g_last = constraint_gap(qp, point, breaks.back());
    if (g_first <= 0.0) {
        mu = breaks.front();
    } else if (g_last >= 0.0) {
        mu = breaks.back();
    } else {
        while (hi_idx - lo_idx > 1) {
            const std::size_t mid = (lo_idx + hi_idx) / 2;
            if (constraint_gap(qp, point, breaks[mid]) > 0.0) {
                lo_idx = mid;
            } else {
                hi_idx = mid;
            }
        }
        const double m0 = breaks[lo_idx];
        const double m1 = breaks[hi_idx];
        const double g0 = constraint_gap(qp, point, m0);
        const double g1 = constraint_gap(qp, point, m1);
        mu = g0 == g1 ? m0 : m0 + (m1 - m0) * g0 / (g0 - g1);
    }
    Eigen::VectorXd out(l);
    for (Eigen::Index i = 0; i < l; ++i) {
        out(i) = std::clamp(point(i) - mu * qp.eq_coeffs(i), qp.lower(i), qp.upper(i));
    }
    return out;
}

DualSolution solve_reference(const BoxQP &qp, const SolverConfig &cfg) {
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1) {
        throw std::invalid_argument("solver config needs tol > 0 and max_iter >= 1");
    }
    const Eigen::Index l = qp.size();
    if (l > reference_max_size) {
        throw std::invalid_argument(
            fmt::format("reference solver is dense and limited to {} variables, got {}", reference_max_size, l));
    }
    if (!qp.quad || qp.q().rows() != l || qp.lower.size() != l || qp.upper.size() != l || qp.eq_coeffs.size() != l) {
        throw std::invalid_argument("BoxQP fields have inconsistent sizes");
    }
    const Eigen::MatrixXd &q = qp.q();

    DualSolution sol;
    Eigen::VectorXd x = project_feasible(qp, qp.lower);
    Eigen::VectorXd grad = q * x + qp.linear;
    double f = qp.objective(x);

    constexpr double step_min = 1e-12;
    constexpr double step_max = 1e12;
    double step = 1.0;
    {
        const Eigen::VectorXd probe = project_feasible(qp, x - grad) - x;
        const double norm = probe.cwiseAbs().maxCoeff();
        step = norm > 0.0 ? std::clamp(1.0 / norm, step_min, step_max) : 1.0;
    }

    std::vector<bool> prev_free(static_cast<std::size_t>(l), false);
    std::size_t iter = 0;
    bool converged = false;
    while (true) {
        if (kkt_residual(qp, x) <= cfg.tol) {
            converged = true;
            break;
        }
        if (iter >= cfg.max_iter) {
            break;
        }
        ++iter;

        // spectral projected-gradient step with exact line search on the segment
        const Eigen::VectorXd d = project_feasible(qp, x - step * grad) - x;
        const double gd = grad.dot(d);
        if (gd < 0.0) {
            const Eigen::VectorXd qd = q * d;
            const double dqd = d.dot(qd);
            const double t = dqd > 0.0 ? std::min(1.0, -gd / dqd) : 1.0;
            x += t * d;
            x = x.cwiseMax(qp.lower).cwiseMin(qp.upper);
            grad += t * qd;
            const double ss = t * t * d.squaredNorm();
            const double sy = t * t * dqd;
            step = sy > 0.0 ? std::clamp(ss / sy, step_min, step_max) : step_max;
        } else {
            step = std::max(step * 0.5, step_min);
        }

        // once the free set repeats, minimize exactly on that face
        std::vector<Eigen::Index> free_idx;
        std::vector<bool> is_free(static_cast<std::size_t>(l), false);
        for (Eigen::Index i = 0; i < l; ++i) {
            const double eps = 1e-12 * (1.0 + std::abs(qp.lower(i)) + std::abs(qp.upper(i)));
            if (x(i) > qp.lower(i) + eps && x(i) < qp.upper(i) - eps) {
                free_idx.push_back(i);
                is_free[static_cast<std::size_t>(i)] = true;
            }
        }
        const bool stable = is_free == prev_free;
        prev_free = is_free;
        if (!stable || free_idx.empty()) {
            f = qp.objective(x);
            continue;
        }

        const auto nf = static_cast<Eigen::Index>(free_idx.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + 1, nf + 1);
        Eigen::VectorXd rhs(nf + 1);
        for (Eigen::Index r = 0; r < nf; ++r) {
            const Eigen::Index ir = free_idx[static_cast<std::size_t>(r)];
            for (Eigen::Index c = 0; c < nf; ++c) {
                kkt(r, c) = q(ir, free_idx[static_cast<std::size_t>(c)]);
            }
            kkt(r, nf) = kkt(nf, r) = qp.eq_coeffs(ir);
            rhs(r) = -grad(ir);
        }
        rhs(nf) = 0.0;
        const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
        Eigen::VectorXd newton = cod.solve(rhs);
        const bool consistent = (kkt * newton - rhs).norm() <= 1e-9 * (1.0 + rhs.norm());

        Eigen::VectorXd g_f(nf);
        Eigen::VectorXd a_f(nf);
        for (Eigen::Index r = 0; r < nf; ++r) {
            g_f(r) = grad(free_idx[static_cast<std::size_t>(r)]);
            a_f(r) = qp.eq_coeffs(free_idx[static_cast<std::size_t>(r)]);
        }
        // steepest descent within the face's equality hyperplane when the face is unbounded
        Eigen::VectorXd d_f = consistent ? Eigen::VectorXd(newton.head(nf)) : Eigen::VectorXd(-g_f);
        const double aa = a_f.squaredNorm();
        if (aa > 0.0) {
            d_f -= (a_f.dot(d_f) / aa) * a_f;
        }
        Eigen::VectorXd d_face = Eigen::VectorXd::Zero(l);
        for (Eigen::Index r = 0; r < nf; ++r) {
            d_face(free_idx[static_cast<std::size_t>(r)]) = d_f(r);
        }
        const double slope = grad.dot(d_face);
        if (!(slope < 0.0)) {
            f = qp.objective(x);
            continue;
        }
        const Eigen::VectorXd qd = q * d_face;
        const double curv = d_face.dot(qd);
        const double t_box = step_to_boundary(qp, x, d_face);
        // a Newton direction already has its minimizer at t = 1
        double t = consistent ? std::min(1.0, t_box) : (curv > 0.0 ? std::min(-slope / curv, t_box) : t_box);
        if (!std::isfinite(t)) {
            f = qp.objective(x);
            continue;
        }
        Eigen::VectorXd candidate = (x + t * d_face).cwiseMax(qp.lower).cwiseMin(qp.upper);
        const double f_candidate = qp.objective(candidate);
        f = qp.objective(x);
        if (f_candidate <= f) {
            x = std::move(candidate);
            grad = q * x + qp.linear;
            f = f_candidate;
        }
    }

    sol.lambda = std::move(x);
    sol.iterations = iter;
    sol.converged = converged;
    sol.objective = qp.objective(sol.lambda);
    sol.kkt_residual = kkt_residual(qp, sol.lambda);
    return sol;
}

}  // namespace pinsvm
