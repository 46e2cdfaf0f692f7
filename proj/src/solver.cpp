#include "pinsvm/solver.hpp"

#include "pinsvm/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pinsvm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_shape(const BoxQP &qp) {
    const Eigen::Index l = qp.size();
    if (!qp.quad || qp.q().rows() != l || qp.q().cols() != l || qp.lower.size() != l || qp.upper.size() != l ||
        qp.eq_coeffs.size() != l) {
        throw std::invalid_argument("BoxQP fields have inconsistent sizes");
    }
    for (Eigen::Index i = 0; i < l; ++i) {
        if (qp.lower(i) > qp.upper(i)) {
            throw infeasible_problem(
                fmt::format("empty box at coordinate {}: lower {} > upper {}", i, qp.lower(i), qp.upper(i)));
        }
    }
}

// Moves coordinates up from the lower corner until eq_coeffs'x = eq_rhs.
Eigen::VectorXd smo_initial_point(const BoxQP &qp) {
    Eigen::VectorXd x = qp.lower;
    double excess = qp.eq_coeffs.dot(x) - qp.eq_rhs;
    const double eps = 1e-10 * (1.0 + qp.lower.cwiseAbs().sum());
    if (std::abs(excess) <= eps) {
        return x;
    }
    // raising coordinate i changes the constraint by eq_coeffs(i) per unit
    const double wanted_sign = excess > 0.0 ? -1.0 : 1.0;
    for (Eigen::Index i = 0; i < x.size() && std::abs(excess) > eps; ++i) {
        if (qp.eq_coeffs(i) != wanted_sign) {
            continue;
        }
        const double step = std::min(qp.upper(i) - qp.lower(i), std::abs(excess));
        x(i) += step;
        excess += wanted_sign * step;
    }
    if (std::abs(excess) > eps) {
        throw infeasible_problem(
            fmt::format("equality constraint cannot be met inside the box (residual {:.3g})", excess));
    }
    return x;
}

}  // namespace

DualSolution solve_smo(const BoxQP &qp, const SolverConfig &cfg) {
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1) {
        throw std::invalid_argument("solver config needs tol > 0 and max_iter >= 1");
    }
    check_shape(qp);
    const Eigen::Index l = qp.size();
    for (Eigen::Index i = 0; i < l; ++i) {
        if (std::abs(qp.eq_coeffs(i)) != 1.0) {
            throw std::invalid_argument("solve_smo requires equality coefficients of +-1");
        }
    }
    const Eigen::MatrixXd &q = qp.q();
    const Eigen::VectorXd &a = qp.eq_coeffs;
    const Eigen::VectorXd &lo = qp.lower;
    const Eigen::VectorXd &up = qp.upper;

    DualSolution sol;
    sol.lambda = smo_initial_point(qp);
    Eigen::VectorXd &x = sol.lambda;
    Eigen::VectorXd grad = q * x + qp.linear;
    double objective = 0.5 * x.dot(grad - qp.linear) + qp.linear.dot(x);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(l));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);

    // floating drift in the incremental gradient is flushed periodically
    const std::size_t refresh_every = std::max<std::size_t>(1000, static_cast<std::size_t>(l));

    std::size_t iter = 0;
    bool converged = false;
    while (true) {
        double m_up = -inf;
        double m_low = inf;
        Eigen::Index i = -1;
        Eigen::Index j = -1;
        for (const Eigen::Index k : order) {
            const double v = -a(k) * grad(k);
            const bool can_rise = a(k) > 0 ? x(k) < up(k) : x(k) > lo(k);
            const bool can_fall = a(k) > 0 ? x(k) > lo(k) : x(k) < up(k);
            if (can_rise && v > m_up) {
                m_up = v;
                i = k;
            }
            if (can_fall && v < m_low) {
                m_low = v;
                j = k;
            }
        }
        if (i < 0 || j < 0 || m_up - m_low <= cfg.tol) {
            converged = true;
            break;
        }
        if (iter >= cfg.max_iter) {
            break;
        }

        // x_i += a_i t, x_j -= a_j t keeps a'x fixed
        const double slope = m_low - m_up;
        const double curvature = q(i, i) + q(j, j) - 2.0 * a(i) * a(j) * q(i, j);
        const double room_i = a(i) > 0 ? up(i) - x(i) : x(i) - lo(i);
        const double room_j = a(j) > 0 ? x(j) - lo(j) : up(j) - x(j);
        const double room = std::min(room_i, room_j);
        double t = room;
        if (curvature > 0.0) {
            t = std::min(-slope / curvature, room);
        }

        const double old_i = x(i);
        const double old_j = x(j);
        if (t == room_i) {
            x(i) = a(i) > 0 ? up(i) : lo(i);
        } else {
            x(i) = std::clamp(x(i) + a(i) * t, lo(i), up(i));
        }
        if (t == room_j) {
            x(j) = a(j) > 0 ? lo(j) : up(j);
        } else {
            x(j) = std::clamp(x(j) - a(j) * t, lo(j), up(j));
        }
        grad += q.col(i) * (x(i) - old_i) + q.col(j) * (x(j) - old_j);
        objective += slope * t + 0.5 * curvature * t * t;
        ++iter;

        if (iter % refresh_every == 0) {
            grad = q * x + qp.linear;
            objective = qp.objective(x);
        }
        if (cfg.record_trace) {
            sol.trace.push_back(objective);
        }
    }

    sol.iterations = iter;
    sol.converged = converged;
    sol.objective = qp.objective(x);
    sol.kkt_residual = kkt_residual(qp, x);
    return sol;
}

double kkt_residual(const BoxQP &qp, const Eigen::Ref<const Eigen::VectorXd> &lambda) {
    const Eigen::Index l = qp.size();
    const Eigen::VectorXd grad = qp.q() * lambda + qp.linear;
    const Eigen::VectorXd &a = qp.eq_coeffs;

    enum class State { point, lower, upper, free };
    std::vector<State> state(static_cast<std::size_t>(l));
    double free_max = -inf;
    double free_min = inf;
    double rho_lo = -inf;
    double rho_hi = inf;
    for (Eigen::Index i = 0; i < l; ++i) {
        const double lo = qp.lower(i);
        const double up = qp.upper(i);
        const double eps = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(up)));
        auto &s = state[static_cast<std::size_t>(i)];
        if (up - lo <= eps) {
            s = State::point;
            continue;
        }
        if (lambda(i) <= lo + eps) {
            s = State::lower;
        } else if (lambda(i) >= up - eps) {
            s = State::upper;
        } else {
            s = State::free;
        }
        if (a(i) == 0.0) {
            continue;
        }
        // optimality needs grad_i + rho a_i >= 0 at lower, <= 0 at upper, = 0 when free
        const double v = -grad(i) / a(i);
        if (s == State::free) {
            free_max = std::max(free_max, v);
            free_min = std::min(free_min, v);
        } else if ((s == State::lower) == (a(i) > 0)) {
            rho_lo = std::max(rho_lo, v);
        } else {
            rho_hi = std::min(rho_hi, v);
        }
    }

    double rho = 0.0;
    if (free_max > -inf) {
        rho = 0.5 * (free_max + free_min);
    } else if (rho_lo > -inf && rho_hi < inf) {
        rho = 0.5 * (rho_lo + rho_hi);
    } else if (rho_lo > -inf) {
        rho = rho_lo;
    } else if (rho_hi < inf) {
        rho = rho_hi;
    }

    double worst = 0.0;
    for (Eigen::Index i = 0; i < l; ++i) {
        const double r = grad(i) + rho * a(i);
        switch (state[static_cast<std::size_t>(i)]) {
        case State::point:
            break;
        case State::lower:
            worst = std::max(worst, -r);
            break;
        case State::upper:
            worst = std::max(worst, r);
            break;
        case State::free:
            worst = std::max(worst, std::abs(r));
            break;
        }
    }
    return worst;
}

}  // namespace pinsvm
