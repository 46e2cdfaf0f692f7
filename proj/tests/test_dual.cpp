#include "pinsvm/dual.hpp"
#include "pinsvm/error.hpp"
#include "pinsvm/solver.hpp"

#include "support/instances.hpp"

#include <gtest/gtest.h>

using namespace pinsvm;
using testing_support::combine;
using testing_support::random_instance;
using testing_support::unreduced_dual;

namespace {

std::shared_ptr<const Eigen::MatrixXd> identity_quad(Eigen::Index l) {
    return std::make_shared<const Eigen::MatrixXd>(Eigen::MatrixXd::Identity(l, l));
}

void expect_same_qp(const BoxQP &a, const BoxQP &b) {
    EXPECT_EQ(a.quad, b.quad);
    EXPECT_EQ(a.linear, b.linear);
    EXPECT_EQ(a.lower, b.lower);
    EXPECT_EQ(a.upper, b.upper);
    EXPECT_EQ(a.eq_coeffs, b.eq_coeffs);
    EXPECT_EQ(a.eq_rhs, b.eq_rhs);
    EXPECT_EQ(a.upper_cap, b.upper_cap);
}

SolverConfig tight() {
    SolverConfig cfg;
    cfg.tol = 1e-10;
    return cfg;
}

}  // namespace

TEST(ReduceUnified, BoundExamples) {
    const Eigen::Vector2d c = Eigen::Vector2d::Ones();
    const Eigen::Vector2d y(1, -1);
    const auto half = reduce_unified(c, Tau(0.5), identity_quad(2), y);
    EXPECT_EQ(half.lower, Eigen::Vector2d(-0.5, -0.5));
    EXPECT_EQ(half.upper, Eigen::Vector2d(1, 1));
    EXPECT_EQ(half.linear, -Eigen::Vector2d::Ones());
    EXPECT_EQ(half.eq_coeffs, y);
    EXPECT_EQ(half.eq_rhs, 0.0);

    const auto hinge = reduce_unified(c, Tau(0.0), identity_quad(2), y);
    EXPECT_EQ(hinge.lower, Eigen::Vector2d::Zero());
    EXPECT_EQ(hinge.upper, c);

    const Eigen::Vector3d c3(2, 1, 1);
    const auto point = reduce_unified(c3, Tau(-1.0), identity_quad(3), Eigen::Vector3d(1, -1, -1));
    EXPECT_EQ(point.lower, c3);
    EXPECT_EQ(point.upper, c3);
    EXPECT_EQ(Eigen::Vector3d(1, -1, -1).dot(c3), 0.0);
}

TEST(ReduceUnified, BoxFormulaForAnyTau) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> t(-1.0, 1.0);
    std::uniform_real_distribution<double> w(1e-3, 1e3);
    for (int rep = 0; rep < 500; ++rep) {
        Eigen::VectorXd c(7);
        for (Eigen::Index i = 0; i < 7; ++i) {
            c(i) = w(rng);
        }
        const Tau tau(rep == 0 ? -1.0 : (rep == 1 ? 1.0 : t(rng)));
        const auto qp = reduce_unified(c, tau, identity_quad(7), Eigen::VectorXd::Ones(7));
        for (Eigen::Index i = 0; i < 7; ++i) {
            EXPECT_EQ(qp.lower(i), -tau.value() * c(i));
            EXPECT_EQ(qp.upper(i), c(i));
            EXPECT_LE(qp.lower(i), qp.upper(i));
        }
    }
}

TEST(FormulationIdentity, LegacyAndCorrectedMatchUnifiedFieldByField) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> t(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        auto inst = random_instance(rng, 12);
        const Tau tau(t(rng));
        const auto uni = reduce_unified(inst.weights, tau, inst.quad, inst.data.labels());
        const auto other = tau.value() >= 0.0 ? reduce_legacy_positive(inst.weights, tau, inst.quad, inst.data.labels())
                                              : reduce_corrected_negative(inst.weights, tau, inst.quad, inst.data.labels());
        expect_same_qp(uni, other);
    }
    const auto q = identity_quad(2);
    const Eigen::Vector2d y(1, -1);
    expect_same_qp(reduce_unified(y.cwiseAbs(), Tau(0.0), q, y), reduce_legacy_positive(y.cwiseAbs(), Tau(0.0), q, y));
    expect_same_qp(reduce_unified(y.cwiseAbs(), Tau(-1.0), q, y), reduce_corrected_negative(y.cwiseAbs(), Tau(-1.0), q, y));
}

TEST(Builders, RejectWrongTauSign) {
    const Eigen::Vector2d c = Eigen::Vector2d::Ones();
    const Eigen::Vector2d y(1, -1);
    const auto q = identity_quad(2);
    EXPECT_THROW((void)reduce_legacy_positive(c, Tau(-0.1), q, y), std::invalid_argument);
    EXPECT_THROW((void)reduce_corrected_negative(c, Tau(0.0), q, y), std::invalid_argument);
    EXPECT_THROW((void)build_incorrect_negative(c, Tau(0.0), q, y), std::invalid_argument);
    EXPECT_THROW((void)build_incorrect_negative(c, Tau(0.3), q, y), std::invalid_argument);
    EXPECT_THROW((void)build_incorrect_negative(c, Tau(-1.0), q, y), std::invalid_argument);
    EXPECT_THROW((void)build_dual(Formulation::legacy_positive, c, Tau(-0.5), q, y), std::invalid_argument);
    EXPECT_THROW((void)reduce_unified(Eigen::Vector3d::Ones(), Tau(0.0), q, y), std::invalid_argument);
}

TEST(Builders, CorrectedAndIncorrectExamples) {
    const Eigen::Vector2d c = Eigen::Vector2d::Ones();
    const Eigen::Vector2d y(1, -1);
    const auto q = identity_quad(2);
    const auto corrected = reduce_corrected_negative(c, Tau(-0.5), q, y);
    EXPECT_EQ(corrected.lower, Eigen::Vector2d(0.5, 0.5));
    EXPECT_EQ(corrected.upper, c);
    EXPECT_FALSE(corrected.upper_cap.has_value());

    const auto incorrect = build_incorrect_negative(c, Tau(-0.5), q, y);
    EXPECT_EQ(incorrect.lower, c);
    EXPECT_EQ(incorrect.upper, Eigen::Vector2d::Constant(incorrect_upper_cap));
    ASSERT_TRUE(incorrect.upper_cap.has_value());
    EXPECT_EQ(*incorrect.upper_cap, incorrect_upper_cap);

    // lambda >= C > 0 with all labels equal cannot satisfy y'lambda = 0
    const auto same = build_incorrect_negative(c, Tau(-0.5), q, Eigen::Vector2d::Ones());
    EXPECT_THROW((void)solve_smo(same), infeasible_problem);
}

TEST(FormulationNames, RoundTrip) {
    for (const auto f : {Formulation::unified, Formulation::legacy_positive, Formulation::corrected_negative,
                         Formulation::incorrect_negative}) {
        EXPECT_EQ(parse_formulation(to_string(f)), f);
    }
    EXPECT_EQ(to_string(Formulation::legacy_positive), "legacy-pos");
    EXPECT_THROW((void)parse_formulation("pin"), std::invalid_argument);
    EXPECT_TRUE(accepts(Formulation::unified, Tau(-1.0)));
    EXPECT_TRUE(accepts(Formulation::legacy_positive, Tau(0.0)));
    EXPECT_FALSE(accepts(Formulation::corrected_negative, Tau(0.0)));
    EXPECT_FALSE(accepts(Formulation::incorrect_negative, Tau(-1.0)));
}

TEST(RecoverAlphaBeta, Examples) {
    const Eigen::Vector2d c(1, 2);
    for (const double t : {-0.7, -0.2, 0.0, 0.4, 1.0}) {
        const auto at_upper = recover_alpha_beta(c, c, Tau(t));
        EXPECT_LE((at_upper.alpha - c).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_TRUE(at_upper.beta.isZero(1e-15));
        const auto at_lower = recover_alpha_beta(-t * c, c, Tau(t));
        EXPECT_TRUE(at_lower.alpha.isZero(1e-15));
        EXPECT_LE((at_lower.beta - std::abs(t) * c).cwiseAbs().maxCoeff(), 1e-15);
    }
    const auto mid = recover_alpha_beta(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d::Ones(), Tau(0.0));
    EXPECT_EQ(mid.alpha, Eigen::Vector2d(0.5, 0.5));
    EXPECT_EQ(mid.beta, Eigen::Vector2d::Zero());
    EXPECT_THROW((void)recover_alpha_beta(c, c, Tau(-1.0)), std::domain_error);
    EXPECT_THROW((void)recover_alpha_beta(Eigen::Vector2d(1.1, 0), c, Tau(0.5)), std::invalid_argument);
}

TEST(RecoverAlphaBeta, RoundTripAndInvariant) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> t(-0.99, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const Tau tau(t(rng));
        Eigen::VectorXd c(5);
        Eigen::VectorXd lambda(5);
        for (Eigen::Index i = 0; i < 5; ++i) {
            c(i) = 0.01 + 10.0 * u(rng);
            lambda(i) = -tau.value() * c(i) + u(rng) * (1.0 + tau.value()) * c(i);
        }
        const auto ab = recover_alpha_beta(lambda, c, tau);
        EXPECT_GE(ab.alpha.minCoeff(), 0.0);
        EXPECT_GE(ab.beta.minCoeff(), 0.0);
        const Eigen::VectorXd back = (1.0 + tau.value()) * ab.alpha - tau.value() * c;
        EXPECT_LE((back - lambda).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + c.maxCoeff()));
        if (tau.value() != 0.0) {
            const Eigen::VectorXd residual = c - ab.alpha - ab.beta / std::abs(tau.value());
            EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-12 * (1.0 + c.maxCoeff()) / std::abs(tau.value()));
        } else {
            EXPECT_TRUE(ab.beta.isZero());
        }
    }
}

// The reduced problems must have the same optimum as the (alpha, beta) duals they
// come from, solved here without any elimination by a generic interior-point method.
TEST(ReductionOracle, UnifiedMatchesUnreducedDual) {
    std::mt19937_64 rng(43);
    const double taus[] = {-0.9, -0.5, -0.1, 0.0, 0.1, 0.5, 0.9};
    for (int rep = 0; rep < 28; ++rep) {
        auto inst = random_instance(rng, 6 + static_cast<Eigen::Index>(rng() % 20));
        const Tau tau(taus[rep % 7]);
        const auto qp = reduce_unified(inst.weights, tau, inst.quad, inst.data.labels());
        const auto reduced = solve_reference(qp, tight());
        // before the beta substitution: v = alpha - tau beta, alpha + beta = C
        const auto full = oracle::solve(unreduced_dual(*inst.quad, inst.data.labels(), -tau.value(), 1.0, 1.0, inst.weights));
        ASSERT_TRUE(full.converged) << "rep " << rep;
        EXPECT_NEAR(reduced.objective, full.objective, 1e-7 * (1.0 + std::abs(full.objective))) << "rep " << rep;
        EXPECT_NEAR(qp.objective(combine(full.z, -tau.value())), full.objective, 1e-9 * (1.0 + std::abs(full.objective)));
    }
}

TEST(ReductionOracle, LegacyAndCorrectedMatchTheirDuals) {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 20; ++rep) {
        auto inst = random_instance(rng, 6 + static_cast<Eigen::Index>(rng() % 15));
        const auto &y = inst.data.labels();
        const auto &c = inst.weights;
        {
            const Tau tau(0.05 + 0.9 * static_cast<double>(rep) / 20.0);
            const auto reduced = solve_reference(reduce_legacy_positive(c, tau, inst.quad, y), tight());
            // v = alpha - beta, C - alpha - beta / tau = 0 scaled by tau
            const auto full = oracle::solve(unreduced_dual(*inst.quad, y, -1.0, tau.value(), 1.0, tau.value() * c));
            ASSERT_TRUE(full.converged);
            EXPECT_NEAR(reduced.objective, full.objective, 1e-7 * (1.0 + std::abs(full.objective)));
        }
        {
            const Tau tau(-0.05 - 0.9 * static_cast<double>(rep) / 20.0);
            const auto reduced = solve_reference(reduce_corrected_negative(c, tau, inst.quad, y), tight());
            // v = alpha + beta, C - alpha + beta / tau = 0 scaled by -tau
            const auto full = oracle::solve(unreduced_dual(*inst.quad, y, 1.0, tau.value(), -1.0, tau.value() * c));
            ASSERT_TRUE(full.converged);
            EXPECT_NEAR(reduced.objective, full.objective, 1e-7 * (1.0 + std::abs(full.objective)));
        }
    }
}

TEST(ReductionOracle, IncorrectBaselineMatchesItsDualWhenCapInactive) {
    std::mt19937_64 rng(53);
    int compared = 0;
    for (int rep = 0; rep < 20; ++rep) {
        // well separated blobs under a narrow RBF keep the uncapped problem bounded
        const auto data = testing_support::random_dataset(rng, 8 + static_cast<Eigen::Index>(rng() % 10), 2, 4.0);
        const auto k = gram(KernelSpec::rbf(0.5), data.features());
        const auto quad = std::make_shared<const Eigen::MatrixXd>(label_scaled_gram(k, data.labels()));
        const auto c = class_weights(data.labels(), 1.0);
        const Tau tau(-0.1 - 0.8 * static_cast<double>(rep % 5) / 4.0);
        const auto qp = build_incorrect_negative(c, tau, quad, data.labels());
        const auto reduced = solve_reference(qp, tight());
        if ((reduced.lambda.array() / c.array()).maxCoeff() > 0.5 * incorrect_upper_cap) {
            continue;
        }
        // v = alpha - beta, C - alpha - beta / tau = 0 scaled by tau (tau < 0 here)
        const auto full = oracle::solve(unreduced_dual(*quad, data.labels(), -1.0, tau.value(), 1.0, tau.value() * c));
        ASSERT_TRUE(full.converged);
        EXPECT_NEAR(reduced.objective, full.objective, 1e-7 * (1.0 + std::abs(full.objective)));
        ++compared;
    }
    EXPECT_GE(compared, 15);
}
