#include "pinsvm/kernel.hpp"
#include "pinsvm/loss.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pinsvm;

namespace {

// Two points at +1 and -1 on a line with opposite labels.
struct TwoPoint {
    Eigen::MatrixXd x = (Eigen::MatrixXd(2, 1) << 1, -1).finished();
    Eigen::Vector2d y{1, -1};
    GramMatrix k = gram(KernelSpec::linear(), x);
};

}  // namespace

TEST(Tau, Range) {
    EXPECT_NO_THROW(Tau(-1.0));
    EXPECT_NO_THROW(Tau(1.0));
    EXPECT_THROW(Tau(1.0001), std::invalid_argument);
    EXPECT_THROW(Tau(-1.5), std::invalid_argument);
    EXPECT_THROW(Tau(std::nan("")), std::invalid_argument);
    EXPECT_EQ(Tau(0.0).signum(), 1);
    EXPECT_EQ(Tau(-0.2).signum(), -1);
}

TEST(Pinball, Examples) {
    EXPECT_DOUBLE_EQ(pinball(2.0, Tau(0.5)), 2.0);
    EXPECT_DOUBLE_EQ(pinball(-2.0, Tau(0.5)), 1.0);
    EXPECT_DOUBLE_EQ(pinball(-2.0, Tau(-0.5)), -1.0);
    for (const double t : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
        EXPECT_DOUBLE_EQ(pinball(0.0, Tau(t)), 0.0);
    }
}

TEST(Pinball, BranchAndConvexityProperties) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> t(-1.0, 1.0);
    for (int rep = 0; rep < 5000; ++rep) {
        const double a = u(rng);
        const double b = u(rng);
        const Tau tau(t(rng));
        EXPECT_DOUBLE_EQ(pinball(a, Tau(0.0)), std::max(a, 0.0));
        EXPECT_DOUBLE_EQ(pinball(a, Tau(1.0)), std::abs(a));
        const double p = pinball(a, tau);
        EXPECT_GE(p, a);
        EXPECT_GE(p, -tau.value() * a);
        EXPECT_TRUE(p == a || p == -tau.value() * a);
        EXPECT_LE(pinball(0.5 * (a + b), tau), 0.5 * (pinball(a, tau) + pinball(b, tau)) + 1e-12);
    }
}

TEST(MarginResiduals, Examples) {
    const TwoPoint s;
    EXPECT_TRUE(margin_residuals(Eigen::Vector2d(0.5, 0.5), 0.0, s.k, s.y).isZero(1e-15));
    EXPECT_EQ(margin_residuals(Eigen::Vector2d::Zero(), 0.0, s.k, s.y), Eigen::Vector2d::Ones());
    EXPECT_DOUBLE_EQ(margin_residuals(Eigen::Vector2d::Zero(), -1.0, s.k, s.y)(1), 0.0);
    EXPECT_THROW((void)margin_residuals(Eigen::Vector3d::Zero(), 0.0, s.k, s.y), std::invalid_argument);
}

TEST(PrimalObjective, Examples) {
    const TwoPoint s;
    const Eigen::Vector2d c = Eigen::Vector2d::Ones();
    EXPECT_DOUBLE_EQ(primal_objective(Eigen::Vector2d(0.5, 0.5), 0.0, s.k, s.y, c, Tau(0.0)), 0.5);
    EXPECT_DOUBLE_EQ(primal_objective(Eigen::Vector2d::Zero(), 0.0, s.k, s.y, c, Tau(0.0)), 2.0);
    EXPECT_DOUBLE_EQ(primal_objective(Eigen::Vector2d::Zero(), 0.0, s.k, s.y, c, Tau(-1.0)), 2.0);
    EXPECT_THROW((void)primal_objective(Eigen::Vector2d::Zero(), 0.0, s.k, s.y, Eigen::Vector3d::Ones(), Tau(0.0)),
                 std::invalid_argument);
}

TEST(PrimalObjective, MatchesExplicitWeightsForLinearKernel) {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd x(12, 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x.data()[i] = g(rng);
        }
        Eigen::VectorXd y(12);
        Eigen::VectorXd lambda(12);
        Eigen::VectorXd c(12);
        for (Eigen::Index i = 0; i < 12; ++i) {
            y(i) = g(rng) > 0 ? 1.0 : -1.0;
            lambda(i) = g(rng);
            c(i) = 0.5 + std::abs(g(rng));
        }
        const double b = g(rng);
        const Tau tau(std::tanh(g(rng)));
        const Eigen::VectorXd w = x.transpose() * lambda.cwiseProduct(y);
        double expected = 0.5 * w.squaredNorm();
        for (Eigen::Index i = 0; i < 12; ++i) {
            expected += c(i) * pinball(1.0 - y(i) * (w.dot(x.row(i)) + b), tau);
        }
        EXPECT_NEAR(primal_objective(lambda, b, gram(KernelSpec::linear(), x), y, c, tau), expected,
                    1e-10 * (1.0 + std::abs(expected)));
    }
}
