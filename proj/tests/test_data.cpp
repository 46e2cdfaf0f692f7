#include "pinsvm/data.hpp"
#include "pinsvm/error.hpp"

#include "support/instances.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>

using namespace pinsvm;
using testing_support::TempDir;

namespace {

std::filesystem::path write_file(const TempDir &dir, const std::string &name, const std::string &body) {
    const auto p = dir.file(name);
    std::ofstream(p) << body;
    return p;
}

std::string error_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const std::exception &e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(LoadCsv, RemapsZeroOneLabels) {
    TempDir dir;
    const auto p = write_file(dir, "a.csv", "1.5,2,1\n0,1,0\n-3,4,1\n");
    const Dataset d = load_csv(p);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.dim(), 2u);
    EXPECT_EQ(d.labels(), Eigen::Vector3d(1, -1, 1));
    EXPECT_DOUBLE_EQ(d.features()(2, 0), -3.0);
}

TEST(LoadCsv, HeaderAndLabelColumn) {
    TempDir dir;
    const auto p = write_file(dir, "h.csv", "class,x,y\n-1,0.5,1\n+1,2,3\n");
    const Dataset d = load_csv(p, 0);
    EXPECT_EQ(d.labels(), Eigen::Vector2d(-1, 1));
    EXPECT_DOUBLE_EQ(d.features()(1, 1), 3.0);
}

TEST(LoadCsv, EmptyFileHasNoSamples) {
    TempDir dir;
    const auto p = write_file(dir, "e.csv", "");
    EXPECT_THROW((void)load_csv(p), parse_error);
    EXPECT_NE(error_of([&] { (void)load_csv(p); }).find("no samples"), std::string::npos);
}

TEST(LoadCsv, TextCellNamesRowAndColumn) {
    TempDir dir;
    const auto p = write_file(dir, "t.csv", "1,2,1\n3,abc,0\n");
    const auto msg = error_of([&] { (void)load_csv(p); });
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
}

TEST(LoadCsv, RejectsBadLabelsAndRaggedRows) {
    TempDir dir;
    EXPECT_THROW((void)load_csv(write_file(dir, "l.csv", "1,2,3\n")), parse_error);
    EXPECT_THROW((void)load_csv(write_file(dir, "r.csv", "1,2,1\n3,0\n")), parse_error);
    EXPECT_THROW((void)load_csv(dir.file("missing.csv")), std::runtime_error);
}

TEST(LoadLibsvm, DenseExpansion) {
    TempDir dir;
    const auto p = write_file(dir, "a.svm", "+1 1:0.5 3:-1\n-1\n");
    const Dataset d = load_libsvm(p);
    ASSERT_EQ(d.dim(), 3u);
    EXPECT_EQ(Eigen::VectorXd(d.features().row(0).transpose()), Eigen::Vector3d(0.5, 0, -1));
    EXPECT_TRUE(d.features().row(1).isZero());
    EXPECT_EQ(d.labels(), Eigen::Vector2d(1, -1));
}

TEST(LoadLibsvm, Errors) {
    TempDir dir;
    const auto msg = error_of([&] { (void)load_libsvm(write_file(dir, "l.svm", "2 1:1\n")); });
    EXPECT_NE(msg.find("not +-1 or 0/1"), std::string::npos) << msg;
    EXPECT_THROW((void)load_libsvm(write_file(dir, "m.svm", "1 1-2\n")), parse_error);
    EXPECT_THROW((void)load_libsvm(write_file(dir, "o.svm", "1 3:1 2:1\n")), parse_error);
    EXPECT_THROW((void)load_libsvm(write_file(dir, "z.svm", "1 0:1\n")), parse_error);
}

TEST(LoadMonk, ClassThenAttributesThenId) {
    TempDir dir;
    const auto p = write_file(dir, "monks-1.train", " 1 1 1 1 1 3 1 data_5\n 0 1 1 1 1 3 2 data_6\n");
    const Dataset d = load_monk(p);
    ASSERT_EQ(d.dim(), 6u);
    EXPECT_EQ(d.labels(), Eigen::Vector2d(1, -1));
    EXPECT_DOUBLE_EQ(d.features()(1, 5), 2.0);
}

TEST(NormalizeMinmax, AffineMapFittedOnTrain) {
    const Dataset train(Eigen::Vector2d(0, 10), Eigen::Vector2d(1, -1));
    Eigen::MatrixXd tx(2, 1);
    tx << 5, 20;
    const Dataset test(tx, Eigen::Vector2d(1, 1));
    const auto [tr, te, params] = normalize_minmax(train, test);
    EXPECT_DOUBLE_EQ(tr.features()(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(tr.features()(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(te.features()(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(te.features()(1, 0), 3.0);
    ASSERT_TRUE(te.normalization().has_value());
    EXPECT_EQ(params.min(0), 0.0);
}

TEST(NormalizeMinmax, ConstantColumnMapsToZero) {
    const Dataset train(Eigen::Vector2d(7, 7), Eigen::Vector2d(1, -1));
    const Dataset test(Eigen::VectorXd::Constant(1, 7.0), Eigen::VectorXd::Ones(1));
    const auto [tr, te, params] = normalize_minmax(train, test);
    EXPECT_TRUE(tr.features().isZero());
    EXPECT_TRUE(te.features().isZero());
}

TEST(NormalizeMinmax, DimensionMismatch) {
    const Dataset a(Eigen::MatrixXd::Ones(2, 2), Eigen::Vector2d(1, -1));
    const Dataset b(Eigen::MatrixXd::Ones(2, 3), Eigen::Vector2d(1, -1));
    EXPECT_THROW((void)normalize_minmax(a, b), std::invalid_argument);
}

TEST(NormalizeMinmax, TrainStaysInUnitBox) {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = testing_support::random_dataset(rng, 30, 4, 3.0);
        const auto [tr, te, params] = normalize_minmax(d, d);
        EXPECT_LE(tr.features().maxCoeff(), 1.0);
        EXPECT_GE(tr.features().minCoeff(), -1.0);
    }
}

TEST(Split, StratifiedAndDeterministic) {
    Eigen::MatrixXd x(10, 1);
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = i;
    }
    Eigen::VectorXd y(10);
    y << 1, 1, 1, 1, 1, 1, -1, -1, -1, -1;
    const Dataset d(x, y);
    const auto [tr, te] = split(d, 5, 42);
    EXPECT_EQ(tr.num_positive(), 3u);
    EXPECT_EQ(tr.num_negative(), 2u);
    const auto [tr2, te2] = split(d, 5, 42);
    EXPECT_EQ(tr.features(), tr2.features());
    EXPECT_EQ(te.features(), te2.features());
    EXPECT_THROW((void)split(d, 10, 42), std::invalid_argument);
    EXPECT_THROW((void)split(d, 0, 42), std::invalid_argument);
}

TEST(Split, IsAPartition) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = testing_support::random_dataset(rng, 40, 2);
        const auto [tr, te] = split(d, 1 + rng() % 38, rng());
        std::multimap<double, double> all;
        std::multimap<double, double> parts;
        for (Eigen::Index i = 0; i < d.features().rows(); ++i) {
            all.emplace(d.features()(i, 0), d.labels()(i));
        }
        for (const Dataset *part : {&tr, &te}) {
            for (Eigen::Index i = 0; i < part->features().rows(); ++i) {
                parts.emplace(part->features()(i, 0), part->labels()(i));
            }
        }
        EXPECT_EQ(all, parts);
        // within one sample of the full-set class share
        const double share = static_cast<double>(d.num_positive()) / static_cast<double>(d.size());
        EXPECT_LE(std::abs(static_cast<double>(tr.num_positive()) - share * static_cast<double>(tr.size())), 1.0);
    }
}

TEST(ClassWeights, Examples) {
    Eigen::VectorXd y(6);
    y << 1, 1, 1, 1, -1, -1;
    Eigen::VectorXd expected(6);
    expected << 2, 2, 2, 2, 4, 4;
    EXPECT_EQ(class_weights(y, 2.0), expected);
    EXPECT_EQ(class_weights(Eigen::Vector4d(1, -1, -1, 1), 1.0), Eigen::Vector4d::Ones());
    const auto msg = error_of([] { (void)class_weights(Eigen::Vector3d::Ones(), 1.0); });
    EXPECT_NE(msg.find("degenerate class distribution"), std::string::npos);
    EXPECT_THROW((void)class_weights(Eigen::Vector2d(1, -1), 0.0), std::invalid_argument);
}

TEST(ClassWeights, ClassSumsBalance) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c0(1e-3, 1e3);
    for (int rep = 0; rep < 200; ++rep) {
        const auto d = testing_support::random_dataset(rng, 5 + static_cast<Eigen::Index>(rng() % 200), 1, 1.0,
                                                       0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0);
        const double c = c0(rng);
        const auto w = class_weights(d.labels(), c);
        double pos = 0.0;
        double neg = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            (d.labels()(i) > 0 ? pos : neg) += w(i);
            EXPECT_GT(w(i), 0.0);
        }
        EXPECT_NEAR(pos, neg, 1e-12 * pos);
    }
}

TEST(Dataset, RejectsInvalidConstruction) {
    EXPECT_THROW(Dataset(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)), std::invalid_argument);
    EXPECT_THROW(Dataset(Eigen::MatrixXd::Ones(2, 1), Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
    EXPECT_THROW(Dataset(Eigen::MatrixXd::Ones(2, 1), Eigen::Vector2d(1, 0.5)), std::invalid_argument);
}
