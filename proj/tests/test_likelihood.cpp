#include "firth/likelihood.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace firth;
using firth::test::column_data;
using firth::test::intercept_only;

TEST(LogLikelihood, LogitAtZero) {
    const Dataset ds = column_data({1.0, -1.0}, {1.0, 0.0});
    EXPECT_NEAR(log_likelihood(ds, LinkKind::Logit, Eigen::VectorXd::Zero(1)), -2.0 * std::log(2.0), 1e-15);
}

TEST(LogLikelihood, LogitAtOne) {
    const Dataset ds = column_data({1.0, -1.0}, {1.0, 0.0});
    EXPECT_NEAR(log_likelihood(ds, LinkKind::Logit, Eigen::VectorXd::Ones(1)), -0.6265233750364456, 1e-14);
}

TEST(LogLikelihood, InterceptOnlyAllFailures) {
    EXPECT_NEAR(log_likelihood(intercept_only(0, 5), LinkKind::Logit, Eigen::VectorXd::Zero(1)),
                -5.0 * std::log(2.0), 1e-14);
}

TEST(LogLikelihood, NonCanonicalLinksUseBinomialForm) {
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 0.3}, {1.0, -1.2}, {1.0, 2.0}},
                                            Eigen::Vector3d(2, 0, 3), Eigen::Vector3d(4, 2, 3));
    const Eigen::Vector2d beta(0.2, -0.4);
    for (LinkKind link : kAllLinks) {
        double expected = 0.0;
        for (Eigen::Index i = 0; i < 3; ++i) {
            const LinkEval e = link_eval(link, ds.X().row(i).dot(beta));
            expected += ds.y()(i) * std::log(e.pi) + (ds.m()(i) - ds.y()(i)) * std::log(e.pi_c);
        }
        EXPECT_NEAR(log_likelihood(ds, link, beta), expected, 1e-13) << to_string(link);
    }
}

TEST(Score, LogitAtZero) {
    const Dataset ds = column_data({1.0, -1.0}, {1.0, 0.0});
    EXPECT_NEAR(score(ds, LinkKind::Logit, Eigen::VectorXd::Zero(1))(0), 1.0, 1e-15);
}

TEST(Score, VanishesAtSaturatedFit) {
    // Two groups with y/m matching pi(beta) exactly.
    const Eigen::Vector2d beta(std::log(1.0 / 3.0), std::log(3.0) - std::log(1.0 / 3.0));
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 0.0}, {1.0, 1.0}}, Eigen::Vector2d(1, 3),
                                            Eigen::Vector2d(4, 4));
    EXPECT_LT(score(ds, LinkKind::Logit, beta).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(Score, MatchesFiniteDifferences) {
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 0.3}, {1.0, -1.2}, {1.0, 2.0}, {1.0, 0.0}},
                                            Eigen::Vector4d(2, 0, 3, 1), Eigen::Vector4d(4, 2, 3, 5));
    const Eigen::Vector2d beta(-0.3, 0.8);
    for (LinkKind link : kAllLinks) {
        const Eigen::VectorXd g = score(ds, link, beta);
        for (Eigen::Index j = 0; j < 2; ++j) {
            Eigen::VectorXd up = beta, down = beta;
            up(j) += 1e-5;
            down(j) -= 1e-5;
            const double fd = (log_likelihood(ds, link, up) - log_likelihood(ds, link, down)) / 2e-5;
            EXPECT_NEAR(g(j), fd, 1e-7 * (1.0 + std::abs(g(j)))) << to_string(link);
        }
    }
}

TEST(FisherInfo, SlopeDesignAtZero) {
    const FisherInfo info = fisher_info(column_data({-1.0, 1.0}, {0.0, 1.0}), LinkKind::Logit, Eigen::VectorXd::Zero(1));
    EXPECT_NEAR(info.A(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(info.logdet, std::log(0.5), 1e-15);
}

TEST(FisherInfo, InterceptOnlyFourTrials) {
    EXPECT_NEAR(fisher_info(intercept_only(1, 4), LinkKind::Logit, Eigen::VectorXd::Zero(1)).A(0, 0), 1.0, 1e-15);
}

TEST(FisherInfo, FactorReproducesMatrix) {
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 0.3}, {1.0, -1.2}, {1.0, 2.0}},
                                            Eigen::Vector3d(2, 0, 3), Eigen::Vector3d(4, 2, 3));
    for (LinkKind link : kAllLinks) {
        const FisherInfo info = fisher_info(ds, link, Eigen::Vector2d(0.1, 0.5));
        EXPECT_LT((info.L * info.L.transpose() - info.A).norm(), 1e-14 * info.A.norm());
        EXPECT_NEAR(info.logdet, std::log(info.A.determinant()), 1e-12);
        EXPECT_TRUE(info.A.isApprox(info.A.transpose()));
    }
}

TEST(FisherInfo, EqualsNegativeHessianForLogit) {
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 0.3}, {1.0, -1.2}, {1.0, 2.0}},
                                            Eigen::Vector3d(2, 0, 3), Eigen::Vector3d(4, 2, 3));
    const Eigen::Vector2d beta(0.4, -0.2);
    const Eigen::MatrixXd A = fisher_info(ds, LinkKind::Logit, beta).A;
    for (Eigen::Index j = 0; j < 2; ++j) {
        Eigen::VectorXd up = beta, down = beta;
        up(j) += 1e-6;
        down(j) -= 1e-6;
        const Eigen::VectorXd col = -(score(ds, LinkKind::Logit, up) - score(ds, LinkKind::Logit, down)) / 2e-6;
        EXPECT_LT((col - A.col(j)).norm(), 1e-8);
    }
}
