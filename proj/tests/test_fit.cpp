#include "firth/error.hpp"
#include "firth/fit.hpp"
#include "firth/penalty.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace firth;
using firth::test::column_data;
using firth::test::intercept_only;

namespace {

// Argmax of l* over a one-dimensional grid.
double grid_argmax(const Dataset& ds, LinkKind link, double lo, double hi, double step) {
    double best = -std::numeric_limits<double>::infinity(), arg = lo;
    for (double b = lo; b <= hi; b += step) {
        const double v = penalized_loglik(ds, link, Eigen::VectorXd::Constant(1, b));
        if (v > best) {
            best = v;
            arg = b;
        }
    }
    return arg;
}

}  // namespace

TEST(FitPenalized, InterceptOnlyClosedForm) {
    const FitResult r = fit_penalized(intercept_only(3, 10), LinkKind::Logit);
    ASSERT_EQ(r.status, FitStatus::Converged);
    EXPECT_NEAR(r.beta_hat(0), std::log(3.5 / 7.5), 1e-8);
    EXPECT_NEAR(r.beta_hat(0), -0.7621400520468967, 1e-8);
    EXPECT_NEAR(1.0 / (1.0 + std::exp(-r.beta_hat(0))), 3.5 / 11.0, 1e-9);
}

TEST(FitPenalized, AllFailuresStaysFinite) {
    const FitResult r = fit_penalized(intercept_only(0, 5), LinkKind::Logit);
    ASSERT_EQ(r.status, FitStatus::Converged);
    EXPECT_NEAR(r.beta_hat(0), -std::log(11.0), 1e-8);
}

TEST(FitPenalized, SeparatedTwoPoint) {
    const FitResult r = fit_penalized(column_data({-1.0, 1.0}, {0.0, 1.0}), LinkKind::Logit);
    ASSERT_EQ(r.status, FitStatus::Converged);
    EXPECT_NEAR(r.beta_hat(0), std::log(5.0), 1e-8);
    EXPECT_LE(r.grad_norm, 1e-8);
    EXPECT_NEAR(r.h.sum(), 1.0, 1e-12);
}

TEST(FitPenalized, SeparatedTwoPointOtherLinks) {
    const Dataset ds = column_data({-1.0, 1.0}, {0.0, 1.0});
    for (LinkKind link : {LinkKind::Probit, LinkKind::Cloglog}) {
        const FitResult r = fit_penalized(ds, link);
        ASSERT_EQ(r.status, FitStatus::Converged) << to_string(link);
        EXPECT_TRUE(r.beta_hat.allFinite());
        EXPECT_NEAR(r.beta_hat(0), grid_argmax(ds, link, -10.0, 10.0, 1e-4), 1e-4) << to_string(link);
    }
}

TEST(FitPenalized, TraceIsMonotone) {
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 0.3}, {1.0, -1.2}, {1.0, 2.0}, {1.0, 0.1}},
                                            Eigen::Vector4d(2, 0, 3, 1), Eigen::Vector4d(4, 2, 3, 2));
    for (LinkKind link : kAllLinks) {
        const FitResult r = fit_penalized(ds, link);
        ASSERT_EQ(r.status, FitStatus::Converged);
        for (std::size_t k = 1; k < r.trace.size(); ++k) {
            EXPECT_GE(r.trace[k].objective, r.trace[k - 1].objective - 1e-12 * (1.0 + std::abs(r.objective)));
        }
        EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations) + 1);
    }
}

TEST(FitPenalized, RankDeficientRejected) {
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}},
                                            Eigen::Vector3d(1, 0, 1), Eigen::Vector3d(2, 2, 3));
    try {
        fit_penalized(ds, LinkKind::Logit);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    }
}

TEST(FitPenalized, IterationLimit) {
    FitConfig cfg;
    cfg.max_iter = 1;
    const FitResult r = fit_penalized(intercept_only(3, 10), LinkKind::Logit, cfg);
    EXPECT_EQ(r.status, FitStatus::MaxIterations);
    EXPECT_EQ(r.iterations, 1);
}

TEST(FitConfig, Validation) {
    FitConfig cfg;
    cfg.grad_tol = 0.0;
    EXPECT_THROW(fit_penalized(intercept_only(3, 10), LinkKind::Logit, cfg), Error);
    cfg = FitConfig{};
    cfg.armijo_c = 1.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = FitConfig{};
    cfg.beta0 = Eigen::VectorXd::Zero(2);
    EXPECT_THROW(fit_penalized(intercept_only(3, 10), LinkKind::Logit, cfg), Error);
}

TEST(FitMle, SeparationDiverges) {
    const FitResult r = fit_mle(column_data({-1.0, 1.0}, {0.0, 1.0}), LinkKind::Logit);
    ASSERT_EQ(r.status, FitStatus::DivergenceSuspected);
    const std::size_t n = r.trace.size();
    ASSERT_GT(n, static_cast<std::size_t>(kDivergenceWindow));
    for (std::size_t k = n - kDivergenceWindow; k < n; ++k) EXPECT_GT(r.trace[k].beta_norm, r.trace[k - 1].beta_norm);
}

TEST(FitMle, SymmetricDataAtZero) {
    const FitResult r = fit_mle(column_data({1.0, 1.0}, {0.0, 1.0}), LinkKind::Logit);
    ASSERT_EQ(r.status, FitStatus::Converged);
    EXPECT_NEAR(r.beta_hat(0), 0.0, 1e-12);
}

TEST(FitMle, InterceptOnlyClosedForm) {
    const FitResult r = fit_mle(intercept_only(3, 10), LinkKind::Logit);
    ASSERT_EQ(r.status, FitStatus::Converged);
    EXPECT_NEAR(r.beta_hat(0), std::log(3.0 / 7.0), 1e-9);
    EXPECT_NEAR(r.beta_hat(0), -0.8472978603872037, 1e-9);
}

TEST(FitMle, ProbitInterceptOnlyMatchesQuantile) {
    // Phi(beta) = 3/10; the quantile from the normal distribution.
    const FitResult r = fit_mle(intercept_only(3, 10), LinkKind::Probit);
    ASSERT_EQ(r.status, FitStatus::Converged);
    EXPECT_NEAR(r.beta_hat(0), -0.5244005127080409, 1e-9);
}

TEST(StandardErrors, InterceptOnly) {
    EXPECT_NEAR(standard_errors(intercept_only(2, 4), LinkKind::Logit, Eigen::VectorXd::Zero(1))(0), 1.0, 1e-15);
    EXPECT_NEAR(standard_errors(intercept_only(2, 16), LinkKind::Logit, Eigen::VectorXd::Zero(1))(0), 0.5, 1e-15);
}

TEST(StandardErrors, MatchInverseDiagonal) {
    const Dataset ds = Dataset::from_arrays(Eigen::MatrixXd{{1.0, 0.3}, {1.0, -1.2}, {1.0, 2.0}},
                                            Eigen::Vector3d(2, 0, 3), Eigen::Vector3d(4, 2, 3));
    const Eigen::Vector2d beta(0.1, 0.2);
    const Eigen::MatrixXd Ainv = fisher_info(ds, LinkKind::Cloglog, beta).A.inverse();
    const Eigen::VectorXd se = standard_errors(ds, LinkKind::Cloglog, beta);
    EXPECT_NEAR(se(0), std::sqrt(Ainv(0, 0)), 1e-13);
    EXPECT_NEAR(se(1), std::sqrt(Ainv(1, 1)), 1e-13);
}
