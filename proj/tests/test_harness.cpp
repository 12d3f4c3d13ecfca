#include "firth/error.hpp"
#include "firth/harness.hpp"
#include "firth/penalty.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace firth;
using namespace firth::harness;

namespace {

Dataset design(const Eigen::MatrixXd& X) {
    return Dataset::from_arrays(X, Eigen::VectorXd::Zero(X.rows()), Eigen::VectorXd::Ones(X.rows()));
}

}  // namespace

TEST(SphereSamples, CountsAndNorms) {
    EXPECT_EQ(sphere_samples(1, 100, 7).size(), 2u);
    const auto s2 = sphere_samples(2, 64, 7);
    EXPECT_EQ(s2.size(), 68u);
    const auto s4 = sphere_samples(4, 50, 7);
    for (const auto& u : s4) EXPECT_NEAR(u.norm(), 1.0, 1e-14);
    EXPECT_EQ(sphere_samples(4, 50, 7), s4);
}

TEST(SphereSup, OneDimensional) {
    const Dataset ds = design(Eigen::MatrixXd::Ones(1, 1));
    EXPECT_NEAR(sphere_sup_det(ds, LinkKind::Logit, 0.0).value, 0.25, 1e-15);
    EXPECT_NEAR(sphere_sup_det(ds, LinkKind::Logit, 5.0).value, 0.006648056670790155, 1e-15);
}

TEST(SphereSup, IdentityDesignAtZero) {
    EXPECT_NEAR(sphere_sup_det(design(Eigen::MatrixXd::Identity(2, 2)), LinkKind::Logit, 0.0).value, 0.0625, 1e-15);
}

TEST(SphereSup, IdentityDesignAwayFromZero) {
    // det = w(r u1) w(r u2); log w is flat enough near 0 that an axis wins.
    const double r = 4.0;
    const double axis = 0.25 * std::exp(r) / ((1.0 + std::exp(r)) * (1.0 + std::exp(r)));
    const SphereSup s = sphere_sup_det(design(Eigen::MatrixXd::Identity(2, 2)), LinkKind::Logit, r);
    EXPECT_NEAR(s.value, axis, 1e-12 * axis);
    EXPECT_NEAR(s.value, 0.0044156765533227768, 1e-12);
}

TEST(SphereSup, LogValueAgreesWithDirectDeterminant) {
    const Dataset ds = well_conditioned_design(5, 2, 3);
    for (LinkKind link : kAllLinks) {
        const SphereSup s = sphere_sup_det(ds, link, 2.0);
        EXPECT_NEAR(s.log_value, fisher_info(ds, link, 2.0 * s.direction).logdet, 1e-10) << to_string(link);
    }
}

TEST(MinAbsCosSum, SimpleDesigns) {
    EXPECT_NEAR(min_abs_cos_sum(Eigen::MatrixXd::Ones(1, 1)), 1.0, 1e-15);
    EXPECT_NEAR(min_abs_cos_sum(Eigen::MatrixXd::Identity(2, 2)), 1.0, 1e-12);
    EXPECT_LT(min_abs_cos_sum(Eigen::MatrixXd{{1.0, 0.0}, {2.0, 0.0}}), 1e-3);
    EXPECT_THROW(min_abs_cos_sum(Eigen::MatrixXd{{1.0, 0.0}, {0.0, 0.0}}), Error);
}

TEST(WellConditionedDesign, SubsetsAreConditioned) {
    const Dataset ds = well_conditioned_design(5, 2, 11);
    double smallest = 1e300;
    for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index k = i + 1; k < 5; ++k) {
            Eigen::MatrixXd sub(2, 2);
            sub << ds.X().row(i), ds.X().row(k);
            smallest = std::min(smallest, Eigen::JacobiSVD<Eigen::MatrixXd>(sub).singularValues()(1));
        }
    }
    EXPECT_NEAR(smallest, 0.8, 1e-12);
    EXPECT_EQ(well_conditioned_design(5, 2, 11).X(), ds.X());
}

TEST(DecayCurve, SquareAndTall) {
    for (Eigen::Index n : {2, 4}) {
        const Dataset ds = well_conditioned_design(n, 2, 100 + static_cast<std::uint64_t>(n));
        for (LinkKind link : kAllLinks) {
            const DecayReport r = decay_curve(ds, link);
            EXPECT_TRUE(r.ok()) << n << " " << to_string(link);
            EXPECT_EQ(r.square, n == 2);
            EXPECT_GT(r.bound_rate, 0.0);
            EXPECT_GT(r.fitted_rate, 0.0);
            EXPECT_LT(r.log_decay_ratio, std::log(1e-8));
            if (r.square) {
                EXPECT_GT(r.product_checks, 0u);
                EXPECT_EQ(r.product_failures, 0u);
            }
        }
    }
}

TEST(Envelope, LogitBoundedByOne) {
    for (double z : {-40.0, -3.0, 0.0, 0.01, 7.5, 40.0}) EXPECT_LE(envelope_f(LinkKind::Logit, z), 1.0);
    const EnvelopeReport r = check_weight_envelope(LinkKind::Logit);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.logit_bound_ok);
    EXPECT_LE(r.sup_f, 1.0);
    EXPECT_EQ(r.points, 8001u);
}

TEST(Envelope, ProbitStable) {
    const EnvelopeReport r = check_weight_envelope(LinkKind::Probit);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.finite_everywhere);
    EXPECT_TRUE(r.mills_ok);
    EXPECT_LT(std::abs(r.sup_f - r.sup_f_half_step), 1e-6);
    // f(0) = 2 w(0) = 4 / pi bounds the sup from below.
    EXPECT_GE(r.sup_f, 4.0 / std::acos(-1.0));
}

TEST(Envelope, CloglogLimits) {
    EXPECT_NEAR(cloglog_g(30.0), 1.0, 1e-6);
    EXPECT_NEAR(cloglog_g(-30.0), 6.0, 1e-6);
    const EnvelopeReport r = check_weight_envelope(LinkKind::Cloglog);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.f_below_g);
    EXPECT_TRUE(r.g_limits_ok);
    // The z-form weight is the eta-form weight at eta = -z.
    EXPECT_NEAR(envelope_f(LinkKind::Cloglog, 1.5),
                (1.0 + std::exp(1.5)) * link_eval(LinkKind::Cloglog, -1.5).w, 1e-14);
}

TEST(Envelope, SupremaMatchHighPrecisionOptimum) {
    // Stationary points of f found with 30-digit arithmetic; both lie between
    // grid points, so a bare grid maximum would understate K.
    EXPECT_NEAR(envelope_constant(LinkKind::Probit), 1.6322276473463259, 1e-12);
    EXPECT_NEAR(envelope_constant(LinkKind::Cloglog), 1.9562267625427368, 1e-12);
}

TEST(EnvelopeInequality, HoldsOnDesigns) {
    const Dataset ds = well_conditioned_design(4, 2, 5);
    const std::vector<double> radii{0.0, 5.0, 20.0};
    SphereScanConfig cfg;
    cfg.samples = 256;
    for (LinkKind link : kAllLinks) {
        const InequalityReport r = envelope_inequality_check(ds, link, radii, cfg, envelope_constant(link));
        EXPECT_TRUE(r.ok()) << to_string(link);
        EXPECT_GT(r.checks, 0u);
        EXPECT_LE(r.worst_log_margin, 0.0);
    }
    EXPECT_EQ(envelope_constant(LinkKind::Logit), 1.0);
}

TEST(Existence, TwoPointScenario) {
    const ExistenceReport r = existence_experiment({ScenarioKind::TwoPoint, 1, 1});
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.separated);
    EXPECT_EQ(r.links[0].mle_status, FitStatus::DivergenceSuspected);
    EXPECT_NEAR(r.links[0].beta_hat(0), std::log(5.0), 1e-8);
}

TEST(Existence, InterceptOnlyZero) {
    const ExistenceReport r = existence_experiment({ScenarioKind::InterceptOnlyZero, 1, 1});
    EXPECT_TRUE(r.ok());
    EXPECT_NEAR(r.links[0].beta_hat(0), -std::log(11.0), 1e-8);
}

TEST(Existence, BalancedFitsAgree) {
    const ExistenceReport r = existence_experiment({ScenarioKind::Balanced, 7, 2});
    EXPECT_TRUE(r.ok());
    EXPECT_FALSE(r.separated);
    const Dataset ds = make_scenario({ScenarioKind::Balanced, 7, 2});
    EXPECT_EQ(ds.n(), 200);
    for (LinkKind link : kAllLinks) {
        const FitResult mle = fit_mle(ds, link);
        const FitResult pen = fit_penalized(ds, link);
        ASSERT_EQ(mle.status, FitStatus::Converged);
        ASSERT_EQ(pen.status, FitStatus::Converged);
        EXPECT_LT((mle.beta_hat - pen.beta_hat).lpNorm<Eigen::Infinity>(), 0.05) << to_string(link);
    }
}

TEST(SphereRestriction, FarPointsAreWorse) {
    const Dataset ds = make_scenario({ScenarioKind::Separated, 4, 2});
    const FitResult fit = fit_penalized(ds, LinkKind::Probit);
    const SphereRestriction s = sphere_restriction_check(ds, LinkKind::Probit, fit.beta_hat, 3);
    EXPECT_TRUE(s.above_threshold);
    EXPECT_TRUE(s.beats_far);
    EXPECT_GT(s.objective, s.max_far);
}

TEST(Scenarios, Deterministic) {
    for (ScenarioKind kind : {ScenarioKind::Separated, ScenarioKind::Overlapped, ScenarioKind::QuasiSeparated,
                              ScenarioKind::AllZero, ScenarioKind::AllMax}) {
        const Scenario s{kind, 9, 2};
        EXPECT_EQ(make_scenario(s).X(), make_scenario(s).X()) << scenario_id(s);
        EXPECT_EQ(make_scenario(s).y(), make_scenario(s).y());
    }
    EXPECT_TRUE((make_scenario({ScenarioKind::AllZero, 3, 2}).y().array() == 0.0).all());
    const Dataset all_max = make_scenario({ScenarioKind::AllMax, 3, 2});
    EXPECT_EQ(all_max.y(), all_max.m());
}

TEST(Verification, FullRunPasses) {
    const VerificationReport r = run_verification(7);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.envelopes.size(), 3u);
    EXPECT_EQ(r.decays.size(), 18u);
}
