#pragma once

// Numerical checks of the existence argument for the Jeffreys-penalized
// binomial estimator: decay of det(X' M W(ru) X) over spheres of growing
// radius, the per-link weight envelopes, and fit experiments on separated
// and overlapped data.

#include "firth/dataset.hpp"
#include "firth/fit.hpp"
#include "firth/link.hpp"
#include "firth/separation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace firth::harness {

struct SphereScanConfig {
    int samples = 4096;
    int refine_steps = 50;
    std::vector<double> radii{0.0, 5.0, 10.0, 20.0, 40.0};
    std::uint64_t seed = 7;

    /// Throws Error(InvalidArgument) unless samples >= 1 and radii are
    /// nonnegative and strictly increasing.
    void validate() const;
};

/// Deterministic quasi-uniform directions: {+1, -1} for p = 1, the signed
/// axes followed by an even angle grid (p = 2) or a Fibonacci lattice (p = 3),
/// seeded Gaussian directions for p >= 4.
std::vector<Eigen::VectorXd> sphere_samples(Eigen::Index p, int count, std::uint64_t seed);

struct SphereSup {
    double radius = 0.0;
    double log_value = 0.0;  // log of the estimate; the estimate itself may underflow
    double value = 0.0;
    Eigen::VectorXd direction;
};

/// Sampled lower estimate of sup_{|u|=1} det(X' M W(r u) X), refined by
/// coordinate ascent from the best sample.
SphereSup sphere_sup_det(const Dataset& ds, LinkKind link, double r, const SphereScanConfig& cfg = {});

/// Estimate of min_{|u|=1} sum_i |cos angle(x_i, u)|. Throws Error(ZeroRowNorm).
double min_abs_cos_sum(const Eigen::MatrixXd& X, const SphereScanConfig& cfg = {});

/// sum_i |cos angle(x_i, u)| for a unit u.
double abs_cos_sum(const Eigen::MatrixXd& X, const Eigen::VectorXd& u);

struct DecayPoint {
    double radius = 0.0;
    double log_sup = 0.0;
    double sup = 0.0;
};

struct DecayReport {
    std::string design_id;
    LinkKind link = LinkKind::Logit;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    std::vector<DecayPoint> points;

    // Square designs: prod_i w_i(r u) <= K^n exp(-a c r) at every checked u and r.
    bool square = false;
    double a = 0.0;
    double c = 0.0;
    double envelope_constant = 1.0;  // K; 1 for logit
    std::size_t product_checks = 0;
    std::size_t product_failures = 0;

    // Any shape: sup det <= K^p (sum_S det(X_S)^2 prod_S m) exp(-rate r) with rate > 0.
    double log_coefficient = 0.0;
    double bound_rate = 0.0;
    double fitted_rate = 0.0;  // least-squares slope of -log sup against r, r > 0

    bool strictly_decreasing = false;  // over every radius after the first
    double log_decay_ratio = 0.0;      // log sup(last radius) - log sup(first radius)
    bool decay_ok = false;             // ratio below 1e-8

    bool ok() const;
};

/// Throws Error(ZeroRowNorm) for a square design with a zero row.
DecayReport decay_curve(const Dataset& ds, LinkKind link, const SphereScanConfig& cfg = {});

/// f(z) = (1 + e^{|z|}) w(z). Probit and logit use eta = z; cloglog uses the
/// z-form weight exp(-2z) / (exp(exp(-z)) - 1), i.e. eta = -z.
double envelope_f(LinkKind link, double z);

/// (1 + e^{|z|}) e^{-z} / (1 + e^{-z}/2 + e^{-2z}/6), the cloglog majorant.
double cloglog_g(double z);

struct EnvelopeReport {
    LinkKind link = LinkKind::Logit;
    double z_lo = 0.0;
    double z_hi = 0.0;
    double step = 0.0;
    std::size_t points = 0;
    double sup_f = 0.0;
    double argmax_z = 0.0;
    bool finite_everywhere = false;
    double sup_f_half_step = 0.0;  // the same scan at step / 2
    bool sup_stable = false;       // |sup_f - sup_f_half_step| < 1e-6

    bool logit_bound_ok = true;    // logit: f <= 1 at every grid point
    double g_pos = 0.0;            // cloglog: g(30)
    double g_neg = 0.0;            // cloglog: g(-30)
    bool g_limits_ok = true;
    bool f_below_g = true;         // cloglog: f <= g on the grid
    bool mills_ok = true;          // probit: Phi > 1/2, 1 - Phi > z phi / (z^2 + 1) for grid z > 0

    bool ok() const;
};

EnvelopeReport check_weight_envelope(LinkKind link, double z_lo = -40.0, double z_hi = 40.0, double step = 0.01);

/// K with w(eta) <= K / (1 + e^{|eta|}): 1 for logit, the scanned sup of f otherwise.
double envelope_constant(LinkKind link);

struct InequalityReport {
    std::string design_id;
    LinkKind link = LinkKind::Logit;
    double envelope_constant = 1.0;
    std::size_t checks = 0;
    std::size_t failures = 0;
    double worst_log_margin = 0.0;  // max of log w - log(K / (1 + e^{r|x'u|})), <= 0 when holding

    bool ok() const { return failures == 0; }
};

/// Checks w_i(r u) <= K / (1 + exp(r |x_i'u|)) for every row, radius and sampled u.
InequalityReport envelope_inequality_check(const Dataset& ds, LinkKind link, std::span<const double> radii,
                                           const SphereScanConfig& cfg, double envelope_constant);

struct SphereRestriction {
    double objective = 0.0;  // l*(beta_hat)
    double threshold = 0.0;  // l*(0)
    double max_far = 0.0;    // max over directions of l*(radius u)
    bool above_threshold = false;
    bool beats_far = false;
};

SphereRestriction sphere_restriction_check(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta_hat,
                                           std::uint64_t seed, int directions = 100, double radius = 50.0);

enum class ScenarioKind { TwoPoint, InterceptOnlyZero, Separated, QuasiSeparated, Overlapped, AllZero, AllMax, Balanced };

std::string_view to_string(ScenarioKind kind);

struct Scenario {
    ScenarioKind kind = ScenarioKind::Separated;
    std::uint64_t seed = 0;
    Eigen::Index p = 1;
};

std::string scenario_id(const Scenario& scenario);
Dataset make_scenario(const Scenario& scenario);

/// n x p design with uniform entries, rescaled so the smallest singular value
/// over all p-row subsets is exactly 0.8.
Dataset well_conditioned_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

struct LinkExistence {
    LinkKind link = LinkKind::Logit;
    FitStatus mle_status = FitStatus::MaxIterations;
    double mle_beta_norm = 0.0;
    FitStatus penalized_status = FitStatus::MaxIterations;
    Eigen::VectorXd beta_hat;
    double beta_hat_norm = 0.0;
    double grad_norm = 0.0;
    SphereRestriction sphere;
    bool ok = false;
};

struct ExistenceReport {
    std::string dataset_id;
    bool separated = false;
    SeparationKind separation = SeparationKind::None;
    std::vector<LinkExistence> links;

    bool ok() const;
};

/// Separation check plus unpenalized and penalized fits for every link. A
/// link passes when the penalized fit converges with |beta_hat| < 20, beats
/// l*(0) and l*(50 u) on 100 seeded directions, and the unpenalized fit
/// diverges exactly when the data are separated.
ExistenceReport existence_experiment(const std::string& dataset_id, const Dataset& ds, std::uint64_t seed);
ExistenceReport existence_experiment(const Scenario& scenario);

struct VerificationReport {
    std::uint64_t seed = 0;
    std::vector<EnvelopeReport> envelopes;
    std::vector<DecayReport> decays;
    std::vector<InequalityReport> inequalities;
    std::vector<ExistenceReport> existence;

    bool ok() const;
};

/// Full check suite; deterministic for a given seed. When extra is given its
/// decay curves (n <= 25) and existence experiment are included.
VerificationReport run_verification(std::uint64_t seed, const std::optional<Dataset>& extra = std::nullopt);

}  // namespace firth::harness
