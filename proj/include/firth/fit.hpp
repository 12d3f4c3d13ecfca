#pragma once

#include "firth/dataset.hpp"
#include "firth/link.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

namespace firth {

struct FitConfig {
    int max_iter = 200;
    double grad_tol = 1e-8;          // on the infinity norm of the gradient
    double step_shrink = 0.5;
    double armijo_c = 1e-4;
    std::optional<Eigen::VectorXd> beta0;  // zero vector when empty
    double divergence_norm = 1e8;    // unpenalized fits only

    /// Throws Error(InvalidArgument) on a non-positive field or armijo_c >= 1.
    void validate() const;
};

enum class FitStatus { Converged, MaxIterations, DivergenceSuspected };

std::string_view to_string(FitStatus status);

struct TracePoint {
    double objective = 0.0;
    double beta_norm = 0.0;
};

struct FitResult {
    Eigen::VectorXd beta_hat;
    double objective = 0.0;       // l or l* at beta_hat
    double grad_norm = 0.0;
    int iterations = 0;
    FitStatus status = FitStatus::MaxIterations;
    Eigen::VectorXd se;           // NaN entries when A is singular at beta_hat
    Eigen::VectorXd h;            // NaN entries when A is singular at beta_hat
    std::vector<TracePoint> trace;  // starting point first, then one entry per accepted step
    bool penalized = true;
    LinkKind link = LinkKind::Logit;
};

/// Maximizes l*(beta) = l(beta) + 0.5 log|X' M W X| by damped Newton ascent
/// with Armijo backtracking. The curvature is a finite-difference Hessian of
/// the analytic gradient when that is negative definite, else the expected
/// information A.
/// Throws Error(RankDeficient) unless X has full column rank.
FitResult fit_penalized(const Dataset& ds, LinkKind link, const FitConfig& cfg = {});

/// Same ascent on the plain log-likelihood, always with A as curvature. Reports DivergenceSuspected once
/// |beta| passes cfg.divergence_norm, or when over the last 25 steps |beta|
/// grew at every step while the objective stayed flat, or when the expected
/// information has eigenvalue ratio below 1e-12.
FitResult fit_mle(const Dataset& ds, LinkKind link, const FitConfig& cfg = {});

/// sqrt(diag(A^{-1})) at beta. Throws Error(CholeskyFailure).
Eigen::VectorXd standard_errors(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);

inline constexpr int kDivergenceWindow = 25;

}  // namespace firth
