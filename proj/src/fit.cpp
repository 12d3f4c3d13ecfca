#include "firth/fit.hpp"

#include "firth/error.hpp"
#include "firth/likelihood.hpp"
#include "firth/penalty.hpp"

#include <cmath>
#include <limits>

namespace firth {

std::string_view to_string(FitStatus status) {
    switch (status) {
    case FitStatus::Converged: return "Converged";
    case FitStatus::MaxIterations: return "MaxIterations";
    case FitStatus::DivergenceSuspected: return "DivergenceSuspected";
    }
    return "Unknown";
}

void FitConfig::validate() const {
    if (max_iter <= 0) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
    if (!(grad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "grad_tol must be positive");
    if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "step_shrink must lie in (0, 1)");
    }
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorCode::InvalidArgument, "armijo_c must lie in (0, 1)");
    if (!(divergence_norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "divergence_norm must be positive");
}

Eigen::VectorXd standard_errors(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    const FisherInfo info = fisher_info(ds, link, beta);
    const Eigen::MatrixXd Linv = info.L.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(ds.p(), ds.p()));
    // [A^{-1}]_jj = |L^{-1} e_j|^2
    return Linv.colwise().squaredNorm().transpose().cwiseSqrt();
}

namespace {

constexpr int kMaxHalvings = 60;
constexpr double kDegenerateRatio = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Point {
    Eigen::VectorXd beta;
    double objective = kNegInf;
    Eigen::VectorXd grad;
    FisherInfo info;
};

double objective_only(const Dataset& ds, LinkKind link, bool penalized, const Eigen::VectorXd& beta) {
    if (!beta.allFinite()) return kNegInf;
    try {
        return penalized ? penalized_loglik(ds, link, beta) : log_likelihood(ds, link, beta);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteResult) return kNegInf;
        throw;
    }
}

// Full evaluation; std::nullopt if the objective is -infinity or A is singular.
std::optional<Point> evaluate(const Dataset& ds, LinkKind link, bool penalized, const Eigen::VectorXd& beta) {
    const ModelState state = model_state(ds, link, beta);
    Point pt;
    pt.beta = beta;
    try {
        pt.info = fisher_info(ds, state);
        pt.grad = score(ds, state);
        pt.objective = link == LinkKind::Logit ? log_likelihood(ds, link, beta) : log_likelihood(ds, state);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CholeskyFailure || e.code() == ErrorCode::NonFiniteResult) return std::nullopt;
        throw;
    }
    if (penalized) {
        auto pen = try_penalty(ds, state);
        if (!pen) return std::nullopt;
        pt.objective += pen->value();
        pt.grad += pen->grad;
    }
    if (!std::isfinite(pt.objective) || !pt.grad.allFinite()) return std::nullopt;
    return pt;
}

// |beta| grew at every one of the last W steps while l moved by less than
// 1e-6 (1 + |l|) over the same window.
// Newton direction from a central-difference Hessian of the analytic gradient.
// The penalty term makes A a poor curvature model near the optimum, so
// penalized fits use this whenever -H is positive definite.
std::optional<Eigen::VectorXd> exact_newton_direction(const Dataset& ds, LinkKind link, const Point& cur) {
    const Eigen::Index p = cur.beta.size();
    Eigen::MatrixXd H(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double h = 1e-5 * (1.0 + std::abs(cur.beta(j)));
        Eigen::VectorXd up = cur.beta, down = cur.beta;
        up(j) += h;
        down(j) -= h;
        const auto gu = evaluate(ds, link, true, up);
        const auto gd = evaluate(ds, link, true, down);
        if (!gu || !gd) return std::nullopt;
        H.col(j) = (gu->grad - gd->grad) / (up(j) - down(j));
    }
    const Eigen::MatrixXd negH = -0.5 * (H + H.transpose());
    const Eigen::LLT<Eigen::MatrixXd> llt(negH);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd dir = llt.solve(cur.grad);
    if (!dir.allFinite() || !(cur.grad.dot(dir) > 0.0)) return std::nullopt;
    return dir;
}

// Under quasi-complete separation the weights of the separated rows vanish
// while the rest stay bounded, so A becomes singular along one direction.
bool information_degenerate(const Eigen::MatrixXd& A) {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
    return !(ev(0) > kDegenerateRatio * ev(ev.size() - 1));
}

bool divergence_trend(const std::vector<TracePoint>& trace) {
    const auto n = trace.size();
    if (n <= static_cast<std::size_t>(kDivergenceWindow)) return false;
    const std::size_t first = n - 1 - kDivergenceWindow;
    for (std::size_t k = first + 1; k < n; ++k) {
        if (!(trace[k].beta_norm > trace[k - 1].beta_norm)) return false;
    }
    const double last = trace.back().objective;
    return std::abs(last - trace[first].objective) <= 1e-6 * (1.0 + std::abs(last));
}

FitResult run_ascent(const Dataset& ds, LinkKind link, const FitConfig& cfg, bool penalized) {
    cfg.validate();
    ds.require_full_rank();
    const Eigen::Index p = ds.p();
    Eigen::VectorXd beta0 = cfg.beta0.value_or(Eigen::VectorXd::Zero(p));
    if (beta0.size() != p) throw Error(ErrorCode::DimensionMismatch, "beta0 must have length p");

    auto start = evaluate(ds, link, penalized, beta0);
    if (!start) throw Error(ErrorCode::NonFiniteResult, "objective is not finite at the starting point");
    Point cur = std::move(*start);

    FitResult result;
    result.penalized = penalized;
    result.link = link;
    result.trace.push_back({cur.objective, cur.beta.norm()});
    result.status = FitStatus::MaxIterations;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double gnorm = cur.grad.lpNorm<Eigen::Infinity>();
        Eigen::VectorXd dir = cur.info.L.triangularView<Eigen::Lower>().solve(cur.grad);
        cur.info.L.triangularView<Eigen::Lower>().transpose().solveInPlace(dir);

        // Unpenalized fits also need a small Newton step: under separation the
        // score vanishes at infinity while the step stays of order one.
        const bool small_step = penalized ||
                                dir.lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + cur.beta.lpNorm<Eigen::Infinity>());
        if (gnorm <= cfg.grad_tol && small_step) {
            result.status = FitStatus::Converged;
            break;
        }
        if (!penalized && (divergence_trend(result.trace) || information_degenerate(cur.info.A))) {
            result.status = FitStatus::DivergenceSuspected;
            break;
        }

        if (penalized) {
            if (auto exact = exact_newton_direction(ds, link, cur)) dir = std::move(*exact);
        }
        const double slope = cur.grad.dot(dir);
        // Below this predicted gain the objective cannot resolve the step, so the
        // full step is taken unless it loses more than rounding noise.
        const double noise = 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(cur.objective));
        bool accepted = false;
        if (slope <= noise) {
            const Eigen::VectorXd cand = cur.beta + dir;
            if (objective_only(ds, link, penalized, cand) >= cur.objective - noise) {
                if (auto next = evaluate(ds, link, penalized, cand)) {
                    cur = std::move(*next);
                    accepted = true;
                }
            }
        }
        double t = 1.0;
        for (int k = 0; !accepted && k <= kMaxHalvings; ++k, t *= cfg.step_shrink) {
            const Eigen::VectorXd cand = cur.beta + t * dir;
            const double obj = objective_only(ds, link, penalized, cand);
            if (!std::isfinite(obj) || obj < cur.objective + cfg.armijo_c * t * slope) continue;
            auto next = evaluate(ds, link, penalized, cand);
            if (!next) continue;
            cur = std::move(*next);
            accepted = true;
        }
        if (!accepted) break;  // stalled: reported as MaxIterations

        ++result.iterations;
        result.trace.push_back({cur.objective, cur.beta.norm()});
        if (!penalized && cur.beta.norm() > cfg.divergence_norm) {
            result.status = FitStatus::DivergenceSuspected;
            break;
        }
    }

    result.beta_hat = cur.beta;
    result.objective = cur.objective;
    result.grad_norm = cur.grad.lpNorm<Eigen::Infinity>();

    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.se = Eigen::VectorXd::Constant(p, nan);
    result.h = Eigen::VectorXd::Constant(ds.n(), nan);
    try {
        result.se = standard_errors(ds, link, cur.beta);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CholeskyFailure) throw;
    }
    if (auto pen = try_penalty(ds, link, cur.beta)) result.h = pen->h;
    return result;
}

}  // namespace

FitResult fit_penalized(const Dataset& ds, LinkKind link, const FitConfig& cfg) {
    return run_ascent(ds, link, cfg, true);
}

FitResult fit_mle(const Dataset& ds, LinkKind link, const FitConfig& cfg) {
    return run_ascent(ds, link, cfg, false);
}

}  // namespace firth
