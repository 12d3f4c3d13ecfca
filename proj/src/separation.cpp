#include "firth/separation.hpp"

#include "firth/error.hpp"

#include <algorithm>
#include <cmath>

namespace firth {

std::string_view to_string(SeparationKind kind) {
    switch (kind) {
    case SeparationKind::None: return "None";
    case SeparationKind::QuasiComplete: return "QuasiComplete";
    case SeparationKind::Complete: return "Complete";
    }
    return "Unknown";
}

std::string_view to_string(SideClass side) {
    return side == SideClass::OnHyperplane ? "on-hyperplane" : "correctly-sided";
}

Eigen::VectorXd separation_signs(const Dataset& ds) {
    Eigen::VectorXd c(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const double y = ds.y()(i);
        c(i) = y == ds.m()(i) ? 1.0 : (y == 0.0 ? -1.0 : 0.0);
    }
    return c;
}

LpProblem separation_lp(const Dataset& ds) {
    const Eigen::VectorXd c = separation_signs(ds);
    LpProblem lp;
    lp.objective = ds.X().transpose() * c;
    lp.constraints = ds.X();
    lp.rhs = Eigen::VectorXd::Zero(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        lp.senses.push_back(c(i) > 0.0 ? Sense::GreaterEqual : (c(i) < 0.0 ? Sense::LessEqual : Sense::Equal));
    }
    lp.lower = Eigen::VectorXd::Constant(ds.p(), -1.0);
    lp.upper = Eigen::VectorXd::Constant(ds.p(), 1.0);
    return lp;
}

double max_sign_violation(const Dataset& ds, const Eigen::VectorXd& b) {
    const Eigen::VectorXd c = separation_signs(ds);
    const Eigen::VectorXd proj = ds.X() * b;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const double v = c(i) == 0.0 ? std::abs(proj(i)) : std::max(0.0, -c(i) * proj(i));
        worst = std::max(worst, v);
    }
    return worst;
}

namespace {

bool on_hyperplane(const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    return std::abs(x.dot(b)) <= kSeparationTol * std::max(1.0, x.norm());
}

bool strict_everywhere(const Dataset& ds, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        if (on_hyperplane(ds.X().row(i).transpose(), b)) return false;
    }
    return true;
}

// maximize t  s.t.  c_i x_i'b >= t,  -1 <= b <= 1,  0 <= t <= 1.
Eigen::VectorXd max_margin_direction(const Dataset& ds, double& margin) {
    const Eigen::VectorXd c = separation_signs(ds);
    const Eigen::Index p = ds.p();
    LpProblem lp;
    lp.objective = Eigen::VectorXd::Zero(p + 1);
    lp.objective(p) = 1.0;
    lp.constraints.resize(ds.n(), p + 1);
    lp.constraints.leftCols(p) = c.asDiagonal() * ds.X();
    lp.constraints.col(p).setConstant(-1.0);
    lp.senses.assign(static_cast<std::size_t>(ds.n()), Sense::GreaterEqual);
    lp.rhs = Eigen::VectorXd::Zero(ds.n());
    lp.lower = Eigen::VectorXd::Constant(p + 1, -1.0);
    lp.lower(p) = 0.0;
    lp.upper = Eigen::VectorXd::Constant(p + 1, 1.0);
    const LpSolution sol = lp_solve(lp);
    margin = sol.optimum;
    return sol.x.head(p);
}

}  // namespace

SeparationReport detect_separation(const Dataset& ds) {
    ds.require_full_rank();
    const Eigen::VectorXd c = separation_signs(ds);

    LpSolution sol;
    try {
        sol = lp_solve(separation_lp(ds));
    } catch (const Error& e) {
        // b = 0 is always feasible and the box bounds the objective.
        if (e.code() == ErrorCode::LpInfeasible || e.code() == ErrorCode::LpUnbounded) {
            throw Error(ErrorCode::LpNumericalFailure, std::string("separation LP: ") + e.what());
        }
        throw;
    }

    SeparationReport report;
    report.lp_optimum = sol.optimum;
    report.separated = sol.optimum > kSeparationTol;
    report.direction = report.separated ? sol.x : Eigen::VectorXd::Zero(ds.p());

    if (report.separated) {
        const bool has_mixed = (c.array() == 0.0).any();
        if (!has_mixed && !strict_everywhere(ds, report.direction)) {
            double margin = 0.0;
            Eigen::VectorXd strict = max_margin_direction(ds, margin);
            if (margin > kSeparationTol && strict_everywhere(ds, strict)) report.direction = strict;
        }
        report.kind = !has_mixed && strict_everywhere(ds, report.direction) ? SeparationKind::Complete
                                                                            : SeparationKind::QuasiComplete;
        if (max_sign_violation(ds, report.direction) > kSeparationTol) {
            throw Error(ErrorCode::LpNumericalFailure, "separation certificate violates its sign constraints");
        }
    }

    report.classification.reserve(static_cast<std::size_t>(ds.n()));
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        report.classification.push_back(on_hyperplane(ds.X().row(i).transpose(), report.direction)
                                            ? SideClass::OnHyperplane
                                            : SideClass::CorrectlySided);
    }
    return report;
}

}  // namespace firth
