#pragma once

#include <Eigen/Dense>

#include <vector>

namespace firth {

enum class Sense { LessEqual, Equal, GreaterEqual };

/// maximize objective' x  s.t.  constraints.row(k) x (sense_k) rhs_k,  lower <= x <= upper.
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd constraints;
    std::vector<Sense> senses;
    Eigen::VectorXd rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    /// Throws Error(DimensionMismatch) or Error(InvalidArgument) on inconsistent data.
    void validate() const;
};

struct LpSolution {
    double optimum = 0.0;
    Eigen::VectorXd x;
    int pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's rule.
/// Throws Error(LpInfeasible), Error(LpUnbounded) or Error(LpNumericalFailure).
LpSolution lp_solve(const LpProblem& problem);

}  // namespace firth
