#pragma once

#include "firth/dataset.hpp"
#include "firth/lp.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace firth {

enum class SeparationKind { None, QuasiComplete, Complete };
enum class SideClass { OnHyperplane, CorrectlySided };

std::string_view to_string(SeparationKind kind);
std::string_view to_string(SideClass side);

struct SeparationReport {
    bool separated = false;
    Eigen::VectorXd direction;  // certificate b, zero when not separated
    std::vector<SideClass> classification;
    SeparationKind kind = SeparationKind::None;
    double lp_optimum = 0.0;
};

/// Residual tolerance for the sign constraints and the on-hyperplane test.
inline constexpr double kSeparationTol = 1e-9;

/// +1 for all-success rows, -1 for all-failure rows, 0 otherwise.
Eigen::VectorXd separation_signs(const Dataset& ds);

/// The box-bounded LP whose positive optimum certifies separation.
LpProblem separation_lp(const Dataset& ds);

/// Looks for b with x_i'b >= 0 on all-success rows, <= 0 on all-failure rows
/// and = 0 on mixed rows. A direction strict on every row is searched for
/// separately, so Complete is reported whenever such a b exists.
/// Throws Error(RankDeficient) or Error(LpNumericalFailure).
SeparationReport detect_separation(const Dataset& ds);

/// Largest violation of the sign constraints by b (0 when all hold).
double max_sign_violation(const Dataset& ds, const Eigen::VectorXd& b);

}  // namespace firth
