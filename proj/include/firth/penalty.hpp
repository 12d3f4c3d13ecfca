#pragma once

#include "firth/dataset.hpp"
#include "firth/likelihood.hpp"
#include "firth/link.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>

namespace firth {

/// The Jeffreys penalty 0.5 log|X' M W X| and the pieces of its gradient.
struct PenaltyEval {
    Eigen::MatrixXd A;
    double logdet = 0.0;
    Eigen::VectorXd h;     // hat diagonals m_i w_i x_i' A^{-1} x_i
    Eigen::VectorXd grad;  // gradient of 0.5 * logdet

    double value() const noexcept { return 0.5 * logdet; }
};

/// std::nullopt when A loses definiteness, i.e. the penalty is -infinity.
std::optional<PenaltyEval> try_penalty(const Dataset& ds, const ModelState& state);
std::optional<PenaltyEval> try_penalty(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);

/// Throws Error(CholeskyFailure) where try_penalty returns nullopt.
PenaltyEval penalty(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);

/// l(beta) + 0.5 log|A(beta)|, or -infinity when A is numerically singular.
double penalized_loglik(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);

/// score + penalty gradient. Throws Error(NoGradient) when the penalty is -infinity.
Eigen::VectorXd penalized_gradient(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);

/// det(X' M W(beta) X) as the Binet-Cauchy sum over all p-row subsets of
/// squared minors times prod m_i w_i. Throws Error(TooLargeForOracle) for n > 25.
double binet_cauchy_det(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);

/// sum over p-subsets S of det(X_S)^2 * prod_{i in S} weights_i.
double binet_cauchy_sum(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights);

/// log of binet_cauchy_sum given log weights; -infinity if every minor vanishes.
double log_binet_cauchy_sum(const Eigen::MatrixXd& X, const Eigen::VectorXd& log_weights);

inline constexpr Eigen::Index kBinetCauchyMaxRows = 25;

/// Pairwise (cascade) summation; the result does not depend on thread timing.
double pairwise_sum(std::span<const double> values);

}  // namespace firth
