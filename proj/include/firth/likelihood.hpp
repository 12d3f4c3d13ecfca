#pragma once

#include "firth/dataset.hpp"
#include "firth/link.hpp"

#include <Eigen/Dense>

#include <vector>

namespace firth {

/// Linear predictor and link quantities at one parameter value.
struct ModelState {
    Eigen::VectorXd beta;
    Eigen::VectorXd eta;
    std::vector<LinkEval> evals;
};

ModelState model_state(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);

/// Binomial log-likelihood without the binomial-coefficient constant.
double log_likelihood(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);
double log_likelihood(const Dataset& ds, const ModelState& state);

Eigen::VectorXd score(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);
Eigen::VectorXd score(const Dataset& ds, const ModelState& state);

/// Expected information A = X' M W X with a lower factor L (A = L L'), taken from
/// the QR factor of M^{1/2} W^{1/2} X.
struct FisherInfo {
    Eigen::MatrixXd A;
    Eigen::MatrixXd L;
    double logdet = 0.0;
};

/// Throws Error(CholeskyFailure) when A is not numerically positive definite.
FisherInfo fisher_info(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta);
FisherInfo fisher_info(const Dataset& ds, const ModelState& state);

/// X' diag(weights) X.
Eigen::MatrixXd weighted_crossprod(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights);

}  // namespace firth
