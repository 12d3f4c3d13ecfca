#include "firth/likelihood.hpp"

#include "firth/error.hpp"

#include <cmath>

namespace firth {

ModelState model_state(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    if (beta.size() != ds.p()) throw Error(ErrorCode::DimensionMismatch, "beta must have length p");
    if (!beta.allFinite()) throw Error(ErrorCode::NonFiniteInput, "beta is not finite");
    ModelState state;
    state.beta = beta;
    state.eta = ds.X() * beta;
    state.evals.reserve(static_cast<std::size_t>(ds.n()));
    for (Eigen::Index i = 0; i < ds.n(); ++i) state.evals.push_back(link_eval(link, state.eta(i)));
    return state;
}

double log_likelihood(const Dataset& ds, const ModelState& state) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const LinkEval& e = state.evals[static_cast<std::size_t>(i)];
        const double y = ds.y()(i);
        const double failures = ds.m()(i) - y;
        if (y > 0.0) total += y * e.log_pi;
        if (failures > 0.0) total += failures * e.log_pi_c;
    }
    if (!std::isfinite(total)) throw Error(ErrorCode::NonFiniteResult, "log-likelihood is not finite");
    return total;
}

double log_likelihood(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    if (link == LinkKind::Logit) {
        // Canonical form: sum y_i eta_i - m_i log(1 + exp(eta_i)).
        const ModelState state = model_state(ds, link, beta);
        double total = 0.0;
        for (Eigen::Index i = 0; i < ds.n(); ++i) {
            const double eta = state.evals[static_cast<std::size_t>(i)].eta;
            total += ds.y()(i) * eta - ds.m()(i) * softplus(eta);
        }
        if (!std::isfinite(total)) throw Error(ErrorCode::NonFiniteResult, "log-likelihood is not finite");
        return total;
    }
    return log_likelihood(ds, model_state(ds, link, beta));
}

Eigen::VectorXd score(const Dataset& ds, const ModelState& state) {
    Eigen::VectorXd resid(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const LinkEval& e = state.evals[static_cast<std::size_t>(i)];
        const double y = ds.y()(i);
        // y - m pi written as y (1 - pi) - (m - y) pi
        resid(i) = (y * e.pi_c - (ds.m()(i) - y) * e.pi) * e.score_factor;
    }
    Eigen::VectorXd g = ds.X().transpose() * resid;
    if (!g.allFinite()) throw Error(ErrorCode::NonFiniteResult, "score is not finite");
    return g;
}

Eigen::VectorXd score(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    return score(ds, model_state(ds, link, beta));
}

Eigen::MatrixXd weighted_crossprod(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(X.cols(), X.cols());
    A.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose() * weights.cwiseSqrt().asDiagonal());
    return A.selfadjointView<Eigen::Lower>();
}

FisherInfo fisher_info(const Dataset& ds, const ModelState& state) {
    const Eigen::Index n = ds.n(), p = ds.p();
    Eigen::VectorXd weights(n);
    Eigen::MatrixXd weighted(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const LinkEval& e = state.evals[static_cast<std::size_t>(i)];
        weights(i) = ds.m()(i) * e.w;
        // sqrt(m w) in log space stays accurate where w is tiny.
        weighted.row(i) = std::exp(0.5 * (std::log(ds.m()(i)) + e.logw)) * ds.X().row(i);
    }

    FisherInfo info;
    info.A = weighted_crossprod(ds.X(), weights);
    // L comes from the QR factor of M^{1/2} W^{1/2} X rather than a Cholesky of
    // A, which would square the condition number before factoring.
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(weighted);
    Eigen::MatrixXd R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (R(j, j) < 0.0) R.row(j) *= -1.0;
    }
    info.L = R.transpose();
    const Eigen::VectorXd diag = info.L.diagonal();
    if (!(diag.array() > 0.0).all() || !diag.allFinite()) {
        throw Error(ErrorCode::CholeskyFailure, "expected information is not positive definite");
    }
    info.logdet = 2.0 * diag.array().log().sum();
    if (!std::isfinite(info.logdet)) {
        throw Error(ErrorCode::CholeskyFailure, "log-determinant of the expected information is not finite");
    }
    return info;
}

FisherInfo fisher_info(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    return fisher_info(ds, model_state(ds, link, beta));
}

}  // namespace firth
