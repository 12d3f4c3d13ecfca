#include "firth/penalty.hpp"

#include "firth/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace firth {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::optional<PenaltyEval> try_penalty(const Dataset& ds, const ModelState& state) {
    const Eigen::Index n = ds.n();
    const Eigen::Index p = ds.p();

    FisherInfo info;
    try {
        info = fisher_info(ds, state);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CholeskyFailure) return std::nullopt;
        throw;
    }

    // Hat diagonals from the thin Q of M^{1/2} W^{1/2} X; sqrt(m w) is taken
    // in log space so it stays accurate where w is tiny.
    Eigen::MatrixXd weighted(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const LinkEval& e = state.evals[static_cast<std::size_t>(i)];
        weighted.row(i) = std::exp(0.5 * (std::log(ds.m()(i)) + e.logw)) * ds.X().row(i);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(weighted);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);

    PenaltyEval out;
    out.A = std::move(info.A);
    out.logdet = info.logdet;
    out.h = Q.rowwise().squaredNorm();

    Eigen::VectorXd coef(n);
    for (Eigen::Index i = 0; i < n; ++i) coef(i) = 0.5 * state.evals[static_cast<std::size_t>(i)].dlogw * out.h(i);
    out.grad = ds.X().transpose() * coef;
    if (!out.grad.allFinite() || !out.h.allFinite()) return std::nullopt;
    return out;
}

std::optional<PenaltyEval> try_penalty(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    return try_penalty(ds, model_state(ds, link, beta));
}

PenaltyEval penalty(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    auto pen = try_penalty(ds, link, beta);
    if (!pen) throw Error(ErrorCode::CholeskyFailure, "expected information is not positive definite");
    return std::move(*pen);
}

double penalized_loglik(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    const ModelState state = model_state(ds, link, beta);
    auto pen = try_penalty(ds, state);
    if (!pen) return -std::numeric_limits<double>::infinity();
    return log_likelihood(ds, link, beta) + pen->value();
}

Eigen::VectorXd penalized_gradient(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    const ModelState state = model_state(ds, link, beta);
    auto pen = try_penalty(ds, state);
    if (!pen) throw Error(ErrorCode::NoGradient, "penalty is -infinity at this beta");
    return score(ds, state) + pen->grad;
}

namespace {

// Visits every increasing index tuple of length k from {0..n-1}, lexicographically.
template <typename Visit>
void for_each_subset(Eigen::Index n, Eigen::Index k, Visit&& visit) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) idx[static_cast<std::size_t>(j)] = j;
    while (true) {
        visit(idx);
        Eigen::Index j = k - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - k + j) --j;
        if (j < 0) return;
        ++idx[static_cast<std::size_t>(j)];
        for (Eigen::Index t = j + 1; t < k; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
    }
}

double minor_det(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
    const Eigen::Index p = X.cols();
    Eigen::MatrixXd sub(p, p);
    for (Eigen::Index r = 0; r < p; ++r) sub.row(r) = X.row(rows[static_cast<std::size_t>(r)]);
    return Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
}

void check_oracle_size(const Eigen::MatrixXd& X) {
    if (X.rows() > kBinetCauchyMaxRows) {
        throw Error(ErrorCode::TooLargeForOracle, "Binet-Cauchy enumeration is limited to 25 rows");
    }
    if (X.rows() < X.cols() || X.cols() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "Binet-Cauchy sum needs n >= p >= 1");
    }
}

}  // namespace

double binet_cauchy_sum(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights) {
    check_oracle_size(X);
    std::vector<double> terms;
    for_each_subset(X.rows(), X.cols(), [&](const std::vector<Eigen::Index>& rows) {
        const double d = minor_det(X, rows);
        double term = d * d;
        for (Eigen::Index r : rows) term *= weights(r);
        terms.push_back(term);
    });
    return pairwise_sum(terms);
}

double log_binet_cauchy_sum(const Eigen::MatrixXd& X, const Eigen::VectorXd& log_weights) {
    check_oracle_size(X);
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    for_each_subset(X.rows(), X.cols(), [&](const std::vector<Eigen::Index>& rows) {
        const double d = minor_det(X, rows);
        if (d == 0.0) {
            logs.push_back(neg_inf);
            return;
        }
        double term = 2.0 * std::log(std::abs(d));
        for (Eigen::Index r : rows) term += log_weights(r);
        logs.push_back(term);
    });
    const double top = *std::max_element(logs.begin(), logs.end());
    if (top == neg_inf) return neg_inf;
    std::vector<double> scaled(logs.size());
    std::transform(logs.begin(), logs.end(), scaled.begin(), [top](double l) { return std::exp(l - top); });
    return top + std::log(pairwise_sum(scaled));
}

double binet_cauchy_det(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta) {
    check_oracle_size(ds.X());
    const ModelState state = model_state(ds, link, beta);
    Eigen::VectorXd weights(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i) weights(i) = ds.m()(i) * state.evals[static_cast<std::size_t>(i)].w;
    return binet_cauchy_sum(ds.X(), weights);
}

}  // namespace firth
