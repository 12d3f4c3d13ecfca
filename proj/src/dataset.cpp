#include "firth/dataset.hpp"

#include "firth/error.hpp"

#include <cmath>
#include <string>

namespace firth {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonIntegerCount: return "NonIntegerCount";
    case ErrorCode::CountOutOfRange: return "CountOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::NoGradient: return "NoGradient";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::LpInfeasible: return "LpInfeasible";
    case ErrorCode::LpUnbounded: return "LpUnbounded";
    case ErrorCode::LpNumericalFailure: return "LpNumericalFailure";
    case ErrorCode::ZeroRowNorm: return "ZeroRowNorm";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Eigen::Index column_rank(const Eigen::MatrixXd& X) {
    if (X.size() == 0) return 0;
    // Eigen compares each pivot against threshold * |largest pivot|, and the
    // first pivot of a column-pivoted QR is the largest column norm.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    return qr.rank();
}

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::VectorXd m)
    : X_(std::move(X)), y_(std::move(y)), m_(std::move(m)), rank_(column_rank(X_)) {}

void Dataset::require_full_rank() const {
    if (!full_column_rank()) {
        throw Error(ErrorCode::RankDeficient, "design matrix has rank " + std::to_string(rank_) +
                                                  " < " + std::to_string(p()) + " columns");
    }
}

Dataset Dataset::with_scaled_row(Eigen::Index i, double factor) const {
    if (!(factor > 0.0) || i < 0 || i >= n()) {
        throw Error(ErrorCode::InvalidArgument, "row scaling needs a valid row and a positive factor");
    }
    Eigen::MatrixXd X = X_;
    X.row(i) *= factor;
    return Dataset(std::move(X), y_, m_);
}

namespace {

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

void check_counts(double y, double m, Eigen::Index row) {
    const std::string where = "row " + std::to_string(row);
    if (!is_integral(y) || !is_integral(m)) {
        throw Error(ErrorCode::NonIntegerCount, where + ": y and m must be whole numbers");
    }
    if (m < 1.0) throw Error(ErrorCode::CountOutOfRange, where + ": m must be at least 1");
    if (y < 0.0 || y > m) throw Error(ErrorCode::CountOutOfRange, where + ": need 0 <= y <= m");
}

}  // namespace

Dataset Dataset::from_arrays(Eigen::MatrixXd X, const Eigen::VectorXd& y, const Eigen::VectorXd& m) {
    if (X.rows() == 0 || X.cols() == 0) throw Error(ErrorCode::EmptyData, "no observations or no covariates");
    if (y.size() != X.rows() || m.size() != X.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "y and m must have one entry per row of X");
    }
    if (X.rows() < X.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "need at least as many observations as covariates");
    }
    if (!X.allFinite()) throw Error(ErrorCode::NonFiniteInput, "design matrix has non-finite entries");
    for (Eigen::Index i = 0; i < X.rows(); ++i) check_counts(y(i), m(i), i);
    return Dataset(std::move(X), y, m);
}

Dataset validate_dataset(const std::vector<RawRecord>& rows) {
    if (rows.empty()) throw Error(ErrorCode::EmptyData, "no records");
    const auto p = static_cast<Eigen::Index>(rows.front().x.size());
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n), m(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const RawRecord& r = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(r.x.size()) != p) {
            throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(i) + " has " +
                                                          std::to_string(r.x.size()) + " covariates, expected " +
                                                          std::to_string(p));
        }
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = r.x[static_cast<std::size_t>(j)];
        y(i) = r.y;
        m(i) = r.m;
    }
    return Dataset::from_arrays(std::move(X), y, m);
}

}  // namespace firth
