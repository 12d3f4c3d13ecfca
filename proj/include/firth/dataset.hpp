#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace firth {

/// One unvalidated observation: successes, trials and covariates.
struct RawRecord {
    double y = 0.0;
    double m = 1.0;
    std::vector<double> x;
};

/// Grouped binomial data: design matrix X (n x p), successes y, trials m.
///
/// Instances are only produced by validate_dataset / Dataset::from_arrays, so
/// 0 <= y_i <= m_i, m_i >= 1 and n >= p >= 1 always hold. The column rank is
/// decided once at construction.
class Dataset {
public:
    static Dataset from_arrays(Eigen::MatrixXd X, const Eigen::VectorXd& y, const Eigen::VectorXd& m);

    const Eigen::MatrixXd& X() const noexcept { return X_; }
    const Eigen::VectorXd& y() const noexcept { return y_; }
    const Eigen::VectorXd& m() const noexcept { return m_; }
    Eigen::Index n() const noexcept { return X_.rows(); }
    Eigen::Index p() const noexcept { return X_.cols(); }
    Eigen::Index rank() const noexcept { return rank_; }
    bool full_column_rank() const noexcept { return rank_ == X_.cols(); }

    /// Throws Error(RankDeficient) unless X has full column rank.
    void require_full_rank() const;

    /// Same data with row i scaled by factor (factor > 0).
    Dataset with_scaled_row(Eigen::Index i, double factor) const;

private:
    Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::VectorXd m);

    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    Eigen::VectorXd m_;
    Eigen::Index rank_ = 0;
};

Dataset validate_dataset(const std::vector<RawRecord>& rows);

/// Numerical rank of X: pivoted QR, pivots below 1e-10 x largest column norm dropped.
Eigen::Index column_rank(const Eigen::MatrixXd& X);

}  // namespace firth
