#include "firth/lp.hpp"

#include "firth/error.hpp"

#include <cmath>
#include <limits>

namespace firth {

void LpProblem::validate() const {
    const Eigen::Index q = objective.size();
    if (q == 0) throw Error(ErrorCode::DimensionMismatch, "LP has no variables");
    if (constraints.cols() != q && constraints.rows() > 0) {
        throw Error(ErrorCode::DimensionMismatch, "constraint matrix width differs from variable count");
    }
    if (static_cast<Eigen::Index>(senses.size()) != constraints.rows() || rhs.size() != constraints.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "one sense and one right-hand side per constraint row");
    }
    if (lower.size() != q || upper.size() != q) throw Error(ErrorCode::DimensionMismatch, "bounds length");
    if (!lower.allFinite() || !upper.allFinite()) throw Error(ErrorCode::InvalidArgument, "LP bounds must be finite");
    if (!objective.allFinite() || !constraints.allFinite() || !rhs.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "LP data must be finite");
    }
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr int kMaxPivots = 50000;

// Rows 0..m-1 of T hold B^{-1}[A | b]; the last column is the right-hand side.
struct Tableau {
    Eigen::MatrixXd T;
    std::vector<Eigen::Index> basis;
    int pivots = 0;

    Eigen::Index rows() const { return T.rows(); }
    Eigen::Index cols() const { return T.cols() - 1; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        T.row(r) /= T(r, c);
        for (Eigen::Index i = 0; i < T.rows(); ++i) {
            if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
        }
        basis[static_cast<std::size_t>(r)] = c;
        if (++pivots > kMaxPivots) throw Error(ErrorCode::LpNumericalFailure, "simplex pivot limit reached");
    }

    void drop_row(Eigen::Index r) {
        const Eigen::Index last = T.rows() - 1;
        if (r != last) {
            T.row(r) = T.row(last);
            basis[static_cast<std::size_t>(r)] = basis[static_cast<std::size_t>(last)];
        }
        T.conservativeResize(last, Eigen::NoChange);
        basis.pop_back();
    }
};

// Maximizes cost' z over the current tableau; columns with allowed[j] == false never enter.
void run_simplex(Tableau& tab, const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
    while (true) {
        Eigen::VectorXd cb(tab.rows());
        for (Eigen::Index i = 0; i < tab.rows(); ++i) cb(i) = cost(tab.basis[static_cast<std::size_t>(i)]);
        const Eigen::RowVectorXd reduced =
            cost.transpose() - cb.transpose() * tab.T.leftCols(tab.cols());

        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < tab.cols(); ++j) {
            if (allowed[static_cast<std::size_t>(j)] && reduced(j) > kCostTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return;

        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < tab.rows(); ++i) {
            const double a = tab.T(i, enter);
            if (a <= kPivotTol) continue;
            const double ratio = tab.T(i, tab.cols()) / a;
            if (leave < 0 || ratio < best - 1e-14) {
                best = ratio;
                leave = i;
            } else if (ratio <= best + 1e-14 &&
                       tab.basis[static_cast<std::size_t>(i)] < tab.basis[static_cast<std::size_t>(leave)]) {
                best = std::min(best, ratio);
                leave = i;
            }
        }
        if (leave < 0) throw Error(ErrorCode::LpUnbounded, "LP objective is unbounded");
        tab.pivot(leave, enter);
    }
}

}  // namespace

LpSolution lp_solve(const LpProblem& problem) {
    problem.validate();
    const Eigen::Index q = problem.objective.size();
    if ((problem.upper.array() < problem.lower.array()).any()) {
        throw Error(ErrorCode::LpInfeasible, "a lower bound exceeds its upper bound");
    }

    // Shift to v = x - lower >= 0 and append v_j <= upper_j - lower_j.
    const Eigen::Index k = problem.constraints.rows();
    const Eigen::Index m = k + q;
    Eigen::MatrixXd A(m, q);
    Eigen::VectorXd b(m);
    std::vector<Sense> senses(problem.senses);
    if (k > 0) {
        A.topRows(k) = problem.constraints;
        b.head(k) = problem.rhs - problem.constraints * problem.lower;
    }
    A.bottomRows(q).setIdentity();
    b.tail(q) = problem.upper - problem.lower;
    senses.resize(static_cast<std::size_t>(m), Sense::LessEqual);

    for (Eigen::Index i = 0; i < m; ++i) {
        if (b(i) < 0.0) {
            A.row(i) *= -1.0;
            b(i) = -b(i);
            Sense& s = senses[static_cast<std::size_t>(i)];
            if (s == Sense::LessEqual) s = Sense::GreaterEqual;
            else if (s == Sense::GreaterEqual) s = Sense::LessEqual;
        }
    }

    Eigen::Index n_slack = 0, n_art = 0;
    for (Sense s : senses) {
        if (s != Sense::Equal) ++n_slack;
        if (s != Sense::LessEqual) ++n_art;
    }
    const Eigen::Index cols = q + n_slack + n_art;
    const Eigen::Index art_begin = q + n_slack;

    Tableau tab;
    tab.T = Eigen::MatrixXd::Zero(m, cols + 1);
    tab.T.leftCols(q) = A;
    tab.T.col(cols) = b;
    tab.basis.resize(static_cast<std::size_t>(m));
    Eigen::Index slack = q, art = art_begin;
    for (Eigen::Index i = 0; i < m; ++i) {
        switch (senses[static_cast<std::size_t>(i)]) {
        case Sense::LessEqual:
            tab.T(i, slack) = 1.0;
            tab.basis[static_cast<std::size_t>(i)] = slack++;
            break;
        case Sense::GreaterEqual:
            tab.T(i, slack++) = -1.0;
            tab.T(i, art) = 1.0;
            tab.basis[static_cast<std::size_t>(i)] = art++;
            break;
        case Sense::Equal:
            tab.T(i, art) = 1.0;
            tab.basis[static_cast<std::size_t>(i)] = art++;
            break;
        }
    }

    std::vector<bool> allowed(static_cast<std::size_t>(cols), true);
    if (n_art > 0) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
        phase1.tail(n_art).setConstant(-1.0);
        run_simplex(tab, phase1, allowed);
        double infeasibility = 0.0;
        for (Eigen::Index i = 0; i < tab.rows(); ++i) {
            if (tab.basis[static_cast<std::size_t>(i)] >= art_begin) infeasibility += tab.T(i, cols);
        }
        if (infeasibility > 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
            throw Error(ErrorCode::LpInfeasible, "LP has no feasible point");
        }
        // Pivot zero-level artificials out of the basis, dropping redundant rows.
        for (Eigen::Index i = tab.rows() - 1; i >= 0; --i) {
            if (tab.basis[static_cast<std::size_t>(i)] < art_begin) continue;
            Eigen::Index col = -1;
            for (Eigen::Index j = 0; j < art_begin; ++j) {
                if (std::abs(tab.T(i, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) tab.pivot(i, col);
            else tab.drop_row(i);
        }
        for (Eigen::Index j = art_begin; j < cols; ++j) allowed[static_cast<std::size_t>(j)] = false;
    }

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
    phase2.head(q) = problem.objective;
    run_simplex(tab, phase2, allowed);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(q);
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
        const Eigen::Index j = tab.basis[static_cast<std::size_t>(i)];
        if (j < q) v(j) = tab.T(i, cols);
    }
    LpSolution sol;
    sol.x = problem.lower + v;
    sol.optimum = problem.objective.dot(sol.x);
    sol.pivots = tab.pivots;
    if (!sol.x.allFinite()) throw Error(ErrorCode::LpNumericalFailure, "simplex produced a non-finite point");
    return sol;
}

}  // namespace firth
