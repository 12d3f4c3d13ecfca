#include "firth/harness.hpp"

#include "firth/error.hpp"
#include "firth/likelihood.hpp"
#include "firth/penalty.hpp"
#include "firth/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace firth::harness {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInitialRefineStep = 0.05;
// Subset enumeration is used up to this many p-subsets, Cholesky beyond.
constexpr double kMaxSubsets = 1e5;

double binomial(Eigen::Index n, Eigen::Index k) {
    double r = 1.0;
    for (Eigen::Index j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
    return r;
}

double log_sum_exp(const std::vector<double>& logs) {
    const double top = logs.empty() ? kNegInf : *std::max_element(logs.begin(), logs.end());
    if (top == kNegInf) return kNegInf;
    std::vector<double> scaled(logs.size());
    std::transform(logs.begin(), logs.end(), scaled.begin(), [top](double l) { return std::exp(l - top); });
    return top + std::log(pairwise_sum(scaled));
}

// log det(X' M W(beta) X) that stays finite where det underflows: a log-space
// Binet-Cauchy sum over precomputed minors, or a max-weight-scaled Cholesky
// when there are too many subsets.
class SphereDet {
public:
    SphereDet(const Dataset& ds, LinkKind link) : ds_(ds), link_(link) {
        const Eigen::Index n = ds.n(), p = ds.p();
        enumerate_ = binomial(n, p) <= kMaxSubsets;
        if (!enumerate_) return;
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
        for (Eigen::Index j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
        Eigen::MatrixXd sub(p, p);
        while (true) {
            for (Eigen::Index r = 0; r < p; ++r) sub.row(r) = ds.X().row(idx[static_cast<std::size_t>(r)]);
            const double d = Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
            if (d != 0.0) {
                double base = 2.0 * std::log(std::abs(d));
                for (Eigen::Index i : idx) base += std::log(ds.m()(i));
                subsets_.push_back(idx);
                base_.push_back(base);
            }
            Eigen::Index j = p - 1;
            while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - p + j) --j;
            if (j < 0) break;
            ++idx[static_cast<std::size_t>(j)];
            for (Eigen::Index t = j + 1; t < p; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
        }
    }

    Eigen::VectorXd log_weights(const Eigen::VectorXd& beta) const {
        const Eigen::VectorXd eta = ds_.X() * beta;
        Eigen::VectorXd logw(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) logw(i) = link_eval(link_, eta(i)).logw;
        return logw;
    }

    double log_det(const Eigen::VectorXd& beta) const {
        const Eigen::VectorXd logw = log_weights(beta);
        if (enumerate_) {
            std::vector<double> terms(base_.size());
            for (std::size_t s = 0; s < base_.size(); ++s) {
                double t = base_[s];
                for (Eigen::Index i : subsets_[s]) t += logw(i);
                terms[s] = t;
            }
            return log_sum_exp(terms);
        }
        const double top = logw.maxCoeff();
        Eigen::VectorXd scaled(logw.size());
        for (Eigen::Index i = 0; i < logw.size(); ++i) scaled(i) = ds_.m()(i) * std::exp(logw(i) - top);
        Eigen::LLT<Eigen::MatrixXd> llt(weighted_crossprod(ds_.X(), scaled));
        if (llt.info() != Eigen::Success) return kNegInf;
        const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
        if (!(diag.array() > 0.0).all()) return kNegInf;
        return 2.0 * diag.array().log().sum() + static_cast<double>(ds_.p()) * top;
    }

private:
    const Dataset& ds_;
    LinkKind link_;
    bool enumerate_ = false;
    std::vector<std::vector<Eigen::Index>> subsets_;
    std::vector<double> base_;
};

// Coordinate ascent on the unit sphere: try u +- step e_j, renormalize, keep
// improvements, halve the step after a sweep without one.
template <typename F>
Eigen::VectorXd ascend_on_sphere(Eigen::VectorXd u, double& best, F&& f, int steps) {
    double step = kInitialRefineStep;
    for (int s = 0; s < steps; ++s) {
        bool improved = false;
        for (Eigen::Index j = 0; j < u.size(); ++j) {
            for (double sign : {1.0, -1.0}) {
                Eigen::VectorXd cand = u;
                cand(j) += sign * step;
                cand.normalize();
                const double v = f(cand);
                if (v > best) {
                    best = v;
                    u = std::move(cand);
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return u;
}

Eigen::MatrixXd normalized_rows(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd out = X;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double norm = X.row(i).norm();
        if (norm == 0.0) throw Error(ErrorCode::ZeroRowNorm, "row " + std::to_string(i) + " is the zero vector");
        out.row(i) /= norm;
    }
    return out;
}

double log_envelope_rhs(double log_k, double abs_eta) { return log_k - softplus(abs_eta); }

}  // namespace

void SphereScanConfig::validate() const {
    if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be at least 1");
    if (refine_steps < 0) throw Error(ErrorCode::InvalidArgument, "refine_steps must be nonnegative");
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "at least one radius is needed");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] >= 0.0) || !std::isfinite(radii[k])) {
            throw Error(ErrorCode::InvalidArgument, "radii must be finite and nonnegative");
        }
        if (k > 0 && !(radii[k] > radii[k - 1])) {
            throw Error(ErrorCode::InvalidArgument, "radii must be strictly increasing");
        }
    }
}

std::vector<Eigen::VectorXd> sphere_samples(Eigen::Index p, int count, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> out;
    if (p == 1) {
        out.push_back(Eigen::VectorXd::Constant(1, 1.0));
        out.push_back(Eigen::VectorXd::Constant(1, -1.0));
        return out;
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        out.push_back(Eigen::VectorXd::Unit(p, j));
        out.push_back(-Eigen::VectorXd::Unit(p, j));
    }
    if (p == 2) {
        for (int k = 0; k < count; ++k) {
            const double theta = 2.0 * std::numbers::pi * k / count;
            out.push_back(Eigen::Vector2d(std::cos(theta), std::sin(theta)));
        }
    } else if (p == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - (2.0 * k + 1.0) / count;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * k;
            out.push_back(Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi), z));
        }
    } else {
        Rng rng(seed);
        for (int k = 0; k < count; ++k) out.push_back(rng.unit_vector(p));
    }
    return out;
}

SphereSup sphere_sup_det(const Dataset& ds, LinkKind link, double r, const SphereScanConfig& cfg) {
    cfg.validate();
    ds.require_full_rank();
    if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be nonnegative");
    const SphereDet det(ds, link);

    SphereSup out;
    out.radius = r;
    const auto f = [&](const Eigen::VectorXd& u) { return det.log_det(r * u); };
    if (r == 0.0) {
        out.direction = Eigen::VectorXd::Unit(ds.p(), 0);
        out.log_value = f(out.direction);
    } else {
        out.log_value = kNegInf;
        const auto samples = sphere_samples(ds.p(), cfg.samples, cfg.seed);
        out.direction = samples.front();
        for (const auto& u : samples) {
            const double v = f(u);
            if (v > out.log_value) {
                out.log_value = v;
                out.direction = u;
            }
        }
        if (ds.p() > 1) out.direction = ascend_on_sphere(out.direction, out.log_value, f, cfg.refine_steps);
    }
    out.value = std::exp(out.log_value);
    return out;
}

double abs_cos_sum(const Eigen::MatrixXd& X, const Eigen::VectorXd& u) {
    return (normalized_rows(X) * u).cwiseAbs().sum();
}

double min_abs_cos_sum(const Eigen::MatrixXd& X, const SphereScanConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXd unit_rows = normalized_rows(X);
    const auto neg_sum = [&](const Eigen::VectorXd& u) { return -(unit_rows * u).cwiseAbs().sum(); };
    double best = kNegInf;
    Eigen::VectorXd arg;
    for (const auto& u : sphere_samples(X.cols(), cfg.samples, cfg.seed)) {
        const double v = neg_sum(u);
        if (v > best) {
            best = v;
            arg = u;
        }
    }
    if (X.cols() > 1) ascend_on_sphere(arg, best, neg_sum, cfg.refine_steps);
    return -best;
}

bool DecayReport::ok() const {
    return strictly_decreasing && decay_ok && bound_rate > 0.0 && product_failures == 0;
}

DecayReport decay_curve(const Dataset& ds, LinkKind link, const SphereScanConfig& cfg) {
    cfg.validate();
    ds.require_full_rank();
    DecayReport rep;
    rep.link = link;
    rep.n = ds.n();
    rep.p = ds.p();
    rep.square = ds.n() == ds.p();
    rep.envelope_constant = envelope_constant(link);
    const double log_k = std::log(rep.envelope_constant);

    std::vector<Eigen::VectorXd> directions = sphere_samples(ds.p(), cfg.samples, cfg.seed);
    for (double r : cfg.radii) {
        const SphereSup sup = sphere_sup_det(ds, link, r, cfg);
        rep.points.push_back({r, sup.log_value, sup.value});
        if (r > 0.0) directions.push_back(sup.direction);
    }

    rep.log_coefficient = fisher_info(ds, LinkKind::Logit, Eigen::VectorXd::Zero(ds.p())).logdet +
                          static_cast<double>(ds.p()) * std::log(4.0);  // det(X' M X)

    rep.a = ds.X().rowwise().norm().minCoeff();
    if (rep.square) {
        if (rep.a == 0.0) throw Error(ErrorCode::ZeroRowNorm, "the square-design bound needs nonzero rows");
        // c is the smallest cos-sum seen anywhere, so every checked u has sum >= c.
        rep.c = min_abs_cos_sum(ds.X(), cfg);
        for (const auto& u : directions) rep.c = std::min(rep.c, abs_cos_sum(ds.X(), u));
        const SphereDet det(ds, link);
        for (double r : cfg.radii) {
            for (const auto& u : directions) {
                const double log_prod = det.log_weights(r * u).sum();
                const double rhs = static_cast<double>(ds.n()) * log_k - rep.a * rep.c * r;
                ++rep.product_checks;
                if (!(log_prod <= rhs + 1e-12 * (1.0 + std::abs(rhs)))) ++rep.product_failures;
            }
        }
    } else {
        rep.c = rep.a > 0.0 ? min_abs_cos_sum(ds.X(), cfg) : 0.0;
    }

    const double log_scale = rep.log_coefficient + static_cast<double>(ds.p()) * log_k;
    rep.bound_rate = std::numeric_limits<double>::infinity();
    double sr = 0.0, sl = 0.0, srr = 0.0, srl = 0.0;
    int count = 0;
    for (const DecayPoint& pt : rep.points) {
        if (pt.radius <= 0.0) continue;
        rep.bound_rate = std::min(rep.bound_rate, (log_scale - pt.log_sup) / pt.radius);
        if (std::isfinite(pt.log_sup)) {
            sr += pt.radius;
            sl += pt.log_sup;
            srr += pt.radius * pt.radius;
            srl += pt.radius * pt.log_sup;
            ++count;
        }
    }
    if (!std::isfinite(rep.bound_rate)) rep.bound_rate = 0.0;
    if (count >= 2) rep.fitted_rate = -(count * srl - sr * sl) / (count * srr - sr * sr);

    rep.strictly_decreasing = rep.points.size() >= 2;
    for (std::size_t k = 2; k < rep.points.size(); ++k) {
        if (!(rep.points[k].log_sup < rep.points[k - 1].log_sup)) rep.strictly_decreasing = false;
    }
    rep.log_decay_ratio = rep.points.back().log_sup - rep.points.front().log_sup;
    rep.decay_ok = rep.log_decay_ratio < std::log(1e-8);
    return rep;
}

double envelope_f(LinkKind link, double z) {
    double logw = 0.0;
    if (link == LinkKind::Cloglog) {
        logw = -2.0 * z - log_expm1(std::exp(-z));
    } else {
        logw = link_eval(link, z).logw;
    }
    return std::exp(softplus(std::abs(z)) + logw);
}

double cloglog_g(double z) {
    const double e = std::exp(-z);
    return (1.0 + std::exp(std::abs(z))) * e / (1.0 + e / 2.0 + e * e / 6.0);
}

namespace {

struct Scan {
    double sup = kNegInf;
    double argmax = 0.0;
    bool finite = true;
    std::size_t points = 0;
};

std::size_t grid_size(double lo, double hi, double step) {
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double grid_point(double lo, double hi, double step, std::size_t k) {
    return std::min(hi, lo + static_cast<double>(k) * step);
}

Scan scan_envelope(LinkKind link, double lo, double hi, double step) {
    Scan s;
    s.points = grid_size(lo, hi, step);
    for (std::size_t k = 0; k < s.points; ++k) {
        const double z = grid_point(lo, hi, step, k);
        const double f = envelope_f(link, z);
        if (!std::isfinite(f)) {
            s.finite = false;
            continue;
        }
        if (f > s.sup) {
            s.sup = f;
            s.argmax = z;
        }
    }
    // Golden-section polish of the grid maximum inside its neighbouring cells.
    double a = std::max(lo, s.argmax - step), b = std::min(hi, s.argmax + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = envelope_f(link, x1), f2 = envelope_f(link, x2);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = envelope_f(link, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = envelope_f(link, x1);
        }
    }
    const double z = 0.5 * (a + b);
    const double f = envelope_f(link, z);
    if (std::isfinite(f) && f > s.sup) {
        s.sup = f;
        s.argmax = z;
    }
    return s;
}

}  // namespace

bool EnvelopeReport::ok() const {
    return finite_everywhere && sup_stable && logit_bound_ok && g_limits_ok && f_below_g && mills_ok;
}

EnvelopeReport check_weight_envelope(LinkKind link, double z_lo, double z_hi, double step) {
    if (!(z_lo < z_hi) || !(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "need z_lo < z_hi and step > 0");
    EnvelopeReport rep;
    rep.link = link;
    rep.z_lo = z_lo;
    rep.z_hi = z_hi;
    rep.step = step;

    const Scan coarse = scan_envelope(link, z_lo, z_hi, step);
    const Scan fine = scan_envelope(link, z_lo, z_hi, step / 2.0);
    rep.points = coarse.points;
    rep.sup_f = coarse.sup;
    rep.argmax_z = coarse.argmax;
    rep.finite_everywhere = coarse.finite && fine.finite && std::isfinite(coarse.sup);
    rep.sup_f_half_step = fine.sup;
    rep.sup_stable = std::abs(coarse.sup - fine.sup) < 1e-6;

    for (std::size_t k = 0; k < rep.points; ++k) {
        const double z = grid_point(z_lo, z_hi, step, k);
        const double f = envelope_f(link, z);
        switch (link) {
        case LinkKind::Logit:
            if (!(f <= 1.0)) rep.logit_bound_ok = false;
            break;
        case LinkKind::Cloglog:
            if (!(f <= cloglog_g(z) * (1.0 + 1e-12))) rep.f_below_g = false;
            break;
        case LinkKind::Probit:
            if (z > 0.0) {
                const bool half = normal::cdf(z) > 0.5;
                const bool mills = normal::log_sf(z) > std::log(z) + normal::log_pdf(z) - std::log1p(z * z);
                if (!half || !mills) rep.mills_ok = false;
            }
            break;
        }
    }
    if (link == LinkKind::Cloglog) {
        rep.g_pos = cloglog_g(30.0);
        rep.g_neg = cloglog_g(-30.0);
        rep.g_limits_ok = std::abs(rep.g_pos - 1.0) < 1e-6 && std::abs(rep.g_neg - 6.0) < 1e-6;
    }
    return rep;
}

double envelope_constant(LinkKind link) {
    switch (link) {
    case LinkKind::Logit: return 1.0;
    case LinkKind::Probit: {
        static const double k = check_weight_envelope(LinkKind::Probit).sup_f;
        return k;
    }
    case LinkKind::Cloglog: {
        static const double k = check_weight_envelope(LinkKind::Cloglog).sup_f;
        return k;
    }
    }
    return 1.0;
}

InequalityReport envelope_inequality_check(const Dataset& ds, LinkKind link, std::span<const double> radii,
                                           const SphereScanConfig& cfg, double envelope_const) {
    cfg.validate();
    InequalityReport rep;
    rep.link = link;
    rep.envelope_constant = envelope_const;
    rep.worst_log_margin = kNegInf;
    const double log_k = std::log(envelope_const);
    for (const auto& u : sphere_samples(ds.p(), cfg.samples, cfg.seed)) {
        const Eigen::VectorXd proj = ds.X() * u;
        for (double r : radii) {
            for (Eigen::Index i = 0; i < ds.n(); ++i) {
                const double eta = r * proj(i);
                const double rhs = log_envelope_rhs(log_k, std::abs(eta));
                const double margin = link_eval(link, eta).logw - rhs;
                rep.worst_log_margin = std::max(rep.worst_log_margin, margin);
                ++rep.checks;
                if (!(margin <= 1e-12 * (1.0 + std::abs(rhs)))) ++rep.failures;
            }
        }
    }
    return rep;
}

SphereRestriction sphere_restriction_check(const Dataset& ds, LinkKind link, const Eigen::VectorXd& beta_hat,
                                           std::uint64_t seed, int directions, double radius) {
    SphereRestriction out;
    out.objective = penalized_loglik(ds, link, beta_hat);
    out.threshold = penalized_loglik(ds, link, Eigen::VectorXd::Zero(ds.p()));
    out.max_far = kNegInf;
    Rng rng(seed);
    for (int k = 0; k < directions; ++k) {
        const Eigen::VectorXd u = rng.unit_vector(ds.p());
        out.max_far = std::max(out.max_far, penalized_loglik(ds, link, radius * u));
    }
    out.above_threshold = out.objective >= out.threshold;
    out.beats_far = out.objective > out.max_far;
    return out;
}

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::TwoPoint: return "two-point";
    case ScenarioKind::InterceptOnlyZero: return "intercept-only-zero";
    case ScenarioKind::Separated: return "separated";
    case ScenarioKind::QuasiSeparated: return "quasi-separated";
    case ScenarioKind::Overlapped: return "overlapped";
    case ScenarioKind::AllZero: return "all-zero";
    case ScenarioKind::AllMax: return "all-max";
    case ScenarioKind::Balanced: return "balanced";
    }
    return "unknown";
}

std::string scenario_id(const Scenario& s) {
    return std::string(to_string(s.kind)) + "-p" + std::to_string(s.p) + "-s" + std::to_string(s.seed);
}

namespace {

// Intercept column plus standard normal covariates (no intercept when p = 1).
Eigen::MatrixXd random_design(Rng& rng, Eigen::Index n, Eigen::Index p) {
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
        if (p > 1) X(i, 0) = 1.0;
    }
    return X;
}

struct SeparatedData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd b;
};

SeparatedData separated_data(Rng& rng, Eigen::Index p) {
    while (true) {
        const Eigen::Index n = 2 * p + 2 + rng.integer(0, 4);
        SeparatedData d;
        d.X = random_design(rng, n, p);
        d.b = rng.normal_vector(p);
        if (p == 1) {
            for (Eigen::Index i = 0; i < n; ++i) {
                d.X(i, 0) = (i % 2 == 0 ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);
            }
        }
        const Eigen::VectorXd s = d.X * d.b;
        d.y = (s.array() > 0.0).cast<double>();
        const double successes = d.y.sum();
        if (successes == 0.0 || successes == static_cast<double>(n)) continue;
        if (s.cwiseAbs().minCoeff() < 0.1 * d.b.norm()) continue;
        if (column_rank(d.X) < p) continue;
        return d;
    }
}

}  // namespace

Dataset make_scenario(const Scenario& s) {
    // Distinct streams per kind so equal seeds do not produce related designs.
    Rng rng(s.seed * 1000003ULL + static_cast<std::uint64_t>(s.kind) * 7919ULL + static_cast<std::uint64_t>(s.p));
    const Eigen::Index p = s.p;
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "scenario needs p >= 1");

    switch (s.kind) {
    case ScenarioKind::TwoPoint:
        return Dataset::from_arrays(Eigen::MatrixXd{{-1.0}, {1.0}}, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 1.0));
    case ScenarioKind::InterceptOnlyZero:
        return Dataset::from_arrays(Eigen::MatrixXd{{1.0}}, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 5.0));
    case ScenarioKind::Separated: {
        SeparatedData d = separated_data(rng, p);
        return Dataset::from_arrays(d.X, d.y, Eigen::VectorXd::Ones(d.y.size()));
    }
    case ScenarioKind::QuasiSeparated: {
        SeparatedData d = separated_data(rng, std::max<Eigen::Index>(p, 2));
        const Eigen::Index n = d.X.rows(), q = d.X.cols();
        Eigen::VectorXd z = rng.normal_vector(q);
        z -= (z.dot(d.b) / d.b.squaredNorm()) * d.b;
        Eigen::MatrixXd X(n + 2, q);
        X << d.X, z.transpose(), z.transpose();
        Eigen::VectorXd y(n + 2);
        y << d.y, 0.0, 1.0;
        return Dataset::from_arrays(X, y, Eigen::VectorXd::Ones(n + 2));
    }
    case ScenarioKind::Overlapped:
    case ScenarioKind::Balanced: {
        const bool balanced = s.kind == ScenarioKind::Balanced;
        const Eigen::Index n = balanced ? 200 : 40;
        const int trials = balanced ? 20 : 1;
        while (true) {
            const Eigen::MatrixXd X = random_design(rng, n, p);
            const Eigen::VectorXd beta = 0.5 * rng.normal_vector(p);
            Eigen::VectorXd y(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double prob = link_eval(LinkKind::Logit, X.row(i).dot(beta)).pi;
                int hits = 0;
                for (int t = 0; t < trials; ++t) hits += rng.uniform() < prob ? 1 : 0;
                y(i) = hits;
            }
            if (column_rank(X) < p) continue;
            return Dataset::from_arrays(X, y, Eigen::VectorXd::Constant(n, trials));
        }
    }
    case ScenarioKind::AllZero:
    case ScenarioKind::AllMax: {
        while (true) {
            const Eigen::Index n = p + 2 + rng.integer(0, 3);
            const Eigen::MatrixXd X = random_design(rng, n, p);
            Eigen::VectorXd m(n);
            for (Eigen::Index i = 0; i < n; ++i) m(i) = rng.integer(1, 5);
            if (column_rank(X) < p) continue;
            const Eigen::VectorXd y = s.kind == ScenarioKind::AllZero ? Eigen::VectorXd::Zero(n) : m;
            return Dataset::from_arrays(X, y, m);
        }
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown scenario kind");
}

Dataset well_conditioned_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
    if (n < p || p < 1) throw Error(ErrorCode::InvalidArgument, "design needs n >= p >= 1");
    constexpr double kAcceptSigma = 0.3;  // acceptance is about 1% for n = 6, p = 3
    constexpr double kTargetSigma = 0.8;
    Rng rng(seed);
    while (true) {
        Eigen::MatrixXd X(n, p);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.uniform(-3.0, 3.0);
        }
        double sigma = std::numeric_limits<double>::infinity();
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
        for (Eigen::Index j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
        Eigen::MatrixXd sub(p, p);
        while (sigma >= kAcceptSigma) {
            for (Eigen::Index r = 0; r < p; ++r) sub.row(r) = X.row(idx[static_cast<std::size_t>(r)]);
            sigma = std::min(sigma, Eigen::JacobiSVD<Eigen::MatrixXd>(sub).singularValues()(p - 1));
            Eigen::Index j = p - 1;
            while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - p + j) --j;
            if (j < 0) break;
            ++idx[static_cast<std::size_t>(j)];
            for (Eigen::Index t = j + 1; t < p; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
        }
        if (sigma < kAcceptSigma) continue;
        // Every p-row subset ends up with smallest singular value >= kTargetSigma.
        X *= kTargetSigma / sigma;
        Eigen::VectorXd m(n), y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            m(i) = rng.integer(1, 4);
            y(i) = rng.integer(0, static_cast<int>(m(i)));
        }
        return Dataset::from_arrays(X, y, m);
    }
}

bool ExistenceReport::ok() const {
    return std::all_of(links.begin(), links.end(), [](const LinkExistence& l) { return l.ok; });
}

ExistenceReport existence_experiment(const std::string& dataset_id, const Dataset& ds, std::uint64_t seed) {
    ExistenceReport rep;
    rep.dataset_id = dataset_id;
    const SeparationReport sep = detect_separation(ds);
    rep.separated = sep.separated;
    rep.separation = sep.kind;
    for (LinkKind link : kAllLinks) {
        LinkExistence le;
        le.link = link;
        const FitResult mle = fit_mle(ds, link);
        le.mle_status = mle.status;
        le.mle_beta_norm = mle.beta_hat.norm();
        const FitResult pen = fit_penalized(ds, link);
        le.penalized_status = pen.status;
        le.beta_hat = pen.beta_hat;
        le.beta_hat_norm = pen.beta_hat.norm();
        le.grad_norm = pen.grad_norm;
        le.sphere = sphere_restriction_check(ds, link, pen.beta_hat, seed);
        const FitStatus expected_mle = rep.separated ? FitStatus::DivergenceSuspected : FitStatus::Converged;
        le.ok = pen.status == FitStatus::Converged && le.beta_hat_norm < 20.0 && le.sphere.above_threshold &&
                le.sphere.beats_far && mle.status == expected_mle;
        rep.links.push_back(std::move(le));
    }
    return rep;
}

ExistenceReport existence_experiment(const Scenario& scenario) {
    return existence_experiment(scenario_id(scenario), make_scenario(scenario), scenario.seed);
}

bool VerificationReport::ok() const {
    const auto all = [](const auto& items) {
        return std::all_of(items.begin(), items.end(), [](const auto& r) { return r.ok(); });
    };
    return all(envelopes) && all(decays) && all(inequalities) && all(existence);
}

VerificationReport run_verification(std::uint64_t seed, const std::optional<Dataset>& extra) {
    VerificationReport rep;
    rep.seed = seed;
    SphereScanConfig cfg;
    cfg.seed = seed;

    for (LinkKind link : kAllLinks) rep.envelopes.push_back(check_weight_envelope(link));

    const auto add_design = [&](const std::string& id, const Dataset& ds) {
        for (LinkKind link : kAllLinks) {
            DecayReport d = decay_curve(ds, link, cfg);
            d.design_id = id;
            rep.decays.push_back(std::move(d));
            InequalityReport q = envelope_inequality_check(ds, link, cfg.radii, cfg, envelope_constant(link));
            q.design_id = id;
            rep.inequalities.push_back(std::move(q));
        }
    };
    for (Eigen::Index p = 1; p <= 3; ++p) {
        const std::uint64_t base = seed * 1000 + static_cast<std::uint64_t>(p) * 10;
        add_design("square-p" + std::to_string(p), well_conditioned_design(p, p, base + 1));
        add_design("tall-p" + std::to_string(p), well_conditioned_design(p + 3, p, base + 2));
    }

    std::vector<Scenario> scenarios{
        {ScenarioKind::TwoPoint, seed, 1},
        {ScenarioKind::InterceptOnlyZero, seed, 1},
        {ScenarioKind::QuasiSeparated, seed, 2},
        {ScenarioKind::QuasiSeparated, seed, 3},
        {ScenarioKind::AllZero, seed, 2},
        {ScenarioKind::AllMax, seed, 2},
        {ScenarioKind::Balanced, seed, 2},
    };
    for (Eigen::Index p = 1; p <= 3; ++p) {
        scenarios.push_back({ScenarioKind::Separated, seed, p});
        scenarios.push_back({ScenarioKind::Overlapped, seed, p});
    }
    for (const Scenario& s : scenarios) rep.existence.push_back(existence_experiment(s));

    if (extra) {
        if (extra->n() <= kBinetCauchyMaxRows) add_design("input", *extra);
        rep.existence.push_back(existence_experiment("input", *extra, seed));
    }
    return rep;
}

}  // namespace firth::harness
