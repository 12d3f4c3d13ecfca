#include "firth/link.hpp"

#include "firth/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace firth {

std::string_view to_string(LinkKind link) {
    switch (link) {
    case LinkKind::Logit: return "logit";
    case LinkKind::Probit: return "probit";
    case LinkKind::Cloglog: return "cloglog";
    }
    return "unknown";
}

LinkKind parse_link(std::string_view name) {
    for (LinkKind link : kAllLinks) {
        if (to_string(link) == name) return link;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown link '" + std::string(name) + "'");
}

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double log_expm1(double x) {
    if (x > 1.0) return x + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x));
}

namespace normal {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))
// Below this z the Mills ratio comes from erfc; above it from the continued fraction.
constexpr double kMillsSwitch = 8.0;

// R(z) = 1/(z + 1/(z + 2/(z + 3/(z + ...)))), modified Lentz. Valid for z > 0,
// converges in a few dozen terms for z >= 8.
double mills_continued_fraction(double z) {
    constexpr double tiny = 1e-300;
    double f = z;
    double c = z;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        const double a = k;
        d = z + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = z + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

}  // namespace

double pdf(double z) { return std::exp(log_pdf(z)); }

double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double mills_ratio(double z) {
    if (z >= kMillsSwitch) return mills_continued_fraction(z);
    return sf(z) / pdf(z);
}

double hazard(double z) {
    if (z >= kMillsSwitch) return 1.0 / mills_continued_fraction(z);
    return pdf(z) / sf(z);
}

double log_cdf(double z) {
    if (z > 0.0) return std::log1p(-sf(z));
    if (z > -kMillsSwitch) return std::log(cdf(z));
    return log_pdf(z) + std::log(mills_continued_fraction(-z));
}

double log_sf(double z) { return log_cdf(-z); }

}  // namespace normal

namespace {

LinkEval logit_eval(double eta) {
    LinkEval e;
    e.eta = eta;
    const double t = std::abs(eta);
    const double ex = std::exp(-t);
    const double big = 1.0 / (1.0 + ex);
    const double small = ex / (1.0 + ex);
    e.pi = eta >= 0.0 ? big : small;
    e.pi_c = eta >= 0.0 ? small : big;
    e.w = ex / ((1.0 + ex) * (1.0 + ex));
    e.logw = -t - 2.0 * std::log1p(ex);
    e.dpi = e.w;
    e.dlogw = e.pi_c - e.pi;
    e.dw = e.w * e.dlogw;
    e.log_pi = -softplus(-eta);
    e.log_pi_c = -softplus(eta);
    e.score_factor = 1.0;
    return e;
}

LinkEval probit_eval(double eta) {
    LinkEval e;
    e.eta = eta;
    e.pi = normal::cdf(eta);
    e.pi_c = normal::sf(eta);
    e.dpi = normal::pdf(eta);
    e.log_pi = normal::log_cdf(eta);
    e.log_pi_c = normal::log_sf(eta);
    e.logw = 2.0 * normal::log_pdf(eta) - e.log_pi - e.log_pi_c;
    e.w = std::exp(e.logw);
    const double up = normal::hazard(eta);    // phi / (1 - Phi)
    const double down = normal::hazard(-eta); // phi / Phi
    e.dlogw = -2.0 * eta - down + up;
    e.dw = e.w * e.dlogw;
    e.score_factor = up + down;
    return e;
}

// pi = 1 - exp(-e^eta). The weight e^{2 eta} / (exp(e^eta) - 1) is the
// z-form exp(-2z) / (exp(exp(-z)) - 1) under eta = -z.
LinkEval cloglog_eval(double eta) {
    LinkEval e;
    e.eta = eta;
    const double s = std::exp(eta);
    e.pi = -std::expm1(-s);
    e.pi_c = std::exp(-s);
    e.log_pi_c = -s;
    e.log_pi = s > std::numbers::ln2 ? std::log1p(-std::exp(-s)) : std::log(e.pi);
    e.dpi = s * e.pi_c;
    e.logw = 2.0 * eta - log_expm1(s);
    e.w = std::exp(e.logw);
    e.score_factor = s / e.pi;
    e.dlogw = 2.0 - e.score_factor;
    e.dw = e.w * e.dlogw;
    return e;
}

}  // namespace

LinkEval link_eval(LinkKind link, double eta) {
    if (!std::isfinite(eta)) throw Error(ErrorCode::NonFiniteInput, "linear predictor is not finite");
    const double clamped = std::clamp(eta, -kEtaClamp, kEtaClamp);
    switch (link) {
    case LinkKind::Logit: return logit_eval(clamped);
    case LinkKind::Probit: return probit_eval(clamped);
    case LinkKind::Cloglog: return cloglog_eval(clamped);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown link");
}

}  // namespace firth
