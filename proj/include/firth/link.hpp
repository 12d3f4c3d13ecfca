#pragma once

#include <string_view>

namespace firth {

enum class LinkKind { Logit, Probit, Cloglog };

std::string_view to_string(LinkKind link);
/// Parses "logit", "probit" or "cloglog"; throws Error(InvalidArgument) otherwise.
LinkKind parse_link(std::string_view name);

inline constexpr LinkKind kAllLinks[] = {LinkKind::Logit, LinkKind::Probit, LinkKind::Cloglog};

/// |eta| is clamped to this before any exponential is taken.
inline constexpr double kEtaClamp = 700.0;

/// Per-observation link quantities at a linear predictor eta.
///
/// w is the Fisher working weight (dpi)^2 / (pi (1 - pi)). The log-space
/// members are evaluated directly and stay finite for every clamped eta even
/// where w itself underflows to zero (probit beyond |eta| ~ 38, cloglog beyond
/// eta ~ 6.6).
struct LinkEval {
    double eta = 0.0;
    double pi = 0.5;
    double pi_c = 0.5;        // 1 - pi, evaluated without cancellation
    double dpi = 0.0;         // d pi / d eta
    double w = 0.0;
    double dw = 0.0;          // d w / d eta
    double logw = 0.0;
    double dlogw = 0.0;       // w' / w
    double log_pi = 0.0;
    double log_pi_c = 0.0;
    double score_factor = 1.0;  // dpi / (pi (1 - pi)), 1 for logit
};

LinkEval link_eval(LinkKind link, double eta);

namespace normal {

double pdf(double z);
double log_pdf(double z);
/// Phi(z), through erfc so that the lower tail keeps relative accuracy.
double cdf(double z);
/// 1 - Phi(z) without cancellation.
double sf(double z);
double log_cdf(double z);
double log_sf(double z);
/// Mills ratio (1 - Phi(z)) / phi(z).
double mills_ratio(double z);
/// phi(z) / (1 - Phi(z)).
double hazard(double z);

}  // namespace normal

/// log(1 + e^x) without overflow.
double softplus(double x);
/// log(e^x - 1) for x > 0.
double log_expm1(double x);

}  // namespace firth
