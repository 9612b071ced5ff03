#include "wpcn/single_source.hpp"

#include <cmath>
#include <limits>

#include "wpcn/numerics.hpp"

namespace wpcn {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

double SourceLink::gamma() const {
    return g_ul * zeta * pa_w * h_dl / (w_hz * n0);
}

double v_curve(double tau_it, const SourceLink& link) {
    if (link.demand == 0.0) return 0.0;
    if (tau_it <= 0.0) return std::numeric_limits<double>::infinity();
    return tau_it / link.gamma() * std::expm1(link.demand / (link.w_hz * tau_it) * kLn2);
}

double v_curve_derivative(double tau_it, const SourceLink& link) {
    const double x = link.demand / (link.w_hz * tau_it);  // D / (W tau)
    const double p = std::exp2(x);
    return (p - p * x * kLn2 - 1.0) / link.gamma();
}

double v_curve_infimum(const SourceLink& link) {
    return link.demand * kLn2 / (link.w_hz * link.gamma());
}

LinkSolution unconstrained_solution(const SourceLink& link) {
    LinkSolution sol;
    sol.regime = PowerRegime::Unconstrained;
    if (link.demand == 0.0) return sol;

    const double gamma = link.gamma();
    const double alpha = lambert_w0((gamma - 1.0) / std::exp(1.0)) + 1.0;
    sol.tau_it = link.demand * kLn2 / (link.w_hz * alpha);
    sol.tau0 = link.demand * kLn2 / (link.w_hz * alpha * gamma) * std::expm1(alpha);
    // Energy constraint tight: p = E / tau_it.
    sol.p_tx = link.zeta * link.pa_w * link.h_dl * sol.tau0 / sol.tau_it;
    return sol;
}

LinkSolution power_limited_solution(const SourceLink& link, double pmax) {
    LinkSolution sol;
    sol.regime = PowerRegime::PmaxBound;
    sol.p_tx = pmax;
    if (link.demand == 0.0) {
        sol.p_tx = 0.0;
        return sol;
    }
    const double rate =
        link.w_hz * std::log2(1.0 + pmax * link.g_ul / (link.w_hz * link.n0));
    sol.tau_it = link.demand / rate;
    sol.tau0 = pmax * sol.tau_it / (link.zeta * link.pa_w * link.h_dl);
    return sol;
}

LinkSolution optimal_single(const SourceLink& link, double pmax) {
    LinkSolution dot = unconstrained_solution(link);
    // Slack factor avoids regime flapping at the boundary.
    if (dot.p_tx <= pmax * (1.0 + 1e-9)) return dot;
    return power_limited_solution(link, pmax);
}

}  // namespace wpcn
