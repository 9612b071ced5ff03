#pragma once

namespace wpcn {

// One virtual source scheduled against its destination: either an actual
// source (destination = relay or AP) or a loaded relay (destination = AP).
struct SourceLink {
    double h_dl = 0.0;    // linear DL gain, AP -> node
    double g_ul = 0.0;    // linear UL gain, node -> destination
    double demand = 0.0;  // bits
    double zeta = 0.5;
    double w_hz = 1e6;
    double n0 = 1e-12;    // W/Hz
    double pa_w = 4.0;

    // SNR factor gamma = g * zeta * P_A * h / (W N0).
    double gamma() const;
};

enum class PowerRegime { Unconstrained, PmaxBound };

struct LinkSolution {
    double tau0 = 0.0;    // s
    double tau_it = 0.0;  // s
    double p_tx = 0.0;    // W
    PowerRegime regime = PowerRegime::Unconstrained;

    double total() const { return tau0 + tau_it; }
};

// Minimum EH time funding an IT slot of length tau_it:
// V(tau) = (tau/gamma) * (2^(D/(W tau)) - 1). Strictly decreasing in tau,
// with limit D ln2 / (W gamma) as tau -> inf.
double v_curve(double tau_it, const SourceLink& link);

// dV/dtau; always negative for D > 0.
double v_curve_derivative(double tau_it, const SourceLink& link);

// Asymptote of V as tau_it grows; EH times at or below it cannot fund the
// demand in finite IT time.
double v_curve_infimum(const SourceLink& link);

// Joint (tau0, tau_it) minimizer ignoring the transmit power cap; the tangency
// point of the total-time level line with the V curve.
LinkSolution unconstrained_solution(const SourceLink& link);

// Solution with energy, demand and power cap all tight (transmit at pmax).
LinkSolution power_limited_solution(const SourceLink& link, double pmax);

// Optimal single-link schedule under the cap: the unconstrained point when its
// implied power fits below pmax, the power-limited point otherwise.
LinkSolution optimal_single(const SourceLink& link, double pmax);

}  // namespace wpcn
