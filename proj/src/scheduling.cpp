#include "wpcn/scheduling.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "wpcn/numerics.hpp"

namespace wpcn {

namespace {

// Root of V(tau) = tau0 on [lb, inf). V is convex and strictly decreasing, so
// Newton from the left endpoint increases monotonically and stays bracketed.
double solve_v_equals(double tau0, const SourceLink& link, double lb) {
    const double tol = 1e-13 * std::max(tau0, 1e-12);
    double tau = lb;
    for (int it = 0; it < 100; ++it) {
        const double f = v_curve(tau, link) - tau0;
        if (std::fabs(f) <= tol) return tau;
        const double fp = v_curve_derivative(tau, link);
        const double next = tau - f / fp;
        if (!std::isfinite(next) || next <= tau) return tau;
        tau = next;
    }
    return tau;
}

}  // namespace

double subproblem_it_time(double tau0_fixed, const SourceLink& link, double pmax) {
    if (link.demand == 0.0) return 0.0;

    const LinkSolution capped = power_limited_solution(link, pmax);
    if (tau0_fixed >= capped.tau0) return capped.tau_it;

    const double floor = v_curve_infimum(link);
    if (tau0_fixed <= floor * (1.0 + 1e-12))
        throw InfeasibleError("subproblem_it_time: EH slot below the feasible minimum");

    return solve_v_equals(tau0_fixed, link, capped.tau_it);
}

double g_value(double tau0, const SchedulingInstance& instance) {
    double total = tau0;
    for (const auto& link : instance.links)
        total += subproblem_it_time(tau0, link, instance.pmax);
    return total;
}

double g_derivative(double tau0, const SchedulingInstance& instance) {
    double d = 1.0;
    for (const auto& link : instance.links) {
        if (link.demand == 0.0) continue;
        const LinkSolution capped = power_limited_solution(link, instance.pmax);
        if (tau0 >= capped.tau0) continue;  // IT time constant past the cap
        const double tau = solve_v_equals(tau0, link, capped.tau_it);
        d += 1.0 / v_curve_derivative(tau, link);
    }
    return d;
}

namespace {

Schedule assemble(double tau0, const SchedulingInstance& instance, int iterations) {
    Schedule s;
    s.tau0 = tau0;
    s.bisect_iterations = iterations;
    s.total = tau0;
    s.tau_it.reserve(instance.links.size());
    s.p_tx.reserve(instance.links.size());
    for (const auto& link : instance.links) {
        if (link.demand == 0.0) {
            s.tau_it.push_back(0.0);
            s.p_tx.push_back(0.0);
            continue;
        }
        const double tau = subproblem_it_time(tau0, link, instance.pmax);
        const double p =
            std::min(instance.pmax, link.zeta * link.pa_w * link.h_dl * tau0 / tau);
        s.tau_it.push_back(tau);
        s.p_tx.push_back(p);
        s.total += tau;
    }
    return s;
}

}  // namespace

Schedule powmu(const SchedulingInstance& instance) {
    if (instance.links.empty())
        throw std::invalid_argument("powmu: empty instance");

    double lb = 0.0;
    double ub = 0.0;
    int active = 0;
    for (const auto& link : instance.links) {
        if (link.demand == 0.0) continue;
        ++active;
        const LinkSolution best = optimal_single(link, instance.pmax);
        const LinkSolution capped = power_limited_solution(link, instance.pmax);
        lb = std::max(lb, best.tau0);
        ub = std::max(ub, capped.tau0);
    }
    if (ub == 0.0) return assemble(0.0, instance, 0);  // all demands zero
    if (active == 1) return assemble(lb, instance, 0); // single link: lb is optimal

    int iterations = 0;
    double tau0 = lb;
    // g'(lb) can only be ~0 through cancellation noise when lb is already the
    // optimum; a small one-sided threshold keeps the degenerate case exact.
    if (ub - lb > 2.0 * kTimeEps && g_derivative(lb, instance) < -1e-7) {
        while (ub - lb > 2.0 * kTimeEps) {
            ++iterations;
            const double mid = 0.5 * (lb + ub);
            if (g_derivative(mid, instance) >= 0.0) {
                ub = mid;
            } else {
                lb = mid;
            }
        }
        tau0 = 0.5 * (lb + ub);
    }
    return assemble(tau0, instance, iterations);
}

Schedule max_eh(const SchedulingInstance& instance) {
    if (instance.links.empty())
        throw std::invalid_argument("max_eh: empty instance");

    double tau0 = 0.0;
    for (const auto& link : instance.links) {
        if (link.demand == 0.0) continue;
        tau0 = std::max(tau0, optimal_single(link, instance.pmax).tau0);
    }
    return assemble(tau0, instance, 0);
}

nlohmann::json to_json(const Schedule& s) {
    return {{"tau0_s", s.tau0}, {"tau_it_s", s.tau_it}, {"p_tx_w", s.p_tx}, {"total_s", s.total}};
}

Schedule schedule_from_json(const nlohmann::json& j) {
    Schedule s;
    s.tau0 = j.at("tau0_s").get<double>();
    s.tau_it = j.at("tau_it_s").get<std::vector<double>>();
    s.p_tx = j.at("p_tx_w").get<std::vector<double>>();
    s.total = j.at("total_s").get<double>();
    return s;
}

}  // namespace wpcn
