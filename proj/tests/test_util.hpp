#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "wpcn/net_model.hpp"
#include "wpcn/single_source.hpp"
#include "wpcn/scheduling.hpp"

namespace wpcn::test {

inline SystemParams default_params(int n, int k) {
    SystemParams p;
    p.bandwidth_w = 1e6;
    p.noise_psd_n0 = 1e-12;  // -90 dBm/Hz
    p.ap_power_pa = 4.0;
    p.max_ul_power = 10e-3;
    p.num_sources = n;
    p.num_relays = k;
    p.eh_efficiency_src.assign(n, 0.5);
    p.eh_efficiency_rel.assign(k, 0.5);
    p.demands_bits.assign(n, 50.0);
    return p;
}

// Random link with gains around the paper's desk-scale topology (2-4 m paths).
inline SourceLink random_link(Rng& rng) {
    ChannelModelConfig cfg;
    std::uniform_real_distribution<double> dist(1.5, 4.5);
    std::exponential_distribution<double> fade(1.0);
    SourceLink link;
    link.h_dl = path_gain(dist(rng), cfg) * fade(rng);
    link.g_ul = path_gain(dist(rng), cfg) * fade(rng);
    link.demand = 50.0;
    link.zeta = 0.5;
    link.w_hz = 1e6;
    link.n0 = 1e-12;
    link.pa_w = 4.0;
    return link;
}

inline SchedulingInstance random_instance(int n, Rng& rng, double pmax = 10e-3) {
    SchedulingInstance inst;
    inst.pmax = pmax;
    for (int i = 0; i < n; ++i) inst.links.push_back(random_link(rng));
    return inst;
}

inline NetworkInstance random_network(int n, int k, Rng& rng) {
    NetworkInstance inst;
    inst.params = default_params(n, k);
    GeometryConfig geom;
    Topology topo = generate_topology(inst.params, geom, rng);
    ChannelModelConfig cfg;
    cfg.shadowing_sigma_db = std::sqrt(2.0);
    cfg.fading = FadingModel::Rayleigh;
    inst.channels = sample_channels(topo, cfg, rng);
    return inst;
}

// Independent single-link oracle: exhaustive 2-D grid over (tau0, tau_it)
// feasibility of the one-source schedule, refined around the best cell.
inline double single_link_grid_oracle(const SourceLink& link, double pmax,
                                      int grid = 1000, int passes = 4) {
    const double kappa = link.g_ul / (link.w_hz * link.n0);
    const double denom = link.zeta * link.pa_w * link.h_dl;

    // The power-capped corner is feasible, so its total bounds both optimal
    // coordinates from above.
    const double rate_max = link.w_hz * std::log2(1.0 + pmax * kappa);
    const double tau_it_corner = link.demand / rate_max;
    const double total_ref = tau_it_corner + pmax * tau_it_corner / denom;

    double lo_it = total_ref / (4.0 * grid), hi_it = total_ref;
    double lo_0 = 0.0, hi_0 = total_ref;
    double best = std::numeric_limits<double>::infinity();
    double best_it = 0.0, best_0 = 0.0;

    for (int pass = 0; pass < passes; ++pass) {
        best = std::numeric_limits<double>::infinity();
        const double dit = (hi_it - lo_it) / grid;
        const double d0 = (hi_0 - lo_0) / grid;
        for (int a = 0; a <= grid; ++a) {
            const double tau_it = lo_it + a * dit;
            if (tau_it <= 0.0) continue;
            const double p_req =
                (std::exp2(link.demand / (link.w_hz * tau_it)) - 1.0) / kappa;
            if (p_req > pmax) continue;
            // Smallest grid tau0 whose harvested energy covers p_req * tau_it.
            const double tau0_need = p_req * tau_it / denom;
            if (tau0_need > hi_0) continue;
            const double steps = d0 > 0.0 ? std::ceil((tau0_need - lo_0) / d0) : 0.0;
            const double tau0 = lo_0 + std::max(0.0, steps) * d0;
            if (tau0 + tau_it < best) {
                best = tau0 + tau_it;
                best_it = tau_it;
                best_0 = tau0;
            }
        }
        // The tau0 snap-up noise flattens the argmin over tens of cells, so
        // the refinement window must stay wide enough not to lose it.
        const double wit = (hi_it - lo_it) / grid * 40.0;
        const double w0 = (hi_0 - lo_0) / grid * 40.0;
        lo_it = std::max(best_it - wit, 1e-12);
        hi_it = best_it + wit;
        lo_0 = std::max(best_0 - w0, 0.0);
        hi_0 = best_0 + w0;
    }
    return best;
}

// Brute-force oracle for the multi-link scheduler: dense scan over tau0. The
// per-link IT time at each grid point is found by a local Newton solve on the
// V curve, warm-started along the (descending) grid.
inline double powmu_grid_oracle(const SchedulingInstance& inst, int grid = 100000) {
    struct LinkState {
        const SourceLink* link;
        double cap_tau0, cap_tau_it, v_inf, warm;
    };
    std::vector<LinkState> states;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& link : inst.links) {
        if (link.demand == 0.0) continue;
        const LinkSolution capped = power_limited_solution(link, inst.pmax);
        states.push_back({&link, capped.tau0, capped.tau_it, v_curve_infimum(link),
                          capped.tau_it});
        lo = std::min(lo, v_curve_infimum(link) * (1.0 + 1e-9));
        hi = std::max(hi, capped.tau0);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int a = grid; a >= 1; --a) {
        const double tau0 = lo + (hi - lo) * a / grid;
        double total = tau0;
        bool feasible = true;
        for (auto& st : states) {
            if (tau0 >= st.cap_tau0) {
                total += st.cap_tau_it;
                continue;
            }
            if (tau0 <= st.v_inf * (1.0 + 1e-12)) {
                feasible = false;
                break;
            }
            double tau = std::max(st.warm, st.cap_tau_it);
            for (int it = 0; it < 100; ++it) {
                const double f = v_curve(tau, *st.link) - tau0;
                if (std::fabs(f) <= 1e-13 * std::max(tau0, 1e-12)) break;
                const double next = tau - f / v_curve_derivative(tau, *st.link);
                if (!std::isfinite(next) || next <= tau) break;
                tau = next;
            }
            st.warm = tau;
            total += tau;
        }
        if (feasible) best = std::min(best, total);
    }
    return best;
}

}  // namespace wpcn::test
