#include "wpcn/relay_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

namespace wpcn {

namespace {

// Bottleneck score of sending source i through destination j (0 = direct).
double route_score(const NetworkInstance& net, int i, int j) {
    const auto& ch = net.channels;
    if (j == 0) return ch.g_src_ap[i] * ch.h_ap_src[i];
    return std::min(ch.g_src_rel[i][j - 1] * ch.h_ap_src[i],
                    ch.g_rel_ap[j - 1] * ch.h_ap_rel[j - 1]);
}

RelayAssignment all_direct(const NetworkInstance& net) {
    return RelayAssignment(net.params.num_sources, 0);
}

// Argmax_j of a relaxed selection row, ties toward the smaller index.
int round_row(const std::vector<double>& row) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(row.size()); ++j)
        if (row[j] > row[best]) best = j;
    return best;
}

RelayAssignment mask_to_assignment(const FixedAssignments& fixed) {
    RelayAssignment a(fixed.size());
    for (std::size_t i = 0; i < fixed.size(); ++i) a[i] = fixed[i];
    return a;
}

}  // namespace

SchedulingInstance assignment_to_links(const NetworkInstance& instance,
                                       const RelayAssignment& assignment) {
    const auto& p = instance.params;
    const auto& ch = instance.channels;
    if (static_cast<int>(assignment.size()) != p.num_sources)
        throw std::invalid_argument("assignment_to_links: size mismatch");
    SchedulingInstance inst;
    inst.pmax = p.max_ul_power;
    for (int i = 0; i < p.num_sources; ++i) {
        const int j = assignment[i];
        if (j < 0 || j > p.num_relays)
            throw std::invalid_argument("assignment_to_links: relay index out of range");
        SourceLink l;
        l.h_dl = ch.h_ap_src[i];
        l.g_ul = j == 0 ? ch.g_src_ap[i] : ch.g_src_rel[i][j - 1];
        l.demand = p.demands_bits[i];
        l.zeta = p.eh_efficiency_src[i];
        l.w_hz = p.bandwidth_w;
        l.n0 = p.noise_psd_n0;
        l.pa_w = p.ap_power_pa;
        inst.links.push_back(l);
    }
    for (int j = 1; j <= p.num_relays; ++j) {
        double demand = 0.0;
        int count = 0;
        for (int i = 0; i < p.num_sources; ++i)
            if (assignment[i] == j) {
                demand += p.demands_bits[i];
                ++count;
            }
        if (count == 0) continue;
        SourceLink l;
        l.h_dl = ch.h_ap_rel[j - 1];
        l.g_ul = ch.g_rel_ap[j - 1];
        l.demand = demand;
        l.zeta = p.eh_efficiency_rel[j - 1];
        l.w_hz = p.bandwidth_w;
        l.n0 = p.noise_psd_n0;
        l.pa_w = p.ap_power_pa;
        inst.links.push_back(l);
    }
    return inst;
}

FullSchedule solve_assignment(const NetworkInstance& instance,
                              const RelayAssignment& assignment) {
    const int n = instance.params.num_sources;
    const int k = instance.params.num_relays;
    const auto links = assignment_to_links(instance, assignment);
    const Schedule s = powmu(links);
    FullSchedule out;
    out.assignment = assignment;
    out.tau0 = s.tau0;
    out.total = s.total;
    out.tau_src.assign(s.tau_it.begin(), s.tau_it.begin() + n);
    out.p_src.assign(s.p_tx.begin(), s.p_tx.begin() + n);
    out.tau_rel.assign(k, 0.0);
    out.p_rel.assign(k, 0.0);
    int slot = n;
    for (int j = 1; j <= k; ++j) {
        const bool loaded =
            std::any_of(assignment.begin(), assignment.end(), [j](int a) { return a == j; });
        if (!loaded) continue;
        out.tau_rel[j - 1] = s.tau_it[slot];
        out.p_rel[j - 1] = s.p_tx[slot];
        ++slot;
    }
    return out;
}

FullSchedule bba(const NetworkInstance& instance, BBDiagnostics* diag) {
    const int n = instance.params.num_sources;
    const int k = instance.params.num_relays;
    FullSchedule incumbent = solve_assignment(instance, all_direct(instance));
    if (k == 0) return incumbent;

    struct QNode {
        double bound;
        long seq;
        int depth;
        FixedAssignments fixed;
        bool operator>(const QNode& o) const {
            return std::tie(bound, seq) > std::tie(o.bound, o.seq);
        }
    };
    std::priority_queue<QNode, std::vector<QNode>, std::greater<QNode>> queue;
    long seq = 0;
    queue.push({0.0, seq++, 0, FixedAssignments(n, -1)});
    int nodes = 0;

    while (!queue.empty()) {
        QNode node = queue.top();
        queue.pop();
        if (node.bound >= incumbent.total * (1.0 - 1e-9)) continue;
        const auto model = build_relaxation(instance, node.fixed, incumbent.total);
        const auto sol = solve_relaxation(model);
        ++nodes;
        if (diag)
            diag->expanded.push_back(
                {node.fixed, sol.lower_bound, node.bound, incumbent.total, sol.b, node.depth});
        if (sol.status == RelaxStatus::Infeasible) continue;

        // Rounding upper bound; may improve the incumbent.
        RelayAssignment rounded(n);
        for (int i = 0; i < n; ++i)
            rounded[i] = node.fixed[i] >= 0 ? node.fixed[i] : round_row(sol.b[i]);
        FullSchedule cand = solve_assignment(instance, rounded);
        if (cand.total < incumbent.total) incumbent = cand;
        if (sol.lower_bound >= incumbent.total * (1.0 - 1e-9)) continue;

        // Branch on the free source carrying the largest selection entry.
        int branch_i = -1;
        double branch_v = -1.0;
        for (int i = 0; i < n; ++i) {
            if (node.fixed[i] >= 0) continue;
            const double v = sol.b[i][round_row(sol.b[i])];
            if (v > branch_v) {
                branch_v = v;
                branch_i = i;
            }
        }
        if (branch_i < 0) continue;  // fully fixed node
        for (int j = 0; j <= k; ++j) {
            FixedAssignments child = node.fixed;
            child[branch_i] = j;
            queue.push({sol.lower_bound, seq++, node.depth + 1, std::move(child)});
        }
    }
    incumbent.nodes_expanded = nodes;
    return incumbent;
}

FullSchedule obh(const NetworkInstance& instance) {
    const int n = instance.params.num_sources;
    const int k = instance.params.num_relays;
    if (k == 0) return solve_assignment(instance, all_direct(instance));
    const double tau_ub = solve_assignment(instance, all_direct(instance)).total;

    FixedAssignments fixed(n, -1);
    int free_rows = n;
    int solves = 0;
    bool fallback = true;
    // Each iteration's solution also yields a candidate assignment by rounding
    // the still-free rows; the branch keeps the best one as its incumbent, as
    // the full tree search would.
    FullSchedule incumbent;
    incumbent.total = std::numeric_limits<double>::infinity();
    incumbent.feasible = false;
    auto offer = [&](const RelayAssignment& assign) {
        try {
            FullSchedule cand = solve_assignment(instance, assign);
            if (cand.total < incumbent.total) {
                incumbent = cand;
                fallback = false;
            }
        } catch (const InfeasibleError&) {
        }
    };
    while (free_rows > 0) {
        const auto sol = solve_relaxation(build_relaxation(instance, fixed, tau_ub));
        ++solves;
        if (sol.status == RelaxStatus::Infeasible) break;
        RelayAssignment cand(n);
        for (int i = 0; i < n; ++i) cand[i] = fixed[i] >= 0 ? fixed[i] : round_row(sol.b[i]);
        offer(cand);
        // Pin the largest entry, lexicographic ties.
        int bi = -1, bj = 0;
        double bv = -1.0;
        for (int i = 0; i < n; ++i) {
            if (fixed[i] >= 0) continue;
            for (int j = 0; j <= k; ++j)
                if (sol.b[i][j] > bv) {
                    bv = sol.b[i][j];
                    bi = i;
                    bj = j;
                }
        }
        fixed[bi] = bj;
        --free_rows;
        // The last free row needs no further relaxation: round it here.
        if (free_rows == 1) {
            for (int i = 0; i < n; ++i)
                if (fixed[i] < 0) fixed[i] = round_row(sol.b[i]);
            free_rows = 0;
            offer(RelayAssignment(fixed.begin(), fixed.end()));
        }
    }
    if (!incumbent.feasible) {
        incumbent = solve_assignment(instance, all_direct(instance));
        fallback = true;
    }
    incumbent.relax_solves = solves;
    incumbent.fallback = fallback;
    return incumbent;
}

FullSchedule rph(const NetworkInstance& instance) {
    const int n = instance.params.num_sources;
    const int k = instance.params.num_relays;
    if (k == 0) return solve_assignment(instance, all_direct(instance));
    const double tau_ub = solve_assignment(instance, all_direct(instance)).total;
    const auto sol = solve_relaxation(build_relaxation(instance, FixedAssignments(n, -1), tau_ub));
    RelayAssignment assign(n, 0);
    bool fallback = true;
    if (sol.status != RelaxStatus::Infeasible) {
        fallback = false;
        for (int i = 0; i < n; ++i) assign[i] = round_row(sol.b[i]);
    }
    FullSchedule out = solve_assignment(instance, assign);
    out.relax_solves = 1;
    out.fallback = fallback;
    return out;
}

RelayAssignment or_criterion(const NetworkInstance& instance) {
    const int n = instance.params.num_sources;
    const int k = instance.params.num_relays;
    RelayAssignment assign(n, 0);
    for (int i = 0; i < n; ++i) {
        double best = route_score(instance, i, 0);
        for (int j = 1; j <= k; ++j) {
            const double v = route_score(instance, i, j);
            if (v > best) {
                best = v;
                assign[i] = j;
            }
        }
    }
    return assign;
}

bool relay_benefit(const NetworkInstance& instance, int i, int j) {
    if (j < 1 || j > instance.params.num_relays)
        throw std::invalid_argument("relay_benefit: relay index out of range");
    return route_score(instance, i, j) > route_score(instance, i, 0);
}

FullSchedule rstma(const NetworkInstance& instance) {
    const int n = instance.params.num_sources;
    const int k = instance.params.num_relays;
    RelayAssignment assign = or_criterion(instance);
    FullSchedule best = solve_assignment(instance, assign);

    bool improved = true;
    while (improved) {
        improved = false;
        // Group sources by destination; only multi-source groups are unloaded.
        std::vector<std::vector<int>> groups(k + 1);
        for (int i = 0; i < n; ++i) groups[assign[i]].push_back(i);
        std::vector<int> order;
        for (int j = 0; j <= k; ++j)
            if (groups[j].size() > 1) order.push_back(j);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return groups[a].size() > groups[b].size();
        });
        for (int j : order) {
            for (int i : groups[j]) {
                // Alternatives by descending bottleneck score.
                std::vector<int> alts;
                for (int w = 0; w <= k; ++w)
                    if (w != assign[i]) alts.push_back(w);
                std::stable_sort(alts.begin(), alts.end(), [&](int a, int b) {
                    return route_score(instance, i, a) > route_score(instance, i, b);
                });
                for (int w : alts) {
                    RelayAssignment trial = assign;
                    trial[i] = w;
                    FullSchedule cand = solve_assignment(instance, trial);
                    if (cand.total < best.total) {
                        assign = trial;
                        best = cand;
                        improved = true;
                        break;
                    }
                }
                if (improved) break;
            }
            if (improved) break;
        }
    }
    return best;
}

FullSchedule htc_baseline(const NetworkInstance& instance, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("htc_baseline: rho out of (0,1)");
    const auto& p = instance.params;
    const auto& ch = instance.channels;
    const int n = p.num_sources;
    const int k = p.num_relays;
    const RelayAssignment assign = or_criterion(instance);

    // Power needed to push `demand` bits through gain g in a slot of length s.
    auto req_power = [&](double demand, double g, double s) {
        if (demand <= 0.0) return 0.0;
        return (std::exp2(demand / (p.bandwidth_w * s)) - 1.0) * p.bandwidth_w * p.noise_psd_n0 /
               g;
    };
    auto feasible_at = [&](double t) {
        const double slot = (1.0 - rho) * t / (2.0 * n);
        for (int i = 0; i < n; ++i) {
            const double g = assign[i] == 0 ? ch.g_src_ap[i] : ch.g_src_rel[i][assign[i] - 1];
            const double pw = req_power(p.demands_bits[i], g, slot);
            if (pw > p.max_ul_power) return false;
            const double budget = harvested_energy(p.eh_efficiency_src[i], rho * t,
                                                   p.ap_power_pa, ch.h_ap_src[i]);
            if (pw * slot > budget) return false;
        }
        for (int j = 1; j <= k; ++j) {
            double energy = 0.0;
            bool loaded = false;
            for (int i = 0; i < n; ++i) {
                if (assign[i] != j) continue;
                loaded = true;
                const double pw = req_power(p.demands_bits[i], ch.g_rel_ap[j - 1], slot);
                if (pw > p.max_ul_power) return false;
                energy += pw * slot;
            }
            if (!loaded) continue;
            const double budget = harvested_energy(p.eh_efficiency_rel[j - 1], rho * t,
                                                   p.ap_power_pa, ch.h_ap_rel[j - 1]);
            if (energy > budget) return false;
        }
        return true;
    };

    FullSchedule out;
    out.assignment = assign;
    out.tau_src.assign(n, 0.0);
    out.p_src.assign(n, 0.0);
    out.tau_rel.assign(k, 0.0);
    out.p_rel.assign(k, 0.0);

    double hi = 1e-6;
    int guard = 0;
    while (!feasible_at(hi) && ++guard < 80) hi *= 2.0;
    if (guard >= 80) {
        out.feasible = false;
        out.total = std::numeric_limits<double>::infinity();
        return out;
    }
    double lo = hi * 0.5;
    if (hi <= 1e-6) lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible_at(mid) ? hi : lo) = mid;
    }
    const double t = hi;
    const double slot = (1.0 - rho) * t / (2.0 * n);
    out.total = t;
    out.tau0 = rho * t;
    for (int i = 0; i < n; ++i) {
        out.tau_src[i] = slot;
        const double g = assign[i] == 0 ? ch.g_src_ap[i] : ch.g_src_rel[i][assign[i] - 1];
        out.p_src[i] = req_power(p.demands_bits[i], g, slot);
    }
    for (int j = 1; j <= k; ++j) {
        for (int i = 0; i < n; ++i) {
            if (assign[i] != j) continue;
            out.tau_rel[j - 1] += slot;
            out.p_rel[j - 1] = std::max(out.p_rel[j - 1],
                                        req_power(p.demands_bits[i], ch.g_rel_ap[j - 1], slot));
        }
    }
    return out;
}

nlohmann::json to_json(const FullSchedule& s) {
    return nlohmann::json{{"assignment", s.assignment}, {"tau0_s", s.tau0},
                          {"tau_src_s", s.tau_src},     {"p_src_w", s.p_src},
                          {"tau_rel_s", s.tau_rel},     {"p_rel_w", s.p_rel},
                          {"total_s", s.total},         {"feasible", s.feasible},
                          {"fallback", s.fallback}};
}

FullSchedule full_schedule_from_json(const nlohmann::json& j) {
    FullSchedule s;
    s.assignment = j.at("assignment").get<RelayAssignment>();
    s.tau0 = j.at("tau0_s").get<double>();
    s.tau_src = j.at("tau_src_s").get<std::vector<double>>();
    s.p_src = j.at("p_src_w").get<std::vector<double>>();
    s.tau_rel = j.at("tau_rel_s").get<std::vector<double>>();
    s.p_rel = j.at("p_rel_w").get<std::vector<double>>();
    s.total = j.at("total_s").get<double>();
    s.feasible = j.at("feasible").get<bool>();
    s.fallback = j.at("fallback").get<bool>();
    return s;
}

}  // namespace wpcn
