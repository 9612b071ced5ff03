#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wpcn/net_model.hpp"
#include "wpcn/relaxation.hpp"
#include "wpcn/scheduling.hpp"

namespace wpcn {

// Per-source relay choice: 0 = direct to the AP, 1..K = relay index.
using RelayAssignment = std::vector<int>;

// Complete solution of the joint selection/scheduling problem.
struct FullSchedule {
    RelayAssignment assignment;
    double tau0 = 0.0;            // s
    std::vector<double> tau_src;  // s, per source
    std::vector<double> p_src;    // W, per source
    std::vector<double> tau_rel;  // s, per relay (0 when idle)
    std::vector<double> p_rel;    // W, per relay
    double total = 0.0;           // s
    bool feasible = true;
    bool fallback = false;   // a heuristic fell back to direct links
    int relax_solves = 0;    // diagnostic: relaxations solved
    int nodes_expanded = 0;  // diagnostic: branch-and-bound nodes processed
};

// One processed branch-and-bound node, kept for diagnostics/validation.
struct BBNode {
    FixedAssignments fixed;  // -1 = free
    double lower_bound = 0.0;
    double parent_bound = 0.0;
    // Incumbent total when the node was processed; its relaxation only bounds
    // completions at least this good.
    double tau_ub = 0.0;
    std::vector<std::vector<double>> b;  // relaxed selection values
    int depth = 0;
};

struct BBDiagnostics {
    std::vector<BBNode> expanded;
};

// Scheduling instance induced by an assignment: one link per source plus one
// aggregated link per relay serving at least one source (sources first, then
// loaded relays by ascending index).
SchedulingInstance assignment_to_links(const NetworkInstance& instance,
                                       const RelayAssignment& assignment);

// Optimal schedule for a frozen assignment (powmu on assignment_to_links).
FullSchedule solve_assignment(const NetworkInstance& instance, const RelayAssignment& assignment);

// Exact branch-and-bound over all assignments, best-first by lower bound.
FullSchedule bba(const NetworkInstance& instance, BBDiagnostics* diag = nullptr);

// One-branch heuristic: repeatedly solve the relaxation and pin the largest
// fractional selection entry.
FullSchedule obh(const NetworkInstance& instance);

// Rounding heuristic: a single root relaxation, rounded per source.
FullSchedule rph(const NetworkInstance& instance);

// Per-source criterion: argmax over destinations of the bottleneck gain
// product, the direct candidate scored by its own product. Ties toward the
// smaller index.
RelayAssignment or_criterion(const NetworkInstance& instance);

// True when routing source i (0-based) through relay j (1-based) can beat the
// direct link: min(g_sr * h_s, g_r * h_r) > g_s * h_s.
bool relay_benefit(const NetworkInstance& instance, int i, int j);

// Improvement heuristic: start from or_criterion, then keep reassigning
// sources out of multi-source groups while the schedule shortens.
FullSchedule rstma(const NetworkInstance& instance);

// Fixed-template baseline: rho*T harvesting, equal sub-slots of
// (1-rho)*T/(2N) per source transmission and per relay forwarding; T is the
// smallest block length meeting every demand under the power cap.
FullSchedule htc_baseline(const NetworkInstance& instance, double rho = 0.8);

nlohmann::json to_json(const FullSchedule& s);
FullSchedule full_schedule_from_json(const nlohmann::json& j);

}  // namespace wpcn
