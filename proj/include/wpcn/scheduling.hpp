#pragma once

#include <stdexcept>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wpcn/single_source.hpp"

namespace wpcn {

class InfeasibleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Joint scheduling and power control input: a shared EH slot feeding a set of
// independent UL links (actual sources and loaded relays alike).
struct SchedulingInstance {
    std::vector<SourceLink> links;
    double pmax = 10e-3;  // W
};

struct Schedule {
    double tau0 = 0.0;            // s
    std::vector<double> tau_it;   // s, per link
    std::vector<double> p_tx;     // W, per link
    double total = 0.0;           // s
    int bisect_iterations = 0;    // diagnostic
};

// Time-domain tolerance of the EH-slot bisection.
inline constexpr double kTimeEps = 1e-9;

// Optimal IT duration of one link for a frozen EH slot: the power-capped time
// when the slot already funds pmax transmission, otherwise the unique root of
// tau0 = V(tau). Throws InfeasibleError when no finite IT time can meet the
// demand at this tau0.
double subproblem_it_time(double tau0_fixed, const SourceLink& link, double pmax);

// Total schedule length for a frozen EH slot: tau0 + sum of per-link IT times.
// Convex in tau0.
double g_value(double tau0, const SchedulingInstance& instance);

// One-sided derivative of g_value; links already at their power cap contribute
// a constant IT time and drop out.
double g_derivative(double tau0, const SchedulingInstance& instance);

// Optimal scheduler: bisection on the sign of dg/dtau0 between the max of the
// individual optimal EH times (lower bound) and the max of the power-capped EH
// times (upper bound).
Schedule powmu(const SchedulingInstance& instance);

// Fast scheduler: pins the EH slot to the largest individually optimal EH time
// and solves each link's IT duration once.
Schedule max_eh(const SchedulingInstance& instance);

nlohmann::json to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace wpcn
