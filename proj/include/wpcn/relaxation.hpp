#pragma once

#include <string>
#include <vector>

#include "wpcn/net_model.hpp"

namespace wpcn {

// Per-source relay fixing: -1 = free, otherwise a relay index in {0..K}
// with 0 meaning direct to the AP.
using FixedAssignments = std::vector<int>;

// Continuous relaxation of the joint relay-selection problem: selection
// variables relaxed to [0,1], power-time products replaced by energy
// variables, and the remaining bilinear selection*time products replaced by
// McCormick envelopes bounded by tau_ub.
struct RelaxedModel {
    SystemParams params;
    ChannelSet channels;
    FixedAssignments fixed;  // size N, entries in {-1, 0..K}
    double tau_ub = 0.0;     // shared upper bound on every time variable, s

    // Variable layout into the solver vector; -1 marks an absent variable.
    int n_vars = 0;
    int idx_tau0 = -1;
    std::vector<std::vector<int>> idx_b;       // N x (K+1), free rows only
    std::vector<std::vector<int>> idx_tau_sr;  // N x (K+1)
    std::vector<std::vector<int>> idx_a_sr;    // N x (K+1)
    std::vector<std::vector<int>> idx_w_sr;    // N x (K+1), free rows only
    std::vector<int> idx_tau_r;                // K
    std::vector<int> idx_a_r;                  // K
    std::vector<int> idx_w_r;                  // K, only when load can vanish
    std::vector<char> relay_active;            // K
    std::vector<double> relay_fixed_demand;    // bits routed by fixed rows
    std::vector<int> relay_fixed_count;        // fixed rows assigned per relay
    int num_free_rows = 0;
    // Set when bound tightening proves no completion fits inside tau_ub (a
    // pinned link already needs a slot longer than tau_ub).
    bool trivially_infeasible = false;
};

enum class RelaxStatus { Optimal, Infeasible, MaxIter };

struct RelaxedSolution {
    RelaxStatus status = RelaxStatus::Infeasible;
    double objective = 0.0;     // s
    double lower_bound = 0.0;   // s; valid for every integral completion
    double kkt_residual = 0.0;  // scaled stationarity residual (inf norm)
    double tau0 = 0.0;
    std::vector<std::vector<double>> b;       // N x (K+1)
    std::vector<std::vector<double>> tau_sr;  // N x (K+1), s
    std::vector<std::vector<double>> a_sr;    // N x (K+1), J
    std::vector<double> tau_r;                // K, s
    std::vector<double> a_r;                  // K, J
};

// Bits delivered by a slot of length tau_s spending energy a_j: the
// perspective of the rate function, closed with value 0 at tau = 0.
double perspective_rate(double tau_s, double a_j, double g_ul, double w_hz, double n0);

RelaxedModel build_relaxation(const NetworkInstance& instance, const FixedAssignments& fixed,
                              double tau_ub);

RelaxedSolution solve_relaxation(const RelaxedModel& model, double tol = 1e-6);

// Human-readable listing of the model (debugging aid).
std::string dump_model(const RelaxedModel& model);

}  // namespace wpcn
