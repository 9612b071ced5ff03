#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wpcn/net_model.hpp"

namespace wpcn {

// Monte-Carlo study families supported by the runner.
enum class ExperimentKind {
    SweepN,        // grid = source counts
    SweepK,        // grid = relay counts
    SweepPmax,     // grid = UL power caps, W
    SweepRelayPos, // grid = relay ring radii, m
    OptGapMaxEh,   // grid = source counts; fast scheduler vs optimal, K = 0
    Runtime,       // grid = source counts; heuristic wall-time comparison
};

enum class Algorithm { Bba, Obh, Rph, Rstma, OrPowmu, Htc, Powmu, MaxEh };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);
const char* experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SweepN;
    int trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;

    // Base network shape; n or k is overridden by the sweep value where the
    // experiment kind calls for it.
    int n = 5;
    int k = 2;
    GeometryConfig geometry;
    // Default: log-normal shadowing with 2 dB^2 variance plus Rayleigh fading.
    ChannelModelConfig channel{31.67, 1.4142135623730951, 2.0, FadingModel::Rayleigh};

    // Per-node scalars replicated across sources/relays.
    double pmax_w = 10e-3;
    double demand_bits = 50.0;
    double zeta = 0.5;
    double ap_power_w = 4.0;
    double bandwidth_hz = 1e6;
    double noise_psd = 1e-12;

    std::vector<double> grid;
    // Empty selects the kind's default set; the exact solver is then skipped
    // for networks with more than 5 sources.
    std::vector<Algorithm> algorithms;

    void validate() const;
};

struct TrialRecord {
    double sweep_value = 0.0;
    int trial = 0;
    Algorithm algorithm = Algorithm::Obh;
    double total_s = 0.0;
    double wall_time_s = 0.0;
    bool feasible = false;
};

struct SummaryRow {
    double sweep_value = 0.0;
    Algorithm algorithm = Algorithm::Obh;
    double mean_total_s = 0.0;
    double ci95_half_width_s = 0.0;  // normal-approximation 95% interval
    double mean_wall_time_s = 0.0;
    int feasible_count = 0;
    int trial_count = 0;
};

struct ExperimentResult {
    std::string sweep_param;  // CSV label of the swept quantity
    std::vector<TrialRecord> records;  // sweep-major, then trial, then algorithm
    std::vector<SummaryRow> summary;
};

// Runs every (sweep value, trial) pair, sharing one sampled network across all
// algorithms of a trial. Per-trial RNG streams depend only on (seed, sweep
// index, trial index), so results are reproducible at any thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV with header sweep_param,sweep_value,trial,algorithm,total_s,wall_time_s,feasible.
std::string to_csv(const ExperimentResult& r);
// Human-readable per-(sweep value, algorithm) mean and 95% CI table.
std::string summary_table(const ExperimentResult& r);

// Deterministic single-source/single-relay layout: AP at the origin, source on
// the x-axis, relay swept along a horizontal line. Distance-only channels.
struct ThreeNodeConfig {
    double x_min_m = -2.0;
    double x_max_m = 5.0;
    double step_m = 0.01;
    double relay_y_m = 2.0;
    double source_x_m = 4.0;
    double pmax_w = 10.0;
    double demand_bits = 50.0;
    double zeta = 0.5;
    double ap_power_w = 4.0;
    double bandwidth_hz = 1e6;
    double noise_psd = 1e-12;
    ChannelModelConfig channel;

    void validate() const;
};

struct ThreeNodePoint {
    double relay_x_m = 0.0;
    double direct_total_s = 0.0;
    double relayed_total_s = 0.0;  // +inf when the relayed route is infeasible
    bool benefit_predicted = false;
};

struct ThreeNodeResult {
    std::vector<ThreeNodePoint> points;
    // x-coordinates where the relayed and direct totals cross, refined by
    // bisection between adjacent grid points.
    std::vector<double> crossovers_m;
};

ThreeNodeResult three_node_sweep(const ThreeNodeConfig& cfg);

// CSV with header relay_x_m,direct_total_s,relayed_total_s,benefit_predicted.
std::string to_csv(const ThreeNodeResult& r);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ThreeNodeConfig three_node_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ThreeNodeConfig& cfg);

}  // namespace wpcn
