#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace wpcn {

// Physical constants of one network: an AP powering N sources and K
// decode-and-forward relays over a shared band.
struct SystemParams {
    double bandwidth_w = 1e6;       // Hz
    double noise_psd_n0 = 1e-12;    // W/Hz
    double ap_power_pa = 4.0;       // W
    double max_ul_power = 10e-3;    // W
    std::vector<double> eh_efficiency_src;  // zeta per source, (0, 1]
    std::vector<double> eh_efficiency_rel;  // zeta per relay, (0, 1]
    std::vector<double> demands_bits;       // per source
    int num_sources = 0;
    int num_relays = 0;

    void validate() const;
};

// Linear power gains for every link of one channel realization.
struct ChannelSet {
    std::vector<double> h_ap_src;               // DL, AP -> S_i
    std::vector<double> h_ap_rel;               // DL, AP -> R_j
    std::vector<double> g_src_ap;               // UL, S_i -> AP
    std::vector<std::vector<double>> g_src_rel; // UL, S_i -> R_j
    std::vector<double> g_rel_ap;               // UL, R_j -> AP

    void validate(int n, int k) const;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct NetworkInstance {
    SystemParams params;
    ChannelSet channels;
    std::optional<std::vector<Position>> source_positions;
    std::optional<std::vector<Position>> relay_positions;

    void validate() const;
};

enum class FadingModel { None, Rayleigh };

struct ChannelModelConfig {
    double pl_d0_db = 31.67;        // path loss at 1 m, dB
    double shadowing_sigma_db = 0.0;
    double pathloss_exponent = 2.0;
    FadingModel fading = FadingModel::None;

    void validate() const;
};

// Source/relay placement inside a circular quadrant centered on the AP.
struct GeometryConfig {
    double r_min_m = 3.0;
    double r_max_m = 4.0;
    double relay_radius_m = 2.0;
    // Quadrant half-open angular span [angle_min, angle_max]; defaults to the
    // full quadrant. A degenerate span pins nodes to a single bearing.
    double angle_min_rad = 0.0;
    double angle_max_rad = 1.5707963267948966;

    void validate() const;
};

struct Topology {
    Position ap;  // always the origin
    std::vector<Position> sources;
    std::vector<Position> relays;
};

using Rng = std::mt19937_64;

// Sources uniform in the quadrant annulus; relays evenly spaced on the relay
// ring.
Topology generate_topology(const SystemParams& params, const GeometryConfig& geom, Rng& rng);

// Log-distance path loss with optional log-normal shadowing and Rayleigh
// fading. All DL and UL gains are drawn independently.
ChannelSet sample_channels(const Topology& topo, const ChannelModelConfig& cfg, Rng& rng);

// One deterministic (distance-only) gain: 10^(-(pl_d0 + 10 v log10 d)/10).
double path_gain(double distance_m, const ChannelModelConfig& cfg);

// Energy harvested over an EH slot of length tau0 at DL gain h_dl.
double harvested_energy(double zeta, double tau0_s, double pa_w, double h_dl);

// Shannon rate of an UL link, bits per second.
double link_rate(double p_tx_w, double g_ul, double w_hz, double n0_w_per_hz);

// JSON serialization (test fixtures and CLI instance files).
nlohmann::json to_json(const SystemParams& p);
nlohmann::json to_json(const ChannelSet& c);
nlohmann::json to_json(const NetworkInstance& inst);
SystemParams system_params_from_json(const nlohmann::json& j);
ChannelSet channel_set_from_json(const nlohmann::json& j);
NetworkInstance network_instance_from_json(const nlohmann::json& j);

// Structured generation config ({n, k, r_min_m, ..., fading, seed}).
struct GenerationConfig {
    int n = 5;
    int k = 2;
    GeometryConfig geometry;
    ChannelModelConfig channel;
    std::uint64_t seed = 0;
};
GenerationConfig generation_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GenerationConfig& g);

}  // namespace wpcn
