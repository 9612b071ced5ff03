#include "wpcn/net_model.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace wpcn {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

void SystemParams::validate() const {
    require(bandwidth_w > 0, "bandwidth must be positive");
    require(noise_psd_n0 > 0, "noise PSD must be positive");
    require(ap_power_pa > 0, "AP power must be positive");
    require(max_ul_power > 0, "max UL power must be positive");
    require(num_sources >= 1, "need at least one source");
    require(num_relays >= 0, "relay count must be non-negative");
    require(static_cast<int>(eh_efficiency_src.size()) == num_sources,
            "eh_efficiency_src size mismatch");
    require(static_cast<int>(eh_efficiency_rel.size()) == num_relays,
            "eh_efficiency_rel size mismatch");
    require(static_cast<int>(demands_bits.size()) == num_sources, "demands size mismatch");
    for (double z : eh_efficiency_src) require(z > 0 && z <= 1, "source zeta outside (0, 1]");
    for (double z : eh_efficiency_rel) require(z > 0 && z <= 1, "relay zeta outside (0, 1]");
    for (double d : demands_bits) require(d >= 0, "demand must be non-negative");
}

void ChannelSet::validate(int n, int k) const {
    require(static_cast<int>(h_ap_src.size()) == n, "h_ap_src size mismatch");
    require(static_cast<int>(h_ap_rel.size()) == k, "h_ap_rel size mismatch");
    require(static_cast<int>(g_src_ap.size()) == n, "g_src_ap size mismatch");
    require(static_cast<int>(g_src_rel.size()) == n, "g_src_rel size mismatch");
    require(static_cast<int>(g_rel_ap.size()) == k, "g_rel_ap size mismatch");
    for (const auto& row : g_src_rel)
        require(static_cast<int>(row.size()) == k, "g_src_rel row size mismatch");
    auto positive = [](double g) { return g > 0; };
    for (double g : h_ap_src) require(positive(g), "gain must be positive");
    for (double g : h_ap_rel) require(positive(g), "gain must be positive");
    for (double g : g_src_ap) require(positive(g), "gain must be positive");
    for (double g : g_rel_ap) require(positive(g), "gain must be positive");
    for (const auto& row : g_src_rel)
        for (double g : row) require(positive(g), "gain must be positive");
}

void NetworkInstance::validate() const {
    params.validate();
    channels.validate(params.num_sources, params.num_relays);
}

void ChannelModelConfig::validate() const {
    require(pathloss_exponent >= 0, "pathloss exponent must be non-negative");
    require(shadowing_sigma_db >= 0, "shadowing sigma must be non-negative");
}

void GeometryConfig::validate() const {
    require(r_min_m > 0 && r_min_m < r_max_m, "need 0 < r_min < r_max");
    require(relay_radius_m > 0, "relay ring radius must be positive");
    require(angle_min_rad <= angle_max_rad, "angle span inverted");
}

Topology generate_topology(const SystemParams& params, const GeometryConfig& geom, Rng& rng) {
    params.validate();
    geom.validate();

    Topology topo;
    topo.ap = {0.0, 0.0};

    std::uniform_real_distribution<double> angle(geom.angle_min_rad, geom.angle_max_rad);
    // Uniform over the annulus area: r = sqrt(U*(rmax^2 - rmin^2) + rmin^2).
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r2min = geom.r_min_m * geom.r_min_m;
    const double r2max = geom.r_max_m * geom.r_max_m;
    topo.sources.reserve(params.num_sources);
    for (int i = 0; i < params.num_sources; ++i) {
        const double r = std::sqrt(unit(rng) * (r2max - r2min) + r2min);
        const double a = (geom.angle_min_rad == geom.angle_max_rad) ? geom.angle_min_rad
                                                                    : angle(rng);
        topo.sources.push_back({r * std::cos(a), r * std::sin(a)});
    }

    // Relays deterministic on the ring, evenly spaced across the span.
    topo.relays.reserve(params.num_relays);
    const int k = params.num_relays;
    for (int j = 0; j < k; ++j) {
        const double span = geom.angle_max_rad - geom.angle_min_rad;
        const double a = (k == 1) ? geom.angle_min_rad + 0.5 * span
                                  : geom.angle_min_rad + span * (j + 0.5) / k;
        topo.relays.push_back({geom.relay_radius_m * std::cos(a), geom.relay_radius_m * std::sin(a)});
    }
    return topo;
}

double path_gain(double distance_m, const ChannelModelConfig& cfg) {
    if (distance_m <= 0.0)
        throw std::invalid_argument("path_gain: co-located nodes (d <= 0)");
    const double gain_db =
        -(cfg.pl_d0_db + 10.0 * cfg.pathloss_exponent * std::log10(distance_m));
    return std::pow(10.0, gain_db / 10.0);
}

namespace {

double draw_gain(double d, const ChannelModelConfig& cfg, Rng& rng) {
    double gain_db = -(cfg.pl_d0_db + 10.0 * cfg.pathloss_exponent * std::log10(d));
    if (cfg.shadowing_sigma_db > 0.0) {
        std::normal_distribution<double> z(0.0, cfg.shadowing_sigma_db);
        gain_db += z(rng);
    }
    const double omega = std::pow(10.0, gain_db / 10.0);
    if (cfg.fading == FadingModel::Rayleigh) {
        // Rayleigh amplitude => exponential power gain with mean omega.
        std::exponential_distribution<double> e(1.0);
        return omega * e(rng);
    }
    return omega;
}

}  // namespace

ChannelSet sample_channels(const Topology& topo, const ChannelModelConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = static_cast<int>(topo.sources.size());
    const int k = static_cast<int>(topo.relays.size());

    auto check = [](double d) {
        if (d <= 0.0) throw std::invalid_argument("sample_channels: co-located nodes");
        return d;
    };

    ChannelSet ch;
    ch.h_ap_src.resize(n);
    ch.g_src_ap.resize(n);
    ch.h_ap_rel.resize(k);
    ch.g_rel_ap.resize(k);
    ch.g_src_rel.assign(n, std::vector<double>(k));

    for (int i = 0; i < n; ++i) {
        const double d = check(distance(topo.ap, topo.sources[i]));
        ch.h_ap_src[i] = draw_gain(d, cfg, rng);
        ch.g_src_ap[i] = draw_gain(d, cfg, rng);
    }
    for (int j = 0; j < k; ++j) {
        const double d = check(distance(topo.ap, topo.relays[j]));
        ch.h_ap_rel[j] = draw_gain(d, cfg, rng);
        ch.g_rel_ap[j] = draw_gain(d, cfg, rng);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
            const double d = check(distance(topo.sources[i], topo.relays[j]));
            ch.g_src_rel[i][j] = draw_gain(d, cfg, rng);
        }
    return ch;
}

double harvested_energy(double zeta, double tau0_s, double pa_w, double h_dl) {
    return zeta * tau0_s * pa_w * h_dl;
}

double link_rate(double p_tx_w, double g_ul, double w_hz, double n0_w_per_hz) {
    return w_hz * std::log2(1.0 + p_tx_w * g_ul / (w_hz * n0_w_per_hz));
}

// --- JSON ---

nlohmann::json to_json(const SystemParams& p) {
    return {{"bandwidth_hz", p.bandwidth_w},
            {"noise_psd_w_per_hz", p.noise_psd_n0},
            {"ap_power_w", p.ap_power_pa},
            {"max_ul_power_w", p.max_ul_power},
            {"eh_efficiency_src", p.eh_efficiency_src},
            {"eh_efficiency_rel", p.eh_efficiency_rel},
            {"demands_bits", p.demands_bits},
            {"n", p.num_sources},
            {"k", p.num_relays}};
}

SystemParams system_params_from_json(const nlohmann::json& j) {
    SystemParams p;
    p.bandwidth_w = j.value("bandwidth_hz", p.bandwidth_w);
    p.noise_psd_n0 = j.value("noise_psd_w_per_hz", p.noise_psd_n0);
    p.ap_power_pa = j.value("ap_power_w", p.ap_power_pa);
    p.max_ul_power = j.value("max_ul_power_w", p.max_ul_power);
    p.num_sources = j.at("n").get<int>();
    p.num_relays = j.value("k", 0);
    if (j.contains("eh_efficiency_src")) {
        p.eh_efficiency_src = j.at("eh_efficiency_src").get<std::vector<double>>();
    } else {
        p.eh_efficiency_src.assign(p.num_sources, j.value("eh_efficiency", 0.5));
    }
    if (j.contains("eh_efficiency_rel")) {
        p.eh_efficiency_rel = j.at("eh_efficiency_rel").get<std::vector<double>>();
    } else {
        p.eh_efficiency_rel.assign(p.num_relays, j.value("eh_efficiency", 0.5));
    }
    if (j.contains("demands_bits")) {
        p.demands_bits = j.at("demands_bits").get<std::vector<double>>();
    } else {
        p.demands_bits.assign(p.num_sources, j.value("demand_bits", 50.0));
    }
    p.validate();
    return p;
}

nlohmann::json to_json(const ChannelSet& c) {
    return {{"h_ap_src", c.h_ap_src},
            {"h_ap_rel", c.h_ap_rel},
            {"g_src_ap", c.g_src_ap},
            {"g_src_rel", c.g_src_rel},
            {"g_rel_ap", c.g_rel_ap}};
}

ChannelSet channel_set_from_json(const nlohmann::json& j) {
    ChannelSet c;
    c.h_ap_src = j.at("h_ap_src").get<std::vector<double>>();
    c.h_ap_rel = j.value("h_ap_rel", std::vector<double>{});
    c.g_src_ap = j.at("g_src_ap").get<std::vector<double>>();
    c.g_src_rel = j.value("g_src_rel", std::vector<std::vector<double>>{});
    c.g_rel_ap = j.value("g_rel_ap", std::vector<double>{});
    if (c.g_src_rel.empty()) c.g_src_rel.assign(c.h_ap_src.size(), {});
    return c;
}

nlohmann::json to_json(const NetworkInstance& inst) {
    nlohmann::json j{{"params", to_json(inst.params)}, {"channels", to_json(inst.channels)}};
    if (inst.source_positions) {
        nlohmann::json pos = nlohmann::json::array();
        for (const auto& p : *inst.source_positions) pos.push_back({p.x, p.y});
        j["source_positions"] = pos;
    }
    if (inst.relay_positions) {
        nlohmann::json pos = nlohmann::json::array();
        for (const auto& p : *inst.relay_positions) pos.push_back({p.x, p.y});
        j["relay_positions"] = pos;
    }
    return j;
}

NetworkInstance network_instance_from_json(const nlohmann::json& j) {
    NetworkInstance inst;
    inst.params = system_params_from_json(j.at("params"));
    inst.channels = channel_set_from_json(j.at("channels"));
    auto read_positions = [](const nlohmann::json& arr) {
        std::vector<Position> out;
        for (const auto& p : arr) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        return out;
    };
    if (j.contains("source_positions")) inst.source_positions = read_positions(j["source_positions"]);
    if (j.contains("relay_positions")) inst.relay_positions = read_positions(j["relay_positions"]);
    inst.validate();
    return inst;
}

GenerationConfig generation_config_from_json(const nlohmann::json& j) {
    GenerationConfig g;
    g.n = j.value("n", g.n);
    g.k = j.value("k", g.k);
    g.geometry.r_min_m = j.value("r_min_m", g.geometry.r_min_m);
    g.geometry.r_max_m = j.value("r_max_m", g.geometry.r_max_m);
    g.geometry.relay_radius_m = j.value("relay_radius_m", g.geometry.relay_radius_m);
    g.channel.pl_d0_db = j.value("pl_d0_db", g.channel.pl_d0_db);
    g.channel.shadowing_sigma_db = j.value("sigma_z_db", g.channel.shadowing_sigma_db);
    g.channel.pathloss_exponent = j.value("exponent", g.channel.pathloss_exponent);
    const std::string fading = j.value("fading", "rayleigh");
    if (fading == "rayleigh") {
        g.channel.fading = FadingModel::Rayleigh;
    } else if (fading == "none") {
        g.channel.fading = FadingModel::None;
    } else {
        throw std::invalid_argument("unknown fading model: " + fading);
    }
    g.seed = j.value("seed", std::uint64_t{0});
    return g;
}

nlohmann::json to_json(const GenerationConfig& g) {
    return {{"n", g.n},
            {"k", g.k},
            {"r_min_m", g.geometry.r_min_m},
            {"r_max_m", g.geometry.r_max_m},
            {"relay_radius_m", g.geometry.relay_radius_m},
            {"pl_d0_db", g.channel.pl_d0_db},
            {"sigma_z_db", g.channel.shadowing_sigma_db},
            {"exponent", g.channel.pathloss_exponent},
            {"fading", g.channel.fading == FadingModel::Rayleigh ? "rayleigh" : "none"},
            {"seed", g.seed}};
}

}  // namespace wpcn
