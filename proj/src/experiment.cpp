#include "wpcn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "wpcn/relay_select.hpp"
#include "wpcn/scheduling.hpp"

namespace wpcn {

namespace {

constexpr struct {
    Algorithm algo;
    const char* name;
} kAlgoNames[] = {
    {Algorithm::Bba, "bba"},         {Algorithm::Obh, "obh"},
    {Algorithm::Rph, "rph"},         {Algorithm::Rstma, "rstma"},
    {Algorithm::OrPowmu, "or_powmu"}, {Algorithm::Htc, "htc"},
    {Algorithm::Powmu, "powmu"},     {Algorithm::MaxEh, "max_eh"},
};

constexpr struct {
    ExperimentKind kind;
    const char* name;
} kKindNames[] = {
    {ExperimentKind::SweepN, "sweep_n"},
    {ExperimentKind::SweepK, "sweep_k"},
    {ExperimentKind::SweepPmax, "sweep_pmax"},
    {ExperimentKind::SweepRelayPos, "sweep_relay_pos"},
    {ExperimentKind::OptGapMaxEh, "optgap_maxeh"},
    {ExperimentKind::Runtime, "runtime"},
};

// Splitmix-style avalanche; decorrelates consecutive stream labels.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng trial_rng(std::uint64_t seed, std::size_t sweep_idx, std::size_t trial_idx) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ (0x5851f42d4c957f2dULL * (sweep_idx + 1)));
    s = mix64(s ^ (0x14057b7ef767814fULL * (trial_idx + 1)));
    return Rng(s);
}

struct SweepPoint {
    double value = 0.0;
    int n = 0;
    int k = 0;
    double pmax_w = 0.0;
    GeometryConfig geometry;
    std::vector<Algorithm> algorithms;
};

SweepPoint make_point(const ExperimentConfig& cfg, double value) {
    SweepPoint pt;
    pt.value = value;
    pt.n = cfg.n;
    pt.k = cfg.k;
    pt.pmax_w = cfg.pmax_w;
    pt.geometry = cfg.geometry;
    switch (cfg.kind) {
        case ExperimentKind::SweepN:
        case ExperimentKind::Runtime:
            pt.n = static_cast<int>(std::lround(value));
            break;
        case ExperimentKind::OptGapMaxEh:
            pt.n = static_cast<int>(std::lround(value));
            pt.k = 0;
            break;
        case ExperimentKind::SweepK:
            pt.k = static_cast<int>(std::lround(value));
            break;
        case ExperimentKind::SweepPmax:
            pt.pmax_w = value;
            break;
        case ExperimentKind::SweepRelayPos:
            pt.geometry.relay_radius_m = value;
            break;
    }
    if (!cfg.algorithms.empty()) {
        pt.algorithms = cfg.algorithms;
    } else {
        switch (cfg.kind) {
            case ExperimentKind::OptGapMaxEh:
                pt.algorithms = {Algorithm::Powmu, Algorithm::MaxEh};
                break;
            case ExperimentKind::Runtime:
                pt.algorithms = {Algorithm::Obh, Algorithm::Rph, Algorithm::Rstma};
                break;
            default:
                if (pt.n <= 5) pt.algorithms.push_back(Algorithm::Bba);
                pt.algorithms.insert(pt.algorithms.end(),
                                     {Algorithm::Obh, Algorithm::Rph, Algorithm::Rstma,
                                      Algorithm::OrPowmu, Algorithm::Htc});
                break;
        }
    }
    return pt;
}

SystemParams params_for(const ExperimentConfig& cfg, int n, int k, double pmax_w) {
    SystemParams p;
    p.bandwidth_w = cfg.bandwidth_hz;
    p.noise_psd_n0 = cfg.noise_psd;
    p.ap_power_pa = cfg.ap_power_w;
    p.max_ul_power = pmax_w;
    p.num_sources = n;
    p.num_relays = k;
    p.eh_efficiency_src.assign(n, cfg.zeta);
    p.eh_efficiency_rel.assign(k, cfg.zeta);
    p.demands_bits.assign(n, cfg.demand_bits);
    return p;
}

NetworkInstance sample_instance(const ExperimentConfig& cfg, const SweepPoint& pt, Rng& rng) {
    NetworkInstance inst;
    inst.params = params_for(cfg, pt.n, pt.k, pt.pmax_w);
    const Topology topo = generate_topology(inst.params, pt.geometry, rng);
    inst.channels = sample_channels(topo, cfg.channel, rng);
    inst.source_positions = topo.sources;
    inst.relay_positions = topo.relays;
    return inst;
}

TrialRecord run_one(const NetworkInstance& inst, Algorithm a) {
    TrialRecord rec;
    rec.algorithm = a;
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (a) {
            case Algorithm::Bba:
            case Algorithm::Obh:
            case Algorithm::Rph:
            case Algorithm::Rstma:
            case Algorithm::OrPowmu:
            case Algorithm::Htc: {
                FullSchedule s;
                if (a == Algorithm::Bba) s = bba(inst);
                else if (a == Algorithm::Obh) s = obh(inst);
                else if (a == Algorithm::Rph) s = rph(inst);
                else if (a == Algorithm::Rstma) s = rstma(inst);
                else if (a == Algorithm::OrPowmu) s = solve_assignment(inst, or_criterion(inst));
                else s = htc_baseline(inst);
                rec.total_s = s.total;
                rec.feasible = s.feasible;
                break;
            }
            case Algorithm::Powmu:
            case Algorithm::MaxEh: {
                const RelayAssignment direct(inst.params.num_sources, 0);
                const SchedulingInstance links = assignment_to_links(inst, direct);
                const Schedule s = a == Algorithm::Powmu ? powmu(links) : max_eh(links);
                rec.total_s = s.total;
                rec.feasible = true;
                break;
            }
        }
    } catch (const std::exception&) {
        rec.total_s = 0.0;
        rec.feasible = false;
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
    for (const auto& e : kAlgoNames)
        if (e.algo == a) return e.name;
    throw std::invalid_argument("unknown algorithm id");
}

Algorithm algorithm_from_name(const std::string& name) {
    for (const auto& e : kAlgoNames)
        if (name == e.name) return e.algo;
    throw std::invalid_argument("unknown algorithm: " + name);
}

const char* experiment_kind_name(ExperimentKind k) {
    for (const auto& e : kKindNames)
        if (e.kind == k) return e.name;
    throw std::invalid_argument("unknown experiment kind id");
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
    for (const auto& e : kKindNames)
        if (name == e.name) return e.kind;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (grid.empty()) throw std::invalid_argument("sweep grid must be non-empty");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (n < 1 || k < 0) throw std::invalid_argument("need n >= 1 and k >= 0");
    if (!(pmax_w > 0.0) || !(demand_bits > 0.0) || !(zeta > 0.0 && zeta <= 1.0) ||
        !(ap_power_w > 0.0) || !(bandwidth_hz > 0.0) || !(noise_psd > 0.0))
        throw std::invalid_argument("physical parameters must be positive");
    geometry.validate();
    channel.validate();
    for (const double v : grid) {
        switch (kind) {
            case ExperimentKind::SweepN:
            case ExperimentKind::OptGapMaxEh:
            case ExperimentKind::Runtime:
                if (std::lround(v) < 1) throw std::invalid_argument("swept n must be >= 1");
                break;
            case ExperimentKind::SweepK:
                if (std::lround(v) < 0) throw std::invalid_argument("swept k must be >= 0");
                break;
            default:
                if (!(v > 0.0)) throw std::invalid_argument("swept value must be positive");
                break;
        }
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    switch (cfg.kind) {
        case ExperimentKind::SweepK: result.sweep_param = "k"; break;
        case ExperimentKind::SweepPmax: result.sweep_param = "pmax_w"; break;
        case ExperimentKind::SweepRelayPos: result.sweep_param = "relay_radius_m"; break;
        default: result.sweep_param = "n"; break;
    }

    std::vector<SweepPoint> points;
    points.reserve(cfg.grid.size());
    for (const double v : cfg.grid) points.push_back(make_point(cfg, v));

    // Record layout: sweep-major, then trial, then algorithm.
    std::vector<std::size_t> base(points.size() + 1, 0);
    for (std::size_t si = 0; si < points.size(); ++si)
        base[si + 1] = base[si] + points[si].algorithms.size() * cfg.trials;
    result.records.resize(base.back());

    const std::size_t jobs = points.size() * cfg.trials;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) {
            const std::size_t si = j / cfg.trials;
            const std::size_t ti = j % cfg.trials;
            const SweepPoint& pt = points[si];
            Rng rng = trial_rng(cfg.seed, si, ti);
            const NetworkInstance inst = sample_instance(cfg, pt, rng);
            for (std::size_t ai = 0; ai < pt.algorithms.size(); ++ai) {
                TrialRecord rec = run_one(inst, pt.algorithms[ai]);
                rec.sweep_value = pt.value;
                rec.trial = static_cast<int>(ti);
                result.records[base[si] + ti * pt.algorithms.size() + ai] = rec;
            }
        }
    };
    const int nthreads = std::max(1, cfg.threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t si = 0; si < points.size(); ++si) {
        const SweepPoint& pt = points[si];
        for (std::size_t ai = 0; ai < pt.algorithms.size(); ++ai) {
            SummaryRow row;
            row.sweep_value = pt.value;
            row.algorithm = pt.algorithms[ai];
            row.trial_count = cfg.trials;
            double sum = 0.0, sum2 = 0.0, wall = 0.0;
            for (int ti = 0; ti < cfg.trials; ++ti) {
                const TrialRecord& rec =
                    result.records[base[si] + ti * pt.algorithms.size() + ai];
                wall += rec.wall_time_s;
                if (!rec.feasible) continue;
                ++row.feasible_count;
                sum += rec.total_s;
                sum2 += rec.total_s * rec.total_s;
            }
            row.mean_wall_time_s = wall / cfg.trials;
            if (row.feasible_count > 0) {
                const double m = sum / row.feasible_count;
                row.mean_total_s = m;
                if (row.feasible_count > 1) {
                    const double var = std::max(
                        0.0, (sum2 - row.feasible_count * m * m) / (row.feasible_count - 1));
                    row.ci95_half_width_s = 1.96 * std::sqrt(var / row.feasible_count);
                }
            }
            result.summary.push_back(row);
        }
    }
    return result;
}

std::string to_csv(const ExperimentResult& r) {
    std::string out = "sweep_param,sweep_value,trial,algorithm,total_s,wall_time_s,feasible\n";
    for (const auto& rec : r.records) {
        out += r.sweep_param;
        out += ',';
        append_double(out, rec.sweep_value);
        out += ',';
        out += std::to_string(rec.trial);
        out += ',';
        out += algorithm_name(rec.algorithm);
        out += ',';
        append_double(out, rec.total_s);
        out += ',';
        append_double(out, rec.wall_time_s);
        out += ',';
        out += rec.feasible ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string summary_table(const ExperimentResult& r) {
    std::ostringstream os;
    os << r.sweep_param << "  algorithm  mean_total_s  ci95_s  mean_wall_s  feasible/trials\n";
    char buf[160];
    for (const auto& row : r.summary) {
        std::snprintf(buf, sizeof(buf), "%-10.6g %-10s %.6e  %.2e  %.3e  %d/%d\n",
                      row.sweep_value, algorithm_name(row.algorithm), row.mean_total_s,
                      row.ci95_half_width_s, row.mean_wall_time_s, row.feasible_count,
                      row.trial_count);
        os << buf;
    }
    return os.str();
}

void ThreeNodeConfig::validate() const {
    if (!(step_m > 0.0)) throw std::invalid_argument("step_m must be positive");
    if (!(x_max_m > x_min_m)) throw std::invalid_argument("need x_max_m > x_min_m");
    if (!(source_x_m > 0.0)) throw std::invalid_argument("source_x_m must be positive");
    if (!(pmax_w > 0.0) || !(demand_bits > 0.0) || !(zeta > 0.0 && zeta <= 1.0) ||
        !(ap_power_w > 0.0) || !(bandwidth_hz > 0.0) || !(noise_psd > 0.0))
        throw std::invalid_argument("physical parameters must be positive");
    channel.validate();
}

namespace {

NetworkInstance three_node_instance(const ThreeNodeConfig& cfg, double relay_x) {
    NetworkInstance inst;
    inst.params.bandwidth_w = cfg.bandwidth_hz;
    inst.params.noise_psd_n0 = cfg.noise_psd;
    inst.params.ap_power_pa = cfg.ap_power_w;
    inst.params.max_ul_power = cfg.pmax_w;
    inst.params.num_sources = 1;
    inst.params.num_relays = 1;
    inst.params.eh_efficiency_src = {cfg.zeta};
    inst.params.eh_efficiency_rel = {cfg.zeta};
    inst.params.demands_bits = {cfg.demand_bits};
    const double d_as = cfg.source_x_m;
    const double d_ar = std::hypot(relay_x, cfg.relay_y_m);
    const double d_sr = std::hypot(relay_x - cfg.source_x_m, cfg.relay_y_m);
    const double g_as = path_gain(d_as, cfg.channel);
    const double g_ar = path_gain(d_ar, cfg.channel);
    const double g_sr = path_gain(d_sr, cfg.channel);
    inst.channels.h_ap_src = {g_as};
    inst.channels.g_src_ap = {g_as};
    inst.channels.h_ap_rel = {g_ar};
    inst.channels.g_rel_ap = {g_ar};
    inst.channels.g_src_rel = {{g_sr}};
    inst.source_positions = {{cfg.source_x_m, 0.0}};
    inst.relay_positions = {{relay_x, cfg.relay_y_m}};
    return inst;
}

double relayed_total_at(const ThreeNodeConfig& cfg, double relay_x) {
    try {
        return solve_assignment(three_node_instance(cfg, relay_x), {1}).total;
    } catch (const InfeasibleError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

ThreeNodeResult three_node_sweep(const ThreeNodeConfig& cfg) {
    cfg.validate();
    ThreeNodeResult result;
    const int steps = static_cast<int>(std::ceil((cfg.x_max_m - cfg.x_min_m) / cfg.step_m - 1e-9));
    result.points.reserve(steps + 1);
    for (int s = 0; s <= steps; ++s) {
        const double x = std::min(cfg.x_min_m + s * cfg.step_m, cfg.x_max_m);
        const NetworkInstance inst = three_node_instance(cfg, x);
        ThreeNodePoint pt;
        pt.relay_x_m = x;
        pt.direct_total_s = solve_assignment(inst, {0}).total;
        pt.relayed_total_s = relayed_total_at(cfg, x);
        pt.benefit_predicted = relay_benefit(inst, 0, 1);
        result.points.push_back(pt);
    }
    // Refine each sign change of (relayed - direct) to a crossover coordinate.
    for (std::size_t s = 1; s < result.points.size(); ++s) {
        const auto& a = result.points[s - 1];
        const auto& b = result.points[s];
        if (!std::isfinite(a.relayed_total_s) || !std::isfinite(b.relayed_total_s)) continue;
        const double fa = a.relayed_total_s - a.direct_total_s;
        const double fb = b.relayed_total_s - b.direct_total_s;
        if (fa == 0.0 || fa * fb > 0.0) continue;
        double lo = a.relay_x_m, hi = b.relay_x_m, flo = fa;
        for (int it = 0; it < 60 && hi - lo > 1e-7; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = relayed_total_at(cfg, mid) -
                              solve_assignment(three_node_instance(cfg, mid), {0}).total;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        result.crossovers_m.push_back(0.5 * (lo + hi));
    }
    return result;
}

std::string to_csv(const ThreeNodeResult& r) {
    std::string out = "relay_x_m,direct_total_s,relayed_total_s,benefit_predicted\n";
    for (const auto& pt : r.points) {
        append_double(out, pt.relay_x_m);
        out += ',';
        append_double(out, pt.direct_total_s);
        out += ',';
        append_double(out, pt.relayed_total_s);
        out += ',';
        out += pt.benefit_predicted ? '1' : '0';
        out += '\n';
    }
    return out;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.kind = experiment_kind_from_name(j.value("kind", std::string("sweep_n")));
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.n = j.value("n", cfg.n);
    cfg.k = j.value("k", cfg.k);
    cfg.geometry.r_min_m = j.value("r_min_m", cfg.geometry.r_min_m);
    cfg.geometry.r_max_m = j.value("r_max_m", cfg.geometry.r_max_m);
    cfg.geometry.relay_radius_m = j.value("relay_radius_m", cfg.geometry.relay_radius_m);
    cfg.channel.pl_d0_db = j.value("pl_d0_db", cfg.channel.pl_d0_db);
    cfg.channel.shadowing_sigma_db = j.value("sigma_z_db", cfg.channel.shadowing_sigma_db);
    cfg.channel.pathloss_exponent = j.value("exponent", cfg.channel.pathloss_exponent);
    if (j.contains("fading")) {
        const std::string fading = j.at("fading").get<std::string>();
        if (fading == "rayleigh") cfg.channel.fading = FadingModel::Rayleigh;
        else if (fading == "none") cfg.channel.fading = FadingModel::None;
        else throw std::invalid_argument("unknown fading model: " + fading);
    }
    cfg.pmax_w = j.value("pmax_w", cfg.pmax_w);
    cfg.demand_bits = j.value("demand_bits", cfg.demand_bits);
    cfg.zeta = j.value("zeta", cfg.zeta);
    cfg.ap_power_w = j.value("ap_power_w", cfg.ap_power_w);
    cfg.bandwidth_hz = j.value("bandwidth_hz", cfg.bandwidth_hz);
    cfg.noise_psd = j.value("noise_psd", cfg.noise_psd);
    if (j.contains("grid")) cfg.grid = j.at("grid").get<std::vector<double>>();
    if (j.contains("algorithms"))
        for (const auto& name : j.at("algorithms"))
            cfg.algorithms.push_back(algorithm_from_name(name.get<std::string>()));
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json algos = nlohmann::json::array();
    for (const Algorithm a : cfg.algorithms) algos.push_back(algorithm_name(a));
    return {{"kind", experiment_kind_name(cfg.kind)},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"threads", cfg.threads},
            {"n", cfg.n},
            {"k", cfg.k},
            {"r_min_m", cfg.geometry.r_min_m},
            {"r_max_m", cfg.geometry.r_max_m},
            {"relay_radius_m", cfg.geometry.relay_radius_m},
            {"pl_d0_db", cfg.channel.pl_d0_db},
            {"sigma_z_db", cfg.channel.shadowing_sigma_db},
            {"exponent", cfg.channel.pathloss_exponent},
            {"fading", cfg.channel.fading == FadingModel::Rayleigh ? "rayleigh" : "none"},
            {"pmax_w", cfg.pmax_w},
            {"demand_bits", cfg.demand_bits},
            {"zeta", cfg.zeta},
            {"ap_power_w", cfg.ap_power_w},
            {"bandwidth_hz", cfg.bandwidth_hz},
            {"noise_psd", cfg.noise_psd},
            {"grid", cfg.grid},
            {"algorithms", algos}};
}

ThreeNodeConfig three_node_config_from_json(const nlohmann::json& j) {
    ThreeNodeConfig cfg;
    cfg.x_min_m = j.value("x_min_m", cfg.x_min_m);
    cfg.x_max_m = j.value("x_max_m", cfg.x_max_m);
    cfg.step_m = j.value("step_m", cfg.step_m);
    cfg.relay_y_m = j.value("relay_y_m", cfg.relay_y_m);
    cfg.source_x_m = j.value("source_x_m", cfg.source_x_m);
    cfg.pmax_w = j.value("pmax_w", cfg.pmax_w);
    cfg.demand_bits = j.value("demand_bits", cfg.demand_bits);
    cfg.zeta = j.value("zeta", cfg.zeta);
    cfg.ap_power_w = j.value("ap_power_w", cfg.ap_power_w);
    cfg.bandwidth_hz = j.value("bandwidth_hz", cfg.bandwidth_hz);
    cfg.noise_psd = j.value("noise_psd", cfg.noise_psd);
    cfg.channel.pl_d0_db = j.value("pl_d0_db", cfg.channel.pl_d0_db);
    cfg.channel.pathloss_exponent = j.value("exponent", cfg.channel.pathloss_exponent);
    return cfg;
}

nlohmann::json to_json(const ThreeNodeConfig& cfg) {
    return {{"x_min_m", cfg.x_min_m},
            {"x_max_m", cfg.x_max_m},
            {"step_m", cfg.step_m},
            {"relay_y_m", cfg.relay_y_m},
            {"source_x_m", cfg.source_x_m},
            {"pmax_w", cfg.pmax_w},
            {"demand_bits", cfg.demand_bits},
            {"zeta", cfg.zeta},
            {"ap_power_w", cfg.ap_power_w},
            {"bandwidth_hz", cfg.bandwidth_hz},
            {"noise_psd", cfg.noise_psd},
            {"pl_d0_db", cfg.channel.pl_d0_db},
            {"exponent", cfg.channel.pathloss_exponent}};
}

}  // namespace wpcn
