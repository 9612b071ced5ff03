#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wpcn/experiment.hpp"
#include "wpcn/relay_select.hpp"
#include "wpcn/scheduling.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open " + path);
    return nlohmann::json::parse(in);
}

void write_output(const std::string& out_path, const std::string& body) {
    if (out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw CLI::ValidationError("cannot write " + out_path);
    out << body;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wireless-powered cooperative network schedulers and experiment runner"};
    app.require_subcommand(1);

    std::string config_path, instance_path, out_path, algo_name;
    std::uint64_t seed = 0;
    int trials = 0, threads = 0;
    bool has_seed = false;

    auto* run = app.add_subcommand("run", "Monte-Carlo sweep from a JSON config, CSV output");
    run->add_option("config", config_path, "experiment config JSON")->required();
    run->add_option("--out", out_path, "CSV output path (default: stdout)");
    run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        has_seed = true;
    });
    run->add_option("--trials", trials, "override the trial count");
    run->add_option("--threads", threads, "worker thread count");

    auto* three = app.add_subcommand(
        "three-node", "Deterministic single-relay position sweep, CSV output");
    three->add_option("config", config_path, "sweep config JSON")->required();
    three->add_option("--out", out_path, "CSV output path (default: stdout)");

    auto* solve = app.add_subcommand("solve", "Solve one instance file with one algorithm");
    solve->add_option("instance", instance_path, "network instance JSON")->required();
    solve->add_option("--algo", algo_name, "bba|obh|rph|rstma|or_powmu|htc|powmu|max_eh")
        ->required();
    solve->add_option("--out", out_path, "result JSON path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            wpcn::ExperimentConfig cfg = wpcn::experiment_config_from_json(load_json(config_path));
            if (has_seed) cfg.seed = seed;
            if (trials > 0) cfg.trials = trials;
            if (threads > 0) cfg.threads = threads;
            const wpcn::ExperimentResult result = wpcn::run_experiment(cfg);
            write_output(out_path, wpcn::to_csv(result));
            std::cerr << wpcn::summary_table(result);
        } else if (three->parsed()) {
            const wpcn::ThreeNodeConfig cfg =
                wpcn::three_node_config_from_json(load_json(config_path));
            const wpcn::ThreeNodeResult result = wpcn::three_node_sweep(cfg);
            write_output(out_path, wpcn::to_csv(result));
            std::cerr << "crossovers_m:";
            for (const double c : result.crossovers_m) std::cerr << ' ' << c;
            std::cerr << '\n';
        } else {
            const wpcn::Algorithm algo = wpcn::algorithm_from_name(algo_name);
            const wpcn::NetworkInstance inst =
                wpcn::network_instance_from_json(load_json(instance_path));
            nlohmann::json out;
            if (algo == wpcn::Algorithm::Powmu || algo == wpcn::Algorithm::MaxEh) {
                const wpcn::RelayAssignment direct(inst.params.num_sources, 0);
                const wpcn::SchedulingInstance links = wpcn::assignment_to_links(inst, direct);
                out = wpcn::to_json(algo == wpcn::Algorithm::Powmu ? wpcn::powmu(links)
                                                                   : wpcn::max_eh(links));
            } else {
                wpcn::FullSchedule s;
                switch (algo) {
                    case wpcn::Algorithm::Bba: s = wpcn::bba(inst); break;
                    case wpcn::Algorithm::Obh: s = wpcn::obh(inst); break;
                    case wpcn::Algorithm::Rph: s = wpcn::rph(inst); break;
                    case wpcn::Algorithm::Rstma: s = wpcn::rstma(inst); break;
                    case wpcn::Algorithm::OrPowmu:
                        s = wpcn::solve_assignment(inst, wpcn::or_criterion(inst));
                        break;
                    default: s = wpcn::htc_baseline(inst); break;
                }
                out = wpcn::to_json(s);
            }
            write_output(out_path, out.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
