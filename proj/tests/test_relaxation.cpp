#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wpcn/relaxation.hpp"
#include "wpcn/scheduling.hpp"
#include "test_util.hpp"

using namespace wpcn;

namespace {

// Oracle assembly of the scheduling instance induced by a full assignment:
// one link per source plus one aggregated link per loaded relay.
SchedulingInstance links_for(const NetworkInstance& net, const std::vector<int>& assign) {
    const auto& p = net.params;
    const auto& ch = net.channels;
    SchedulingInstance inst;
    inst.pmax = p.max_ul_power;
    for (int i = 0; i < p.num_sources; ++i) {
        SourceLink l;
        l.h_dl = ch.h_ap_src[i];
        l.g_ul = assign[i] == 0 ? ch.g_src_ap[i] : ch.g_src_rel[i][assign[i] - 1];
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
            if (assign[i] == j) {
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

double enumerate_best(const NetworkInstance& net) {
    const int n = net.params.num_sources, k = net.params.num_relays;
    std::vector<int> assign(n, 0);
    double best = std::numeric_limits<double>::infinity();
    const int combos = static_cast<int>(std::pow(k + 1, n));
    for (int code = 0; code < combos; ++code) {
        int c = code;
        for (int i = 0; i < n; ++i) {
            assign[i] = c % (k + 1);
            c /= (k + 1);
        }
        best = std::min(best, powmu(links_for(net, assign)).total);
    }
    return best;
}

double all_direct_total(const NetworkInstance& net) {
    return powmu(links_for(net, std::vector<int>(net.params.num_sources, 0))).total;
}

}  // namespace

TEST_CASE("perspective rate closure, homogeneity and link_rate consistency") {
    CHECK(perspective_rate(0.0, 0.0, 1e-4, 1e6, 1e-12) == 0.0);
    CHECK(perspective_rate(0.0, 5.0, 1e-4, 1e6, 1e-12) == 0.0);
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double tau = 1e-3 * u(rng), a = 1e-5 * u(rng), g = 1e-4 * u(rng);
        const double r = perspective_rate(tau, a, g, 1e6, 1e-12);
        // positive homogeneity
        CHECK(perspective_rate(2.0 * tau, 2.0 * a, g, 1e6, 1e-12) ==
              doctest::Approx(2.0 * r).epsilon(1e-12));
        // matches rate * time at the implied constant power
        CHECK(r == doctest::Approx(tau * link_rate(a / tau, g, 1e6, 1e-12)).epsilon(1e-12));
    }
}

TEST_CASE("perspective rate concave on random triples") {
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double g = 1e-4 * u(rng);
        const double t1 = 1e-3 * u(rng), a1 = 1e-5 * u(rng);
        const double t2 = 1e-3 * u(rng), a2 = 1e-5 * u(rng);
        const double lam = u(rng) / 3.0;
        const double mix = perspective_rate(lam * t1 + (1 - lam) * t2,
                                            lam * a1 + (1 - lam) * a2, g, 1e6, 1e-12);
        const double chord = lam * perspective_rate(t1, a1, g, 1e6, 1e-12) +
                             (1 - lam) * perspective_rate(t2, a2, g, 1e6, 1e-12);
        CHECK(mix >= chord * (1.0 - 1e-12));
    }
}

TEST_CASE("build_relaxation rejects malformed inputs") {
    Rng rng(7);
    auto net = test::random_network(3, 2, rng);
    CHECK_THROWS_AS(build_relaxation(net, FixedAssignments{0, 0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_relaxation(net, FixedAssignments{0, 0, 3}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_relaxation(net, FixedAssignments{0, 0, -2}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_relaxation(net, FixedAssignments{0, 0, 0}, 0.0), std::invalid_argument);
}

TEST_CASE("fixed rows drop selection and envelope variables") {
    Rng rng(11);
    auto net = test::random_network(3, 2, rng);
    auto model = build_relaxation(net, FixedAssignments{1, -1, 0}, 1.0);
    // source 0 pinned to relay 1: only that column carries variables
    CHECK(model.idx_b[0][0] == -1);
    CHECK(model.idx_b[0][1] == -1);
    CHECK(model.idx_w_sr[0][1] == -1);
    CHECK(model.idx_tau_sr[0][1] >= 0);
    CHECK(model.idx_tau_sr[0][0] == -1);
    CHECK(model.idx_tau_sr[0][2] == -1);
    // free source keeps the full row
    for (int j = 0; j <= 2; ++j) {
        CHECK(model.idx_b[1][j] >= 0);
        CHECK(model.idx_w_sr[1][j] >= 0);
    }
    // relay 1 has a pinned customer: no load-vanishing envelope needed
    CHECK(model.idx_w_r[0] == -1);
    CHECK(model.idx_w_r[1] >= 0);
    CHECK(model.num_free_rows == 1);
    CHECK(model.relay_fixed_demand[0] == net.params.demands_bits[0]);
}

TEST_CASE("no relays pins every row to the direct column") {
    Rng rng(13);
    auto net = test::random_network(2, 0, rng);
    auto model = build_relaxation(net, FixedAssignments{-1, -1}, 1.0);
    CHECK(model.num_free_rows == 0);
    CHECK(model.idx_b[0][0] == -1);
    CHECK(model.idx_tau_sr[0][0] >= 0);
}

TEST_CASE("integral mask collapses to the scheduler optimum") {
    Rng rng(17);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int rep = 0; rep < 10; ++rep) {
        auto net = test::random_network(3, 2, rng);
        FixedAssignments assign(3);
        for (auto& a : assign) a = pick(rng);
        const auto inst = links_for(net, std::vector<int>(assign.begin(), assign.end()));
        const double ref = powmu(inst).total;
        auto model = build_relaxation(net, assign, 2.0 * ref);
        auto sol = solve_relaxation(model);
        REQUIRE(sol.status == RelaxStatus::Optimal);
        CHECK(sol.objective == doctest::Approx(ref).epsilon(1e-5));
        CHECK(sol.lower_bound <= ref * (1.0 + 1e-9));
        CHECK(sol.kkt_residual <= 1e-4);
    }
}

TEST_CASE("single source no relay matches the closed form") {
    Rng rng(19);
    for (int rep = 0; rep < 10; ++rep) {
        auto net = test::random_network(1, 0, rng);
        SourceLink l;
        l.h_dl = net.channels.h_ap_src[0];
        l.g_ul = net.channels.g_src_ap[0];
        l.demand = net.params.demands_bits[0];
        const double ref = optimal_single(l, net.params.max_ul_power).total();
        auto model = build_relaxation(net, FixedAssignments{-1}, 2.0 * ref);
        auto sol = solve_relaxation(model);
        REQUIRE(sol.status == RelaxStatus::Optimal);
        CHECK(sol.objective == doctest::Approx(ref).epsilon(1e-5));
    }
}

TEST_CASE("root relaxation lower-bounds the enumerated optimum") {
    Rng rng(23);
    for (int rep = 0; rep < 50; ++rep) {
        auto net = test::random_network(3, 2, rng);
        const double tau_ub = all_direct_total(net);
        const double best = enumerate_best(net);
        auto model = build_relaxation(net, FixedAssignments(3, -1), tau_ub);
        auto sol = solve_relaxation(model);
        REQUIRE(sol.status == RelaxStatus::Optimal);
        CHECK(sol.lower_bound <= best * (1.0 + 1e-6));
        CHECK(sol.objective <= best * (1.0 + 1e-6));
        CHECK(sol.objective >= 0.0);
    }
}

TEST_CASE("relaxed optimum satisfies the model constraints") {
    Rng rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        auto net = test::random_network(4, 2, rng);
        const auto& p = net.params;
        const double tau_ub = all_direct_total(net);
        auto model = build_relaxation(net, FixedAssignments(4, -1), tau_ub);
        auto sol = solve_relaxation(model);
        REQUIRE(sol.status == RelaxStatus::Optimal);
        const double slack = 1e-6;
        for (int i = 0; i < 4; ++i) {
            double row = 0.0;
            for (int j = 0; j <= 2; ++j) {
                row += sol.b[i][j];
                CHECK(sol.b[i][j] >= 0.0);
                CHECK(sol.tau_sr[i][j] <= tau_ub * (1.0 + slack));
                // energy causality
                CHECK(sol.a_sr[i][j] <=
                      harvested_energy(p.eh_efficiency_src[i], sol.tau0, p.ap_power_pa,
                                       net.channels.h_ap_src[i]) *
                          (1.0 + slack));
                // demand met in perspective form (skip links whose time was
                // snapped to zero along with their negligible selection mass)
                if (sol.tau_sr[i][j] > 0.0) {
                    const double g_ul =
                        j == 0 ? net.channels.g_src_ap[i] : net.channels.g_src_rel[i][j - 1];
                    const double bits = perspective_rate(sol.tau_sr[i][j], sol.a_sr[i][j], g_ul,
                                                         p.bandwidth_w, p.noise_psd_n0);
                    CHECK(bits >= p.demands_bits[i] * sol.b[i][j] - slack * p.demands_bits[i]);
                }
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-8));
        }
        for (int j = 0; j < 2; ++j) {
            double routed = 0.0;
            for (int i = 0; i < 4; ++i) routed += p.demands_bits[i] * sol.b[i][j + 1];
            const double bits = perspective_rate(sol.tau_r[j], sol.a_r[j],
                                                 net.channels.g_rel_ap[j], p.bandwidth_w,
                                                 p.noise_psd_n0);
            CHECK(bits >= routed - slack * std::max(1.0, routed));
            CHECK(sol.a_r[j] <= p.max_ul_power * sol.tau_r[j] * (1.0 + slack));
        }
    }
}

TEST_CASE("tightening tau_ub never decreases the objective") {
    Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        auto net = test::random_network(3, 2, rng);
        const double tau_ub = all_direct_total(net);
        auto tight = solve_relaxation(build_relaxation(net, FixedAssignments(3, -1), tau_ub));
        auto loose =
            solve_relaxation(build_relaxation(net, FixedAssignments(3, -1), 2.0 * tau_ub));
        REQUIRE(tight.status == RelaxStatus::Optimal);
        REQUIRE(loose.status == RelaxStatus::Optimal);
        CHECK(tight.objective >= loose.objective * (1.0 - 1e-5));
    }
}

TEST_CASE("fixing a source never decreases the bound") {
    Rng rng(37);
    for (int rep = 0; rep < 10; ++rep) {
        auto net = test::random_network(3, 2, rng);
        const double tau_ub = all_direct_total(net);
        auto root = solve_relaxation(build_relaxation(net, FixedAssignments(3, -1), tau_ub));
        REQUIRE(root.status == RelaxStatus::Optimal);
        // branch on the largest fractional entry
        int bi = 0;
        double bv = -1.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= 2; ++j)
                if (root.b[i][j] > bv) {
                    bv = root.b[i][j];
                    bi = i;
                }
        for (int j = 0; j <= 2; ++j) {
            FixedAssignments fixed(3, -1);
            fixed[bi] = j;
            auto child = solve_relaxation(build_relaxation(net, fixed, tau_ub));
            if (child.status == RelaxStatus::Infeasible) continue;
            CHECK(child.objective >= root.objective * (1.0 - 1e-5));
        }
    }
}

TEST_CASE("impossibly small tau_ub is reported infeasible") {
    Rng rng(41);
    auto net = test::random_network(3, 2, rng);
    const double tau_ub = all_direct_total(net);
    auto sol = solve_relaxation(build_relaxation(net, FixedAssignments(3, -1), tau_ub * 1e-4));
    CHECK(sol.status == RelaxStatus::Infeasible);
    CHECK(std::isinf(sol.lower_bound));
}

TEST_CASE("model dump names every variable") {
    Rng rng(43);
    auto net = test::random_network(2, 1, rng);
    auto model = build_relaxation(net, FixedAssignments{-1, 1}, 1.0);
    const auto text = dump_model(model);
    CHECK(text.find("tau0") != std::string::npos);
    CHECK(text.find("b[0][1]") != std::string::npos);
    CHECK(text.find("tau_r[0]") != std::string::npos);
    CHECK(text.find("minimize") != std::string::npos);
}
