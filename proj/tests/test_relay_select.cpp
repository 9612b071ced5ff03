#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "wpcn/relay_select.hpp"
#include "test_util.hpp"

using namespace wpcn;

namespace {

// Exhaustive oracle over every assignment, each solved by the scheduler.
double enumerate_best(const NetworkInstance& net) {
    const int n = net.params.num_sources, k = net.params.num_relays;
    RelayAssignment assign(n, 0);
    double best = std::numeric_limits<double>::infinity();
    const int combos = static_cast<int>(std::pow(k + 1, n));
    for (int code = 0; code < combos; ++code) {
        int c = code;
        for (int i = 0; i < n; ++i) {
            assign[i] = c % (k + 1);
            c /= (k + 1);
        }
        best = std::min(best, powmu(assignment_to_links(net, assign)).total);
    }
    return best;
}

void check_full_schedule(const FullSchedule& s, const NetworkInstance& net) {
    const auto& p = net.params;
    const auto& ch = net.channels;
    double sum = s.tau0;
    for (int i = 0; i < p.num_sources; ++i) {
        sum += s.tau_src[i];
        CHECK(s.p_src[i] <= p.max_ul_power * (1.0 + 1e-9));
        CHECK(s.p_src[i] * s.tau_src[i] <=
              harvested_energy(p.eh_efficiency_src[i], s.tau0, p.ap_power_pa, ch.h_ap_src[i]) *
                  (1.0 + 1e-9));
        if (p.demands_bits[i] == 0.0) continue;
        const int j = s.assignment[i];
        const double g = j == 0 ? ch.g_src_ap[i] : ch.g_src_rel[i][j - 1];
        CHECK(s.tau_src[i] * link_rate(s.p_src[i], g, p.bandwidth_w, p.noise_psd_n0) >=
              p.demands_bits[i] * (1.0 - 1e-9));
    }
    for (int j = 1; j <= p.num_relays; ++j) {
        sum += s.tau_rel[j - 1];
        double demand = 0.0;
        for (int i = 0; i < p.num_sources; ++i)
            if (s.assignment[i] == j) demand += p.demands_bits[i];
        if (demand == 0.0) {
            continue;
        }
        CHECK(s.p_rel[j - 1] <= p.max_ul_power * (1.0 + 1e-9));
        CHECK(s.p_rel[j - 1] * s.tau_rel[j - 1] <=
              harvested_energy(p.eh_efficiency_rel[j - 1], s.tau0, p.ap_power_pa,
                               ch.h_ap_rel[j - 1]) *
                  (1.0 + 1e-9));
        CHECK(s.tau_rel[j - 1] *
                  link_rate(s.p_rel[j - 1], ch.g_rel_ap[j - 1], p.bandwidth_w, p.noise_psd_n0) >=
              demand * (1.0 - 1e-9));
    }
    CHECK(s.total == doctest::Approx(sum).epsilon(1e-9));
}

// Deterministic three-node layout: source at (4,0), one relay at (x,2),
// distance-only channels.
NetworkInstance three_node(double relay_x, double pmax = 10.0) {
    NetworkInstance net;
    net.params = test::default_params(1, 1);
    net.params.max_ul_power = pmax;
    ChannelModelConfig cfg;
    const double d_src = 4.0;
    const double d_rel = std::hypot(relay_x, 2.0);
    const double d_sr = std::hypot(relay_x - 4.0, 2.0);
    net.channels.h_ap_src = {path_gain(d_src, cfg)};
    net.channels.g_src_ap = {path_gain(d_src, cfg)};
    net.channels.h_ap_rel = {path_gain(d_rel, cfg)};
    net.channels.g_rel_ap = {path_gain(d_rel, cfg)};
    net.channels.g_src_rel = {{path_gain(d_sr, cfg)}};
    return net;
}

}  // namespace

TEST_CASE("assignment_to_links shapes and aggregation") {
    Rng rng(3);
    auto net = test::random_network(4, 2, rng);
    CHECK(assignment_to_links(net, {0, 0, 0, 0}).links.size() == 4);
    auto via1 = assignment_to_links(net, {1, 1, 1, 1});
    REQUIRE(via1.links.size() == 5);
    CHECK(via1.links[4].demand == doctest::Approx(200.0));
    CHECK(via1.links[4].g_ul == net.channels.g_rel_ap[0]);
    auto mixed = assignment_to_links(net, {1, 2, 0, 2});
    REQUIRE(mixed.links.size() == 6);
    CHECK(mixed.links[4].demand == doctest::Approx(50.0));   // relay 1
    CHECK(mixed.links[5].demand == doctest::Approx(100.0));  // relay 2
    CHECK_THROWS_AS(assignment_to_links(net, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(assignment_to_links(net, {0, 0, 0, 3}), std::invalid_argument);
}

TEST_CASE("zero-demand source leaves its relay link parked") {
    Rng rng(5);
    auto net = test::random_network(2, 1, rng);
    net.params.demands_bits[0] = 0.0;
    auto s = solve_assignment(net, {1, 0});
    CHECK(s.tau_rel[0] == 0.0);
    CHECK(s.tau_src[0] == 0.0);
    check_full_schedule(s, net);
}

TEST_CASE("solve_assignment single source no relay equals the closed form") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        auto net = test::random_network(1, 0, rng);
        SourceLink l;
        l.h_dl = net.channels.h_ap_src[0];
        l.g_ul = net.channels.g_src_ap[0];
        l.demand = net.params.demands_bits[0];
        auto s = solve_assignment(net, {0});
        CHECK(s.total ==
              doctest::Approx(optimal_single(l, net.params.max_ul_power).total()).epsilon(1e-9));
        check_full_schedule(s, net);
    }
}

TEST_CASE("identical relays make the total permutation invariant") {
    Rng rng(11);
    auto net = test::random_network(3, 2, rng);
    // clone relay 0 into relay 1
    net.channels.h_ap_rel[1] = net.channels.h_ap_rel[0];
    net.channels.g_rel_ap[1] = net.channels.g_rel_ap[0];
    for (int i = 0; i < 3; ++i) net.channels.g_src_rel[i][1] = net.channels.g_src_rel[i][0];
    const double a = solve_assignment(net, {1, 2, 0}).total;
    const double b = solve_assignment(net, {2, 1, 0}).total;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("bba matches the enumeration oracle") {
    Rng rng(13);
    std::uniform_int_distribution<int> pick_n(2, 4), pick_k(1, 2);
    for (int rep = 0; rep < 25; ++rep) {
        auto net = test::random_network(pick_n(rng), pick_k(rng), rng);
        BBDiagnostics diag;
        auto s = bba(net, &diag);
        const double best = enumerate_best(net);
        CHECK(s.total == doctest::Approx(best).epsilon(1e-6));
        check_full_schedule(s, net);
        CHECK(s.nodes_expanded >= 1);
        for (const auto& node : diag.expanded) {
            CHECK(node.lower_bound >= node.parent_bound * (1.0 - 1e-5));
            if (node.depth == 0) CHECK(node.lower_bound <= best * (1.0 + 1e-6));
        }
    }
}

TEST_CASE("bba with no relays returns the direct schedule without branching") {
    Rng rng(17);
    auto net = test::random_network(4, 0, rng);
    auto s = bba(net);
    CHECK(s.assignment == RelayAssignment(4, 0));
    CHECK(s.nodes_expanded == 0);
    CHECK(s.total == doctest::Approx(powmu(assignment_to_links(net, s.assignment)).total));
}

TEST_CASE("heuristic ordering chain on random ensembles") {
    Rng rng(19);
    for (int rep = 0; rep < 20; ++rep) {
        auto net = test::random_network(4, 2, rng);
        const double opt = bba(net).total;
        const double v_obh = obh(net).total;
        const double v_rph = rph(net).total;
        const double v_rstma = rstma(net).total;
        const double v_or = solve_assignment(net, or_criterion(net)).total;
        const double v_htc = htc_baseline(net).total;
        CHECK(opt <= v_obh * (1.0 + 1e-9));
        CHECK(opt <= v_rph * (1.0 + 1e-9));
        CHECK(opt <= v_rstma * (1.0 + 1e-9));
        CHECK(v_rstma <= v_or * (1.0 + 1e-9));
        CHECK(v_or <= v_htc * (1.0 + 1e-9));
    }
}

TEST_CASE("obh solve budget") {
    Rng rng(23);
    for (int n : {1, 2, 3, 5}) {
        auto net = test::random_network(n, 2, rng);
        auto s = obh(net);
        CHECK(s.relax_solves <= std::max(1, n - 1));
        CHECK_FALSE(s.fallback);
        check_full_schedule(s, net);
    }
}

TEST_CASE("rph is a single-relaxation rounding") {
    Rng rng(29);
    auto net = test::random_network(5, 2, rng);
    auto s = rph(net);
    CHECK(s.relax_solves == 1);
    check_full_schedule(s, net);
}

TEST_CASE("or_criterion dominance, direct fallback, scale invariance") {
    Rng rng(31);
    auto net = test::random_network(3, 2, rng);
    // relay 1 dominating both products for every source
    for (int i = 0; i < 3; ++i) net.channels.g_src_rel[i][0] = 1.0;
    net.channels.g_rel_ap[0] = 1.0;
    net.channels.h_ap_rel[0] = 1.0;
    CHECK(or_criterion(net) == RelayAssignment(3, 1));

    // direct product exceeding every bottleneck product
    auto net2 = test::random_network(2, 2, rng);
    for (int i = 0; i < 2; ++i) net2.channels.g_src_ap[i] = 1.0;
    CHECK(or_criterion(net2) == RelayAssignment(2, 0));

    // positive scaling leaves the argmax unchanged
    auto net3 = test::random_network(4, 2, rng);
    auto base = or_criterion(net3);
    auto scaled = net3;
    for (auto& v : scaled.channels.h_ap_src) v *= 7.5;
    for (auto& v : scaled.channels.h_ap_rel) v *= 7.5;
    for (auto& v : scaled.channels.g_src_ap) v *= 7.5;
    for (auto& v : scaled.channels.g_rel_ap) v *= 7.5;
    for (auto& r : scaled.channels.g_src_rel)
        for (auto& v : r) v *= 7.5;
    CHECK(or_criterion(scaled) == base);
}

TEST_CASE("relay benefit region in the three-node layout") {
    CHECK(relay_benefit(three_node(2.0), 0, 1));
    CHECK(relay_benefit(three_node(0.6), 0, 1));
    CHECK(relay_benefit(three_node(3.4), 0, 1));
    CHECK_FALSE(relay_benefit(three_node(-2.0), 0, 1));
    CHECK_FALSE(relay_benefit(three_node(0.5), 0, 1));
    CHECK_FALSE(relay_benefit(three_node(3.5), 0, 1));
    CHECK_FALSE(relay_benefit(three_node(5.0), 0, 1));
    CHECK_THROWS_AS(relay_benefit(three_node(2.0), 0, 2), std::invalid_argument);

    // vanishing direct link always favors the relay
    auto net = three_node(2.0);
    net.channels.g_src_ap[0] = 1e-30;
    CHECK(relay_benefit(net, 0, 1));
}

TEST_CASE("rstma starts at the criterion assignment and only improves") {
    Rng rng(37);
    for (int rep = 0; rep < 20; ++rep) {
        auto net = test::random_network(5, 2, rng);
        const double init = solve_assignment(net, or_criterion(net)).total;
        auto s = rstma(net);
        CHECK(s.total <= init * (1.0 + 1e-12));
        check_full_schedule(s, net);
    }
    auto single = test::random_network(1, 2, rng);
    auto s = rstma(single);
    CHECK(s.assignment == or_criterion(single));
    CHECK(s.total ==
          doctest::Approx(solve_assignment(single, or_criterion(single)).total).epsilon(1e-12));
}

TEST_CASE("htc template delivers every demand") {
    Rng rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        auto net = test::random_network(5, 2, rng);
        auto s = htc_baseline(net);
        REQUIRE(s.feasible);
        const auto& p = net.params;
        const double slot = (1.0 - 0.8) * s.total / (2.0 * 5);
        CHECK(s.tau0 == doctest::Approx(0.8 * s.total).epsilon(1e-12));
        for (int i = 0; i < 5; ++i) {
            CHECK(s.tau_src[i] == doctest::Approx(slot).epsilon(1e-12));
            CHECK(s.p_src[i] <= p.max_ul_power * (1.0 + 1e-9));
            const int j = s.assignment[i];
            const double g = j == 0 ? net.channels.g_src_ap[i] : net.channels.g_src_rel[i][j - 1];
            CHECK(slot * link_rate(s.p_src[i], g, p.bandwidth_w, p.noise_psd_n0) >=
                  p.demands_bits[i] * (1.0 - 1e-9));
        }
        CHECK(s.total >= bba(net).total * (1.0 - 1e-9));
    }
    CHECK_THROWS_AS(htc_baseline(test::random_network(2, 1, rng), 1.0), std::invalid_argument);
}

TEST_CASE("full schedule JSON round trip") {
    Rng rng(43);
    auto net = test::random_network(3, 2, rng);
    auto s = rstma(net);
    auto back = full_schedule_from_json(to_json(s));
    CHECK(back.assignment == s.assignment);
    CHECK(back.tau0 == s.tau0);
    CHECK(back.tau_src == s.tau_src);
    CHECK(back.tau_rel == s.tau_rel);
    CHECK(back.total == s.total);
    CHECK(back.feasible == s.feasible);
}
