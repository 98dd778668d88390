#include <gtest/gtest.h>

#include <cmath>

#include "aerocf/baselines.hpp"
#include "aerocf/error.hpp"

using namespace aerocf;

namespace {

NetworkScenario small(int K, int M, std::uint64_t seed, ScenarioConfig c = {}) {
    c.num_users = K;
    c.num_uxnbs = M;
    return build_scenario(c, seed);
}

}  // namespace

TEST(Cellular, SingleUxnbMatchesCellFreeUniform) {
    const auto s = small(3, 1, 4);
    const auto g = compute_link_gains(s);
    const auto cell = aerial_cellular_sinr(s, g);
    const auto free = closed_form_sinr(s, g, PowerAllocation::uniform(s));
    EXPECT_EQ(cell.scheme, "aerial_cellular");
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(cell.sinr[k] / free.sinr[k], 1.0, 1e-12);
}

TEST(Cellular, SharingAUxnbCostsSinr) {
    auto s = small(1, 4, 9);
    const auto solo = aerial_cellular_sinr(s, compute_link_gains(s)).sinr[0];
    auto two = s;
    two.users.push_back({s.users[0].x + 1.0, s.users[0].y});
    two.user_power_w.push_back(s.user_power_w[0]);
    const auto g2 = compute_link_gains(two);
    const auto a = associate_max_gain(g2);
    ASSERT_EQ(a.serving[0], a.serving[1]);
    EXPECT_LT(aerial_cellular_sinr(two, g2).sinr[0], solo);
}

TEST(Cellular, BelowOptimizedCellFree) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto s = small(4, 4, seed);
        const auto g = compute_link_gains(s);
        const double cell = min_sinr(aerial_cellular_sinr(s, g)).value;
        const auto r = bisection_power(s, g);
        const double free = min_sinr(closed_form_sinr(s, g, r.alloc)).value;
        EXPECT_LT(cell, free) << seed;
    }
}

TEST(Cellular, AssociationTieBreakAndLoad) {
    LinkGains g;
    g.beta2.resize(4, 3);
    g.beta2 << 1.0, 2.0, 2.0,  //
        5.0, 1.0, 0.0,         //
        3.0, 3.0, 3.0,         //
        0.0, 0.0, 9.0;
    const auto a = associate_max_gain(g);
    EXPECT_EQ(a.serving, (std::vector<std::size_t>{1, 0, 0, 2}));
    EXPECT_EQ(a.load, (std::vector<std::size_t>{2, 1, 1}));
}

TEST(Cellular, AllocationSplitsAmongServedUsers) {
    const auto s = small(6, 4, 12);
    const auto g = compute_link_gains(s);
    const auto a = associate_max_gain(g);
    const auto p = cellular_allocation(s, a);
    std::size_t total = 0;
    for (auto l : a.load) total += l;
    EXPECT_EQ(total, 6u);
    for (int k = 0; k < 6; ++k)
        for (int m = 0; m < 4; ++m) {
            const auto mm = static_cast<std::size_t>(m);
            const double want = a.serving[static_cast<std::size_t>(k)] == mm
                                    ? s.uxnb_power_w[mm] / static_cast<double>(a.load[mm])
                                    : 0.0;
            EXPECT_DOUBLE_EQ(p.p(k, m), want);
        }
}

TEST(Terrestrial, PathLossExponent) {
    const auto s = small(3, 4, 7);
    const auto t = terrestrial_scenario(s);
    for (const auto& ap : t.uxnbs) EXPECT_DOUBLE_EQ(ap.z, 10.0);
    const auto g = terrestrial_gains(t);
    const double beta0 = reference_gain(s.radio.f_sub6_hz);
    for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 4; ++m) {
            const double d = access_geometry(t, k, m).distance_m;
            EXPECT_NEAR(g.beta2(k, m) / (beta0 / (d * d)), std::pow(d, -1.7), 1e-12 * std::pow(d, -1.7));
            EXPECT_EQ(g.p_los(k, m), 0.0);
        }
    // a 100 m link sits 100^-1.7 (34 dB) below free space
    auto one = s;
    one.users = {{0.0, 0.0}};
    one.user_power_w = {0.2};
    one = one.with_uxnb_positions({{std::sqrt(100.0 * 100.0 - 100.0), 0.0}, {900.0, 900.0}, {900.0, 0.0}, {0.0, 900.0}});
    const auto t1 = terrestrial_scenario(one);
    EXPECT_NEAR(access_geometry(t1, 0, 0).distance_m, 100.0, 1e-9);
    EXPECT_NEAR(terrestrial_gains(t1).beta2(0, 0) / (beta0 * 1e-4), std::pow(100.0, -1.7), 1e-12);
}

TEST(Terrestrial, BudgetIgnoresBackhaulArrays) {
    ScenarioConfig c;
    const auto a = small(3, 4, 2, c);
    c.radio.haps_rx = {5, 5};
    c.radio.uxnb_tx = {1, 2};
    const auto b = small(3, 4, 2, c);
    const auto ta = terrestrial_scenario(a), tb = terrestrial_scenario(b);
    const auto ra = terrestrial_cellfree_sinr(ta, terrestrial_gains(ta), PowerAllocation::uniform(ta));
    const auto rb = terrestrial_cellfree_sinr(tb, terrestrial_gains(tb), PowerAllocation::uniform(tb));
    EXPECT_EQ(ra.scheme, "terrestrial_cellfree");
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(ra.sinr[k] / rb.sinr[k], 1.0, 1e-12);
    const auto budget = terrestrial_budget(ta, terrestrial_gains(ta));
    EXPECT_EQ(budget.g_tx, 1);
    EXPECT_EQ(budget.s_rx, 1);
    EXPECT_EQ(budget.sigma2_haps, 0.0);
}

TEST(Terrestrial, FlatInApPower) {
    ScenarioConfig lo, hi;
    lo.uxnb_power_dbm = 10.0;
    hi.uxnb_power_dbm = 40.0;
    const auto a = terrestrial_scenario(small(4, 4, 3, lo));
    const auto b = terrestrial_scenario(small(4, 4, 3, hi));
    const auto ra = terrestrial_cellfree_sinr(a, terrestrial_gains(a), PowerAllocation::uniform(a));
    const auto rb = terrestrial_cellfree_sinr(b, terrestrial_gains(b), PowerAllocation::uniform(b));
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(ra.sinr[k] / rb.sinr[k], 1.0, 1e-9);
}

TEST(Terrestrial, PowerBisectionTerminates) {
    const auto t = terrestrial_scenario(small(4, 4, 5));
    const auto g = terrestrial_gains(t);
    const auto r = terrestrial_power(t, g);
    EXPECT_EQ(r.iterations, 18u);
    EXPECT_TRUE(r.found_feasible);
    const auto sinr = terrestrial_cellfree_sinr(t, g, r.alloc);
    EXPECT_GE(min_sinr(sinr).value,
              min_sinr(terrestrial_cellfree_sinr(t, g, PowerAllocation::uniform(t))).value * (1.0 - 1e-9));
}
