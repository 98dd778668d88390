// Acceptance suite: one PASS/FAIL line per criterion.
//   aerocf_acceptance [--criterion N]...
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aerocf/baselines.hpp"
#include "aerocf/experiment.hpp"
#include "aerocf/linkchain.hpp"
#include "aerocf/optimizer.hpp"
#include "aerocf/rate.hpp"
#include "aerocf/socp.hpp"
#include "oracles.hpp"

using namespace aerocf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// ---- 1 ----------------------------------------------------------------------

Outcome criterion_1() {
    Outcome o;
    std::mt19937_64 rng(20240101);
    const auto t0 = Clock::now();
    double worst_lib = 0.0, worst_oracle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int K = 1 + static_cast<int>(rng() % 8), M = 1 + static_cast<int>(rng() % 8);
        const auto b = oracle::random_budget(rng, K, M);
        const PowerAllocation a{oracle::random_powers(rng, K, M, 0.3162)};
        const auto r = closed_form_sinr(b, a);
        for (int k = 0; k < K; ++k) {
            const double direct = r.sinr[static_cast<std::size_t>(k)];
            const double recombined = sinr_from_terms(r.terms[static_cast<std::size_t>(k)]);
            worst_lib = std::max(worst_lib, std::abs(recombined / direct - 1.0));
            // independent reimplementations of both forms
            const double ref_direct = oracle::sinr_direct(b, a.p, k);
            const double ref_terms = oracle::sinr_terms(b, a.p, k).sinr();
            worst_oracle = std::max({worst_oracle, std::abs(direct / ref_direct - 1.0), std::abs(recombined / ref_terms - 1.0),
                                     std::abs(ref_terms / ref_direct - 1.0)});
        }
    }
    const double dt = seconds_since(t0);
    o.detail << "max rel err recombined vs direct " << worst_lib << ", vs oracle " << worst_oracle << ", " << dt
             << " s";
    o.require(worst_lib <= 1e-10, "library recombination");
    o.require(worst_oracle <= 1e-10, "oracle agreement");
    o.require(dt < 1.0, "runtime < 1 s");
    return o;
}

// ---- 2 ----------------------------------------------------------------------

ScenarioConfig micro_config() {
    ScenarioConfig c;
    c.num_users = 4;
    c.num_uxnbs = 4;
    c.radio.uxnb_rx = {4, 4};
    c.radio.uxnb_tx = {2, 2};
    c.radio.haps_rx = {8, 8};
    return c;
}

Outcome criterion_2() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto s = build_scenario(micro_config(), drop_seed(1, 0));
    const auto g = compute_link_gains(s, {.force_los = true});
    McOptions mo;
    mo.trials = 20000;
    mo.seed = 1;
    const auto r = estimate_empirical_sinr(s, g, PowerAllocation::uniform(s), mo);
    const double dt = seconds_since(t0);

    double worst_gap = 0.0, worst_ds = 0.0;
    std::printf("  user  closed_form_dB  empirical_dB  ci95_dB  gap_dB  corrected_dB  DS_emp/DS_cf\n");
    for (std::size_t k = 0; k < r.users.size(); ++k) {
        const auto& u = r.users[k];
        const double cf = to_db(r.closed_form.sinr[k]);
        const double emp = to_db(u.sinr);
        const double ds = u.terms.desired_power / r.closed_form.terms[k].desired_power;
        std::printf("  %4zu  %14.3f  %12.3f  %7.3f  %6.2f  %12.3f  %12.4f\n", k, cf, emp, u.ci95_db, emp - cf,
                    to_db(r.corrected_sinr[k]), ds);
        worst_gap = std::max(worst_gap, std::abs(emp - cf));
        worst_ds = std::max(worst_ds, std::abs(ds - 1.0));
    }
    std::printf("  normalization moment gap (empirical over printed F^2): %.3f dB\n", r.normalization_gap_db);
    o.detail << "max |empirical - closed form| " << worst_gap << " dB (gate 1.5), max desired-term error "
             << 100.0 * worst_ds << "% (gate 10%), normalization gap " << r.normalization_gap_db << " dB, " << dt
             << " s";
    o.require(worst_gap <= 1.5, "SINR within 1.5 dB");
    o.require(worst_ds <= 0.10, "desired term within 10%");
    o.require(dt < 120.0, "runtime < 2 min");
    return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome criterion_3() {
    Outcome o;
    const auto t0 = Clock::now();
    // HAPS-noise-limited (G^2 rho^2 P_11 well under the HAPS noise), one UxNB so the combining gain is exactly S
    ScenarioConfig c;
    c.num_users = 1;
    c.num_uxnbs = 1;
    c.radio.uxnb_rx = {4, 4};
    c.radio.uxnb_tx = {2, 2};
    c.radio.haps_rx = {8, 8};
    c.uxnb_power_dbm = 10.0;
    const auto s1 = build_scenario(c, drop_seed(3, 0));
    c.radio.haps_rx = {8, 16};
    const auto s2 = build_scenario(c, drop_seed(3, 0));
    McOptions mo;
    mo.trials = 20000;
    mo.seed = 5;

    const auto g1 = compute_link_gains(s1);
    const auto g2 = compute_link_gains(s2);
    const auto a = PowerAllocation::uniform(s1);
    const auto cf1 = closed_form_sinr(s1, g1, a), cf2 = closed_form_sinr(s2, g2, a);
    const auto m1 = estimate_empirical_sinr(s1, g1, a, mo);
    const auto m2 = estimate_empirical_sinr(s2, g2, a, mo);
    double worst_cf = 0.0, worst_emp_excess = 0.0;
    for (std::size_t k = 0; k < cf1.size(); ++k) {
        worst_cf = std::max(worst_cf, std::abs(cf2.sinr[k] / cf1.sinr[k] - 2.0));
        const double ratio_db = to_db(m2.users[k].sinr) - to_db(m1.users[k].sinr);
        const double ci = m1.users[k].ci95_db + m2.users[k].ci95_db;
        std::printf("  user %zu: closed-form ratio %.12f, empirical ratio %.4f dB (+-%.4f)\n", k,
                    cf2.sinr[k] / cf1.sinr[k], ratio_db, ci);
        worst_emp_excess = std::max(worst_emp_excess, std::abs(ratio_db - to_db(2.0)) - ci);
    }

    // tau = 1 on every backhaul link
    ScenarioConfig d = micro_config();
    const auto s3 = build_scenario(d, drop_seed(3, 1));
    const auto g3 = compute_link_gains(s3, {.force_unit_transmittance = true});
    const auto m3 = estimate_empirical_sinr(s3, g3, PowerAllocation::uniform(s3), mo);
    double reemission = 0.0;
    for (const auto& u : m3.users) reemission = std::max(reemission, std::abs(u.terms.reemission));
    const double dt = seconds_since(t0);

    o.detail << "closed-form S doubling max |ratio - 2| " << worst_cf << ", empirical excess over CI "
             << std::max(0.0, worst_emp_excess) << " dB, re-emission at tau=1 " << reemission << ", " << dt << " s";
    o.require(worst_cf <= 1e-12, "closed form doubles exactly");
    o.require(worst_emp_excess <= 0.0, "empirical doubles within CI");
    o.require(reemission == 0.0, "re-emission zero at tau = 1");
    o.require(dt < 120.0, "runtime < 2 min");
    return o;
}

// ---- 4 ----------------------------------------------------------------------

Outcome criterion_4() {
    Outcome o;
    ScenarioConfig c;  // K = M = 16
    double worst_t = 0.0;
    for (std::size_t drop = 0; drop < 3; ++drop) {
        const auto s = build_scenario(c, drop_seed(4, drop));
        const auto g = compute_link_gains(s);
        const auto t0 = Clock::now();
        const auto r = bisection_power(s, g);
        const double dt = seconds_since(t0);
        worst_t = std::max(worst_t, dt);
        const auto sinr = closed_form_sinr(s, g, r.alloc).sinr;
        const auto [lo, hi] = std::minmax_element(sinr.begin(), sinr.end());
        const double viol = r.alloc.max_budget_violation(s.uxnb_power_w);
        std::printf("  drop %zu: %zu solves, eta %.4f, max violation %.3e P_m, spread %.3e, %.2f s\n", drop,
                    r.iterations, r.eta, viol, *hi - *lo, dt);
        o.require(r.iterations == 18, "exactly 18 solves");
        o.require(viol <= 1e-8, "budget violation <= 1e-8 P_m");
        o.require(*hi - *lo <= 2.0 * 0.01, "spread <= 2 eps");
    }
    o.detail << "3 drops at K = M = 16, slowest " << worst_t << " s";
    o.require(worst_t < 30.0, "runtime < 30 s");
    return o;
}

// ---- 5 ----------------------------------------------------------------------

Outcome criterion_5() {
    Outcome o;
    std::mt19937_64 rng(55);
    const auto t0 = Clock::now();
    double worst_obj = 0.0, worst_res = -INFINITY;
    for (int i = 0; i < 20; ++i) {
        const int n = i < 4 ? 2 : 2 + static_cast<int>(rng() % 29);
        const auto k = oracle::random_known_socp(rng, n);
        const auto r = solve(k.p);
        if (!r.has_point()) {
            o.require(false, "instance " + std::to_string(i) + " status " + std::string(to_string(r.status)));
            continue;
        }
        double ref = k.value;
        if (n == 2) ref = std::max(ref, oracle::grid_max_2d(k.p));
        worst_obj = std::max(worst_obj, std::abs(r.objective_value - ref) / std::max(1.0, std::abs(ref)));
        worst_res = std::max(worst_res, check_point(k.p, r.x).worst());
    }
    const double dt = seconds_since(t0);
    o.detail << "max objective error " << worst_obj << ", worst residual " << worst_res << ", " << dt << " s";
    o.require(worst_obj <= 1e-5, "objective within 1e-5");
    o.require(worst_res <= 1e-8, "residuals <= 1e-8");
    o.require(dt < 60.0, "runtime < 1 min");
    return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome criterion_6() {
    Outcome o;
    ScenarioConfig c;
    c.num_users = 8;
    c.num_uxnbs = 8;
    const auto t0 = Clock::now();
    double worst_drop = 0.0;
    std::size_t most_iters = 0, unconverged = 0;
    for (std::size_t d = 0; d < 20; ++d) {
        const auto s = build_scenario(c, drop_seed(6, d));
        const auto tr = bcd_optimize(s);
        for (std::size_t i = 1; i < tr.entries.size(); ++i) {
            const double prev = tr.entries[i - 1].min_sinr;
            worst_drop = std::max(worst_drop, (prev - tr.entries[i].min_sinr) / prev);
        }
        most_iters = std::max(most_iters, tr.outer_iterations());
        if (!tr.converged) ++unconverged;
        std::printf("  drop %2zu: %zu outer, min SINR %.4f -> %.4f\n", d, tr.outer_iterations(),
                    tr.entries.front().min_sinr, tr.final_min_sinr());
    }
    const double dt = seconds_since(t0);
    o.detail << "largest relative decrease " << worst_drop << ", most outer iterations " << most_iters
             << ", unconverged " << unconverged << ", " << dt << " s";
    o.require(worst_drop <= 1e-6, "trace non-decreasing");
    o.require(unconverged == 0 && most_iters <= 15, "converged within 15");
    o.require(dt < 600.0, "runtime < 10 min");
    return o;
}

// ---- 7 ----------------------------------------------------------------------

ExperimentConfig trend_base(std::size_t drops) {
    ExperimentConfig c;
    c.drops = drops;
    c.seed = 7;
    c.optimize = OptimizeMode::power;
    return c;
}

double run_timed(const ExperimentConfig& c, ExperimentResult& out) {
    const auto t0 = Clock::now();
    out = run(c);
    return seconds_since(t0);
}

void print_medians(const ExperimentResult& r, const ExperimentConfig& c) {
    for (const auto& v : sweep_labels(c)) {
        std::printf("    %-12s", v.c_str());
        for (auto s : c.schemes) std::printf("  %s %.4f", std::string(to_string(s)).c_str(), r.median(v, s));
        std::printf("\n");
    }
}

bool all_ok(const ExperimentResult& r) {
    return std::all_of(r.rows.begin(), r.rows.end(), [](const ResultRow& x) { return x.ok; });
}

Outcome criterion_7() {
    Outcome o;
    const auto cf = Scheme::aerial_cellfree, cell = Scheme::aerial_cellular, terr = Scheme::terrestrial_cellfree;

    {  // P_m sweep
        auto c = trend_base(50);
        c.schemes = {cf, cell, terr};
        c.sweep = {SweepParam::p_m_dbm, {"15", "20", "25", "30", "35"}};
        ExperimentResult r;
        const double dt = run_timed(c, r);
        std::printf("  pm-sweep (%.0f s)\n", dt);
        print_medians(r, c);
        bool above = true;
        double tmin = INFINITY, tmax = -INFINITY, tsum = 0.0;
        for (const auto& v : c.sweep.values) {
            above = above && r.median(v, cf) > r.median(v, cell);
            const double t = r.median(v, terr);
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
            tsum += t;
        }
        const double var = (tmax - tmin) / (tsum / static_cast<double>(c.sweep.values.size()));
        o.detail << " pm-sweep: cf>cell " << above << ", terrestrial variation " << 100.0 * var << "%;";
        o.require(all_ok(r), "pm-sweep all drops ok");
        o.require(above, "pm-sweep cell-free above cellular");
        o.require(var < 0.01, "pm-sweep terrestrial flat");
        o.require(dt < 1800.0, "pm-sweep < 30 min");
    }
    {  // M sweep
        auto c = trend_base(50);
        c.schemes = {cf, cell};
        c.sweep = {SweepParam::M, {"4", "8", "16"}};
        ExperimentResult r;
        const double dt = run_timed(c, r);
        std::printf("  M-sweep (%.0f s)\n", dt);
        print_medians(r, c);
        bool nondecreasing = true, widening = true;
        for (std::size_t i = 1; i < c.sweep.values.size(); ++i) {
            const auto &a = c.sweep.values[i - 1], &b = c.sweep.values[i];
            nondecreasing = nondecreasing && r.median(b, cf) >= r.median(a, cf);
            widening = widening && (r.median(b, cf) - r.median(b, cell)) > (r.median(a, cf) - r.median(a, cell));
        }
        o.detail << " M-sweep: non-decreasing " << nondecreasing << ", widening " << widening << ";";
        o.require(all_ok(r), "M-sweep all drops ok");
        o.require(nondecreasing, "M-sweep cell-free non-decreasing in M");
        o.require(widening, "M-sweep advantage widening");
        o.require(dt < 1800.0, "M-sweep < 30 min");
    }
    {  // S sweep
        auto c = trend_base(50);
        c.schemes = {cf, cell, terr};
        c.sweep = {SweepParam::S, {"16", "100", "400"}};
        ExperimentResult r;
        const double dt = run_timed(c, r);
        std::printf("  S-sweep (%.0f s)\n", dt);
        print_medians(r, c);
        bool increasing = true;
        for (auto sch : {cf, cell})
            for (std::size_t i = 1; i < c.sweep.values.size(); ++i)
                increasing = increasing && r.median(c.sweep.values[i], sch) > r.median(c.sweep.values[i - 1], sch);
        const bool terr_wins = r.median("16", terr) > r.median("16", cell);
        o.detail << " S-sweep: increasing " << increasing << ", terrestrial > cellular at S=16 " << terr_wins << ";";
        o.require(all_ok(r), "S-sweep all drops ok");
        o.require(increasing, "S-sweep aerial increasing in S");
        o.require(terr_wins, "S-sweep terrestrial beats cellular at S=16");
        o.require(dt < 1800.0, "S-sweep < 30 min");
    }
    {  // environment sweep
        double total = 0.0;
        bool ordered = true, ok = true;
        std::printf("  env-sweep\n");
        for (const char* pm : {"15", "25", "35"}) {
            auto c = trend_base(50);
            c.schemes = {cf, cell};
            c.scenario.uxnb_power_dbm = std::stod(pm);
            c.sweep = {SweepParam::environment, {"suburban", "urban", "dense_urban"}};
            ExperimentResult r;
            total += run_timed(c, r);
            std::printf("   P_m = %s dBm\n", pm);
            print_medians(r, c);
            ok = ok && all_ok(r);
            for (auto sch : {cf, cell})
                ordered = ordered && r.median("suburban", sch) >= r.median("urban", sch) &&
                          r.median("urban", sch) >= r.median("dense_urban", sch);
        }
        std::printf("  env-sweep (%.0f s)\n", total);
        o.detail << " env-sweep: ordered " << ordered << ";";
        o.require(ok, "env-sweep all drops ok");
        o.require(ordered, "env-sweep suburban >= urban >= dense urban");
        o.require(total < 1800.0, "env-sweep < 30 min");
    }
    {  // joint vs placement
        auto c = trend_base(30);
        c.scenario.num_users = 8;
        c.scenario.num_uxnbs = 8;
        c.schemes = {cf};
        ExperimentResult joint, place;
        c.optimize = OptimizeMode::joint;
        double dt = run_timed(c, joint);
        c.optimize = OptimizeMode::placement;
        dt += run_timed(c, place);
        const double mj = joint.median("-", cf), mp = place.median("-", cf);
        std::printf("  joint-vs-placement (%.0f s): median min rate joint %.4f, placement with uniform power %.4f\n", dt, mj, mp);
        const double rel = std::abs(mp - mj) / mj;
        o.detail << " joint-vs-placement: relative gap " << 100.0 * rel << "%";
        o.require(all_ok(joint) && all_ok(place), "joint-vs-placement all drops ok");
        o.require(rel <= 0.05, "joint-vs-placement within 5%");
        o.require(dt < 1800.0, "joint-vs-placement < 30 min");
    }
    return o;
}

// ---- 8 ----------------------------------------------------------------------

bool probe(const LinkBudget& b, const std::vector<double>& pm, double eta) {
    SolveOptions so;
    so.feasibility_only = true;
    const auto prog = compile_power_feasibility(b, pm, eta);
    const auto r = solve(prog, so);
    if (!r.has_point()) return false;
    const auto a = allocation_from_solution(r.x, pm, b.num_users());
    return min_sinr(closed_form_sinr(b, a)).value >= eta * (1.0 - 1e-6);
}

Outcome criterion_8() {
    Outcome o;
    std::mt19937_64 rng(88);
    const auto t0 = Clock::now();
    std::size_t inversions = 0, probes = 0, feasible = 0;
    for (int i = 0; i < 50; ++i) {
        ScenarioConfig c;
        c.num_users = 1 + static_cast<int>(rng() % 6);
        c.num_uxnbs = 1 + static_cast<int>(rng() % 6);
        c.uxnb_power_dbm = 15.0 + 20.0 * std::uniform_real_distribution<>(0.0, 1.0)(rng);
        const auto s = build_scenario(c, rng());
        const auto b = make_link_budget(s, compute_link_gains(s));
        // upper end: the best any single user could get with every UxNB at full power for it alone
        double cap = 0.0;
        for (std::size_t k = 0; k < b.num_users(); ++k) {
            PowerAllocation solo{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(b.num_users()),
                                                     static_cast<Eigen::Index>(b.num_uxnbs()))};
            for (std::size_t m = 0; m < b.num_uxnbs(); ++m)
                solo.p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = s.uxnb_power_w[m];
            cap = std::max(cap, closed_form_sinr_user(b, solo, k));
        }
        std::vector<std::pair<double, bool>> samples;
        for (int j = 1; j <= 16; ++j) {
            const double eta = cap * 1.2 * j / 16.0 * std::uniform_real_distribution<>(0.9, 1.0)(rng);
            samples.push_back({eta, probe(b, s.uxnb_power_w, eta)});
            ++probes;
            if (samples.back().second) ++feasible;
        }
        for (const auto& f : samples)
            for (const auto& q : samples)
                if (f.second && !q.second && f.first > q.first) ++inversions;
    }
    const double dt = seconds_since(t0);
    o.detail << probes << " feasibility probes over 50 instances (" << feasible << " feasible), " << inversions << " inversions, " << dt << " s";
    o.require(inversions == 0, "no eta-inversion");
    o.require(feasible > 0 && feasible < probes, "probes straddle the optimum");
    o.require(dt < 300.0, "runtime < 5 min");
    return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"closed-form recombination", criterion_1},
    {"Monte Carlo vs closed form (pure LoS)", criterion_2},
    {"Monte Carlo structural laws", criterion_3},
    {"bisection power allocation", criterion_4},
    {"SOCP solver vs oracle", criterion_5},
    {"BCD monotonicity", criterion_6},
    {"qualitative trends", criterion_7},
    {"quasi-concavity sampling", criterion_8},
};

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            which.push_back(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: aerocf_acceptance [--criterion N]...\n";
            return 2;
        }
    }
    if (which.empty())
        for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) which.push_back(i);

    int failed = 0;
    for (int n : which) {
        if (n < 1 || n > static_cast<int>(kCriteria.size())) {
            std::cerr << "no criterion " << n << '\n';
            return 2;
        }
        const auto& [name, fn] = kCriteria[static_cast<std::size_t>(n - 1)];
        std::fflush(stdout);
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::fflush(stdout);
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << name << "):" << o.detail.str()
                  << std::endl;
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
