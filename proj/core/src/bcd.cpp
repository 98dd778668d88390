#include <cmath>
#include <sstream>

#include "aerocf/error.hpp"
#include "aerocf/optimizer.hpp"
#include "json.hpp"

namespace aerocf {

std::string_view to_string(OptimizeMode m) {
    switch (m) {
        case OptimizeMode::none: return "none";
        case OptimizeMode::power: return "power";
        case OptimizeMode::placement: return "placement";
        case OptimizeMode::joint: return "joint";
    }
    return "none";
}

OptimizeMode optimize_mode_from_string(std::string_view name) {
    if (name == "none") return OptimizeMode::none;
    if (name == "power") return OptimizeMode::power;
    if (name == "placement") return OptimizeMode::placement;
    if (name == "joint") return OptimizeMode::joint;
    throw ConfigError("optimize", "unknown mode '" + std::string(name) + "'");
}

std::size_t OptimizationTrace::bisection_iterations() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.bisection_iters;
    return n;
}

namespace {

double true_min(const NetworkScenario& s, const LinkGains& g, const PowerAllocation& a) {
    return min_sinr(closed_form_sinr(s, g, a)).value;
}

std::vector<Vec2> horizontal(const NetworkScenario& s) {
    std::vector<Vec2> out;
    for (const auto& u : s.uxnbs) out.push_back({u.x, u.y});
    return out;
}

}  // namespace

OptimizationTrace bcd_optimize(const NetworkScenario& s0, const BcdOptions& opts) {
    s0.validate();
    if (opts.max_outer < 1) throw ConfigError("max_outer", "must be >= 1");
    NetworkScenario cur = s0;
    LinkGains gains = compute_link_gains(cur, opts.overrides);
    PowerAllocation alloc = PowerAllocation::uniform(cur);
    double value = true_min(cur, gains, alloc);

    OptimizationTrace tr;
    TraceEntry first;
    first.min_sinr = value;
    first.min_rate = rate_from_sinr(value);
    first.alloc = alloc;
    first.positions = horizontal(cur);
    tr.entries.push_back(first);

    const bool place = opts.mode == OptimizeMode::placement || opts.mode == OptimizeMode::joint;
    const bool power = opts.mode == OptimizeMode::power || opts.mode == OptimizeMode::joint;
    const std::size_t rounds = opts.mode == OptimizeMode::none ? 0 : (place ? opts.max_outer : 1);

    for (std::size_t it = 1; it <= rounds; ++it) {
        TraceEntry e;
        e.iteration = it;
        const double before = value;
        try {
            if (place) {
                const auto step = placement_step(cur, gains, alloc, opts.placement_solver, opts.overrides);
                e.surrogate_min_sinr = step.surrogate_min_sinr;
                e.sca_status = std::string(to_string(step.status));
                // Accept the move, or the largest halving of it, that does not lose true objective.
                const auto old = horizontal(cur);
                double alpha = 1.0;
                for (int bt = 0; bt <= opts.max_backtracks; ++bt, alpha *= 0.5) {
                    std::vector<Vec2> pos(old.size());
                    for (std::size_t m = 0; m < old.size(); ++m) {
                        pos[m].x = old[m].x + alpha * (step.positions[m].x - old[m].x);
                        pos[m].y = old[m].y + alpha * (step.positions[m].y - old[m].y);
                    }
                    auto moved = cur.with_uxnb_positions(pos);
                    auto g = compute_link_gains(moved, opts.overrides);
                    const double v = true_min(moved, g, alloc);
                    if (bt == 0) e.placement_min_sinr = v;
                    if (v >= value) {
                        cur = std::move(moved);
                        gains = std::move(g);
                        value = v;
                        e.step_scale = alpha;
                        break;
                    }
                }
            }
            if (power) {
                const auto bis = bisection_power(cur, gains, opts.bisection);
                e.bisection_iters = bis.iterations;
                const double v = true_min(cur, gains, bis.alloc);
                if (v >= value) {
                    alloc = bis.alloc;
                    value = v;
                }
            }
        } catch (const SolverError& ex) {
            throw SolverError(ex.what(), it);
        }
        e.min_sinr = value;
        e.min_rate = rate_from_sinr(value);
        e.alloc = alloc;
        e.positions = horizontal(cur);
        tr.entries.push_back(std::move(e));
        if (!place || (value - before) <= opts.tol * std::abs(before)) {
            tr.converged = true;
            break;
        }
    }
    if (rounds == 0) tr.converged = true;
    tr.final_scenario = cur;
    tr.final_alloc = alloc;
    return tr;
}

std::string OptimizationTrace::to_json() const {
    nlohmann::json j;
    j["converged"] = converged;
    j["outer_iterations"] = outer_iterations();
    j["iterations"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json pos = nlohmann::json::array();
        for (const auto& p : e.positions) pos.push_back({p.x, p.y});
        nlohmann::json p = nlohmann::json::array();
        for (Eigen::Index k = 0; k < e.alloc.p.rows(); ++k) {
            std::vector<double> row(static_cast<std::size_t>(e.alloc.p.cols()));
            for (Eigen::Index m = 0; m < e.alloc.p.cols(); ++m) row[static_cast<std::size_t>(m)] = e.alloc.p(k, m);
            p.push_back(row);
        }
        j["iterations"].push_back({{"iteration", e.iteration},
                                   {"min_sinr", e.min_sinr},
                                   {"min_sinr_db", to_db(e.min_sinr)},
                                   {"min_rate_bps_hz", e.min_rate},
                                   {"bisection_iters", e.bisection_iters},
                                   {"surrogate_min_sinr", e.surrogate_min_sinr},
                                   {"placement_min_sinr", e.placement_min_sinr},
                                   {"step_scale", e.step_scale},
                                   {"sca_status", e.sca_status},
                                   {"positions", pos},
                                   {"power_w", p}});
    }
    return j.dump(2);
}

std::string OptimizationTrace::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,min_sinr,min_rate,bisection_iters\n";
    for (const auto& e : entries)
        os << e.iteration << ',' << e.min_sinr << ',' << e.min_rate << ',' << e.bisection_iters << '\n';
    return os.str();
}

}  // namespace aerocf
