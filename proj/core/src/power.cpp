#include <algorithm>
#include <cmath>

#include "aerocf/error.hpp"
#include "aerocf/optimizer.hpp"

namespace aerocf {

ConeProgram compile_power_feasibility(const LinkBudget& b, const std::vector<double>& uxnb_power_w, double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("target SINR must be finite and > 0");
    b.validate();
    const auto K = b.beta2.rows();
    const auto M = b.beta2.cols();
    if (static_cast<Eigen::Index>(uxnb_power_w.size()) != M)
        throw ConfigError("uxnb_power_w", "one entry per UxNB required");
    const Eigen::Index n = K * M;
    ConeProgram p(static_cast<std::size_t>(n));
    p.lo.setZero();

    const double Md = static_cast<double>(M);
    const double G2 = static_cast<double>(b.g_tx) * b.g_tx;
    const Eigen::VectorXd R = b.received_power();
    const double haps = std::sqrt(b.sigma2_haps * (R.sum() + Md * b.sigma2));
    const double inv_sqrt_eta = 1.0 / std::sqrt(eta);

    for (Eigen::Index k = 0; k < K; ++k) {
        SocConstraint c;
        c.A = Eigen::MatrixXd::Zero(M + 1, n);
        c.b = Eigen::VectorXd::Zero(M + 1);
        c.c = Eigen::VectorXd::Zero(n);
        const double lead = std::sqrt(Md * G2 * b.n_rx * b.s_rx * b.user_power[k]);
        for (Eigen::Index m = 0; m < M; ++m) {
            const double pm = std::sqrt(uxnb_power_w[static_cast<std::size_t>(m)]);
            c.A(m, k * M + m) = std::sqrt(Md * G2 * b.rho2[m] * (R[m] + b.sigma2)) * pm;
            c.c[k * M + m] = lead * std::sqrt(b.gamma2[m] * b.beta2(k, m)) * pm * inv_sqrt_eta;
        }
        c.b[M] = haps;
        // Bring every user cone to unit scale at the uniform point.
        double scale = std::hypot(c.A.rowwise().sum().norm() / std::sqrt(static_cast<double>(K)), haps);
        if (!(scale > 0.0)) scale = 1.0;
        c.A /= scale;
        c.b /= scale;
        c.c /= scale;
        p.soc.push_back(std::move(c));
    }
    for (Eigen::Index m = 0; m < M; ++m) {
        SocConstraint c;
        c.A = Eigen::MatrixXd::Zero(K, n);
        for (Eigen::Index k = 0; k < K; ++k) c.A(k, k * M + m) = 1.0;
        c.b = Eigen::VectorXd::Zero(K);
        c.c = Eigen::VectorXd::Zero(n);
        c.d = 1.0;
        p.soc.push_back(std::move(c));
    }
    return p;
}

PowerAllocation allocation_from_solution(const Eigen::VectorXd& x, const std::vector<double>& uxnb_power_w,
                                         std::size_t users) {
    const auto K = static_cast<Eigen::Index>(users);
    const auto M = static_cast<Eigen::Index>(uxnb_power_w.size());
    if (x.size() != K * M) throw ConfigError("x", "length must be K * M");
    PowerAllocation a{Eigen::MatrixXd(K, M)};
    for (Eigen::Index m = 0; m < M; ++m) {
        const double pm = uxnb_power_w[static_cast<std::size_t>(m)];
        double col = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            const double v = std::max(0.0, x[k * M + m]);
            a.p(k, m) = pm * v * v;
            col += a.p(k, m);
        }
        // Interior points sit strictly inside the budget; only rounding can push a column over.
        if (col > pm) a.p.col(m) *= pm / col;
    }
    return a;
}

namespace {

struct SinrParts {
    double num = 0.0;       // grows linearly with row k
    double own = 0.0;       // denominator part that scales with row k
    double shared = 0.0;    // denominator part independent of row k
};

SinrParts sinr_parts(const LinkBudget& b, const PowerAllocation& a, Eigen::Index k) {
    const auto M = b.beta2.cols();
    const double Md = static_cast<double>(M);
    const double G2 = static_cast<double>(b.g_tx) * b.g_tx;
    const Eigen::VectorXd R = b.received_power();
    SinrParts s;
    double coherent = 0.0;
    for (Eigen::Index m = 0; m < M; ++m) {
        coherent += std::sqrt(b.gamma2[m] * a.p(k, m) * b.beta2(k, m));
        s.own += b.rho2[m] * a.p(k, m) * (R[m] + b.sigma2);
    }
    s.num = Md * G2 * b.n_rx * b.s_rx * b.user_power[k] * coherent * coherent;
    s.own *= Md * G2;
    s.shared = b.sigma2_haps * (R.sum() + Md * b.sigma2);
    return s;
}

constexpr double kAcceptTol = 1e-6;

double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

}  // namespace

PowerAllocation equalize_sinr(const LinkBudget& b, const PowerAllocation& alloc) {
    const auto rep = closed_form_sinr(b, alloc);
    const double target = min_sinr(rep).value;
    PowerAllocation out = alloc;
    if (!(target > 0.0) || !std::isfinite(target)) return out;
    for (Eigen::Index k = 0; k < b.beta2.rows(); ++k) {
        if (!(rep.sinr[static_cast<std::size_t>(k)] > target)) continue;
        const auto s = sinr_parts(b, alloc, k);
        if (!(s.shared > 0.0)) continue;  // SINR does not depend on the row's scale
        const double lambda = target * s.shared / (s.num - target * s.own);
        if (lambda > 0.0 && lambda < 1.0) out.p.row(k) *= lambda;
    }
    return out;
}

BisectionResult bisection_power(const LinkBudget& b, const std::vector<double>& uxnb_power_w,
                                const BisectionOptions& opts) {
    b.validate();
    if (!(opts.epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
    if (!(opts.eta_min >= 0.0 && opts.eta_max > opts.eta_min)) throw ConfigError("eta_bracket", "need 0 <= min < max");
    const auto K = b.beta2.rows();
    const auto M = b.beta2.cols();
    for (Eigen::Index k = 0; k < K; ++k) {
        double path = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) path += b.gamma2[m] * b.beta2(k, m);
        if (!(path > 0.0)) throw ScenarioError("user " + std::to_string(k) + " has no signal path");
    }

    SolveOptions sopts = opts.solver;
    sopts.feasibility_only = true;
    const Eigen::VectorXd start =
        Eigen::VectorXd::Constant(K * M, 0.99 / std::sqrt(static_cast<double>(K)));

    BisectionResult res;
    Eigen::VectorXd best;
    double lo = opts.eta_min;
    double hi = opts.eta_max;
    for (;;) {
        bool hit_infeasible = false;
        while (hi - lo > opts.epsilon) {
            const double eta = 0.5 * (lo + hi);
            const auto prog = compile_power_feasibility(b, uxnb_power_w, eta);
            const auto sol = solve(prog, sopts, &start);
            ++res.iterations;
            bool ok = sol.has_point();
            if (ok) {
                // Homogeneous cones (no HAPS noise) admit X = 0; only a point that reaches eta counts.
                const auto a = allocation_from_solution(sol.x, uxnb_power_w, static_cast<std::size_t>(K));
                ok = min_sinr(closed_form_sinr(b, a)).value >= eta * (1.0 - kAcceptTol);
            }
            res.probes.push_back({eta, ok, sol.status});
            if (ok) {
                lo = eta;
                best = sol.x;
                res.found_feasible = true;
            } else {
                hi = eta;
                hit_infeasible = true;
            }
        }
        if (hit_infeasible || res.extensions >= opts.max_extensions || !res.found_feasible) break;
        // The optimum may lie above the bracket.
        ++res.extensions;
        const double width = hi - opts.eta_min;
        hi = opts.eta_min + 2.0 * width;
    }
    res.bracket_lo = lo;
    res.bracket_hi = hi;

    for (const auto& f : res.probes)
        for (const auto& g : res.probes)
            if (f.feasible && !g.feasible && g.eta < f.eta) res.monotone = false;

    if (!res.found_feasible) {
        PowerAllocation u{Eigen::MatrixXd(K, M)};
        for (Eigen::Index m = 0; m < M; ++m)
            u.p.col(m).setConstant(uxnb_power_w[static_cast<std::size_t>(m)] / static_cast<double>(K));
        res.alloc = u;
        res.eta = 0.0;
        return res;
    }
    res.eta = lo;
    res.alloc = allocation_from_solution(best, uxnb_power_w, static_cast<std::size_t>(K));
    res.spread_before_equalize = spread(closed_form_sinr(b, res.alloc).sinr);
    if (opts.equalize) res.alloc = equalize_sinr(b, res.alloc);
    return res;
}

BisectionResult bisection_power(const NetworkScenario& s, const LinkGains& gains, const BisectionOptions& opts) {
    return bisection_power(make_link_budget(s, gains), s.uxnb_power_w, opts);
}

}  // namespace aerocf
