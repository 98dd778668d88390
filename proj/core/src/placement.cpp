#include <algorithm>
#include <cmath>

#include "aerocf/error.hpp"
#include "aerocf/optimizer.hpp"

namespace aerocf {

ScaState make_sca_state(const NetworkScenario& s, const LinkGains& gains, const PowerAllocation& alloc) {
    const auto b = make_link_budget(s, gains);
    alloc.validate(s.num_users(), s.num_uxnbs());
    const auto K = static_cast<Eigen::Index>(s.num_users());
    const auto M = static_cast<Eigen::Index>(s.num_uxnbs());
    ScaState st;
    for (const auto& u : s.uxnbs) st.positions.push_back({u.x, u.y});
    st.beta_lin = gains.beta2.cwiseSqrt();
    st.dist_lin.resize(K, M);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index m = 0; m < M; ++m)
            st.dist_lin(k, m) = access_geometry(s, static_cast<std::size_t>(k), static_cast<std::size_t>(m)).distance_m;
    st.gamma = b.gamma2.cwiseSqrt();
    st.rho = b.rho2.cwiseSqrt();

    const double Md = static_cast<double>(M);
    const double G2 = static_cast<double>(b.g_tx) * b.g_tx;
    const Eigen::VectorXd R = b.received_power();
    st.t_lin.resize(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        double own = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) own += b.rho2[m] * alloc.p(k, m) * (R[m] + b.sigma2);
        st.t_lin[k] = std::sqrt(Md * G2 * own + b.sigma2_haps * (R.sum() + Md * b.sigma2));
    }
    st.eta_lin = min_sinr(closed_form_sinr(b, alloc)).value;
    if (!(st.eta_lin > 0.0) || !std::isfinite(st.eta_lin))
        throw ScenarioError("placement needs a finite positive minimum SINR at the linearization point");
    if (!(st.t_lin.minCoeff() > 0.0) || !(st.beta_lin.minCoeff() > 0.0))
        throw DomainError("linearization point must be strictly positive");
    st.zeta0 = std::pow(st.eta_lin, 0.25);
    st.length_scale = std::max(s.area.x_max - s.area.x_min, s.area.y_max - s.area.y_min);
    return st;
}

ConeProgram compile_placement_step(const NetworkScenario& s, const PowerAllocation& alloc, const ScaState& st) {
    const std::size_t K = s.num_users(), M = s.num_uxnbs();
    const PlacementLayout lay{K, M};
    const auto n = static_cast<Eigen::Index>(lay.size());
    const auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
    const double L = st.length_scale;
    const double Md = static_cast<double>(M);
    const double G2 = static_cast<double>(s.radio.g_tx()) * s.radio.g_tx();
    const double sigma2 = s.radio.sigma2_uxnb_w;
    const double sigma2_h = s.radio.sigma2_haps_w;

    ConeProgram p(lay.size());
    p.objective[idx(lay.zeta())] = 1.0;
    for (std::size_t m = 0; m < M; ++m) {
        p.lo[idx(lay.x(m))] = s.area.x_min / L;
        p.hi[idx(lay.x(m))] = s.area.x_max / L;
        p.lo[idx(lay.y(m))] = s.area.y_min / L;
        p.hi[idx(lay.y(m))] = s.area.y_max / L;
    }
    p.lo[idx(lay.zeta())] = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        p.lo[idx(lay.t(k))] = 0.0;
        for (std::size_t m = 0; m < M; ++m) p.lo[idx(lay.beta(k, m))] = 0.0;
    }

    // Distance cap on each gain slack, linearized 1/beta on the left.
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t m = 0; m < M; ++m) {
            const double d = st.dist_lin(idx(k), idx(m));
            SocConstraint c;
            c.A = Eigen::MatrixXd::Zero(3, n);
            c.A(0, idx(lay.x(m))) = L / d;
            c.A(1, idx(lay.y(m))) = L / d;
            c.b = Eigen::Vector3d(-s.users[k].x / d, -s.users[k].y / d, s.uxnbs[m].z / d);
            c.c = Eigen::VectorXd::Zero(n);
            c.c[idx(lay.beta(k, m))] = -1.0;
            c.d = 2.0;
            p.soc.push_back(std::move(c));
        }
    }

    // t_k bounds the square root of the SINR denominator.
    for (std::size_t k = 0; k < K; ++k) {
        const double tl = st.t_lin[idx(k)];
        double fwd = 0.0;
        for (std::size_t m = 0; m < M; ++m) fwd += st.rho[idx(m)] * st.rho[idx(m)] * alloc.p(idx(k), idx(m));
        SocConstraint c;
        c.A = Eigen::MatrixXd::Zero(idx(K * M + 1), n);
        c.b = Eigen::VectorXd::Zero(idx(K * M + 1));
        for (std::size_t j = 0; j < K; ++j) {
            for (std::size_t m = 0; m < M; ++m) {
                const double r2 = st.rho[idx(m)] * st.rho[idx(m)];
                const double w = std::sqrt((Md * G2 * r2 * alloc.p(idx(k), idx(m)) + sigma2_h) * s.user_power_w[j]);
                c.A(idx(j * M + m), idx(lay.beta(j, m))) = w * st.beta_lin(idx(j), idx(m)) / tl;
            }
        }
        c.b[idx(K * M)] = std::sqrt(sigma2 * (Md * G2 * fwd + Md * sigma2_h)) / tl;
        c.c = Eigen::VectorXd::Zero(n);
        c.c[idx(lay.t(k))] = 1.0;
        p.soc.push_back(std::move(c));
    }

    // zeta^2 <= (2 - t_k) * sum_m a_km beta_km as a rotated cone.
    for (std::size_t k = 0; k < K; ++k) {
        const double lead = std::sqrt(Md * G2 * s.radio.n_rx() * s.radio.s_rx() * s.user_power_w[k]);
        const double denom = st.t_lin[idx(k)] * st.zeta0 * st.zeta0;
        SocConstraint c;
        c.A = Eigen::MatrixXd::Zero(2, n);
        c.b = Eigen::Vector2d(0.0, 2.0);
        c.c = Eigen::VectorXd::Zero(n);
        c.A(0, idx(lay.zeta())) = 2.0;
        c.A(1, idx(lay.t(k))) = -1.0;
        c.c[idx(lay.t(k))] = -1.0;
        for (std::size_t m = 0; m < M; ++m) {
            const double a = lead * st.gamma[idx(m)] * std::sqrt(alloc.p(idx(k), idx(m))) *
                             st.beta_lin(idx(k), idx(m)) / denom;
            c.A(1, idx(lay.beta(k, m))) = -a;
            c.c[idx(lay.beta(k, m))] = a;
        }
        c.d = 2.0;
        p.soc.push_back(std::move(c));
    }
    return p;
}

Eigen::VectorXd placement_start(const NetworkScenario& s, const ScaState& st) {
    const std::size_t K = s.num_users(), M = s.num_uxnbs();
    const PlacementLayout lay{K, M};
    Eigen::VectorXd x(static_cast<Eigen::Index>(lay.size()));
    for (std::size_t m = 0; m < M; ++m) {
        x[static_cast<Eigen::Index>(lay.x(m))] = st.positions[m].x / st.length_scale;
        x[static_cast<Eigen::Index>(lay.y(m))] = st.positions[m].y / st.length_scale;
    }
    x[static_cast<Eigen::Index>(lay.zeta())] = 0.9;
    for (std::size_t k = 0; k < K; ++k) {
        x[static_cast<Eigen::Index>(lay.t(k))] = 1.0;
        for (std::size_t m = 0; m < M; ++m) x[static_cast<Eigen::Index>(lay.beta(k, m))] = 0.95;
    }
    return x;
}

PlacementStep placement_step(const NetworkScenario& s, const LinkGains& gains, const PowerAllocation& alloc,
                             const SolveOptions& opts, const GainOverrides& overrides) {
    const auto st = make_sca_state(s, gains, alloc);
    const auto prog = compile_placement_step(s, alloc, st);
    const Eigen::VectorXd start = placement_start(s, st);
    SolveOptions o = opts;
    o.feasibility_only = false;
    const auto sol = solve(prog, o, &start);
    PlacementStep out;
    out.status = sol.status;
    out.solver_iterations = sol.iterations;
    if (!sol.has_point() && sol.status != SolveStatus::max_iter)
        throw SolverError("placement step: " + std::string(to_string(sol.status)));
    const PlacementLayout lay{s.num_users(), s.num_uxnbs()};
    for (std::size_t m = 0; m < s.num_uxnbs(); ++m) {
        const double x = std::clamp(sol.x[static_cast<Eigen::Index>(lay.x(m))] * st.length_scale, s.area.x_min, s.area.x_max);
        const double y = std::clamp(sol.x[static_cast<Eigen::Index>(lay.y(m))] * st.length_scale, s.area.y_min, s.area.y_max);
        out.positions.push_back({x, y});
    }
    const double z = st.zeta0 * sol.x[static_cast<Eigen::Index>(lay.zeta())];
    out.surrogate_min_sinr = z * z * z * z;
    const auto moved = s.with_uxnb_positions(out.positions);
    out.true_min_sinr = min_sinr(closed_form_sinr(moved, compute_link_gains(moved, overrides), alloc)).value;
    return out;
}

}  // namespace aerocf
