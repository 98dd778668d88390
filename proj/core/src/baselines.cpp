#include "aerocf/baselines.hpp"

#include <cmath>

#include "aerocf/error.hpp"

namespace aerocf {

Association associate_max_gain(const LinkGains& gains) {
    const auto K = gains.beta2.rows();
    const auto M = gains.beta2.cols();
    Association a;
    a.serving.resize(static_cast<std::size_t>(K));
    a.load.assign(static_cast<std::size_t>(M), 0);
    for (Eigen::Index k = 0; k < K; ++k) {
        Eigen::Index best = 0;
        for (Eigen::Index m = 1; m < M; ++m)
            if (gains.beta2(k, m) > gains.beta2(k, best)) best = m;
        a.serving[static_cast<std::size_t>(k)] = static_cast<std::size_t>(best);
        ++a.load[static_cast<std::size_t>(best)];
    }
    return a;
}

PowerAllocation cellular_allocation(const NetworkScenario& s, const Association& assoc) {
    const auto K = static_cast<Eigen::Index>(s.num_users());
    const auto M = static_cast<Eigen::Index>(s.num_uxnbs());
    if (assoc.serving.size() != s.num_users() || assoc.load.size() != s.num_uxnbs())
        throw ConfigError("association", "size mismatch");
    PowerAllocation a{Eigen::MatrixXd::Zero(K, M)};
    for (Eigen::Index k = 0; k < K; ++k) {
        const auto m = assoc.serving[static_cast<std::size_t>(k)];
        a.p(k, static_cast<Eigen::Index>(m)) = s.uxnb_power_w[m] / static_cast<double>(assoc.load[m]);
    }
    return a;
}

SinrReport aerial_cellular_sinr(const NetworkScenario& s, const LinkGains& gains) {
    const auto assoc = associate_max_gain(gains);
    auto rep = closed_form_sinr(s, gains, cellular_allocation(s, assoc));
    rep.scheme = "aerial_cellular";
    return rep;
}

NetworkScenario terrestrial_scenario(const NetworkScenario& s, double ap_height_m) {
    if (!(ap_height_m > 0.0)) throw ConfigError("terrestrial_ap_height_m", "must be > 0");
    NetworkScenario t = s;
    for (auto& u : t.uxnbs) u.z = ap_height_m;
    return t;
}

LinkGains terrestrial_gains(const NetworkScenario& s) {
    const auto K = static_cast<Eigen::Index>(s.num_users());
    const auto M = static_cast<Eigen::Index>(s.num_uxnbs());
    const double beta0 = reference_gain(s.radio.f_sub6_hz);
    LinkGains g;
    g.beta2.resize(K, M);
    g.p_los = Eigen::MatrixXd::Zero(K, M);
    g.eta = Eigen::MatrixXd::Ones(K, M);
    for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index m = 0; m < M; ++m) {
            const double d = access_geometry(s, static_cast<std::size_t>(k), static_cast<std::size_t>(m)).distance_m;
            if (d < 1.0) throw DomainError("access distance below the 1 m reference");
            g.beta2(k, m) = beta0 * std::pow(d, -kTerrestrialPathLossExponent);
        }
    }
    g.backhaul.assign(static_cast<std::size_t>(M), BackhaulGain{1.0, 1.0, 1.0, 0.0});
    return g;
}

LinkBudget terrestrial_budget(const NetworkScenario& s, const LinkGains& gains) {
    LinkBudget b = make_link_budget(s, gains);
    b.g_tx = 1;
    b.s_rx = 1;
    b.sigma2_haps = 0.0;
    b.gamma2.setOnes();
    b.rho2.setOnes();
    b.tau.setOnes();
    return b;
}

SinrReport terrestrial_cellfree_sinr(const NetworkScenario& s, const LinkGains& gains,
                                     const PowerAllocation& alloc) {
    auto rep = closed_form_sinr(terrestrial_budget(s, gains), alloc);
    rep.scheme = "terrestrial_cellfree";
    return rep;
}

BisectionResult terrestrial_power(const NetworkScenario& s, const LinkGains& gains, const BisectionOptions& opts) {
    return bisection_power(terrestrial_budget(s, gains), s.uxnb_power_w, opts);
}

}  // namespace aerocf
