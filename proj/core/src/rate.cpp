#include "aerocf/rate.hpp"

#include <cmath>
#include <limits>

#include "aerocf/error.hpp"
#include "json.hpp"

namespace aerocf {

PowerAllocation PowerAllocation::uniform(const NetworkScenario& s) {
    const auto K = static_cast<Eigen::Index>(s.num_users());
    const auto M = static_cast<Eigen::Index>(s.num_uxnbs());
    PowerAllocation a{Eigen::MatrixXd(K, M)};
    for (Eigen::Index m = 0; m < M; ++m)
        a.p.col(m).setConstant(s.uxnb_power_w[static_cast<std::size_t>(m)] / static_cast<double>(K));
    return a;
}

double PowerAllocation::max_budget_violation(const std::vector<double>& uxnb_power_w) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < p.cols(); ++m) {
        const double budget = uxnb_power_w[static_cast<std::size_t>(m)];
        worst = std::max(worst, (p.col(m).sum() - budget) / budget);
    }
    return worst;
}

void PowerAllocation::validate(std::size_t users, std::size_t uxnbs) const {
    if (static_cast<std::size_t>(p.rows()) != users || static_cast<std::size_t>(p.cols()) != uxnbs)
        throw ConfigError("power_allocation", "shape must be K x M");
    if (!p.allFinite() || (p.array() < 0.0).any())
        throw ConfigError("power_allocation", "entries must be finite and >= 0");
}

Eigen::VectorXd LinkBudget::received_power() const { return beta2.transpose() * user_power; }

void LinkBudget::validate() const {
    const auto K = beta2.rows();
    const auto M = beta2.cols();
    if (K < 1 || M < 1) throw ConfigError("link_budget", "empty gain matrix");
    if (user_power.size() != K) throw ConfigError("link_budget.user_power", "size must be K");
    if (gamma2.size() != M || rho2.size() != M || tau.size() != M)
        throw ConfigError("link_budget.backhaul", "size must be M");
    if (n_rx < 1 || g_tx < 1 || s_rx < 1) throw ConfigError("link_budget.antennas", "must be >= 1");
    if (!beta2.allFinite() || !gamma2.allFinite() || !rho2.allFinite() || !user_power.allFinite() ||
        !std::isfinite(sigma2) || !std::isfinite(sigma2_haps))
        throw DomainError("non-finite link budget input");
    if ((beta2.array() < 0.0).any() || (gamma2.array() < 0.0).any() || (rho2.array() < 0.0).any())
        throw DomainError("negative gain in link budget");
    if (sigma2 < 0.0 || sigma2_haps < 0.0) throw DomainError("negative noise power");
}

LinkBudget make_link_budget(const NetworkScenario& s, const LinkGains& gains) {
    const auto K = static_cast<Eigen::Index>(s.num_users());
    const auto M = static_cast<Eigen::Index>(s.num_uxnbs());
    LinkBudget b;
    b.n_rx = s.radio.n_rx();
    b.g_tx = s.radio.g_tx();
    b.s_rx = s.radio.s_rx();
    b.sigma2 = s.radio.sigma2_uxnb_w;
    b.sigma2_haps = s.radio.sigma2_haps_w;
    b.user_power = Eigen::Map<const Eigen::VectorXd>(s.user_power_w.data(), K);
    b.beta2 = gains.beta2;
    b.gamma2.resize(M);
    b.rho2.resize(M);
    b.tau.resize(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        const auto& bh = gains.backhaul[static_cast<std::size_t>(m)];
        b.gamma2[m] = bh.gamma2;
        b.rho2[m] = bh.rho2;
        b.tau[m] = bh.tau;
    }
    return b;
}

namespace {

struct Shared {
    double M, G2, N, S;
    Eigen::VectorXd received;  // R_m
    double received_total;     // sum_m R_m
};

Shared shared_quantities(const LinkBudget& b) {
    Shared sh;
    sh.M = static_cast<double>(b.num_uxnbs());
    sh.G2 = static_cast<double>(b.g_tx) * b.g_tx;
    sh.N = b.n_rx;
    sh.S = b.s_rx;
    sh.received = b.received_power();
    sh.received_total = sh.received.sum();
    return sh;
}

double sinr_user(const LinkBudget& b, const Shared& sh, const PowerAllocation& a, Eigen::Index k) {
    double coherent = 0.0;
    double forwarded = 0.0;
    for (Eigen::Index m = 0; m < b.beta2.cols(); ++m) {
        const double pkm = a.p(k, m);
        coherent += std::sqrt(b.gamma2[m] * pkm * b.beta2(k, m));
        forwarded += b.rho2[m] * pkm * (sh.received[m] + b.sigma2);
    }
    const double num = sh.M * sh.G2 * sh.N * sh.S * b.user_power[k] * coherent * coherent;
    const double den = sh.M * sh.G2 * forwarded + b.sigma2_haps * (sh.received_total + sh.M * b.sigma2);
    if (num == 0.0) return 0.0;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

}  // namespace

double closed_form_sinr_user(const LinkBudget& budget, const PowerAllocation& alloc, std::size_t k) {
    budget.validate();
    alloc.validate(budget.num_users(), budget.num_uxnbs());
    return sinr_user(budget, shared_quantities(budget), alloc, static_cast<Eigen::Index>(k));
}

double sinr_from_terms(const SinrTerms& t) {
    const double den = t.interference_plus_noise();
    if (t.desired_power == 0.0) return 0.0;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return t.desired_power / den;
}

SinrReport closed_form_sinr(const LinkBudget& b, const PowerAllocation& a) {
    b.validate();
    a.validate(b.num_users(), b.num_uxnbs());
    const Shared sh = shared_quantities(b);
    const auto K = b.beta2.rows();
    const auto M = b.beta2.cols();

    SinrReport r;
    r.f_norm2 = sh.N / (sh.M * sh.M) * (sh.received_total + sh.M * b.sigma2);
    r.sinr.resize(static_cast<std::size_t>(K));
    r.rate.resize(static_cast<std::size_t>(K));
    r.terms.resize(static_cast<std::size_t>(K));
    const double G = static_cast<double>(b.g_tx);
    for (Eigen::Index k = 0; k < K; ++k) {
        auto& t = r.terms[static_cast<std::size_t>(k)];
        double coherent = 0.0;
        double iu = 0.0;
        double in = 0.0;
        double ir = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) {
            const double pkm = a.p(k, m);
            coherent += std::sqrt(b.gamma2[m] * pkm * b.beta2(k, m));
            iu += b.gamma2[m] * pkm * sh.received[m];
            in += b.gamma2[m] * pkm * b.sigma2;
            ir += (1.0 - b.tau[m]) * b.rho2[m] * pkm * (sh.received[m] + b.sigma2);
        }
        if (r.f_norm2 > 0.0) {
            const double ds = G * sh.N * sh.S * std::sqrt(b.user_power[k]) * coherent;
            const double scale = sh.N * sh.S * sh.G2 / r.f_norm2;
            t.desired_power = ds * ds / r.f_norm2;
            t.user_interference = scale * iu;
            t.forwarded_noise = scale * in;
            t.reemission = scale * ir;
        }
        t.haps_noise = sh.M * sh.S * b.sigma2_haps;
        const double sinr = sinr_user(b, sh, a, k);
        r.sinr[static_cast<std::size_t>(k)] = sinr;
        r.rate[static_cast<std::size_t>(k)] = rate_from_sinr(sinr);
    }
    return r;
}

SinrReport closed_form_sinr(const NetworkScenario& s, const LinkGains& gains, const PowerAllocation& alloc) {
    return closed_form_sinr(make_link_budget(s, gains), alloc);
}

double rate_from_sinr(double sinr) {
    if (!(sinr >= 0.0)) throw DomainError("SINR must be >= 0");
    return std::log2(1.0 + sinr);
}

MinSinr min_sinr(const std::vector<double>& sinr) {
    MinSinr out{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < sinr.size(); ++k) {
        if (sinr[k] < out.value) out = {sinr[k], k};
    }
    return out;
}

MinSinr min_sinr(const SinrReport& report) { return min_sinr(report.sinr); }

double to_db(double linear) { return 10.0 * std::log10(linear); }

std::string SinrReport::to_json() const {
    nlohmann::json j;
    j["scheme"] = scheme;
    j["f_norm2"] = f_norm2;
    j["users"] = nlohmann::json::array();
    for (std::size_t k = 0; k < sinr.size(); ++k) {
        const auto& t = terms[k];
        j["users"].push_back({{"user", k},
                              {"sinr", sinr[k]},
                              {"sinr_db", to_db(sinr[k])},
                              {"rate_bps_hz", rate[k]},
                              {"desired_power", t.desired_power},
                              {"user_interference", t.user_interference},
                              {"forwarded_noise", t.forwarded_noise},
                              {"reemission", t.reemission},
                              {"haps_noise", t.haps_noise}});
    }
    const auto worst = min_sinr(sinr);
    j["min_sinr"] = worst.value;
    j["min_sinr_user"] = worst.user;
    return j.dump(2);
}

}  // namespace aerocf
