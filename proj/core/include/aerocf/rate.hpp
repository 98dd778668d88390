#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "aerocf/channel.hpp"
#include "aerocf/scenario.hpp"

namespace aerocf {

/// K x M per-user, per-UxNB forwarding powers in watts. The square-root
/// reparameterization T = sqrt(P) is what the power optimizer works with.
struct PowerAllocation {
    Eigen::MatrixXd p;

    Eigen::MatrixXd t() const { return p.cwiseSqrt(); }

    static PowerAllocation from_t(const Eigen::MatrixXd& t) { return {t.cwiseProduct(t)}; }
    /// Every UxNB splits its budget equally across all K users.
    static PowerAllocation uniform(const NetworkScenario& s);

    /// Largest (sum_k P_km - P_m) / P_m over UxNBs; <= 0 when the budget holds.
    double max_budget_violation(const std::vector<double>& uxnb_power_w) const;
    /// Throws ConfigError on negative entries or shape mismatch.
    void validate(std::size_t users, std::size_t uxnbs) const;
};

/// Everything the closed-form SINR depends on, detached from geometry.
/// Terrestrial and perfect-backhaul variants are expressed by choosing
/// G = S = 1, gamma = rho = 1, tau = 1 and sigma2_haps = 0.
struct LinkBudget {
    int n_rx = 1;     ///< N
    int g_tx = 1;     ///< G
    int s_rx = 1;     ///< S
    double sigma2 = 0.0;
    double sigma2_haps = 0.0;
    Eigen::VectorXd user_power;  ///< P_k, K
    Eigen::MatrixXd beta2;       ///< K x M
    Eigen::VectorXd gamma2;      ///< M
    Eigen::VectorXd rho2;        ///< M
    Eigen::VectorXd tau;         ///< M

    std::size_t num_users() const noexcept { return static_cast<std::size_t>(beta2.rows()); }
    std::size_t num_uxnbs() const noexcept { return static_cast<std::size_t>(beta2.cols()); }

    /// Per-UxNB received power from all users, sum_k' beta2_k'm P_k'.
    Eigen::VectorXd received_power() const;
    void validate() const;
};

LinkBudget make_link_budget(const NetworkScenario& s, const LinkGains& gains);

struct SinrTerms {
    double desired_power = 0.0;       ///< E[DS_k]^2
    double user_interference = 0.0;   ///< E|I_U|^2
    double forwarded_noise = 0.0;     ///< E|I_N|^2
    double reemission = 0.0;          ///< E|I_R|^2
    double haps_noise = 0.0;          ///< E|N_HAPS|^2

    double interference_plus_noise() const noexcept {
        return user_interference + forwarded_noise + reemission + haps_noise;
    }
};

struct SinrReport {
    std::string scheme = "aerial_cellfree";
    std::vector<double> sinr;   ///< linear
    std::vector<double> rate;   ///< bits/s/Hz
    std::vector<SinrTerms> terms;
    double f_norm2 = 0.0;       ///< second moment of the normalization factor

    std::size_t size() const noexcept { return sinr.size(); }
    std::string to_json() const;
};

/// Closed-form use-and-then-forget SINR of every user. `sinr` is evaluated as
/// a single expression; `terms` hold the per-impairment breakdown with the
/// normalization moment, whose ratio reproduces the same value.
SinrReport closed_form_sinr(const LinkBudget& budget, const PowerAllocation& alloc);
SinrReport closed_form_sinr(const NetworkScenario& s, const LinkGains& gains, const PowerAllocation& alloc);

/// SINR of user k only, single expression.
double closed_form_sinr_user(const LinkBudget& budget, const PowerAllocation& alloc, std::size_t k);

/// The same per-user SINR recombined from the term breakdown.
double sinr_from_terms(const SinrTerms& terms);

/// log2(1 + sinr). Throws DomainError for negative or NaN input.
double rate_from_sinr(double sinr);

struct MinSinr {
    double value = 0.0;
    std::size_t user = 0;
};

/// Minimum over users, ties broken toward the lowest index.
MinSinr min_sinr(const std::vector<double>& sinr);
MinSinr min_sinr(const SinrReport& report);

double to_db(double linear);

}  // namespace aerocf
