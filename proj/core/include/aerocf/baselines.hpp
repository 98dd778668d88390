#pragma once

#include <cstddef>
#include <vector>

#include "aerocf/channel.hpp"
#include "aerocf/optimizer.hpp"
#include "aerocf/rate.hpp"
#include "aerocf/scenario.hpp"

namespace aerocf {

struct Association {
    std::vector<std::size_t> serving;  ///< per user
    std::vector<std::size_t> load;     ///< per UxNB
};

/// Each user picks the UxNB with the largest beta2, lowest index on ties.
Association associate_max_gain(const LinkGains& gains);

/// Every UxNB splits its budget equally among the users it serves; zero elsewhere.
PowerAllocation cellular_allocation(const NetworkScenario& s, const Association& assoc);

/// Single-UxNB service with HAPS backhaul. Interference at the serving UxNB,
/// forwarded noise and HAPS noise are kept; only the serving link carries signal.
SinrReport aerial_cellular_sinr(const NetworkScenario& s, const LinkGains& gains);

// ---- terrestrial cell-free -----------------------------------------------

inline constexpr double kTerrestrialPathLossExponent = 3.7;

/// Same users and horizontal AP grid, APs lowered to `ap_height_m`.
NetworkScenario terrestrial_scenario(const NetworkScenario& s, double ap_height_m = 10.0);

/// Rayleigh access: p_los = 0, beta2 = beta0 * d^-3.7. Backhaul entries are
/// pass-through (rho2 = gamma2 = tau = 1).
LinkGains terrestrial_gains(const NetworkScenario& s);

/// Fibre-backhaul limit: G = S = 1, gamma = rho = tau = 1, sigma2_haps = 0.
LinkBudget terrestrial_budget(const NetworkScenario& s, const LinkGains& gains);

SinrReport terrestrial_cellfree_sinr(const NetworkScenario& s, const LinkGains& gains,
                                     const PowerAllocation& alloc);

/// Max-min power allocation for the terrestrial baseline (same bisection).
BisectionResult terrestrial_power(const NetworkScenario& s, const LinkGains& gains,
                                  const BisectionOptions& opts = {});

}  // namespace aerocf
