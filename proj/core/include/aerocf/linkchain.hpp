#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aerocf/channel.hpp"
#include "aerocf/rate.hpp"
#include "aerocf/scenario.hpp"

namespace aerocf {

enum class SymbolModel {
    unit_modulus,  ///< s = exp(j phi), phi uniform
    gaussian,      ///< s ~ CN(0, 1)
};

struct McOptions {
    std::size_t trials = 20000;
    std::uint64_t seed = 1;
    SymbolModel symbols = SymbolModel::unit_modulus;
    std::size_t batches = 20;   ///< batch means for the confidence interval
    unsigned workers = 1;       ///< results do not depend on this

    void validate() const;
};

/// Use-and-then-forget estimate for one user, plus the per-impairment powers
/// obtained by splitting each trial's output at its fixed normalization factors.
struct EmpiricalSinr {
    std::complex<double> alpha;   ///< E[y s*]
    double total_power = 0.0;     ///< E|y|^2
    double sinr = 0.0;            ///< +inf when nothing but the desired term is left
    double ci95 = 0.0;            ///< half-width on sinr, batch means
    double ci95_db = 0.0;         ///< half-width on sinr in dB
    std::size_t trials = 0;
    SinrTerms terms;
};

struct McReport {
    std::vector<EmpiricalSinr> users;
    SinrReport closed_form;
    Eigen::MatrixXd norm_moment;          ///< E|y^COMB_km|^2, K x M
    std::vector<double> corrected_sinr;   ///< closed form with norm_moment in place of f_norm2
    double normalization_gap_db = 0.0;    ///< mean norm_moment over f_norm2
    std::size_t trials = 0;
    std::size_t discarded = 0;
    std::uint64_t seed = 0;

    std::string to_json() const;
};

/// Runs the UxNB match-filter / normalize / forward and HAPS combine chain on
/// sampled channels and noise. Deterministic for a fixed seed, whatever `workers` is.
McReport estimate_empirical_sinr(const NetworkScenario& s, const LinkGains& gains,
                                 const PowerAllocation& alloc, const McOptions& opts);

/// The closed-form terms with a per-(k, m) normalization moment substituted for
/// the single network-wide one.
std::vector<double> corrected_closed_form_sinr(const LinkBudget& budget, const PowerAllocation& alloc,
                                               const Eigen::MatrixXd& norm_moment);

}  // namespace aerocf
