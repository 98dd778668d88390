#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aerocf/linkchain.hpp"
#include "aerocf/optimizer.hpp"
#include "aerocf/scenario.hpp"

namespace aerocf {

enum class Scheme { aerial_cellfree, aerial_cellular, terrestrial_cellfree };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

enum class SweepParam { none, p_m_dbm, M, K, S, environment };

std::string_view to_string(SweepParam p);
SweepParam sweep_param_from_string(std::string_view name);

struct SweepSpec {
    SweepParam param = SweepParam::none;
    std::vector<std::string> values;  ///< numbers, or environment names
};

struct McConfig {
    bool enabled = false;
    std::size_t trials = 20000;
    std::size_t batches = 20;
    bool force_los = false;
    bool unit_transmittance = false;
    SymbolModel symbols = SymbolModel::unit_modulus;
};

struct ExperimentConfig {
    static constexpr int kSchemaVersion = 1;

    ScenarioConfig scenario;
    std::vector<Scheme> schemes{Scheme::aerial_cellfree};
    OptimizeMode optimize = OptimizeMode::joint;
    SweepSpec sweep;
    std::size_t drops = 100;
    std::uint64_t seed = 1;
    McConfig mc;
    std::size_t max_outer = 15;
    double bcd_tol = 1e-3;
    double eta_max = 1500.0;
    double epsilon = 0.01;
    unsigned workers = 1;
    bool timing = false;   ///< fill runtime_ms; off keeps output byte-stable

    void validate() const;
    std::string to_json() const;
    static ExperimentConfig from_json(std::string_view text);
};

/// One (sweep value, scheme, drop) outcome.
struct ResultRow {
    std::string sweep_param;
    std::string sweep_value;
    Scheme scheme = Scheme::aerial_cellfree;
    OptimizeMode optimize = OptimizeMode::none;
    std::size_t drop = 0;
    double min_sinr = 0.0;
    double min_rate = 0.0;
    std::size_t iters_outer = 0;
    std::size_t iters_bisection = 0;
    double runtime_ms = 0.0;
    std::uint64_t seed = 0;
    bool ok = true;
    bool solver_failure = false;
    std::string error;
};

struct SweepSummary {
    std::string sweep_value;
    Scheme scheme = Scheme::aerial_cellfree;
    double mean_min_rate = 0.0;
    double median_min_rate = 0.0;
    std::size_t drops_ok = 0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;   ///< ordered by sweep value, scheme, drop
    std::vector<SweepSummary> summary;

    bool any_solver_failure() const;
    /// Per-drop min rates for one sweep value and scheme, in drop order; failed drops skipped.
    std::vector<double> min_rates(std::string_view sweep_value, Scheme scheme) const;
    double median(std::string_view sweep_value, Scheme scheme) const;
    double mean(std::string_view sweep_value, Scheme scheme) const;
};

/// Sweep values of `config`, or a single "-" entry when nothing is swept.
std::vector<std::string> sweep_labels(const ExperimentConfig& config);

/// Scenario config with one sweep value applied.
ScenarioConfig apply_sweep(const ExperimentConfig& config, std::string_view value);

/// Seed of the user drop `drop`. Shared across sweep values and schemes.
std::uint64_t drop_seed(std::uint64_t root, std::size_t drop);

/// Evaluates one scheme on one drop with the configured optimization.
ResultRow evaluate_drop(const ExperimentConfig& config, std::string_view sweep_value, Scheme scheme,
                        std::size_t drop);

ExperimentResult run(const ExperimentConfig& config);

void write_csv(std::ostream& os, const ExperimentResult& result);

struct CdfRow {
    std::string sweep_value;
    Scheme scheme = Scheme::aerial_cellfree;
    std::size_t rank = 0;
    double min_rate = 0.0;
    double level = 0.0;   ///< (rank + 1) / n
};

/// Empirical CDF of the per-drop min rate. Needs drops >= 50.
std::vector<CdfRow> cdf_experiment(const ExperimentConfig& config, ExperimentResult* raw = nullptr);
void write_cdf_csv(std::ostream& os, const std::vector<CdfRow>& rows, const ExperimentConfig& config);

/// Monte Carlo chain against the closed form on drop 0 of the configured scenario
/// (first sweep value), uniform powers.
McReport mc_validate(const ExperimentConfig& config);

}  // namespace aerocf
