#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "aerocf/channel.hpp"
#include "aerocf/rate.hpp"
#include "aerocf/scenario.hpp"
#include "aerocf/socp.hpp"

namespace aerocf {

// ---- power allocation ----------------------------------------------------

/// Feasibility cone program for "every user reaches SINR eta". Variables are
/// X_km = sqrt(P_km / P_m), stored at index k * M + m.
ConeProgram compile_power_feasibility(const LinkBudget& budget, const std::vector<double>& uxnb_power_w,
                                      double eta);

PowerAllocation allocation_from_solution(const Eigen::VectorXd& x, const std::vector<double>& uxnb_power_w,
                                         std::size_t users);

struct BisectionOptions {
    double eta_min = 0.0;
    double eta_max = 1500.0;
    double epsilon = 0.01;
    int max_extensions = 8;   ///< bracket doublings when eta_max turns out feasible
    bool equalize = true;     ///< scale down over-served users to the common minimum afterwards
    SolveOptions solver{};
};

struct BisectionProbe {
    double eta = 0.0;
    bool feasible = false;
    SolveStatus status = SolveStatus::infeasible;
};

struct BisectionResult {
    PowerAllocation alloc;
    double eta = 0.0;                 ///< last feasible target
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::size_t iterations = 0;       ///< feasibility solves
    int extensions = 0;
    bool found_feasible = false;      ///< false: uniform fallback returned
    bool monotone = true;             ///< no feasible target above an infeasible one
    double spread_before_equalize = 0.0;
    std::vector<BisectionProbe> probes;
};

/// Max-min SINR power allocation by bisection on the common target.
/// Throws ScenarioError when some user has no signal path at all.
BisectionResult bisection_power(const LinkBudget& budget, const std::vector<double>& uxnb_power_w,
                                const BisectionOptions& opts = {});
BisectionResult bisection_power(const NetworkScenario& s, const LinkGains& gains,
                                const BisectionOptions& opts = {});

/// Scales each user's row down so that its SINR equals the current minimum.
/// Other users are unaffected because SINR_k depends on row k only.
PowerAllocation equalize_sinr(const LinkBudget& budget, const PowerAllocation& alloc);

// ---- placement -----------------------------------------------------------

/// Linearization point of one SCA step. Gains, backhaul terms and the
/// excess-loss constants are frozen here.
struct ScaState {
    std::vector<Vec2> positions;
    Eigen::VectorXd t_lin;      ///< K, sqrt of the true SINR denominator
    Eigen::MatrixXd beta_lin;   ///< K x M, true amplitude gains
    Eigen::MatrixXd dist_lin;   ///< K x M, access distances
    Eigen::VectorXd gamma;      ///< M, frozen backhaul amplitude
    Eigen::VectorXd rho;        ///< M
    double eta_lin = 0.0;       ///< true min SINR at this point
    double zeta0 = 0.0;         ///< eta_lin^(1/4)
    double length_scale = 1.0;  ///< positions are divided by this
};

ScaState make_sca_state(const NetworkScenario& s, const LinkGains& gains, const PowerAllocation& alloc);

struct PlacementLayout {
    std::size_t K = 0, M = 0;
    std::size_t x(std::size_t m) const { return m; }
    std::size_t y(std::size_t m) const { return M + m; }
    std::size_t zeta() const { return 2 * M; }
    std::size_t t(std::size_t k) const { return 2 * M + 1 + k; }
    std::size_t beta(std::size_t k, std::size_t m) const { return 2 * M + 1 + K + k * M + m; }
    std::size_t size() const { return 2 * M + 1 + K + K * M; }
};

/// Convex surrogate around `state`, in scaled variables: positions / L,
/// zeta / zeta0, t / t_lin and beta / beta_lin. Maximizes scaled zeta.
ConeProgram compile_placement_step(const NetworkScenario& s, const PowerAllocation& alloc, const ScaState& state);

/// Strictly feasible start for the compiled step.
Eigen::VectorXd placement_start(const NetworkScenario& s, const ScaState& state);

struct PlacementStep {
    std::vector<Vec2> positions;
    double surrogate_min_sinr = 0.0;  ///< (zeta0 * zeta)^4
    double true_min_sinr = 0.0;       ///< closed-form value at the new positions, same powers
    SolveStatus status = SolveStatus::numerical_failure;
    std::size_t solver_iterations = 0;
};

PlacementStep placement_step(const NetworkScenario& s, const LinkGains& gains, const PowerAllocation& alloc,
                             const SolveOptions& opts = {}, const GainOverrides& overrides = {});

// ---- alternating optimization --------------------------------------------

enum class OptimizeMode { none, power, placement, joint };

std::string_view to_string(OptimizeMode m);
OptimizeMode optimize_mode_from_string(std::string_view name);

struct BcdOptions {
    OptimizeMode mode = OptimizeMode::joint;
    std::size_t max_outer = 15;
    double tol = 1e-3;               ///< relative improvement of the true min SINR
    BisectionOptions bisection{};
    SolveOptions placement_solver{};
    int max_backtracks = 8;
    GainOverrides overrides{};
};

struct TraceEntry {
    std::size_t iteration = 0;
    double min_sinr = 0.0;             ///< true closed-form value after the iteration
    double min_rate = 0.0;
    std::size_t bisection_iters = 0;
    double surrogate_min_sinr = 0.0;   ///< SCA surrogate value, 0 when no placement step
    double placement_min_sinr = 0.0;   ///< true value right after the placement step
    double step_scale = 0.0;           ///< accepted fraction of the SCA move
    std::string sca_status;
    PowerAllocation alloc;
    std::vector<Vec2> positions;
};

struct OptimizationTrace {
    std::vector<TraceEntry> entries;   ///< entries[0] is the starting point
    bool converged = false;
    NetworkScenario final_scenario;
    PowerAllocation final_alloc;

    double final_min_sinr() const { return entries.empty() ? 0.0 : entries.back().min_sinr; }
    std::size_t outer_iterations() const { return entries.empty() ? 0 : entries.size() - 1; }
    std::size_t bisection_iterations() const;
    std::string to_json() const;
    std::string to_csv() const;
};

/// Alternates one SCA placement step and one full bisection power solve,
/// starting from uniform powers at the scenario's UxNB positions.
/// Solver breakdowns are rethrown as SolverError with the iteration index.
OptimizationTrace bcd_optimize(const NetworkScenario& s, const BcdOptions& opts = {});

}  // namespace aerocf
