#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace aerocf {

/// ||A x + b|| <= c^T x + d
struct SocConstraint {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    double d = 0.0;
};

/// g^T x <= h
struct LinearConstraint {
    Eigen::VectorXd g;
    double h = 0.0;
};

/// maximize objective^T x subject to the cones, the linear rows and lo <= x <= hi.
/// Infinite bounds are allowed; equal bounds are not (fix the variable instead).
struct ConeProgram {
    std::size_t n_vars = 0;
    Eigen::VectorXd objective;
    std::vector<SocConstraint> soc;
    std::vector<LinearConstraint> linear;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    explicit ConeProgram(std::size_t n = 0);

    /// Throws ConfigError on dimension mismatch or lo >= hi.
    void validate() const;
    std::string to_json() const;
    static ConeProgram from_json(std::string_view text);
};

enum class SolveStatus { optimal, feasible_point, infeasible, max_iter, numerical_failure };

std::string_view to_string(SolveStatus s);

struct SolveOptions {
    double tol_feas = 1e-8;
    double tol_gap = 1e-8;
    std::size_t max_iter = 400;   ///< total Newton steps, both phases
    double mu = 12.0;             ///< barrier parameter growth
    bool feasibility_only = false;
};

struct SolveResult {
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::VectorXd x;
    double objective_value = -std::numeric_limits<double>::infinity();
    double max_soc_residual = std::numeric_limits<double>::infinity();
    double max_linear_residual = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    double phase1_slack = 0.0;
    std::vector<double> gap_history;  ///< m / t after each phase II centering step

    bool has_point() const noexcept {
        return status == SolveStatus::optimal || status == SolveStatus::feasible_point;
    }
};

struct ResidualReport {
    std::vector<double> soc;     ///< ||A x + b|| - (c^T x + d)
    std::vector<double> linear;  ///< g^T x - h
    double bound = 0.0;          ///< largest bound violation
    double max_soc = -std::numeric_limits<double>::infinity();
    double max_linear = -std::numeric_limits<double>::infinity();

    double worst() const noexcept;
};

ResidualReport check_point(const ConeProgram& p, const Eigen::VectorXd& x);

/// Phase I (single slack on every constraint) then a log-barrier path
/// with damped Newton steps. With no start point the search begins at
/// the box centre, clipped to finite bounds.
SolveResult solve(const ConeProgram& p, const SolveOptions& opts = {},
                  const Eigen::VectorXd* start = nullptr);

}  // namespace aerocf
