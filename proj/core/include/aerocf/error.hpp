#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aerocf {

/// Invalid experiment or scenario configuration. The message names the field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Node placement that violates the geometric model (e.g. UxNB at or above the HAPS).
class GeometryError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a model formula.
class DomainError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Scenario that admits no useful solution (e.g. a user with no signal path).
class ScenarioError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Convex solver breakdown, carrying the outer optimization iteration it happened in.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t iteration = 0)
        : std::runtime_error(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace aerocf
