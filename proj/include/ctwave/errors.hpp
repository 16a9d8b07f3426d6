#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ctwave {

/// Raised when inputs violate an operation's mathematical preconditions
/// (non-positive rates, wave numbers outside the admissible window, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an iterative solver fails to converge within its budget.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

/// Time-integration budget exhausted; carries the last iterate so callers
/// can inspect how far the evolution got.
class budget_exceeded : public solver_error {
public:
    budget_exceeded(const std::string& what, std::vector<double> last, double t_reached)
        : solver_error(what), last_iterate(std::move(last)), t(t_reached) {}
    std::vector<double> last_iterate;
    double t = 0.0;
};

/// Outer fixed-point loop did not settle; carries the history of
/// successive-iterate sup-norm gaps.
class fixed_point_error : public solver_error {
public:
    fixed_point_error(const std::string& what, std::vector<double> gaps)
        : solver_error(what), gap_history(std::move(gaps)) {}
    std::vector<double> gap_history;
};

}  // namespace ctwave
