#pragma once

#include <cmath>
#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace confmetric {

inline constexpr double kPi = 3.14159265358979323846;

// Geometric comparisons: relative tolerance with an absolute floor, since
// values in this library span many orders of magnitude (down to e^{-e^j}).
inline constexpr double kRelTol = 1e-12;
inline constexpr double kAbsFloor = 1e-300;

/// Thrown when an input lies outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Thrown when a point configuration degenerates (coincident points where
/// distinct ones are required, collinear triples for circle fits, ...).
struct DegenerateConfiguration : DomainError {
    using DomainError::DomainError;
};

/// Thrown by iterative solvers when the iteration cap is reached. Carries the
/// best value seen so far so callers can still inspect the partial result.
struct SolverError : std::runtime_error {
    double best_value;
    int iterations;
    SolverError(const std::string& what, double best, int iters)
        : std::runtime_error(what), best_value(best), iterations(iters) {}
};

inline bool nearly_equal(double a, double b, double rel = kRelTol) {
    const double scale = std::max({std::fabs(a), std::fabs(b), kAbsFloor});
    return std::fabs(a - b) <= rel * scale;
}

/// artanh that stays accurate as |t| -> 1 (log1p form).
inline double safe_artanh(double t) {
    if (!(t > -1.0 && t < 1.0)) throw DomainError("artanh: |t| must be < 1");
    return 0.5 * std::log1p(2.0 * t / (1.0 - t));
}

/// acosh(1 + x) for x >= 0 without cancellation near x = 0.
inline double acosh1p(double x) {
    if (x < 0.0) throw DomainError("acosh1p: negative argument");
    return std::log1p(x + std::sqrt(x * (x + 2.0)));
}

}  // namespace confmetric
