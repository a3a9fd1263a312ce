#pragma once

#include <cmath>

#include "confmetric/point.hpp"

namespace confmetric {

/// Constants shared by the capacity and metric layers.
struct UniversalConstants {
    double omega1;    ///< 1-dimensional measure of the unit circle, 2*pi
    double M0;        ///< 2 / log(1 + log 3)
    double piOver4;
};

inline const UniversalConstants& universal_constants() {
    static const UniversalConstants k{2.0 * kPi, 2.0 / std::log1p(std::log(3.0)), kPi / 4.0};
    return k;
}

/// Arithmetic-geometric mean of two positive reals. Quadratic convergence;
/// the optional out-parameter reports the iteration count.
inline double agm(double a, double b, int* iterations = nullptr) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("agm: arguments must be positive");
    int n = 0;
    while (std::fabs(a - b) > 1e-16 * std::fabs(a) && n < 64) {
        const double am = 0.5 * (a + b);
        const double gm = std::sqrt(a * b);
        a = am;
        b = gm;
        ++n;
    }
    if (iterations) *iterations = n;
    return 0.5 * (a + b);
}

/// Complete elliptic integral of the first kind,
///   K(r) = int_0^{pi/2} dt / sqrt(1 - r^2 sin^2 t),  0 <= r < 1,
/// evaluated as pi / (2 agm(1, sqrt(1 - r^2))).
inline double elliptic_k(double r) {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("elliptic_k: r must lie in [0,1)");
    const double rc = std::sqrt((1.0 - r) * (1.0 + r));
    return kPi / (2.0 * agm(1.0, rc));
}

/// Grotzsch modulus function mu(r) = (pi/2) K(r') / K(r) with r' = sqrt(1-r^2),
/// the decreasing homeomorphism of (0,1] onto [0,inf) with mu(1) = 0.
/// Evaluated directly as an AGM ratio; relative accuracy degrades below
/// r ~ 1e-8 (no small-r expansion is substituted).
inline double grotzsch_mu(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("grotzsch_mu: r must lie in (0,1]");
    if (r == 1.0) return 0.0;
    const double rc = std::sqrt((1.0 - r) * (1.0 + r));
    // mu(r) = (pi/2) * agm(1, rc) / agm(1, r)
    return (kPi / 2.0) * agm(1.0, rc) / agm(1.0, r);
}

/// Planar Grotzsch ring capacity gamma_2(s) = 2 pi / mu(1/s), s > 1.
inline double gamma2(double s) {
    if (!(s > 1.0)) throw DomainError("gamma2: s must be > 1");
    return 2.0 * kPi / grotzsch_mu(1.0 / s);
}

/// Planar Teichmuller ring capacity via gamma_2(t) = 2 tau_2(t^2 - 1):
/// tau_2(s) = gamma_2(sqrt(s + 1)) / 2, s > 0.
inline double tau2(double s) {
    if (!(s > 0.0)) throw DomainError("tau2: s must be > 0");
    return gamma2(std::sqrt(s + 1.0)) / 2.0;
}

namespace detail {

inline void require_in_unit_disk(const ExtendedPoint& p, const char* who) {
    if (p.is_inf || std::abs(p.z) >= 1.0) throw DomainError(std::string(who) + ": point outside the open unit disk");
}

// tanh(h_D(z,w)/2) = |z - w| / |1 - conj(z) w|, evaluated without forming h.
inline double disk_pseudo_distance(const ExtendedPoint& z, const ExtendedPoint& w) {
    return std::abs(z.z - w.z) / std::abs(1.0 - std::conj(z.z) * w.z);
}

}  // namespace detail

/// Modulus metric of the unit disk, mu_D(z,w) = 2 pi / mu(tanh(h_D(z,w)/2)).
/// Conformally invariant; 0 iff z = w.
inline double mu_disk(const ExtendedPoint& z, const ExtendedPoint& w) {
    detail::require_in_unit_disk(z, "mu_disk");
    detail::require_in_unit_disk(w, "mu_disk");
    if (z.z == w.z) return 0.0;
    const double r = detail::disk_pseudo_distance(z, w);
    return 2.0 * kPi / grotzsch_mu(r);
}

/// Ferrand modulus quantity of the unit disk, lambda_D = 4 / mu_D
/// (equivalently tau(t)/2 with t = sinh^2(h/2)). Requires z != w.
inline double lambda_disk(const ExtendedPoint& z, const ExtendedPoint& w) {
    detail::require_in_unit_disk(z, "lambda_disk");
    detail::require_in_unit_disk(w, "lambda_disk");
    if (z.z == w.z) throw DomainError("lambda_disk: infinite for coincident points");
    return 4.0 / mu_disk(z, w);
}

}  // namespace confmetric
