#pragma once

#include <cmath>
#include <complex>
#include <ostream>

#include "confmetric/numeric.hpp"

namespace confmetric {

using Complex = std::complex<double>;

/// A point of the extended plane: either a finite complex number or the
/// single point at infinity. Infinity is an explicit variant, never a
/// coordinate sentinel; it compares equal only to itself.
struct ExtendedPoint {
    Complex z{0.0, 0.0};
    bool is_inf = false;

    ExtendedPoint() = default;
    ExtendedPoint(double re, double im) : z(re, im) { check_finite(); }
    explicit ExtendedPoint(Complex c) : z(c) { check_finite(); }

    static ExtendedPoint infinity() {
        ExtendedPoint p;
        p.is_inf = true;
        return p;
    }

    bool finite() const { return !is_inf; }
    double re() const { return z.real(); }
    double im() const { return z.imag(); }
    double abs() const { return is_inf ? std::numeric_limits<double>::infinity() : std::abs(z); }

    friend bool operator==(const ExtendedPoint& a, const ExtendedPoint& b) {
        if (a.is_inf || b.is_inf) return a.is_inf && b.is_inf;
        return a.z == b.z;
    }
    friend bool operator!=(const ExtendedPoint& a, const ExtendedPoint& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedPoint& p) {
        if (p.is_inf) return os << "inf";
        return os << p.z.real() << (p.z.imag() < 0 ? "" : "+") << p.z.imag() << "i";
    }

  private:
    void check_finite() const {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw DomainError("ExtendedPoint: finite coordinates required");
    }
};

inline ExtendedPoint point(double re, double im = 0.0) { return ExtendedPoint(re, im); }
inline ExtendedPoint point(Complex z) { return ExtendedPoint(z); }
inline ExtendedPoint inf_point() { return ExtendedPoint::infinity(); }

inline bool approx_equal(const ExtendedPoint& a, const ExtendedPoint& b, double rel = kRelTol) {
    if (a.is_inf || b.is_inf) return a.is_inf && b.is_inf;
    const double scale = std::max({std::abs(a.z), std::abs(b.z), kAbsFloor});
    return std::abs(a.z - b.z) <= rel * scale;
}

/// sigma(x) = sqrt(1 + |x|^2), the conformal weight of the stereographic chart.
inline double sigma_weight(const ExtendedPoint& x) {
    if (x.is_inf) throw DomainError("sigma_weight: x must be finite");
    return std::hypot(1.0, std::abs(x.z));
}

/// Chordal (spherical) distance q(x, y) on the extended plane.
///   q(x,y) = |x-y| / (sigma(x) sigma(y)),  q(x,inf) = 1/sigma(x).
/// Always <= 1; a metric on the whole extended plane.
inline double chordal_distance(const ExtendedPoint& x, const ExtendedPoint& y) {
    if (x.is_inf && y.is_inf) return 0.0;
    if (x.is_inf) return 1.0 / sigma_weight(y);
    if (y.is_inf) return 1.0 / sigma_weight(x);
    return std::abs(x.z - y.z) / (sigma_weight(x) * sigma_weight(y));
}

}  // namespace confmetric
