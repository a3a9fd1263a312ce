#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "confmetric/point.hpp"

namespace confmetric {

/// Fractional-linear transformation z -> (az + b) / (cz + d) of the extended
/// plane. The coefficient matrix must be nonsingular (relative tolerance
/// 1e-12 on the determinant).
struct MobiusMap {
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    MobiusMap() = default;
    MobiusMap(Complex a_, Complex b_, Complex c_, Complex d_) : a(a_), b(b_), c(c_), d(d_) {
        if (!valid()) throw DegenerateConfiguration("MobiusMap: singular coefficient matrix");
    }

    Complex det() const { return a * d - b * c; }

    bool valid() const {
        const double scale = std::max({std::abs(a) * std::abs(d), std::abs(b) * std::abs(c), kAbsFloor});
        return std::abs(det()) > 1e-12 * scale;
    }

    static MobiusMap identity() { return MobiusMap(); }

    ExtendedPoint apply(const ExtendedPoint& p) const {
        if (p.is_inf) {
            if (std::abs(c) == 0.0) return inf_point();
            return point(a / c);
        }
        const Complex den = c * p.z + d;
        const Complex num = a * p.z + b;
        // The pole of the map goes to infinity.
        if (std::abs(den) <= 1e-14 * std::max(std::abs(c * p.z), std::abs(d)) || den == 0.0)
            return inf_point();
        return point(num / den);
    }

    ExtendedPoint operator()(const ExtendedPoint& p) const { return apply(p); }

    MobiusMap inverse() const { return MobiusMap(d, -b, -c, a); }

    friend MobiusMap operator*(const MobiusMap& f, const MobiusMap& g) {
        // (f * g)(z) = f(g(z))
        return MobiusMap(f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d,
                         f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d);
    }
};

namespace detail {

// |u - v| of a factor of the absolute cross-ratio; factors containing the
// point at infinity are dropped (the standard limit).
inline bool cross_factor(const ExtendedPoint& u, const ExtendedPoint& v, double& out) {
    if (u.is_inf || v.is_inf) return false;
    out = std::abs(u.z - v.z);
    return true;
}

}  // namespace detail

/// Absolute cross-ratio |p1, p2, p3, p4| = |p1-p3||p2-p4| / (|p1-p2||p3-p4|)
/// with factors containing infinity replaced by their limit (dropped in
/// matching numerator/denominator pairs). The four points must be pairwise
/// distinct; coincident points raise DegenerateConfiguration.
inline double cross_ratio(const ExtendedPoint& p1, const ExtendedPoint& p2,
                          const ExtendedPoint& p3, const ExtendedPoint& p4) {
    const std::array<const ExtendedPoint*, 4> ps{&p1, &p2, &p3, &p4};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (*ps[i] == *ps[j])
                throw DegenerateConfiguration("cross_ratio: points must be pairwise distinct");

    double num = 1.0, den = 1.0, f = 0.0;
    if (detail::cross_factor(p1, p3, f)) num *= f;
    if (detail::cross_factor(p2, p4, f)) num *= f;
    if (detail::cross_factor(p1, p2, f)) den *= f;
    if (detail::cross_factor(p3, p4, f)) den *= f;
    if (den <= kAbsFloor)
        throw DegenerateConfiguration("cross_ratio: vanishing denominator");
    return num / den;
}

/// Inversion about a finite center: iota_x(y) = (y - x) / |y - x|^2, with
/// iota_x(x) = inf and iota_x(inf) = 0. Satisfies
/// |iota(a) - iota(b)| = |a - b| / (|x - a||x - b|) for finite a, b != x.
inline ExtendedPoint invert_about(const ExtendedPoint& center, const ExtendedPoint& y) {
    if (center.is_inf) throw DomainError("invert_about: center must be finite");
    if (y.is_inf) return point(0.0, 0.0);
    const Complex w = y.z - center.z;
    const double n2 = std::norm(w);
    if (n2 == 0.0) return inf_point();
    return point(w / n2);
}

inline std::vector<ExtendedPoint> invert_about(const ExtendedPoint& center,
                                               const std::vector<ExtendedPoint>& pts) {
    std::vector<ExtendedPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(invert_about(center, p));
    return out;
}

namespace detail {

// Map sending the triple (z1, z2, z3) to (0, 1, inf).
inline MobiusMap to_standard_triple(const ExtendedPoint& z1, const ExtendedPoint& z2,
                                    const ExtendedPoint& z3) {
    if (z1.is_inf) return MobiusMap(Complex(0), z2.z - z3.z, Complex(1), -z3.z);
    if (z2.is_inf) return MobiusMap(Complex(1), -z1.z, Complex(1), -z3.z);
    if (z3.is_inf) return MobiusMap(Complex(1), -z1.z, Complex(0), z2.z - z1.z);
    return MobiusMap(z2.z - z3.z, -z1.z * (z2.z - z3.z), z2.z - z1.z, -z3.z * (z2.z - z1.z));
}

}  // namespace detail

/// The unique Mobius map sending src[i] -> dst[i] for two pairwise-distinct
/// triples of extended points.
inline MobiusMap mobius_from_triple(const std::array<ExtendedPoint, 3>& src,
                                    const std::array<ExtendedPoint, 3>& dst) {
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (src[i] == src[j] || dst[i] == dst[j])
                throw DegenerateConfiguration("mobius_from_triple: triple not pairwise distinct");
    const MobiusMap s = detail::to_standard_triple(src[0], src[1], src[2]);
    const MobiusMap t = detail::to_standard_triple(dst[0], dst[1], dst[2]);
    return t.inverse() * s;
}

}  // namespace confmetric
