#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "confmetric/domain.hpp"
#include "confmetric/special.hpp"

namespace confmetric {

/// A computed metric value together with an honest bound on the numerical
/// error of the evaluation (0 for exact closed forms; derived from the mesh
/// gap or refinement width for sampled suprema).
struct MetricValue {
    double value = 0.0;
    double error_bound = 0.0;
};

// ---------------------------------------------------------------------------
// Distance-ratio metrics
// ---------------------------------------------------------------------------

namespace detail {

inline void require_inside(const DomainSpec& spec, const ExtendedPoint& x, const char* who) {
    if (!contains(spec, x)) throw DomainError(std::string(who) + ": point outside the domain");
}

inline double sample_distance_error(const DomainSpec& spec) {
    return spec.kind == DomainKind::SampledBoundary ? spec.mesh_gap : 0.0;
}

}  // namespace detail

/// Distance-ratio metric j_G(x,y) = log(1 + |x-y| / min(d_G(x), d_G(y))).
inline MetricValue j_metric(const DomainSpec& spec, const ExtendedPoint& x, const ExtendedPoint& y) {
    if (x.is_inf || y.is_inf) throw DomainError("j_metric: points must be finite");
    detail::require_inside(spec, x, "j_metric");
    detail::require_inside(spec, y, "j_metric");
    const double d = std::min(boundary_distance(spec, x), boundary_distance(spec, y));
    const double ratio = std::abs(x.z - y.z) / d;
    const double err_d = detail::sample_distance_error(spec);
    // dj/dd = -ratio / (d (1 + ratio))
    return {std::log1p(ratio), err_d * ratio / (d * (1.0 + ratio))};
}

// ---------------------------------------------------------------------------
// Chordal boundary distance and the chordal distance-ratio metric
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double golden_min(F&& f, double lo, double hi, int iters = 64) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 64) {
    return -golden_min([&](double t) { return -f(t); }, lo, hi, iters);
}

// Minimum of f over a parametrized curve: coarse scan plus golden refinement
// around the best bracket.
template <class F>
double scan_min(F&& f, double lo, double hi, int n, int golden_iters = 64) {
    double best = std::numeric_limits<double>::infinity();
    int besti = 0;
    const double step = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
        const double v = f(lo + (i + 0.5) * step);
        if (v < best) { best = v; besti = i; }
    }
    const double c = lo + (besti + 0.5) * step;
    return std::min(best, golden_min(f, c - step, c + step, golden_iters));
}

template <class F>
double scan_max(F&& f, double lo, double hi, int n, int golden_iters = 64) {
    return -scan_min([&](double t) { return -f(t); }, lo, hi, n, golden_iters);
}

}  // namespace detail

/// Chordal distance from x to the boundary, inf_{a in dG} q(x, a).
inline double chordal_boundary_distance(const DomainSpec& spec, const ExtendedPoint& x) {
    double best = std::numeric_limits<double>::infinity();
    if (spec.kind == DomainKind::SampledBoundary) {
        for (const auto& s : spec.points) best = std::min(best, chordal_distance(x, s));
        return best;
    }
    const double sx = x.finite() ? sigma_weight(x) : 0.0;
    for (const auto& el : boundary_elements(spec)) {
        if (const auto* p = std::get_if<ExtendedPoint>(&el)) {
            best = std::min(best, chordal_distance(x, *p));
        } else if (const auto* ce = std::get_if<CircleElement>(&el)) {
            if (x.is_inf) {
                best = std::min(best, detail::scan_min([&](double th) {
                    return 1.0 / std::hypot(1.0, std::abs(ce->center + ce->radius * Complex(std::cos(th), std::sin(th))));
                }, 0.0, 2.0 * kPi, 256));
                continue;
            }
            if (std::abs(ce->center) <= 1e-14 * ce->radius) {
                // sigma is constant on an origin-centered circle.
                best = std::min(best, std::fabs(std::abs(x.z) - ce->radius) /
                                          (sx * std::hypot(1.0, ce->radius)));
            } else {
                best = std::min(best, detail::scan_min([&](double th) {
                    const Complex a = ce->center + ce->radius * Complex(std::cos(th), std::sin(th));
                    return std::abs(x.z - a) / (sx * std::hypot(1.0, std::abs(a)));
                }, 0.0, 2.0 * kPi, 256));
            }
        } else {
            const auto& le = std::get<LineElement>(el);
            best = std::min(best, x.is_inf ? 0.0 : 1.0 / sx);  // the line contains infinity
            if (x.finite()) {
                best = std::min(best, detail::scan_min([&](double t) {
                    const Complex a = le.through + std::tan(t) * le.dir;
                    return std::abs(x.z - a) / (sx * std::hypot(1.0, std::abs(a)));
                }, -kPi / 2.0 + 1e-9, kPi / 2.0 - 1e-9, 512));
            }
        }
    }
    return best;
}

/// Chordal distance-ratio metric, j with the chordal metric q in place of the
/// Euclidean distance. Satisfies j <= 2 jhat on proper subdomains of the plane.
inline MetricValue j_hat_metric(const DomainSpec& spec, const ExtendedPoint& x, const ExtendedPoint& y) {
    detail::require_inside(spec, x, "j_hat_metric");
    detail::require_inside(spec, y, "j_hat_metric");
    const double dh = std::min(chordal_boundary_distance(spec, x), chordal_boundary_distance(spec, y));
    const double ratio = chordal_distance(x, y) / dh;
    // q is 1-Lipschitz w.r.t. Euclidean motion of the boundary point.
    const double err_d = detail::sample_distance_error(spec);
    return {std::log1p(ratio), err_d * ratio / (dh * (1.0 + ratio))};
}

// ---------------------------------------------------------------------------
// Cross-ratio supremum m_G, Mobius metric delta_G, logarithmic metric
// ---------------------------------------------------------------------------

namespace detail {

// |a,x,b,y| = |a-b| |x-y| / (|a-x| |b-y|) with the infinity limits inlined.
// x, y are finite interior points; a, b boundary points with a != b.
inline double cr_kernel(const ExtendedPoint& a, const ExtendedPoint& b, Complex x, Complex y,
                        double dxy) {
    if (a.is_inf) return dxy / std::abs(b.z - y);
    if (b.is_inf) return dxy / std::abs(a.z - x);
    return std::abs(a.z - b.z) * dxy / (std::abs(a.z - x) * std::abs(b.z - y));
}

// Parametrized boundary site: an isolated point, a circle, or a line. Lines
// carry their point at infinity as a separate candidate.
struct BoundarySite {
    int kind;  // 0 point, 1 circle, 2 line
    ExtendedPoint fixed;
    Complex center, dir;
    double radius = 0.0;

    ExtendedPoint at(double t) const {
        if (kind == 1) return point(center + radius * Complex(std::cos(t), std::sin(t)));
        return point(center + std::tan(t) * dir);  // kind == 2, center = through
    }
    double lo() const { return kind == 1 ? 0.0 : -kPi / 2.0 + 1e-9; }
    double hi() const { return kind == 1 ? 2.0 * kPi : kPi / 2.0 - 1e-9; }
};

inline std::vector<BoundarySite> boundary_sites(const DomainSpec& spec) {
    std::vector<BoundarySite> sites;
    bool has_line_inf = false;
    for (const auto& el : boundary_elements(spec)) {
        BoundarySite s{};
        if (const auto* p = std::get_if<ExtendedPoint>(&el)) {
            s.kind = 0;
            s.fixed = *p;
        } else if (const auto* ce = std::get_if<CircleElement>(&el)) {
            s.kind = 1;
            s.center = ce->center;
            s.radius = ce->radius;
        } else {
            const auto& le = std::get<LineElement>(el);
            s.kind = 2;
            s.center = le.through;
            s.dir = le.dir;
            has_line_inf = true;
        }
        sites.push_back(s);
    }
    if (has_line_inf) {
        BoundarySite s{};
        s.kind = 0;
        s.fixed = inf_point();
        sites.push_back(s);
    }
    return sites;
}

// Full 1D scan + golden refinement; returns the refined max and its argmax.
template <class F>
std::pair<double, double> scan_argmax(F&& f, double lo, double hi, int n, int golden_iters = 64) {
    double best = -std::numeric_limits<double>::infinity();
    int besti = 0;
    const double step = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
        const double v = f(lo + (i + 0.5) * step);
        if (v > best) { best = v; besti = i; }
    }
    const double c = lo + (besti + 0.5) * step;
    // Golden refinement around the winning bracket; track the argmax.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = c - step, b = c + step;
    double p = b - phi * (b - a), q = a + phi * (b - a);
    double fp = f(p), fq = f(q);
    for (int i = 0; i < golden_iters; ++i) {
        if (fp > fq) { b = q; q = p; fq = fp; p = b - phi * (b - a); fp = f(p); }
        else { a = p; p = q; fp = fq; q = a + phi * (b - a); fq = f(q); }
    }
    const double t = fp > fq ? p : q;
    const double fv = std::max({best, fp, fq});
    return {fv, t};
}

// Maximize the kernel over an ordered pair of sites: joint coarse scan, then
// alternating full 1D rescans with golden refinement.
inline double max_kernel_over_sites(const BoundarySite& sa, const BoundarySite& sb, Complex x,
                                    Complex y, double dxy) {
    auto eval = [&](const ExtendedPoint& a, const ExtendedPoint& b) {
        if (a == b) return 0.0;
        return cr_kernel(a, b, x, y, dxy);
    };
    if (sa.kind == 0 && sb.kind == 0) return eval(sa.fixed, sb.fixed);

    if (sa.kind == 0 || sb.kind == 0) {
        const bool a_fixed = (sa.kind == 0);
        const BoundarySite& curve = a_fixed ? sb : sa;
        auto f = [&](double t) {
            const ExtendedPoint p = curve.at(t);
            return a_fixed ? eval(sa.fixed, p) : eval(p, sb.fixed);
        };
        return scan_argmax(f, curve.lo(), curve.hi(), 512).first;
    }

    // Two curves: joint coarse scan to locate the basin.
    const int N = 128;
    double ta = 0.0, tb = 0.0, best = -1.0;
    for (int i = 0; i < N; ++i) {
        const double u = sa.lo() + (sa.hi() - sa.lo()) * (i + 0.5) / N;
        const ExtendedPoint a = sa.at(u);
        for (int j = 0; j < N; ++j) {
            const double v = sb.lo() + (sb.hi() - sb.lo()) * (j + 0.5) / N;
            const double k = eval(a, sb.at(v));
            if (k > best) { best = k; ta = u; tb = v; }
        }
    }
    // Alternating full rescans keep the search global in each coordinate.
    for (int round = 0; round < 2; ++round) {
        const ExtendedPoint b = sb.at(tb);
        auto ra = scan_argmax([&](double t) { return eval(sa.at(t), b); }, sa.lo(), sa.hi(), 512);
        ta = ra.second;
        const ExtendedPoint a = sa.at(ta);
        auto rb = scan_argmax([&](double t) { return eval(a, sb.at(t)); }, sb.lo(), sb.hi(), 512);
        tb = rb.second;
        best = std::max({best, ra.first, rb.first});
    }
    // Local alternating polish with shrinking brackets; the coarse phase has
    // already pinned the basin, this drives the coupled maximum home.
    double ha = (sa.hi() - sa.lo()) / 128.0, hb = (sb.hi() - sb.lo()) / 128.0;
    for (int round = 0; round < 14; ++round) {
        auto ra = scan_argmax([&](double t) { return eval(sa.at(t), sb.at(tb)); },
                              std::max(sa.lo(), ta - ha), std::min(sa.hi(), ta + ha), 8, 40);
        ta = ra.second;
        auto rb = scan_argmax([&](double t) { return eval(sa.at(ta), sb.at(t)); },
                              std::max(sb.lo(), tb - hb), std::min(sb.hi(), tb + hb), 8, 40);
        tb = rb.second;
        best = std::max({best, ra.first, rb.first});
        ha *= 0.5;
        hb *= 0.5;
    }
    return best;
}

}  // namespace detail

/// m_G(x,y) = sup_{a,b in dG} |a,x,b,y|. Exact enumeration for finite
/// boundaries; parametric maximization with refinement for circle/line
/// boundaries; sampled supremum with a Lipschitz error bound for sampled
/// boundaries. The untransformed disk and half-plane use the hyperbolic
/// closed form (the supremum is attained there and equals e^h - 1).
MetricValue moebius_sup(const DomainSpec& spec, const ExtendedPoint& x, const ExtendedPoint& y);

/// Mobius (Seittenranta) metric delta_G = log(1 + m_G).
inline MetricValue delta_metric(const DomainSpec& spec, const ExtendedPoint& x, const ExtendedPoint& y) {
    if (x == y) return {0.0, 0.0};
    const MetricValue m = moebius_sup(spec, x, y);
    return {std::log1p(m.value), m.error_bound / (1.0 + m.value)};
}

/// Logarithmic Mobius metric Delta_G = log(1 + delta_G).
inline MetricValue log_mobius_metric(const DomainSpec& spec, const ExtendedPoint& x,
                                     const ExtendedPoint& y) {
    const MetricValue d = delta_metric(spec, x, y);
    return {std::log1p(d.value), d.error_bound / (1.0 + d.value)};
}

// ---------------------------------------------------------------------------
// Hyperbolic closed forms (needed by moebius_sup's disk/half-plane fast path)
// ---------------------------------------------------------------------------

/// Hyperbolic distance of the unit disk (density 2|dz|/(1-|z|^2)).
inline MetricValue hyperbolic_disk(const ExtendedPoint& x, const ExtendedPoint& y) {
    detail::require_in_unit_disk(x, "hyperbolic_disk");
    detail::require_in_unit_disk(y, "hyperbolic_disk");
    if (x.z == y.z) return {0.0, 0.0};
    const double r = detail::disk_pseudo_distance(x, y);
    return {2.0 * safe_artanh(r), 0.0};
}

/// Hyperbolic distance of the upper half-plane (density |dz|/Im z).
inline MetricValue hyperbolic_halfplane(const ExtendedPoint& x, const ExtendedPoint& y) {
    if (x.is_inf || y.is_inf || x.im() <= 0.0 || y.im() <= 0.0)
        throw DomainError("hyperbolic_halfplane: points must lie in the open upper half-plane");
    if (x.z == y.z) return {0.0, 0.0};
    const double r = std::abs(x.z - y.z) / std::abs(x.z - std::conj(y.z));
    return {2.0 * safe_artanh(r), 0.0};
}

/// Hyperbolic distance of the punctured unit disk via the universal cover
/// exp(i zeta) of the upper half-plane: the minimum over deck translates
/// zeta -> zeta + 2 pi n, with the cutoff chosen so that the horizontal
/// offset alone already exceeds the current minimum.
inline MetricValue hyperbolic_punctured_disk(const ExtendedPoint& z, const ExtendedPoint& w) {
    auto check = [](const ExtendedPoint& p) {
        if (p.is_inf || p.z == Complex(0, 0) || std::abs(p.z) >= 1.0)
            throw DomainError("hyperbolic_punctured_disk: point outside the punctured disk");
    };
    check(z);
    check(w);
    if (z.z == w.z) return {0.0, 0.0};
    const double v1 = std::log(1.0 / std::abs(z.z)), v2 = std::log(1.0 / std::abs(w.z));
    const double u1 = std::arg(z.z), u2 = std::arg(w.z);
    const double dv2 = (v1 - v2) * (v1 - v2);
    const double denom = 2.0 * v1 * v2;

    auto lift_dist = [&](double du) { return acosh1p((du * du + dv2) / denom); };
    double best = lift_dist(u2 - u1);
    for (int sign : {+1, -1}) {
        for (int n = 1;; ++n) {
            const double du = u2 - u1 + 2.0 * kPi * sign * n;
            // Monotone lower bound from the horizontal offset alone.
            if (acosh1p(du * du / denom) >= best) break;
            best = std::min(best, lift_dist(du));
        }
    }
    return {best, 0.0};
}

inline MetricValue moebius_sup(const DomainSpec& spec, const ExtendedPoint& x, const ExtendedPoint& y) {
    detail::require_inside(spec, x, "moebius_sup");
    detail::require_inside(spec, y, "moebius_sup");
    if (x == y) throw DomainError("moebius_sup: points must be distinct");
    if (x.is_inf || y.is_inf)
        throw DomainError("moebius_sup: points at infinity unsupported; Mobius-normalize first");

    // Exact closed forms where the Mobius metric coincides with the
    // hyperbolic metric.
    if (!spec.transform && spec.kind == DomainKind::UnitDisk)
        return {std::expm1(hyperbolic_disk(x, y).value), 0.0};
    if (!spec.transform && spec.kind == DomainKind::HalfPlane)
        return {std::expm1(hyperbolic_halfplane(x, y).value), 0.0};

    const double dxy = std::abs(x.z - y.z);

    if (spec.kind == DomainKind::SampledBoundary) {
        double best = 0.0, diam = 0.0;
        const auto& pts = spec.points;
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = 0; j < pts.size(); ++j) {
                if (i == j) continue;
                best = std::max(best, detail::cr_kernel(pts[i], pts[j], x.z, y.z, dxy));
                diam = std::max(diam, std::abs(pts[i].z - pts[j].z));
            }
        const double dx = boundary_distance(spec, x), dy = boundary_distance(spec, y);
        const double lip = dxy / (dx * dy) * (2.0 + diam / dx + diam / dy);
        return {best, spec.mesh_gap * lip};
    }

    if (spec.kind == DomainKind::ComplementOfFiniteSet && !spec.transform) {
        double best = 0.0;
        for (const auto& a : spec.points)
            for (const auto& b : spec.points) {
                if (a == b) continue;
                best = std::max(best, detail::cr_kernel(a, b, x.z, y.z, dxy));
            }
        return {best, 0.0};
    }

    const auto sites = detail::boundary_sites(spec);
    double best = 0.0;
    for (size_t i = 0; i < sites.size(); ++i)
        for (size_t j = 0; j < sites.size(); ++j) {
            if (i == j && sites[i].kind == 0) continue;
            best = std::max(best, detail::max_kernel_over_sites(sites[i], sites[j], x.z, y.z, dxy));
        }
    return {best, 1e-9 * (1.0 + best)};
}

// ---------------------------------------------------------------------------
// Ferrand density w_G
// ---------------------------------------------------------------------------

namespace detail {

struct InvertedDisk {  // circle or point in the inversion chart
    Complex center;
    double radius;  // 0 for points
};

inline InvertedDisk invert_element(const BoundaryElement& el, Complex x) {
    if (const auto* p = std::get_if<ExtendedPoint>(&el)) {
        if (p->is_inf) return {Complex(0, 0), 0.0};
        const Complex w = p->z - x;
        return {w / std::norm(w), 0.0};
    }
    if (const auto* ce = std::get_if<CircleElement>(&el)) {
        const Complex dc = ce->center - x;
        const double s = std::norm(dc) - ce->radius * ce->radius;  // != 0 for interior x
        return {dc / s, ce->radius / std::fabs(s)};
    }
    const auto& le = std::get<LineElement>(el);
    const Complex rel = (x - le.through) / le.dir;
    const double h = rel.imag();  // signed distance, nonzero for interior x
    const Complex foot = le.through + rel.real() * le.dir;
    const Complex n = foot - x;  // |n| = |h|
    return {n / (2.0 * h * h), 1.0 / (2.0 * std::fabs(h))};
}

inline double disks_diameter(const std::vector<InvertedDisk>& ds) {
    double best = 0.0;
    for (size_t i = 0; i < ds.size(); ++i) {
        best = std::max(best, 2.0 * ds[i].radius);
        for (size_t j = i + 1; j < ds.size(); ++j)
            best = std::max(best, std::abs(ds[i].center - ds[j].center) + ds[i].radius + ds[j].radius);
    }
    return best;
}

}  // namespace detail

/// Ferrand density w_G(x) = sup_{a,b in dG} |a-b| / (|x-a||x-b|), computed as
/// the Euclidean diameter of the boundary inverted about x. Exact (the
/// inversion maps every boundary element to a circle or point); for sampled
/// boundaries the diameter of the inverted samples with a Lipschitz bound.
inline MetricValue ferrand_density(const DomainSpec& spec, const ExtendedPoint& x) {
    if (x.is_inf) throw DomainError("ferrand_density: x must be finite");
    detail::require_inside(spec, x, "ferrand_density");

    if (spec.kind == DomainKind::SampledBoundary) {
        double best = 0.0, diam = 0.0;
        const auto inv = invert_about(x, spec.points);
        for (size_t i = 0; i < inv.size(); ++i)
            for (size_t j = i + 1; j < inv.size(); ++j) {
                best = std::max(best, std::abs(inv[i].z - inv[j].z));
                diam = std::max(diam, std::abs(spec.points[i].z - spec.points[j].z));
            }
        const double d = boundary_distance(spec, x);
        const double lip = 2.0 / (d * d) * (1.0 + diam / d);
        return {best, spec.mesh_gap * lip};
    }

    std::vector<detail::InvertedDisk> disks;
    for (const auto& el : boundary_elements(spec))
        disks.push_back(detail::invert_element(el, x.z));
    if (disks.size() < 2 && !(disks.size() == 1 && disks[0].radius > 0.0))
        throw DomainError("ferrand_density: boundary must contain at least two points");
    return {detail::disks_diameter(disks), 0.0};
}

/// Exact hyperbolic distance where a closed form exists (disk, half-plane,
/// punctured disk, and their Mobius images via invariance); nullopt otherwise.
inline std::optional<MetricValue> hyperbolic_exact(const DomainSpec& spec, const ExtendedPoint& x,
                                                   const ExtendedPoint& y) {
    ExtendedPoint bx = x, by = y;
    if (spec.transform) {
        const MobiusMap inv = spec.transform->inverse();
        bx = inv(x);
        by = inv(y);
    }
    switch (spec.kind) {
        case DomainKind::UnitDisk: return hyperbolic_disk(bx, by);
        case DomainKind::HalfPlane: return hyperbolic_halfplane(bx, by);
        case DomainKind::PuncturedDisk: return hyperbolic_punctured_disk(bx, by);
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// The D-metric on E* = {0 < |z| <= 1/e}
// ---------------------------------------------------------------------------

/// D(z1,z2) = 2 sin(theta/2) / max(tau1, tau2) + |log tau2 - log tau1| with
/// tau_i = log(1/|z_i|) and theta = |arg(z2/z1)| in [0, pi].
inline MetricValue d_metric(const ExtendedPoint& z1, const ExtendedPoint& z2) {
    auto check = [](const ExtendedPoint& p) {
        if (p.is_inf || p.z == Complex(0, 0) || std::abs(p.z) > std::exp(-1.0) * (1.0 + 1e-12))
            throw DomainError("d_metric: point outside E* = {0 < |z| <= 1/e}");
    };
    check(z1);
    check(z2);
    if (z1.z == z2.z) return {0.0, 0.0};
    const double tau1 = std::log(1.0 / std::abs(z1.z));
    const double tau2 = std::log(1.0 / std::abs(z2.z));
    const double theta = std::fabs(std::arg(z2.z / z1.z));  // principal branch -> [0, pi]
    const double v = 2.0 * std::sin(theta / 2.0) / std::max(tau1, tau2) +
                     std::fabs(std::log(tau2) - std::log(tau1));
    return {v, 0.0};
}

}  // namespace confmetric
