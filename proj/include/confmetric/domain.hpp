#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "confmetric/mobius.hpp"

namespace confmetric {

enum class DomainKind {
    UnitDisk,
    HalfPlane,       // upper half-plane Im z > 0
    PuncturedDisk,   // unit disk minus its center
    Annulus,
    ComplementOfFiniteSet,
    SampledBoundary,
};

/// One exactly-representable piece of a domain boundary. Mobius images of
/// circles and lines stay in this family, which keeps boundary distances and
/// Ferrand densities exact for all named domains, transformed or not.
struct CircleElement {
    Complex center;
    double radius;
};
struct LineElement {
    Complex through;
    Complex dir;  // unit direction; the line implicitly passes through infinity
};
using BoundaryElement = std::variant<CircleElement, LineElement, ExtendedPoint>;

/// A domain of the extended plane with an exact or sampled boundary oracle.
/// `transform`, when present, means the domain is the image of the base
/// variant under that Mobius map.
struct DomainSpec {
    DomainKind kind = DomainKind::UnitDisk;
    double inner = 0.0, outer = 0.0;           // Annulus radii
    std::vector<ExtendedPoint> points;         // finite-set boundary / samples
    double mesh_gap = 0.0;                     // SampledBoundary resolution
    ExtendedPoint interior_witness;            // SampledBoundary inside marker
    std::optional<MobiusMap> transform;

    std::string name() const;
};

inline DomainSpec unit_disk() { return DomainSpec{DomainKind::UnitDisk}; }
inline DomainSpec half_plane() { return DomainSpec{DomainKind::HalfPlane}; }
inline DomainSpec punctured_disk() { return DomainSpec{DomainKind::PuncturedDisk}; }

inline DomainSpec annulus(double inner, double outer) {
    if (!(inner > 0.0 && inner < outer)) throw DomainError("annulus: need 0 < inner < outer");
    DomainSpec s{DomainKind::Annulus};
    s.inner = inner;
    s.outer = outer;
    return s;
}

inline DomainSpec complement_of(std::vector<ExtendedPoint> pts) {
    if (pts.size() < 2) throw DomainError("complement_of: at least two boundary points required");
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i] == pts[j]) throw DomainError("complement_of: boundary points must be distinct");
    DomainSpec s{DomainKind::ComplementOfFiniteSet};
    s.points = std::move(pts);
    return s;
}

inline DomainSpec sampled_boundary(std::vector<ExtendedPoint> samples, double mesh_gap,
                                   ExtendedPoint witness) {
    if (samples.size() < 3) throw DomainError("sampled_boundary: need at least 3 samples");
    if (!(mesh_gap > 0.0)) throw DomainError("sampled_boundary: mesh gap must be positive");
    for (const auto& s : samples) {
        if (s.is_inf) throw DomainError("sampled_boundary: samples must be finite");
        if (!witness.is_inf && std::abs(s.z - witness.z) <= mesh_gap)
            throw DomainError("sampled_boundary: witness too close to boundary samples");
    }
    DomainSpec spec{DomainKind::SampledBoundary};
    spec.points = std::move(samples);
    spec.mesh_gap = mesh_gap;
    spec.interior_witness = witness;
    return spec;
}

/// Image of a domain under a Mobius map (transforms compose).
inline DomainSpec transformed(DomainSpec base, const MobiusMap& map) {
    base.transform = base.transform ? (map * *base.transform) : map;
    return base;
}

inline std::string DomainSpec::name() const {
    std::string n;
    switch (kind) {
        case DomainKind::UnitDisk: n = "disk"; break;
        case DomainKind::HalfPlane: n = "half-plane"; break;
        case DomainKind::PuncturedDisk: n = "punctured-disk"; break;
        case DomainKind::Annulus: n = "annulus"; break;
        case DomainKind::ComplementOfFiniteSet: n = "complement-of-finite-set"; break;
        case DomainKind::SampledBoundary: n = "sampled-boundary"; break;
    }
    if (transform) n += "+mobius";
    return n;
}

// ---------------------------------------------------------------------------
// Boundary elements
// ---------------------------------------------------------------------------

namespace detail {

// Circle or line through three distinct extended points.
inline BoundaryElement circle_through(const ExtendedPoint& p1, const ExtendedPoint& p2,
                                      const ExtendedPoint& p3) {
    // A point at infinity forces a line through the two finite points.
    const ExtendedPoint* fin[3];
    int nfin = 0;
    for (const ExtendedPoint* p : {&p1, &p2, &p3})
        if (!p->is_inf) fin[nfin++] = p;
    if (nfin == 2) {
        const Complex d = fin[1]->z - fin[0]->z;
        return LineElement{fin[0]->z, d / std::abs(d)};
    }
    if (nfin < 2) throw DegenerateConfiguration("circle_through: too many infinite points");

    const Complex a = p1.z, b = p2.z, c = p3.z;
    const Complex u = b - a, v = c - a;
    const double cross = u.real() * v.imag() - u.imag() * v.real();
    const double scale = std::abs(u) * std::abs(v);
    if (std::fabs(cross) <= 1e-12 * std::max(scale, kAbsFloor)) {
        const Complex d = u / std::abs(u);
        return LineElement{a, d};
    }
    // Circumcenter via the standard determinant formula.
    const double nu = std::norm(u), nv = std::norm(v);
    const double denom = 2.0 * cross;
    const Complex center = a + Complex(v.imag() * nu - u.imag() * nv,
                                       u.real() * nv - v.real() * nu) / denom;
    return CircleElement{center, std::abs(a - center)};
}

inline BoundaryElement map_element(const BoundaryElement& el, const MobiusMap& f) {
    if (std::holds_alternative<ExtendedPoint>(el)) return f(std::get<ExtendedPoint>(el));
    ExtendedPoint q1, q2, q3;
    if (const auto* ce = std::get_if<CircleElement>(&el)) {
        q1 = f(point(ce->center + Complex(ce->radius, 0)));
        q2 = f(point(ce->center + Complex(0, ce->radius)));
        q3 = f(point(ce->center - Complex(ce->radius, 0)));
    } else {
        const auto& le = std::get<LineElement>(el);
        q1 = f(point(le.through));
        q2 = f(point(le.through + le.dir));
        q3 = f(inf_point());  // the line passes through infinity
    }
    return circle_through(q1, q2, q3);
}

}  // namespace detail

/// The exact boundary pieces of an element-backed domain (everything except
/// SampledBoundary), already pushed through any attached Mobius map.
inline std::vector<BoundaryElement> boundary_elements(const DomainSpec& spec) {
    std::vector<BoundaryElement> els;
    switch (spec.kind) {
        case DomainKind::UnitDisk:
            els.push_back(CircleElement{Complex(0, 0), 1.0});
            break;
        case DomainKind::HalfPlane:
            els.push_back(LineElement{Complex(0, 0), Complex(1, 0)});
            break;
        case DomainKind::PuncturedDisk:
            els.push_back(CircleElement{Complex(0, 0), 1.0});
            els.push_back(BoundaryElement{point(0.0, 0.0)});
            break;
        case DomainKind::Annulus:
            els.push_back(CircleElement{Complex(0, 0), spec.inner});
            els.push_back(CircleElement{Complex(0, 0), spec.outer});
            break;
        case DomainKind::ComplementOfFiniteSet:
            for (const auto& p : spec.points) els.push_back(BoundaryElement{p});
            break;
        case DomainKind::SampledBoundary:
            throw DomainError("boundary_elements: sampled boundaries have no exact elements");
    }
    if (spec.transform)
        for (auto& el : els) el = detail::map_element(el, *spec.transform);
    return els;
}

inline bool has_exact_elements(const DomainSpec& spec) {
    return spec.kind != DomainKind::SampledBoundary;
}

/// True when the boundary contains the point at infinity (isolated or on a
/// line element).
inline bool boundary_contains_infinity(const DomainSpec& spec) {
    if (spec.kind == DomainKind::SampledBoundary) return false;
    for (const auto& el : boundary_elements(spec)) {
        if (std::holds_alternative<LineElement>(el)) return true;
        if (const auto* p = std::get_if<ExtendedPoint>(&el); p && p->is_inf) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Membership and boundary distance
// ---------------------------------------------------------------------------

namespace detail {

inline bool base_contains(const DomainSpec& spec, const ExtendedPoint& x) {
    switch (spec.kind) {
        case DomainKind::UnitDisk:
            return x.finite() && std::abs(x.z) < 1.0;
        case DomainKind::HalfPlane:
            return x.finite() && x.im() > 0.0;
        case DomainKind::PuncturedDisk:
            return x.finite() && x.z != Complex(0, 0) && std::abs(x.z) < 1.0;
        case DomainKind::Annulus:
            return x.finite() && std::abs(x.z) > spec.inner && std::abs(x.z) < spec.outer;
        case DomainKind::ComplementOfFiniteSet:
            for (const auto& p : spec.points)
                if (p == x) return false;
            return true;
        case DomainKind::SampledBoundary: {
            if (x.is_inf) return false;
            // Even-odd ray cast against the polygonal sample loop; the
            // interior witness fixes which parity class is "inside".
            auto parity = [&](Complex q) {
                bool in = false;
                const auto& s = spec.points;
                for (size_t i = 0, j = s.size() - 1; i < s.size(); j = i++) {
                    const Complex a = s[i].z, b = s[j].z;
                    if ((a.imag() > q.imag()) != (b.imag() > q.imag())) {
                        const double t = (q.imag() - a.imag()) / (b.imag() - a.imag());
                        if (q.real() < a.real() + t * (b.real() - a.real())) in = !in;
                    }
                }
                return in;
            };
            return parity(x.z) == parity(spec.interior_witness.z);
        }
    }
    return false;
}

inline double element_distance(const BoundaryElement& el, Complex x) {
    if (const auto* ce = std::get_if<CircleElement>(&el))
        return std::fabs(std::abs(x - ce->center) - ce->radius);
    if (const auto* le = std::get_if<LineElement>(&el)) {
        const Complex rel = (x - le->through) / le->dir;
        return std::fabs(rel.imag());
    }
    const auto& p = std::get<ExtendedPoint>(el);
    if (p.is_inf) return std::numeric_limits<double>::infinity();
    return std::abs(x - p.z);
}

}  // namespace detail

inline bool contains(const DomainSpec& spec, const ExtendedPoint& x) {
    if (!spec.transform) return detail::base_contains(spec, x);
    return detail::base_contains(spec, spec.transform->inverse()(x));
}

/// Euclidean distance from an interior point to the boundary. Exact for all
/// element-backed variants (including Mobius images); for sampled boundaries
/// it is the sample minimum, accurate to mesh_gap.
inline double boundary_distance(const DomainSpec& spec, const ExtendedPoint& x) {
    if (x.is_inf)
        throw DomainError("boundary_distance: point at infinity; Mobius-normalize first");
    if (!contains(spec, x)) throw DomainError("boundary_distance: point outside the domain");

    double best = std::numeric_limits<double>::infinity();
    if (spec.kind == DomainKind::SampledBoundary) {
        for (const auto& s : spec.points) best = std::min(best, std::abs(x.z - s.z));
    } else {
        for (const auto& el : boundary_elements(spec))
            best = std::min(best, detail::element_distance(el, x.z));
    }
    if (!std::isfinite(best))
        throw DomainError("boundary_distance: boundary has no finite point");
    return best;
}

// ---------------------------------------------------------------------------
// Boundary enumeration
// ---------------------------------------------------------------------------

/// A concrete enumeration of boundary points: all isolated points exactly,
/// plus m equispaced samples per circle (or tan-spread samples per line).
/// `exact` is true only when the boundary is a finite point set.
struct BoundaryView {
    std::vector<ExtendedPoint> points;
    bool exact = false;
    double mesh_gap = 0.0;
};

inline BoundaryView boundary_view(const DomainSpec& spec, int m) {
    if (m < 2) throw DomainError("boundary_view: m must be >= 2");
    BoundaryView view;
    if (spec.kind == DomainKind::SampledBoundary) {
        view.points = spec.points;
        view.mesh_gap = spec.mesh_gap;
        return view;
    }
    bool all_points = true;
    for (const auto& el : boundary_elements(spec)) {
        if (const auto* ce = std::get_if<CircleElement>(&el)) {
            all_points = false;
            for (int k = 0; k < m; ++k) {
                const double th = 2.0 * kPi * k / m;
                view.points.push_back(point(ce->center + ce->radius * Complex(std::cos(th), std::sin(th))));
            }
            // Worst-case distance from the circle to its sample set.
            view.mesh_gap = std::max(view.mesh_gap, 2.0 * ce->radius * std::sin(kPi / (2.0 * m)));
        } else if (const auto* le = std::get_if<LineElement>(&el)) {
            all_points = false;
            for (int k = 0; k < m; ++k) {
                const double th = -kPi / 2.0 + kPi * (k + 0.5) / m;
                view.points.push_back(point(le->through + std::tan(th) * le->dir));
            }
            view.points.push_back(inf_point());
            view.mesh_gap = std::numeric_limits<double>::infinity();  // unbounded component
        } else {
            view.points.push_back(std::get<ExtendedPoint>(el));
        }
    }
    view.exact = all_points;
    if (view.exact) view.mesh_gap = 0.0;
    return view;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Returns a Mobius-equivalent domain whose boundary contains infinity,
/// together with the map used (identity when already satisfied).
inline std::pair<DomainSpec, MobiusMap> normalize_infinity_to_boundary(const DomainSpec& spec) {
    if (spec.kind != DomainKind::SampledBoundary && boundary_contains_infinity(spec))
        return {spec, MobiusMap::identity()};

    // Pick a finite boundary point p and send it to infinity with 1/(z - p).
    Complex p;
    if (spec.kind == DomainKind::SampledBoundary) {
        p = spec.points.front().z;
    } else {
        const auto els = boundary_elements(spec);
        // Prefer an isolated point (it maps to a clean isolated infinity).
        const CircleElement* circle = nullptr;
        const ExtendedPoint* isolated = nullptr;
        for (const auto& el : els) {
            if (const auto* pt = std::get_if<ExtendedPoint>(&el); pt && pt->finite() && !isolated)
                isolated = pt;
            if (const auto* ce = std::get_if<CircleElement>(&el); ce && !circle) circle = ce;
        }
        if (isolated) p = isolated->z;
        else if (circle) p = circle->center + Complex(circle->radius, 0);
        else throw DomainError("normalize_infinity_to_boundary: no finite boundary point");
    }
    const MobiusMap f(Complex(0), Complex(1), Complex(1), -p);
    return {transformed(spec, f), f};
}

// ---------------------------------------------------------------------------
// JSON domain-spec files
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json point_to_json(const ExtendedPoint& p) {
    if (p.is_inf) return "inf";
    return nlohmann::json::array({p.re(), p.im()});
}

inline ExtendedPoint point_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return inf_point();
        throw DomainError("domain spec: unknown point token '" + j.get<std::string>() + "'");
    }
    if (!j.is_array() || j.size() != 2)
        throw DomainError("domain spec: points must be [re, im] or \"inf\"");
    return point(j[0].get<double>(), j[1].get<double>());
}

}  // namespace detail

inline nlohmann::json to_json(const DomainSpec& spec) {
    nlohmann::json j;
    switch (spec.kind) {
        case DomainKind::UnitDisk: j["type"] = "disk"; break;
        case DomainKind::HalfPlane: j["type"] = "half-plane"; break;
        case DomainKind::PuncturedDisk: j["type"] = "punctured-disk"; break;
        case DomainKind::Annulus:
            j["type"] = "annulus";
            j["inner"] = spec.inner;
            j["outer"] = spec.outer;
            break;
        case DomainKind::ComplementOfFiniteSet: {
            j["type"] = "complement-of-finite-set";
            auto arr = nlohmann::json::array();
            for (const auto& p : spec.points) arr.push_back(detail::point_to_json(p));
            j["points"] = arr;
            break;
        }
        case DomainKind::SampledBoundary: {
            j["type"] = "sampled-boundary";
            auto arr = nlohmann::json::array();
            for (const auto& p : spec.points) arr.push_back(detail::point_to_json(p));
            j["samples"] = arr;
            j["meshGap"] = spec.mesh_gap;
            j["interiorWitness"] = detail::point_to_json(spec.interior_witness);
            break;
        }
    }
    if (spec.transform) {
        const auto& f = *spec.transform;
        j["mobius"] = {{"a", {f.a.real(), f.a.imag()}},
                       {"b", {f.b.real(), f.b.imag()}},
                       {"c", {f.c.real(), f.c.imag()}},
                       {"d", {f.d.real(), f.d.imag()}}};
    }
    return j;
}

inline DomainSpec domain_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    DomainSpec spec;
    if (type == "disk") spec = unit_disk();
    else if (type == "half-plane") spec = half_plane();
    else if (type == "punctured-disk") spec = punctured_disk();
    else if (type == "annulus") spec = annulus(j.at("inner").get<double>(), j.at("outer").get<double>());
    else if (type == "complement-of-finite-set") {
        std::vector<ExtendedPoint> pts;
        for (const auto& e : j.at("points")) pts.push_back(detail::point_from_json(e));
        spec = complement_of(std::move(pts));
    } else if (type == "sampled-boundary") {
        std::vector<ExtendedPoint> pts;
        for (const auto& e : j.at("samples")) pts.push_back(detail::point_from_json(e));
        spec = sampled_boundary(std::move(pts), j.at("meshGap").get<double>(),
                                detail::point_from_json(j.at("interiorWitness")));
    } else {
        throw DomainError("domain spec: unknown type '" + type + "'");
    }
    if (j.contains("mobius")) {
        auto c = [&](const char* k) {
            const auto& v = j["mobius"].at(k);
            return Complex(v[0].get<double>(), v[1].get<double>());
        };
        spec.transform = MobiusMap(c("a"), c("b"), c("c"), c("d"));
    }
    return spec;
}

}  // namespace confmetric
