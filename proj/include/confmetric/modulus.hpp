#pragma once

#include <map>
#include <memory>

#include "confmetric/path_metrics.hpp"
#include "confmetric/special.hpp"

namespace confmetric {

/// A family of curves connecting two node sets on a Cartesian grid carrier.
/// E and F may contain frontier nodes (masked-out lattice points adjacent to
/// the interior): curves start and end there but only run through masked-in
/// nodes, mirroring the convention that a joining curve has its interior in G.
struct CurveFamilySpec {
    std::shared_ptr<const GridGraph> carrier;
    std::vector<int> E, F;
};

/// Output of the discrete-modulus solve: the value, the optimal density as a
/// dual certificate, the shortest rho-length over the family at termination,
/// and the iteration count. `touching` flags degenerate configurations where
/// E and F meet within a lattice step (the value then diverges as the cell
/// shrinks and should not be read as a modulus).
struct ModulusEstimate {
    double value = 0.0;
    std::vector<double> density;
    double worst_path_length = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool empty_family = false;
    bool touching = false;
    int winner_candidate = -1;
};

namespace detail {

// Half-length coefficients of a path: rho-length(P) = sum_i c_i rho_i with
// c_i collecting len/2 from each incident path edge (trapezoid rule).
inline std::map<int, double> path_coefficients(const GridGraph& g,
                                               const std::vector<int>& nodes, double entry_len,
                                               double exit_len) {
    std::map<int, double> c;
    if (nodes.empty()) return c;
    c[nodes.front()] += entry_len / 2.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        const int a = nodes[i], b = nodes[i + 1];
        const int di = (b % g.nu) - (a % g.nu);
        int dj = (b / g.nu) - (a / g.nu);
        if (g.v_periodic) {
            if (dj > g.nv / 2) dj -= g.nv;
            if (dj < -g.nv / 2) dj += g.nv;
        }
        const double len = std::hypot((double)di, (double)dj) * g.cell;
        c[a] += len / 2.0;
        c[b] += len / 2.0;
    }
    c[nodes.back()] += exit_len / 2.0;
    return c;
}

}  // namespace detail

/// Discrete conformal modulus of the connecting family by cutting-plane
/// generation: minimize sum rho^2 * cellArea subject to unit rho-length on
/// every generated E-F path; the separation oracle is Dijkstra under edge
/// lengths rho ds, and the loop stops once the shortest rho-length reaches
/// 1 - feasibility_tol. The inner quadratic solve runs Hildreth dual
/// coordinate ascent on the accumulated constraints (warm-started, Gram
/// matrix maintained incrementally). The result is a lower-bound-style
/// estimate of the discrete optimum, exact as feasibility_tol -> 0.
inline ModulusEstimate discrete_modulus(const CurveFamilySpec& family,
                                        double feasibility_tol = 1e-3, int max_outer = 500,
                                        double inner_tol = 1e-8) {
    const GridGraph& g = *family.carrier;
    if (g.chart != GridChart::Cartesian)
        throw DomainError("discrete_modulus: carrier must be a Cartesian grid");
    if (family.E.empty() || family.F.empty())
        throw DomainError("discrete_modulus: E and F must be nonempty");
    const int n = g.nu * g.nv;
    const double cell_area = g.cell * g.cell;

    // Attachment edges: every E/F node links to itself (if masked in) or to
    // its masked-in 8-neighborhood (if frontier); the trapezoid against the
    // zero-density endpoint contributes rho(first)/2 * hop length.
    auto attachment = [&](const std::vector<int>& side) {
        std::map<int, double> best;  // masked node -> shortest hop length
        for (int id : side) {
            if (g.mask[id]) {
                best[id] = 0.0;
                continue;
            }
            const int i = id % g.nu, j = id / g.nu;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || ni >= g.nu || nj < 0 || nj >= g.nv) continue;
                    const int nid = g.index(ni, nj);
                    if (!g.mask[nid]) continue;
                    const double len = std::hypot((double)di, (double)dj) * g.cell;
                    auto it = best.find(nid);
                    if (it == best.end() || len < it->second) best[nid] = len;
                }
        }
        return best;
    };
    const std::map<int, double> enter = attachment(family.E);
    const std::map<int, double> leave = attachment(family.F);
    if (enter.empty() || leave.empty()) {
        ModulusEstimate empty;
        empty.empty_family = true;
        return empty;
    }

    ModulusEstimate est;
    for (const auto& [id, len] : enter)
        if (leave.count(id)) est.touching = true;

    std::vector<double> rho(n, 0.0);
    std::vector<std::map<int, double>> rows;  // constraint coefficients
    std::vector<double> lambda;               // dual multipliers
    std::vector<std::vector<double>> gram;    // pairwise row inner products
    std::vector<double> slack;                // c_p . rho, kept incrementally

    std::vector<double> dist;
    std::vector<int> prev;
    for (int outer = 0; outer < max_outer; ++outer) {
        std::vector<std::pair<int, double>> src;
        for (const auto& [id, len] : enter) src.emplace_back(id, 0.5 * rho[id] * len);
        grid_distance_field(g, rho, src, dist, prev);
        est.iterations = outer + 1;

        // Violated exits, most violated first.
        std::vector<std::pair<double, int>> exits;
        double shortest = std::numeric_limits<double>::infinity();
        for (const auto& [id, len] : leave) {
            const double total = dist[id] + 0.5 * rho[id] * len;
            shortest = std::min(shortest, total);
            if (total < 1.0 - feasibility_tol) exits.emplace_back(total, id);
        }
        if (!std::isfinite(shortest)) {
            est.empty_family = true;
            est.value = 0.0;
            return est;
        }
        est.worst_path_length = shortest;
        if (exits.empty()) break;
        if (outer == max_outer - 1) {
            est.value = 0.0;
            for (int i = 0; i < n; ++i) est.value += rho[i] * rho[i] * cell_area;
            est.density = rho;
            throw SolverError("discrete_modulus: iteration cap reached", est.value,
                              est.iterations);
        }
        std::sort(exits.begin(), exits.end());

        // Add up to 16 quasi-disjoint violated paths from this tree.
        std::vector<uint8_t> used(n, 0);
        int added = 0;
        for (const auto& [total, exit_id] : exits) {
            if (added >= 16) break;
            std::vector<int> nodes;
            for (int u = exit_id; u != -1; u = prev[u]) nodes.push_back(u);
            std::reverse(nodes.begin(), nodes.end());
            int overlap = 0;
            for (int u : nodes) overlap += used[u];
            if (added > 0 && overlap * 5 > (int)nodes.size() * 2) continue;  // > 40% shared
            for (int u : nodes) used[u] = 1;
            ++added;

            std::map<int, double> row = detail::path_coefficients(
                g, nodes, enter.at(nodes.front()), leave.at(nodes.back()));
            std::vector<double> gcol(rows.size() + 1, 0.0);
            for (size_t p = 0; p < rows.size(); ++p) {
                double dot = 0.0;
                for (const auto& [id, c] : row) {
                    auto it = rows[p].find(id);
                    if (it != rows[p].end()) dot += c * it->second;
                }
                gcol[p] = dot;
                gram[p].push_back(dot);
            }
            double self = 0.0, s0 = 0.0;
            for (const auto& [id, c] : row) {
                self += c * c;
                s0 += c * rho[id];
            }
            gcol[rows.size()] = self;
            gram.push_back(std::move(gcol));
            rows.push_back(std::move(row));
            lambda.push_back(0.0);
            slack.push_back(s0);
        }

        // Hildreth sweeps on the dual, warm-started from the previous lambda.
        const size_t P = rows.size();
        for (int sweep = 0; sweep < 600; ++sweep) {
            double worst = 0.0;
            for (size_t p = 0; p < P; ++p) {
                const double denom = gram[p][p] / (2.0 * cell_area);
                if (denom <= 0.0) continue;
                const double nl = std::max(0.0, lambda[p] + (1.0 - slack[p]) / denom);
                const double dl = nl - lambda[p];
                if (dl != 0.0) {
                    lambda[p] = nl;
                    for (size_t q = 0; q < P; ++q)
                        slack[q] += dl * gram[q][p] / (2.0 * cell_area);
                    worst = std::max(worst, std::fabs(dl) * denom);
                } else if (lambda[p] == 0.0) {
                    // inactive constraint; fine regardless of slack
                } else {
                    worst = std::max(worst, std::fabs(1.0 - slack[p]));
                }
            }
            if (worst <= inner_tol) break;
        }
        std::fill(rho.begin(), rho.end(), 0.0);
        for (size_t p = 0; p < P; ++p)
            if (lambda[p] > 0.0)
                for (const auto& [id, c] : rows[p]) rho[id] += lambda[p] * c / (2.0 * cell_area);
    }

    est.value = 0.0;
    for (int i = 0; i < n; ++i) est.value += rho[i] * rho[i] * cell_area;
    est.density = std::move(rho);
    return est;
}

/// Exact connector modulus of the round ring {inner < |z| < outer}:
/// M = 2 pi / log(outer/inner).
inline double ring_capacity_exact(double inner, double outer) {
    if (!(0.0 < inner && inner < outer))
        throw DomainError("ring_capacity_exact: need 0 < inner < outer");
    return 2.0 * kPi / std::log(outer / inner);
}

// ---------------------------------------------------------------------------
// Frontier extraction and family builders
// ---------------------------------------------------------------------------

/// Masked-out lattice nodes 8-adjacent to masked-in ones, tagged with the
/// index of the nearest boundary element (for splitting by component).
inline std::vector<std::pair<int, int>> frontier_nodes(const GridGraph& g) {
    const auto els = boundary_elements(g.domain);
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const int id = g.index(i, j);
            if (g.mask[id]) continue;
            bool adj = false;
            for (int dj = -1; dj <= 1 && !adj; ++dj)
                for (int di = -1; di <= 1 && !adj; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || ni >= g.nu || nj < 0 || nj >= g.nv) continue;
                    adj = g.mask[g.index(ni, nj)];
                }
            if (!adj) continue;
            const Complex z = g.node_plane(id);
            int nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (size_t e = 0; e < els.size(); ++e) {
                const double d = detail::element_distance(els[e], z);
                if (d < best) {
                    best = d;
                    nearest = (int)e;
                }
            }
            out.emplace_back(id, nearest);
        }
    return out;
}

/// Masked-in nodes within 0.75 cells of the straight segment [a, b].
inline std::vector<int> segment_nodes(const GridGraph& g, Complex a, Complex b) {
    std::vector<int> out;
    const Complex d = b - a;
    const double len2 = std::norm(d);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const int id = g.index(i, j);
            if (!g.mask[id]) continue;
            const Complex z = g.node_plane(id);
            double t = 0.0;
            if (len2 > 0.0)
                t = std::clamp(((z.real() - a.real()) * d.real() +
                                (z.imag() - a.imag()) * d.imag()) /
                                   len2,
                               0.0, 1.0);
            if (std::abs(z - (a + t * d)) <= 0.75 * g.cell) out.push_back(id);
        }
    if (out.empty()) out.push_back(snap_to_grid(g, point(0.5 * (a + b))));
    return out;
}

namespace detail {

// Lattice trace of a mapped curve: adaptive bisection of the parameter until
// consecutive chart images are within half a cell, snapping each image to the
// grid. Produces a contiguous footprint of masked nodes.
template <class CurveFn>
std::vector<int> trace_curve(const GridGraph& g, CurveFn&& curve, double t0, double t1) {
    std::vector<int> nodes;
    auto push = [&](const ExtendedPoint& p) {
        if (p.is_inf) return;
        try {
            const int id = snap_to_grid(g, p);
            if (nodes.empty() || nodes.back() != id) nodes.push_back(id);
        } catch (const DomainError&) {
            // off-lattice / unresolved stretch near the boundary
        }
    };
    struct Seg {
        double a, b;
        int depth;
    };
    std::vector<Seg> stack{{t0, t1, 0}};
    push(curve(t0));
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const ExtendedPoint pa = curve(s.a), pb = curve(s.b);
        double gap = std::numeric_limits<double>::infinity();
        if (pa.finite() && pb.finite()) gap = std::abs(pa.z - pb.z);
        if (gap <= 0.5 * g.cell || s.depth >= 22) {
            push(pb);
            continue;
        }
        const double m = 0.5 * (s.a + s.b);
        stack.push_back({m, s.b, s.depth + 1});
        stack.push_back({s.a, m, s.depth + 1});
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

inline ModulusEstimate condenser_to_boundary(const std::shared_ptr<const GridGraph>& g,
                                             const std::vector<int>& continuum,
                                             double feasibility_tol) {
    CurveFamilySpec fam;
    fam.carrier = g;
    fam.E = continuum;
    for (const auto& [id, el] : frontier_nodes(*g)) fam.F.push_back(id);
    return discrete_modulus(fam, feasibility_tol);
}

}  // namespace detail

/// Connector modulus of a two-circle ring domain on a fresh grid: E and F are
/// the frontier components nearest each circle element.
inline ModulusEstimate ring_modulus_numeric(const DomainSpec& ring, double cell,
                                            double feasibility_tol = 1e-3,
                                            StencilKind stencil = StencilKind::Sixteen) {
    const auto els = boundary_elements(ring);
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (const auto& el : els) {
        if (const auto* ce = std::get_if<CircleElement>(&el)) {
            lo_x = std::min(lo_x, ce->center.real() - ce->radius);
            hi_x = std::max(hi_x, ce->center.real() + ce->radius);
            lo_y = std::min(lo_y, ce->center.imag() - ce->radius);
            hi_y = std::max(hi_y, ce->center.imag() + ce->radius);
        }
    }
    if (lo_x > hi_x) throw DomainError("ring_modulus_numeric: no circle boundary");
    const double pad = 2 * cell;
    auto g = std::make_shared<GridGraph>(
        build_grid(ring, GridBBox{lo_x - pad, lo_y - pad, hi_x + pad, hi_y + pad}, cell, stencil));
    CurveFamilySpec fam;
    fam.carrier = g;
    for (const auto& [id, el] : frontier_nodes(*g)) {
        if (el == 0) fam.E.push_back(id);
        else fam.F.push_back(id);
    }
    return discrete_modulus(fam, feasibility_tol);
}

/// Estimate of the modulus metric mu_G(x,y): the minimum over a three-curve
/// candidate menu (straight segment when inside G, quasihyperbolic geodesic,
/// Ferrand geodesic) of the discrete modulus of curves joining the candidate
/// continuum to the whole boundary. An upper-bound-flavored estimate by
/// construction (the true infimum ranges over all connecting curves);
/// `winner_candidate` records the winning curve (0 segment, 1 k-geodesic,
/// 2 sigma-geodesic).
inline ModulusEstimate mu_metric_estimate(const DomainSpec& spec, const ExtendedPoint& x,
                                          const ExtendedPoint& y, double cell,
                                          double feasibility_tol = 1e-3) {
    detail::require_inside(spec, x, "mu_metric_estimate");
    detail::require_inside(spec, y, "mu_metric_estimate");
    const GridBBox box = detail::default_bbox(spec, x, y);
    auto g = std::make_shared<GridGraph>(build_grid(spec, box, cell));

    std::vector<std::pair<int, std::vector<int>>> candidates;
    {
        bool inside = true;
        for (int s = 0; s <= 64 && inside; ++s)
            inside = contains(spec, point(x.z + (y.z - x.z) * (s / 64.0)));
        if (inside) candidates.emplace_back(0, segment_nodes(*g, x.z, y.z));
    }
    if (!(x == y)) {
        for (int c = 1; c <= 2; ++c) {
            try {
                const auto gg = build_grid(spec, box, cell, StencilKind::Sixteen,
                                           c == 1 ? GridDensity::Quasihyperbolic
                                                  : GridDensity::Ferrand);
                const auto geo = geodesic_on_grid(gg, x, y);
                std::vector<int> nodes;
                for (const auto& z : geo.path) {
                    try {
                        const int id = snap_to_grid(*g, point(z));
                        if (nodes.empty() || nodes.back() != id) nodes.push_back(id);
                    } catch (const DomainError&) {
                        continue;
                    }
                }
                if (!nodes.empty()) candidates.emplace_back(c, std::move(nodes));
            } catch (const DomainError&) {
                // candidate unavailable at this resolution
            }
        }
    }
    if (candidates.empty()) candidates.emplace_back(0, std::vector<int>{snap_to_grid(*g, x)});

    ModulusEstimate best;
    bool have = false;
    for (auto& [tag, nodes] : candidates) {
        if (nodes.empty()) continue;
        ModulusEstimate e = detail::condenser_to_boundary(g, nodes, feasibility_tol);
        e.winner_candidate = tag;
        if (!have || e.value < best.value) {
            best = std::move(e);
            have = true;
        }
    }
    if (!have) throw SolverError("mu_metric_estimate: no usable candidate curve", 0.0, 0);
    return best;
}

/// Estimate of the Ferrand dual quantity lambda_G(x,y): minimum over
/// candidate pairs of disjoint boundary-reaching curves of the modulus of the
/// family connecting them. Two carrier families are supported: bounded
/// circle-boundary domains (radial candidates pointing away from the other
/// point) and two-point boundaries (both ray/segment pairings, normalized to
/// a bounded chart by a Mobius map before gridding).
inline ModulusEstimate lambda_metric_estimate(const DomainSpec& spec, const ExtendedPoint& x,
                                              const ExtendedPoint& y, double cell,
                                              double feasibility_tol = 1e-3) {
    detail::require_inside(spec, x, "lambda_metric_estimate");
    detail::require_inside(spec, y, "lambda_metric_estimate");
    if (x == y) throw DomainError("lambda_metric_estimate: points must be distinct");

    if (spec.kind == DomainKind::ComplementOfFiniteSet && spec.points.size() == 2 &&
        !spec.transform) {
        // Normalize the boundary to {0, inf} and y to -1; x lands at some s.
        const MobiusMap norm = mobius_from_triple({spec.points[0], spec.points[1], y},
                                                  {point(0, 0), inf_point(), point(-1, 0)});
        const ExtendedPoint xs = norm(x);
        if (xs.is_inf || xs.z == Complex(0, 0))
            throw DomainError("lambda_metric_estimate: degenerate configuration");
        const Complex s = xs.z;
        const Complex sdir = s / std::abs(s);
        const double scale = 1.0 + std::abs(s);

        // Candidate pairings in the normalized chart:
        //   0: A = ray [s, inf),  B = segment [-1, 0]
        //   1: A = segment [s, 0], B = ray [-1, -inf)
        ModulusEstimate best;
        bool have = false;
        for (int pairing = 0; pairing < 2; ++pairing) {
            // Chart pole away from both curve supports.
            Complex pole;
            if (pairing == 0) {
                pole = 0.5 * (s + Complex(-1, 0));
                if (std::abs(pole) < 0.05 * scale || std::abs(pole - s) < 0.05 * scale)
                    pole += Complex(0, 0.5) * scale;
            } else {
                pole = 2.0 * s + Complex(1, 0);
                if (std::abs(pole) < 0.05 * scale) pole += Complex(0, 0.5) * scale;
            }
            const MobiusMap chart(Complex(0), Complex(1), Complex(1), -pole);
            const DomainSpec img = transformed(complement_of({point(0, 0), inf_point()}), chart);

            // Bounded box from the mapped anchors.
            double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
            for (const ExtendedPoint& p :
                 {chart(xs), chart(point(-1, 0)), chart(point(0, 0)), chart(inf_point())}) {
                if (!p.finite()) continue;
                lo_x = std::min(lo_x, p.re());
                hi_x = std::max(hi_x, p.re());
                lo_y = std::min(lo_y, p.im());
                hi_y = std::max(hi_y, p.im());
            }
            const double span = std::max(hi_x - lo_x, std::max(hi_y - lo_y, 0.1));
            const GridBBox box{lo_x - 0.75 * span, lo_y - 0.75 * span, hi_x + 0.75 * span,
                               hi_y + 0.75 * span};
            auto gg = std::make_shared<GridGraph>(build_grid(img, box, cell));

            CurveFamilySpec fam;
            fam.carrier = gg;
            // t in [0,1); rays reach infinity through t/(1-t).
            auto ray = [&](Complex from, Complex dir) {
                return [&chart, from, dir](double t) {
                    const double u = t / (1.0 - t + 1e-12);
                    return chart(point(from + (u * 40.0) * dir));
                };
            };
            auto seg = [&](Complex from, Complex to) {
                return [&chart, from, to](double t) { return chart(point(from + t * (to - from))); };
            };
            if (pairing == 0) {
                fam.E = detail::trace_curve(*gg, ray(s, sdir), 0.0, 1.0);
                fam.F = detail::trace_curve(*gg, seg(Complex(-1, 0), Complex(0, 0)), 0.0, 1.0);
            } else {
                fam.E = detail::trace_curve(*gg, seg(s, Complex(0, 0)), 0.0, 1.0);
                fam.F = detail::trace_curve(*gg, ray(Complex(-1, 0), Complex(-1, 0)), 0.0, 1.0);
            }
            if (fam.E.empty() || fam.F.empty()) continue;
            try {
                ModulusEstimate e = discrete_modulus(fam, feasibility_tol);
                e.winner_candidate = pairing;
                if (!have || e.value < best.value) {
                    best = std::move(e);
                    have = true;
                }
            } catch (const SolverError&) {
                continue;
            }
        }
        if (!have) throw SolverError("lambda_metric_estimate: no usable pairing", 0.0, 0);
        return best;
    }

    // Bounded circle-boundary domains: radial candidates pointing away from
    // the other point.
    const GridBBox box = detail::default_bbox(spec, x, y);
    auto g = std::make_shared<GridGraph>(build_grid(spec, box, cell));
    auto radial_away = [&](const ExtendedPoint& from, const ExtendedPoint& other) {
        Complex dir = from.z - other.z;
        if (std::abs(dir) == 0.0) dir = Complex(1, 0);
        dir /= std::abs(dir);
        double t_hit = 0.0;
        while (contains(spec, point(from.z + (t_hit + 0.25 * cell) * dir)) && t_hit < 1e3)
            t_hit += 0.25 * cell;
        return segment_nodes(*g, from.z, from.z + t_hit * dir);
    };
    CurveFamilySpec fam;
    fam.carrier = g;
    fam.E = radial_away(x, y);
    fam.F = radial_away(y, x);
    if (fam.E.empty() || fam.F.empty())
        throw SolverError("lambda_metric_estimate: empty candidate curves", 0.0, 0);
    return discrete_modulus(fam, feasibility_tol);
}

/// Numeric Grotzsch ring capacity at t > 1: the ring between the unit circle
/// and the ray [t, inf] is normalized by inversion into the unit disk minus
/// the radial slit [0, 1/t]; the discrete modulus of curves joining the slit
/// to the circle frontier estimates gamma_2(t).
inline ModulusEstimate grotzsch_capacity_numeric(double t, double cell,
                                                 double feasibility_tol = 1e-3) {
    if (!(t > 1.0)) throw DomainError("grotzsch_capacity_numeric: t must be > 1");
    auto g = std::make_shared<GridGraph>(build_grid(unit_disk(), GridBBox{-1, -1, 1, 1}, cell));
    CurveFamilySpec fam;
    fam.carrier = g;
    fam.E = segment_nodes(*g, Complex(0, 0), Complex(1.0 / t, 0));
    for (const auto& [id, el] : frontier_nodes(*g)) fam.F.push_back(id);
    return discrete_modulus(fam, feasibility_tol);
}

}  // namespace confmetric
