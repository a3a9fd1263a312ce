#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <queue>
#include <vector>

#include "confmetric/point_metrics.hpp"

namespace confmetric {

/// Density choices for the weighted grid: quasihyperbolic 1/d_G or the
/// Ferrand density w_G.
enum class GridDensity { Quasihyperbolic, Ferrand };

/// Stencil quality levels. The move sets are chosen so that the worst-case
/// direction-quantization overestimate stays below 1.97% (level 8) and
/// 0.56% (level 16); an 8- or 16-direction lattice set cannot reach those
/// bounds, so the levels use 32 and 40 lattice directions respectively.
enum class StencilKind { Eight = 8, Sixteen = 16 };

namespace detail {

inline std::vector<std::pair<int, int>> stencil_moves(StencilKind kind) {
    // Octant generators; the full set is produced by the 8 symmetries.
    std::vector<std::pair<int, int>> gens = {{1, 0}, {3, 1}, {2, 1}, {3, 2}, {1, 1}};
    if (kind == StencilKind::Sixteen) gens.push_back({5, 1});
    std::vector<std::pair<int, int>> moves;
    for (auto [dx, dy] : gens) {
        const int sx[4] = {1, -1, 1, -1}, sy[4] = {1, 1, -1, -1};
        for (int s = 0; s < 4; ++s) {
            moves.emplace_back(sx[s] * dx, sy[s] * dy);
            moves.emplace_back(sx[s] * dy, sy[s] * dx);
        }
    }
    std::sort(moves.begin(), moves.end());
    moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
    return moves;
}

// Worst-case length overestimate of a straight run, 1/cos(half max angular
// gap) - 1, computed from the actual move set.
inline double stencil_bias_factor(StencilKind kind) {
    auto moves = stencil_moves(kind);
    std::vector<double> angles;
    for (auto [dx, dy] : moves) angles.push_back(std::atan2((double)dy, (double)dx));
    std::sort(angles.begin(), angles.end());
    double max_gap = 2.0 * kPi + angles.front() - angles.back();
    for (size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    return 1.0 / std::cos(max_gap / 2.0) - 1.0;
}

}  // namespace detail

/// Chart of the discretization. LogPolar covers several decades of radius
/// with a uniform lattice in (log r, arg); the angular coordinate is glued
/// periodically, so curves may wind around the origin.
enum class GridChart { Cartesian, LogPolar };

struct GridBBox {
    double u0, v0, u1, v1;  // chart coordinates
};

/// Weighted graph over a rectangular chart lattice. Nodes carry the metric
/// density (in chart units, Jacobian included); edges are stencil moves with
/// trapezoidal weights; masked-in nodes keep a margin of one local cell from
/// the boundary, and long moves are validity-checked along their segment.
struct GridGraph {
    DomainSpec domain;
    GridChart chart = GridChart::Cartesian;
    GridDensity density = GridDensity::Quasihyperbolic;
    StencilKind stencil = StencilKind::Sixteen;
    double cell = 0.0;
    double u0 = 0.0, v0 = 0.0;
    int nu = 0, nv = 0;
    bool v_periodic = false;
    std::vector<std::pair<int, int>> moves;
    std::vector<double> move_len;    // chart length per move, in cells
    double bias_factor = 0.0;
    std::vector<uint8_t> mask;
    std::vector<double> node_weight;         // density * chart Jacobian
    std::vector<uint64_t> edge_ok;           // per-node bitmask over moves
    int masked_count = 0;

    int index(int i, int j) const { return j * nu + i; }

    Complex chart_point(int i, int j) const {
        return Complex(u0 + i * cell, v0 + j * cell);
    }

    Complex node_plane(int id) const { return to_plane(chart_point(id % nu, id / nu)); }

    /// Metric density in plane units at a node (chart Jacobian removed).
    double plane_density_at(int id) const {
        if (chart == GridChart::Cartesian) return node_weight[id];
        return node_weight[id] / std::abs(node_plane(id));
    }

    Complex to_plane(Complex w) const {
        if (chart == GridChart::Cartesian) return w;
        return std::exp(Complex(w.real(), w.imag()));
    }

    Complex to_chart(Complex z) const {
        if (chart == GridChart::Cartesian) return z;
        return Complex(std::log(std::abs(z)), std::arg(z));
    }

    // Wraps the angular index when the chart is periodic; returns false when
    // the neighbor falls off the lattice.
    bool neighbor(int i, int j, int m, int& ni, int& nj) const {
        ni = i + moves[m].first;
        nj = j + moves[m].second;
        if (ni < 0 || ni >= nu) return false;
        if (v_periodic) {
            nj = ((nj % nv) + nv) % nv;
            return true;
        }
        return nj >= 0 && nj < nv;
    }

    double edge_weight(int a, int b, int m) const {
        return 0.5 * (node_weight[a] + node_weight[b]) * move_len[m] * cell;
    }
};

namespace detail {

inline double plane_density(const DomainSpec& spec, GridDensity kind, Complex z) {
    if (kind == GridDensity::Quasihyperbolic) return 1.0 / boundary_distance(spec, point(z));
    return ferrand_density(spec, point(z)).value;
}

}  // namespace detail

/// Builds the weighted grid over the given chart bounding box. Nodes are
/// masked in when they lie in the domain with boundary distance at least one
/// local cell; edges additionally require their whole segment to stay inside
/// with at least half that margin.
inline GridGraph build_grid(const DomainSpec& spec, const GridBBox& bbox, double cell,
                            StencilKind stencil = StencilKind::Sixteen,
                            GridDensity density = GridDensity::Quasihyperbolic,
                            GridChart chart = GridChart::Cartesian) {
    if (!(cell > 0.0)) throw DomainError("build_grid: cell size must be positive");

    GridGraph g;
    g.domain = spec;
    g.chart = chart;
    g.density = density;
    g.stencil = stencil;
    g.moves = detail::stencil_moves(stencil);
    g.bias_factor = detail::stencil_bias_factor(stencil);
    for (auto [dx, dy] : g.moves) g.move_len.push_back(std::hypot((double)dx, (double)dy));

    if (chart == GridChart::LogPolar) {
        // The angular direction spans exactly 2 pi with periodic gluing.
        g.nv = std::max(8, (int)std::llround(2.0 * kPi / cell));
        g.cell = 2.0 * kPi / g.nv;
        g.v0 = -kPi;
        g.v_periodic = true;
        g.u0 = bbox.u0;
        g.nu = std::max(2, (int)std::ceil((bbox.u1 - bbox.u0) / g.cell) + 1);
    } else {
        g.cell = cell;
        g.u0 = bbox.u0;
        g.v0 = bbox.v0;
        g.nu = std::max(2, (int)std::ceil((bbox.u1 - bbox.u0) / cell) + 1);
        g.nv = std::max(2, (int)std::ceil((bbox.v1 - bbox.v0) / cell) + 1);
    }

    const int n = g.nu * g.nv;
    g.mask.assign(n, 0);
    g.node_weight.assign(n, 0.0);
    g.edge_ok.assign(n, 0);
    if (g.moves.size() > 64) throw SolverError("build_grid: stencil too large", 0, 0);

    auto local_cell = [&](Complex z) {
        return chart == GridChart::Cartesian ? g.cell : g.cell * std::abs(z);
    };
    auto inside_with_margin = [&](Complex w, double factor) {
        const Complex z = g.to_plane(w);
        const ExtendedPoint p = point(z);
        if (!contains(spec, p)) return false;
        return boundary_distance(spec, p) >= factor * local_cell(z);
    };

    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const Complex w = g.chart_point(i, j);
            if (!inside_with_margin(w, 1.0)) continue;
            const int id = g.index(i, j);
            g.mask[id] = 1;
            ++g.masked_count;
            const Complex z = g.to_plane(w);
            double dens = detail::plane_density(spec, density, z);
            if (chart == GridChart::LogPolar) dens *= std::abs(z);  // chart Jacobian
            g.node_weight[id] = dens;
        }

    // Edge validity: both endpoints masked in, and intermediate samples of
    // the segment keep half the margin (prevents long moves from cutting
    // across thin complement features).
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const int id = g.index(i, j);
            if (!g.mask[id]) continue;
            const Complex w = g.chart_point(i, j);
            for (size_t m = 0; m < g.moves.size(); ++m) {
                int ni, nj;
                if (!g.neighbor(i, j, (int)m, ni, nj)) continue;
                const int nid = g.index(ni, nj);
                if (!g.mask[nid]) continue;
                bool ok = true;
                const int cheb = std::max(std::abs(g.moves[m].first), std::abs(g.moves[m].second));
                if (cheb >= 1) {
                    const Complex dw(g.moves[m].first * g.cell, g.moves[m].second * g.cell);
                    const int probes = 2 * cheb;
                    for (int s = 1; s < probes && ok; ++s)
                        ok = inside_with_margin(w + (double(s) / probes) * dw, 0.5);
                }
                if (ok) g.edge_ok[id] |= (uint64_t{1} << m);
            }
        }
    return g;
}

// ---------------------------------------------------------------------------
// Dijkstra
// ---------------------------------------------------------------------------

struct ShortestPath {
    double distance = std::numeric_limits<double>::infinity();
    std::vector<int> nodes;  // real lattice nodes, entry .. exit
};

namespace detail {

struct QueueEntry {
    double dist;
    int node;
    bool operator>(const QueueEntry& o) const { return dist > o.dist; }
};

}  // namespace detail

/// Dijkstra over the masked grid with trapezoidal edge weights under the
/// given per-node density vector. The search starts from a virtual source
/// attached to `src_edges` (node, cost) and stops at a virtual target fed by
/// `tgt_edges`; this lets callers attach off-lattice endpoints (query points,
/// boundary frontier sets) without detour bias.
inline ShortestPath grid_shortest_path(const GridGraph& g, const std::vector<double>& node_w,
                                       const std::vector<std::pair<int, double>>& src_edges,
                                       const std::vector<std::pair<int, double>>& tgt_edges) {
    const int n = g.nu * g.nv;
    std::vector<double> exit_cost(n, std::numeric_limits<double>::infinity());
    for (const auto& [node, cost] : tgt_edges)
        exit_cost[node] = std::min(exit_cost[node], cost);

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> prev(n, -1);
    std::priority_queue<detail::QueueEntry, std::vector<detail::QueueEntry>, std::greater<>> pq;
    for (const auto& [node, cost] : src_edges) {
        if (cost < dist[node]) {
            dist[node] = cost;
            pq.push({cost, node});
        }
    }
    double best_total = std::numeric_limits<double>::infinity();
    int best_exit = -1;
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (d >= best_total) break;  // no remaining node can improve the exit
        if (d + exit_cost[u] < best_total) {
            best_total = d + exit_cost[u];
            best_exit = u;
        }
        const int i = u % g.nu, j = u / g.nu;
        const uint64_t ok = g.edge_ok[u];
        for (size_t m = 0; m < g.moves.size(); ++m) {
            if (!(ok & (uint64_t{1} << m))) continue;
            int ni, nj;
            if (!g.neighbor(i, j, (int)m, ni, nj)) continue;
            const int v = g.index(ni, nj);
            const double nd = d + 0.5 * (node_w[u] + node_w[v]) * g.move_len[m] * g.cell;
            if (nd < dist[v]) {
                dist[v] = nd;
                prev[v] = u;
                pq.push({nd, v});
            }
        }
    }
    ShortestPath sp;
    if (best_exit >= 0) {
        sp.distance = best_total;
        for (int u = best_exit; u != -1; u = prev[u]) sp.nodes.push_back(u);
        std::reverse(sp.nodes.begin(), sp.nodes.end());
    }
    return sp;
}

/// Full Dijkstra distance field (no early exit) with predecessor links, for
/// callers that extract several shortest paths from one solve.
inline void grid_distance_field(const GridGraph& g, const std::vector<double>& node_w,
                                const std::vector<std::pair<int, double>>& src_edges,
                                std::vector<double>& dist, std::vector<int>& prev) {
    const int n = g.nu * g.nv;
    dist.assign(n, std::numeric_limits<double>::infinity());
    prev.assign(n, -1);
    std::priority_queue<detail::QueueEntry, std::vector<detail::QueueEntry>, std::greater<>> pq;
    for (const auto& [node, cost] : src_edges) {
        if (cost < dist[node]) {
            dist[node] = cost;
            pq.push({cost, node});
        }
    }
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        const int i = u % g.nu, j = u / g.nu;
        const uint64_t ok = g.edge_ok[u];
        for (size_t m = 0; m < g.moves.size(); ++m) {
            if (!(ok & (uint64_t{1} << m))) continue;
            int ni, nj;
            if (!g.neighbor(i, j, (int)m, ni, nj)) continue;
            const int v = g.index(ni, nj);
            const double nd = d + 0.5 * (node_w[u] + node_w[v]) * g.move_len[m] * g.cell;
            if (nd < dist[v]) {
                dist[v] = nd;
                prev[v] = u;
                pq.push({nd, v});
            }
        }
    }
}

/// Masked-in nodes within a small chart window of a plane point. Throws a
/// resolution-too-coarse error when the nearest one is farther than about a
/// lattice cell, i.e. the query sits in unresolved territory.
inline std::vector<int> nearby_nodes(const GridGraph& g, const ExtendedPoint& x, int window = 2) {
    if (x.is_inf) throw DomainError("nearby_nodes: point at infinity");
    const Complex w = g.to_chart(x.z);
    const int ci = (int)std::llround((w.real() - g.u0) / g.cell);
    const int cj0 = (int)std::llround((w.imag() - g.v0) / g.cell);
    std::vector<int> out;
    double nearest = std::numeric_limits<double>::infinity();
    for (int dj = -window; dj <= window; ++dj)
        for (int di = -window; di <= window; ++di) {
            const int i = ci + di;
            int j = cj0 + dj;
            if (i < 0 || i >= g.nu) continue;
            if (g.v_periodic) j = ((j % g.nv) + g.nv) % g.nv;
            else if (j < 0 || j >= g.nv) continue;
            const int id = g.index(i, j);
            if (!g.mask[id]) continue;
            out.push_back(id);
            const Complex zw = g.chart_point(i, j);
            double du = zw.real() - w.real();
            double dv = zw.imag() - w.imag();
            if (g.v_periodic) dv = std::remainder(dv, 2.0 * kPi);
            nearest = std::min(nearest, std::hypot(du, dv));
        }
    if (out.empty() || nearest > 1.26 * g.cell)
        throw DomainError("grid solve: resolution too coarse near the query point");
    return out;
}

/// Nearest masked-in node to a plane point.
inline int snap_to_grid(const GridGraph& g, const ExtendedPoint& x) {
    const auto cands = nearby_nodes(g, x);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int id : cands) {
        const double d = std::abs(g.node_plane(id) - x.z);
        if (d < best_d) {
            best_d = d;
            best = id;
        }
    }
    return best;
}

}  // namespace confmetric
