#pragma once

// Shared corpus generators and independent oracles for the test suites. The
// oracles deliberately avoid the library code paths they check: geodesics are
// re-derived with Floyd-Warshall, time stepping with the scalar recurrence in
// the eigenbasis, intersection lengths by dense sampling.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "roadfield/geometry.hpp"
#include "roadfield/meshing.hpp"
#include "roadfield/network.hpp"
#include "roadfield/rng.hpp"

namespace rftest {

using roadfield::Point2;
using roadfield::RoadNetwork;
using roadfield::Rng;

inline roadfield::DomainGeometry unit_square() {
    return {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
}

inline roadfield::DomainGeometry l_shape() {
    return {{{0.0, 0.0}, {2.0, 0.0}, {2.0, 1.0}, {1.0, 1.0}, {1.0, 2.0}, {0.0, 2.0}}};
}

/// Horizontal mid-segment road across the unit square.
inline RoadNetwork midline_network() {
    RoadNetwork net;
    net.vertices = {{0.0, 0.5}, {1.0, 0.5}};
    net.edges = {{0, 1}};
    net.boundary_vertex_flags = {1, 1};
    return net;
}

/// Axis-aligned plus sign centered in the unit square, fully interior.
inline RoadNetwork cross_network(double r = 0.3) {
    RoadNetwork net;
    net.vertices = {{0.5, 0.5}, {0.5 - r, 0.5}, {0.5 + r, 0.5}, {0.5, 0.5 - r}, {0.5, 0.5 + r}};
    net.edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    net.boundary_vertex_flags = {0, 0, 0, 0, 0};
    return net;
}

/// Diagonal segment for the L-shaped domain.
inline RoadNetwork l_shape_segment() {
    RoadNetwork net;
    net.vertices = {{0.3, 0.3}, {1.5, 0.6}};
    net.edges = {{0, 1}};
    net.boundary_vertex_flags = {0, 0};
    return net;
}

/// Random interior tree on n vertices inside the unit square. Only validity
/// is enforced (connected, non-crossing); geometry may still be awkward for
/// meshing, see benign_tree_network below.
inline RoadNetwork random_tree_network(Rng& rng, int n) {
    for (int attempt = 0; attempt < 400; ++attempt) {
        RoadNetwork net;
        for (int i = 0; i < n; ++i) {
            net.vertices.push_back({rng.uniform(0.12, 0.88), rng.uniform(0.12, 0.88)});
            net.boundary_vertex_flags.push_back(0);
        }
        for (int i = 1; i < n; ++i) {
            net.edges.push_back({static_cast<int>(rng.below(i)), i});
        }
        if (roadfield::validate_network(net).valid()) return net;
    }
    // Fallback: a path graph is always valid when the points are distinct.
    RoadNetwork net;
    for (int i = 0; i < n; ++i) {
        net.vertices.push_back({0.15 + 0.7 * i / std::max(1, n - 1), 0.5});
        net.boundary_vertex_flags.push_back(0);
    }
    for (int i = 1; i < n; ++i) net.edges.push_back({i - 1, i});
    return net;
}

/// True when the network is comfortably meshable: edges well separated from
/// each other and long enough that constrained refinement stays tame.
inline bool network_is_benign(const RoadNetwork& net) {
    const int ne = static_cast<int>(net.edges.size());
    for (int e = 0; e < ne; ++e) {
        if (roadfield::edge_length(net, e) < 0.12) return false;
    }
    // Angles between edges sharing a vertex stay away from slivers.
    for (int e = 0; e < ne; ++e) {
        for (int f = e + 1; f < ne; ++f) {
            int shared = -1, pe = -1, pf = -1;
            for (int i : {0, 1}) {
                for (int j : {0, 1}) {
                    if (net.edges[e][i] == net.edges[f][j]) {
                        shared = net.edges[e][i];
                        pe = net.edges[e][1 - i];
                        pf = net.edges[f][1 - j];
                    }
                }
            }
            if (shared >= 0) {
                const Point2 u = net.vertices[pe] - net.vertices[shared];
                const Point2 v = net.vertices[pf] - net.vertices[shared];
                const double c = roadfield::dot(u, v) / (roadfield::norm(u) * roadfield::norm(v));
                if (c > std::cos(35.0 * M_PI / 180.0)) return false;
            } else {
                // Disjoint edges keep clear of each other.
                double d = 1e300;
                const Point2 a1 = net.vertices[net.edges[e][0]], a2 = net.vertices[net.edges[e][1]];
                const Point2 b1 = net.vertices[net.edges[f][0]], b2 = net.vertices[net.edges[f][1]];
                d = std::min(d, roadfield::point_segment_distance(a1, b1, b2));
                d = std::min(d, roadfield::point_segment_distance(a2, b1, b2));
                d = std::min(d, roadfield::point_segment_distance(b1, a1, a2));
                d = std::min(d, roadfield::point_segment_distance(b2, a1, a2));
                if (d < 0.08) return false;
            }
        }
    }
    return true;
}

/// Random tree filtered for meshability. Used for every corpus that feeds a
/// triangulation.
inline RoadNetwork benign_tree_network(Rng& rng, int n) {
    for (int attempt = 0; attempt < 2000; ++attempt) {
        RoadNetwork net = random_tree_network(rng, n);
        if (network_is_benign(net)) return net;
    }
    return midline_network();
}

inline roadfield::NetworkFunction random_network_function(Rng& rng, std::size_t n) {
    roadfield::NetworkFunction f;
    f.values.resize(n);
    for (auto& v : f.values) v = rng.signed_unit();
    return f;
}

/// All-pairs shortest path oracle over the network's vertices.
inline std::vector<std::vector<double>> floyd_warshall(const RoadNetwork& net) {
    const int n = static_cast<int>(net.vertices.size());
    const double inf = 1e300;
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (int i = 0; i < n; ++i) d[i][i] = 0.0;
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        const int i = net.edges[e][0], j = net.edges[e][1];
        const double len = roadfield::edge_length(net, static_cast<int>(e));
        d[i][j] = std::min(d[i][j], len);
        d[j][i] = std::min(d[j][i], len);
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

/// Dense-sampling oracle for the disk-segment intersection length.
inline double sampled_disk_intersection(Point2 a, Point2 b, Point2 c, double r, int samples) {
    const double len = roadfield::distance(a, b);
    int inside = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = (i + 0.5) / samples;
        const Point2 p = a + t * (b - a);
        if (roadfield::distance(p, c) <= r) ++inside;
    }
    return len * inside / samples;
}

} // namespace rftest
