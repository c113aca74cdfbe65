#include "roadfield/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

#include "roadfield/errors.hpp"

namespace roadfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double network_diameter_scale(const RoadNetwork& net) {
    if (net.vertices.empty()) return 1.0;
    BoundingBox bb = bounding_box(net.vertices);
    double d = bb.diameter();
    return d > 0.0 ? d : 1.0;
}

bool edge_in_range(const RoadNetwork& net, int e) {
    if (e < 0 || e >= static_cast<int>(net.edges.size())) return false;
    auto [i, j] = net.edges[e];
    int n = static_cast<int>(net.vertices.size());
    return i >= 0 && i < n && j >= 0 && j < n;
}

void require_edge(const RoadNetwork& net, int e, const char* op) {
    if (!edge_in_range(net, e))
        throw DomainError("network", op, "edge index " + std::to_string(e) + " out of range");
}

/// Total length of K inside the open disk B(c, r).
double ball_length(const RoadNetwork& net, Point2 c, double r) {
    double total = 0.0;
    for (const auto& e : net.edges)
        total += segment_disk_intersection_length(net.vertices[e[0]], net.vertices[e[1]], c, r);
    return total;
}

std::vector<std::vector<std::pair<int, double>>> adjacency(const RoadNetwork& net) {
    std::vector<std::vector<std::pair<int, double>>> adj(net.vertices.size());
    for (size_t e = 0; e < net.edges.size(); ++e) {
        auto [i, j] = net.edges[e];
        double len = distance(net.vertices[i], net.vertices[j]);
        adj[i].push_back({j, len});
        adj[j].push_back({i, len});
    }
    return adj;
}

std::vector<double> dijkstra(const std::vector<std::vector<std::pair<int, double>>>& adj,
                             const std::vector<std::pair<int, double>>& seeds) {
    std::vector<double> dist(adj.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (auto [v, d] : seeds) {
        if (d < dist[v]) {
            dist[v] = d;
            pq.push({d, v});
        }
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        for (auto [w, len] : adj[v]) {
            double nd = d + len;
            if (nd < dist[w]) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        }
    }
    return dist;
}

} // namespace

std::string NetworkValidation::describe() const {
    std::ostringstream os;
    os << "valid=" << (valid() ? "true" : "false") << '\n'
       << "has_edges=" << (has_edges ? "true" : "false") << '\n'
       << "connected=" << (connected ? "true" : "false") << '\n'
       << "flag_count_matches=" << (vertex_counts_match ? "true" : "false") << '\n'
       << "out_of_range_edges=" << out_of_range_edges.size() << '\n'
       << "zero_length_edges=" << zero_length_edges.size() << '\n'
       << "duplicate_edge_pairs=" << duplicate_edge_pairs.size() << '\n'
       << "crossing_edge_pairs=" << crossing_edge_pairs.size();
    if (!crossing_edge_pairs.empty())
        os << "\nfirst_crossing_pair=" << crossing_edge_pairs[0][0] << ','
           << crossing_edge_pairs[0][1];
    return os.str();
}

NetworkValidation validate_network(const RoadNetwork& net) {
    NetworkValidation rep;
    const int nv = static_cast<int>(net.vertices.size());
    const int ne = static_cast<int>(net.edges.size());
    rep.has_edges = ne > 0;
    rep.vertex_counts_match =
        net.boundary_vertex_flags.empty() ||
        net.boundary_vertex_flags.size() == net.vertices.size();

    for (int e = 0; e < ne; ++e)
        if (!edge_in_range(net, e)) rep.out_of_range_edges.push_back(e);
    if (!rep.out_of_range_edges.empty()) return rep;

    const double scale = network_diameter_scale(net);
    const double len_tol = 1e-14 * scale;
    const double cross_tol = 1e-9 * scale;

    for (int e = 0; e < ne; ++e)
        if (edge_length(net, e) <= len_tol) rep.zero_length_edges.push_back(e);

    std::map<std::pair<int, int>, int> seen;
    for (int e = 0; e < ne; ++e) {
        auto [i, j] = net.edges[e];
        auto key = std::minmax(i, j);
        auto it = seen.find(key);
        if (it != seen.end())
            rep.duplicate_edge_pairs.push_back({it->second, e});
        else
            seen[key] = e;
    }

    for (int e1 = 0; e1 < ne; ++e1) {
        auto [a, b] = net.edges[e1];
        for (int e2 = e1 + 1; e2 < ne; ++e2) {
            auto [c, d] = net.edges[e2];
            if (a == c || a == d || b == c || b == d) {
                // Combinatorially adjacent; only collinear overlap is illegal.
                if (segments_overlap_collinear(net.vertices[a], net.vertices[b],
                                               net.vertices[c], net.vertices[d], cross_tol))
                    rep.crossing_edge_pairs.push_back({e1, e2});
                continue;
            }
            if (segments_conflict(net.vertices[a], net.vertices[b],
                                  net.vertices[c], net.vertices[d], cross_tol))
                rep.crossing_edge_pairs.push_back({e1, e2});
        }
    }

    // Connectivity over the union of edges; isolated vertices disconnect K.
    if (nv > 0 && ne > 0) {
        auto adj = adjacency(net);
        std::vector<char> visited(nv, 0);
        std::queue<int> bfs;
        bfs.push(net.edges[0][0]);
        visited[net.edges[0][0]] = 1;
        int count = 0;
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop();
            ++count;
            for (auto [w, len] : adj[v]) {
                (void)len;
                if (!visited[w]) {
                    visited[w] = 1;
                    bfs.push(w);
                }
            }
        }
        rep.connected = count == nv;
    }
    return rep;
}

double edge_length(const RoadNetwork& net, int e) {
    require_edge(net, e, "edge_length");
    return distance(net.vertices[net.edges[e][0]], net.vertices[net.edges[e][1]]);
}

double total_length(const RoadNetwork& net) {
    double s = 0.0;
    for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) s += edge_length(net, e);
    return s;
}

Point2 network_point_position(const RoadNetwork& net, NetworkPoint p) {
    require_edge(net, p.edge, "network_point_position");
    if (p.t < -1e-12 || p.t > 1.0 + 1e-12)
        throw DomainError("network", "network_point_position",
                          "parameter t=" + std::to_string(p.t) + " outside [0,1]");
    Point2 a = net.vertices[net.edges[p.edge][0]];
    Point2 b = net.vertices[net.edges[p.edge][1]];
    double t = std::clamp(p.t, 0.0, 1.0);
    return a + t * (b - a);
}

double geodesic_distance(const RoadNetwork& net, NetworkPoint p, NetworkPoint q) {
    require_edge(net, p.edge, "geodesic_distance");
    require_edge(net, q.edge, "geodesic_distance");
    if (p.t < -1e-12 || p.t > 1 + 1e-12 || q.t < -1e-12 || q.t > 1 + 1e-12)
        throw DomainError("network", "geodesic_distance", "edge parameter outside [0,1]");

    double tp = std::clamp(p.t, 0.0, 1.0);
    double tq = std::clamp(q.t, 0.0, 1.0);
    auto [pa, pb] = net.edges[p.edge];
    auto [qa, qb] = net.edges[q.edge];
    double lp = edge_length(net, p.edge);
    double lq = edge_length(net, q.edge);

    auto adj = adjacency(net);
    auto dist = dijkstra(adj, {{pa, tp * lp}, {pb, (1.0 - tp) * lp}});

    double best = std::min(dist[qa] + tq * lq, dist[qb] + (1.0 - tq) * lq);
    if (p.edge == q.edge) best = std::min(best, std::abs(tp - tq) * lp);
    return best;
}

double geodesic_distance(const RoadNetwork& net, int vertex_p, int vertex_q) {
    int n = static_cast<int>(net.vertices.size());
    if (vertex_p < 0 || vertex_p >= n || vertex_q < 0 || vertex_q >= n)
        throw DomainError("network", "geodesic_distance", "vertex index out of range");
    auto adj = adjacency(net);
    auto dist = dijkstra(adj, {{vertex_p, 0.0}});
    return dist[vertex_q];
}

double geodesic_distance(const RoadNetwork& net, Point2 p, Point2 q, double tol) {
    auto locate = [&](Point2 pt) -> NetworkPoint {
        for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) {
            Point2 a = net.vertices[net.edges[e][0]];
            Point2 b = net.vertices[net.edges[e][1]];
            if (point_segment_distance(pt, a, b) <= tol) {
                double len2 = norm2(b - a);
                double t = len2 > 0 ? std::clamp(dot(pt - a, b - a) / len2, 0.0, 1.0) : 0.0;
                return {e, t};
            }
        }
        throw DomainError("network", "geodesic_distance",
                          "point (" + std::to_string(pt.x) + "," + std::to_string(pt.y) +
                              ") does not lie on the network");
    };
    return geodesic_distance(net, locate(p), locate(q));
}

std::vector<std::vector<double>> vertex_geodesic_matrix(const RoadNetwork& net) {
    auto adj = adjacency(net);
    std::vector<std::vector<double>> out(net.vertices.size());
    for (size_t v = 0; v < net.vertices.size(); ++v)
        out[v] = dijkstra(adj, {{static_cast<int>(v), 0.0}});
    return out;
}

AhlforsEstimate ahlfors_upper_constant(const RoadNetwork& net, const AhlforsSampling& sampling) {
    AhlforsEstimate best;
    best.sampling = sampling;

    std::vector<Point2> centers = net.vertices;
    for (const auto& e : net.edges) {
        Point2 a = net.vertices[e[0]], b = net.vertices[e[1]];
        centers.push_back(a + 0.5 * (b - a));
        int n = sampling.interior_samples_per_edge;
        for (int k = 1; k <= n; ++k) {
            double t = static_cast<double>(k) / (n + 1);
            centers.push_back(a + t * (b - a));
        }
    }

    const double tiny = 1e-12 * network_diameter_scale(net);
    for (Point2 x : centers) {
        std::vector<double> radii;
        double r_max = 0.0;
        for (Point2 v : net.vertices) {
            double d = distance(x, v);
            r_max = std::max(r_max, d);
            if (d > tiny) radii.push_back(d);
        }
        for (const auto& e : net.edges) {
            double d = point_segment_distance(x, net.vertices[e[0]], net.vertices[e[1]]);
            if (d > tiny) radii.push_back(d);
        }
        if (r_max <= tiny) continue;
        double r_min = r_max;
        for (double r : radii) r_min = std::min(r_min, r);
        r_min = std::max(r_min, 1e-6 * r_max);
        double ratio_step = std::pow(r_max / r_min, 1.0 / std::max(1, sampling.radius_grid - 1));
        double r = r_min;
        for (int k = 0; k < sampling.radius_grid; ++k, r *= ratio_step) radii.push_back(r);

        for (double rr : radii) {
            if (rr <= tiny || rr > r_max + tiny) continue;
            double ratio = ball_length(net, x, rr) / rr;
            if (ratio > best.value) {
                best.value = ratio;
                best.center = x;
                best.radius = rr;
            }
        }
    }
    return best;
}

LowerAhlforsResult lower_ahlfors_check(const RoadNetwork& net, int interior_samples_per_edge,
                                       int radii_per_center) {
    LowerAhlforsResult res;
    res.worst_ratio = kInf;

    std::vector<Point2> centers = net.vertices;
    for (const auto& e : net.edges) {
        Point2 a = net.vertices[e[0]], b = net.vertices[e[1]];
        for (int k = 1; k <= interior_samples_per_edge; ++k) {
            double t = static_cast<double>(k) / (interior_samples_per_edge + 1);
            centers.push_back(a + t * (b - a));
        }
    }

    const double tiny = 1e-12 * network_diameter_scale(net);
    for (Point2 x : centers) {
        // The farthest point of a polygonal network from x is a vertex.
        double r_max = 0.0;
        for (Point2 v : net.vertices) r_max = std::max(r_max, distance(x, v));
        if (r_max <= tiny) continue;

        std::vector<double> radii;
        for (int k = 1; k <= radii_per_center; ++k)
            radii.push_back(r_max * static_cast<double>(k) / radii_per_center);
        for (Point2 v : net.vertices) {
            double d = distance(x, v);
            if (d > tiny && d < r_max) radii.push_back(d);
        }

        for (double r : radii) {
            double ratio = ball_length(net, x, r) / r;
            if (ratio < res.worst_ratio) {
                res.worst_ratio = ratio;
                res.worst_center = x;
                res.worst_radius = r;
            }
        }
    }
    res.ok = res.worst_ratio >= 1.0 - 1e-12;
    return res;
}

double network_l2_norm(const RoadNetwork& net, const NetworkFunction& f) {
    double s = 0.0;
    for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) {
        auto [i, j] = net.edges[e];
        double len = edge_length(net, e);
        double fi = f.values[i], fj = f.values[j];
        s += len * (fi * fi + fi * fj + fj * fj) / 3.0;
    }
    return std::sqrt(s);
}

double network_grad_l2_norm(const RoadNetwork& net, const NetworkFunction& f) {
    double s = 0.0;
    for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) {
        auto [i, j] = net.edges[e];
        double len = edge_length(net, e);
        double slope = (f.values[j] - f.values[i]) / len;
        s += slope * slope * len;
    }
    return std::sqrt(s);
}

double network_sup_norm(const NetworkFunction& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

InequalityCheck holder_embedding_check(const RoadNetwork& net, const NetworkFunction& f) {
    if (f.values.size() != net.vertices.size())
        throw DomainError("network", "holder_embedding_check",
                          "value count does not match vertex count");
    double g = network_grad_l2_norm(net, f);
    auto dist = vertex_geodesic_matrix(net);

    InequalityCheck chk;
    chk.worst_slack = kInf;
    const size_t n = net.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double lhs = std::abs(f.values[i] - f.values[j]);
            double rhs = std::sqrt(dist[i][j]) * g;
            chk.worst_slack = std::min(chk.worst_slack, rhs - lhs);
        }
    }
    if (n < 2) chk.worst_slack = 0.0;
    double scale = std::max(1.0, g * std::sqrt(total_length(net)));
    chk.ok = chk.worst_slack >= -1e-12 * scale;
    return chk;
}

bool linfty_bound_check(const RoadNetwork& net, const NetworkFunction& f) {
    if (f.values.size() != net.vertices.size())
        throw DomainError("network", "linfty_bound_check",
                          "value count does not match vertex count");
    double h1 = total_length(net);
    double rhs = network_l2_norm(net, f) / std::sqrt(h1) +
                 std::sqrt(h1) * network_grad_l2_norm(net, f);
    double lhs = network_sup_norm(f);
    return lhs <= rhs + 1e-12 * std::max(1.0, rhs);
}

} // namespace roadfield
