#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "roadfield/geometry.hpp"

namespace roadfield {

/// Embedded planar graph modeling the road K: straight edges between 2D
/// vertices. Immutable after validation; all operations below are read-only.
struct RoadNetwork {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 2>> edges;          // unordered vertex-index pairs
    std::vector<std::uint8_t> boundary_vertex_flags; // 1 when the vertex lies on the domain boundary
};

/// Piecewise-linear function on the network: one value per vertex, linear
/// along each edge. The tangential derivative on an edge is the finite
/// difference of the endpoint values divided by the edge length.
struct NetworkFunction {
    std::vector<double> values;
};

/// A point of the network: position t in [0,1] along edge `edge`
/// (t=0 at edges[edge][0], t=1 at edges[edge][1]).
struct NetworkPoint {
    int edge = 0;
    double t = 0.0;
};

struct NetworkValidation {
    bool has_edges = false;
    bool connected = false;
    bool vertex_counts_match = false;
    std::vector<int> out_of_range_edges;
    std::vector<int> zero_length_edges;
    std::vector<std::array<int, 2>> duplicate_edge_pairs;
    std::vector<std::array<int, 2>> crossing_edge_pairs;

    bool valid() const {
        return has_edges && connected && vertex_counts_match &&
               out_of_range_edges.empty() && zero_length_edges.empty() &&
               duplicate_edge_pairs.empty() && crossing_edge_pairs.empty();
    }
    std::string describe() const;
};

NetworkValidation validate_network(const RoadNetwork& net);

double edge_length(const RoadNetwork& net, int e);
double total_length(const RoadNetwork& net);
Point2 network_point_position(const RoadNetwork& net, NetworkPoint p);

/// Shortest path length within the graph between two network points.
/// Edge-interior endpoints are spliced in as temporary vertices; the graph
/// itself is never mutated. Throws DomainError when an edge index or
/// parameter is out of range.
double geodesic_distance(const RoadNetwork& net, NetworkPoint p, NetworkPoint q);
double geodesic_distance(const RoadNetwork& net, int vertex_p, int vertex_q);

/// Locates a planar point on the network (within tol) and measures from there.
/// Throws DomainError when either point does not lie on the network.
double geodesic_distance(const RoadNetwork& net, Point2 p, Point2 q, double tol);

/// All-pairs vertex geodesic distances (one Dijkstra sweep per vertex).
std::vector<std::vector<double>> vertex_geodesic_matrix(const RoadNetwork& net);

struct AhlforsSampling {
    int interior_samples_per_edge = 8;
    int radius_grid = 32;
};

struct AhlforsEstimate {
    double value = 0.0;     // estimated sup of H1(K ∩ B(x,r)) / r
    Point2 center{};        // argmax center sampled
    double radius = 0.0;    // argmax radius sampled
    AhlforsSampling sampling{};
};

/// Estimate of the upper Ahlfors constant Lambda_K by sampling centers
/// (vertices, midpoints, interior refinements of each edge) and event radii
/// (distances from the center to vertices and to segment nearest points,
/// plus a geometric grid). Disk-segment intersection lengths are exact.
AhlforsEstimate ahlfors_upper_constant(const RoadNetwork& net, const AhlforsSampling& sampling = {});

struct LowerAhlforsResult {
    bool ok = false;
    double worst_ratio = 0.0;
    Point2 worst_center{};
    double worst_radius = 0.0;
};

/// Checks H1(K ∩ B(x,r)) >= r for sampled centers x and radii r up to the
/// Euclidean distance from x to the farthest network point. Connectedness
/// makes the lower Ahlfors constant equal to 1; `ok` allows a 1e-12 slack
/// for arithmetic.
LowerAhlforsResult lower_ahlfors_check(const RoadNetwork& net, int interior_samples_per_edge = 8,
                                       int radii_per_center = 16);

/// Exact integrals of the piecewise-linear function and its edge-wise slope.
double network_l2_norm(const RoadNetwork& net, const NetworkFunction& f);
double network_grad_l2_norm(const RoadNetwork& net, const NetworkFunction& f);
double network_sup_norm(const NetworkFunction& f);

struct InequalityCheck {
    bool ok = false;
    double worst_slack = 0.0;   // min over tested pairs of (bound - |difference|)
};

/// |f(x)-f(y)| <= dist_K(x,y)^{1/2} * ||grad_K f||_{L2(K)} over all vertex pairs.
InequalityCheck holder_embedding_check(const RoadNetwork& net, const NetworkFunction& f);

/// ||f||_inf <= ||f||_2 / H1(K)^{1/2} + H1(K)^{1/2} * ||grad_K f||_2.
bool linfty_bound_check(const RoadNetwork& net, const NetworkFunction& f);

} // namespace roadfield
