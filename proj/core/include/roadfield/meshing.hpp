#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "roadfield/geometry.hpp"
#include "roadfield/network.hpp"

namespace roadfield {

/// Bounded Lipschitz domain Omega, described by its boundary polygon
/// (simple, counterclockwise).
struct DomainGeometry {
    std::vector<Point2> boundary;
};

enum class VertexMarker : std::uint8_t {
    Interior = 0,
    Boundary = 1,      // on the domain boundary
    Road = 2,          // on K, strictly inside Omega
    RoadBoundary = 3,  // on K and on the domain boundary
};

/// Mesh edge lying on a road edge, with provenance: `parent_edge` indexes the
/// RoadNetwork edge it discretizes and [arc0, arc1] is the covered arc-length
/// interval measured from the parent's first endpoint.
struct RoadMeshEdge {
    int a = 0;
    int b = 0;
    int parent_edge = 0;
    double arc0 = 0.0;
    double arc1 = 0.0;
};

/// Conforming triangulation of Omega. Every road edge of the generating
/// network is a union of consecutive entries of `road_edges`. Immutable
/// after construction.
struct Mesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;   // CCW
    std::vector<VertexMarker> markers;
    std::vector<std::array<int, 2>> boundary_edges;
    std::vector<RoadMeshEdge> road_edges;
    double h_target = 0.0;
    double min_angle_deg = 0.0;   // quality threshold the mesh satisfies
};

struct MeshingOptions {
    double min_angle_deg = 20.0;      // quality refinement target
    double merge_tol_rel = 1e-9;      // vertex merge tolerance, relative to diam(Omega)
    double grid_clearance_rel = 0.5;  // keep-out radius around constraints, relative to h
    int max_insertions = 200000;      // refinement budget
};

/// Constrained Delaunay triangulation of the domain whose constraint segments
/// are the boundary polygon and all road edges, each pre-split to pieces of
/// length at most h, followed by quality refinement (encroached-segment
/// splitting and circumcenter insertion) until every triangle's minimum angle
/// reaches options.min_angle_deg. Deterministic for fixed inputs.
///
/// Throws ConstructionError on geometric degeneracy: road vertex outside the
/// domain, inconsistent boundary flags, coincident constraint segments, or an
/// unreachable quality target.
Mesh triangulate(const DomainGeometry& domain, const RoadNetwork& net, double h,
                 const MeshingOptions& options = {});

/// Uniform midpoint subdivision: each triangle becomes four similar ones.
/// Road and boundary edges are split in two with markers propagated.
Mesh refine(const Mesh& mesh);

struct MeshQuality {
    double min_angle_deg = 0.0;
    double max_aspect_ratio = 0.0;   // longest edge / (2 * inradius); 1.1547 for equilateral
    double h_max = 0.0;
    double h_min = 0.0;
    int vertex_count = 0;
    int triangle_count = 0;
};

MeshQuality mesh_quality(const Mesh& mesh);

/// Max over network edges of the relative defect between the edge length and
/// the summed lengths of its tagged mesh-edge chain; also checks that the
/// chain's arc intervals tile [0, length]. Used by conformity tests.
double road_conformity_error(const Mesh& mesh, const RoadNetwork& net);

double triangle_area(Point2 a, Point2 b, Point2 c);
double triangle_min_angle_deg(Point2 a, Point2 b, Point2 c);

} // namespace roadfield
