#pragma once

#include <string>
#include <vector>

#include "roadfield/assembly.hpp"
#include "roadfield/meshing.hpp"
#include "roadfield/network.hpp"
#include "roadfield/optimize.hpp"

namespace roadfield {

/// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_float(double v);

/// Network files: `vertices N` header, N lines `x y boundary_flag`,
/// `edges M` header, M lines `i j` with 0-based indices.
RoadNetwork parse_network(const std::string& text, const std::string& origin = "<string>");
RoadNetwork read_network(const std::string& path);
std::string serialize_network(const RoadNetwork& net);
void write_network(const RoadNetwork& net, const std::string& path);

/// Domain files: `polygon N` header, then N lines `x y` listing the boundary
/// counterclockwise.
DomainGeometry parse_domain(const std::string& text, const std::string& origin = "<string>");
DomainGeometry read_domain(const std::string& path);
std::string serialize_domain(const DomainGeometry& domain);
void write_domain(const DomainGeometry& domain, const std::string& path);

/// Mesh files: `vertices N` lines `x y marker`, `triangles M` lines `i j k`,
/// `road_edges R` lines `i j parent_road_edge`. Write-only: the format drops
/// the arc-length bookkeeping, so meshes are regenerated from config, never
/// read back.
std::string serialize_mesh(const Mesh& mesh);
void write_mesh(const Mesh& mesh, const std::string& path);

/// CSV with LF line endings. Numeric cells should go through format_float.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Coordinate-format dump: header `symmetric N nnz`, then one `row col value`
/// triplet per stored entry, 0-based, in column-major storage order.
std::string serialize_matrix(const SpMat& m);
void write_matrix(const SpMat& m, const std::string& path);

/// Legacy ASCII VTK unstructured grid: POINTS, CELLS (triangles plus road
/// line segments), POINT_DATA scalars `v` and `u`. Dirichlet vertices and
/// off-road vertices carry zeros in the respective arrays.
void write_vtk(const Mesh& mesh, const DofMaps& dofs, const Vec& state, double time,
               const std::string& path);

/// Per-mesh-vertex initial values: `values N` header, then N lines `v u`
/// in mesh vertex order (u is ignored off the road).
std::vector<std::array<double, 2>> read_nodal_values(const std::string& path, int expected);

/// Parsed search description; referenced files are loaded by load_family_spec.
struct FamilySpecFile {
    RoadFamilySpec spec;                      // domain / user_candidates left empty
    std::string domain_file;
    std::vector<std::string> candidate_files; // user-list networks
};

/// Search spec files reuse the config syntax with sections
/// `[domain] [params] [search]`; `require = x y` and `candidate = path`
/// may repeat.
FamilySpecFile parse_family_spec(const std::string& text);
RoadFamilySpec load_family_spec(const std::string& path);

} // namespace roadfield
