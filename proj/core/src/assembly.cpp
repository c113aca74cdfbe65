#include "roadfield/assembly.hpp"

#include <cmath>

#include "roadfield/errors.hpp"

namespace roadfield {

namespace {

using Triplet = Eigen::Triplet<double>;

SpMat from_triplets(int rows, int cols, std::vector<Triplet>& trips) {
    SpMat m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

void scatter2(std::vector<Triplet>& out, const std::array<int, 2>& rows,
              const std::array<int, 2>& cols, const double elem[2][2]) {
    for (int i = 0; i < 2; ++i) {
        if (rows[i] < 0) continue;
        for (int j = 0; j < 2; ++j) {
            if (cols[j] < 0) continue;
            out.emplace_back(rows[i], cols[j], elem[i][j]);
        }
    }
}

} // namespace

void validate_parameters(const Parameters& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0) || !(p.mu > 0.0) || !(p.nu > 0.0)) {
        throw DomainError("assembly", "parameters", "a, b, mu, nu must all be positive");
    }
}

DofMaps build_dof_maps(const Mesh& mesh) {
    DofMaps d;
    const int nv = static_cast<int>(mesh.vertices.size());
    d.field_dof.assign(nv, -1);
    d.road_dof.assign(nv, -1);
    d.road_site.assign(nv, -1);
    for (int v = 0; v < nv; ++v) {
        const VertexMarker m = mesh.markers[v];
        if (m == VertexMarker::Interior || m == VertexMarker::Road) {
            d.field_dof[v] = static_cast<int>(d.field_vertex.size());
            d.field_vertex.push_back(v);
        }
        if (m == VertexMarker::Road) {
            d.road_dof[v] = static_cast<int>(d.road_vertex.size());
            d.road_vertex.push_back(v);
        }
        if (m == VertexMarker::Road || m == VertexMarker::RoadBoundary) {
            d.road_site[v] = static_cast<int>(d.road_site_vertex.size());
            d.road_site_vertex.push_back(v);
        }
    }
    return d;
}

namespace {

/// Triangle element loop scattered through vertex -> row maps (-1 drops the
/// row/column, which is how Dirichlet elimination happens).
FieldMatrices field_matrices(const Mesh& mesh, const std::vector<int>& map, int n) {
    std::vector<Triplet> ka, ma;
    ka.reserve(mesh.triangles.size() * 9);
    ma.reserve(mesh.triangles.size() * 9);
    for (const auto& t : mesh.triangles) {
        const Point2 p0 = mesh.vertices[t[0]];
        const Point2 p1 = mesh.vertices[t[1]];
        const Point2 p2 = mesh.vertices[t[2]];
        const double area = triangle_area(p0, p1, p2);
        if (area <= 0.0) {
            throw NumericalError("assembly", "field", "nonpositive triangle area");
        }
        // grad of barycentric i is ((y_j - y_k), (x_k - x_j)) / (2 area), cyclic
        const double bx[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        const double by[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        for (int i = 0; i < 3; ++i) {
            const int di = map[t[i]];
            if (di < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int dj = map[t[j]];
                if (dj < 0) continue;
                ka.emplace_back(di, dj, (bx[i] * bx[j] + by[i] * by[j]) / (4.0 * area));
                ma.emplace_back(di, dj, area / 12.0 * (i == j ? 2.0 : 1.0));
            }
        }
    }
    FieldMatrices out;
    out.stiffness = from_triplets(n, n, ka);
    out.mass = from_triplets(n, n, ma);
    return out;
}

RoadMatrices road_matrices(const Mesh& mesh, const std::vector<int>& map, int n) {
    std::vector<Triplet> ka, ma;
    ka.reserve(mesh.road_edges.size() * 4);
    ma.reserve(mesh.road_edges.size() * 4);
    for (const RoadMeshEdge& e : mesh.road_edges) {
        const double len = distance(mesh.vertices[e.a], mesh.vertices[e.b]);
        if (len <= 0.0) {
            throw NumericalError("assembly", "road", "zero-length road mesh edge");
        }
        const std::array<int, 2> d{map[e.a], map[e.b]};
        const double k[2][2] = {{1.0 / len, -1.0 / len}, {-1.0 / len, 1.0 / len}};
        const double m[2][2] = {{len / 3.0, len / 6.0}, {len / 6.0, len / 3.0}};
        scatter2(ka, d, d, k);
        scatter2(ma, d, d, m);
    }
    RoadMatrices out;
    out.stiffness = from_triplets(n, n, ka);
    out.mass = from_triplets(n, n, ma);
    return out;
}

TraceMatrices trace_matrices(const Mesh& mesh, const std::vector<int>& fmap, int nf,
                             const std::vector<int>& rmap, int nr) {
    std::vector<Triplet> ff, fr, rr;
    for (const RoadMeshEdge& e : mesh.road_edges) {
        const double len = distance(mesh.vertices[e.a], mesh.vertices[e.b]);
        const double m[2][2] = {{len / 3.0, len / 6.0}, {len / 6.0, len / 3.0}};
        const std::array<int, 2> f{fmap[e.a], fmap[e.b]};
        const std::array<int, 2> r{rmap[e.a], rmap[e.b]};
        scatter2(ff, f, f, m);
        scatter2(fr, f, r, m);
        scatter2(rr, r, r, m);
    }
    TraceMatrices out;
    out.t_ff = from_triplets(nf, nf, ff);
    out.t_fr = from_triplets(nf, nr, fr);
    out.t_rr = from_triplets(nr, nr, rr);
    return out;
}

std::vector<int> identity_map(std::size_t n) {
    std::vector<int> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<int>(i);
    return m;
}

} // namespace

FieldMatrices assemble_field(const Mesh& mesh) {
    return field_matrices(mesh, identity_map(mesh.vertices.size()),
                          static_cast<int>(mesh.vertices.size()));
}

FieldMatrices assemble_field(const Mesh& mesh, const DofMaps& dofs) {
    return field_matrices(mesh, dofs.field_dof, dofs.n_field());
}

RoadMatrices assemble_road(const Mesh& mesh) {
    const DofMaps dofs = build_dof_maps(mesh);
    return road_matrices(mesh, dofs.road_site, dofs.n_road_sites());
}

RoadMatrices assemble_road(const Mesh& mesh, const DofMaps& dofs) {
    return road_matrices(mesh, dofs.road_dof, dofs.n_road());
}

TraceMatrices assemble_trace_coupling(const Mesh& mesh) {
    const DofMaps dofs = build_dof_maps(mesh);
    return trace_matrices(mesh, identity_map(mesh.vertices.size()),
                          static_cast<int>(mesh.vertices.size()), dofs.road_site,
                          dofs.n_road_sites());
}

TraceMatrices assemble_trace_coupling(const Mesh& mesh, const DofMaps& dofs) {
    return trace_matrices(mesh, dofs.field_dof, dofs.n_field(), dofs.road_dof, dofs.n_road());
}

FemSystem build_system(const Mesh& mesh, const Parameters& params) {
    validate_parameters(params);
    FemSystem sys;
    sys.mesh = mesh;
    sys.params = params;
    sys.dofs = build_dof_maps(mesh);
    if (sys.dofs.n_total() == 0) {
        throw ConfigError("assembly", "build_system", "no free degrees of freedom");
    }
    sys.field = assemble_field(mesh, sys.dofs);
    sys.road = assemble_road(mesh, sys.dofs);
    sys.trace = assemble_trace_coupling(mesh, sys.dofs);

    const int nf = sys.dofs.n_field();
    const int nr = sys.dofs.n_road();
    const int n = nf + nr;
    const double a = params.a, b = params.b, mu = params.mu, nu = params.nu;

    std::vector<Triplet> tb, tl, th;
    auto push_block = [](std::vector<Triplet>& out, const SpMat& m, double scale,
                         int row0, int col0) {
        for (int k = 0; k < m.outerSize(); ++k) {
            for (SpMat::InnerIterator it(m, k); it; ++it) {
                out.emplace_back(row0 + static_cast<int>(it.row()),
                                 col0 + static_cast<int>(it.col()), scale * it.value());
            }
        }
    };
    push_block(tb, sys.field.stiffness, a * nu, 0, 0);
    push_block(tb, sys.trace.t_ff, nu * nu, 0, 0);
    push_block(tb, sys.trace.t_fr, -nu * mu, 0, nf);
    {
        const SpMat t_rf = SpMat(sys.trace.t_fr.transpose());
        push_block(tb, t_rf, -nu * mu, nf, 0);
    }
    push_block(tb, sys.road.stiffness, b * mu, nf, nf);
    push_block(tb, sys.trace.t_rr, mu * mu, nf, nf);
    sys.B = from_triplets(n, n, tb);

    push_block(tl, sys.field.mass, nu, 0, 0);
    push_block(tl, sys.road.mass, mu, nf, nf);
    sys.Lmass = from_triplets(n, n, tl);

    push_block(th, sys.field.stiffness, nu, 0, 0);
    push_block(th, sys.field.mass, nu, 0, 0);
    push_block(th, sys.road.stiffness, mu, nf, nf);
    push_block(th, sys.road.mass, mu, nf, nf);
    sys.Hnorm = from_triplets(n, n, th);
    return sys;
}

Vec apply_B(const FemSystem& sys, const Vec& x) {
    if (x.size() != sys.B.rows()) {
        throw DomainError("assembly", "apply_B", "dimension mismatch");
    }
    return sys.B * x;
}

Vec apply_L(const FemSystem& sys, const Vec& x) {
    if (x.size() != sys.Lmass.rows()) {
        throw DomainError("assembly", "apply_L", "dimension mismatch");
    }
    return sys.Lmass * x;
}

double inner_L(const FemSystem& sys, const Vec& x, const Vec& y) {
    if (x.size() != sys.Lmass.rows() || y.size() != sys.Lmass.rows()) {
        throw DomainError("assembly", "inner_L", "dimension mismatch");
    }
    return x.dot(sys.Lmass * y);
}

double inner_H(const FemSystem& sys, const Vec& x, const Vec& y) {
    if (x.size() != sys.Hnorm.rows() || y.size() != sys.Hnorm.rows()) {
        throw DomainError("assembly", "inner_H", "dimension mismatch");
    }
    return x.dot(sys.Hnorm * y);
}

} // namespace roadfield
