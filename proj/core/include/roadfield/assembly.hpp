#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "roadfield/meshing.hpp"

namespace roadfield {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Coupling parameters of the field-road system: field diffusivity a, road
/// diffusivity b, exit rate mu (road to field), entry rate nu (field to road).
struct Parameters {
    double a = 1.0;
    double b = 1.0;
    double mu = 1.0;
    double nu = 1.0;

    bool operator==(const Parameters&) const = default;
};

void validate_parameters(const Parameters& p);

/// Free degrees of freedom after Dirichlet elimination. Field dofs live on
/// every vertex not on the domain boundary (road vertices included); road
/// dofs live on vertices marked Road (those on K and the boundary carry the
/// road Dirichlet condition and are eliminated).
struct DofMaps {
    std::vector<int> field_dof;     // vertex -> field dof, -1 if eliminated
    std::vector<int> road_dof;      // vertex -> road dof, -1 if none
    std::vector<int> field_vertex;  // field dof -> vertex
    std::vector<int> road_vertex;   // road dof -> vertex
    std::vector<int> road_site;     // vertex -> index among all on-K vertices, -1 off K
    std::vector<int> road_site_vertex;  // on-K index -> vertex (Dirichlet ones included)

    int n_field() const { return static_cast<int>(field_vertex.size()); }
    int n_road() const { return static_cast<int>(road_vertex.size()); }
    int n_total() const { return n_field() + n_road(); }
    int n_road_sites() const { return static_cast<int>(road_site_vertex.size()); }
};

DofMaps build_dof_maps(const Mesh& mesh);

struct FieldMatrices {
    SpMat stiffness;  // P1 Dirichlet energy on the field dofs
    SpMat mass;       // consistent mass
};

struct RoadMatrices {
    SpMat stiffness;  // 1D tangential Dirichlet energy on the road dofs
    SpMat mass;
};

/// Trace couplings over K. With road dofs on mesh vertices the trace is an
/// index restriction, so all three matrices scatter the same 1D element mass
/// to different dof sets: t_ff is field x field, t_fr field x road, t_rr
/// road x road.
struct TraceMatrices {
    SpMat t_ff;
    SpMat t_fr;
    SpMat t_rr;
};

/// Full-vertex assembly without Dirichlet elimination: the stiffness kernel
/// holds the constants (row sums vanish) and the mass total is the domain
/// area. Road matrices run over all on-K vertices in road_site order, so the
/// road mass total is H1(K).
FieldMatrices assemble_field(const Mesh& mesh);
RoadMatrices assemble_road(const Mesh& mesh);
TraceMatrices assemble_trace_coupling(const Mesh& mesh);

/// Eliminated variants over the free dofs of `dofs`; these are the blocks
/// build_system combines.
FieldMatrices assemble_field(const Mesh& mesh, const DofMaps& dofs);
RoadMatrices assemble_road(const Mesh& mesh, const DofMaps& dofs);
TraceMatrices assemble_trace_coupling(const Mesh& mesh, const DofMaps& dofs);

/// Discretization of the coupling form and the two inner products, stacked as
/// (field dofs, road dofs):
///   B     = [ a nu A_f + nu^2 t_ff   -nu mu t_fr            ]
///           [ -nu mu t_fr^T           b mu A_r + mu^2 t_rr  ]
///   Lmass = diag(nu M_f, mu M_r)
///   Hnorm = diag(nu (A_f + M_f), mu (A_r + M_r))
/// All matrices are symmetric; B and Lmass are positive definite on the free
/// dofs.
struct FemSystem {
    Mesh mesh;
    Parameters params;
    DofMaps dofs;
    SpMat B;
    SpMat Lmass;
    SpMat Hnorm;
    FieldMatrices field;
    RoadMatrices road;
    TraceMatrices trace;
};

FemSystem build_system(const Mesh& mesh, const Parameters& params);

Vec apply_B(const FemSystem& sys, const Vec& x);
Vec apply_L(const FemSystem& sys, const Vec& x);
double inner_L(const FemSystem& sys, const Vec& x, const Vec& y);
double inner_H(const FemSystem& sys, const Vec& x, const Vec& y);

} // namespace roadfield
