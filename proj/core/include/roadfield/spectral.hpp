#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "roadfield/assembly.hpp"

namespace roadfield {

struct EigenOptions {
    int k = 6;
    double tol = 1e-8;              // relative residual ||Be - lambda Le|| / ||lambda Le||
    int max_iterations = 2000;
    int block_padding = 8;          // extra iterated vectors beyond k
    std::uint64_t seed = 0x726f6164ULL;
    double cluster_rel_gap = 1e-8;  // eigenvalues closer than this (relative) share a cluster
};

/// L-orthonormal spectral resolution of the pair (B, L): eigenvalues
/// ascending, one residual per pair, cluster ids grouping eigenvalues that
/// coincide up to the relative gap (multiplicity is reported, never assumed
/// away).
struct Spectrum {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenvectors;  // column k belongs to eigenvalues[k]
    std::vector<double> residuals;
    std::vector<int> clusters;
    int iterations = 0;

    int count() const { return static_cast<int>(eigenvalues.size()); }
};

/// Smallest eigenpairs of B e = lambda L e for symmetric B and SPD L, by
/// blocked shift-invert subspace iteration: factor B once (fallback shift
/// -1e-8 times the trace scale if the factorization balks), iterate
/// X <- B^{-1} L X with L-orthonormalization and a Rayleigh-Ritz projection
/// each sweep. Deterministic for a fixed seed.
Spectrum smallest_eigenpairs(const SpMat& B, const SpMat& L, const EigenOptions& opts = {});

Spectrum smallest_eigenpairs(const FemSystem& sys, int k, double tol);
Spectrum smallest_eigenpairs(const FemSystem& sys, const EigenOptions& opts);

/// Smallest k eigenvalues of the road-free Dirichlet field problem
/// a A_f e = gamma M_f e on the mesh's field dofs.
std::vector<double> dirichlet_gamma(const Mesh& mesh, double a, int k, double tol);

/// Dense full decomposition (oracle for small systems). Throws DomainError
/// when the free-dof count exceeds the cap.
Spectrum dense_reference_eigen(const SpMat& B, const SpMat& L, int cap = 400);
Spectrum dense_reference_eigen(const FemSystem& sys, int cap = 400);

struct GramDeviation {
    double l_gram = 0.0;  // max |X^T L X - I|
    double b_gram = 0.0;  // max |X^T B X - diag(lambda)|
};

GramDeviation check_orthonormality(const Spectrum& spec, const SpMat& B, const SpMat& L);
GramDeviation check_orthonormality(const Spectrum& spec, const FemSystem& sys);

/// Largest eigenvalue of the pencil T x = theta A x with T symmetric positive
/// semidefinite and A SPD, by blocked power iteration on A^{-1} T.
double largest_pencil_eigenvalue(const SpMat& T, const SpMat& A, double tol = 1e-12,
                                 std::uint64_t seed = 0x74726163ULL);

} // namespace roadfield
