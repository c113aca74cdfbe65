#include "roadfield/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "roadfield/errors.hpp"
#include "roadfield/rng.hpp"

namespace roadfield {

namespace {

Eigen::MatrixXd seeded_block(int n, int m, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(n, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            x(i, j) = rng.signed_unit();
        }
    }
    return x;
}

/// Modified Gram-Schmidt in the M inner product, run twice for stability.
/// Columns that collapse are replaced deterministically from the rng stream.
void m_orthonormalize(Eigen::MatrixXd& y, const SpMat& m, Rng& rng) {
    const int cols = static_cast<int>(y.cols());
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < cols; ++j) {
            Vec my = m * y.col(j);
            for (int i = 0; i < j; ++i) {
                const double r = y.col(i).dot(my);
                y.col(j) -= r * y.col(i);
                my = m * y.col(j);
            }
            double norm = std::sqrt(std::max(y.col(j).dot(my), 0.0));
            if (norm < 1e-150) {
                for (int r = 0; r < y.rows(); ++r) y(r, j) = rng.signed_unit();
                my = m * y.col(j);
                for (int i = 0; i < j; ++i) {
                    const double c = y.col(i).dot(my);
                    y.col(j) -= c * y.col(i);
                    my = m * y.col(j);
                }
                norm = std::sqrt(std::max(y.col(j).dot(my), 0.0));
                if (norm < 1e-150) {
                    throw NumericalError("spectral", "orthonormalize",
                                         "block collapsed to the zero vector");
                }
            }
            y.col(j) /= norm;
        }
    }
}

std::vector<int> cluster_ids(const std::vector<double>& lambda, double rel_gap) {
    std::vector<int> ids(lambda.size(), 0);
    int cur = 0;
    for (std::size_t i = 1; i < lambda.size(); ++i) {
        const double scale = std::max({std::abs(lambda[i]), std::abs(lambda[i - 1]), 1e-300});
        if (lambda[i] - lambda[i - 1] > rel_gap * scale) ++cur;
        ids[i] = cur;
    }
    return ids;
}

double pair_residual(const SpMat& B, const SpMat& L, const Vec& x, double lambda) {
    const Vec bx = B * x;
    const Vec lx = L * x;
    const double denom = std::max(std::abs(lambda) * lx.norm(), 1e-300);
    return (bx - lambda * lx).norm() / denom;
}

} // namespace

Spectrum smallest_eigenpairs(const SpMat& B, const SpMat& L, const EigenOptions& opts) {
    const int n = static_cast<int>(B.rows());
    if (B.rows() != B.cols() || L.rows() != L.cols() || B.rows() != L.rows()) {
        throw DomainError("spectral", "smallest_eigenpairs", "matrix shape mismatch");
    }
    if (opts.k < 1 || opts.k > n) {
        throw DomainError("spectral", "smallest_eigenpairs",
                          "requested " + std::to_string(opts.k) + " pairs of a " +
                              std::to_string(n) + "-dof system");
    }
    if (!(opts.tol > 0.0)) {
        throw DomainError("spectral", "smallest_eigenpairs", "tolerance must be positive");
    }

    // Shift-invert with sigma = 0: B is SPD by construction. If the
    // factorization balks, retry shifted to -1e-8 times the trace scale; the
    // iteration operator (B - sigma L)^{-1} L keeps the same eigenvectors and
    // ordering for sigma below the spectrum.
    Eigen::SimplicialLLT<SpMat> llt;
    llt.compute(B);
    if (llt.info() != Eigen::Success) {
        double trace_scale = 0.0;
        for (int i = 0; i < n; ++i) trace_scale += B.coeff(i, i);
        const double sigma = -1e-8 * std::max(trace_scale / n, 1e-300);
        SpMat bs = B - sigma * L;
        llt.compute(bs);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("spectral", "factorize",
                                 "sparse Cholesky failed even with shift");
        }
    }

    const int m = std::min(n, opts.k + opts.block_padding);
    Rng rng(opts.seed);
    Eigen::MatrixXd x = seeded_block(n, m, rng.next_u64());
    m_orthonormalize(x, L, rng);

    Spectrum out;
    Eigen::VectorXd ritz(m);
    double worst = std::numeric_limits<double>::max();
    int it = 0;
    for (it = 1; it <= opts.max_iterations; ++it) {
        Eigen::MatrixXd y(n, m);
        for (int j = 0; j < m; ++j) y.col(j) = llt.solve(L * x.col(j));
        m_orthonormalize(y, L, rng);
        Eigen::MatrixXd by(n, m);
        for (int j = 0; j < m; ++j) by.col(j) = B * y.col(j);
        Eigen::MatrixXd s = y.transpose() * by;
        s = 0.5 * (s + s.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        if (es.info() != Eigen::Success) {
            throw NumericalError("spectral", "rayleigh_ritz", "dense projection failed");
        }
        x = y * es.eigenvectors();
        ritz = es.eigenvalues();

        worst = 0.0;
        for (int j = 0; j < opts.k; ++j) {
            worst = std::max(worst, pair_residual(B, L, x.col(j), ritz(j)));
        }
        if (worst <= opts.tol) break;
    }
    if (worst > opts.tol) {
        throw ConvergenceError("spectral", "smallest_eigenpairs",
                               "residual stalled after " +
                                   std::to_string(opts.max_iterations) + " sweeps",
                               worst);
    }

    out.iterations = std::min(it, opts.max_iterations);
    out.eigenvalues.resize(opts.k);
    out.residuals.resize(opts.k);
    out.eigenvectors = x.leftCols(opts.k);
    for (int j = 0; j < opts.k; ++j) {
        out.eigenvalues[j] = ritz(j);
        out.residuals[j] = pair_residual(B, L, x.col(j), ritz(j));
    }
    out.clusters = cluster_ids(out.eigenvalues, opts.cluster_rel_gap);
    return out;
}

Spectrum smallest_eigenpairs(const FemSystem& sys, int k, double tol) {
    EigenOptions opts;
    opts.k = k;
    opts.tol = tol;
    return smallest_eigenpairs(sys.B, sys.Lmass, opts);
}

Spectrum smallest_eigenpairs(const FemSystem& sys, const EigenOptions& opts) {
    return smallest_eigenpairs(sys.B, sys.Lmass, opts);
}

std::vector<double> dirichlet_gamma(const Mesh& mesh, double a, int k, double tol) {
    if (!(a > 0.0)) {
        throw DomainError("spectral", "dirichlet_gamma", "diffusivity must be positive");
    }
    const DofMaps dofs = build_dof_maps(mesh);
    if (dofs.n_field() == 0) {
        throw ConfigError("spectral", "dirichlet_gamma", "no interior field dofs");
    }
    const FieldMatrices f = assemble_field(mesh, dofs);
    EigenOptions opts;
    opts.k = k;
    opts.tol = tol;
    const SpMat scaled = a * f.stiffness;
    const Spectrum s = smallest_eigenpairs(scaled, f.mass, opts);
    return s.eigenvalues;
}

Spectrum dense_reference_eigen(const SpMat& B, const SpMat& L, int cap) {
    const int n = static_cast<int>(B.rows());
    if (n > cap) {
        throw DomainError("spectral", "dense_reference",
                          std::to_string(n) + " dofs exceed the dense cap " +
                              std::to_string(cap));
    }
    const Eigen::MatrixXd bd = Eigen::MatrixXd(B);
    const Eigen::MatrixXd ld = Eigen::MatrixXd(L);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(bd, ld,
                                                                 Eigen::ComputeEigenvectors |
                                                                     Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) {
        throw NumericalError("spectral", "dense_reference", "dense solver failed");
    }
    Spectrum out;
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    out.eigenvectors = es.eigenvectors();
    out.residuals.resize(n);
    for (int j = 0; j < n; ++j) {
        out.residuals[j] = pair_residual(B, L, out.eigenvectors.col(j), out.eigenvalues[j]);
    }
    EigenOptions defaults;
    out.clusters = cluster_ids(out.eigenvalues, defaults.cluster_rel_gap);
    return out;
}

Spectrum dense_reference_eigen(const FemSystem& sys, int cap) {
    return dense_reference_eigen(sys.B, sys.Lmass, cap);
}

GramDeviation check_orthonormality(const Spectrum& spec, const SpMat& B, const SpMat& L) {
    const int k = spec.count();
    GramDeviation dev;
    if (k == 0) return dev;
    const Eigen::MatrixXd lg = spec.eigenvectors.transpose() * (L * spec.eigenvectors);
    const Eigen::MatrixXd bg = spec.eigenvectors.transpose() * (B * spec.eigenvectors);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double li = lg(i, j) - (i == j ? 1.0 : 0.0);
            const double bi = bg(i, j) - (i == j ? spec.eigenvalues[i] : 0.0);
            dev.l_gram = std::max(dev.l_gram, std::abs(li));
            dev.b_gram = std::max(dev.b_gram, std::abs(bi));
        }
    }
    return dev;
}

GramDeviation check_orthonormality(const Spectrum& spec, const FemSystem& sys) {
    return check_orthonormality(spec, sys.B, sys.Lmass);
}

double largest_pencil_eigenvalue(const SpMat& T, const SpMat& A, double tol,
                                 std::uint64_t seed) {
    const int n = static_cast<int>(A.rows());
    if (T.rows() != n || T.cols() != n || A.cols() != n) {
        throw DomainError("spectral", "pencil", "matrix shape mismatch");
    }
    Eigen::SimplicialLLT<SpMat> llt;
    llt.compute(A);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("spectral", "pencil", "A factorization failed");
    }
    const int m = std::min(n, 4);
    Rng rng(seed);
    Eigen::MatrixXd x = seeded_block(n, m, rng.next_u64());
    m_orthonormalize(x, A, rng);
    double theta = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::MatrixXd y(n, m);
        for (int j = 0; j < m; ++j) y.col(j) = llt.solve(T * x.col(j));
        // the iteration can null out if T has tiny rank; reseed dead columns
        m_orthonormalize(y, A, rng);
        Eigen::MatrixXd s = y.transpose() * (T * y);
        s = 0.5 * (s + s.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        x = y * es.eigenvectors();
        const double next = es.eigenvalues().maxCoeff();
        const Vec top = x.col(m - 1);
        const Vec r = T * top - next * (A * top);
        const double rel = r.norm() / std::max(next * (A * top).norm(), 1e-300);
        const bool settled = std::abs(next - theta) <= tol * std::max(std::abs(next), 1e-300);
        theta = next;
        if (settled && rel <= 1e-9) break;
    }
    return theta;
}

} // namespace roadfield
