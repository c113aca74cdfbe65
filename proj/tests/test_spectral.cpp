#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "roadfield/assembly.hpp"
#include "roadfield/errors.hpp"
#include "roadfield/meshing.hpp"
#include "roadfield/rng.hpp"
#include "roadfield/spectral.hpp"
#include "test_support.hpp"

using namespace roadfield;

namespace {

SpMat sparse_diag(const std::vector<double>& d) {
    SpMat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < static_cast<int>(d.size()); ++i) m.insert(i, i) = d[i];
    m.makeCompressed();
    return m;
}

} // namespace

TEST_CASE("manufactured diagonal pencil: exact eigenvalues, cluster detection") {
    // B = diag(b), L = diag(w): eigenvalues b_i / w_i, known exactly.
    const std::vector<double> b = {3.0, 1.0, 4.0, 4.0, 10.0, 7.0};
    const std::vector<double> w = {1.0, 1.0, 2.0, 2.0, 2.0, 1.0};
    const Spectrum s = smallest_eigenpairs(sparse_diag(b), sparse_diag(w), {4, 1e-12});
    REQUIRE(s.count() == 4);
    CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.eigenvalues[2] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.eigenvalues[3] == doctest::Approx(3.0).epsilon(1e-12));
    // The double eigenvalue 2 = 4/2 = 4/2 shares one cluster.
    CHECK(s.clusters[1] == s.clusters[2]);
    CHECK(s.clusters[0] != s.clusters[1]);
    CHECK(s.clusters[2] != s.clusters[3]);
    for (double r : s.residuals) CHECK(r <= 1e-12);
}

TEST_CASE("gamma1 of the unit square converges to 2 pi^2 at order 2") {
    const auto net = rftest::midline_network();
    Mesh m = triangulate(rftest::unit_square(), net, 0.25);
    const double exact = 2.0 * M_PI * M_PI;
    std::vector<double> errs;
    for (int level = 0; level < 3; ++level) {
        const double g1 = dirichlet_gamma(m, 1.0, 1, 1e-10)[0];
        CHECK(g1 >= exact - 1e-9);  // conforming discretization bounds from above
        errs.push_back(g1 - exact);
        if (level < 2) m = refine(m);
    }
    // Nested refinement quarters the error.
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.15));
    CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("diffusivity scales the Dirichlet eigenvalues linearly") {
    const Mesh m = triangulate(rftest::unit_square(), rftest::midline_network(), 0.25);
    const auto g1 = dirichlet_gamma(m, 1.0, 2, 1e-10);
    const auto g3 = dirichlet_gamma(m, 3.0, 2, 1e-10);
    CHECK(g3[0] == doctest::Approx(3.0 * g1[0]).epsilon(1e-9));
    CHECK(g3[1] == doctest::Approx(3.0 * g1[1]).epsilon(1e-9));
}

TEST_CASE("iterative matches the dense oracle on coupled systems") {
    const Parameters params{1.0, 2.0, 1.5, 0.7};
    struct Config {
        DomainGeometry dom;
        RoadNetwork net;
        double h;
    };
    const std::vector<Config> configs = {
        {rftest::unit_square(), rftest::midline_network(), 0.2},
        {rftest::unit_square(), rftest::cross_network(), 0.2},
        {rftest::l_shape(), rftest::l_shape_segment(), 0.3},
    };
    for (const auto& cfg : configs) {
        const Mesh m = triangulate(cfg.dom, cfg.net, cfg.h);
        const FemSystem sys = build_system(m, params);
        REQUIRE(sys.dofs.n_total() <= 300);
        const Spectrum it = smallest_eigenpairs(sys, 5, 1e-10);
        const Spectrum dn = dense_reference_eigen(sys);
        for (int k = 0; k < 5; ++k) {
            CHECK(std::abs(it.eigenvalues[k] - dn.eigenvalues[k]) <=
                  1e-8 * std::abs(dn.eigenvalues[k]));
        }
        // Eigenvector agreement, sign/cluster aligned: project the iterative
        // vector onto the dense eigenspace of its cluster and compare L-norms.
        const Eigen::MatrixXd Ld = Eigen::MatrixXd(sys.Lmass);
        for (int k = 0; k < 5; ++k) {
            std::vector<int> members;
            for (int j = 0; j < dn.count(); ++j) {
                if (std::abs(dn.eigenvalues[j] - it.eigenvalues[k]) <=
                    1e-6 * (1.0 + std::abs(it.eigenvalues[k]))) {
                    members.push_back(j);
                }
            }
            REQUIRE(!members.empty());
            const Vec e = it.eigenvectors.col(k);
            Vec proj = Vec::Zero(e.size());
            for (int j : members) {
                const Vec d = dn.eigenvectors.col(j);
                proj += d * (e.dot(Ld * d));
            }
            const Vec diff = e - proj;
            CHECK(std::sqrt(diff.dot(Ld * diff)) <= 1e-6);
        }
    }
}

TEST_CASE("orthonormality invariants on a random corpus") {
    Rng rng(129);
    for (int trial = 0; trial < 4; ++trial) {
        const RoadNetwork net = rftest::benign_tree_network(rng, 4 + static_cast<int>(rng.below(3)));
        const Parameters params{rng.uniform(0.5, 2.0), rng.uniform(0.5, 3.0),
                                rng.uniform(0.5, 2.0), rng.uniform(0.3, 1.5)};
        const Mesh m = triangulate(rftest::unit_square(), net, 0.2);
        const FemSystem sys = build_system(m, params);
        const Spectrum s = smallest_eigenpairs(sys, 6, 1e-9);
        const GramDeviation g = check_orthonormality(s, sys);
        CHECK(g.l_gram <= 1e-8);
        CHECK(g.b_gram <= 1e-6 * std::abs(s.eigenvalues.back()));
        CHECK(s.eigenvalues.front() > 0.0);
        for (int k = 1; k < s.count(); ++k) CHECK(s.eigenvalues[k] >= s.eigenvalues[k - 1]);
    }
}

TEST_CASE("requested tolerance is honored by the residuals") {
    const Mesh m = triangulate(rftest::unit_square(), rftest::midline_network(), 0.15);
    const FemSystem sys = build_system(m, {});
    for (double tol : {1e-6, 1e-10}) {
        const Spectrum s = smallest_eigenpairs(sys, 4, tol);
        for (double r : s.residuals) CHECK(r <= tol);
    }
}

TEST_CASE("spectral determinism for a fixed seed") {
    const Mesh m = triangulate(rftest::unit_square(), rftest::cross_network(), 0.2);
    const FemSystem sys = build_system(m, {1.0, 2.0, 1.5, 0.7});
    const Spectrum s1 = smallest_eigenpairs(sys, 5, 1e-9);
    const Spectrum s2 = smallest_eigenpairs(sys, 5, 1e-9);
    for (int k = 0; k < 5; ++k) {
        CHECK(s1.eigenvalues[k] == s2.eigenvalues[k]);
        CHECK((s1.eigenvectors.col(k) - s2.eigenvectors.col(k)).norm() == 0.0);
    }
}

TEST_CASE("largest pencil eigenvalue matches the dense solver") {
    Rng rng(404);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 12 + static_cast<int>(rng.below(20));
        Eigen::MatrixXd R(n, n), S(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                R(i, j) = rng.signed_unit();
                S(i, j) = rng.signed_unit();
            }
        // T PSD with rank deficiency, A SPD.
        const Eigen::MatrixXd Td = R.leftCols(n / 2) * R.leftCols(n / 2).transpose();
        const Eigen::MatrixXd Ad =
            S * S.transpose() + Eigen::MatrixXd::Identity(n, n) * 0.5;
        const SpMat T = Td.sparseView();
        const SpMat A = Ad.sparseView();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Td, Ad);
        const double exact = es.eigenvalues().maxCoeff();
        CHECK(largest_pencil_eigenvalue(T, A) == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("dense oracle cap and argument validation") {
    const Mesh m = triangulate(rftest::unit_square(), rftest::midline_network(), 0.1);
    const FemSystem sys = build_system(m, {});
    REQUIRE(sys.dofs.n_total() > 40);
    CHECK_THROWS_AS(dense_reference_eigen(sys, 40), DomainError);
    CHECK_THROWS_AS(smallest_eigenpairs(sys, 0, 1e-8), DomainError);
    CHECK_THROWS_AS(smallest_eigenpairs(sys, 3, -1.0), DomainError);
    CHECK_THROWS_AS(smallest_eigenpairs(sys, sys.dofs.n_total() + 1, 1e-8), DomainError);
}
