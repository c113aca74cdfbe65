#include "doctest.h"

#include <cmath>

#include "roadfield/assembly.hpp"
#include "roadfield/errors.hpp"
#include "roadfield/evolution.hpp"
#include "roadfield/meshing.hpp"
#include "roadfield/rng.hpp"
#include "roadfield/spectral.hpp"
#include "test_support.hpp"

using namespace roadfield;

namespace {

FemSystem example_system(double h = 0.2) {
    const Mesh m = triangulate(rftest::unit_square(), rftest::midline_network(), h);
    return build_system(m, {1.0, 2.0, 1.5, 0.7});
}

} // namespace

TEST_CASE("implicit Euler matches the scalar recurrence in the eigenbasis") {
    // With the full dense spectrum, backward Euler diagonalizes: each
    // coefficient obeys c_{j+1} = c_j / (1 + dt lambda). The L-norm of the
    // trace must match the closed-form sum, which exercises the whole solver
    // chain against an independent scalar oracle.
    const FemSystem sys = example_system(0.25);
    const Spectrum full = dense_reference_eigen(sys);
    const State s0 = bump_initial(sys);
    const Vec c0 = project_initial(sys, full, s0);

    const double dt = 0.02;
    const int steps = 25;
    const EvolutionTrace trace = implicit_euler(sys, s0, dt, dt * steps);
    REQUIRE(static_cast<int>(trace.l_norms.size()) == steps + 1);
    for (int j = 0; j <= steps; ++j) {
        double sum = 0.0;
        for (int n = 0; n < full.count(); ++n) {
            const double decay = std::pow(1.0 + dt * full.eigenvalues[n], -j);
            sum += c0[n] * c0[n] * decay * decay;
        }
        CHECK(trace.l_norms[j] == doctest::Approx(std::sqrt(sum)).epsilon(1e-9));
    }
}

TEST_CASE("L-norm is nonincreasing along the trace") {
    const FemSystem sys = example_system();
    const EvolutionTrace trace = implicit_euler(sys, bump_initial(sys), 0.01, 0.5);
    for (std::size_t j = 1; j < trace.l_norms.size(); ++j) {
        CHECK(trace.l_norms[j] <= trace.l_norms[j - 1] * (1.0 + 1e-14));
    }
}

TEST_CASE("spectral propagator: semigroup property and t=0 identity") {
    const FemSystem sys = example_system(0.25);
    const Spectrum full = dense_reference_eigen(sys);
    const State s0 = bump_initial(sys);
    const Vec c0 = project_initial(sys, full, s0);

    const State at0 = spectral_propagate(full, c0, 0.0);
    // Full basis reconstructs the initial state.
    CHECK((at0.coeffs - s0.coeffs).norm() <= 1e-8 * s0.coeffs.norm());

    const State a = spectral_propagate(full, c0, 0.7);
    const Vec ca = project_initial(sys, full, a);
    const State ab = spectral_propagate(full, ca, 0.3);
    const State direct = spectral_propagate(full, c0, 1.0);
    CHECK((ab.coeffs - direct.coeffs).norm() <= 1e-10 * (1.0 + direct.coeffs.norm()));

    CHECK_THROWS_AS(spectral_propagate(full, c0, -1.0), DomainError);
}

TEST_CASE("backward Euler converges to the spectral solution at first order") {
    const FemSystem sys = example_system(0.25);
    const Spectrum full = dense_reference_eigen(sys);
    const State s0 = bump_initial(sys);
    const Vec c0 = project_initial(sys, full, s0);
    // Keep lambda * dt small across the ladder so the first order term
    // dominates; at larger steps the observed order drifts towards two.
    const double T = 0.1;
    const State exact = spectral_propagate(full, c0, T);

    std::vector<double> errors;
    for (double dt : {0.004, 0.002, 0.001, 0.0005}) {
        const EvolutionTrace tr = implicit_euler(sys, s0, dt, T, 1);
        // With a positive stride the final step is always recorded.
        const State last = tr.snapshots.back();
        REQUIRE(last.time == doctest::Approx(T));
        errors.push_back(std::sqrt(
            std::max(0.0, inner_L(sys, last.coeffs - exact.coeffs, last.coeffs - exact.coeffs))));
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double order = std::log2(errors[i - 1] / errors[i]);
        CHECK(order == doctest::Approx(1.0).epsilon(0.15));
    }
}

TEST_CASE("decay fit recovers a manufactured exponential exactly") {
    EvolutionTrace trace;
    const double rate = 3.7;
    for (int j = 0; j <= 200; ++j) {
        const double t = 0.01 * j;
        trace.times.push_back(t);
        trace.l_norms.push_back(2.5 * std::exp(-rate * t));
    }
    const DecayFit fit = decay_rate_fit(trace, 0.5);
    CHECK(fit.rate == doctest::Approx(rate).epsilon(1e-10));
    CHECK(fit.residual <= 1e-10);
    CHECK(fit.samples >= 10);
}

TEST_CASE("fitted decay approaches lambda1 for small dt") {
    const FemSystem sys = example_system(0.2);
    const Spectrum spec = smallest_eigenpairs(sys, 1, 1e-10);
    const double lambda1 = spec.eigenvalues[0];
    const double dt = 1e-3 / lambda1;
    // The bump loads the second mode heavily and the gap to it is small, so
    // the trailing window must sit deep in the decay before the fit isolates
    // the slowest rate: bias ~ (lambda2-lambda1) exp(-2(lambda2-lambda1)t).
    const EvolutionTrace trace = implicit_euler(sys, bump_initial(sys), dt, 25000 * dt);
    const DecayFit fit = decay_rate_fit(trace, 0.5);
    CHECK(fit.rate == doctest::Approx(lambda1).epsilon(0.02));
}

TEST_CASE("decay fit argument validation") {
    EvolutionTrace trace;
    for (int j = 0; j < 5; ++j) {
        trace.times.push_back(j * 0.1);
        trace.l_norms.push_back(std::exp(-1.0 * j * 0.1));
    }
    CHECK_THROWS_AS(decay_rate_fit(trace, 0.5), DomainError);  // too few samples
    CHECK_THROWS_AS(decay_rate_fit(trace, 0.0), DomainError);
    CHECK_THROWS_AS(decay_rate_fit(trace, 1.5), DomainError);
}

TEST_CASE("projection coefficients reconstruct in the full basis") {
    const FemSystem sys = example_system(0.3);
    const Spectrum full = dense_reference_eigen(sys);
    Rng rng(88);
    Vec x(sys.dofs.n_total());
    for (int i = 0; i < x.size(); ++i) x[i] = rng.signed_unit();
    const State s{x, 0.0};
    const Vec c = project_initial(sys, full, s);
    Vec recon = Vec::Zero(x.size());
    for (int n = 0; n < full.count(); ++n) recon += c[n] * full.eigenvectors.col(n);
    CHECK((recon - x).norm() <= 1e-8 * x.norm());
}

TEST_CASE("bump initial: field positive inside, road part zero") {
    const FemSystem sys = example_system(0.25);
    const State s0 = bump_initial(sys);
    const int nf = sys.dofs.n_field();
    for (int d = 0; d < nf; ++d) CHECK(s0.coeffs[d] > 0.0);
    for (int d = nf; d < sys.dofs.n_total(); ++d) CHECK(s0.coeffs[d] == 0.0);
    CHECK(l_norm(sys, s0) > 0.0);
}

TEST_CASE("nodal initial places values at the right dofs") {
    const FemSystem sys = example_system(0.3);
    const std::size_t nv = sys.mesh.vertices.size();
    std::vector<double> field(nv, 0.0), road(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
        field[v] = 1.0 + static_cast<double>(v);
        road[v] = 0.5 * static_cast<double>(v);
    }
    const State s = nodal_initial(sys, field, road);
    for (int d = 0; d < sys.dofs.n_field(); ++d) {
        CHECK(s.coeffs[d] == field[sys.dofs.field_vertex[d]]);
    }
    for (int d = 0; d < sys.dofs.n_road(); ++d) {
        CHECK(s.coeffs[sys.dofs.n_field() + d] == road[sys.dofs.road_vertex[d]]);
    }
    CHECK_THROWS_AS(nodal_initial(sys, std::vector<double>(nv - 1), road), DomainError);
}

TEST_CASE("snapshot stride honored") {
    const FemSystem sys = example_system(0.3);
    const EvolutionTrace tr = implicit_euler(sys, bump_initial(sys), 0.01, 0.1, 3);
    REQUIRE(!tr.snapshots.empty());
    // Snapshots at steps 0, 3, 6, 9 plus the forced final step 10.
    CHECK(tr.snapshots.size() == 5);
    CHECK(tr.snapshots.front().time == doctest::Approx(0.0));
    CHECK(tr.snapshots.back().time == doctest::Approx(0.1));
}

TEST_CASE("time stepping argument validation") {
    const FemSystem sys = example_system(0.3);
    const State s0 = bump_initial(sys);
    CHECK_THROWS_AS(implicit_euler(sys, s0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(implicit_euler(sys, s0, 0.1, 0.05), DomainError);
}
