#pragma once

#include <vector>

#include "roadfield/assembly.hpp"
#include "roadfield/spectral.hpp"

namespace roadfield {

/// Coefficient vector over free dofs, field part first, with a time stamp.
struct State {
    Vec coeffs;
    double time = 0.0;
};

struct EvolutionTrace {
    std::vector<double> times;    // strictly increasing, starting at 0
    std::vector<double> l_norms;  // nonincreasing for the dissipative system
    std::vector<State> snapshots;
    int snapshot_every = 0;
};

/// Expansion coefficients c_n = <e_n, s0>_L of the initial state in the
/// available spectral basis.
Vec project_initial(const FemSystem& sys, const Spectrum& spec, const State& s0);

/// Truncated eigen-series sum_n c_n exp(-lambda_n t) e_n. Exact in time for
/// whatever lies in the span of the supplied modes.
State spectral_propagate(const Spectrum& spec, const Vec& c0, double t);

/// Backward Euler: (Lmass + dt B) s_{j+1} = Lmass s_j, one factorization for
/// the whole run. Unconditionally stable and L-norm monotone.
EvolutionTrace implicit_euler(const FemSystem& sys, const State& s0, double dt, double t_end,
                              int snapshot_every = 0);

struct DecayFit {
    double rate = 0.0;      // fitted decay exponent (positive for decay)
    double residual = 0.0;  // rms misfit of the log-linear model
    int samples = 0;
};

/// Least-squares slope of log L-norm over the trailing `window` fraction of
/// the trace. Samples below the underflow guard 1e-300 are discarded.
DecayFit decay_rate_fit(const EvolutionTrace& trace, double window = 0.5);

/// Default initial datum: product of squared sines over the domain bounding
/// box on the field, zero on the road. Generic in the sense that its first
/// spectral coefficient is nonzero for every configuration we mesh.
State bump_initial(const FemSystem& sys);

/// Initial datum from nodal values given per mesh vertex (Dirichlet vertices
/// are ignored).
State nodal_initial(const FemSystem& sys, const std::vector<double>& field_values,
                    const std::vector<double>& road_values);

double l_norm(const FemSystem& sys, const State& s);

} // namespace roadfield
