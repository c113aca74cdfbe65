#pragma once

#include <string>

#include "roadfield/assembly.hpp"
#include "roadfield/network.hpp"
#include "roadfield/spectral.hpp"

namespace roadfield {

/// Explicit constants entering the coercivity and eigenvalue bounds, all
/// computed at the discrete level where the generating inequalities are
/// exact: c_p is the optimal discrete Poincare constant (1/gamma1 at unit
/// diffusivity), c_t the optimal discrete trace constant (largest eigenvalue
/// of the trace/stiffness pencil), lambda_K the sampled Ahlfors upper bound.
struct ConstantsReport {
    double c_p = 0.0;
    double c_t = 0.0;
    double lambda_K = 0.0;
    double alpha = 0.0;
    double c0 = 0.0;      // lower bound (a / c_p) * alpha for lambda1
    double c_coer = 0.0;  // H-norm coercivity constant
    double mesh_h = 0.0;
    AhlforsSampling sampling;
};

enum class Classification { Improves, Neutral, Slows };

std::string to_string(Classification c);

struct EfficiencyReport {
    double lambda1 = 0.0;
    double gamma1 = 0.0;
    double ratio = 0.0;
    Classification classification = Classification::Neutral;
    ConstantsReport constants;
    std::string road_id;
    bool chain_ok = false;  // c0 <= lambda1 re-verified numerically
    double band = 1e-3;
};

/// Optimal discrete Poincare constant of the mesh: 1/gamma1 at a = 1.
double poincare_constant(const Mesh& mesh);

/// Optimal discrete trace constant: largest eigenvalue of T_ff x = c A_f x
/// over field dofs, so v^T T_ff v <= c_t v^T A_f v for every discrete v.
double trace_constant(const Mesh& mesh);

/// (alpha - beta)^2 + eps alpha^2 >= eps/(1+eps) beta^2, allowing only
/// arithmetic roundoff slack.
bool elementary_inequality_check(double alpha_v, double beta_v, double eps);

/// min(a/3, a/(3 c_p), b, a mu / (a + 3 c_t nu)).
double coercivity_constant(const Parameters& params, double c_p, double c_t);

/// Smaller root of tau(X) = a X^2 - (a + c_p mu + c_t nu) X + c_p mu in
/// (0,1), via the cancellation-safe form 2 c_p mu / (s + sqrt(s^2 - 4 a c_p mu)).
double alpha_root(double a, double mu, double nu, double c_p, double c_t);

/// tau evaluated at x; for testing the root quality.
double alpha_trinomial(double a, double mu, double nu, double c_p, double c_t, double x);

/// c0 = (a / c_p) * alpha.
double lambda1_lower_bound(double a, double c_p, double alpha);

ConstantsReport constants_report(const Mesh& mesh, const RoadNetwork& net,
                                 const Parameters& params);

/// Assembles the efficiency criterion: lambda1 from the supplied spectrum,
/// gamma1 recomputed on the same mesh with the same diffusivity, plus the
/// verified lower-bound chain. `band` is the relative neutrality width of the
/// classification.
EfficiencyReport efficiency_report(const Mesh& mesh, const RoadNetwork& net,
                                   const Parameters& params, const Spectrum& spec,
                                   double band = 1e-3);

} // namespace roadfield
