#include "roadfield/analysis.hpp"

#include <cmath>

#include "roadfield/errors.hpp"

namespace roadfield {

std::string to_string(Classification c) {
    switch (c) {
        case Classification::Improves: return "improves";
        case Classification::Neutral: return "neutral";
        case Classification::Slows: return "slows";
    }
    return "neutral";
}

double poincare_constant(const Mesh& mesh) {
    const std::vector<double> g = dirichlet_gamma(mesh, 1.0, 1, 1e-10);
    if (!(g[0] > 0.0)) {
        throw NumericalError("analysis", "poincare", "nonpositive gamma1");
    }
    return 1.0 / g[0];
}

double trace_constant(const Mesh& mesh) {
    const DofMaps dofs = build_dof_maps(mesh);
    if (dofs.n_road() == 0 && mesh.road_edges.empty()) {
        throw DomainError("analysis", "trace_constant", "mesh carries no road edges");
    }
    const FieldMatrices f = assemble_field(mesh, dofs);
    const TraceMatrices t = assemble_trace_coupling(mesh, dofs);
    return largest_pencil_eigenvalue(t.t_ff, f.stiffness);
}

bool elementary_inequality_check(double alpha_v, double beta_v, double eps) {
    if (eps < 0.0) {
        throw DomainError("analysis", "elementary_inequality", "eps must be nonnegative");
    }
    const double lhs = (alpha_v - beta_v) * (alpha_v - beta_v) + eps * alpha_v * alpha_v;
    const double rhs = eps / (1.0 + eps) * beta_v * beta_v;
    const double scale = lhs + std::abs(rhs) + 1.0;
    return lhs >= rhs - 1e-15 * scale;
}

double coercivity_constant(const Parameters& params, double c_p, double c_t) {
    validate_parameters(params);
    if (!(c_p > 0.0) || !(c_t > 0.0)) {
        throw DomainError("analysis", "coercivity", "constants must be positive");
    }
    const double a = params.a, b = params.b, mu = params.mu, nu = params.nu;
    return std::min({a / 3.0, a / (3.0 * c_p), b, a * mu / (a + 3.0 * c_t * nu)});
}

double alpha_root(double a, double mu, double nu, double c_p, double c_t) {
    if (!(a > 0.0) || !(mu > 0.0) || !(nu > 0.0) || !(c_p > 0.0) || !(c_t > 0.0)) {
        throw DomainError("analysis", "alpha_root", "all inputs must be positive");
    }
    const double cpm = c_p * mu;
    const double ctn = c_t * nu;
    const double s = a + cpm + ctn;
    // discriminant equals (a + ctn - cpm)^2 + 4 c_t c_p nu mu, hence positive
    const double disc = (a + ctn - cpm) * (a + ctn - cpm) + 4.0 * ctn * cpm;
    const double alpha = 2.0 * cpm / (s + std::sqrt(disc));
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw NumericalError("analysis", "alpha_root",
                             "root escaped (0,1): " + std::to_string(alpha));
    }
    return alpha;
}

double alpha_trinomial(double a, double mu, double nu, double c_p, double c_t, double x) {
    const double s = a + c_p * mu + c_t * nu;
    return a * x * x - s * x + c_p * mu;
}

double lambda1_lower_bound(double a, double c_p, double alpha) {
    if (!(a > 0.0) || !(c_p > 0.0)) {
        throw DomainError("analysis", "lambda1_lower_bound", "a and c_p must be positive");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("analysis", "lambda1_lower_bound", "alpha must lie in (0,1)");
    }
    return a / c_p * alpha;
}

ConstantsReport constants_report(const Mesh& mesh, const RoadNetwork& net,
                                 const Parameters& params) {
    validate_parameters(params);
    ConstantsReport r;
    r.mesh_h = mesh.h_target;
    r.c_p = poincare_constant(mesh);
    r.c_t = trace_constant(mesh);
    const AhlforsEstimate ahl = ahlfors_upper_constant(net, r.sampling);
    r.lambda_K = ahl.value;
    r.alpha = alpha_root(params.a, params.mu, params.nu, r.c_p, r.c_t);
    r.c0 = lambda1_lower_bound(params.a, r.c_p, r.alpha);
    r.c_coer = coercivity_constant(params, r.c_p, r.c_t);
    return r;
}

EfficiencyReport efficiency_report(const Mesh& mesh, const RoadNetwork& net,
                                   const Parameters& params, const Spectrum& spec,
                                   double band) {
    if (spec.count() < 1) {
        throw ConfigError("analysis", "efficiency_report", "spectrum is empty");
    }
    if (spec.eigenvectors.rows() != build_dof_maps(mesh).n_total()) {
        throw ConfigError("analysis", "efficiency_report",
                          "spectrum does not match the mesh free-dof count");
    }
    if (!(band >= 0.0)) {
        throw DomainError("analysis", "efficiency_report", "band must be nonnegative");
    }
    EfficiencyReport rep;
    rep.band = band;
    rep.lambda1 = spec.eigenvalues[0];
    rep.gamma1 = dirichlet_gamma(mesh, params.a, 1, 1e-10)[0];
    rep.ratio = rep.lambda1 / rep.gamma1;
    if (rep.ratio > 1.0 + band) {
        rep.classification = Classification::Improves;
    } else if (rep.ratio < 1.0 - band) {
        rep.classification = Classification::Slows;
    } else {
        rep.classification = Classification::Neutral;
    }
    rep.constants = constants_report(mesh, net, params);
    rep.road_id = "edges=" + std::to_string(net.edges.size()) +
                  ";length=" + std::to_string(total_length(net));
    rep.chain_ok = rep.constants.c0 <= rep.lambda1 * (1.0 + 1e-10);
    return rep;
}

} // namespace roadfield
