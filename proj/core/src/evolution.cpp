#include "roadfield/evolution.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

#include "roadfield/errors.hpp"

namespace roadfield {

Vec project_initial(const FemSystem& sys, const Spectrum& spec, const State& s0) {
    if (s0.coeffs.size() != sys.Lmass.rows() ||
        spec.eigenvectors.rows() != sys.Lmass.rows()) {
        throw DomainError("evolution", "project_initial", "dimension mismatch");
    }
    return spec.eigenvectors.transpose() * (sys.Lmass * s0.coeffs);
}

State spectral_propagate(const Spectrum& spec, const Vec& c0, double t) {
    if (c0.size() != spec.count()) {
        throw DomainError("evolution", "spectral_propagate",
                          "coefficient count does not match the spectrum");
    }
    if (t < 0.0) {
        throw DomainError("evolution", "spectral_propagate", "negative time");
    }
    State s;
    s.time = t;
    s.coeffs = Vec::Zero(spec.eigenvectors.rows());
    for (int n = 0; n < spec.count(); ++n) {
        s.coeffs += c0(n) * std::exp(-spec.eigenvalues[n] * t) * spec.eigenvectors.col(n);
    }
    return s;
}

EvolutionTrace implicit_euler(const FemSystem& sys, const State& s0, double dt, double t_end,
                              int snapshot_every) {
    if (!(dt > 0.0)) throw DomainError("evolution", "implicit_euler", "dt must be positive");
    if (t_end < dt) throw DomainError("evolution", "implicit_euler", "T must be at least dt");
    if (s0.coeffs.size() != sys.Lmass.rows()) {
        throw DomainError("evolution", "implicit_euler", "state dimension mismatch");
    }
    SpMat stepper = sys.Lmass + dt * sys.B;
    Eigen::SimplicialLLT<SpMat> llt;
    llt.compute(stepper);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("evolution", "implicit_euler", "stepper factorization failed");
    }
    const long steps = std::lround(t_end / dt);
    EvolutionTrace trace;
    trace.snapshot_every = snapshot_every;
    Vec s = s0.coeffs;
    trace.times.push_back(0.0);
    trace.l_norms.push_back(std::sqrt(std::max(s.dot(sys.Lmass * s), 0.0)));
    if (snapshot_every > 0) trace.snapshots.push_back({s, 0.0});
    for (long j = 1; j <= steps; ++j) {
        s = llt.solve(sys.Lmass * s);
        const double t = dt * static_cast<double>(j);
        trace.times.push_back(t);
        trace.l_norms.push_back(std::sqrt(std::max(s.dot(sys.Lmass * s), 0.0)));
        if (snapshot_every > 0 && (j % snapshot_every == 0 || j == steps)) {
            trace.snapshots.push_back({s, t});
        }
    }
    return trace;
}

DecayFit decay_rate_fit(const EvolutionTrace& trace, double window) {
    if (!(window > 0.0) || window > 1.0) {
        throw DomainError("evolution", "decay_rate_fit", "window must lie in (0, 1]");
    }
    if (trace.times.size() != trace.l_norms.size() || trace.times.empty()) {
        throw DomainError("evolution", "decay_rate_fit", "malformed trace");
    }
    const double t_end = trace.times.back();
    const double t_from = t_end * (1.0 - window);
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        if (trace.times[i] < t_from) continue;
        if (trace.l_norms[i] <= 1e-300) continue;
        ts.push_back(trace.times[i]);
        ys.push_back(std::log(trace.l_norms[i]));
    }
    if (ts.size() < 10) {
        throw DomainError("evolution", "decay_rate_fit",
                          "need at least 10 positive samples in the window, have " +
                              std::to_string(ts.size()));
    }
    const double n = static_cast<double>(ts.size());
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
    }
    const double tbar = st / n, ybar = sy / n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - tbar) * (ts[i] - tbar);
        sty += (ts[i] - tbar) * (ys[i] - ybar);
    }
    if (stt <= 0.0) {
        throw DomainError("evolution", "decay_rate_fit", "degenerate time window");
    }
    const double slope = sty / stt;
    DecayFit fit;
    fit.rate = -slope;
    fit.samples = static_cast<int>(ts.size());
    double ssr = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double pred = ybar + slope * (ts[i] - tbar);
        ssr += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.residual = std::sqrt(ssr / n);
    return fit;
}

State bump_initial(const FemSystem& sys) {
    const BoundingBox box = bounding_box(sys.mesh.vertices);
    const double w = std::max(box.hi.x - box.lo.x, 1e-300);
    const double h = std::max(box.hi.y - box.lo.y, 1e-300);
    State s;
    s.coeffs = Vec::Zero(sys.dofs.n_total());
    for (int d = 0; d < sys.dofs.n_field(); ++d) {
        const Point2 p = sys.mesh.vertices[sys.dofs.field_vertex[d]];
        const double sx = std::sin(M_PI * (p.x - box.lo.x) / w);
        const double sy = std::sin(M_PI * (p.y - box.lo.y) / h);
        s.coeffs(d) = sx * sx * sy * sy;
    }
    return s;
}

State nodal_initial(const FemSystem& sys, const std::vector<double>& field_values,
                    const std::vector<double>& road_values) {
    const std::size_t nv = sys.mesh.vertices.size();
    if (field_values.size() != nv || road_values.size() != nv) {
        throw DomainError("evolution", "nodal_initial",
                          "need one field and one road value per mesh vertex");
    }
    State s;
    s.coeffs = Vec::Zero(sys.dofs.n_total());
    for (int d = 0; d < sys.dofs.n_field(); ++d) {
        s.coeffs(d) = field_values[sys.dofs.field_vertex[d]];
    }
    const int nf = sys.dofs.n_field();
    for (int d = 0; d < sys.dofs.n_road(); ++d) {
        s.coeffs(nf + d) = road_values[sys.dofs.road_vertex[d]];
    }
    return s;
}

double l_norm(const FemSystem& sys, const State& s) {
    return std::sqrt(std::max(inner_L(sys, s.coeffs, s.coeffs), 0.0));
}

} // namespace roadfield
