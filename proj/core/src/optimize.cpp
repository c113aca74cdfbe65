#include "roadfield/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "roadfield/errors.hpp"
#include "roadfield/spectral.hpp"

namespace roadfield {

RoadFamily road_family_from_string(const std::string& name) {
    if (name == "segment-bundle") return RoadFamily::SegmentBundle;
    if (name == "cross") return RoadFamily::Cross;
    if (name == "comb") return RoadFamily::Comb;
    if (name == "tree") return RoadFamily::Tree;
    if (name == "user-list") return RoadFamily::UserList;
    throw ConfigError("optimize", "family", "unknown road family '" + name + "'");
}

std::string to_string(RoadFamily f) {
    switch (f) {
        case RoadFamily::SegmentBundle: return "segment-bundle";
        case RoadFamily::Cross: return "cross";
        case RoadFamily::Comb: return "comb";
        case RoadFamily::Tree: return "tree";
        case RoadFamily::UserList: return "user-list";
    }
    return "user-list";
}

const CandidateEvaluation& SearchResult::best() const {
    if (ranked.empty()) {
        throw ConstructionError("optimize", "best", "no feasible candidate was found");
    }
    return ranked.front();
}

namespace {

double polygon_perimeter(const std::vector<Point2>& poly) {
    double p = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        p += distance(poly[i], poly[(i + 1) % poly.size()]);
    }
    return p;
}

Point2 boundary_point(const std::vector<Point2>& poly, double s) {
    const double per = polygon_perimeter(poly);
    s = std::fmod(s, per);
    if (s < 0.0) s += per;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        const double len = distance(a, b);
        if (s <= len || i + 1 == poly.size()) {
            const double t = len > 0.0 ? std::min(s / len, 1.0) : 0.0;
            return a + t * (b - a);
        }
        s -= len;
    }
    return poly.front();
}

double corner_arc_distance(const std::vector<Point2>& poly, double s) {
    const double per = polygon_perimeter(poly);
    s = std::fmod(s, per);
    if (s < 0.0) s += per;
    double best = per;
    double acc = 0.0;
    for (std::size_t i = 0; i <= poly.size(); ++i) {
        const double d = std::abs(s - acc);
        best = std::min({best, d, per - d});
        if (i < poly.size()) {
            acc += distance(poly[i], poly[(i + 1) % poly.size()]);
        }
    }
    return best;
}

bool contains_required_points(const RoadNetwork& net, const std::vector<Point2>& required,
                              double tol) {
    for (const Point2& p : required) {
        bool found = false;
        for (const auto& e : net.edges) {
            if (point_segment_distance(p, net.vertices[e[0]], net.vertices[e[1]]) <= tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::string params_label(const std::vector<double>& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", p[i]);
        s += buf;
    }
    return s + ")";
}

/// Builds one network from family coordinates; empty result means the
/// parameter point is infeasible for a structural reason stored in `why`.
struct FamilyBuilder {
    const RoadFamilySpec& spec;
    BoundingBox box;
    double perimeter;
    double clearance;  // interior endpoints keep this distance from the boundary

    explicit FamilyBuilder(const RoadFamilySpec& s)
        : spec(s),
          box(bounding_box(s.domain.boundary)),
          perimeter(polygon_perimeter(s.domain.boundary)),
          clearance(std::max(0.75 * s.h, 0.02 * box.diameter())) {}

    bool interior_ok(Point2 p) const {
        return point_in_polygon(p, spec.domain.boundary) &&
               polygon_boundary_distance(p, spec.domain.boundary) >= clearance;
    }

    bool build(const std::vector<double>& p, RoadNetwork& net, std::string& why) const {
        switch (spec.family) {
            case RoadFamily::SegmentBundle: return build_segment(p, net, why);
            case RoadFamily::Cross: return build_cross(p, net, why);
            case RoadFamily::Comb: return build_comb(p, net, why);
            case RoadFamily::Tree: return build_tree(p, net, why);
            case RoadFamily::UserList: why = "user-list has no parameter builder"; return false;
        }
        why = "unknown family";
        return false;
    }

    bool check_length(const RoadNetwork& net, std::string& why) const {
        const double len = total_length(net);
        if (len > spec.budget * (1.0 + 1e-12)) {
            why = "length " + std::to_string(len) + " over budget";
            return false;
        }
        if (len < spec.min_length) {
            why = "length " + std::to_string(len) + " under minimum";
            return false;
        }
        return true;
    }

    bool build_segment(const std::vector<double>& p, RoadNetwork& net, std::string& why) const {
        double s1 = p[0], s2 = p[1];
        if (std::abs(s1 - s2) < 1e-12) {
            why = "coincident endpoints";
            return false;
        }
        if (corner_arc_distance(spec.domain.boundary, s1) < spec.corner_clearance ||
            corner_arc_distance(spec.domain.boundary, s2) < spec.corner_clearance) {
            why = "endpoint too close to a corner";
            return false;
        }
        const Point2 a = boundary_point(spec.domain.boundary, s1);
        const Point2 b = boundary_point(spec.domain.boundary, s2);
        const Point2 mid = 0.5 * (a + b);
        if (!point_in_polygon(mid, spec.domain.boundary) ||
            polygon_boundary_distance(mid, spec.domain.boundary) <
                1e-6 * box.diameter()) {
            why = "chord does not pass through the interior";
            return false;
        }
        net.vertices = {a, b};
        net.edges = {{0, 1}};
        net.boundary_vertex_flags = {1, 1};
        return check_length(net, why);
    }

    bool build_cross(const std::vector<double>& p, RoadNetwork& net, std::string& why) const {
        const Point2 c{p[0], p[1]};
        const double r = p[2];
        if (r <= 0.0) {
            why = "nonpositive arm";
            return false;
        }
        const Point2 tips[4] = {{c.x + r, c.y}, {c.x, c.y + r}, {c.x - r, c.y}, {c.x, c.y - r}};
        if (!interior_ok(c)) {
            why = "center too close to the boundary";
            return false;
        }
        for (const Point2& t : tips) {
            if (!interior_ok(t)) {
                why = "arm tip too close to the boundary";
                return false;
            }
        }
        net.vertices = {c, tips[0], tips[1], tips[2], tips[3]};
        net.edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
        net.boundary_vertex_flags.assign(5, 0);
        return check_length(net, why);
    }

    bool build_comb(const std::vector<double>& p, RoadNetwork& net, std::string& why) const {
        const double y0 = p[0];
        const double tooth = p[1];
        const int teeth = static_cast<int>(std::lround(p[2]));
        if (teeth < 1 || tooth <= 0.0) {
            why = "degenerate comb";
            return false;
        }
        const double margin = std::max(clearance, 0.1 * (box.hi.x - box.lo.x));
        const double x0 = box.lo.x + margin;
        const double x1 = box.hi.x - margin;
        if (x1 - x0 < spec.min_length) {
            why = "domain too narrow for a spine";
            return false;
        }
        net.vertices.clear();
        net.edges.clear();
        net.vertices.push_back({x0, y0});
        // junction vertices carry the teeth; spine runs between consecutive ones
        for (int k = 1; k <= teeth; ++k) {
            const double x = x0 + (x1 - x0) * k / (teeth + 1.0);
            net.vertices.push_back({x, y0});
        }
        net.vertices.push_back({x1, y0});
        for (int k = 0; k <= teeth; ++k) {
            net.edges.push_back({k, k + 1});
        }
        for (int k = 1; k <= teeth; ++k) {
            const Point2 j = net.vertices[k];
            net.vertices.push_back({j.x, j.y - tooth});
            net.edges.push_back({k, static_cast<int>(net.vertices.size()) - 1});
        }
        net.boundary_vertex_flags.assign(net.vertices.size(), 0);
        for (const Point2& v : net.vertices) {
            if (!interior_ok(v)) {
                why = "comb vertex too close to the boundary";
                return false;
            }
        }
        return check_length(net, why);
    }

    bool build_tree(const std::vector<double>& p, RoadNetwork& net, std::string& why) const {
        const Point2 c{p[0], p[1]};
        const double r = p[2];
        const double phase = p[3];
        if (r <= 0.0) {
            why = "nonpositive ray";
            return false;
        }
        if (!interior_ok(c)) {
            why = "center too close to the boundary";
            return false;
        }
        net.vertices = {c};
        net.edges.clear();
        for (int k = 0; k < 3; ++k) {
            const double ang = phase + 2.0 * M_PI * k / 3.0;
            const Point2 tip{c.x + r * std::cos(ang), c.y + r * std::sin(ang)};
            if (!interior_ok(tip)) {
                why = "ray tip too close to the boundary";
                return false;
            }
            net.vertices.push_back(tip);
            net.edges.push_back({0, k + 1});
        }
        net.boundary_vertex_flags.assign(4, 0);
        return check_length(net, why);
    }

    /// Parameter axes: per-axis value lists for a grid with n points.
    std::vector<std::vector<double>> axes(int n) const {
        std::vector<std::vector<double>> ax;
        auto linspace = [](double lo, double hi, int count) {
            std::vector<double> v(count);
            for (int i = 0; i < count; ++i) {
                v[i] = lo + (hi - lo) * (i + 1.0) / (count + 1.0);
            }
            return v;
        };
        switch (spec.family) {
            case RoadFamily::SegmentBundle: {
                std::vector<double> s(n);
                for (int i = 0; i < n; ++i) s[i] = perimeter * i / n;
                ax = {s, s};
                break;
            }
            case RoadFamily::Cross: {
                const double rmax = std::min({spec.budget / 4.0,
                                              0.5 * (box.hi.x - box.lo.x),
                                              0.5 * (box.hi.y - box.lo.y)});
                ax = {linspace(box.lo.x, box.hi.x, n), linspace(box.lo.y, box.hi.y, n),
                      linspace(0.0, rmax, n)};
                break;
            }
            case RoadFamily::Comb: {
                const double tmax = std::min(spec.budget / 2.0, 0.5 * (box.hi.y - box.lo.y));
                ax = {linspace(box.lo.y, box.hi.y, n), linspace(0.0, tmax, n),
                      {2.0, 3.0, 4.0}};
                break;
            }
            case RoadFamily::Tree: {
                const double rmax = std::min(spec.budget / 3.0,
                                             0.5 * std::min(box.hi.x - box.lo.x,
                                                            box.hi.y - box.lo.y));
                ax = {linspace(box.lo.x, box.hi.x, n), linspace(box.lo.y, box.hi.y, n),
                      linspace(0.0, rmax, n), linspace(0.0, 2.0 * M_PI / 3.0, n)};
                break;
            }
            case RoadFamily::UserList: break;
        }
        return ax;
    }

    /// Fine-grid step per axis for local search.
    std::vector<double> fine_steps() const {
        std::vector<double> steps;
        const auto ax = axes(spec.grid);
        for (const auto& axis : ax) {
            if (axis.size() < 2) {
                steps.push_back(1.0);
            } else {
                steps.push_back((axis[1] - axis[0]) / spec.fine_factor);
            }
        }
        return steps;
    }
};

void cartesian_grid(const std::vector<std::vector<double>>& axes, std::size_t dim,
                    std::vector<double>& point, std::vector<std::vector<double>>& out) {
    if (dim == axes.size()) {
        out.push_back(point);
        return;
    }
    for (const double v : axes[dim]) {
        point[dim] = v;
        cartesian_grid(axes, dim + 1, point, out);
    }
}

} // namespace

std::vector<Candidate> enumerate_candidates(const RoadFamilySpec& spec) {
    if (!(spec.budget > 0.0)) {
        throw DomainError("optimize", "enumerate", "budget must be positive");
    }
    if (spec.domain.boundary.size() < 3) {
        throw DomainError("optimize", "enumerate", "domain polygon required");
    }
    std::vector<Candidate> out;
    if (spec.family == RoadFamily::UserList) {
        for (std::size_t i = 0; i < spec.user_candidates.size(); ++i) {
            Candidate c;
            c.id = static_cast<int>(i);
            c.net = spec.user_candidates[i];
            c.label = "user[" + std::to_string(i) + "]";
            out.push_back(std::move(c));
        }
        if (out.empty()) {
            throw ConstructionError("optimize", "enumerate", "user list is empty");
        }
        return out;
    }

    const FamilyBuilder builder(spec);
    const auto axes = builder.axes(spec.grid);
    std::vector<std::vector<double>> points;
    std::vector<double> scratch(axes.size(), 0.0);
    cartesian_grid(axes, 0, scratch, points);

    int id = 0;
    for (const auto& p : points) {
        if (spec.family == RoadFamily::SegmentBundle && !(p[0] < p[1])) continue;
        RoadNetwork net;
        std::string why;
        if (!builder.build(p, net, why)) continue;
        if (!contains_required_points(net, spec.required_points,
                                      std::max(spec.required_tol, 1e-9))) {
            continue;
        }
        const NetworkValidation v = validate_network(net);
        if (!v.valid()) continue;
        Candidate c;
        c.id = id++;
        c.net = std::move(net);
        c.parameters = p;
        c.label = to_string(spec.family) + params_label(p);
        out.push_back(std::move(c));
    }
    if (out.empty()) {
        throw ConstructionError("optimize", "enumerate",
                                "no feasible candidate on the " + to_string(spec.family) +
                                    " grid (budget " + std::to_string(spec.budget) + ")");
    }
    return out;
}

double Gamma1Cache::get_or_compute(const Mesh& mesh, const Parameters& params, double h,
                                   double tol) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const Entry& e : entries_) {
        if (e.h == h && e.a == params.a) {
            ++hits_;
            return e.gamma1;
        }
    }
    const double g = dirichlet_gamma(mesh, params.a, 1, tol)[0];
    entries_.push_back({h, params.a, g});
    return g;
}

CandidateEvaluation evaluate_candidate(const RoadFamilySpec& spec, const Candidate& cand,
                                       Gamma1Cache& cache) {
    CandidateEvaluation ev;
    ev.candidate = cand;
    try {
        const NetworkValidation v = validate_network(cand.net);
        if (!v.valid()) {
            ev.error = "invalid network: " + v.describe();
            return ev;
        }
        ev.length = total_length(cand.net);
        if (ev.length > spec.budget * (1.0 + 1e-12)) {
            ev.error = "over budget";
            return ev;
        }
        if (!contains_required_points(cand.net, spec.required_points,
                                      std::max(spec.required_tol, 1e-9))) {
            ev.error = "required point lost";
            return ev;
        }
        const Mesh mesh = triangulate(spec.domain, cand.net, spec.h, spec.mesh_options);
        const FemSystem sys = build_system(mesh, spec.params);
        EigenOptions eopts;
        eopts.k = spec.eigen_k;
        eopts.tol = spec.eigen_tol;
        eopts.seed = spec.seed;
        const Spectrum sp = smallest_eigenpairs(sys, eopts);
        ev.lambda1 = sp.eigenvalues[0];
        ev.gamma1 = cache.get_or_compute(mesh, spec.params, spec.h, spec.eigen_tol);
        ev.ratio = ev.lambda1 / ev.gamma1;
        if (ev.ratio > 1.0 + spec.band) {
            ev.classification = Classification::Improves;
        } else if (ev.ratio < 1.0 - spec.band) {
            ev.classification = Classification::Slows;
        } else {
            ev.classification = Classification::Neutral;
        }
        ev.ok = true;
    } catch (const Error& e) {
        ev.ok = false;
        ev.error = e.what();
    }
    return ev;
}

void rank(std::vector<CandidateEvaluation>& evals) {
    std::stable_sort(evals.begin(), evals.end(),
                     [](const CandidateEvaluation& x, const CandidateEvaluation& y) {
                         if (x.ratio != y.ratio) return x.ratio > y.ratio;
                         if (x.length != y.length) return x.length < y.length;
                         return x.candidate.id < y.candidate.id;
                     });
}

namespace {

int resolve_threads(int threads) {
    if (threads < 1) threads = 1;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return std::min(threads, std::max(hw, 1));
}

/// Evaluate candidates into slots; the first candidate runs serially so the
/// gamma1 cache is warm (and thus identical) regardless of thread count.
std::vector<CandidateEvaluation> evaluate_all(const RoadFamilySpec& spec,
                                              const std::vector<Candidate>& cands,
                                              Gamma1Cache& cache, int threads) {
    std::vector<CandidateEvaluation> evals(cands.size());
    std::size_t first_parallel = 0;
    while (first_parallel < cands.size()) {
        evals[first_parallel] = evaluate_candidate(spec, cands[first_parallel], cache);
        ++first_parallel;
        if (evals[first_parallel - 1].ok) break;
    }
    const int nthreads = resolve_threads(threads);
    std::atomic<std::size_t> next{first_parallel};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cands.size()) break;
            evals[i] = evaluate_candidate(spec, cands[i], cache);
        }
    };
    if (nthreads <= 1 || cands.size() - first_parallel <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return evals;
}

void fold_into_result(SearchResult& result, std::vector<CandidateEvaluation>&& evals) {
    for (auto& ev : evals) {
        ++result.evaluations;
        if (ev.ok) {
            result.ranked.push_back(std::move(ev));
        } else {
            result.rejections.push_back(ev.candidate.label + ": " + ev.error);
        }
    }
}

/// Steepest-ascent hill climbing on the fine grid (parametric families) or by
/// vertex nudges with centroid-scaling budget projection (user lists).
void local_refine(const RoadFamilySpec& spec, SearchResult& result, Gamma1Cache& cache,
                  int iterations, int threads, int& next_id) {
    if (result.ranked.empty() || iterations <= 0) return;
    rank(result.ranked);
    CandidateEvaluation cur = result.ranked.front();

    const FamilyBuilder builder(spec);
    const std::vector<double> steps =
        spec.family == RoadFamily::UserList ? std::vector<double>() : builder.fine_steps();
    std::vector<std::vector<double>> visited;
    if (!cur.candidate.parameters.empty()) visited.push_back(cur.candidate.parameters);

    for (int it = 0; it < iterations; ++it) {
        std::vector<Candidate> moves;
        if (spec.family != RoadFamily::UserList) {
            const std::vector<double>& p = cur.candidate.parameters;
            for (std::size_t d = 0; d < p.size(); ++d) {
                for (const double sgn : {-1.0, 1.0}) {
                    std::vector<double> q = p;
                    q[d] += sgn * steps[d];
                    if (spec.family == RoadFamily::SegmentBundle) {
                        const double per = polygon_perimeter(spec.domain.boundary);
                        q[0] = std::fmod(q[0] + per, per);
                        q[1] = std::fmod(q[1] + per, per);
                        if (q[0] > q[1]) std::swap(q[0], q[1]);
                    }
                    if (std::find(visited.begin(), visited.end(), q) != visited.end()) {
                        continue;
                    }
                    visited.push_back(q);
                    RoadNetwork net;
                    std::string why;
                    if (!builder.build(q, net, why)) continue;
                    if (!contains_required_points(net, spec.required_points,
                                                  std::max(spec.required_tol, 1e-9))) {
                        continue;
                    }
                    Candidate c;
                    c.id = next_id++;
                    c.net = std::move(net);
                    c.parameters = q;
                    c.label = to_string(spec.family) + params_label(q) + "*";
                    moves.push_back(std::move(c));
                }
            }
        } else {
            const double delta = 0.5 * spec.h;
            const RoadNetwork& base = cur.candidate.net;
            for (std::size_t v = 0; v < base.vertices.size(); ++v) {
                if (base.boundary_vertex_flags[v]) continue;
                for (const Point2 dir : {Point2{delta, 0.0}, Point2{-delta, 0.0},
                                         Point2{0.0, delta}, Point2{0.0, -delta}}) {
                    RoadNetwork net = base;
                    net.vertices[v] = net.vertices[v] + dir;
                    const double len = total_length(net);
                    if (len > spec.budget) {
                        // uniform scaling toward the centroid restores the budget
                        Point2 cen{0.0, 0.0};
                        for (const Point2& q : net.vertices) cen = cen + q;
                        cen = (1.0 / static_cast<double>(net.vertices.size())) * cen;
                        const double f = spec.budget / len;
                        bool flags_ok = true;
                        for (std::size_t w = 0; w < net.vertices.size(); ++w) {
                            net.vertices[w] = cen + f * (net.vertices[w] - cen);
                            if (net.boundary_vertex_flags[w] &&
                                polygon_boundary_distance(net.vertices[w],
                                                          spec.domain.boundary) >
                                    1e-9 * builder.box.diameter()) {
                                flags_ok = false;
                            }
                        }
                        if (!flags_ok) continue;
                    }
                    if (!contains_required_points(net, spec.required_points,
                                                  std::max(spec.required_tol, 1e-9))) {
                        continue;
                    }
                    Candidate c;
                    c.id = next_id++;
                    c.net = std::move(net);
                    c.label = cur.candidate.label + "+v" + std::to_string(v) + "*";
                    moves.push_back(std::move(c));
                }
            }
        }
        if (moves.empty()) break;
        std::vector<CandidateEvaluation> evals = evaluate_all(spec, moves, cache, threads);
        int best = -1;
        for (std::size_t i = 0; i < evals.size(); ++i) {
            ++result.evaluations;
            if (!evals[i].ok) {
                result.rejections.push_back(evals[i].candidate.label + ": " + evals[i].error);
                continue;
            }
            if (best < 0 || evals[i].ratio > evals[best].ratio) {
                best = static_cast<int>(i);
            }
        }
        bool improved = false;
        for (auto& ev : evals) {
            if (ev.ok) result.ranked.push_back(ev);
        }
        if (best >= 0 && evals[best].ratio > cur.ratio) {
            cur = evals[best];
            improved = true;
        }
        if (!improved) break;
    }
    result.notes.push_back("local search settled at " + cur.candidate.label +
                           " ratio=" + std::to_string(cur.ratio));
}

void recheck_top_at_double_resolution(const RoadFamilySpec& spec, SearchResult& result,
                                      int threads) {
    rank(result.ranked);
    const std::size_t top = std::min<std::size_t>(result.ranked.size(), 3);
    if (top < 2) return;
    RoadFamilySpec fine = spec;
    fine.h = spec.h / 2.0;
    Gamma1Cache fine_cache;
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < top; ++i) cands.push_back(result.ranked[i].candidate);
    std::vector<CandidateEvaluation> evals = evaluate_all(fine, cands, fine_cache, threads);
    std::vector<std::size_t> order(top);
    for (std::size_t i = 0; i < top; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double rx = evals[x].ok ? evals[x].ratio : -1.0;
        const double ry = evals[y].ok ? evals[y].ratio : -1.0;
        return rx > ry;
    });
    std::vector<CandidateEvaluation> reordered;
    for (std::size_t i = 0; i < top; ++i) {
        reordered.push_back(result.ranked[order[i]]);
        result.notes.push_back("refined " + evals[order[i]].candidate.label + " ratio=" +
                               std::to_string(evals[order[i]].ok ? evals[order[i]].ratio
                                                                 : -1.0) +
                               " at h/2");
    }
    for (std::size_t i = 0; i < top; ++i) result.ranked[i] = reordered[i];
}

} // namespace

SearchResult run_search(const RoadFamilySpec& spec, int threads) {
    validate_parameters(spec.params);
    const std::vector<Candidate> cands = enumerate_candidates(spec);
    SearchResult result;
    Gamma1Cache cache;
    fold_into_result(result, evaluate_all(spec, cands, cache, threads));
    if (result.ranked.empty()) {
        std::string diag = "all " + std::to_string(result.evaluations) + " candidates failed";
        if (!result.rejections.empty()) diag += "; first: " + result.rejections.front();
        throw ConstructionError("optimize", "run_search", diag);
    }
    int next_id = static_cast<int>(cands.size());
    local_refine(spec, result, cache, spec.local_iterations, threads, next_id);
    rank(result.ranked);
    recheck_top_at_double_resolution(spec, result, threads);
    result.gamma_cache_hits = cache.hits();
    return result;
}

SearchResult local_search(const RoadFamilySpec& spec, const Candidate& seed, int iterations,
                          int threads) {
    validate_parameters(spec.params);
    SearchResult result;
    Gamma1Cache cache;
    std::vector<Candidate> one{seed};
    fold_into_result(result, evaluate_all(spec, one, cache, threads));
    if (result.ranked.empty()) {
        throw ConstructionError("optimize", "local_search",
                                "seed candidate is infeasible: " +
                                    (result.rejections.empty() ? std::string("unknown")
                                                               : result.rejections.front()));
    }
    int next_id = seed.id + 1000000;
    local_refine(spec, result, cache, iterations, threads, next_id);
    rank(result.ranked);
    result.gamma_cache_hits = cache.hits();
    return result;
}

} // namespace roadfield
