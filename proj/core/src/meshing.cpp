#include "roadfield/meshing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <unordered_map>
#include <utility>

#include "roadfield/errors.hpp"

namespace roadfield {

double triangle_area(Point2 a, Point2 b, Point2 c) {
    return 0.5 * cross(b - a, c - a);
}

double triangle_min_angle_deg(Point2 a, Point2 b, Point2 c) {
    const double la = distance(b, c);
    const double lb = distance(c, a);
    const double lc = distance(a, b);
    const double area = std::abs(triangle_area(a, b, c));
    if (la <= 0.0 || lb <= 0.0 || lc <= 0.0) return 0.0;
    // sin(angle at a) = 2*area / (lb*lc), and the smallest angle faces the
    // shortest edge, so it is acute and asin is safe there.
    const double shortest = std::min({la, lb, lc});
    double s = 0.0;
    if (shortest == la) {
        s = 2.0 * area / (lb * lc);
    } else if (shortest == lb) {
        s = 2.0 * area / (la * lc);
    } else {
        s = 2.0 * area / (la * lb);
    }
    s = std::clamp(s, 0.0, 1.0);
    return std::asin(s) * 180.0 / M_PI;
}

namespace {

constexpr int kNone = -1;

enum class ConstraintKind : std::uint8_t { Boundary, Road };

struct ConstraintInfo {
    ConstraintKind kind = ConstraintKind::Boundary;
    int parent = 0;      // road edge index, or boundary side index
    double arc0 = 0.0;   // arc-length interval on the parent (road only)
    double arc1 = 0.0;
};

struct EdgeKey {
    int a, b;
    EdgeKey(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

struct Tri {
    std::array<int, 3> v{kNone, kNone, kNone};
    std::array<int, 3> nbr{kNone, kNone, kNone};  // nbr[i] faces v[i]
    bool alive = false;
    bool inside = false;
};

Point2 circumcenter(Point2 a, Point2 b, Point2 c, bool& ok) {
    const double d = 2.0 * cross(b - a, c - a);
    if (std::abs(d) < 1e-30) {
        ok = false;
        return a;
    }
    const double a2 = norm2(a), b2 = norm2(b), c2 = norm2(c);
    ok = true;
    return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
            (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

/// Incremental constrained Delaunay triangulation. Cavities of point
/// insertions never cross constrained edges, so recovered constraints are
/// permanent. Everything is embedded in one large super triangle; triangles
/// touching a super vertex are discarded at extraction time.
class DelaunayKernel {
public:
    std::vector<Point2> pts;
    std::vector<Tri> tris;
    std::vector<int> vertex_tri;              // some alive triangle containing the vertex
    std::map<EdgeKey, ConstraintInfo> constraints;
    double eps = 0.0;                         // orientation tolerance (area scale)
    int super0 = 0;

    void bootstrap(const BoundingBox& box) {
        const double cx = 0.5 * (box.lo.x + box.hi.x);
        const double cy = 0.5 * (box.lo.y + box.hi.y);
        const double r = std::max(box.diameter(), 1e-12) * 16.0;
        super0 = 0;
        pts = {{cx - 2.0 * r, cy - r}, {cx + 2.0 * r, cy - r}, {cx, cy + 2.0 * r}};
        tris.clear();
        Tri t;
        t.v = {0, 1, 2};
        t.alive = true;
        tris.push_back(t);
        vertex_tri = {0, 0, 0};
        eps = 1e-14 * r * r;
    }

    bool is_super(int v) const { return v < 3; }

    int add_point(Point2 p) {
        pts.push_back(p);
        vertex_tri.push_back(kNone);
        return static_cast<int>(pts.size()) - 1;
    }

    bool constrained(int u, int v) const { return constraints.count(EdgeKey(u, v)) > 0; }

    int locate(Point2 p, int hint) const {
        int t = hint;
        if (t == kNone || !tris[t].alive) {
            for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i) {
                if (tris[i].alive) {
                    t = i;
                    break;
                }
            }
        }
        int guard = static_cast<int>(tris.size()) * 4 + 16;
        int prev = kNone;
        while (guard-- > 0) {
            const Tri& tr = tris[t];
            int next = kNone;
            for (int i = 0; i < 3; ++i) {
                const int u = tr.v[(i + 1) % 3];
                const int w = tr.v[(i + 2) % 3];
                if (orient2d(pts[u], pts[w], p) < -eps) {
                    const int cand = tr.nbr[i];
                    if (cand != kNone && cand != prev) {
                        next = cand;
                        break;
                    }
                    if (cand != kNone) next = cand;
                }
            }
            if (next == kNone) return t;
            prev = t;
            t = next;
        }
        // walk cycled on a degenerate configuration; fall back to a scan
        for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
            const Tri& tr = tris[i];
            if (!tr.alive) continue;
            if (orient2d(pts[tr.v[0]], pts[tr.v[1]], p) >= -eps &&
                orient2d(pts[tr.v[1]], pts[tr.v[2]], p) >= -eps &&
                orient2d(pts[tr.v[2]], pts[tr.v[0]], p) >= -eps) {
                return i;
            }
        }
        throw ConstructionError("meshing", "locate", "point outside triangulation");
    }

    /// Bowyer-Watson insertion. The cavity search does not cross constrained
    /// edges. Returns the new vertex index and appends the indices of the
    /// created triangles to out_new.
    int insert_point(Point2 p, int hint, std::vector<int>* out_new) {
        const int t0 = locate(p, hint);
        std::vector<int> cavity;
        std::vector<char> in_cavity(tris.size(), 0);
        std::deque<int> work{t0};
        in_cavity[t0] = 1;
        while (!work.empty()) {
            const int t = work.front();
            work.pop_front();
            cavity.push_back(t);
            for (int i = 0; i < 3; ++i) {
                const int n = tris[t].nbr[i];
                if (n == kNone || in_cavity[n]) continue;
                const int u = tris[t].v[(i + 1) % 3];
                const int w = tris[t].v[(i + 2) % 3];
                if (constrained(u, w)) continue;
                const Tri& nt = tris[n];
                if (incircle(pts[nt.v[0]], pts[nt.v[1]], pts[nt.v[2]], p) > 0.0) {
                    in_cavity[n] = 1;
                    work.push_back(n);
                }
            }
        }
        // Peel triangles whose outward boundary edge is not visible from p;
        // this keeps the cavity star shaped under roundoff ties.
        bool peeled = true;
        while (peeled && cavity.size() > 1) {
            peeled = false;
            for (std::size_t k = 0; k < cavity.size(); ++k) {
                const int t = cavity[k];
                if (t == t0) continue;
                for (int i = 0; i < 3; ++i) {
                    const int n = tris[t].nbr[i];
                    if (n != kNone && in_cavity[n]) continue;
                    const int u = tris[t].v[(i + 1) % 3];
                    const int w = tris[t].v[(i + 2) % 3];
                    if (orient2d(pts[u], pts[w], p) <= eps) {
                        in_cavity[t] = 0;
                        cavity.erase(cavity.begin() + static_cast<long>(k));
                        peeled = true;
                        break;
                    }
                }
                if (peeled) break;
            }
        }

        // Boundary edges of the cavity, directed CCW as seen from p.
        struct Rim {
            int u, w;
            int outside;
        };
        std::vector<Rim> rim;
        for (const int t : cavity) {
            for (int i = 0; i < 3; ++i) {
                const int n = tris[t].nbr[i];
                if (n != kNone && in_cavity[n]) continue;
                rim.push_back({tris[t].v[(i + 1) % 3], tris[t].v[(i + 2) % 3], n});
            }
        }
        if (rim.empty()) throw ConstructionError("meshing", "insert", "empty cavity rim");

        const int vp = add_point(p);
        for (const int t : cavity) tris[t].alive = false;

        std::map<std::pair<int, int>, int> dir_edge;  // directed edge -> new tri
        std::vector<int> created;
        created.reserve(rim.size());
        for (const Rim& r : rim) {
            Tri nt;
            nt.v = {r.u, r.w, vp};
            nt.nbr = {kNone, kNone, r.outside};
            nt.alive = true;
            nt.inside = false;
            const int idx = static_cast<int>(tris.size());
            tris.push_back(nt);
            created.push_back(idx);
            dir_edge[{r.u, r.w}] = idx;
            if (r.outside != kNone) attach(r.outside, r.w, r.u, idx);
            vertex_tri[r.u] = idx;
            vertex_tri[r.w] = idx;
        }
        vertex_tri[vp] = created.front();
        // Link the fan around vp: triangle (u,w,vp) meets its successor
        // across edge (w,vp) and its predecessor across (vp,u).
        std::map<int, int> from;  // rim start vertex -> tri
        for (const Rim& r : rim) from[r.u] = dir_edge[{r.u, r.w}];
        for (const int idx : created) {
            Tri& nt = tris[idx];
            const int u = nt.v[0];
            const int w = nt.v[1];
            auto itn = from.find(w);
            if (itn != from.end()) nt.nbr[0] = itn->second;  // across (w, vp)
            // predecessor: triangle ending at u
            // handled symmetrically by the successor link of that triangle
            for (const Rim& r : rim) {
                if (r.w == u) {
                    nt.nbr[1] = dir_edge[{r.u, r.w}];
                    break;
                }
            }
        }
        if (out_new) out_new->insert(out_new->end(), created.begin(), created.end());
        return vp;
    }

    /// Ensure edge (a,b) is present, recovering it by retriangulating the
    /// pipe of crossed triangles, then mark it constrained.
    void insert_constraint(int a, int b, const ConstraintInfo& info) {
        if (a == b) throw ConstructionError("meshing", "constrain", "degenerate constraint");
        if (edge_exists(a, b)) {
            constraints[EdgeKey(a, b)] = info;
            return;
        }
        recover_edge(a, b);
        constraints[EdgeKey(a, b)] = info;
    }

    /// Split constrained edge (a,b) at its midpoint. Returns the new vertex.
    int split_constrained(int a, int b, std::vector<int>* out_new) {
        const auto it = constraints.find(EdgeKey(a, b));
        if (it == constraints.end()) {
            throw ConstructionError("meshing", "split", "edge is not constrained");
        }
        const ConstraintInfo info = it->second;
        constraints.erase(it);
        const Point2 m = 0.5 * (pts[a] + pts[b]);
        const int vm = insert_point(m, vertex_tri[a], out_new);
        ConstraintInfo left = info;
        ConstraintInfo right = info;
        const double mid = 0.5 * (info.arc0 + info.arc1);
        left.arc1 = mid;
        right.arc0 = mid;
        if (!edge_exists(a, vm) || !edge_exists(vm, b)) {
            throw ConstructionError("meshing", "split", "midpoint insertion lost the edge");
        }
        constraints[EdgeKey(a, vm)] = left;
        constraints[EdgeKey(vm, b)] = right;
        return vm;
    }

    bool edge_exists(int a, int b) const {
        const int t0 = vertex_tri[a];
        if (t0 == kNone) return false;
        int t = t0;
        int guard = static_cast<int>(tris.size()) + 8;
        while (guard-- > 0) {
            const Tri& tr = tris[t];
            int ia = slot(tr, a);
            if (ia < 0) break;
            if (tr.v[(ia + 1) % 3] == b || tr.v[(ia + 2) % 3] == b) return true;
            t = tr.nbr[(ia + 1) % 3];  // rotate across edge (a, v[ia+2])
            if (t == kNone || t == t0) break;
        }
        return false;
    }

private:
    static int slot(const Tri& t, int v) {
        for (int i = 0; i < 3; ++i) {
            if (t.v[i] == v) return i;
        }
        return -1;
    }

    void attach(int t, int u, int w, int neighbor) {
        // set tris[t].nbr so that the slot facing away from edge (u,w) points to neighbor
        Tri& tr = tris[t];
        for (int i = 0; i < 3; ++i) {
            const int x = tr.v[(i + 1) % 3];
            const int y = tr.v[(i + 2) % 3];
            if ((x == u && y == w) || (x == w && y == u)) {
                tr.nbr[i] = neighbor;
                return;
            }
        }
        throw ConstructionError("meshing", "attach", "adjacency patch failed");
    }

    void recover_edge(int a, int b) {
        const Point2 pa = pts[a];
        const Point2 pb = pts[b];

        // Find the triangle of a's star whose opposite edge crosses (a,b).
        int t = kNone;
        int l = kNone, r = kNone;
        {
            const int t0 = vertex_tri[a];
            int cur = t0;
            int guard = static_cast<int>(tris.size()) + 8;
            while (guard-- > 0) {
                const Tri& tr = tris[cur];
                const int ia = slot(tr, a);
                if (ia < 0) throw ConstructionError("meshing", "constrain", "stale vertex map");
                const int x = tr.v[(ia + 1) % 3];
                const int y = tr.v[(ia + 2) % 3];
                const double ox = orient2d(pa, pb, pts[x]);
                const double oy = orient2d(pa, pb, pts[y]);
                if (std::abs(ox) <= eps && on_segment_between(pa, pb, pts[x])) {
                    throw ConstructionError("meshing", "constrain",
                                            "vertex lies on a constraint segment");
                }
                if (std::abs(oy) <= eps && on_segment_between(pa, pb, pts[y])) {
                    throw ConstructionError("meshing", "constrain",
                                            "vertex lies on a constraint segment");
                }
                if (ox > eps && oy < -eps &&
                    orient2d(pts[x], pts[y], pa) * orient2d(pts[x], pts[y], pb) < 0.0) {
                    t = cur;
                    l = x;
                    r = y;
                    break;
                }
                cur = tr.nbr[(ia + 1) % 3];
                if (cur == kNone || cur == t0) break;
            }
        }
        if (t == kNone) {
            throw ConstructionError("meshing", "constrain", "no crossing triangle found");
        }

        std::vector<int> pipe{t};
        std::vector<int> upper{l};  // left of a->b
        std::vector<int> lower{r};  // right of a->b
        int guard = static_cast<int>(tris.size()) + 8;
        while (guard-- > 0) {
            if (constrained(l, r)) {
                throw ConstructionError("meshing", "constrain",
                                        "constraint segments cross");
            }
            const Tri& tr = tris[pipe.back()];
            int slot_edge = -1;
            for (int i = 0; i < 3; ++i) {
                const int x = tr.v[(i + 1) % 3];
                const int y = tr.v[(i + 2) % 3];
                if ((x == l && y == r) || (x == r && y == l)) {
                    slot_edge = i;
                    break;
                }
            }
            if (slot_edge < 0) throw ConstructionError("meshing", "constrain", "pipe lost");
            const int n = tr.nbr[slot_edge];
            if (n == kNone) throw ConstructionError("meshing", "constrain", "pipe hit hull");
            const Tri& nt = tris[n];
            int z = kNone;
            for (int i = 0; i < 3; ++i) {
                if (nt.v[i] != l && nt.v[i] != r) z = nt.v[i];
            }
            pipe.push_back(n);
            if (z == b) break;
            const double oz = orient2d(pa, pb, pts[z]);
            if (std::abs(oz) <= eps && on_segment_between(pa, pb, pts[z])) {
                throw ConstructionError("meshing", "constrain",
                                        "vertex lies on a constraint segment");
            }
            if (oz > 0.0) {
                upper.push_back(z);
                l = z;
            } else {
                lower.push_back(z);
                r = z;
            }
        }

        // Record the outer rim adjacency before deleting the pipe.
        std::vector<char> in_pipe(tris.size(), 0);
        for (const int p : pipe) in_pipe[p] = 1;
        std::map<std::pair<int, int>, int> outer;  // directed (u,w) of outer tri
        for (const int p : pipe) {
            const Tri& tr = tris[p];
            for (int i = 0; i < 3; ++i) {
                const int n = tr.nbr[i];
                if (n != kNone && in_pipe[n]) continue;
                const int u = tr.v[(i + 1) % 3];
                const int w = tr.v[(i + 2) % 3];
                outer[{u, w}] = n;
            }
        }
        for (const int p : pipe) tris[p].alive = false;

        std::vector<std::array<int, 3>> fresh;
        triangulate_pseudo(a, b, upper, fresh);
        {
            // mirror: for the lower chain, b->a sees it on its left
            std::vector<int> rev(lower.rbegin(), lower.rend());
            triangulate_pseudo(b, a, rev, fresh);
        }

        std::map<std::pair<int, int>, int> mine;
        std::vector<int> created;
        for (const auto& tv : fresh) {
            Tri nt;
            nt.v = tv;
            nt.alive = true;
            const int idx = static_cast<int>(tris.size());
            tris.push_back(nt);
            created.push_back(idx);
            for (int i = 0; i < 3; ++i) {
                mine[{tv[i], tv[(i + 1) % 3]}] = idx;
                vertex_tri[tv[i]] = idx;
            }
        }
        for (const int idx : created) {
            Tri& nt = tris[idx];
            for (int i = 0; i < 3; ++i) {
                const int u = nt.v[(i + 1) % 3];
                const int w = nt.v[(i + 2) % 3];
                auto itm = mine.find({w, u});
                if (itm != mine.end()) {
                    nt.nbr[i] = itm->second;
                    continue;
                }
                auto ito = outer.find({u, w});
                if (ito == outer.end()) ito = outer.find({w, u});
                if (ito != outer.end()) {
                    nt.nbr[i] = ito->second;
                    if (ito->second != kNone) attach(ito->second, u, w, idx);
                }
            }
        }
    }

    bool on_segment_between(Point2 a, Point2 b, Point2 p) const {
        const double t = dot(p - a, b - a) / std::max(norm2(b - a), 1e-300);
        return t > 1e-12 && t < 1.0 - 1e-12;
    }

    /// Triangulate the pseudo polygon left of directed base (a,b) with the
    /// interior chain given in order from a to b. Emits CCW triangles.
    void triangulate_pseudo(int a, int b, const std::vector<int>& chain,
                            std::vector<std::array<int, 3>>& out) {
        if (chain.empty()) return;
        std::size_t best = 0;
        for (std::size_t i = 1; i < chain.size(); ++i) {
            if (incircle(pts[a], pts[b], pts[chain[best]], pts[chain[i]]) > 0.0) {
                best = i;
            }
        }
        const int c = chain[best];
        std::vector<int> left(chain.begin(), chain.begin() + static_cast<long>(best));
        std::vector<int> right(chain.begin() + static_cast<long>(best) + 1, chain.end());
        triangulate_pseudo(a, c, left, out);
        triangulate_pseudo(c, b, right, out);
        if (orient2d(pts[a], pts[b], pts[c]) > 0.0) {
            out.push_back({a, b, c});
        } else {
            out.push_back({a, c, b});
        }
    }
};

struct ConstraintSeed {
    int a = 0;
    int b = 0;
    ConstraintInfo info;
};

double polygon_diameter(const std::vector<Point2>& poly) {
    return bounding_box(poly).diameter();
}

} // namespace

Mesh triangulate(const DomainGeometry& domain, const RoadNetwork& net, double h,
                 const MeshingOptions& options) {
    if (domain.boundary.size() < 3) {
        throw ConstructionError("meshing", "triangulate", "boundary polygon needs >= 3 vertices");
    }
    if (!(h > 0.0)) {
        throw ConstructionError("meshing", "triangulate", "target edge length must be positive");
    }
    std::vector<Point2> poly = domain.boundary;
    const double area2 = polygon_area(poly);
    if (std::abs(area2) < 1e-14 * polygon_diameter(poly) * polygon_diameter(poly)) {
        throw ConstructionError("meshing", "triangulate", "degenerate boundary polygon");
    }
    if (area2 < 0.0) std::reverse(poly.begin(), poly.end());
    if (!polygon_is_simple(poly, 1e-12 * polygon_diameter(poly))) {
        throw ConstructionError("meshing", "triangulate", "boundary polygon is not simple");
    }
    const NetworkValidation nv = validate_network(net);
    if (!nv.valid()) {
        throw ConstructionError("meshing", "triangulate", "invalid network: " + nv.describe());
    }

    const double diam = polygon_diameter(poly);
    const double tol_on = 1e-9 * diam;

    // Geometry/flag consistency of the network relative to the domain.
    for (std::size_t k = 0; k < net.vertices.size(); ++k) {
        const Point2 p = net.vertices[k];
        if (!point_in_polygon(p, poly, tol_on)) {
            throw ConstructionError("meshing", "triangulate",
                                    "road vertex " + std::to_string(k) + " outside domain");
        }
        const bool on_bdry = polygon_boundary_distance(p, poly) <= tol_on;
        const bool flagged = net.boundary_vertex_flags[k] != 0;
        if (flagged && !on_bdry) {
            throw ConstructionError("meshing", "triangulate",
                                    "road vertex " + std::to_string(k) +
                                        " flagged boundary but lies inside the domain");
        }
        if (!flagged && on_bdry) {
            throw ConstructionError("meshing", "triangulate",
                                    "road vertex " + std::to_string(k) +
                                        " lies on the boundary but is not flagged");
        }
    }

    // Split every boundary side at the road vertices sitting on it, so that
    // contacts become genuine shared endpoints of constraint segments.
    const int nside = static_cast<int>(poly.size());
    std::vector<std::vector<std::pair<double, Point2>>> side_pts(nside);
    for (std::size_t k = 0; k < net.vertices.size(); ++k) {
        if (!net.boundary_vertex_flags[k]) continue;
        const Point2 p = net.vertices[k];
        double best = std::numeric_limits<double>::max();
        int bi = -1;
        double bt = 0.0;
        for (int i = 0; i < nside; ++i) {
            const Point2 a = poly[i];
            const Point2 b = poly[(i + 1) % nside];
            const Point2 q = closest_point_on_segment(p, a, b);
            const double d = distance(p, q);
            if (d < best) {
                best = d;
                bi = i;
                bt = norm2(b - a) > 0.0 ? dot(p - a, b - a) / norm2(b - a) : 0.0;
            }
        }
        if (bi >= 0 && bt > 1e-12 && bt < 1.0 - 1e-12) {
            side_pts[bi].push_back({bt, p});
        }
    }

    struct RawSeg {
        Point2 a, b;
        ConstraintInfo info;
    };
    std::vector<RawSeg> raw;
    for (int i = 0; i < nside; ++i) {
        std::vector<std::pair<double, Point2>> stops = side_pts[i];
        std::sort(stops.begin(), stops.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        Point2 prev = poly[i];
        for (const auto& [t, p] : stops) {
            raw.push_back({prev, p, {ConstraintKind::Boundary, i, 0.0, 0.0}});
            prev = p;
        }
        raw.push_back({prev, poly[(i + 1) % nside], {ConstraintKind::Boundary, i, 0.0, 0.0}});
    }
    const std::size_t nboundary_raw = raw.size();
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        const Point2 a = net.vertices[net.edges[e][0]];
        const Point2 b = net.vertices[net.edges[e][1]];
        raw.push_back({a, b, {ConstraintKind::Road, static_cast<int>(e), 0.0, edge_length(net, static_cast<int>(e))}});
    }

    // Reject coincident or crossing constraint segments. Road/road conflicts
    // were already checked by validate_network; here the boundary enters.
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (std::size_t j = std::max(i + 1, nboundary_raw); j < raw.size(); ++j) {
            if (i >= nboundary_raw) break;
            if (segments_overlap_collinear(raw[i].a, raw[i].b, raw[j].a, raw[j].b, tol_on)) {
                throw ConstructionError("meshing", "triangulate",
                                        "road edge coincides with the boundary");
            }
            if (segments_conflict(raw[i].a, raw[i].b, raw[j].a, raw[j].b, tol_on)) {
                throw ConstructionError("meshing", "triangulate",
                                        "road edge crosses the boundary");
            }
        }
    }
    // Road edges must stay inside; with no crossings a midpoint test suffices.
    for (std::size_t j = nboundary_raw; j < raw.size(); ++j) {
        const Point2 mid = 0.5 * (raw[j].a + raw[j].b);
        if (!point_in_polygon(mid, poly, tol_on)) {
            throw ConstructionError("meshing", "triangulate", "road edge leaves the domain");
        }
    }

    DelaunayKernel kern;
    kern.bootstrap(bounding_box(poly));

    // Merge-tolerant vertex registry.
    const double merge_tol = options.merge_tol_rel * diam;
    std::vector<int> registered;  // kernel vertex ids of constraint points
    auto register_point = [&](Point2 p) -> int {
        for (const int v : registered) {
            if (distance(kern.pts[v], p) <= merge_tol) return v;
        }
        const int v = kern.insert_point(p, kNone, nullptr);
        registered.push_back(v);
        return v;
    };

    // Pre-split constraints to length <= h and insert all endpoints first;
    // recovery afterwards works on a fixed point set.
    std::vector<ConstraintSeed> seeds;
    for (const RawSeg& rs : raw) {
        const double len = distance(rs.a, rs.b);
        const int npc = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
        int prev = register_point(rs.a);
        for (int k = 1; k <= npc; ++k) {
            const double t = static_cast<double>(k) / npc;
            const Point2 p = rs.a + t * (rs.b - rs.a);
            const int cur = (k == npc) ? register_point(rs.b) : register_point(p);
            ConstraintSeed seed;
            seed.a = prev;
            seed.b = cur;
            seed.info = rs.info;
            if (rs.info.kind == ConstraintKind::Road) {
                const double s0 = rs.info.arc1;  // arc1 holds the edge length here
                seed.info.arc0 = s0 * (k - 1) / npc;
                seed.info.arc1 = s0 * k / npc;
            }
            if (prev == cur) {
                throw ConstructionError("meshing", "triangulate",
                                        "constraint collapsed under merge tolerance");
            }
            seeds.push_back(seed);
            prev = cur;
        }
    }
    for (const ConstraintSeed& s : seeds) kern.insert_constraint(s.a, s.b, s.info);

    // Inside/outside classification by flood fill from the super region,
    // blocked at boundary constraints.
    auto flood = [&]() {
        for (Tri& t : kern.tris) t.inside = t.alive;
        std::deque<int> work;
        std::vector<char> seen(kern.tris.size(), 0);
        for (std::size_t i = 0; i < kern.tris.size(); ++i) {
            const Tri& t = kern.tris[i];
            if (!t.alive) continue;
            if (kern.is_super(t.v[0]) || kern.is_super(t.v[1]) || kern.is_super(t.v[2])) {
                work.push_back(static_cast<int>(i));
                seen[i] = 1;
            }
        }
        while (!work.empty()) {
            const int i = work.front();
            work.pop_front();
            kern.tris[i].inside = false;
            for (int k = 0; k < 3; ++k) {
                const int n = kern.tris[i].nbr[k];
                if (n == kNone || seen[n] || !kern.tris[n].alive) continue;
                const int u = kern.tris[i].v[(k + 1) % 3];
                const int w = kern.tris[i].v[(k + 2) % 3];
                const auto it = kern.constraints.find(EdgeKey(u, w));
                if (it != kern.constraints.end() && it->second.kind == ConstraintKind::Boundary) {
                    continue;
                }
                seen[n] = 1;
                work.push_back(n);
            }
        }
    };
    flood();

    // Interior grid points on an offset hexagonal lattice, kept clear of all
    // constraint segments.
    const double clearance = options.grid_clearance_rel * h;
    const BoundingBox box = bounding_box(poly);
    const double dy = h * std::sqrt(3.0) / 2.0;
    int inserted = 0;
    int hint = kNone;
    auto clear_of_constraints = [&](Point2 p) {
        for (const RawSeg& rs : raw) {
            if (point_segment_distance(p, rs.a, rs.b) < clearance) return false;
        }
        return true;
    };
    for (int j = 0;; ++j) {
        const double y = box.lo.y + dy * (j + 0.5);
        if (y > box.hi.y) break;
        for (int i = 0;; ++i) {
            const double x = box.lo.x + h * (i + 0.5 + 0.5 * (j % 2));
            if (x > box.hi.x) break;
            const Point2 p{x, y};
            if (!point_in_polygon(p, poly) || polygon_boundary_distance(p, poly) < clearance) {
                continue;
            }
            if (!clear_of_constraints(p)) continue;
            std::vector<int> fresh;
            const int v = kern.insert_point(p, hint, &fresh);
            hint = kern.vertex_tri[v];
            for (const int t : fresh) kern.tris[t].inside = true;
            ++inserted;
        }
    }

    // Quality refinement: split encroached constrained subsegments, then
    // insert circumcenters of poor triangles (splitting instead any
    // subsegment the circumcenter would encroach).
    const double min_angle = options.min_angle_deg;
    const double len_floor = h / 64.0;
    auto strictly_encroaches = [&](Point2 p, int u, int v) {
        const Point2 m = 0.5 * (kern.pts[u] + kern.pts[v]);
        const double r2 = 0.25 * norm2(kern.pts[v] - kern.pts[u]);
        return norm2(p - m) < r2 * (1.0 - 1e-10);
    };
    std::deque<EdgeKey> segq;
    for (const auto& [key, info] : kern.constraints) {
        for (std::size_t v = 3; v < kern.pts.size(); ++v) {
            const int vi = static_cast<int>(v);
            if (vi == key.a || vi == key.b) continue;
            if (strictly_encroaches(kern.pts[v], key.a, key.b)) {
                segq.push_back(key);
                break;
            }
        }
    }
    std::deque<int> triq;
    auto tri_is_bad = [&](int t) {
        const Tri& tr = kern.tris[t];
        if (!tr.alive || !tr.inside) return false;
        return triangle_min_angle_deg(kern.pts[tr.v[0]], kern.pts[tr.v[1]], kern.pts[tr.v[2]]) <
               min_angle - 1e-9;
    };
    for (std::size_t i = 0; i < kern.tris.size(); ++i) {
        if (tri_is_bad(static_cast<int>(i))) triq.push_back(static_cast<int>(i));
    }
    auto queue_encroached_by = [&](int vnew) {
        for (const auto& [key, info] : kern.constraints) {
            if (key.a == vnew || key.b == vnew) continue;
            if (strictly_encroaches(kern.pts[vnew], key.a, key.b)) segq.push_back(key);
        }
    };
    auto classify_fresh = [&](const std::vector<int>& fresh) {
        for (const int t : fresh) {
            const Tri& tr = kern.tris[t];
            const Point2 c = (1.0 / 3.0) * (kern.pts[tr.v[0]] + kern.pts[tr.v[1]] + kern.pts[tr.v[2]]);
            kern.tris[t].inside = point_in_polygon(c, poly);
            if (tri_is_bad(t)) triq.push_back(t);
        }
    };
    std::map<int, int> retries;
    while ((inserted < options.max_insertions) && (!segq.empty() || !triq.empty())) {
        if (!segq.empty()) {
            const EdgeKey key = segq.front();
            segq.pop_front();
            const auto it = kern.constraints.find(key);
            if (it == kern.constraints.end()) continue;
            if (distance(kern.pts[key.a], kern.pts[key.b]) < 2.0 * len_floor) continue;
            std::vector<int> fresh;
            const int vm = kern.split_constrained(key.a, key.b, &fresh);
            ++inserted;
            classify_fresh(fresh);
            queue_encroached_by(vm);
            for (const int half : {key.a, key.b}) {
                for (std::size_t v = 3; v < kern.pts.size(); ++v) {
                    const int vi = static_cast<int>(v);
                    if (vi == half || vi == vm) continue;
                    if (strictly_encroaches(kern.pts[v], half, vm)) {
                        segq.push_back(EdgeKey(half, vm));
                        break;
                    }
                }
            }
            continue;
        }
        const int t = triq.front();
        triq.pop_front();
        if (!tri_is_bad(t)) continue;
        const Tri& tr = kern.tris[t];
        bool ok = false;
        const Point2 c = circumcenter(kern.pts[tr.v[0]], kern.pts[tr.v[1]], kern.pts[tr.v[2]], ok);
        if (!ok) continue;
        std::vector<EdgeKey> blocked;
        for (const auto& [key, info] : kern.constraints) {
            if (strictly_encroaches(c, key.a, key.b)) blocked.push_back(key);
        }
        if (!blocked.empty()) {
            bool splittable = false;
            for (const EdgeKey& key : blocked) {
                if (distance(kern.pts[key.a], kern.pts[key.b]) >= 2.0 * len_floor) {
                    segq.push_back(key);
                    splittable = true;
                }
            }
            if (splittable && retries[t]++ < 8) triq.push_back(t);
            continue;
        }
        int landing = kNone;
        try {
            landing = kern.locate(c, kern.vertex_tri[tr.v[0]]);
        } catch (const ConstructionError&) {
            continue;
        }
        if (!kern.tris[landing].inside) continue;
        std::vector<int> fresh;
        const int vnew = kern.insert_point(c, landing, &fresh);
        ++inserted;
        classify_fresh(fresh);
        queue_encroached_by(vnew);
    }

    // Extraction: drop super and outside triangles, compact vertices.
    Mesh mesh;
    mesh.h_target = h;
    mesh.min_angle_deg = min_angle;
    std::vector<int> remap(kern.pts.size(), kNone);
    for (const Tri& t : kern.tris) {
        if (!t.alive || !t.inside) continue;
        for (const int v : t.v) {
            if (remap[v] == kNone) {
                remap[v] = static_cast<int>(mesh.vertices.size());
                mesh.vertices.push_back(kern.pts[v]);
            }
        }
        std::array<int, 3> tv{remap[t.v[0]], remap[t.v[1]], remap[t.v[2]]};
        if (orient2d(mesh.vertices[tv[0]], mesh.vertices[tv[1]], mesh.vertices[tv[2]]) < 0.0) {
            std::swap(tv[1], tv[2]);
        }
        mesh.triangles.push_back(tv);
    }
    mesh.markers.assign(mesh.vertices.size(), VertexMarker::Interior);
    for (const auto& [key, info] : kern.constraints) {
        const int a = remap[key.a];
        const int b = remap[key.b];
        if (a == kNone || b == kNone) {
            throw ConstructionError("meshing", "triangulate", "constraint vertex dropped");
        }
        auto promote = [&](int v, ConstraintKind kind) {
            VertexMarker& m = mesh.markers[v];
            if (kind == ConstraintKind::Boundary) {
                if (m == VertexMarker::Interior) {
                    m = VertexMarker::Boundary;
                } else if (m == VertexMarker::Road) {
                    m = VertexMarker::RoadBoundary;
                }
            } else {
                if (m == VertexMarker::Interior) {
                    m = VertexMarker::Road;
                } else if (m == VertexMarker::Boundary) {
                    m = VertexMarker::RoadBoundary;
                }
            }
        };
        promote(a, info.kind);
        promote(b, info.kind);
        if (info.kind == ConstraintKind::Boundary) {
            mesh.boundary_edges.push_back({a, b});
        } else {
            RoadMeshEdge re;
            re.a = a;
            re.b = b;
            re.parent_edge = info.parent;
            re.arc0 = info.arc0;
            re.arc1 = info.arc1;
            if (re.arc0 > re.arc1) std::swap(re.arc0, re.arc1);
            mesh.road_edges.push_back(re);
        }
    }
    std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end());
    std::sort(mesh.road_edges.begin(), mesh.road_edges.end(), [](const RoadMeshEdge& x, const RoadMeshEdge& y) {
        return x.parent_edge < y.parent_edge ||
               (x.parent_edge == y.parent_edge && x.arc0 < y.arc0);
    });

    const double conf = road_conformity_error(mesh, net);
    if (conf > 1e-8) {
        throw ConstructionError("meshing", "triangulate", "road conformity defect " + std::to_string(conf));
    }
    const MeshQuality q = mesh_quality(mesh);
    if (min_angle > 0.0 && q.min_angle_deg < min_angle - 1e-7) {
        throw ConstructionError("meshing", "triangulate",
                                "quality target not reached: min angle " +
                                    std::to_string(q.min_angle_deg));
    }
    return mesh;
}

Mesh refine(const Mesh& mesh) {
    Mesh out;
    out.h_target = 0.5 * mesh.h_target;
    out.min_angle_deg = mesh.min_angle_deg;
    out.vertices = mesh.vertices;
    out.markers = mesh.markers;
    std::map<EdgeKey, int> midpoint;
    auto mid = [&](int a, int b) {
        const EdgeKey key(a, b);
        const auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int v = static_cast<int>(out.vertices.size());
        out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        out.markers.push_back(VertexMarker::Interior);
        midpoint.emplace(key, v);
        return v;
    };
    out.triangles.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
        const int m01 = mid(t[0], t[1]);
        const int m12 = mid(t[1], t[2]);
        const int m20 = mid(t[2], t[0]);
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({t[1], m12, m01});
        out.triangles.push_back({t[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }
    for (const auto& e : mesh.boundary_edges) {
        const int m = mid(e[0], e[1]);
        if (out.markers[m] == VertexMarker::Interior) out.markers[m] = VertexMarker::Boundary;
        out.boundary_edges.push_back({e[0], m});
        out.boundary_edges.push_back({m, e[1]});
    }
    for (const auto& re : mesh.road_edges) {
        const int m = mid(re.a, re.b);
        if (out.markers[m] == VertexMarker::Interior) out.markers[m] = VertexMarker::Road;
        const double arcm = 0.5 * (re.arc0 + re.arc1);
        out.road_edges.push_back({re.a, m, re.parent_edge, re.arc0, arcm});
        out.road_edges.push_back({m, re.b, re.parent_edge, arcm, re.arc1});
    }
    std::sort(out.boundary_edges.begin(), out.boundary_edges.end());
    std::sort(out.road_edges.begin(), out.road_edges.end(), [](const RoadMeshEdge& x, const RoadMeshEdge& y) {
        return x.parent_edge < y.parent_edge ||
               (x.parent_edge == y.parent_edge && x.arc0 < y.arc0);
    });
    return out;
}

MeshQuality mesh_quality(const Mesh& mesh) {
    MeshQuality q;
    q.vertex_count = static_cast<int>(mesh.vertices.size());
    q.triangle_count = static_cast<int>(mesh.triangles.size());
    q.min_angle_deg = 180.0;
    q.h_min = std::numeric_limits<double>::max();
    for (const auto& t : mesh.triangles) {
        const Point2 a = mesh.vertices[t[0]];
        const Point2 b = mesh.vertices[t[1]];
        const Point2 c = mesh.vertices[t[2]];
        const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
        const double longest = std::max({la, lb, lc});
        const double area = std::abs(triangle_area(a, b, c));
        const double inradius = area / (0.5 * (la + lb + lc));
        q.min_angle_deg = std::min(q.min_angle_deg, triangle_min_angle_deg(a, b, c));
        q.max_aspect_ratio = std::max(q.max_aspect_ratio, longest / (2.0 * inradius));
        q.h_max = std::max(q.h_max, longest);
        q.h_min = std::min(q.h_min, std::min({la, lb, lc}));
    }
    if (mesh.triangles.empty()) {
        q.min_angle_deg = 0.0;
        q.h_min = 0.0;
    }
    return q;
}

double road_conformity_error(const Mesh& mesh, const RoadNetwork& net) {
    std::vector<std::vector<const RoadMeshEdge*>> chains(net.edges.size());
    for (const RoadMeshEdge& re : mesh.road_edges) {
        if (re.parent_edge < 0 || re.parent_edge >= static_cast<int>(net.edges.size())) {
            throw DomainError("meshing", "conformity", "road edge references unknown parent");
        }
        chains[re.parent_edge].push_back(&re);
    }
    double worst = 0.0;
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        const double len = edge_length(net, static_cast<int>(e));
        auto& chain = chains[e];
        std::sort(chain.begin(), chain.end(), [](const RoadMeshEdge* x, const RoadMeshEdge* y) {
            return x->arc0 < y->arc0;
        });
        if (chain.empty()) return 1.0;
        double covered = 0.0;
        double cursor = 0.0;
        for (const RoadMeshEdge* re : chain) {
            worst = std::max(worst, std::abs(re->arc0 - cursor) / len);
            covered += distance(mesh.vertices[re->a], mesh.vertices[re->b]);
            cursor = re->arc1;
        }
        worst = std::max(worst, std::abs(cursor - len) / len);
        worst = std::max(worst, std::abs(covered - len) / len);
    }
    return worst;
}

} // namespace roadfield
