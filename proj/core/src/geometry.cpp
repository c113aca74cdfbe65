#include "roadfield/geometry.hpp"

#include <algorithm>
#include <limits>

namespace roadfield {

Point2 closest_point_on_segment(Point2 p, Point2 a, Point2 b) {
    Point2 ab = b - a;
    double len2 = norm2(ab);
    if (len2 == 0.0) return a;
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return a + t * ab;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    return distance(p, closest_point_on_segment(p, a, b));
}

namespace {

bool near(Point2 a, Point2 b, double tol) { return distance(a, b) <= tol; }

} // namespace

bool segments_overlap_collinear(Point2 a1, Point2 a2, Point2 b1, Point2 b2, double tol) {
    Point2 d = a2 - a1;
    double len = norm(d);
    if (len == 0.0) return false;
    // Both endpoints of b must lie on the supporting line of a.
    if (std::abs(orient2d(a1, a2, b1)) > tol * len) return false;
    if (std::abs(orient2d(a1, a2, b2)) > tol * len) return false;
    double t1 = dot(b1 - a1, d) / (len * len);
    double t2 = dot(b2 - a1, d) / (len * len);
    if (t1 > t2) std::swap(t1, t2);
    double eps = tol / len;
    double lo = std::max(t1, 0.0);
    double hi = std::min(t2, 1.0);
    return hi - lo > eps;
}

bool segments_conflict(Point2 a1, Point2 a2, Point2 b1, Point2 b2, double tol) {
    // Shared endpoints (within tol) are legitimate contacts, not conflicts,
    // unless the segments additionally overlap along a stretch.
    if (segments_overlap_collinear(a1, a2, b1, b2, tol)) return true;

    bool share11 = near(a1, b1, tol), share12 = near(a1, b2, tol);
    bool share21 = near(a2, b1, tol), share22 = near(a2, b2, tol);
    if (share11 || share12 || share21 || share22) {
        // Identify the shared point and test whether the two free endpoints
        // straddle: with collinear overlap excluded above, a single shared
        // endpoint cannot produce a crossing.
        return false;
    }

    double d1 = orient2d(b1, b2, a1);
    double d2 = orient2d(b1, b2, a2);
    double d3 = orient2d(a1, a2, b1);
    double d4 = orient2d(a1, a2, b2);

    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;

    // Endpoint of one segment lying in the interior of the other.
    auto on_interior = [tol](Point2 p, Point2 s1, Point2 s2) {
        if (near(p, s1, tol) || near(p, s2, tol)) return false;
        return point_segment_distance(p, s1, s2) <= tol;
    };
    return on_interior(a1, b1, b2) || on_interior(a2, b1, b2) ||
           on_interior(b1, a1, a2) || on_interior(b2, a1, a2);
}

double segment_disk_intersection_length(Point2 a, Point2 b, Point2 c, double r) {
    if (r <= 0.0) return 0.0;
    Point2 d = b - a;
    double len = norm(d);
    if (len == 0.0) return 0.0;
    // |a + t d - c|^2 <= r^2  <=>  qa t^2 + qb t + qc <= 0
    double qa = len * len;
    double qb = 2.0 * dot(d, a - c);
    double qc = norm2(a - c) - r * r;
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) return 0.0;
    double sq = std::sqrt(disc);
    double t0 = (-qb - sq) / (2.0 * qa);
    double t1 = (-qb + sq) / (2.0 * qa);
    double lo = std::max(t0, 0.0);
    double hi = std::min(t1, 1.0);
    if (hi <= lo) return 0.0;
    return (hi - lo) * len;
}

double polygon_area(std::span<const Point2> poly) {
    double s = 0.0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        Point2 p = poly[i];
        Point2 q = poly[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

bool point_in_polygon(Point2 p, std::span<const Point2> poly, double boundary_tol) {
    size_t n = poly.size();
    if (boundary_tol > 0.0) {
        for (size_t i = 0; i < n; ++i) {
            if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= boundary_tol)
                return true;
        }
    }
    // Even-odd ray crossing, robust for points away from the boundary.
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Point2 pi = poly[i], pj = poly[j];
        if ((pi.y > p.y) != (pj.y > p.y)) {
            double xint = pi.x + (p.y - pi.y) / (pj.y - pi.y) * (pj.x - pi.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double polygon_boundary_distance(Point2 p, std::span<const Point2> poly) {
    double best = std::numeric_limits<double>::infinity();
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i)
        best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    return best;
}

bool polygon_is_simple(std::span<const Point2> poly, double tol) {
    size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        Point2 a1 = poly[i], a2 = poly[(i + 1) % n];
        if (distance(a1, a2) <= tol) return false;
        for (size_t j = i + 1; j < n; ++j) {
            // Skip adjacent sides; they share a vertex by construction.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_conflict(a1, a2, poly[j], poly[(j + 1) % n], tol)) return false;
        }
    }
    return true;
}

BoundingBox bounding_box(std::span<const Point2> pts) {
    BoundingBox bb{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
                   {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (Point2 p : pts) {
        bb.lo.x = std::min(bb.lo.x, p.x);
        bb.lo.y = std::min(bb.lo.y, p.y);
        bb.hi.x = std::max(bb.hi.x, p.x);
        bb.hi.y = std::max(bb.hi.y, p.y);
    }
    return bb;
}

} // namespace roadfield
