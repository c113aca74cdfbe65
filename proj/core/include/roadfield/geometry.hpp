#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace roadfield {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::sqrt(norm2(a)); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Twice the signed area of triangle (a,b,c); positive when c lies left of a->b.
/// Evaluated in extended precision so that sign decisions near zero are stable
/// at the coordinate scales this library works at.
inline double orient2d(Point2 a, Point2 b, Point2 c) {
    long double acx = static_cast<long double>(a.x) - c.x;
    long double acy = static_cast<long double>(a.y) - c.y;
    long double bcx = static_cast<long double>(b.x) - c.x;
    long double bcy = static_cast<long double>(b.y) - c.y;
    return static_cast<double>(acx * bcy - acy * bcx);
}

/// Strictly positive when d lies inside the circumcircle of CCW triangle (a,b,c).
inline double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
    long double adx = static_cast<long double>(a.x) - d.x;
    long double ady = static_cast<long double>(a.y) - d.y;
    long double bdx = static_cast<long double>(b.x) - d.x;
    long double bdy = static_cast<long double>(b.y) - d.y;
    long double cdx = static_cast<long double>(c.x) - d.x;
    long double cdy = static_cast<long double>(c.y) - d.y;

    long double ad2 = adx * adx + ady * ady;
    long double bd2 = bdx * bdx + bdy * bdy;
    long double cd2 = cdx * cdx + cdy * cdy;

    long double det = adx * (bdy * cd2 - cdy * bd2)
                    - ady * (bdx * cd2 - cdx * bd2)
                    + ad2 * (bdx * cdy - cdx * bdy);
    return static_cast<double>(det);
}

Point2 closest_point_on_segment(Point2 p, Point2 a, Point2 b);
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Relationship of two closed segments, ignoring shared endpoints.
/// "Proper" means the open segments intersect at a single interior point or
/// one segment's interior contains an endpoint of the other.
bool segments_conflict(Point2 a1, Point2 a2, Point2 b1, Point2 b2, double tol);

/// True when the closed segments overlap along a subsegment of positive length.
bool segments_overlap_collinear(Point2 a1, Point2 a2, Point2 b1, Point2 b2, double tol);

/// Length of {A + t(B-A), t in [0,1]} intersected with the disk B(c, r),
/// computed in closed form from the quadratic |P(t) - c|^2 = r^2.
double segment_disk_intersection_length(Point2 a, Point2 b, Point2 c, double r);

/// Shoelace area; positive for counterclockwise polygons.
double polygon_area(std::span<const Point2> poly);

/// Winding-number point-in-polygon test. Points within `boundary_tol` of an
/// edge count as inside.
bool point_in_polygon(Point2 p, std::span<const Point2> poly, double boundary_tol = 0.0);

/// Distance from p to the polygon boundary (min over edges).
double polygon_boundary_distance(Point2 p, std::span<const Point2> poly);

bool polygon_is_simple(std::span<const Point2> poly, double tol);

struct BoundingBox {
    Point2 lo;
    Point2 hi;
    double diameter() const { return distance(lo, hi); }
};

BoundingBox bounding_box(std::span<const Point2> pts);

} // namespace roadfield
