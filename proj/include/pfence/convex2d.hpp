#pragma once

#include <cstdint>
#include <vector>

#include "pfence/common.hpp"

namespace pfence {

enum class BodyKind { Polygon, Disc, TruncatedDisc };

const char* to_string(BodyKind kind);

/// Intersection of the half-planes n1·x <= c1 and n2·x <= c2 (outward unit
/// normals).
struct Strip {
    Point n1;
    double c1 = 0.0;
    Point n2;
    double c2 = 0.0;
    bool parallel = false;

    /// lo <= u·x <= hi.
    static Strip between(Point u, double lo, double hi);
    /// General pair of half-planes; parallel is set when n2 == -n1.
    static Strip from_halfplanes(Point n1, double c1, Point n2, double c2);
};

struct Incircle {
    double radius = 0.0;
    Point center;
};

class ConvexBody2D {
public:
    /// Vertices must already be strictly convex and counter-clockwise.
    static ConvexBody2D polygon(std::vector<Point> ccw);
    static ConvexBody2D disc(double radius, Point center = {});
    /// Disc of the given radius cut by the lines y = cy ± half_strip_width.
    static ConvexBody2D truncated_disc(double radius, double half_strip_width, Point center = {});

    BodyKind kind() const { return kind_; }
    const std::vector<Point>& vertices() const { return vertices_; }
    double radius() const { return radius_; }
    double half_strip_width() const { return rho_; }
    Point center() const { return center_; }

    double area() const;
    double perimeter() const;
    double diameter() const;
    Incircle inradius() const;
    double support(Point u) const;
    double width(Point u) const { return support(u) + support(u * -1.0); }
    double min_width() const;
    bool contains(Point p, double tol = 0.0) const;

    /// Counter-clockwise boundary polyline. Polygons return their vertices;
    /// disc kinds return `samples` points on the circle (plus the strip
    /// corners for truncated discs).
    std::vector<Point> polygon_view(int samples = 1024) const;

    ConvexBody2D scaled(double t) const;
    ConvexBody2D translated(Point d) const;

private:
    BodyKind kind_ = BodyKind::Polygon;
    std::vector<Point> vertices_;
    double radius_ = 0.0;
    double rho_ = 0.0;
    Point center_;
};

// Free-function forms of the body queries.
ConvexBody2D polygon_from_points(const std::vector<Point>& points);
double diameter(const ConvexBody2D& body);
Incircle inradius(const ConvexBody2D& body);
double width(const ConvexBody2D& body, Point direction);
double min_width(const ConvexBody2D& body);
double area(const ConvexBody2D& body);
double perimeter(const ConvexBody2D& body);
ConvexBody2D normalize_diameter(const ConvexBody2D& body);

/// Hull of n uniform points in the unit disc, scaled to diameter 1. Retries
/// with fresh points until the inradius reaches min_inradius, giving up after
/// kRandomConvexAttempts hulls.
ConvexBody2D random_convex(std::uint64_t seed, int n, double min_inradius);
inline constexpr int kRandomConvexAttempts = 10000;

/// Disc kinds are polygonized with `samples` boundary points before clipping
/// unless the strip already contains the body.
ConvexBody2D clip_with_strip(const ConvexBody2D& body, const Strip& strip, int samples = 4096);

// Polygon helpers shared by the other modules.
std::vector<Point> convex_hull(std::vector<Point> points);
double polygon_area(const std::vector<Point>& pts);
double polygon_perimeter(const std::vector<Point>& pts);
Point polygon_centroid(const std::vector<Point>& pts);
/// Sutherland-Hodgman clip of a convex polygon to n·x <= c.
std::vector<Point> clip_halfplane(const std::vector<Point>& poly, Point n, double c);
/// Intersection of two convex counter-clockwise polygons.
std::vector<Point> convex_intersection(const std::vector<Point>& a, const std::vector<Point>& b);
/// Rotating calipers over a convex polygon.
double polygon_diameter(const std::vector<Point>& pts);
Incircle polygon_inradius(const std::vector<Point>& pts);
double polygon_min_width(const std::vector<Point>& pts);

}  // namespace pfence
