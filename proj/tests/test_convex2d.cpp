#include <gtest/gtest.h>

#include <cmath>

#include "pfence/convex2d.hpp"

using namespace pfence;

namespace {

ConvexBody2D unit_square() { return ConvexBody2D::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

ConvexBody2D equilateral(double side) {
    return ConvexBody2D::polygon({{0, 0}, {side, 0}, {side / 2, side * std::sqrt(3.0) / 2}});
}

std::vector<ConvexBody2D> corpus() {
    std::vector<ConvexBody2D> out{unit_square(), equilateral(1.0), ConvexBody2D::disc(0.5),
                                  ConvexBody2D::truncated_disc(0.5, 0.1), ConvexBody2D::truncated_disc(1.3, 0.9, {0.2, -0.4})};
    for (std::uint64_t s = 1; s <= 20; ++s) out.push_back(random_convex(s, 5 + static_cast<int>(s % 11), 0.0));
    return out;
}

}  // namespace

TEST(PolygonFromPoints, DropsInteriorPoint) {
    auto b = polygon_from_points({{0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}});
    ASSERT_EQ(b.vertices().size(), 3u);
    EXPECT_DOUBLE_EQ(b.area(), 0.5);
}

TEST(PolygonFromPoints, SquareIsKept) {
    auto b = polygon_from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    EXPECT_EQ(b.vertices().size(), 4u);
    EXPECT_DOUBLE_EQ(b.area(), 1.0);
}

TEST(PolygonFromPoints, RandomCloudHullInsideDisc) {
    Rng rng(99);
    std::vector<Point> pts;
    while (pts.size() < 100) {
        Point p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (dot(p, p) < 1) pts.push_back(p);
    }
    auto b = polygon_from_points(pts);
    EXPECT_LE(b.area(), kPi);
    // Monte-Carlo containment: every cloud point lies in the hull.
    for (Point p : pts) EXPECT_TRUE(b.contains(p, 1e-12));
}

TEST(PolygonFromPoints, CollinearRejected) {
    EXPECT_THROW(polygon_from_points({{0, 0}, {1, 1}, {2, 2}}), Error);
    try {
        polygon_from_points({{0, 0}, {1, 1}, {2, 2}});
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateInput);
    }
}

TEST(Polygon, ClockwiseRejected) {
    EXPECT_THROW(ConvexBody2D::polygon({{0, 0}, {0, 1}, {1, 0}}), Error);
}

TEST(Polygon, NeedleRejected) { EXPECT_THROW(ConvexBody2D::polygon({{0, 0}, {1, 0}, {0.5, 1e-9}}), Error); }

TEST(Diameter, Examples) {
    EXPECT_NEAR(diameter(unit_square()), std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(diameter(ConvexBody2D::disc(0.5)), 1.0);
    EXPECT_DOUBLE_EQ(diameter(ConvexBody2D::truncated_disc(0.5, 0.1)), 1.0);
}

TEST(Diameter, CalipersMatchBruteForce) {
    for (std::uint64_t s = 1; s <= 50; ++s) {
        auto b = random_convex(s, 3 + static_cast<int>(s % 30), 0.0);
        auto v = b.vertices();
        double brute = 0;
        for (auto p : v)
            for (auto q : v) brute = std::max(brute, norm(p - q));
        EXPECT_NEAR(polygon_diameter(v), brute, 1e-15) << "seed " << s;
    }
}

TEST(Inradius, Square) {
    auto ic = inradius(unit_square());
    EXPECT_NEAR(ic.radius, 0.5, 1e-12);
    EXPECT_NEAR(ic.center.x, 0.5, 1e-12);
    EXPECT_NEAR(ic.center.y, 0.5, 1e-12);
}

TEST(Inradius, TruncatedDiscIsRho) { EXPECT_DOUBLE_EQ(inradius(ConvexBody2D::truncated_disc(0.5, 0.1)).radius, 0.1); }

TEST(Inradius, EquilateralTriangle) {
    auto ic = inradius(equilateral(1.0));
    EXPECT_NEAR(ic.radius, 1.0 / (2.0 * std::sqrt(3.0)), 1e-12);
    EXPECT_NEAR(ic.center.x, 0.5, 1e-12);
    EXPECT_NEAR(ic.center.y, std::sqrt(3.0) / 6.0, 1e-12);
}

TEST(Inradius, TriangleMatchesAreaOverSemiperimeter) {
    // Incircle formula r = 2A/P for every triangle.
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        std::vector<Point> pts{{rng.uniform(), rng.uniform()}, {rng.uniform(), rng.uniform()}, {rng.uniform(), rng.uniform()}};
        ConvexBody2D b = [&] {
            try {
                return polygon_from_points(pts);
            } catch (const Error&) {
                return unit_square();
            }
        }();
        if (b.vertices().size() != 3) continue;
        EXPECT_NEAR(b.inradius().radius, 2 * b.area() / b.perimeter(), 1e-10);
    }
}

TEST(Inradius, DiscIsOptimalCenterForRegularPolygon) {
    std::vector<Point> v;
    for (int k = 0; k < 400; ++k) v.push_back(unit(2 * kPi * k / 400) + Point{3, -2});
    auto ic = polygon_inradius(v);
    EXPECT_NEAR(ic.radius, std::cos(kPi / 400), 1e-12);
    EXPECT_NEAR(ic.center.x, 3, 1e-10);
    EXPECT_NEAR(ic.center.y, -2, 1e-10);
}

TEST(Width, Examples) {
    EXPECT_DOUBLE_EQ(width(unit_square(), {1, 0}), 1.0);
    for (int k = 0; k < 16; ++k) EXPECT_NEAR(width(ConvexBody2D::disc(0.5), unit(0.3 * k)), 1.0, 1e-15);
}

TEST(Width, MinWidthMatchesDenseScan) {
    // The width function has kinks at edge normals, so a direction scan with
    // step dt overestimates the minimum by at most diameter * dt.
    const int steps = 20000;
    for (const auto& b : corpus()) {
        double scan = 1e300;
        for (int k = 0; k < steps; ++k) scan = std::min(scan, b.width(unit(kPi * k / steps)));
        EXPECT_LE(b.min_width(), scan + 1e-12);
        EXPECT_GE(b.min_width(), scan - b.diameter() * kPi / steps);
    }
}

TEST(Width, MinWidthMatchesEdgeNormalBruteForce) {
    for (std::uint64_t s = 1; s <= 40; ++s) {
        auto v = random_convex(s, 4 + static_cast<int>(s), 0).vertices();
        double best = 1e300;
        for (std::size_t i = 0; i < v.size(); ++i) {
            Point e = v[(i + 1) % v.size()] - v[i];
            double far = 0;
            for (Point q : v) far = std::max(far, cross(e, q - v[i]) / norm(e));
            best = std::min(best, far);
        }
        EXPECT_NEAR(polygon_min_width(v), best, 1e-15);
    }
}

TEST(AreaPerimeter, Examples) {
    EXPECT_DOUBLE_EQ(area(unit_square()), 1.0);
    EXPECT_DOUBLE_EQ(perimeter(unit_square()), 4.0);
    EXPECT_NEAR(area(ConvexBody2D::disc(0.5)), kPi / 4, 1e-15);
    EXPECT_NEAR(perimeter(ConvexBody2D::disc(0.5)), kPi, 1e-15);
    EXPECT_NEAR(area(ConvexBody2D::truncated_disc(0.5, 0.5)), kPi / 4, 1e-15);
    EXPECT_NEAR(perimeter(ConvexBody2D::truncated_disc(0.5, 0.5)), kPi, 1e-15);
}

TEST(AreaPerimeter, TruncatedDiscClosedFormMatchesDenseView) {
    auto b = ConvexBody2D::truncated_disc(0.5, 0.17);
    auto v = b.polygon_view(1 << 16);
    EXPECT_NEAR(polygon_area(v), b.area(), 1e-8);
    EXPECT_NEAR(polygon_perimeter(v), b.perimeter(), 1e-8);
}

TEST(Normalize, Examples) {
    auto sq = normalize_diameter(unit_square());
    EXPECT_NEAR(sq.vertices()[1].x, 1 / std::sqrt(2.0), 1e-15);
    auto d = ConvexBody2D::disc(0.5);
    auto dn = normalize_diameter(d);
    EXPECT_EQ(dn.radius(), d.radius());
    for (std::uint64_t s = 1; s < 30; ++s) {
        auto b = ConvexBody2D::polygon(random_convex(s, 9, 0).scaled(3.7).vertices());
        EXPECT_NEAR(diameter(normalize_diameter(b)), 1.0, 1e-12);
    }
}

TEST(RandomConvex, Deterministic) {
    auto a = random_convex(1, 8, 0);
    auto b = random_convex(1, 8, 0);
    EXPECT_EQ(a.vertices(), b.vertices());
    EXPECT_NEAR(a.diameter(), 1.0, 1e-12);
}

TEST(RandomConvex, InradiusBound) { EXPECT_GE(random_convex(2, 16, 0.3).inradius().radius, 0.3); }

TEST(RandomConvex, TriangleCannotReachNearDisc) {
    try {
        random_convex(3, 3, 0.49);
        FAIL() << "expected GenerationFailed";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GenerationFailed);
    }
}

TEST(ClipWithStrip, DiscToTruncatedDisc) {
    auto d = ConvexBody2D::disc(0.5);
    for (double rho : {0.05, 0.1, 0.3, 0.45}) {
        auto c = clip_with_strip(d, Strip::between({0, 1}, -rho, rho));
        EXPECT_NEAR(c.area(), ConvexBody2D::truncated_disc(0.5, rho).area(), 1e-6);
    }
}

TEST(ClipWithStrip, ContainingStripIsIdentity) {
    auto sq = unit_square();
    auto c = clip_with_strip(sq, Strip::between({1, 0}, -1, 2));
    EXPECT_EQ(c.vertices(), sq.vertices());
    auto d = ConvexBody2D::disc(0.5);
    EXPECT_EQ(clip_with_strip(d, Strip::between({1, 1}, -1, 1)).kind(), BodyKind::Disc);
}

TEST(ClipWithStrip, SquareRectangle) {
    auto c = clip_with_strip(unit_square(), Strip::between({1, 0}, 0.25, 0.75));
    EXPECT_NEAR(c.area(), 0.5, 1e-15);
}

TEST(ClipWithStrip, Empty) {
    try {
        clip_with_strip(unit_square(), Strip::between({1, 0}, 2, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyIntersection);
    }
}

TEST(ClipWithStrip, NonParallelAndIdempotent) {
    auto s = Strip::from_halfplanes({1, 0.3}, 0.6, {-1, 0.2}, -0.2);
    EXPECT_FALSE(s.parallel);
    EXPECT_TRUE(Strip::between({0, 1}, 0, 1).parallel);
    for (const auto& b : corpus()) {
        auto s = b.scaled(1.0 / b.diameter());
        auto once = clip_with_strip(s.translated(s.center() * -1.0), Strip::between({0.6, 0.8}, -0.2, 0.15));
        auto twice = clip_with_strip(once, Strip::between({0.6, 0.8}, -0.2, 0.15));
        EXPECT_EQ(once.vertices(), twice.vertices());
    }
}

TEST(Properties, IsoperimetricScalingWidths) {
    for (const auto& b : corpus()) {
        double A = b.area(), P = b.perimeter();
        if (b.kind() == BodyKind::Disc)
            EXPECT_NEAR(P * P, 4 * kPi * A, 1e-12);
        else
            EXPECT_GT(P * P - 4 * kPi * A, 1e-6);
        double t = 2.75;
        auto s = b.scaled(t);
        EXPECT_NEAR(s.area(), t * t * A, 1e-12 * t * t * A);
        EXPECT_NEAR(s.perimeter(), t * P, 1e-12 * t * P);
        EXPECT_NEAR(s.diameter(), t * b.diameter(), 1e-12);
        EXPECT_NEAR(s.inradius().radius, t * b.inradius().radius, 1e-10);
        double D = b.diameter(), r = b.inradius().radius;
        EXPECT_GE(D, 2 * r);
        for (int k = 0; k < 64; ++k) {
            double w = b.width(unit(kPi * k / 64));
            EXPECT_LE(w, D + 1e-12);
            EXPECT_GE(w, 2 * r - 1e-10);
        }
    }
}
