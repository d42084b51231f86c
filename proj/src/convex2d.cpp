#include "pfence/convex2d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace pfence {

namespace {

constexpr double kMinInradius = 1e-8;

// Neumaier compensated sum.
struct Accum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

Point outward_normal(Point a, Point b) {
    Point e = b - a;
    double l = norm(e);
    return {e.y / l, -e.x / l};
}

// Dual of max r s.t. n_i·x + r <= c_i:
//   min c·λ  s.t.  Σλ_i n_i = 0, Σλ_i = 1, λ >= 0.
// Two-phase tableau simplex; the primal solution is read off the final
// simplex multipliers.
Incircle lp_inradius(const std::vector<Point>& normals, const std::vector<double>& offsets) {
    const int n = static_cast<int>(normals.size());
    const int cols = n + 3;
    const int width = cols + 1;
    std::vector<double> tab(3 * width, 0.0);
    auto at = [&](int r, int c) -> double& { return tab[r * width + c]; };
    for (int j = 0; j < n; ++j) {
        at(0, j) = normals[j].x;
        at(1, j) = normals[j].y;
        at(2, j) = 1.0;
    }
    for (int r = 0; r < 3; ++r) at(r, n + r) = 1.0;
    at(2, cols) = 1.0;
    std::array<int, 3> basis{n, n + 1, n + 2};

    auto pivot = [&](int pr, int pc) {
        double pv = at(pr, pc);
        for (int c = 0; c <= cols; ++c) at(pr, c) /= pv;
        for (int r = 0; r < 3; ++r) {
            if (r == pr) continue;
            double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
        }
        basis[pr] = pc;
    };

    auto run = [&](const std::vector<double>& cost, bool allow_artificial) {
        const int max_iter = 50 * (n + 3);
        for (int iter = 0; iter < max_iter; ++iter) {
            bool bland = iter > 10 * (n + 3);
            // Reduced costs from the current basis: d_j = c_j - c_B B^{-1} a_j
            // where B^{-1} a_j is the tableau column.
            int enter = -1;
            double best = -1e-12;
            for (int j = 0; j < cols; ++j) {
                if (!allow_artificial && j >= n) continue;
                double d = cost[j];
                for (int r = 0; r < 3; ++r) d -= cost[basis[r]] * at(r, j);
                if (d < best) {
                    best = d;
                    enter = j;
                    if (bland) break;
                }
            }
            if (enter < 0) return;
            int leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < 3; ++r) {
                double a = at(r, enter);
                if (a > 1e-12) {
                    double q = at(r, cols) / a;
                    if (q < ratio - 1e-15 || (leave >= 0 && q <= ratio + 1e-15 && basis[r] < basis[leave])) {
                        ratio = q;
                        leave = r;
                    }
                }
            }
            if (leave < 0) throw Error(ErrorCode::DegenerateInput, "inradius LP unbounded");
            pivot(leave, enter);
        }
        throw Error(ErrorCode::DegenerateInput, "inradius LP did not converge");
    };

    std::vector<double> phase1(cols, 0.0);
    for (int r = 0; r < 3; ++r) phase1[n + r] = 1.0;
    run(phase1, true);
    // Drive remaining artificials out of the basis.
    for (int r = 0; r < 3; ++r) {
        if (basis[r] < n) continue;
        int best = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(at(r, j)) > 1e-9 && (best < 0 || std::abs(at(r, j)) > std::abs(at(r, best)))) best = j;
        if (best < 0) throw Error(ErrorCode::DegenerateInput, "edge normals do not span the plane");
        pivot(r, best);
    }
    std::vector<double> phase2(cols, 0.0);
    for (int j = 0; j < n; ++j) phase2[j] = offsets[j];
    run(phase2, false);

    // Solve B^T y = c_B with columns a_j = (n_jx, n_jy, 1).
    double m[3][4];
    for (int r = 0; r < 3; ++r) {
        int j = basis[r];
        m[r][0] = normals[j].x;
        m[r][1] = normals[j].y;
        m[r][2] = 1.0;
        m[r][3] = offsets[j];
    }
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        if (std::abs(m[p][c]) < 1e-300) throw Error(ErrorCode::DegenerateInput, "singular inradius basis");
        for (int k = 0; k < 4; ++k) std::swap(m[c][k], m[p][k]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    Point center{m[0][3] / m[0][0], m[1][3] / m[1][1]};
    double r = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) r = std::min(r, offsets[j] - dot(normals[j], center));
    return {r, center};
}

void check_convex_ccw(const std::vector<Point>& v) {
    const std::size_t n = v.size();
    if (n < 3) throw Error(ErrorCode::DegenerateInput, "polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        Point a = v[i], b = v[(i + 1) % n], c = v[(i + 2) % n];
        if (!(cross(b - a, c - a) > 0.0))
            throw Error(ErrorCode::DegenerateInput, "vertices are not strictly convex and counter-clockwise at index " +
                                                        std::to_string((i + 1) % n));
    }
}

}  // namespace

const char* to_string(BodyKind kind) {
    switch (kind) {
        case BodyKind::Polygon: return "polygon";
        case BodyKind::Disc: return "disc";
        case BodyKind::TruncatedDisc: return "truncated_disc";
    }
    return "unknown";
}

Strip Strip::between(Point u, double lo, double hi) {
    double l = norm(u);
    u = u / l;
    return {u, hi, u * -1.0, -lo, true};
}

Strip Strip::from_halfplanes(Point n1, double c1, Point n2, double c2) {
    double l1 = norm(n1), l2 = norm(n2);
    Strip s{n1 / l1, c1 / l1, n2 / l2, c2 / l2, false};
    s.parallel = std::abs(cross(s.n1, s.n2)) < 1e-14 && dot(s.n1, s.n2) < 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// Polygon helpers

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(h[k - 1] - h[k - 2], pts[i - 1] - h[k - 2]) <= 0.0) --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

double polygon_area(const std::vector<Point>& p) {
    if (p.size() < 3) return 0.0;
    Accum acc;
    Point o = p[0];
    for (std::size_t i = 1; i + 1 < p.size(); ++i) acc.add(cross(p[i] - o, p[i + 1] - o));
    return 0.5 * acc.value();
}

double polygon_perimeter(const std::vector<Point>& p) {
    Accum acc;
    for (std::size_t i = 0; i < p.size(); ++i) acc.add(norm(p[(i + 1) % p.size()] - p[i]));
    return acc.value();
}

Point polygon_centroid(const std::vector<Point>& p) {
    Point o = p[0];
    Accum a, cx, cy;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        Point u = p[i] - o, v = p[i + 1] - o;
        double w = cross(u, v);
        a.add(w);
        cx.add(w * (u.x + v.x));
        cy.add(w * (u.y + v.y));
    }
    double A = a.value();
    return {o.x + cx.value() / (3.0 * A), o.y + cy.value() / (3.0 * A)};
}

std::vector<Point> clip_halfplane(const std::vector<Point>& poly, Point n, double c) {
    std::vector<Point> out;
    const std::size_t m = poly.size();
    out.reserve(m + 2);
    for (std::size_t i = 0; i < m; ++i) {
        Point a = poly[i], b = poly[(i + 1) % m];
        double da = dot(n, a) - c, db = dot(n, b) - c;
        if (da <= 0.0) out.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            double t = da / (da - db);
            out.push_back(a + (b - a) * t);
        }
    }
    std::vector<Point> dedup;
    dedup.reserve(out.size());
    for (Point q : out)
        if (dedup.empty() || !(q == dedup.back())) dedup.push_back(q);
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    return dedup;
}

std::vector<Point> convex_intersection(const std::vector<Point>& a, const std::vector<Point>& b) {
    std::vector<Point> out = a;
    for (std::size_t i = 0; i < b.size() && out.size() >= 3; ++i) {
        Point p = b[i], q = b[(i + 1) % b.size()];
        Point e = q - p;
        Point n{e.y, -e.x};
        out = clip_halfplane(out, n, dot(n, p));
    }
    if (out.size() < 3) out.clear();
    return out;
}

double polygon_diameter(const std::vector<Point>& p) {
    const std::size_t n = p.size();
    if (n < 2) return 0.0;
    if (n == 2) return norm(p[1] - p[0]);
    double best = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Point a = p[i], b = p[(i + 1) % n];
        Point e = b - a;
        for (std::size_t step = 0; step < n; ++step) {
            std::size_t jn = (j + 1) % n;
            if (cross(e, p[jn] - a) > cross(e, p[j] - a))
                j = jn;
            else
                break;
        }
        best = std::max({best, norm(p[j] - a), norm(p[j] - b)});
    }
    return best;
}

double polygon_min_width(const std::vector<Point>& p) {
    const std::size_t n = p.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Point a = p[i], b = p[(i + 1) % n];
        Point e = b - a;
        double l = norm(e);
        for (std::size_t step = 0; step < n; ++step) {
            std::size_t jn = (j + 1) % n;
            if (cross(e, p[jn] - a) >= cross(e, p[j] - a) && jn != i)
                j = jn;
            else
                break;
        }
        best = std::min(best, cross(e, p[j] - a) / l);
    }
    return best;
}

Incircle polygon_inradius(const std::vector<Point>& p) {
    Point o = polygon_centroid(p);
    std::vector<Point> normals;
    std::vector<double> offsets;
    normals.reserve(p.size());
    offsets.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        Point a = p[i] - o, b = p[(i + 1) % p.size()] - o;
        Point nn = outward_normal(a, b);
        normals.push_back(nn);
        offsets.push_back(dot(nn, a));
    }
    Incircle ic = lp_inradius(normals, offsets);
    ic.center = ic.center + o;
    return ic;
}

// ---------------------------------------------------------------------------
// ConvexBody2D

ConvexBody2D ConvexBody2D::polygon(std::vector<Point> ccw) {
    check_convex_ccw(ccw);
    double A = polygon_area(ccw), P = polygon_perimeter(ccw);
    // A/P <= inradius <= 2A/P; the LP only runs in the ambiguous band.
    if (2.0 * A / P < kMinInradius || (A / P < kMinInradius && polygon_inradius(ccw).radius < kMinInradius))
        throw Error(ErrorCode::DegenerateInput, "polygon inradius below 1e-8");
    ConvexBody2D b;
    b.kind_ = BodyKind::Polygon;
    b.vertices_ = std::move(ccw);
    return b;
}

ConvexBody2D ConvexBody2D::disc(double radius, Point center) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorCode::DegenerateInput, "disc radius must be positive");
    ConvexBody2D b;
    b.kind_ = BodyKind::Disc;
    b.radius_ = radius;
    b.rho_ = radius;
    b.center_ = center;
    return b;
}

ConvexBody2D ConvexBody2D::truncated_disc(double radius, double rho, Point center) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorCode::DegenerateInput, "disc radius must be positive");
    if (!(rho > 0.0) || rho > radius) throw Error(ErrorCode::DegenerateInput, "half_strip_width must lie in (0, radius]");
    if (rho < kMinInradius) throw Error(ErrorCode::DegenerateInput, "truncated disc inradius below 1e-8");
    ConvexBody2D b;
    b.kind_ = BodyKind::TruncatedDisc;
    b.radius_ = radius;
    b.rho_ = rho;
    b.center_ = center;
    return b;
}

double ConvexBody2D::area() const {
    switch (kind_) {
        case BodyKind::Polygon: return polygon_area(vertices_);
        case BodyKind::Disc: return kPi * radius_ * radius_;
        case BodyKind::TruncatedDisc: {
            double R = radius_, r = rho_;
            return 2.0 * (r * std::sqrt(std::max(0.0, R * R - r * r)) + R * R * std::asin(std::min(1.0, r / R)));
        }
    }
    return 0.0;
}

double ConvexBody2D::perimeter() const {
    switch (kind_) {
        case BodyKind::Polygon: return polygon_perimeter(vertices_);
        case BodyKind::Disc: return 2.0 * kPi * radius_;
        case BodyKind::TruncatedDisc: {
            double R = radius_, r = rho_;
            return 4.0 * std::sqrt(std::max(0.0, R * R - r * r)) + 4.0 * R * std::asin(std::min(1.0, r / R));
        }
    }
    return 0.0;
}

double ConvexBody2D::diameter() const {
    if (kind_ == BodyKind::Polygon) return polygon_diameter(vertices_);
    return 2.0 * radius_;
}

Incircle ConvexBody2D::inradius() const {
    if (kind_ == BodyKind::Polygon) return polygon_inradius(vertices_);
    return {rho_, center_};
}

double ConvexBody2D::support(Point u) const {
    switch (kind_) {
        case BodyKind::Polygon: {
            double h = -std::numeric_limits<double>::infinity();
            for (Point v : vertices_) h = std::max(h, dot(v, u));
            return h;
        }
        case BodyKind::Disc: return dot(center_, u) + radius_ * norm(u);
        case BodyKind::TruncatedDisc: {
            double l = norm(u);
            double ux = u.x / l, uy = u.y / l;
            double h = radius_ * std::abs(uy) <= rho_
                           ? radius_
                           : std::abs(ux) * std::sqrt(radius_ * radius_ - rho_ * rho_) + std::abs(uy) * rho_;
            return dot(center_, u) + l * h;
        }
    }
    return 0.0;
}

double ConvexBody2D::min_width() const {
    if (kind_ == BodyKind::Polygon) return polygon_min_width(vertices_);
    return 2.0 * rho_;
}

bool ConvexBody2D::contains(Point p, double tol) const {
    switch (kind_) {
        case BodyKind::Polygon: {
            const std::size_t n = vertices_.size();
            for (std::size_t i = 0; i < n; ++i) {
                Point a = vertices_[i], b = vertices_[(i + 1) % n];
                if (cross(b - a, p - a) < -tol * norm(b - a)) return false;
            }
            return true;
        }
        case BodyKind::Disc: return norm(p - center_) <= radius_ + tol;
        case BodyKind::TruncatedDisc:
            return norm(p - center_) <= radius_ + tol && std::abs(p.y - center_.y) <= rho_ + tol;
    }
    return false;
}

std::vector<Point> ConvexBody2D::polygon_view(int samples) const {
    if (kind_ == BodyKind::Polygon) return vertices_;
    if (samples < 3) throw Error(ErrorCode::DegenerateInput, "polygon view needs at least 3 samples");
    const double R = radius_;
    std::vector<std::pair<double, Point>> pts;
    pts.reserve(samples + 4);
    const bool cut = kind_ == BodyKind::TruncatedDisc && rho_ < R;
    for (int k = 0; k < samples; ++k) {
        double t = 2.0 * kPi * k / samples;
        Point q{R * std::cos(t), R * std::sin(t)};
        if (cut && std::abs(q.y) >= rho_) continue;
        pts.emplace_back(t, q);
    }
    if (cut) {
        double a = std::asin(rho_ / R);
        double cx = std::sqrt(R * R - rho_ * rho_);
        pts.emplace_back(a, Point{cx, rho_});
        pts.emplace_back(kPi - a, Point{-cx, rho_});
        pts.emplace_back(kPi + a, Point{-cx, -rho_});
        pts.emplace_back(2.0 * kPi - a, Point{cx, -rho_});
    }
    std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const auto& [t, q] : pts) {
        Point s = q + center_;
        if (out.empty() || norm(s - out.back()) > 1e-12 * R) out.push_back(s);
    }
    while (out.size() > 1 && norm(out.front() - out.back()) <= 1e-12 * R) out.pop_back();
    return out;
}

ConvexBody2D ConvexBody2D::scaled(double t) const {
    if (!(t > 0.0)) throw Error(ErrorCode::DegenerateInput, "scale factor must be positive");
    ConvexBody2D b = *this;
    for (Point& v : b.vertices_) v = v * t;
    b.radius_ *= t;
    b.rho_ *= t;
    b.center_ = b.center_ * t;
    return b;
}

ConvexBody2D ConvexBody2D::translated(Point d) const {
    ConvexBody2D b = *this;
    for (Point& v : b.vertices_) v = v + d;
    b.center_ = b.center_ + d;
    return b;
}

// ---------------------------------------------------------------------------
// Free functions

ConvexBody2D polygon_from_points(const std::vector<Point>& points) {
    for (Point p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::DegenerateInput, "non-finite point");
    std::vector<Point> h = convex_hull(points);
    if (h.size() < 3) throw Error(ErrorCode::DegenerateInput, "hull has fewer than 3 vertices");
    return ConvexBody2D::polygon(std::move(h));
}

double diameter(const ConvexBody2D& body) { return body.diameter(); }
Incircle inradius(const ConvexBody2D& body) { return body.inradius(); }
double width(const ConvexBody2D& body, Point direction) { return body.width(direction / norm(direction)); }
double min_width(const ConvexBody2D& body) { return body.min_width(); }
double area(const ConvexBody2D& body) { return body.area(); }
double perimeter(const ConvexBody2D& body) { return body.perimeter(); }

ConvexBody2D normalize_diameter(const ConvexBody2D& body) {
    double d = body.diameter();
    if (d == 1.0) return body;
    return body.scaled(1.0 / d);
}

ConvexBody2D random_convex(std::uint64_t seed, int n, double min_inradius) {
    if (n < 3) throw Error(ErrorCode::DegenerateInput, "random_convex needs n >= 3");
    Rng rng(seed);
    std::vector<Point> pts(n);
    for (int attempt = 0; attempt < kRandomConvexAttempts; ++attempt) {
        for (auto& p : pts) {
            do {
                p = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            } while (dot(p, p) >= 1.0);
        }
        std::vector<Point> h = convex_hull(pts);
        if (h.size() < 3) continue;
        try {
            ConvexBody2D body = normalize_diameter(ConvexBody2D::polygon(std::move(h)));
            if (body.inradius().radius >= min_inradius) return body;
        } catch (const Error&) {
        }
    }
    throw Error(ErrorCode::GenerationFailed, "no hull met the inradius bound within " +
                                                 std::to_string(kRandomConvexAttempts) + " attempts");
}

ConvexBody2D clip_with_strip(const ConvexBody2D& body, const Strip& strip, int samples) {
    auto inside = [](double h, double c) { return h <= c + 1e-12 * (1.0 + std::abs(c)); };
    if (inside(body.support(strip.n1), strip.c1) && inside(body.support(strip.n2), strip.c2)) return body;
    std::vector<Point> poly = body.polygon_view(samples);
    poly = clip_halfplane(poly, strip.n1, strip.c1);
    if (poly.size() >= 3) poly = clip_halfplane(poly, strip.n2, strip.c2);
    if (poly.size() < 3 || polygon_area(poly) <= 0.0) throw Error(ErrorCode::EmptyIntersection, "strip misses the body");
    try {
        return polygon_from_points(poly);
    } catch (const Error&) {
        throw Error(ErrorCode::EmptyIntersection, "strip meets the body in a degenerate set");
    }
}

}  // namespace pfence
