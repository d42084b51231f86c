#include "pfence/fence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace pfence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double arc_green(Point c, double R, double a, double b) {
    return 0.5 * (R * R * (b - a) + R * (c.x * (std::sin(b) - std::sin(a)) - c.y * (std::cos(b) - std::cos(a))));
}

Point perp(Point v) { return {-v.y, v.x}; }

Point rotate(Point v, double a) {
    double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// x - sin(x) without cancellation.
double x_minus_sin(double x) {
    if (std::abs(x) < 1e-2) {
        double x2 = x * x;
        return x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
    }
    return x - std::sin(x);
}

struct Geometry {
    bool ok = false;
    double area_E = 0.0;
    double area_comp = 0.0;
    double length = 0.0;
    Point p1, p2, t1, t2;
};

// Chord of length c with signed sagitta h as a circular arc.
Geometry fence_geometry(const BoundaryPath& path, const Fence& f) {
    Geometry g;
    const double L = path.length();
    double s1 = path.wrap(f.s1), s2 = path.wrap(f.s2);
    if (s1 == s2) return g;
    g.p1 = path.point(s1);
    g.p2 = path.point(s2);
    Point d = g.p2 - g.p1;
    double c = norm(d);
    if (!(c > 1e-14 * L)) return g;
    d = d / c;
    double h = f.sagitta;
    if (!(std::abs(h) <= 0.5 * c * (1.0 + 1e-12))) return g;
    h = std::clamp(h, -0.5 * c, 0.5 * c);
    double seg = 0.0;
    g.t1 = g.t2 = d;
    if (std::abs(h) <= 1e-15 * c) {
        g.length = c;
    } else {
        double sgn = h > 0.0 ? 1.0 : -1.0, ah = std::abs(h);
        double alpha = 2.0 * std::atan(2.0 * ah / c);
        double R = (0.25 * c * c + ah * ah) / (2.0 * ah);
        seg = 0.5 * R * R * x_minus_sin(2.0 * alpha);
        g.length = 2.0 * alpha * R;
        Point m = perp(d) * sgn;
        Point C = (g.p1 + g.p2) * 0.5 + m * (ah - R);
        if (!path.arc_inside(C, R, m, std::cos(alpha), 1e-12 * path.scale())) return g;
        seg *= sgn;
        g.t1 = rotate(d, sgn * alpha);
        g.t2 = rotate(d, -sgn * alpha);
    }
    g.area_E = path.green(s1, s2) + 0.5 * cross(g.p2, g.p1) + seg;
    g.area_comp = path.green(s2, s1) + 0.5 * cross(g.p1, g.p2) - seg;
    g.ok = g.area_E > 0.0 && g.area_comp > 0.0;
    return g;
}

double sigma_value(const BoundaryPath& path, const Geometry& g) {
    return path.area() * g.length / (2.0 * g.area_E * g.area_comp);
}

double mu_value(const Geometry& g) { return g.length / std::min(g.area_E, g.area_comp); }

double evaluate(const BoundaryPath& path, const Fence& f, FenceObjective which) {
    Geometry g = fence_geometry(path, f);
    if (!g.ok) return kInf;
    return which == FenceObjective::Sigma1 ? sigma_value(path, g) : mu_value(g);
}

// Fence parameters with the sagitta as a fraction of half the chord.
struct Params {
    double s1, s2, t;
};

Fence to_fence(const BoundaryPath& path, const Params& x) {
    double c = norm(path.point(x.s2) - path.point(x.s1));
    return {path.wrap(x.s1), path.wrap(x.s2), 0.5 * c * x.t};
}

struct Candidate {
    double value;
    int i, k, j;
    bool operator<(const Candidate& o) const { return std::tie(value, i, k, j) < std::tie(o.value, o.i, o.k, o.j); }
};

// Best `keep` lattice candidates, i < k, deterministic order.
std::vector<Candidate> scan_lattice(const BoundaryPath& path, int gs, int gt, int keep, int threads,
                                    const std::function<double(const Params&)>& F) {
    const double L = path.length();
    auto rows = parallel_map<std::vector<Candidate>>(gs, threads, [&](int i) {
        std::vector<Candidate> best;
        for (int k = i + 1; k < gs; ++k) {
            for (int j = 0; j < gt; ++j) {
                double t = gt == 1 ? 0.0 : -1.0 + 2.0 * j / (gt - 1);
                double v = F({L * i / gs, L * k / gs, t});
                if (!std::isfinite(v)) continue;
                best.push_back({v, i, k, j});
            }
        }
        std::sort(best.begin(), best.end());
        if (static_cast<int>(best.size()) > keep) best.resize(keep);
        return best;
    });
    std::vector<Candidate> all;
    for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    std::sort(all.begin(), all.end());
    if (static_cast<int>(all.size()) > keep) all.resize(keep);
    return all;
}

// Coordinate descent with step halving once a sweep stalls.
std::pair<Params, double> descend(Params x, std::vector<double> step, const std::vector<double>& floor,
                                  const SolverOptions& opt, const std::function<double(const Params&)>& F) {
    double best = F(x);
    const int dims = static_cast<int>(step.size());
    auto coord = [](Params& p, int c) -> double& { return c == 0 ? p.s1 : (c == 1 ? p.s2 : p.t); };
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const double before = best;
        for (int c = 0; c < dims; ++c) {
            for (double dir : {1.0, -1.0}) {
                for (int moves = 0; moves < 1000; ++moves) {
                    Params y = x;
                    double& v = coord(y, c);
                    v += dir * step[c];
                    if (c == 2) v = std::clamp(v, -1.0, 1.0);
                    if (v == coord(x, c)) break;
                    double fy = F(y);
                    if (!(fy < best)) break;
                    x = y;
                    best = fy;
                }
            }
        }
        if (before - best <= opt.tol * std::abs(best)) {
            bool done = true;
            for (int c = 0; c < dims; ++c) {
                step[c] *= 0.5;
                if (step[c] > floor[c]) done = false;
            }
            if (done) break;
        }
    }
    return {x, best};
}

FenceResult make_result(const BoundaryPath& path, const Fence& f, FenceObjective which) {
    Geometry g = fence_geometry(path, f);
    if (!g.ok) throw Error(ErrorCode::SolverFailed, "refined fence is invalid");
    FenceResult r;
    r.which = which;
    r.fence = f;
    r.area_E = g.area_E;
    r.area_comp = g.area_comp;
    r.fence_length = g.length;
    Point b1 = path.tangent(f.s1), b2 = path.tangent(f.s2);
    Point t1 = g.t1, t2 = g.t2;
    bool flip = g.area_E > g.area_comp || (g.area_E == g.area_comp && f.s2 < f.s1);
    if (flip) {
        r.fence = {f.s2, f.s1, -f.sagitta};
        std::swap(r.area_E, r.area_comp);
        std::swap(b1, b2);
        std::swap(t1, t2);
    }
    r.value = which == FenceObjective::Sigma1 ? sigma_value(path, g) : mu_value(g);
    r.contact_angle1 = std::acos(std::min(1.0, std::abs(dot(t1, b1))));
    r.contact_angle2 = std::acos(std::min(1.0, std::abs(dot(t2, b2))));
    return r;
}

void check_options(const SolverOptions& o) {
    if (o.grid_s < 4 || o.grid_t < 1 || o.starts < 1 || o.max_sweeps < 1 || !(o.tol >= 0.0))
        throw Error(ErrorCode::DomainError, "invalid solver options");
}

FenceResult solve(const ConvexBody2D& body, const SolverOptions& opt, FenceObjective which) {
    check_options(opt);
    BoundaryPath path(body);
    const double L = path.length();
    auto F = [&](const Params& x) { return evaluate(path, to_fence(path, x), which); };
    auto starts = scan_lattice(path, opt.grid_s, opt.grid_t, opt.starts, opt.threads, F);
    if (starts.empty()) throw Error(ErrorCode::SolverFailed, "no valid lattice fence");

    const double ds = L / opt.grid_s, dt = opt.grid_t > 1 ? 2.0 / (opt.grid_t - 1) : 0.5;
    const std::vector<double> floor{1e-13 * L, 1e-13 * L, 1e-13};
    auto runs = parallel_map<std::pair<Params, double>>(static_cast<int>(starts.size()), opt.threads, [&](int n) {
        const Candidate& c = starts[n];
        Params x{L * c.i / opt.grid_s, L * c.k / opt.grid_s, opt.grid_t == 1 ? 0.0 : -1.0 + dt * c.j};
        return descend(x, {ds, ds, dt}, floor, opt, F);
    });

    // Minimizers of L/|E| tend to sit on |E| = |Ω|/2, where the objective has
    // a kink; refine there separately with the sagitta solved for.
    if (which == FenceObjective::Mu1) {
        const double half = 0.5 * path.area();
        auto half_area_t = [&](double s1, double s2) -> double {
            auto area_at = [&](double t) {
                Geometry g = fence_geometry(path, to_fence(path, {s1, s2, t}));
                return g.ok ? g.area_E : std::numeric_limits<double>::quiet_NaN();
            };
            double a0 = area_at(0.0);
            if (std::isnan(a0)) return std::numeric_limits<double>::quiet_NaN();
            double dir = a0 < half ? 1.0 : -1.0;
            double lo = 0.0, hi = dir;
            // Validity is monotone in |t|: bisect for the largest valid bulge.
            if (std::isnan(area_at(hi))) {
                double good = 0.0, bad = hi;
                for (int i = 0; i < 60; ++i) {
                    double mid = 0.5 * (good + bad);
                    (std::isnan(area_at(mid)) ? bad : good) = mid;
                }
                hi = good;
            }
            double ahi = area_at(hi);
            if ((ahi - half) * (a0 - half) > 0.0) return std::numeric_limits<double>::quiet_NaN();
            for (int i = 0; i < 100 && lo != hi; ++i) {
                double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                ((area_at(mid) - half) * (a0 - half) > 0.0 ? lo : hi) = mid;
            }
            return hi;
        };
        auto G = [&](const Params& x) {
            double t = half_area_t(x.s1, x.s2);
            if (std::isnan(t)) return kInf;
            return evaluate(path, to_fence(path, {x.s1, x.s2, t}), which);
        };
        auto mstarts = scan_lattice(path, opt.grid_s, 1, opt.starts, opt.threads, G);
        auto mruns = parallel_map<std::pair<Params, double>>(static_cast<int>(mstarts.size()), opt.threads, [&](int n) {
            const Candidate& c = mstarts[n];
            auto [x, v] = descend({L * c.i / opt.grid_s, L * c.k / opt.grid_s, 0.0}, {ds, ds}, {floor[0], floor[1]}, opt, G);
            x.t = half_area_t(x.s1, x.s2);
            return std::make_pair(x, v);
        });
        runs.insert(runs.end(), mruns.begin(), mruns.end());
    }

    int best = -1;
    for (int n = 0; n < static_cast<int>(runs.size()); ++n)
        if (std::isfinite(runs[n].second) && (best < 0 || runs[n].second < runs[best].second)) best = n;
    if (best < 0) throw Error(ErrorCode::SolverFailed, "local refinement produced no valid fence");
    return make_result(path, to_fence(path, runs[best].first), which);
}

}  // namespace

const char* to_string(FenceObjective which) { return which == FenceObjective::Sigma1 ? "sigma1" : "mu1"; }

// ---------------------------------------------------------------------------
// BoundaryPath

BoundaryPath::BoundaryPath(const ConvexBody2D& body) {
    auto add_segment = [&](Point a, Point b) {
        Piece p;
        p.a = a;
        p.b = b;
        p.length = norm(b - a);
        if (p.length > 0.0) pieces_.push_back(p);
        Point e = b - a;
        Point n = Point{e.y, -e.x} / norm(e);
        lines_.push_back({n, dot(n, a)});
    };
    auto add_arc = [&](Point c, double R, double t0, double sweep) {
        Piece p;
        p.arc = true;
        p.center = c;
        p.radius = R;
        p.t0 = t0;
        p.length = R * sweep;
        pieces_.push_back(p);
    };
    switch (body.kind()) {
        case BodyKind::Polygon: {
            const auto& v = body.vertices();
            for (std::size_t i = 0; i < v.size(); ++i) add_segment(v[i], v[(i + 1) % v.size()]);
            break;
        }
        case BodyKind::Disc:
            add_arc(body.center(), body.radius(), 0.0, 2.0 * kPi);
            break;
        case BodyKind::TruncatedDisc: {
            const double R = body.radius(), rho = body.half_strip_width();
            const Point c = body.center();
            if (rho >= R) {
                add_arc(c, R, 0.0, 2.0 * kPi);
                break;
            }
            double a = std::asin(rho / R), cx = std::sqrt(R * R - rho * rho);
            add_arc(c, R, -a, 2.0 * a);
            add_segment(c + Point{cx, rho}, c + Point{-cx, rho});
            add_arc(c, R, kPi - a, 2.0 * a);
            add_segment(c + Point{-cx, -rho}, c + Point{cx, -rho});
            break;
        }
    }
    if (body.kind() != BodyKind::Polygon) {
        has_circle_ = true;
        circle_center_ = body.center();
        circle_radius_ = body.radius();
    }
    std::sort(lines_.begin(), lines_.end(),
              [](const Line& l, const Line& r) { return std::atan2(l.n.y, l.n.x) < std::atan2(r.n.y, r.n.x); });
    for (const Line& l : lines_) line_angle_.push_back(std::atan2(l.n.y, l.n.x));

    double acc = 0.0, g = 0.0;
    for (const Piece& p : pieces_) {
        start_.push_back(acc);
        prefix_.push_back(g);
        acc += p.length;
        g += piece_green(p, 0.0, p.length);
    }
    total_ = acc;
    area_ = g;
    scale_ = total_ / kPi;
}

double BoundaryPath::wrap(double s) const {
    double w = std::fmod(s, total_);
    if (w < 0.0) w += total_;
    if (w >= total_) w = 0.0;
    return w;
}

int BoundaryPath::locate(double s) const {
    int i = static_cast<int>(std::upper_bound(start_.begin(), start_.end(), s) - start_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(pieces_.size()) - 1);
}

Point BoundaryPath::piece_point(const Piece& p, double u) const {
    if (p.arc) {
        double t = p.t0 + u / p.radius;
        return p.center + Point{std::cos(t), std::sin(t)} * p.radius;
    }
    return p.a + (p.b - p.a) * (u / p.length);
}

double BoundaryPath::piece_green(const Piece& p, double u0, double u1) const {
    if (p.arc) return arc_green(p.center, p.radius, p.t0 + u0 / p.radius, p.t0 + u1 / p.radius);
    return 0.5 * cross(piece_point(p, u0), piece_point(p, u1));
}

Point BoundaryPath::point(double s) const {
    s = wrap(s);
    int i = locate(s);
    return piece_point(pieces_[i], s - start_[i]);
}

Point BoundaryPath::tangent(double s) const {
    s = wrap(s);
    const Piece& p = pieces_[locate(s)];
    if (p.arc) {
        double t = p.t0 + (s - start_[locate(s)]) / p.radius;
        return {-std::sin(t), std::cos(t)};
    }
    return (p.b - p.a) / p.length;
}

double BoundaryPath::green(double s1, double s2) const {
    s1 = wrap(s1);
    s2 = wrap(s2);
    auto upto = [&](double s) {
        int i = locate(s);
        return prefix_[i] + piece_green(pieces_[i], 0.0, s - start_[i]);
    };
    double g = upto(s2) - upto(s1);
    return s2 >= s1 ? g : area_ + g;
}

bool BoundaryPath::arc_inside(Point C, double R, Point m, double cos_half, double tol) const {
    // Outside the angular span of the arc the support in direction n is
    // attained at an endpoint, which lies on the boundary.
    if (has_circle_) {
        Point d = C - circle_center_;
        double dn = norm(d);
        if (dn == 0.0 || dot(d, m) >= cos_half * dn) {
            if (dn + R > circle_radius_ + tol) return false;
        }
    }
    if (lines_.empty()) return true;
    const double am = std::atan2(m.y, m.x), half = std::acos(std::clamp(cos_half, -1.0, 1.0));
    auto check_range = [&](double lo, double hi) {
        auto it = std::lower_bound(line_angle_.begin(), line_angle_.end(), lo);
        for (; it != line_angle_.end() && *it <= hi; ++it) {
            const Line& l = lines_[it - line_angle_.begin()];
            if (dot(l.n, m) < cos_half) continue;
            if (dot(l.n, C) + R > l.c + tol) return false;
        }
        return true;
    };
    const double eps = 1e-12;
    double lo = am - half - eps, hi = am + half + eps;
    if (!check_range(lo, hi)) return false;
    if (lo < -kPi && !check_range(lo + 2.0 * kPi, kPi)) return false;
    if (hi > kPi && !check_range(-kPi, hi - 2.0 * kPi)) return false;
    return true;
}

// ---------------------------------------------------------------------------

FenceSplit split(const BoundaryPath& path, const Fence& fence) {
    Geometry g = fence_geometry(path, fence);
    if (!g.ok) throw Error(ErrorCode::InvalidFence, "fence is degenerate or leaves the body");
    return {g.area_E, g.area_comp, g.length};
}

FenceSplit split(const ConvexBody2D& body, const Fence& fence) { return split(BoundaryPath(body), fence); }

double sigma1_objective(const ConvexBody2D& body, const Fence& fence) {
    BoundaryPath path(body);
    FenceSplit s = split(path, fence);
    return path.area() * s.fence_length / (2.0 * s.area_E * s.area_comp);
}

double mu1_objective(const ConvexBody2D& body, const Fence& fence) {
    FenceSplit s = split(body, fence);
    return s.fence_length / std::min(s.area_E, s.area_comp);
}

FenceResult solve_sigma1(const ConvexBody2D& body, const SolverOptions& options) {
    return solve(body, options, FenceObjective::Sigma1);
}

FenceResult solve_mu1(const ConvexBody2D& body, const SolverOptions& options) {
    return solve(body, options, FenceObjective::Mu1);
}

double grid_oracle_sigma1(const ConvexBody2D& body, int resolution, int threads) {
    if (resolution < 4) throw Error(ErrorCode::DomainError, "oracle resolution must be at least 4");
    BoundaryPath path(body);
    auto F = [&](const Params& x) { return evaluate(path, to_fence(path, x), FenceObjective::Sigma1); };
    auto best = scan_lattice(path, resolution, resolution / 2 + 1, 1, threads, F);
    return best.empty() ? kInf : best.front().value;
}

std::vector<Point> fence_polyline(const ConvexBody2D& body, const Fence& fence, int segments) {
    BoundaryPath path(body);
    Geometry g = fence_geometry(path, fence);
    if (!g.ok) throw Error(ErrorCode::InvalidFence, "fence is degenerate or leaves the body");
    if (segments < 1) segments = 1;
    std::vector<Point> out;
    const double c = norm(g.p2 - g.p1);
    const double h = std::clamp(fence.sagitta, -0.5 * c, 0.5 * c);
    if (std::abs(h) <= 1e-15 * c) {
        for (int i = 0; i <= segments; ++i) out.push_back(g.p1 + (g.p2 - g.p1) * (static_cast<double>(i) / segments));
        return out;
    }
    double sgn = h > 0.0 ? 1.0 : -1.0, ah = std::abs(h);
    double alpha = 2.0 * std::atan(2.0 * ah / c);
    double R = (0.25 * c * c + ah * ah) / (2.0 * ah);
    Point m = perp((g.p2 - g.p1) / c) * sgn;
    Point C = (g.p1 + g.p2) * 0.5 + m * (ah - R);
    Point u1 = (g.p1 - C) / R;
    for (int i = 0; i <= segments; ++i) {
        double a = -sgn * 2.0 * alpha * i / segments;
        out.push_back(C + rotate(u1, a) * R);
    }
    out.back() = g.p2;
    return out;
}

double truncated_disc_sigma1_exact(double rho) {
    if (!(rho > 0.0 && rho <= 0.5)) throw Error(ErrorCode::DomainError, "rho must lie in (0, 1/2]");
    return 8.0 * rho / (2.0 * rho * std::sqrt(std::max(0.0, 1.0 - 4.0 * rho * rho)) + std::asin(2.0 * rho));
}

double truncated_disc_E_theta(double theta) {
    if (!(theta > 0.0 && theta <= 0.5 * kPi)) throw Error(ErrorCode::DomainError, "theta must lie in (0, pi/2]");
    const double s = std::sin(theta), c = std::cos(theta);
    double num;
    if (theta < 2e-2) {
        double t2 = theta * theta;
        num = theta * t2 * (1.0 / 3.0 + t2 * (-7.0 / 60.0 + t2 * (31.0 / 2520.0 - t2 * 127.0 / 181440.0)));
    } else {
        num = 2.0 * s - s * c - theta;
    }
    return 8.0 * num / (s * s * (s * c + theta));
}

Section5Aux section5_auxiliaries(double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    if (std::abs(theta) < 2e-2) {
        double t2 = theta * theta;
        double f = theta * t2 * t2 * (19.0 / 30.0 + t2 * (-467.0 / 1260.0 + t2 * (2689.0 / 30240.0 - t2 * 130819.0 / 9979200.0)));
        double g = theta * t2 * (19.0 / 12.0 + t2 * (-29.0 / 120.0 + t2 * (563.0 / 20160.0 - t2 * 419.0 / 362880.0)));
        return {f, g};
    }
    double f = 12.0 * s - 6.0 * s * c - 6.0 * theta - s * s * s * c - theta * s * s;
    double g = 6.0 * (1.0 - c) / s - 2.0 * s * c - theta;
    return {f, g};
}

}  // namespace pfence
