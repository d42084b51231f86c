#include "pfence/equipartition.hpp"

#include <limits>
#include <sstream>

namespace pfence {

namespace {

// Subdivision levels for triangles in grid cells where u changes sign.
constexpr int kKinkDepth = 2;

void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
}

std::vector<HalfPlane> halfplanes(const std::vector<Point>& poly) {
    std::vector<HalfPlane> hp;
    hp.reserve(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point a = poly[i], b = poly[(i + 1) % poly.size()];
        const Point n{b.y - a.y, a.x - b.x};
        hp.push_back({n, dot(n, a)});
    }
    return hp;
}

void add(Masses& acc, const Masses& m) {
    acc.u += m.u;
    acc.abs += m.abs;
    acc.phi += m.phi;
    acc.grad += m.grad;
}

// t in [0, 1] with f(t) = 0, given f(0)·f(1) < 0.
double edge_root(const std::function<double(double)>& f, double f0, double f1) {
    double a = 0.0, b = 1.0, fa = f0, fb = f1;
    int side = 0;
    for (int it = 0; it < 100 && b - a > 1e-14; ++it) {
        const double t = (a * fb - b * fa) / (fb - fa);
        const double ft = f(t);
        if (ft == 0.0) return t;
        if ((ft > 0.0) == (fb > 0.0)) {
            b = t;
            fb = ft;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = t;
            fa = ft;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (a + b);
}

std::vector<Point> to_ccw(std::vector<Point> poly) {
    if (polygon_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
    return poly;
}

}  // namespace

Point ScalarField::gradient(Point p, double h) const {
    if (grad) return grad(p);
    return {(u({p.x + h, p.y}) - u({p.x - h, p.y})) / (2.0 * h), (u({p.x, p.y + h}) - u({p.x, p.y - h})) / (2.0 * h)};
}

ScalarField sin_sin_field() {
    ScalarField f;
    const double k = 2.0 * kPi;
    f.u = [k](Point p) { return std::sin(k * p.x) * std::sin(k * p.y); };
    f.grad = [k](Point p) {
        return Point{k * std::cos(k * p.x) * std::sin(k * p.y), k * std::sin(k * p.x) * std::cos(k * p.y)};
    };
    return f;
}

std::vector<Point> body_polygon(const ConvexBody2D& body) {
    return body.kind() == BodyKind::Polygon ? body.vertices() : body.polygon_view(4096);
}

FieldIntegrator::FieldIntegrator(const ConvexBody2D& body, ScalarField field, int grid, int order)
    : field_(std::move(field)), body_(body_polygon(body)), grid_(grid) {
    if (!field_.u) throw Error(ErrorCode::DegenerateInput, "field has no u");
    if (grid < 1 || order < 1) throw Error(ErrorCode::DomainError, "grid and order must be positive");
    gauss_legendre01(order, gl_x_, gl_w_);
    Point lo = body_[0], hi = body_[0];
    for (Point p : body_) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    origin_ = lo;
    cell_w_ = (hi.x - lo.x) / grid;
    cell_h_ = (hi.y - lo.y) / grid;
    grad_step_ = 1e-6 * std::max(hi.x - lo.x, hi.y - lo.y);
    const auto body_hp = halfplanes(body_);
    cells_.resize(static_cast<std::size_t>(grid) * grid);
    for (int j = 0; j < grid; ++j) {
        for (int i = 0; i < grid; ++i) {
            GridCell& g = cells_[static_cast<std::size_t>(j) * grid + i];
            g.lo = {lo.x + i * cell_w_, lo.y + j * cell_h_};
            g.hi = {lo.x + (i + 1) * cell_w_, lo.y + (j + 1) * cell_h_};
            std::vector<Point> sq{g.lo, {g.hi.x, g.lo.y}, g.hi, {g.lo.x, g.hi.y}};
            bool inside = true;
            for (Point q : sq)
                for (const auto& h : body_hp)
                    if (dot(h.n, q) > h.c) inside = false;
            g.poly = inside ? sq : convex_intersection(sq, body_);
            if (g.poly.size() < 3) {
                g.poly.clear();
                continue;
            }
            double umin = std::numeric_limits<double>::infinity(), umax = -umin;
            constexpr int S = 6;
            for (int a = 0; a < S; ++a) {
                for (int b = 0; b < S; ++b) {
                    const Point q{g.lo.x + cell_w_ * a / (S - 1), g.lo.y + cell_h_ * b / (S - 1)};
                    const double v = field_.u(q);
                    umin = std::min(umin, v);
                    umax = std::max(umax, v);
                }
            }
            g.sign = umin > 0.0 ? 1 : (umax < 0.0 ? -1 : 0);
            const Point c = polygon_centroid(g.poly);
            if (!(field_.weight(c) > 0.0)) throw Error(ErrorCode::DegenerateInput, "phi must be positive on the body");
            g.full = polygon_masses(g.poly, g.sign, true);
        }
    }
}

void FieldIntegrator::smooth_triangle(Point a, Point b, Point c, int sign, bool with_grad, Masses& acc) const {
    const Point e1 = b - a, e2 = c - a;
    const double area2 = std::abs(cross(e1, e2));
    if (area2 == 0.0) return;
    const std::size_t n = gl_x_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double U = gl_x_[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double V = gl_x_[j];
            const Point p = a + (e1 * (1.0 - V) + e2 * V) * U;
            const double w = gl_w_[i] * gl_w_[j] * U * area2;
            const double f = field_.u(p), ph = field_.weight(p);
            acc.u += w * f * ph;
            acc.abs += w * sign * f * ph;
            acc.phi += w * ph;
            if (with_grad) acc.grad += w * norm(field_.gradient(p, grad_step_)) * ph;
        }
    }
}

void FieldIntegrator::triangle(Point a, Point b, Point c, int sign, bool with_grad, int depth, Masses& acc) const {
    if (sign != 0) {
        smooth_triangle(a, b, c, sign, with_grad, acc);
        return;
    }
    if (depth > 0) {
        const Point ab = (a + b) * 0.5, bc = (b + c) * 0.5, ca = (c + a) * 0.5;
        triangle(a, ab, ca, 0, with_grad, depth - 1, acc);
        triangle(ab, b, bc, 0, with_grad, depth - 1, acc);
        triangle(ca, bc, c, 0, with_grad, depth - 1, acc);
        triangle(ab, bc, ca, 0, with_grad, depth - 1, acc);
        return;
    }
    Point v[3] = {a, b, c};
    double f[3] = {field_.u(a), field_.u(b), field_.u(c)};
    int s[3];
    for (int k = 0; k < 3; ++k) s[k] = f[k] >= 0.0 ? 1 : -1;
    if (s[0] == s[1] && s[1] == s[2]) {
        smooth_triangle(a, b, c, s[0], with_grad, acc);
        return;
    }
    // The vertex whose sign differs from the other two.
    const int L = s[0] == s[1] ? 2 : (s[0] == s[2] ? 1 : 0);
    const int P = (L + 1) % 3, Q = (L + 2) % 3;
    auto root = [&](int k) {
        const Point from = v[L], to = v[k];
        const double t = edge_root([&](double t) { return field_.u(from + (to - from) * t); }, f[L], f[k]);
        return from + (to - from) * t;
    };
    const Point r1 = root(P), r2 = root(Q);
    smooth_triangle(v[L], r1, r2, s[L], with_grad, acc);
    smooth_triangle(r1, v[P], v[Q], s[P], with_grad, acc);
    smooth_triangle(r1, v[Q], r2, s[P], with_grad, acc);
}

Masses FieldIntegrator::polygon_masses(const std::vector<Point>& poly, int sign, bool with_grad) const {
    Masses acc;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        triangle(poly[0], poly[i], poly[i + 1], sign, with_grad, sign == 0 ? kKinkDepth : 0, acc);
    return acc;
}

namespace {

void bounds(const std::vector<Point>& pts, Point& lo, Point& hi) {
    lo = hi = pts[0];
    for (Point p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
}

std::vector<Point> clip_all(std::vector<Point> poly, const std::vector<HalfPlane>& hp) {
    for (const auto& h : hp) {
        poly = clip_halfplane(poly, h.n, h.c);
        if (poly.size() < 3) return {};
    }
    return poly;
}

}  // namespace

Masses FieldIntegrator::integrate(const std::vector<Point>& region_in, bool with_grad) const {
    if (region_in.size() < 3) return {};
    const std::vector<Point> region = to_ccw(region_in);
    Point lo, hi;
    bounds(region, lo, hi);
    return integrate_impl(halfplanes(region), lo, hi, with_grad);
}

Masses FieldIntegrator::integrate_cut(const std::vector<HalfPlane>& cuts, bool with_grad) const {
    const auto region = clip_all(body_, cuts);
    if (region.empty()) return {};
    Point lo, hi;
    bounds(region, lo, hi);
    return integrate_impl(cuts, lo, hi, with_grad);
}

Masses FieldIntegrator::integrate_impl(const std::vector<HalfPlane>& hp, Point lo, Point hi, bool with_grad) const {
    Masses acc;
    auto index = [](double v, double o, double w, int g) {
        if (w <= 0.0) return 0;
        return std::clamp(static_cast<int>(std::floor((v - o) / w)), 0, g - 1);
    };
    const int i0 = index(lo.x, origin_.x, cell_w_, grid_), i1 = index(hi.x, origin_.x, cell_w_, grid_);
    const int j0 = index(lo.y, origin_.y, cell_h_, grid_), j1 = index(hi.y, origin_.y, cell_h_, grid_);
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const GridCell& g = cells_[static_cast<std::size_t>(j) * grid_ + i];
            if (g.poly.empty()) continue;
            bool full = true, outside = false;
            for (const auto& h : hp) {
                double mx = -std::numeric_limits<double>::infinity(), mn = -mx;
                for (Point q : g.poly) {
                    const double d = dot(h.n, q) - h.c;
                    mx = std::max(mx, d);
                    mn = std::min(mn, d);
                }
                if (mn >= 0.0) {
                    outside = true;
                    break;
                }
                if (mx > 0.0) full = false;
            }
            if (outside) continue;
            if (full) {
                Masses m = g.full;
                if (!with_grad) m.grad = 0.0;
                add(acc, m);
                continue;
            }
            const auto piece = clip_all(g.poly, hp);
            if (!piece.empty()) add(acc, polygon_masses(piece, g.sign, with_grad));
        }
    }
    return acc;
}

Cell make_cell(const std::vector<Point>& polygon, const FieldIntegrator& integrator) {
    const Masses m = integrator.integrate(polygon, true);
    return {polygon_from_points(polygon), m.u, m.abs, m.phi, m.grad};
}

namespace {

// A convex piece of the body: its polygon and the cuts that carve it out.
struct Piece {
    std::vector<Point> poly;
    std::vector<HalfPlane> cuts;
};

Cell piece_cell(const Piece& p, const FieldIntegrator& I) {
    const Masses m = I.integrate_cut(p.cuts, true);
    return {polygon_from_points(p.poly), m.u, m.abs, m.phi, m.grad};
}

struct Side {
    double offset = 0.0;
    Masses left;
};

// Offset with half of the |u|φ mass on n·x <= offset (Illinois on a
// monotone function).
Side balance(const FieldIntegrator& I, const Piece& piece, Point n, double half) {
    double a = std::numeric_limits<double>::infinity(), b = -a;
    for (Point p : piece.poly) {
        a = std::min(a, dot(n, p));
        b = std::max(b, dot(n, p));
    }
    const double scale = b - a;
    auto cuts = piece.cuts;
    cuts.push_back({n, 0.0});
    double fa = -half, fb = half;
    Side best{0.5 * (a + b), {}};
    int side = 0;
    for (int it = 0; it < 100; ++it) {
        double c = (a * fb - b * fa) / (fb - fa);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        cuts.back().c = c;
        const Masses m = I.integrate_cut(cuts);
        const double fc = m.abs - half;
        best = {c, m};
        if (std::abs(fc) <= 1e-14 * half || b - a <= 1e-15 * scale) break;
        if (fc > 0.0) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    return best;
}

// ∫uφ on the balanced side n·x <= offset, centered so that g(α + π) = −g(α).
double defect(const FieldIntegrator& I, const Piece& piece, const Masses& total, double alpha) {
    return balance(I, piece, unit(alpha), 0.5 * total.abs).left.u - 0.5 * total.u;
}

// Illinois iteration on a sign change of g over [a, b].
double refine_root(const std::function<double(double)>& g, double a, double b, double ga, double gb, double tol) {
    int side = 0;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 100 && b - a > 1e-14; ++it) {
        x = (a * gb - b * ga) / (gb - ga);
        if (!(x > a && x < b)) x = 0.5 * (a + b);
        const double gx = g(x);
        if (std::abs(gx) <= tol) break;
        if ((gx > 0.0) == (gb > 0.0)) {
            b = x;
            gb = gx;
            if (side == -1) ga *= 0.5;
            side = -1;
        } else {
            a = x;
            ga = gx;
            if (side == 1) gb *= 0.5;
            side = 1;
        }
    }
    return x;
}

std::pair<Piece, Piece> split_piece(const Piece& p, Point n, double c) {
    Piece left{clip_halfplane(p.poly, n, c), p.cuts}, right{clip_halfplane(p.poly, n * -1.0, -c), p.cuts};
    left.cuts.push_back({n, c});
    right.cuts.push_back({n * -1.0, -c});
    return {std::move(left), std::move(right)};
}

struct PieceSplit {
    Piece first, second;
    Bisection result;
};

PieceSplit bisect_in(const FieldIntegrator& fine, const FieldIntegrator& coarse, const Piece& piece,
                     const EquipartitionOptions& opt) {
    const Masses total = fine.integrate_cut(piece.cuts);
    if (!(total.abs > 0.0)) throw Error(ErrorCode::DomainError, "the |u|phi mass vanishes");
    if (std::abs(total.u) > 1e-8 * total.abs) {
        std::ostringstream os;
        os << "u has phi-weighted mean " << total.u << " against |u| mass " << total.abs;
        throw Error(ErrorCode::DomainError, os.str());
    }
    if (opt.angles < 2) throw Error(ErrorCode::DomainError, "need at least 2 angle samples");
    const int A = opt.angles;
    const double zero_tol = 1e-13 * total.abs;
    auto alpha_of = [&](int i) { return kPi * i / A; };
    auto g_fine = [&](double alpha) { return defect(fine, piece, total, alpha); };

    auto scan = [&](const FieldIntegrator& I, const Masses& tot) {
        return parallel_map<double>(static_cast<std::size_t>(A) + 1, static_cast<unsigned>(opt.threads),
                                    [&](std::size_t i) { return defect(I, piece, tot, alpha_of(static_cast<int>(i))); });
    };
    // Samples in increasing angle that hold a root or start a sign change.
    auto brackets = [&](const std::vector<double>& g, double tol) {
        std::vector<int> out;
        for (int i = 0; i <= A; ++i)
            if (std::abs(g[i]) <= tol || (i < A && (g[i] > 0.0) != (g[i + 1] > 0.0))) out.push_back(i);
        return out;
    };
    // Confirms a bracket with the fine integrator; false when it does not
    // hold up.
    double alpha = 0.0;
    auto confirm = [&](int i) {
        const double a = alpha_of(i);
        const double ga = g_fine(a);
        if (std::abs(ga) <= zero_tol) {
            alpha = a;
            return true;
        }
        if (i == A) return false;
        const double b = alpha_of(i + 1);
        const double gb = g_fine(b);
        if (std::abs(gb) <= zero_tol) {
            alpha = b;
            return true;
        }
        if ((ga > 0.0) == (gb > 0.0)) return false;
        alpha = refine_root(g_fine, a, b, ga, gb, zero_tol);
        return true;
    };

    bool found = false;
    const Masses coarse_total = coarse.integrate_cut(piece.cuts);
    for (int i : brackets(scan(coarse, coarse_total), 1e-12 * coarse_total.abs))
        if ((found = confirm(i))) break;
    if (!found)
        for (int i : brackets(scan(fine, total), zero_tol))
            if ((found = confirm(i))) break;
    if (!found) throw Error(ErrorCode::NoBalancedCut, "no sign change of the zero-mean defect over the angles");

    const Point n = unit(alpha);
    const Side s = balance(fine, piece, n, 0.5 * total.abs);
    auto [left, right] = split_piece(piece, n, s.offset);
    if (left.poly.size() < 3 || right.poly.size() < 3) throw Error(ErrorCode::NoBalancedCut, "cut leaves an empty side");
    Bisection out{piece_cell(left, fine), piece_cell(right, fine), {alpha, n, s.offset}};
    const double mean_err = std::max(std::abs(out.first.mass_u), std::abs(out.second.mass_u)) / total.abs;
    const double mass_err = std::abs(out.first.mass_abs - out.second.mass_abs) / (0.5 * total.abs);
    if (mean_err > 1e-6 || mass_err > 1e-6) {
        std::ostringstream os;
        os << "cut at angle " << alpha << " misses the constraints (mean " << mean_err << ", mass " << mass_err << ")";
        throw Error(ErrorCode::NoBalancedCut, os.str());
    }
    return {std::move(left), std::move(right), std::move(out)};
}

}  // namespace

Bisection bisect_balanced(const ConvexBody2D& body, const ScalarField& field, const EquipartitionOptions& options) {
    const FieldIntegrator fine(body, field, options.grid, options.order);
    const FieldIntegrator coarse(body, field, options.scan_grid, options.scan_order);
    return bisect_in(fine, coarse, Piece{fine.body(), {}}, options).result;
}

std::vector<Cell> equipartition(const ConvexBody2D& body, const ScalarField& field, int depth,
                                const EquipartitionOptions& options) {
    if (depth < 0) throw Error(ErrorCode::DomainError, "depth must be nonnegative");
    const FieldIntegrator fine(body, field, options.grid, options.order);
    std::vector<Piece> level{Piece{fine.body(), {}}};
    if (depth == 0) return {piece_cell(level[0], fine)};
    const FieldIntegrator coarse(body, field, options.scan_grid, options.scan_order);
    EquipartitionOptions inner = options;
    inner.threads = 1;
    std::vector<Cell> cells;
    for (int d = 0; d < depth; ++d) {
        auto halves = parallel_map<PieceSplit>(level.size(), static_cast<unsigned>(options.threads),
                                               [&](std::size_t i) { return bisect_in(fine, coarse, level[i], inner); });
        std::vector<Piece> next;
        cells.clear();
        for (auto& h : halves) {
            next.push_back(std::move(h.first));
            next.push_back(std::move(h.second));
            cells.push_back(std::move(h.result.first));
            cells.push_back(std::move(h.result.second));
        }
        level = std::move(next);
    }
    return cells;
}

PezzettoReport pezzetto_identity(const std::vector<Cell>& cells, const ScalarField& field,
                                 const EquipartitionOptions& options) {
    if (cells.empty()) throw Error(ErrorCode::DomainError, "no cells");
    std::vector<Point> all;
    for (const auto& c : cells) all.insert(all.end(), c.polygon.vertices().begin(), c.polygon.vertices().end());
    const FieldIntegrator I(polygon_from_points(all), field, options.grid, options.order);
    const auto ms = parallel_map<Masses>(cells.size(), static_cast<unsigned>(options.threads),
                                         [&](std::size_t i) { return I.integrate(cells[i].polygon.vertices(), true); });
    PezzettoReport r;
    double G = 0.0, M = 0.0;
    for (const auto& m : ms) {
        G += m.grad;
        M += m.abs;
        r.rhs += m.grad / m.abs;
    }
    const double n = static_cast<double>(cells.size());
    r.rhs /= n;
    r.lhs = G / M;
    r.relative_error = std::abs(r.rhs - r.lhs) / r.lhs;
    for (const auto& m : ms) r.mass_imbalance = std::max(r.mass_imbalance, std::abs(n * m.abs / M - 1.0));
    return r;
}

AreaReport cell_area_report(const std::vector<Cell>& cells) {
    if (cells.empty()) throw Error(ErrorCode::DomainError, "no cells");
    double total = 0.0;
    for (const auto& c : cells) total += c.polygon.area();
    AreaReport r;
    const double n = static_cast<double>(cells.size());
    r.min_fraction = std::numeric_limits<double>::infinity();
    for (const auto& c : cells) {
        r.fractions.push_back(n * c.polygon.area() / total);
        r.min_fraction = std::min(r.min_fraction, r.fractions.back());
    }
    if (!(r.min_fraction > 0.0)) throw Error(ErrorCode::DegenerateInput, "a cell has zero area");
    return r;
}

}  // namespace pfence
