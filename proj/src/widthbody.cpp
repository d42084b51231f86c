#include "pfence/widthbody.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfence {

namespace {

using cplx = std::complex<double>;

// Aliased harmonics beyond M/2 are folded back in up to this multiple of M.
constexpr int kFoldPeriods = 4;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void require_grid(int M) {
    if (M < 4 || M % 2 != 0) throw Error(ErrorCode::GridMismatch, "grid size must be even and at least 4, got " + std::to_string(M));
}

// Exact boundary of the cell model: γ'(t) = r_j (-sin t, cos t) on cell j.
class Chain {
public:
    Chain(const std::vector<double>& r, Point start) : r_(r), M_(static_cast<int>(r.size())), h_(2.0 * kPi / M_) {
        P_.resize(M_ + 1);
        P_[0] = start;
        for (int j = 0; j < M_; ++j) {
            double a = phi(j), b = phi(j + 1);
            P_[j + 1] = P_[j] + Point{std::cos(b) - std::cos(a), std::sin(b) - std::sin(a)} * r_[j];
        }
    }

    double phi(int j) const { return -0.5 * h_ + j * h_; }
    Point at_boundary(int j) const { return P_[j]; }
    Point defect() const { return P_[M_] - P_[0]; }

    void shift(Point d) {
        for (Point& p : P_) p = p + d;
    }

    Point eval(double t) const {
        double s = std::fmod(t - phi(0), 2.0 * kPi);
        if (s < 0.0) s += 2.0 * kPi;
        int j = std::min(M_ - 1, static_cast<int>(s / h_));
        double tt = phi(0) + s;
        double a = phi(j);
        return P_[j] + Point{std::cos(tt) - std::cos(a), std::sin(tt) - std::sin(a)} * r_[j];
    }

private:
    const std::vector<double>& r_;
    int M_;
    double h_;
    std::vector<Point> P_;
};

// D_m = Σ_k r_k e^{-i m θ_k} for m = 0 .. M/2.
std::vector<cplx> half_dft(const std::vector<double>& r) {
    const int M = static_cast<int>(r.size());
    std::vector<double> c(M), s(M);
    for (int k = 0; k < M; ++k) {
        c[k] = std::cos(2.0 * kPi * k / M);
        s[k] = std::sin(2.0 * kPi * k / M);
    }
    std::vector<cplx> D(M / 2 + 1);
    for (int m = 0; m <= M / 2; ++m) {
        double re = 0.0, im = 0.0;
        long idx = 0;
        for (int k = 0; k < M; ++k) {
            re += r[k] * c[idx];
            im -= r[k] * s[idx];
            idx += m;
            if (idx >= M) idx -= M;
        }
        D[m] = {re, im};
    }
    return D;
}

cplx residue(const std::vector<cplx>& D, int M, long n) {
    long m = ((n % M) + M) % M;
    return m <= M / 2 ? D[m] : std::conj(D[M - m]);
}

// w_m = Σ_{n ≡ m (mod M), 2 <= n <= kFoldPeriods·M} sinc²(nh/2)/(1 - n²).
std::vector<double> fold_weights(int M) {
    std::vector<double> w(M, 0.0);
    const double h = 2.0 * kPi / M;
    const long N = static_cast<long>(kFoldPeriods) * M;
    for (long n = 2; n <= N; ++n) {
        double sc = sinc(0.5 * n * h);
        w[n % M] += sc * sc / (1.0 - static_cast<double>(n) * static_cast<double>(n));
    }
    return w;
}

// B(a, b) = 2π Σ_{n ≠ ±1} â_n conj(b̂_n)/(1 - n²) over the folded range.
double bilinear(const std::vector<cplx>& A, const std::vector<cplx>& B, int M) {
    static thread_local int cached_M = 0;
    static thread_local std::vector<double> w;
    if (cached_M != M) {
        w = fold_weights(M);
        cached_M = M;
    }
    double sum = 0.0;
    for (int m = 0; m < M; ++m) {
        if (w[m] == 0.0) continue;
        sum += w[m] * std::real(residue(A, M, m) * std::conj(residue(B, M, m)));
    }
    double M2 = static_cast<double>(M) * M;
    return 2.0 * kPi * (std::real(A[0] * std::conj(B[0])) + 2.0 * sum) / M2;
}

double coverage(double a, double b, double c, double d) {
    double total = 0.0;
    for (double s : {-2.0 * kPi, 0.0, 2.0 * kPi}) total += std::max(0.0, std::min(b, d + s) - std::max(a, c + s));
    return total;
}

double bisect(const std::function<double(double)>& F, double pos, double neg) {
    for (int i = 0; i < 200 && std::abs(pos - neg) > 0.0; ++i) {
        double mid = 0.5 * (pos + neg);
        if (mid == pos || mid == neg) break;
        if (F(mid) > 0.0)
            pos = mid;
        else
            neg = mid;
    }
    return neg;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    out.back() = b;
    return out;
}

void push_unique(std::vector<Point>& out, Point p) {
    if (out.empty() || !(norm(p - out.back()) <= 1e-15)) out.push_back(p);
}

}  // namespace

// ---------------------------------------------------------------------------
// CurvatureFn

CurvatureFn::CurvatureFn(std::vector<double> samples) : r_(std::move(samples)) { require_grid(size()); }

Point CurvatureFn::barycenter() const {
    const int M = size();
    double sx = 0.0, sy = 0.0;
    for (int k = 0; k < M; ++k) {
        sx += r_[k] * std::cos(angle(k));
        sy += r_[k] * std::sin(angle(k));
    }
    return {sx * cell(), sy * cell()};
}

double CurvatureFn::antisymmetry_defect() const {
    const int H = size() / 2;
    double worst = 0.0;
    for (int k = 0; k < H; ++k) worst = std::max(worst, std::abs(r_[k] + r_[k + H] - 1.0));
    return worst;
}

bool CurvatureFn::in_A1(double tol_bary) const {
    try {
        require_A1(tol_bary);
        return true;
    } catch (const Error&) {
        return false;
    }
}

void CurvatureFn::require_A1(double tol_bary) const {
    for (double v : r_)
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::DomainError, "curvature sample outside [0,1]");
    double anti = antisymmetry_defect();
    if (anti > 1e-12) throw Error(ErrorCode::DomainError, "antisymmetry defect " + std::to_string(anti));
    Point b = barycenter();
    if (std::abs(b.x) > tol_bary || std::abs(b.y) > tol_bary)
        throw Error(ErrorCode::ClosureViolation, "barycenter (" + std::to_string(b.x) + ", " + std::to_string(b.y) + ")");
}

// ---------------------------------------------------------------------------

CurvatureFn project_to_A1(const std::vector<double>& raw, double tol, int max_iter) {
    const int M = static_cast<int>(raw.size());
    require_grid(M);
    const int H = M / 2;
    std::vector<double> r(M);
    for (int k = 0; k < M; ++k) {
        if (!std::isfinite(raw[k])) throw Error(ErrorCode::DomainError, "non-finite curvature sample");
        r[k] = std::clamp(raw[k], 0.0, 1.0);
    }
    for (int k = 0; k < H; ++k) {
        double a = 0.5 * (r[k] + 1.0 - r[k + H]);
        r[k] = a;
        r[k + H] = 1.0 - a;
    }
    std::vector<double> c(M), s(M);
    for (int k = 0; k < M; ++k) {
        c[k] = std::cos(2.0 * kPi * k / M);
        s[k] = std::sin(2.0 * kPi * k / M);
    }
    const double h = 2.0 * kPi / M;
    for (int iter = 0; iter <= max_iter; ++iter) {
        double sc = 0.0, ss = 0.0;
        for (int k = 0; k < M; ++k) {
            sc += r[k] * c[k];
            ss += r[k] * s[k];
        }
        if (std::abs(sc * h) <= tol && std::abs(ss * h) <= tol) return CurvatureFn(std::move(r));
        double alpha = sc / H, beta = ss / H;
        for (int k = 0; k < H; ++k) {
            double a = std::clamp(r[k] - alpha * c[k] - beta * s[k], 0.0, 1.0);
            r[k] = a;
            r[k + H] = 1.0 - a;
        }
    }
    throw Error(ErrorCode::ProjectionFailed, "barycenter tolerance not met in " + std::to_string(max_iter) + " iterations");
}

CurvatureFn reuleaux(int n, int grid) {
    if (n < 3 || n % 2 == 0) throw Error(ErrorCode::InvalidOrder, "Reuleaux order must be odd and >= 3, got " + std::to_string(n));
    int L;
    if (grid == 0) {
        L = (kDefaultGrid + 2 * n - 1) / (2 * n);
        if (L % 2 == 0) ++L;
    } else {
        if (grid % (2 * n) != 0 || (grid / (2 * n)) % 2 == 0)
            throw Error(ErrorCode::GridMismatch, "Reuleaux grid must be 2n times an odd number");
        L = grid / (2 * n);
    }
    const int M = 2 * n * L;
    const int period = 2 * L;
    const int q = (L - 1) / 2;
    std::vector<double> r(M);
    for (int k = 0; k < M; ++k) {
        int m = k % period;
        int d = std::min(m, period - m);
        r[k] = d <= q ? 0.0 : 1.0;
    }
    return CurvatureFn(std::move(r));
}

std::vector<Point> reconstruct_boundary(const CurvatureFn& r, Point start, int substeps, double tol_close) {
    if (substeps < 1) throw Error(ErrorCode::DomainError, "substeps must be positive");
    Chain chain(r.samples(), start);
    double defect = norm(chain.defect());
    if (!(defect <= tol_close))
        throw Error(ErrorCode::ClosureViolation, "closure defect " + std::to_string(defect));
    const int M = r.size();
    const double h = r.cell();
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(M) * substeps);
    for (int j = 0; j < M; ++j) {
        out.push_back(chain.at_boundary(j));
        for (int i = 1; i < substeps; ++i) out.push_back(chain.eval(chain.phi(j) + h * i / substeps));
    }
    return out;
}

ConvexBody2D boundary_body(const CurvatureFn& r, int substeps) {
    return polygon_from_points(reconstruct_boundary(r, {}, substeps));
}

SupportFn support_function(const CurvatureFn& r) {
    const int M = r.size();
    const double h = r.cell();
    auto D = half_dft(r.samples());
    auto rhat = [&](long n) { return sinc(0.5 * n * h) / M * residue(D, M, n); };
    SupportFn out;
    out.coeffs.resize(M / 2 + 1);
    for (int n = 0; n <= M / 2; ++n) out.coeffs[n] = (n == 1) ? cplx{} : rhat(n) / (1.0 - double(n) * n);
    // Fold every harmonic up to kFoldPeriods·M onto the grid residues.
    std::vector<cplx> H(M);
    const long N = static_cast<long>(kFoldPeriods) * M;
    for (long n = -N; n <= N; ++n) {
        if (n == 1 || n == -1) continue;
        H[((n % M) + M) % M] += rhat(n) / (1.0 - double(n) * n);
    }
    out.samples.resize(M);
    for (int k = 0; k < M; ++k) {
        double sum = 0.0;
        long idx = 0;
        for (int m = 0; m < M; ++m) {
            double t = 2.0 * kPi * idx / M;
            sum += H[m].real() * std::cos(t) - H[m].imag() * std::sin(t);
            idx += k;
            if (idx >= M) idx -= M;
        }
        out.samples[k] = sum;
    }
    return out;
}

CurvatureFn blaschke_combine(const CurvatureFn& r1, const CurvatureFn& r2, double eps) {
    if (r1.size() != r2.size()) throw Error(ErrorCode::GridMismatch, "curvature grids differ");
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorCode::DomainError, "eps must lie in [0,1]");
    std::vector<double> out(r1.size());
    for (int k = 0; k < r1.size(); ++k) out[k] = (1.0 - eps) * r1[k] + eps * r2[k];
    return CurvatureFn(std::move(out));
}

double volume(const CurvatureFn& r) {
    auto D = half_dft(r.samples());
    return 0.5 * bilinear(D, D, r.size());
}

double volume_shape_derivative(const CurvatureFn& r, const CurvatureFn& phi) {
    if (r.size() != phi.size()) throw Error(ErrorCode::GridMismatch, "curvature grids differ");
    std::vector<double> d(r.size());
    for (int k = 0; k < r.size(); ++k) d[k] = phi[k] - r[k];
    return bilinear(half_dft(r.samples()), half_dft(d), r.size());
}

CurvatureFn lemma_blaschke_profile(double area_E, double area_comp, double theta, int grid) {
    if (!(area_E > 0.0) || !(area_comp > 0.0)) throw Error(ErrorCode::DomainError, "areas must be positive");
    if (!(theta > 0.0 && theta < kPi)) throw Error(ErrorCode::DomainError, "theta must lie in (0, pi)");
    require_grid(grid);
    const double rbar = area_E * area_E / (area_E * area_E + area_comp * area_comp);
    const double h = 2.0 * kPi / grid;
    std::vector<double> r(grid);
    const int H = grid / 2;
    for (int k = 0; k < H; ++k) {
        double a = 2.0 * kPi * k / grid - 0.5 * h, b = a + h;
        double on = coverage(a, b, 0.0, theta) / h;
        double anti = coverage(a, b, kPi, kPi + theta) / h;
        r[k] = 0.5 + (rbar - 0.5) * (on - anti);
        r[k + H] = 1.0 - r[k];
    }
    return CurvatureFn(std::move(r));
}

PerturbResult singular_perturb(const CurvatureFn& r, int xi0_index, double eps, int window_samples) {
    r.require_A1();
    const int M = r.size();
    if (xi0_index < 0 || xi0_index >= M) throw Error(ErrorCode::DomainError, "xi0 index out of range");
    if (!(eps > 0.0)) throw Error(ErrorCode::DomainError, "eps must be positive");
    if (window_samples < 8) throw Error(ErrorCode::DomainError, "window needs at least 8 samples");
    if (!(r[xi0_index] < 1e-3)) throw Error(ErrorCode::NotAZeroPoint, "curvature at xi0 is " + std::to_string(r[xi0_index]));

    std::vector<double> s(M);
    for (int k = 0; k < M; ++k) s[k] = r[(k + xi0_index) % M];
    Chain chain(s, {});
    chain.shift(Point{1.0, 0.0} - chain.eval(0.0));

    auto F = [&](double t) {
        Point g = chain.eval(t);
        return (g.x + eps) * (g.x + eps) + g.y * g.y - 1.0;
    };
    const double quarter = 0.5 * kPi;
    if (!(F(quarter) < 0.0) || !(F(-quarter) < 0.0))
        throw Error(ErrorCode::NoIntersection, "eps too large: no crossing with the shifted unit circle");
    const double Th = bisect(F, 0.0, quarter);
    const double Tt = bisect(F, 0.0, -quarter);
    const Point p = chain.eval(Th), pt = chain.eval(Tt);
    const double th = std::atan2(p.y, p.x + eps);
    const double tt = std::atan2(pt.y, pt.x + eps);
    if (!(th > 0.0 && th < quarter) || !(tt < 0.0 && tt > -quarter) || !(Th < quarter) || !(Tt > -quarter))
        throw Error(ErrorCode::NoIntersection, "crossing angles leave (-pi/2, pi/2)");
    const double om = std::acos(std::cos(th) - eps) - th;
    const Point apex{-eps, 0.0};

    // Angles parametrize t in [Tt, Tt + 2π). Outside the two windows both
    // bodies share the boundary points at the cell boundaries.
    std::vector<double> bounds;
    bounds.reserve(M);
    for (int j = 0; j < M; ++j) {
        double t = chain.phi(j);
        while (t < Tt) t += 2.0 * kPi;
        while (t >= Tt + 2.0 * kPi) t -= 2.0 * kPi;
        bounds.push_back(t);
    }
    std::sort(bounds.begin(), bounds.end());
    auto bounds_in = [&](double a, double b) {
        std::vector<double> out;
        for (double t : bounds)
            if (t > a && t < b) out.push_back(t);
        return out;
    };
    const int W = window_samples;
    // Uniform samples, every cell boundary, and `sub` samples inside each cell
    // (only cells of positive curvature unless `all`).
    auto window = [&](double a, double b, int sub, bool all) {
        std::vector<double> out = linspace(a, b, W);
        const double h = r.cell();
        for (double t : bounds_in(a - h, b)) {
            if (t > a) out.push_back(t);
            int j = static_cast<int>(std::floor((t - chain.phi(0)) / h + 0.5));
            if (!all && s[((j % M) + M) % M] == 0.0) continue;
            for (int i = 1; i < sub; ++i) {
                double u = t + h * i / sub;
                if (u > a && u < b) out.push_back(u);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };

    const Point far_lo = chain.eval(Tt + kPi), far_hi = chain.eval(Th + kPi);
    std::vector<double> win1 = window(Tt, Th, 64, false);
    std::vector<double> win2 = window(Tt + kPi, Th + kPi, 4, true);
    for (double t : linspace(tt + kPi - std::min(4.0 * om, tt - Tt), tt + kPi + std::min(4.0 * om, Th - th), W)) win2.push_back(t);
    std::sort(win2.begin(), win2.end());

    // Caps cut off by the chords p̃p and (far_lo, far_hi); between the chords
    // the two bodies coincide.
    std::vector<Point> cap1, cap1e, cap2, cap2e;
    for (double t : win1) push_unique(cap1, chain.eval(t));
    push_unique(cap1e, pt);
    for (double t : linspace(tt, th, W)) {
        if (t == tt || t == th) continue;
        push_unique(cap1e, Point{-eps + std::cos(t), std::sin(t)});
    }
    push_unique(cap1e, p);
    for (double t : win2) push_unique(cap2, chain.eval(t));
    push_unique(cap2e, far_lo);
    for (double t : win2)
        if (t > Tt + kPi && t < tt + kPi) push_unique(cap2e, pt + unit(t));
    push_unique(cap2e, apex);
    for (double t : win2)
        if (t > th + kPi && t < Th + kPi) push_unique(cap2e, p + unit(t));
    push_unique(cap2e, far_hi);

    std::vector<Point> orig, pert;
    auto append = [](std::vector<Point>& dst, const std::vector<Point>& src) {
        for (Point q : src) push_unique(dst, q);
    };
    append(orig, cap1);
    append(pert, cap1e);
    for (double t : bounds_in(Th, Tt + kPi)) {
        Point g = chain.eval(t);
        push_unique(orig, g);
        push_unique(pert, g);
    }
    append(orig, cap2);
    append(pert, cap2e);
    for (double t : bounds_in(Th + kPi, Tt + 2.0 * kPi)) {
        Point g = chain.eval(t);
        push_unique(orig, g);
        push_unique(pert, g);
    }
    while (orig.size() > 1 && norm(orig.front() - orig.back()) <= 1e-15) orig.pop_back();
    while (pert.size() > 1 && norm(pert.front() - pert.back()) <= 1e-15) pert.pop_back();

    auto cap_area = [](const std::vector<Point>& c) { return c.size() >= 3 ? polygon_area(c) : 0.0; };
    const double both1 = cap_area(convex_intersection(cap1e, cap1));
    const double both2 = cap_area(convex_intersection(cap2e, cap2));

    PerturbResult res;
    res.diag.theta_eps = th;
    res.diag.Theta_eps = Th;
    res.diag.omega_eps = om;
    res.diag.theta_tilde = tt;
    res.diag.Theta_tilde = Tt;
    res.diag.area_gain = std::max(0.0, cap_area(cap1e) - both1) + std::max(0.0, cap_area(cap2e) - both2);
    res.diag.area_loss = std::max(0.0, cap_area(cap1) - both1) + std::max(0.0, cap_area(cap2) - both2);
    std::vector<Point> q = clip_halfplane(clip_halfplane(pert, {1.0, 0.0}, 0.0), {0.0, 1.0}, 0.0);
    res.diag.quarter_gain = q.size() >= 3 ? polygon_area(q) : 0.0;
    const double c = std::cos(om + th);
    res.diag.quarter_gain_closed =
        -c * (std::sin(om + th) - std::sin(th)) + 0.5 * om + 0.25 * (std::sin(2.0 * (om + th)) - std::sin(2.0 * th));
    res.boundary = std::move(pert);
    res.original = std::move(orig);
    return res;
}

CurvatureFn random_A1(std::uint64_t seed, int grid, int max_harmonic, double amplitude) {
    require_grid(grid);
    Rng rng(seed);
    std::vector<double> f(grid, 0.0);
    for (int n = 3; n <= max_harmonic; n += 2) {
        double a = rng.uniform(-1.0, 1.0) / n, b = rng.uniform(-1.0, 1.0) / n;
        for (int k = 0; k < grid; ++k) {
            double t = 2.0 * kPi * k / grid;
            f[k] += a * std::cos(n * t) + b * std::sin(n * t);
        }
    }
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, std::abs(v));
    double scale = peak > 0.0 ? amplitude * rng.uniform(0.1, 1.6) / peak : 0.0;
    std::vector<double> raw(grid);
    for (int k = 0; k < grid; ++k) raw[k] = 0.5 + scale * f[k];
    return project_to_A1(raw);
}

double l1_distance_to_ball(const CurvatureFn& r) {
    double s = 0.0;
    for (double v : r.samples()) s += std::abs(v - 0.5);
    return s * r.cell();
}

}  // namespace pfence
