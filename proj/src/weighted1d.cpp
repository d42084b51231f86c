#include "pfence/weighted1d.hpp"

#include <limits>
#include <sstream>

namespace pfence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit_length(const Weight1D& rho, const char* who) {
    if (std::abs(rho.length() - 1.0) > 1e-15)
        throw Error(ErrorCode::DomainError, std::string(who) + " needs a weight on (0, 1)");
}

// Concave piecewise-linear ψ on [0, 1]: the minimum of a few lines through
// random points at height 1, shifted so that its smaller end value is `base`.
std::function<double(double)> random_concave(Rng& rng) {
    const int lines = 1 + static_cast<int>(rng.below(4));
    std::vector<std::pair<double, double>> ls;  // (anchor, slope)
    for (int i = 0; i < lines; ++i) ls.emplace_back(rng.uniform(), rng.uniform(-3.0, 3.0));
    auto raw = [ls](double x) {
        double v = kInf;
        for (auto [x0, s] : ls) v = std::min(v, 1.0 + s * (x - x0));
        return v;
    };
    const double lo = std::min(raw(0.0), raw(1.0));
    const double base = rng.uniform() < 0.2 ? 1e-3 : rng.uniform(0.02, 1.0);
    const double shift = base - lo;
    return [raw, shift](double x) { return raw(x) + shift; };
}

// Nodes strictly inside (lo, hi) plus the two ends: the infimum of a
// continuous gap over the open range is its minimum over the closure.
std::vector<double> closed_range(const Weight1D& rho, double lo, double hi) {
    std::vector<double> xs{lo};
    for (std::size_t j = 1; j + 1 < rho.size(); ++j) {
        const double x = rho.node(j);
        if (x > lo && x < hi) xs.push_back(x);
    }
    xs.push_back(hi);
    return xs;
}

}  // namespace

Weight1D::Weight1D(std::vector<double> samples, double length) : rho_(std::move(samples)), length_(length) {
    if (rho_.size() < 3) throw Error(ErrorCode::DegenerateInput, "a weight needs at least 3 samples");
    if (!(length_ > 0.0) || !std::isfinite(length_)) throw Error(ErrorCode::DegenerateInput, "length must be positive");
    for (std::size_t j = 0; j < rho_.size(); ++j) {
        const double v = rho_[j];
        const bool end = j == 0 || j + 1 == rho_.size();
        if (!std::isfinite(v) || v < 0.0 || (!end && v == 0.0))
            throw Error(ErrorCode::DegenerateInput, "weight samples must be positive");
    }
    const std::size_t K = rho_.size();
    step_ = length_ / static_cast<double>(K - 1);
    prefix_.assign(K, 0.0);
    suffix_.assign(K, 0.0);
    // Compensated running sums keep the prefix exact to a few ulps at K = 10⁵.
    double sum = 0.0, comp = 0.0;
    auto add = [&](double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
        return sum + comp;
    };
    for (std::size_t j = 1; j < K; ++j) prefix_[j] = add(0.5 * step_ * (rho_[j - 1] + rho_[j]));
    sum = comp = 0.0;
    for (std::size_t j = K - 1; j-- > 0;) suffix_[j] = add(0.5 * step_ * (rho_[j] + rho_[j + 1]));
}

Weight1D Weight1D::sample(const std::function<double(double)>& rho, std::size_t samples, double length) {
    if (samples < 3) throw Error(ErrorCode::DegenerateInput, "a weight needs at least 3 samples");
    std::vector<double> v(samples);
    for (std::size_t j = 0; j < samples; ++j) v[j] = rho(static_cast<double>(j) / static_cast<double>(samples - 1));
    return Weight1D(std::move(v), length);
}

Weight1D Weight1D::product(const std::function<double(double)>& phi, AffinePart h, std::size_t samples) {
    if (!(h.delta > 0.0 && h.delta < 0.5)) throw Error(ErrorCode::DomainError, "affine delta must lie in (0, 1/2)");
    if (!(h(0.0) > 0.0 && h(1.0) > 0.0)) throw Error(ErrorCode::DegenerateInput, "h must be positive");
    Weight1D w = sample([&](double x) { return phi(x) * h(x); }, samples);
    w.affine_ = h;
    return w;
}

Weight1D Weight1D::with_m(int m) const {
    if (m < 1) throw Error(ErrorCode::DomainError, "m must be a positive integer");
    const double inv = 1.0 / m;
    std::vector<double> root(rho_.size());
    double top = 0.0;
    for (std::size_t j = 0; j < rho_.size(); ++j) {
        root[j] = std::pow(rho_[j], inv);
        top = std::max(top, root[j]);
    }
    for (std::size_t j = 1; j + 1 < root.size(); ++j) {
        if (root[j - 1] - 2.0 * root[j] + root[j + 1] > 1e-10 * top) {
            std::ostringstream os;
            os << "rho^(1/" << m << ") is not concave at x = " << node(j);
            throw Error(ErrorCode::DomainError, os.str());
        }
    }
    Weight1D w = *this;
    w.m_ = m;
    return w;
}

Weight1D Weight1D::with_length(double length) const {
    Weight1D w(rho_, length);
    w.m_ = m_;
    w.affine_ = affine_;
    return w;
}

Weight1D Weight1D::normalized() const {
    const double top = *std::max_element(rho_.begin(), rho_.end());
    std::vector<double> v(rho_);
    for (double& x : v) x /= top;
    Weight1D w(std::move(v), length_);
    w.m_ = m_;
    if (affine_) {
        AffinePart h = *affine_;
        h.slope /= top;
        h.intercept /= top;
        w.affine_ = h;
    }
    return w;
}

bool Weight1D::is_normalized() const {
    return std::abs(*std::max_element(rho_.begin(), rho_.end()) - 1.0) <= 1e-12;
}

std::size_t Weight1D::cell(double x, double& u) const {
    const double t = x / step_;
    auto j = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(rho_.size() - 2)));
    u = std::clamp(t - static_cast<double>(j), 0.0, 1.0);
    return j;
}

double Weight1D::value(double x) const {
    double u;
    const std::size_t j = cell(x, u);
    return rho_[j] + (rho_[j + 1] - rho_[j]) * u;
}

double Weight1D::mass_below(double x) const {
    double u;
    const std::size_t j = cell(x, u);
    return prefix_[j] + step_ * u * (rho_[j] + 0.5 * (rho_[j + 1] - rho_[j]) * u);
}

double Weight1D::mass_above(double x) const {
    double u;
    const std::size_t j = cell(x, u);
    const double w = 1.0 - u;
    return suffix_[j + 1] + step_ * w * (rho_[j + 1] + 0.5 * (rho_[j] - rho_[j + 1]) * w);
}

double J_rho(const Weight1D& rho, double x) {
    if (!(x > 0.0 && x < rho.length())) throw Error(ErrorCode::DomainError, "J is defined for interior x only");
    return rho.mass_below(x) * rho.mass_above(x) / (rho.total() * rho.value(x));
}

MaxJ max_J(const Weight1D& rho) {
    const std::size_t K = rho.size();
    std::size_t best = 1;
    double bestJ = -1.0;
    for (std::size_t j = 1; j + 1 < K; ++j) {
        const double v = J_rho(rho, rho.node(j));
        if (v > bestJ) {
            bestJ = v;
            best = j;
        }
    }
    // J is unimodal near the best node; refine on the two adjacent cells.
    double lo = rho.node(best - 1), hi = rho.node(best + 1);
    const double inner = 1e-3 * rho.step();
    lo = std::max(lo, inner);
    hi = std::min(hi, rho.length() - inner);
    constexpr double g = 0.6180339887498949;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = J_rho(rho, c), fd = J_rho(rho, d);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * rho.length(); ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = J_rho(rho, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = J_rho(rho, d);
        }
    }
    MaxJ out{bestJ, rho.node(best)};
    const double x = 0.5 * (lo + hi);
    const double v = J_rho(rho, x);
    if (v > out.value) out = {v, x};
    return out;
}

TwoCut two_cut_oracle(const Weight1D& rho, int n, int threads) {
    if (n < 3) throw Error(ErrorCode::DomainError, "oracle lattice needs n >= 3");
    const double T = rho.total();
    std::vector<double> pos(n - 1), mass(n - 1), val(n - 1);
    for (int i = 1; i < n; ++i) {
        pos[i - 1] = rho.length() * i / n;
        mass[i - 1] = rho.mass_below(pos[i - 1]);
        val[i - 1] = rho.value(pos[i - 1]);
    }
    auto rows = parallel_map<TwoCut>(pos.size(), static_cast<unsigned>(threads), [&](std::size_t i) {
        TwoCut best{kInf, 0.0, 0.0};
        for (std::size_t k = i + 1; k < pos.size(); ++k) {
            const double e = mass[k] - mass[i];
            const double s = T * (val[i] + val[k]) / (2.0 * e * (T - e));
            if (s < best.value) best = {s, pos[i], pos[k]};
        }
        return best;
    });
    TwoCut best{kInf, 0.0, 0.0};
    for (const auto& r : rows)
        if (r.value < best.value) best = r;
    return best;
}

Sigma1D sigma1_1d(const Weight1D& rho, bool check_oracle) {
    const MaxJ mj = max_J(rho);
    Sigma1D out{1.0 / (2.0 * mj.value), mj.x, kInf};
    if (check_oracle) {
        const TwoCut tc = two_cut_oracle(rho);
        out.oracle_value = tc.value;
        if (tc.value < out.value * (1.0 - 1e-9)) {
            std::ostringstream os;
            os.precision(12);
            os << "two cuts (" << tc.a << ", " << tc.b << ") give " << tc.value << " below the single cut "
               << out.value;
            throw Error(ErrorCode::OracleViolation, os.str());
        }
    }
    return out;
}

double max_log_second_difference(const Weight1D& rho) {
    const auto& v = rho.samples();
    double worst = -kInf;
    for (std::size_t j = 1; j + 1 < v.size(); ++j) {
        if (v[j - 1] <= 0.0 || v[j + 1] <= 0.0) continue;
        worst = std::max(worst, std::log(v[j - 1]) - 2.0 * std::log(v[j]) + std::log(v[j + 1]));
    }
    return worst;
}

bool is_log_concave(const Weight1D& rho, double tol) { return max_log_second_difference(rho) <= tol; }

LogConcaveReport logconcave_bound_check(const Weight1D& rho) {
    const double worst = max_log_second_difference(rho);
    if (worst > 1e-10) {
        std::ostringstream os;
        os << "second difference of log rho reaches " << worst;
        throw Error(ErrorCode::NotLogConcave, os.str());
    }
    LogConcaveReport out;
    out.max_margin = -kInf;
    const double L = rho.length();
    for (std::size_t j = 1; j + 1 < rho.size(); ++j) {
        const double x = rho.node(j);
        const double gap = J_rho(rho, x) - x * (L - x) / L;
        if (gap > out.max_margin) {
            out.max_margin = gap;
            out.worst_x = x;
        }
    }
    const auto [lo, hi] = std::minmax_element(rho.samples().begin(), rho.samples().end());
    out.constant = *hi - *lo <= 1e-12 * *hi;
    return out;
}

RefinedMargin refined_margin_ii(const Weight1D& rho, double delta) {
    require_unit_length(rho, "refined_margin_ii");
    if (!rho.affine_part()) throw Error(ErrorCode::DomainError, "refined_margin_ii needs an affine part");
    const AffinePart& h = *rho.affine_part();
    if (!(delta >= h.delta && delta < 0.25)) throw Error(ErrorCode::DomainError, "delta must lie in [affine delta, 1/4)");
    const double hmax = std::max(std::abs(h(delta)), std::abs(h(1.0 - delta)));
    const double c = h.slope * h.slope / (hmax * hmax);
    RefinedMargin out{kInf, 0.0, kInf};
    for (double x : closed_range(rho, 2.0 * delta, 1.0 - 2.0 * delta)) {
        const double gap = x * (1.0 - x) - J_rho(rho, x);
        if (gap < out.base_margin) {
            out.base_margin = gap;
            if (c == 0.0) out.worst_x = x;
        }
        if (c > 0.0 && gap / c < out.lambda) {
            out.lambda = gap / c;
            out.worst_x = x;
        }
    }
    if (!(out.lambda > 0.0)) {
        std::ostringstream os;
        os << "Lambda_hat = " << out.lambda << " at x = " << out.worst_x;
        throw Error(ErrorCode::NonpositiveMargin, os.str());
    }
    return out;
}

RefinedMargin refined_margin_iii(const Weight1D& rho, double delta) {
    require_unit_length(rho, "refined_margin_iii");
    if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorCode::DomainError, "delta must lie in (0, 1/2)");
    if (!rho.m() && !is_log_concave(rho))
        throw Error(ErrorCode::NotLogConcave, "refined_margin_iii needs an m tag or a log-concave weight");
    const double h = rho.step();
    RefinedMargin out{kInf, 0.0, kInf};
    for (double x : closed_range(rho, delta, 1.0 - delta)) {
        const double gap = 0.25 - J_rho(rho, x);
        out.base_margin = std::min(out.base_margin, gap);
        const double q = (rho.value(x + h) - rho.value(x - h)) / (2.0 * h * rho.value(x));
        if (q * q <= 1e-24) {
            if (gap < -1e-12) {
                out.lambda = -kInf;
                out.worst_x = x;
            }
            continue;
        }
        if (gap / (q * q) < out.lambda) {
            out.lambda = gap / (q * q);
            out.worst_x = x;
        }
    }
    if (!(out.lambda > 0.0)) {
        std::ostringstream os;
        os << "Lambda'_hat = " << out.lambda << " at x = " << out.worst_x;
        throw Error(ErrorCode::NonpositiveMargin, os.str());
    }
    return out;
}

Prop1DReport prop1d_check(const Weight1D& rho, double delta0) {
    if (!rho.affine_part()) throw Error(ErrorCode::DomainError, "prop1d_check needs an affine part");
    if (!(delta0 > 0.0 && delta0 < 0.5)) throw Error(ErrorCode::DomainError, "delta0 must lie in (0, 1/2)");
    const AffinePart& h = *rho.affine_part();
    Prop1DReport out;
    out.sigma = sigma1_1d(rho).value;
    const double d = rho.length();
    out.hypothesis_met = out.sigma * d <= 2.5;
    const double hmax = std::max(std::abs(h(delta0)), std::abs(h(1.0 - delta0)));
    out.h_term = h.slope * h.slope / (hmax * hmax);
    const double excess = out.sigma * d - 2.0;
    out.C_tilde = out.h_term > 0.0 ? excess / out.h_term : kInf;
    // With a vanishing h term only σ ≥ 2 is demanded.
    out.passes = !out.hypothesis_met || (out.h_term > 0.0 ? out.C_tilde > 0.0 : excess >= -1e-8);
    return out;
}

double pi_p(double p) {
    if (std::isnan(p) || p <= 1.0) throw Error(ErrorCode::DomainError, "pi_p needs p > 1");
    if (std::isinf(p)) return 2.0;
    // sin(π/p) = sin(π(p−1)/p) keeps full precision as p → 1⁺.
    return 2.0 * kPi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(kPi * (p - 1.0) / p));
}

K0Report K0_constant(const AppendixParams& prm) {
    const double p = prm.p;
    if (std::isnan(p) || p <= 1.0 || std::isinf(p)) throw Error(ErrorCode::DomainError, "K0 needs finite p > 1");
    if (prm.N < 1 || prm.m < 1) throw Error(ErrorCode::DomainError, "N and m must be positive");
    if (!(prm.K_infinity > 0.0) || std::isinf(prm.K_infinity))
        throw Error(ErrorCode::DomainError, "K_infinity must be positive");
    const double N = prm.N, m = prm.m, q = p / (p - 1.0);
    const double ln2 = std::log(2.0);

    const double pip = std::pow(pi_p(p), p) + 1.0;
    const double log_Im = -(m + 1.0) * ln2 - std::log(m + 2.0);  // ∫ min(x,1−x)^{m+1}
    const double log_gamma = std::log(prm.K_infinity) + (m + 1.0) / p * std::log(pip) - log_Im / p;

    K0Report r;
    r.gamma = std::exp(log_gamma);
    const double log_a = -std::log(4.0) - p * log_gamma;
    const double log_s = -(std::log(4.0) + log_gamma) / (p - 1.0);
    const double log_t = (m + 1.0) * (std::log(4.0) + p * log_gamma) + std::log(pip);
    r.a = std::exp(log_a);
    r.log_b0 = std::min(log_a - ln2, q * (std::log(0.5 * (p - 1.0) / p) + log_s - log_t));
    r.log_M = (p - 1.0) * std::log((p - 1.0) / p) +
              std::min(2.0 * r.log_b0 - ln2, r.log_b0 - ln2 + q * log_s);
    r.log_K1 = -ln2 / (p - 1.0) - (m + 1.0) * std::pow(2.0, m + 3.0) * std::exp(p * (m + 2.0) * log_gamma) -
               (2.0 * p * p - p) / (p - 1.0) * log_gamma + r.log_M;
    const double log_kroger = std::log(p + 1.0) + (N + 3.0 * p) / 2.0 * ln2 + (N + p) * std::log(N);
    r.log_K2 = -(N + m) * ln2 - p * std::log(prm.K_infinity) - (N + m) * log_kroger;
    r.log_K0 = r.log_K1 + 2.0 * r.log_K2 - std::log(6.0) - 2.0 * std::log(7.0 * 16.0 * 256.0);

    r.b0 = std::exp(r.log_b0);
    r.M = std::exp(r.log_M);
    r.K1 = std::exp(r.log_K1);
    r.K2 = std::exp(r.log_K2);
    r.K0 = std::exp(r.log_K0);
    r.K_kroger = std::exp(log_kroger);
    return r;
}

Weight1D random_power_concave(Rng& rng, int m, std::size_t samples) {
    auto psi = random_concave(rng);
    return Weight1D::sample([&](double x) { return std::pow(psi(x), m); }, samples).normalized().with_m(m);
}

Weight1D random_log_concave(Rng& rng, std::size_t samples) {
    auto psi = random_concave(rng);
    const double scale = rng.uniform(0.0, 4.0);
    return Weight1D::sample([&](double x) { return std::exp(scale * psi(x)); }, samples).normalized();
}

Weight1D random_affine_product(Rng& rng, int m, double delta, std::size_t samples) {
    auto psi = random_concave(rng);
    AffinePart h{delta, rng.uniform(-0.9, 0.9), 1.0};
    return Weight1D::product([&](double x) { return std::pow(psi(x), m); }, h, samples).normalized();
}

}  // namespace pfence
