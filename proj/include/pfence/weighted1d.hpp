#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "pfence/common.hpp"

namespace pfence {

inline constexpr std::size_t kDefaultWeightSamples = 100001;

/// h(ξ) = intercept + slope·ξ in the normalized coordinate ξ = x/length.
struct AffinePart {
    double delta = 0.1;
    double slope = 0.0;
    double intercept = 1.0;

    double operator()(double xi) const { return intercept + slope * xi; }
};

/// Positive weight sampled at K uniform nodes of [0, length]. Between nodes
/// the weight is the linear interpolant, and integrals are exact for it
/// (trapezoidal rule). Zero samples are allowed at the two end nodes only.
class Weight1D {
public:
    explicit Weight1D(std::vector<double> samples, double length = 1.0);

    /// rho is evaluated in the normalized coordinate ξ ∈ [0, 1].
    static Weight1D sample(const std::function<double(double)>& rho,
                           std::size_t samples = kDefaultWeightSamples, double length = 1.0);
    /// ρ = φ·h with h affine on all of [0, 1]; h must be positive there.
    static Weight1D product(const std::function<double(double)>& phi, AffinePart h,
                            std::size_t samples = kDefaultWeightSamples);

    /// Tags the weight as (1/m)-concave; throws DomainError when the discrete
    /// second differences of ρ^{1/m} exceed 1e-10 (relative to its maximum).
    Weight1D with_m(int m) const;
    /// Same samples on [0, length]: R(y) = ρ(y/length·old_length).
    Weight1D with_length(double length) const;
    /// Scaled so that the largest sample is 1. Tags are kept.
    Weight1D normalized() const;

    std::size_t size() const { return rho_.size(); }
    double length() const { return length_; }
    double step() const { return step_; }
    double node(std::size_t j) const { return step_ * static_cast<double>(j); }
    const std::vector<double>& samples() const { return rho_; }
    std::optional<int> m() const { return m_; }
    const std::optional<AffinePart>& affine_part() const { return affine_; }
    bool is_normalized() const;

    double total() const { return prefix_.back(); }
    double value(double x) const;
    /// ∫₀ˣ ρ.
    double mass_below(double x) const;
    /// ∫ₓ^length ρ, computed from the right to avoid cancellation.
    double mass_above(double x) const;

private:
    std::size_t cell(double x, double& u) const;

    std::vector<double> rho_;
    std::vector<double> prefix_;
    std::vector<double> suffix_;
    double length_ = 1.0;
    double step_ = 1.0;
    std::optional<int> m_;
    std::optional<AffinePart> affine_;
};

/// (∫₀ˣρ)(∫ₓρ)/((∫ρ)·ρ(x)); DomainError unless 0 < x < length.
double J_rho(const Weight1D& rho, double x);

struct MaxJ {
    double value = 0.0;
    double x = 0.0;
};
/// Dense node scan followed by golden-section refinement.
MaxJ max_J(const Weight1D& rho);

struct TwoCut {
    double value = 0.0;
    double a = 0.0;
    double b = 0.0;
};
/// Best E = (a, b) with both ends on the interior lattice length·i/n:
/// (∫ρ)(ρ(a)+ρ(b))/(2|E|(∫ρ−|E|)).
TwoCut two_cut_oracle(const Weight1D& rho, int n = 200, int threads = 1);

struct Sigma1D {
    double value = 0.0;
    double cut = 0.0;
    double oracle_value = 0.0;
};
/// σ₁(I, ρ) over single cuts, i.e. 1/(2 max J). When check_oracle is set the
/// two-cut oracle runs too and OracleViolation is thrown if it wins by more
/// than 1e-9 relative.
Sigma1D sigma1_1d(const Weight1D& rho, bool check_oracle = true);

/// Largest discrete second difference of log ρ, skipping zero samples.
double max_log_second_difference(const Weight1D& rho);
bool is_log_concave(const Weight1D& rho, double tol = 1e-10);

struct LogConcaveReport {
    /// max over interior nodes of J(x) − x(length − x)/length.
    double max_margin = 0.0;
    double worst_x = 0.0;
    bool constant = false;
};
/// NotLogConcave when the discrete check fails.
LogConcaveReport logconcave_bound_check(const Weight1D& rho);

struct RefinedMargin {
    /// +∞ when the quantitative term vanishes identically.
    double lambda = 0.0;
    double worst_x = 0.0;
    /// min of the plain gap (x(1−x) − J, or 1/4 − J) over the same range.
    double base_margin = 0.0;
};
/// inf over (2δ, 1−2δ) of (x(1−x) − J)/min_{[δ,1−δ]}(h'/h)², evaluated at
/// the nodes and the two ends.
/// Needs an affine part with affine.delta <= delta and length 1;
/// NonpositiveMargin when the infimum is not positive.
RefinedMargin refined_margin_ii(const Weight1D& rho, double delta);
/// inf over (δ, 1−δ) of (1/4 − J)/(ρ'/ρ)², evaluated like (ii), with ρ' by
/// central differences. Needs an m tag or a discretely log-concave weight, and
/// length 1.
RefinedMargin refined_margin_iii(const Weight1D& rho, double delta);

struct Prop1DReport {
    double sigma = 0.0;
    /// σ·length <= 5/2.
    bool hypothesis_met = false;
    /// min over [δ₀, 1−δ₀] of (h'/h)² in the normalized coordinate.
    double h_term = 0.0;
    /// (σ·length − 2)/h_term; +∞ when h_term is 0.
    double C_tilde = 0.0;
    bool passes = false;
};
/// Needs an affine part. On an interval of length d the report is the
/// rescaled statement σ ≥ 2/d + C̃·d·min(h'/h)² with h' taken in x.
Prop1DReport prop1d_check(const Weight1D& rho, double delta0);

/// 2π(p−1)^{1/p}/(p sin(π/p)); p = +∞ gives 2. DomainError for p <= 1.
double pi_p(double p);

struct AppendixParams {
    double p = 1.5;
    int N = 2;
    int m = 1;
    double K_infinity = 1.0;
};

/// The constants underflow for p near 1, so natural logarithms are kept
/// next to the values.
struct K0Report {
    double K0 = 0.0, log_K0 = 0.0;
    double K1 = 0.0, log_K1 = 0.0;
    double K2 = 0.0, log_K2 = 0.0;
    double gamma = 0.0;
    double M = 0.0, log_M = 0.0;
    double a = 0.0;
    double b0 = 0.0, log_b0 = 0.0;
    double K_kroger = 0.0;
};
K0Report K0_constant(const AppendixParams& params);

/// ψ^m for a random positive concave piecewise-linear ψ, normalized, tagged m.
Weight1D random_power_concave(Rng& rng, int m, std::size_t samples = kDefaultWeightSamples);
/// exp(ψ) for a random concave piecewise-linear ψ, normalized.
Weight1D random_log_concave(Rng& rng, std::size_t samples = kDefaultWeightSamples);
/// φ·h with φ from random_power_concave and h = 1 + s·ξ, |s| <= 0.9.
Weight1D random_affine_product(Rng& rng, int m, double delta, std::size_t samples = kDefaultWeightSamples);

}  // namespace pfence
