#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pfence/common.hpp"
#include "pfence/convex2d.hpp"

namespace pfence {

/// Curvature function of a unit-width body sampled on the uniform grid
/// θ_k = 2πk/M. Sample k is the constant density of the surface area measure
/// on the cell [θ_k - π/M, θ_k + π/M], so the reconstructed body is a closed
/// chain of circular arcs.
class CurvatureFn {
public:
    CurvatureFn() = default;
    /// No class checks; M must be even.
    explicit CurvatureFn(std::vector<double> samples);

    int size() const { return static_cast<int>(r_.size()); }
    double operator[](int k) const { return r_[k]; }
    const std::vector<double>& samples() const { return r_; }
    double angle(int k) const { return 2.0 * kPi * k / size(); }
    double cell() const { return 2.0 * kPi / size(); }

    /// (2π/M) Σ r_k (cos θ_k, sin θ_k).
    Point barycenter() const;
    /// max_k |r_k + r_{k+M/2} - 1|.
    double antisymmetry_defect() const;
    bool in_A1(double tol_bary = 1e-10) const;
    /// Throws DomainError (range, antisymmetry) or ClosureViolation (barycenter).
    void require_A1(double tol_bary = 1e-10) const;

private:
    std::vector<double> r_;
};

struct SupportFn {
    /// h(θ_k) on the curvature grid.
    std::vector<double> samples;
    /// ĥ_n for n = 0 .. M/2; ĥ_{-n} = conj(ĥ_n).
    std::vector<std::complex<double>> coeffs;
};

struct PerturbDiagnostics {
    double theta_eps = 0.0;
    double Theta_eps = 0.0;
    double omega_eps = 0.0;
    double area_gain = 0.0;
    double area_loss = 0.0;
    /// Mirror solution on the other side of ξ0; both angles are negative.
    double theta_tilde = 0.0;
    double Theta_tilde = 0.0;
    /// |Ω_ε ∩ {x <= 0, y <= 0}| measured on the polygon, and the same area
    /// from the arc integral in closed form.
    double quarter_gain = 0.0;
    double quarter_gain_closed = 0.0;
};

struct PerturbResult {
    /// Counter-clockwise boundary of Ω_ε in the frame where ξ0 = (1,0) and
    /// the point of Ω opposite to x0 = (1,0) is the origin.
    std::vector<Point> boundary;
    /// The unperturbed body in the same frame, sampled on the same angles
    /// outside the replaced windows.
    std::vector<Point> original;
    PerturbDiagnostics diag;
};

inline constexpr int kDefaultGrid = 4096;

/// Clamp, symmetrize, then remove the first harmonic and re-clamp until the
/// barycenter is below tol.
CurvatureFn project_to_A1(const std::vector<double>& raw, double tol = 1e-10, int max_iter = 1000);

/// Regular Reuleaux n-gon of width 1 with a vertex whose normal cone is
/// centered on θ = 0. With grid = 0 the least M >= 4096 of the form 2n·odd is
/// used, which makes every arc an exact union of cells.
CurvatureFn reuleaux(int n, int grid = 0);

/// γ at the cell boundaries θ_k - π/M, starting from `start`, each cell
/// subdivided into `substeps` exact arc samples.
std::vector<Point> reconstruct_boundary(const CurvatureFn& r, Point start = {}, int substeps = 1,
                                        double tol_close = 1e-8);
/// Reconstructed boundary as a convex polygon body (duplicates at corners
/// removed).
ConvexBody2D boundary_body(const CurvatureFn& r, int substeps = 1);

SupportFn support_function(const CurvatureFn& r);
CurvatureFn blaschke_combine(const CurvatureFn& r1, const CurvatureFn& r2, double eps);
double volume(const CurvatureFn& r);
double volume_shape_derivative(const CurvatureFn& r, const CurvatureFn& phi);

/// r̄ = E²/(E²+C²) on (0, θ), 1 - r̄ on the antipodal arc (π, π+θ), 1/2
/// elsewhere; cells crossing an arc end get the coverage-weighted average.
/// Returned without barycenter projection.
CurvatureFn lemma_blaschke_profile(double area_E, double area_comp, double theta, int grid = kDefaultGrid);

PerturbResult singular_perturb(const CurvatureFn& r, int xi0_index, double eps, int window_samples = 256);

/// 1/2 + random odd harmonics of order >= 3, projected onto the class.
CurvatureFn random_A1(std::uint64_t seed, int grid = kDefaultGrid, int max_harmonic = 15, double amplitude = 0.5);

/// (2π/M) Σ |r_k - 1/2|.
double l1_distance_to_ball(const CurvatureFn& r);

}  // namespace pfence
