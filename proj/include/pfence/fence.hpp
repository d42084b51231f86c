#pragma once

#include <vector>

#include "pfence/common.hpp"
#include "pfence/convex2d.hpp"

namespace pfence {

/// A chord or circular arc joining the boundary points at arc-length
/// parameters s1 and s2. Positive sagitta bulges to the left of s1 -> s2.
struct Fence {
    double s1 = 0.0;
    double s2 = 0.0;
    double sagitta = 0.0;
};

/// E is the region bounded by the boundary from s1 counter-clockwise to s2
/// and the fence.
struct FenceSplit {
    double area_E = 0.0;
    double area_comp = 0.0;
    double fence_length = 0.0;
};

enum class FenceObjective { Sigma1, Mu1 };
const char* to_string(FenceObjective which);

struct FenceResult {
    double value = 0.0;
    /// Oriented so that E is the smaller side.
    Fence fence;
    double area_E = 0.0;
    double area_comp = 0.0;
    double fence_length = 0.0;
    FenceObjective which = FenceObjective::Sigma1;
    /// Acute angles between fence and boundary at the two endpoints; π/2 is
    /// orthogonal contact.
    double contact_angle1 = 0.0;
    double contact_angle2 = 0.0;
};

struct SolverOptions {
    int grid_s = 64;
    /// Sagitta lattice over [-chord/2, chord/2]; odd so that 0 is included.
    int grid_t = 33;
    int starts = 8;
    /// Relative objective decrease below which a sweep counts as stalled.
    double tol = 1e-10;
    int max_sweeps = 200;
    int threads = 0;
};

/// Arc-length parametrized counter-clockwise boundary made of segments and
/// circular arcs.
class BoundaryPath {
public:
    explicit BoundaryPath(const ConvexBody2D& body);

    double length() const { return total_; }
    double area() const { return area_; }
    /// Parameter reduced into [0, length).
    double wrap(double s) const;
    Point point(double s) const;
    /// Unit tangent; at a corner the outgoing one.
    Point tangent(double s) const;
    /// ½∮(x dy - y dx) along the boundary from s1 counter-clockwise to s2.
    double green(double s1, double s2) const;
    /// True when the arc {C + R u : u·m >= cos_half} lies in the body up to tol.
    bool arc_inside(Point C, double R, Point m, double cos_half, double tol) const;
    double scale() const { return scale_; }

private:
    struct Piece {
        bool arc = false;
        Point a, b;      // segment ends
        Point center;    // arc center
        double radius = 0.0;
        double t0 = 0.0; // arc start angle (counter-clockwise)
        double length = 0.0;
    };
    struct Line {
        Point n;
        double c;
    };

    int locate(double s) const;
    double piece_green(const Piece& p, double u0, double u1) const;
    Point piece_point(const Piece& p, double u) const;

    std::vector<Piece> pieces_;
    std::vector<double> start_;  // arc-length offsets
    std::vector<double> prefix_; // green prefix at piece starts
    std::vector<Line> lines_;    // sorted by normal angle
    std::vector<double> line_angle_;
    bool has_circle_ = false;
    Point circle_center_;
    double circle_radius_ = 0.0;
    double total_ = 0.0;
    double area_ = 0.0;
    double scale_ = 1.0;
};

/// Throws InvalidFence when s1 == s2, |sagitta| exceeds half the chord, or
/// the arc leaves the body.
FenceSplit split(const BoundaryPath& path, const Fence& fence);
FenceSplit split(const ConvexBody2D& body, const Fence& fence);

/// |Ω|·L/(2|E||Ω∖E|).
double sigma1_objective(const ConvexBody2D& body, const Fence& fence);
/// L/min(|E|, |Ω∖E|).
double mu1_objective(const ConvexBody2D& body, const Fence& fence);

FenceResult solve_sigma1(const ConvexBody2D& body, const SolverOptions& options = {});
FenceResult solve_mu1(const ConvexBody2D& body, const SolverOptions& options = {});

/// Minimum of sigma1 over resolution × resolution × (resolution/2 + 1)
/// lattice fences, no refinement.
double grid_oracle_sigma1(const ConvexBody2D& body, int resolution, int threads = 0);

/// Counter-clockwise points on the fence from s1 to s2.
std::vector<Point> fence_polyline(const ConvexBody2D& body, const Fence& fence, int segments = 64);

/// σ₁* of the unit-diameter disc cut by a strip of half-width rho.
double truncated_disc_sigma1_exact(double rho);
/// (σ₁ - 2)/ρ² for the unit-diameter truncated disc with ρ = sin(θ)/2.
double truncated_disc_E_theta(double theta);

struct Section5Aux {
    double f = 0.0;
    double g = 0.0;
};
Section5Aux section5_auxiliaries(double theta);

}  // namespace pfence
