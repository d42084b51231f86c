#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pfence/common.hpp"
#include "pfence/convex2d.hpp"

namespace pfence {

/// u and the weight φ on the plane. An empty phi means φ ≡ 1; an empty grad
/// means central differences.
struct ScalarField {
    std::function<double(Point)> u;
    std::function<double(Point)> phi;
    std::function<Point(Point)> grad;
    std::optional<int> m;

    double weight(Point p) const { return phi ? phi(p) : 1.0; }
    Point gradient(Point p, double h) const;
};

/// u = sin(2πx)·sin(2πy), φ ≡ 1.
ScalarField sin_sin_field();

/// n·x <= c.
struct HalfPlane {
    Point n;
    double c = 0.0;
};

struct Masses {
    double u = 0.0;     // ∫ uφ
    double abs = 0.0;   // ∫ |u|φ
    double phi = 0.0;   // ∫ φ
    double grad = 0.0;  // ∫ |∇u|φ, only when requested
};

/// Integrals of the field over convex sub-polygons of a fixed body. The body
/// is covered by a grid of cells whose full integrals are cached; cells cut
/// by a region boundary are clipped and integrated on the fly. Where u
/// changes sign inside a triangle, |u| is integrated on the two sides of the
/// chord joining the edge roots.
class FieldIntegrator {
public:
    FieldIntegrator(const ConvexBody2D& body, ScalarField field, int grid = 48, int order = 5);

    /// Any convex polygon; cost grows with its vertex count.
    Masses integrate(const std::vector<Point>& region, bool with_grad = false) const;
    /// The body intersected with the half-planes.
    Masses integrate_cut(const std::vector<HalfPlane>& cuts, bool with_grad = false) const;
    const ScalarField& field() const { return field_; }
    const std::vector<Point>& body() const { return body_; }

private:
    struct GridCell {
        std::vector<Point> poly;
        Point lo, hi;
        int sign = 0;  // +1/-1 when u keeps one sign on the cell, 0 otherwise
        Masses full;
    };

    Masses integrate_impl(const std::vector<HalfPlane>& hp, Point lo, Point hi, bool with_grad) const;
    Masses polygon_masses(const std::vector<Point>& poly, int sign, bool with_grad) const;
    void triangle(Point a, Point b, Point c, int sign, bool with_grad, int depth, Masses& acc) const;
    void smooth_triangle(Point a, Point b, Point c, int sign, bool with_grad, Masses& acc) const;

    ScalarField field_;
    std::vector<Point> body_;
    std::vector<GridCell> cells_;
    int grid_ = 0;
    Point origin_;
    double cell_w_ = 0.0, cell_h_ = 0.0;
    double grad_step_ = 0.0;
    std::vector<double> gl_x_, gl_w_;  // Gauss-Legendre on [0, 1]
};

struct Cell {
    ConvexBody2D polygon;
    double mass_u = 0.0;
    double mass_abs = 0.0;
    double mass_phi = 0.0;
    double mass_grad = 0.0;
};

/// The splitting line n·x = offset with n = (cos angle, sin angle); the first
/// cell is the side n·x <= offset.
struct Cut {
    double angle = 0.0;
    Point normal;
    double offset = 0.0;
};

struct EquipartitionOptions {
    int grid = 48;
    int order = 5;
    /// Cheaper integrator for the angle scan; brackets are re-checked with
    /// the fine one.
    int scan_grid = 12;
    int scan_order = 3;
    int angles = 720;
    int threads = 0;
};

struct Bisection {
    Cell first;
    Cell second;
    Cut cut;
};

/// Disc kinds are polygonized with 4096 boundary points.
std::vector<Point> body_polygon(const ConvexBody2D& body);

/// Masses of an explicit polygon (no cut search).
Cell make_cell(const std::vector<Point>& polygon, const FieldIntegrator& integrator);

/// Line splitting the body into two cells of equal ∫|u|φ and zero ∫uφ.
/// DomainError when ∫uφ is not zero within 1e-8·∫|u|φ or ∫|u|φ = 0;
/// NoBalancedCut when the angle scan finds no root or the refined cut misses
/// the 1e-6 tolerances.
Bisection bisect_balanced(const ConvexBody2D& body, const ScalarField& field, const EquipartitionOptions& options = {});

/// 2^depth cells by recursive balanced bisection, in depth-first order (so
/// cells 2i and 2i+1 are siblings).
std::vector<Cell> equipartition(const ConvexBody2D& body, const ScalarField& field, int depth,
                                const EquipartitionOptions& options = {});

struct PezzettoReport {
    /// ∫|∇u|φ / ∫|u|φ over the union of the cells.
    double lhs = 0.0;
    /// (1/n) Σ ∫_{Ω_i}|∇u|φ / ∫_{Ω_i}|u|φ.
    double rhs = 0.0;
    double relative_error = 0.0;
    /// max_i |n·M_i/M − 1| for the |u|φ masses M_i.
    double mass_imbalance = 0.0;
};
/// Recomputes all integrals from the cell polygons.
PezzettoReport pezzetto_identity(const std::vector<Cell>& cells, const ScalarField& field,
                                 const EquipartitionOptions& options = {});

struct AreaReport {
    /// min_i n·|Ω_i|/|Ω|.
    double min_fraction = 0.0;
    std::vector<double> fractions;
};
AreaReport cell_area_report(const std::vector<Cell>& cells);

}  // namespace pfence
