#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "curlflux/quadrature.hpp"
#include "curlflux/vec3.hpp"

namespace curlflux {

/// Raised when an operation is called outside its admissible parameter range.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Regularity { Lipschitz, C1, C2 };

enum class PatchKind {
    Disk,          ///< polar: u = radius, v = angle
    Cap,           ///< polar on a sphere: u = colatitude, v = longitude
    Rect,          ///< planar parallelogram, u, v in [0,1]
    CylinderSide,  ///< u = height along the axis, v = angle
    Generic        ///< user map; derivatives by finite differences
};

/// Parametrized surface piece X(u,v) over a rectangular parameter domain.
///
/// The normal is sign * (X_u x X_v)/|X_u x X_v|. Canonical kinds have
/// closed-form derivatives and an inverse (`locate`).
struct SurfacePatch {
    PatchKind kind = PatchKind::Disk;
    Vec3 center{};
    Vec3 e1{1, 0, 0}, e2{0, 1, 0}, axis{0, 0, 1};
    double radius = 1.0;
    Vec3 edge_a{1, 0, 0}, edge_b{0, 1, 0};
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 2.0 * kPi;
    bool v_periodic = true;
    int normal_sign = 1;
    Regularity regularity = Regularity::C2;
    std::function<Vec3(double, double)> map;  // Generic only
    bool polar_layout = false;                 // Generic: boundary at u = u1 like polar kinds

    Vec3 X(double u, double v) const;
    Vec3 Xu(double u, double v) const;
    Vec3 Xv(double u, double v) const;
    Vec3 normal(double u, double v) const;
    double jacobian(double u, double v) const;

    /// Tangential gradient of a function with parameter derivatives (fu, fv).
    Vec3 tangential_gradient(double u, double v, double fu, double fv) const;

    /// Parameters of x when x lies on the patch within `tol` (absolute).
    std::optional<std::pair<double, double>> locate(const Vec3& x, double tol = 1e-9) const;

    /// Polar kinds carry their boundary at u = u1.
    bool polar() const {
        return kind == PatchKind::Disk || kind == PatchKind::Cap || (kind == PatchKind::Generic && polar_layout);
    }
};

SurfacePatch make_disk(const Vec3& center, const Vec3& normal, double radius, double inner_radius = 0.0);
SurfacePatch make_cap(const Vec3& center, double radius, const Vec3& pole, double colat_max,
                      bool inward_normal, double colat_min = 0.0);
SurfacePatch make_sphere(const Vec3& center, double radius, bool inward_normal);
SurfacePatch make_rect(const Vec3& origin, const Vec3& a, const Vec3& b, int normal_sign = 1);
SurfacePatch make_cylinder_side(const Vec3& base_center, const Vec3& axis, double radius, double z0,
                                double z1, bool inward_normal);
SurfacePatch make_generic_patch(std::function<Vec3(double, double)> map, double u0, double u1, double v0,
                                double v1, bool v_periodic, int normal_sign = 1);

/// Default product rule: Gauss-Legendre in u, trapezoid in periodic v.
QuadratureRule surface_rule(const SurfacePatch& patch, int nu, int nv);

/// Like surface_rule, with u-panels graded geometrically from u0.
QuadratureRule surface_rule_graded(const SurfacePatch& patch, double first_panel, int n_per_panel, int nv);

/// sum_i w_i f(X(u_i,v_i)) J(u_i,v_i). Throws GeometryError naming the node
/// on a non-finite integrand value.
double surface_integral(const SurfacePatch& patch, const ScalarFn& integrand, const QuadratureRule& rule);
double surface_integral(const SurfacePatch& patch, const ScalarFn& integrand, int nu = 32, int nv = 64);

/// Parametrized curve gamma(w), w in [a, b].
struct Curve {
    std::function<Vec3(double)> gamma;
    std::function<Vec3(double)> dgamma;
    double a = 0.0, b = 0.0;
    bool closed = false;
    std::vector<double> corners;  ///< parameters where gamma has kinks
    bool empty() const { return !gamma || !(b > a); }
};

Curve make_circle(const Vec3& center, const Vec3& e1, const Vec3& e2, double radius);
Curve make_segment(const Vec3& p0, const Vec3& p1);

/// Rule on the curve parameter: trapezoid when closed, Gauss-Legendre otherwise.
Rule1D line_rule(const Curve& c, int n);

double line_integral(const Curve& c, const ScalarFn& integrand, const Rule1D& rule);
double line_integral(const Curve& c, const ScalarFn& integrand, int n = 256);

/// Patch together with its boundary curve, inward conormal and tangent
/// tau = nu x nu_Gamma.
struct BoundaryManifold {
    SurfacePatch patch;
    Curve boundary;  ///< empty for closed surfaces

    bool closed() const { return boundary.empty(); }
    Vec3 conormal(double w) const;
    Vec3 tangent(double w) const;
    Vec3 surface_normal_at_boundary(double w) const;
};

/// Boundary data for polar patches and rectangles; closed spheres get an
/// empty boundary. Annular disks are rejected.
BoundaryManifold make_manifold(const SurfacePatch& patch);

/// Collar parameter s in [0,1] on the patch (0 on the boundary curve),
/// together with the curve map Psi(t, w).
struct TangentialCollar {
    BoundaryManifold manifold;
    double theta = 2.0;         ///< comparability constant used, at least 2
    double theta_fitted = 1.0;  ///< measured on the sample grid
    bool empty = false;         ///< closed manifold

    Vec3 psi(double t, double w) const;
    double s_of(double u, double v) const;
    /// Tangential gradient of s at parameters (u, v).
    Vec3 grad_s(double u, double v) const;
    /// Parameter u of the collar layer s on polar patches.
    double u_of_s(double s) const;
};

TangentialCollar build_tangential_collar(const BoundaryManifold& manifold);

/// Sigma with the collar layer (0, t] removed.
BoundaryManifold shrink_tangential(const BoundaryManifold& manifold, const TangentialCollar& collar, double t);

/// Localizer psi: 0 where s <= t, (s - t)/delta on the ramp, 1 beyond.
struct HeightFunction {
    TangentialCollar collar;
    double t = 0.0;
    double delta = 0.1;

    double value_param(double u, double v) const;
    Vec3 gradient_param(double u, double v) const;
    double value(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
};

HeightFunction height_function(const BoundaryManifold& manifold, const TangentialCollar& collar, double t,
                               double delta);

/// Integral of g over the collar layer {s_lo < s < s_hi}. The callback gets
/// the point, parameters and tangential gradient of s. `breaks` are extra
/// s-values where the integrand may jump.
struct LayerPoint {
    Vec3 x;
    double u, v, s;
    Vec3 grad_s;
};
double collar_layer_integral(const TangentialCollar& collar, double s_lo, double s_hi,
                             const std::function<double(const LayerPoint&)>& g,
                             const std::vector<double>& breaks = {}, int n_s = 12, int n_w = 64);

/// H^2 area of the collar layer {t < s < t + delta}.
double collar_layer_area(const TangentialCollar& collar, double t, double delta);

}  // namespace curlflux
