#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curlflux/geometry.hpp"

namespace curlflux {

enum class RegionKind { Ball, HalfBall, Cylinder, Box, CollarShell };

/// Volume quadrature in physical coordinates.
struct VolumeRule {
    std::vector<Vec3> x;
    std::vector<double> w;
};

/// Shell node: point, weight, and the gradient of the collar depth there.
struct ShellRule {
    std::vector<Vec3> x;
    std::vector<double> w;
    std::vector<Vec3> grad_depth;
};

/// Point of the closed collar neighbourhood written as x = Phi(s, y).
struct CollarPoint {
    double s;    ///< depth (collar parameter)
    Vec3 y;      ///< foot point on the boundary
    int face;    ///< index into SolidRegion::boundary
};

/// Canonical solid regions.
///
/// Spherical family (ball, half-ball, collar shell): points with
/// r_inner < |x - center| < radius and colatitude (about +z) in
/// (colat_lo, colat_hi). Flat faces sit at colatitude pi/2.
/// Cylinder: |x' - center'| < radius, z0 < z < z1 with axis e3.
/// Box: lo < x < hi componentwise.
struct SolidRegion {
    RegionKind kind = RegionKind::Ball;
    std::string name;
    Vec3 center{};
    double radius = 1.0;
    double r_inner = 0.0;
    double colat_lo = 0.0, colat_hi = kPi;
    double z0 = 0.0, z1 = 1.0;
    Vec3 lo{-1, -1, -1}, hi{1, 1, 1};
    std::vector<SurfacePatch> boundary;  ///< inner normals

    bool contains(const Vec3& x, double tol = 0.0) const;

    /// Depth below the boundary in the collar coordinates (min over faces
    /// for edged regions, radial for boxes).
    double depth(const Vec3& x) const;
    Vec3 depth_gradient(const Vec3& x) const;

    /// Index of the face whose depth is smallest at x.
    int nearest_face(const Vec3& x) const;

    /// Transversal unit field h on face `face` at boundary point y.
    Vec3 transversal_field(const Vec3& y, int face) const;

    /// Inverse collar map for points within the collar neighbourhood.
    std::optional<CollarPoint> collar_invert(const Vec3& x) const;

    /// Largest depth for which the collar map stays inside the region.
    double collar_width() const;

    VolumeRule volume_rule(int order) const;

    /// Quadrature of the set {0 < depth < eps}, split along the faces so
    /// every piece is smooth.
    ShellRule shell_rule(double eps, int order) const;

    /// Regions tiling B(center, ambient_radius) minus the closure of this
    /// region (spherical family only).
    std::vector<SolidRegion> complement_in(double ambient_radius) const;

    /// Sum of boundary areas (for diagnostics).
    double boundary_area() const;
};

SolidRegion make_ball(const Vec3& center, double radius);
SolidRegion make_half_ball(const Vec3& center, double radius, bool upper = true);
SolidRegion make_spherical_sector(const Vec3& center, double r_inner, double r_outer, double colat_lo,
                                  double colat_hi);
SolidRegion make_cylinder(const Vec3& base_center, double radius, double z0, double z1);
SolidRegion make_box(const Vec3& lo, const Vec3& hi);

/// Phi(t, x) = x - t h(x), with h transversal to the boundary.
struct TransversalCollar {
    SolidRegion region;
    double kappa = 0.0;
    bool injective = true;  ///< on the sampled (t, x) grid, per face

    Vec3 h(const Vec3& y) const;
    Vec3 h(const Vec3& y, int face) const { return region.transversal_field(y, face); }
    Vec3 phi(double t, const Vec3& y) const { return y - t * h(y); }
    Vec3 phi(double t, const Vec3& y, int face) const { return y - t * h(y, face); }
};

TransversalCollar build_transversal_collar(const SolidRegion& region);

/// Sigma^{Phi,t} = Phi(t, Sigma). Canonical faces map to canonical patches;
/// others become generic patches.
BoundaryManifold shift_transversal(const BoundaryManifold& manifold, const TransversalCollar& collar, double t);

/// Index of the region face containing the whole manifold patch, or -1.
int face_containing(const SolidRegion& region, const SurfacePatch& patch);

// ---------------------------------------------------------------------------
// Extension of boundary data into the region.

/// theta: 1 on [0, 1/2], quintic smoothstep down to 0 on [1/2, 1].
double cutoff_theta(double t);
double cutoff_theta_prime(double t);

/// Normalized radial bump (1 - |z|^2)^3 on the unit disk / unit ball.
double mollifier2(double r);
double mollifier3(double r);

struct BoundaryExtension {
    SolidRegion region;
    double delta = 0.1;
    ScalarFn f;  ///< boundary data, evaluated at boundary points
    int n_radial = 6;
    int n_angular = 12;

    double value(const Vec3& x) const;
    Vec3 gradient(const Vec3& x, double h = 1e-6) const;
    /// Mollified boundary data at foot point y and depth s, before the cutoff.
    double mollified(const Vec3& y, int face, double s) const;
};

/// Report of the gradient bound check on a sample of the shell.
struct ExtensionReport {
    double grad_sup = 0.0;
    double tangential_grad_sup = 0.0;
    double f_sup = 0.0;
    double constant = 0.0;  ///< grad_sup / (tangential_grad_sup + f_sup / delta)
};

BoundaryExtension extend_boundary_function(const SolidRegion& region, ScalarFn f, double delta);

ExtensionReport extension_gradient_report(const BoundaryExtension& ext, int order = 6);

/// Componentwise extension of vector boundary data.
struct VectorExtension {
    SolidRegion region;
    double delta = 0.1;
    VectorFn f;
    int n_radial = 6;
    int n_angular = 12;

    Vec3 value(const Vec3& x) const;
    Vec3 curl(const Vec3& x, double h = 1e-6) const;
};

VectorExtension extend_boundary_vector(const SolidRegion& region, const VectorFn& f, double delta);

}  // namespace curlflux
