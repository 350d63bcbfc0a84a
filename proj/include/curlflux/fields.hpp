#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "curlflux/geometry.hpp"
#include "curlflux/region.hpp"

namespace curlflux {

struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Declared singular support of a field. Used for quadrature exclusion and
/// for breakpoints of layer integrals; never detected from samples.
struct SingularSet {
    struct Line {
        Vec3 point;
        Vec3 dir;
    };
    struct Plane {
        Vec3 point;
        Vec3 normal;
    };
    /// Circular cylinder {dist(x, axis) = radius}.
    struct Cylinder {
        Vec3 point;
        Vec3 axis;
        double radius;
    };
    std::vector<Vec3> points;
    std::vector<Line> lines;
    std::vector<Plane> planes;
    std::vector<Cylinder> cylinders;

    bool empty() const { return points.empty() && lines.empty() && planes.empty() && cylinders.empty(); }
    double distance(const Vec3& x) const;
};

struct VectorField {
    std::string name;
    VectorFn eval;
    VectorFn analytic_curl;  ///< absolutely continuous part of the curl, if known
    double p = std::numeric_limits<double>::infinity();  ///< integrability exponent
    SingularSet singular;

    Vec3 operator()(const Vec3& x) const { return eval(x); }
};

struct SheetPart {
    SurfacePatch patch;
    VectorFn density;  ///< with respect to surface measure
};

struct LinePart {
    Curve curve;
    VectorFn density;  ///< with respect to arclength
};

/// curl F = density dx + sum of sheet parts + sum of line parts.
struct CurlMeasure {
    VectorFn lebesgue;  ///< empty means zero
    std::vector<SheetPart> sheets;
    std::vector<LinePart> lines;

    bool zero() const { return !lebesgue && sheets.empty() && lines.empty(); }
};

/// Tangential field on a surface. The callback receives the point and the
/// surface normal there so that traces F x nu can be written directly.
struct SurfaceField {
    std::string name;
    std::function<Vec3(const Vec3& x, const Vec3& nu)> eval;
    SingularSet singular;

    Vec3 operator()(const Vec3& x, const Vec3& nu) const { return eval(x, nu); }
};

/// x -> F(x) x nu.
SurfaceField trace_field(const VectorField& F);
/// Surface field that ignores the normal.
SurfaceField surface_field(std::string name, VectorFn G, SingularSet singular = {});

struct CatalogField {
    VectorField field;
    CurlMeasure curl;
    bool has_curl = true;  ///< false for trace-only entries
    SurfaceField trace;    ///< set for trace-only entries
};

const std::vector<std::string>& catalog_names();

/// Closed-form fields: newtonian, line_vortex, annuli, rigid_rotation,
/// oscillating_gradient, plane_wave_em. Throws FieldError on unknown names.
CatalogField catalog(const std::string& name);

/// Central-difference curl. Throws FieldError when the stencil comes within
/// 2h of the declared singular set.
Vec3 numeric_curl(const VectorField& field, const Vec3& x, double h = 1e-5);

/// Calls g(x, weight, density) for every quadrature node of mu inside the
/// open region. Sheets and lines are clipped against the region by bisection.
/// Each clipped line or sheet piece is split into `panels` equal panels.
void visit_measure(const CurlMeasure& mu, const SolidRegion& region, int order,
                   const std::function<void(const Vec3&, double, const Vec3&)>& g, int panels = 1);

/// Sheet and line parts only, clipped against an arbitrary open set given
/// by its indicator. `samples` controls the bisection seeding per line.
void visit_singular_parts(const CurlMeasure& mu, const std::function<bool(const Vec3&)>& inside, int order,
                          const std::function<void(const Vec3&, double, const Vec3&)>& g, int samples = 64,
                          int panels = 1);

/// int_region testfn . d mu
double integrate_measure(const CurlMeasure& mu, const VectorFn& testfn, const SolidRegion& region, int order = 24);

/// int_region phi d mu (vector valued)
Vec3 integrate_measure_scalar(const CurlMeasure& mu, const ScalarFn& phi, const SolidRegion& region,
                              int order = 24);

/// |mu|(region)
double total_variation(const CurlMeasure& mu, const SolidRegion& region, int order = 24);

/// Field glued across an interface. The plus side is the side the interface
/// normal points to.
struct PiecewiseField {
    SurfacePatch interface;
    VectorField plus, minus;
    double offset = 1e-6;  ///< one-sided trace offset along the normal

    /// +1 or -1 for the two sides, 0 on the interface surface itself.
    int side(const Vec3& x) const;
    Vec3 eval(const Vec3& x) const;
    Vec3 trace_plus(double u, double v) const;
    Vec3 trace_minus(double u, double v) const;
    VectorField as_field() const;
};

struct VortexSheet {
    PiecewiseField field;
    CurlMeasure curl;
};

/// Sheet density n x (u+ - u-) on the interface plus the interior curls.
/// Interfaces must be planar (disk, rectangle) or spherical caps.
VortexSheet make_vortex_sheet(const VectorField& u_plus, const VectorField& u_minus, const SurfacePatch& interface);

/// |curl u+|(region on + side) + |curl u-|(region on - side) + int |jump| over
/// the interface inside the region.
double gluing_total_variation(const PiecewiseField& field, const SolidRegion& region, int order = 32);

/// Integral of f over {x in region : keep(x)} along lines parallel to axis.
/// Line ends are found by bisection, so sets bounded by planes across the
/// axis are integrated without staircase error.
double clipped_volume_integral(const SolidRegion& region, const ScalarFn& f, const std::function<bool(const Vec3&)>& keep,
                               const Vec3& axis, int order = 32);

/// Convolution with the normalized radial bump of radius delta.
VectorField mollify(const VectorField& field, double delta, int n_radial = 6, int n_polar = 6, int n_azimuth = 12);

/// Electric field, its curl and the time derivative of the magnetic field.
struct EMPair {
    VectorFn E;
    VectorFn curl_E;
    VectorFn dt_H;
};

/// E = (0, f(x1 - t), 0), H = (0, 0, f(x1 - t)) with f = sin(2 pi s).
EMPair plane_wave_em(double time);

/// Trigonometric sum E with analytic curl and dt_H := -curl E.
EMPair random_em_pair(std::uint64_t seed, int n_modes = 4);

}  // namespace curlflux
