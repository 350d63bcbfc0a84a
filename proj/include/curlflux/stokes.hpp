#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curlflux/selection.hpp"
#include "curlflux/traces.hpp"

namespace curlflux {

struct StokesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by the transversal route when the maximal function is infinite at t.
struct StokesRefusal : StokesError {
    using StokesError::StokesError;
};

enum class Route { TangentialLocalizer, TransversalGaussGreen, MassPairing };
std::string to_string(Route r);

struct StokesOptions {
    std::vector<double> deltas;  ///< empty means 2^-j, j = 2..12
    double spread_tol = 1e-5;    ///< last-three spread of the second Richardson column
    double osc_tol = 0.1;        ///< max - min of the last four raw values
    int n_s = 12;
    int n_w = 64;
};

std::vector<double> default_delta_seq(int j_lo = 2, int j_hi = 12);

/// Localizer values l(delta) = int_Sigma phi trace . grad psi_{t,delta} dH^2
/// and the functional S = -lim l.
struct StokesResult {
    Route route = Route::TangentialLocalizer;
    std::vector<double> deltas;
    std::vector<double> localizer;  ///< l(delta)
    std::vector<double> richardson;  ///< second Richardson column
    double t_osc = 0.0;
    double spread = 0.0;
    bool converged = false;
    std::optional<double> extrapolated;  ///< S, present only when converged
    // Transversal route only.
    double div_mass = 0.0;      ///< dual estimate of |div trace|(Sigma_t)
    double maximal_plus = 0.0;  ///< M^{Phi,+}(curl F)(t)
};

/// Tangential localizer route. `trace` is evaluated with the patch normal.
StokesResult stokes_tangential(const SurfaceField& trace, const BoundaryManifold& manifold,
                               const TangentialCollar& collar, double t, const ScalarFn& testfn = {},
                               const StokesOptions& opt = {});

struct FluxReport {
    double flux = 0.0;         ///< with testfn = 1
    double flux_cutoff = 0.0;  ///< with a compactly supported cutoff equal to 1 near Sigma
    double cutoff_gap = 0.0;
    StokesResult result;
};

/// S(1) on Sigma^{tau,t}, checked against a second cutoff. Throws StokesError
/// when the delta sequence does not converge.
FluxReport vorticity_flux(const SurfaceField& trace, const BoundaryManifold& manifold, const TangentialCollar& collar,
                          double t, const StokesOptions& opt = {});

struct StokesDensity {
    Vec3 point;
    std::vector<double> r_grid;
    std::vector<double> estimates;
    std::optional<double> limit;
};

/// S(phi_r) / int_Gamma phi_r dH^1 for bumps phi_r = (1 - |x - x0|^2/r^2)^2
/// centred at x0 on Gamma^t.
StokesDensity stokes_density(const SurfaceField& trace, const BoundaryManifold& manifold,
                             const TangentialCollar& collar, double t, const Vec3& x0,
                             const std::vector<double>& r_grid, double tol = 1e-2);

/// -int_region grad phi . d mu
double normal_trace_ext(const CurlMeasure& mu, const SolidRegion& region, const TestFunction& phi, int order = 24,
                        int panels = 8);

// ---------------------------------------------------------------------------
// Divergence of tangential fields on a surface.

struct DivAtom {
    Vec3 x;
    double mass = 0.0;
};

/// Jump of the radial component across a circle concentric with a disk patch.
struct DivJump {
    double radius = 0.0;
    std::vector<double> density;  ///< [v . n] at equally spaced angles, n pointing outward
};

struct ManifoldDivMeasure {
    BoundaryManifold manifold;
    SurfaceField v;
    double tangential_residual = 0.0;
    std::vector<DivAtom> atoms;
    std::vector<DivJump> jumps;
    std::vector<double> level_mass;  ///< dual estimates on refining hat partitions
    double mass_bound = 0.0;         ///< last entry of level_mass
    bool unbounded = false;          ///< level increments do not decay
    int order = 16;

    /// Absolutely continuous part of div_tau v at parameters (u, w), by
    /// central differences of step h in parameter space.
    double ac_divergence(double u, double w, double h = 1e-6) const;
    /// -int grad_tau phi . v dH^2 (phi compactly supported in Sigma).
    double action(const ScalarFn& phi, const VectorFn& grad) const;
    /// int phi d(div_tau v) with the decomposition a.c. + atoms + jumps.
    double integrate(const ScalarFn& phi) const;
};

/// Builds the divergence measure of a tangential field. Rejects fields whose
/// normal component exceeds `tangential_tol` relative to their size.
ManifoldDivMeasure manifold_div_measure(const SurfaceField& v, const BoundaryManifold& manifold, int levels = 6,
                                        double tangential_tol = 1e-3);

/// -int phi d(div_tau v) - int grad_tau phi . v dH^2
double gauss_green_manifold(const ManifoldDivMeasure& div, const TestFunction& phi);

/// Transversal route. Refuses with StokesRefusal when M^{Phi}(curl F)(t) is infinite.
StokesResult stokes_transversal(const VectorField& F, const CurlMeasure& mu, const BoundaryManifold& manifold,
                                const TransversalCollar& collar, double t, const TestFunction& testfn = {});

// ---------------------------------------------------------------------------
// Boundary pairings for surface fields.

/// Radial quartic bump (1 - |x - c|^2/r^2)^2 on a flat patch.
struct SurfaceBump {
    Vec3 center;
    double radius = 0.0;
    double value(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
};

/// Bumps at `scales` dyadic radii whose supports stay inside the patch.
std::vector<SurfaceBump> bump_dictionary(const BoundaryManifold& manifold, int scales = 3);

/// int over the bump support of f, on a flat patch. When one of `singular`
/// lies in the support, the polar rule is centred there instead.
double bump_integral(const SurfacePatch& patch, const SurfaceBump& b, const ScalarFn& f, int n_r = 24, int n_t = 48,
                     const std::vector<Vec3>& singular = {});

/// Declared singular points on a flat patch: isolated points and crossings
/// of singular lines.
std::vector<Vec3> singular_points_on(const SingularSet& s, const SurfacePatch& p);

/// f(foot(x)) theta(depth(x)/delta) near one face of the region, 0 elsewhere.
TestFunction collar_extension(const SolidRegion& region, int face, const ScalarFn& f, double delta);

struct PairingMass {
    StokesResult pairing_seq;
    double pairing = 0.0;
    double mass = 0.0;
};

PairingMass boundary_pairing_mass(const SurfaceField& G, const BoundaryManifold& manifold,
                                  const TangentialCollar& collar, double t, const ScalarFn& testfn = {},
                                  const StokesOptions& opt = {});

struct MassIndependence {
    double mass1 = 0.0;
    double mass2 = 0.0;
    double difference = 0.0;
    double precondition_residual = 0.0;  ///< max |<div(G1 - G2), phi_i>| over the dictionary
};

MassIndependence mass_representative_independence(const SurfaceField& G1, const SurfaceField& G2,
                                                  const BoundaryManifold& manifold, const TangentialCollar& collar,
                                                  double t, double tol = 1e-6, const StokesOptions& opt = {});

struct CM1Report {
    double flux = 0.0;         ///< mass route
    double cross_check = 0.0;  ///< normal_trace_ext with an extended localizer
    double dictionary_residual = 0.0;
};

/// Flux through Sigma^{tau,t} for a field given with an explicit L^1
/// representative G of its trace. Sigma must lie on a face of the region.
CM1Report vorticity_flux_cm1(const CurlMeasure& mu, const SolidRegion& region, const BoundaryManifold& manifold,
                             const TangentialCollar& collar, double t, const SurfaceField& G, double tol = 1e-4,
                             const StokesOptions& opt = {});

// ---------------------------------------------------------------------------
// Smooth-case checks.

struct ValidatorReport {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d4 = 0.0;
    double max() const;
};

/// Residuals of the four integration-by-parts identities on a region with
/// inner normals. Default test data are low-degree polynomials.
ValidatorReport smooth_validators(const VectorField& F, const SolidRegion& region, const TestFunction& phi = {},
                                  const TestVector& G = {}, int order = 24);

/// |-oint E . tau + int dt_H . nu| over a patch with its boundary curve.
double faraday_face_check(const EMPair& em, const SurfacePatch& face, int order = 48);

struct RHResidual {
    double normal = 0.0;
    double tangential = 0.0;
};

RHResidual rankine_hugoniot_check(const VortexSheet& sheet, int order = 16);

}  // namespace curlflux
