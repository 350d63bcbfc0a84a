#pragma once

#include <vector>

#include "curlflux/vec3.hpp"

namespace curlflux {

/// Marker discretization of a vortex sheet X(xi1, xi2) on an n1 x n2 grid,
/// stored row-major (index = i2 * n1 + i1). Periodic sheets repeat with
/// periods (L1, 0, 0) and (0, L2, 0).
struct SheetState {
    int n1 = 0, n2 = 0;
    bool periodic = true;
    double L1 = 1.0, L2 = 1.0;
    std::vector<Vec3> X;
    std::vector<Vec3> gamma;   ///< strength u_tau^+ - u_tau^-
    std::vector<double> weight;  ///< dH^2 weight per marker
    double delta = 0.0;        ///< desingularization
    double time = 0.0;
    bool collided = false;     ///< set by step when markers come closer than delta/10
    double min_distance = 0.0;

    std::size_t size() const { return X.size(); }
};

/// Flat periodic sheet in the plane z = 0 with uniform strength. delta <= 0
/// selects twice the marker spacing.
SheetState make_flat_sheet(int n1, int n2, const Vec3& gamma, double delta = 0.0, double L = 1.0);

/// Periodic sheet z = A sin(2 pi x1) with strength e2.
SheetState make_perturbed_sheet(int n1, int n2, double amplitude, double delta = 0.0);

/// Desingularized Biot-Savart velocity at x, with 3x3 periodic images for
/// periodic sheets. Marker `self` is skipped.
Vec3 br_velocity(const SheetState& sheet, const Vec3& x, long self = -1);

/// Change of the velocity at a marker when the image sum grows from 3x3 to
/// 5x5 copies. Zero for non-periodic sheets.
double image_truncation(const SheetState& sheet, std::size_t marker);

/// Velocities of all markers. Uses `threads` workers (0 reads CURLFLUX_THREADS).
std::vector<Vec3> br_velocities(const SheetState& sheet, int threads = 0);

/// One RK4 step under the sheet velocity plus a uniform background. The
/// strength is carried by the markers and projected back onto the discrete
/// tangent plane afterwards.
SheetState step(const SheetState& sheet, double dt, const Vec3& background = {}, int threads = 0);

struct SheetDiagnostics {
    Vec3 circulation;          ///< sum gamma_i w_i
    double area = 0.0;         ///< sum w_i
    double curvature = 0.0;    ///< max |second difference| / h^2
    double tangential_residual = 0.0;  ///< max |gamma . n| / |gamma|
    double min_distance = 0.0;
};

SheetDiagnostics diagnostics(const SheetState& sheet);

/// Thread count from CURLFLUX_THREADS, at least 1.
int configured_threads();

}  // namespace curlflux
