#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "curlflux/vec3.hpp"

namespace curlflux {

/// One-dimensional rule on a reference interval.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;  ///< polynomial degree integrated exactly
};

/// Gauss-Legendre rule with n nodes on [a, b]. Exact for degree 2n-1.
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre over consecutive breakpoints.
Rule1D composite_gauss(const std::vector<double>& breaks, int n_per_panel);

/// Composite rule on [a, b] with panels that grow geometrically away from a.
/// Used for integrands with an endpoint singularity of type 1/(u - a).
Rule1D graded_gauss(double a, double b, double first_panel, int n_per_panel);

/// Periodic trapezoid rule on [a, a + period) with n nodes.
Rule1D trapezoid_periodic(int n, double a, double period);

/// Two-parameter rule over a patch parameter domain.
struct QuadratureRule {
    std::vector<std::pair<double, double>> nodes;
    std::vector<double> weights;
    int order = 0;
};

QuadratureRule tensor_rule(const Rule1D& ru, const Rule1D& rv);

double integrate(const Rule1D& r, const std::function<double(double)>& f);

/// Central-difference gradient of a scalar function.
Vec3 fd_gradient(const ScalarFn& f, const Vec3& x, double h = 1e-5);

/// Central-difference curl of a vector function.
Vec3 fd_curl(const VectorFn& F, const Vec3& x, double h = 1e-5);

/// Central-difference divergence of a vector function.
double fd_divergence(const VectorFn& F, const Vec3& x, double h = 1e-5);

/// Repeated Richardson elimination for a sequence sampled at step ratio 2
/// with an error expansion in integer powers of the step. Row k of the
/// returned table eliminates the first k powers.
std::vector<std::vector<double>> richardson_table(const std::vector<double>& seq, int levels);

/// Aitken delta-squared on the last three entries; falls back to the last
/// entry when the second difference vanishes.
double aitken(double a0, double a1, double a2);

}  // namespace curlflux
