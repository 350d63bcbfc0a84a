#pragma once

#include <string>
#include <vector>

#include "curlflux/fields.hpp"

namespace curlflux {

enum class Side { Interior, Exterior };

/// Scalar test function with its gradient (central differences when no
/// gradient is supplied).
struct TestFunction {
    ScalarFn value;
    VectorFn gradient;
};
TestFunction test_function(ScalarFn f, VectorFn grad = {});

/// Vector test function with its curl.
struct TestVector {
    VectorFn value;
    VectorFn curl;
};
TestVector test_vector(VectorFn f, VectorFn curl = {});

struct PairingOptions {
    int order = 24;
    double ambient_radius = 2.0;  ///< ambient ball for exterior pairings
    double exclusion = 0.0;       ///< drop volume nodes this close to the singular set
};

/// int_U phi d(curl F) - int_U F x grad phi dx for the interior side; the
/// exterior side uses the complement of the closure inside the ambient ball
/// with the opposite sign.
Vec3 trace_pairing(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region, const TestFunction& phi,
                   Side side, const PairingOptions& opt = {});

/// int_U psi . d(curl F) - int_U F . curl psi dx (interior side), exterior as above.
double trace_pairing_vector(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region,
                            const TestVector& psi, Side side, const PairingOptions& opt = {});

struct TraceNode {
    Vec3 x;
    Vec3 nu;
    int face = 0;
    Vec3 value;
    bool converged = false;
    double residual = 0.0;  ///< |value . nu|
};

struct TangentialTrace {
    Side side = Side::Interior;
    std::vector<TraceNode> nodes;
    double sup_bound = 0.0;
    double max_residual = 0.0;  ///< over converged nodes
    int non_converged = 0;
};

/// Default layer parameters t_k = 2^-k, k = 4..12.
std::vector<double> default_layer_grid();

/// Per boundary node, F(Phi(t, x)) x nu over the t grid followed by Aitken
/// acceleration. A node converges when the last two accelerated values
/// differ by less than `tol`.
TangentialTrace estimate_trace_layerwise(const VectorField& F, const SolidRegion& region,
                                         const TransversalCollar& collar, const std::vector<double>& t_grid, Side side,
                                         int order = 8, double tol = 1e-6);

struct LayerPairing {
    std::vector<double> eps;
    std::vector<double> values;
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

/// eps -> (1/eps) int_{0 < depth < eps} (F x grad depth) . psi dx,
/// extrapolated over an eps grid of successive halvings.
LayerPairing trace_pairing_via_layers(const VectorField& F, const SolidRegion& region, const VectorFn& psi,
                                      const std::vector<double>& eps_grid, int order = 16, double tol = 1e-4);

struct DefectReport {
    double full = 0.0;        ///< T(psi)
    double tangential = 0.0;  ///< T(psi_tau)
    double defect = 0.0;      ///< |full - tangential|
};

/// Pairing of the extension of psi and of its tangential part psi - (psi . nu) nu.
DefectReport tangentiality_defect(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region,
                                  const VectorFn& psi, double delta = 0.5, const PairingOptions& opt = {});

enum class OrderFlag { OrderZero, OrderOneOnly };

struct TraceDiagnostic {
    std::vector<double> eps;
    std::vector<double> total_variation;
    OrderFlag order_flag = OrderFlag::OrderZero;
    double log_slope = 0.0;       ///< fit tv ~ a + b ln(1/eps)
    double power_exponent = 0.0;  ///< fit tv ~ c eps^-q
};

/// Total variation of F x nu on the boundary outside eps-neighbourhoods of
/// the singular set. Flags order_one_only when the decade increments do not
/// decay (ratio above 0.5).
TraceDiagnostic trace_order_diagnostic(const VectorField& F, const SolidRegion& region,
                                       const std::vector<double>& eps_grid, int order = 24);

std::string to_string(OrderFlag f);

}  // namespace curlflux
