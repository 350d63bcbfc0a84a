#pragma once

#include <string>
#include <vector>

#include "curlflux/fields.hpp"

namespace curlflux {

enum class ScanKind { Transversal, Tangential };

/// Maximal function samples over a t grid. Values are suprema over the
/// finite eps grid, hence lower bounds of the true maximal function.
struct MaximalScan {
    ScanKind kind = ScanKind::Transversal;
    std::vector<double> t_grid;
    std::vector<double> eps_grid;
    std::vector<double> two_sided;
    std::vector<double> plus;
    std::vector<double> minus;
    std::vector<bool> infinite;      ///< shell mass does not shrink with eps
    std::vector<double> layer_mass;  ///< mass carried by the layer {t} itself
    double collar_mass = 0.0;        ///< |mu| of the union of all shells used
};

/// Default eps grid 2^-k, k = 2..12.
std::vector<double> default_eps_grid();

/// Mass of mu inside the transversal shell Phi((a, b) x Sigma).
double shell_mass(const CurlMeasure& mu, const BoundaryManifold& manifold, const TransversalCollar& collar, double a,
                  double b, int order = 16);

/// sup_eps |mu|(Phi((t - eps, t + eps) x Sigma)) / eps, with the one-sided
/// variants over (t, t + eps) and (t - eps, t).
MaximalScan maximal_transversal(const CurlMeasure& mu, const BoundaryManifold& manifold,
                                const TransversalCollar& collar, const std::vector<double>& t_grid,
                                const std::vector<double>& eps_grid = default_eps_grid(), int order = 16);

/// Same construction on the tangential collar of Sigma for a surface
/// density |G| (the measure |G| dH^2).
MaximalScan maximal_tangential(const SurfaceField& G, const BoundaryManifold& manifold,
                               const TangentialCollar& collar, const std::vector<double>& t_grid,
                               const std::vector<double>& eps_grid = default_eps_grid());

struct GoodSetReport {
    double lambda = 0.0;
    std::vector<double> good_t;
    double bad_measure = 0.0;  ///< grid estimate of L^1({M > lambda})
    double bound = 0.0;        ///< 10 |mu|(collar) / lambda
    bool holds = true;
};

/// {t : M(t) <= lambda} on a uniform t grid and the weak-(1,1) comparison.
GoodSetReport good_set_scan(const MaximalScan& scan, double lambda);

/// Breakpoints in the tangential collar parameter where a surface field
/// declared with coaxial singular cylinders may jump.
std::vector<double> collar_breaks(const SingularSet& singular, const TangentialCollar& collar);

}  // namespace curlflux
