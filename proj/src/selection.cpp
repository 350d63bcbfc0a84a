#include "curlflux/selection.hpp"

#include <algorithm>
#include <cmath>

namespace curlflux {

namespace {

int manifold_face(const TransversalCollar& collar, const BoundaryManifold& manifold) {
    const int f = face_containing(collar.region, manifold.patch);
    if (f < 0) throw GeometryError("transversal scan: manifold is not contained in a face of the region");
    return f;
}

// Absolutely continuous part over the shell, written as (u, v, s) -> X(u,v) - s h.
double lebesgue_shell_mass(const VectorFn& density, const SurfacePatch& p, const TransversalCollar& collar, int face,
                           double a, double b, int order) {
    const QuadratureRule q = surface_rule(p, order, 2 * order);
    const Rule1D rs = gauss_legendre(order, a, b);
    auto map = [&](double u, double v, double s) {
        const Vec3 y = p.X(u, v);
        return y - s * collar.h(y, face);
    };
    const double hu = 1e-6 * std::max(1.0, p.u1 - p.u0);
    const double hv = 1e-6 * std::max(1.0, p.v1 - p.v0);
    double total = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const auto [u, v] = q.nodes[i];
        const double ua = std::max(p.u0, u - hu), ub = std::min(p.u1, u + hu);
        const double va = std::max(p.v0, v - hv), vb = std::min(p.v1, v + hv);
        for (std::size_t k = 0; k < rs.nodes.size(); ++k) {
            const double s = rs.nodes[k];
            const Vec3 du = (map(ub, v, s) - map(ua, v, s)) / (ub - ua);
            const Vec3 dv = (map(u, vb, s) - map(u, va, s)) / (vb - va);
            const Vec3 ds = -collar.h(p.X(u, v), face);
            const double jac = std::fabs(dot(cross(du, dv), ds));
            total += q.weights[i] * rs.weights[k] * norm(density(map(u, v, s))) * jac;
        }
    }
    return total;
}

double singular_mass(const CurlMeasure& mu, const std::function<bool(const Vec3&)>& inside, int order, int samples) {
    double total = 0.0;
    visit_singular_parts(
        mu, inside, order, [&](const Vec3&, double w, const Vec3& d) { total += w * norm(d); }, samples);
    return total;
}

// Shell membership through the inverse collar map: same face, foot in Sigma,
// depth strictly between a and b.
std::function<bool(const Vec3&)> shell_indicator(const BoundaryManifold& manifold, const TransversalCollar& collar,
                                                 int face, double a, double b) {
    return [&manifold, &collar, face, a, b](const Vec3& x) {
        const auto cp = collar.region.collar_invert(x);
        if (!cp || cp->face != face) return false;
        if (!(cp->s > a && cp->s < b)) return false;
        return manifold.patch.locate(cp->y, 1e-9).has_value();
    };
}

double max_extent(const CurlMeasure& mu) {
    double len = 1.0;
    for (const auto& ln : mu.lines) len = std::max(len, norm(ln.curve.gamma(ln.curve.b) - ln.curve.gamma(ln.curve.a)));
    for (const auto& sh : mu.sheets) {
        const auto& p = sh.patch;
        len = std::max(len, norm(p.X(p.u1, p.v0) - p.X(p.u0, p.v0)));
    }
    return len;
}

int seed_samples(const CurlMeasure& mu, double width) {
    const double n = std::ceil(8.0 * max_extent(mu) / width);
    return static_cast<int>(std::clamp(n, 64.0, 200000.0));
}

}  // namespace

std::vector<double> default_eps_grid() {
    std::vector<double> g;
    for (int k = 2; k <= 12; ++k) g.push_back(std::ldexp(1.0, -k));
    return g;
}

double shell_mass(const CurlMeasure& mu, const BoundaryManifold& manifold, const TransversalCollar& collar, double a,
                  double b, int order) {
    if (!(b > a)) return 0.0;
    const int face = manifold_face(collar, manifold);
    double total = 0.0;
    if (mu.lebesgue) total += lebesgue_shell_mass(mu.lebesgue, manifold.patch, collar, face, a, b, order);
    const auto inside = shell_indicator(manifold, collar, face, a, b);
    // Sheets meet thin shells along wide pieces, so a coarser seeding suffices.
    if (!mu.sheets.empty()) {
        CurlMeasure sheets;
        sheets.sheets = mu.sheets;
        total += singular_mass(sheets, inside, order, std::min(4096, seed_samples(sheets, b - a)));
    }
    if (!mu.lines.empty()) {
        CurlMeasure lines;
        lines.lines = mu.lines;
        total += singular_mass(lines, inside, order, seed_samples(lines, b - a));
    }
    return total;
}

MaximalScan maximal_transversal(const CurlMeasure& mu, const BoundaryManifold& manifold,
                                const TransversalCollar& collar, const std::vector<double>& t_grid,
                                const std::vector<double>& eps_grid, int order) {
    if (eps_grid.empty()) throw GeometryError("maximal_transversal: empty eps grid");
    const int face = manifold_face(collar, manifold);
    MaximalScan scan;
    scan.kind = ScanKind::Transversal;
    scan.t_grid = t_grid;
    scan.eps_grid = eps_grid;
    const double e_min = *std::min_element(eps_grid.begin(), eps_grid.end());
    const double e_max = *std::max_element(eps_grid.begin(), eps_grid.end());

    for (double t : t_grid) {
        double two = 0.0, plus = 0.0, minus = 0.0;
        for (double e : eps_grid) {
            const double mp = shell_mass(mu, manifold, collar, t, t + e, order);
            const double mm = shell_mass(mu, manifold, collar, t - e, t, order);
            const double layer = shell_mass(mu, manifold, collar, t - e, t + e, order);
            two = std::max(two, layer / e);
            plus = std::max(plus, mp / e);
            minus = std::max(minus, mm / e);
        }
        // A shell mass that does not shrink with eps means an atom on the layer.
        const double m1 = shell_mass(mu, manifold, collar, t - e_min, t + e_min, order);
        const double m2 = shell_mass(mu, manifold, collar, t - 2 * e_min, t + 2 * e_min, order);
        scan.infinite.push_back(m1 > 1e-14 && m1 > 0.75 * m2);
        scan.two_sided.push_back(two);
        scan.plus.push_back(plus);
        scan.minus.push_back(minus);

        double layer_mass = 0.0;
        if (!mu.sheets.empty()) {
            auto on_layer = [&](const Vec3& x) {
                const auto cp = collar.region.collar_invert(x);
                return cp && cp->face == face && std::fabs(cp->s - t) <= 1e-12 &&
                       manifold.patch.locate(cp->y, 1e-9).has_value();
            };
            CurlMeasure sheets_only;
            sheets_only.sheets = mu.sheets;
            layer_mass = singular_mass(sheets_only, on_layer, order, 64);
        }
        scan.layer_mass.push_back(layer_mass);
    }
    if (!t_grid.empty()) {
        const auto [lo, hi] = std::minmax_element(t_grid.begin(), t_grid.end());
        scan.collar_mass = shell_mass(mu, manifold, collar, *lo - e_max, *hi + e_max, order);
    }
    return scan;
}

std::vector<double> collar_breaks(const SingularSet& singular, const TangentialCollar& collar) {
    std::vector<double> out;
    if (collar.empty) return out;
    const auto& p = collar.manifold.patch;
    if (p.kind != PatchKind::Disk) return out;
    const Vec3 n = p.normal(0.5 * (p.u0 + p.u1), p.v0);
    for (const auto& c : singular.cylinders) {
        if (norm(cross(normalized(c.axis), n)) > 1e-12) continue;
        const Vec3 off = p.center - c.point;
        if (norm(off - dot(off, n) * n) > 1e-12) continue;
        if (c.radius > p.u0 && c.radius < p.u1) out.push_back((p.u1 - c.radius) / (p.u1 - p.u0));
    }
    for (const auto& x : singular.points) {
        const auto uv = p.locate(x, 1e-12);
        if (uv) out.push_back(collar.s_of(uv->first, uv->second));
    }
    std::sort(out.begin(), out.end());
    return out;
}

MaximalScan maximal_tangential(const SurfaceField& G, const BoundaryManifold& manifold,
                               const TangentialCollar& collar, const std::vector<double>& t_grid,
                               const std::vector<double>& eps_grid) {
    if (eps_grid.empty()) throw GeometryError("maximal_tangential: empty eps grid");
    MaximalScan scan;
    scan.kind = ScanKind::Tangential;
    scan.t_grid = t_grid;
    scan.eps_grid = eps_grid;
    const auto breaks = collar_breaks(G.singular, collar);
    const auto& p = manifold.patch;
    auto mass = [&](double a, double b) {
        return collar_layer_integral(
            collar, a, b, [&](const LayerPoint& lp) { return norm(G(lp.x, p.normal(lp.u, lp.v))); }, breaks);
    };
    const double e_min = *std::min_element(eps_grid.begin(), eps_grid.end());
    const double e_max = *std::max_element(eps_grid.begin(), eps_grid.end());
    for (double t : t_grid) {
        double two = 0.0, plus = 0.0, minus = 0.0;
        for (double e : eps_grid) {
            two = std::max(two, mass(t - e, t + e) / e);
            plus = std::max(plus, mass(t, t + e) / e);
            minus = std::max(minus, mass(t - e, t) / e);
        }
        const double m1 = mass(t - e_min, t + e_min);
        const double m2 = mass(t - 2 * e_min, t + 2 * e_min);
        scan.infinite.push_back(m1 > 1e-14 && m1 > 0.75 * m2);
        scan.two_sided.push_back(two);
        scan.plus.push_back(plus);
        scan.minus.push_back(minus);
        scan.layer_mass.push_back(0.0);
    }
    if (!t_grid.empty()) {
        const auto [lo, hi] = std::minmax_element(t_grid.begin(), t_grid.end());
        scan.collar_mass = mass(*lo - e_max, *hi + e_max);
    }
    return scan;
}

GoodSetReport good_set_scan(const MaximalScan& scan, double lambda) {
    if (!(lambda > 0.0)) throw GeometryError("good_set_scan: lambda must be positive");
    GoodSetReport rep;
    rep.lambda = lambda;
    const auto& t = scan.t_grid;
    const double cell = t.size() > 1 ? (t.back() - t.front()) / static_cast<double>(t.size() - 1) : 0.0;
    int bad = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const bool is_bad = scan.infinite[i] || scan.two_sided[i] > lambda;
        if (is_bad)
            ++bad;
        else
            rep.good_t.push_back(t[i]);
    }
    rep.bad_measure = bad * std::fabs(cell);
    rep.bound = 10.0 * scan.collar_mass / lambda;
    rep.holds = rep.bad_measure <= rep.bound;
    return rep;
}

}  // namespace curlflux
