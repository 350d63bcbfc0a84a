#include "curlflux/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curlflux {

std::string to_string(Route r) {
    switch (r) {
        case Route::TangentialLocalizer: return "tangential_localizer";
        case Route::TransversalGaussGreen: return "transversal_gauss_green";
        case Route::MassPairing: return "mass_pairing";
    }
    return "unknown";
}

std::vector<double> default_delta_seq(int j_lo, int j_hi) {
    std::vector<double> d;
    for (int j = j_lo; j <= j_hi; ++j) d.push_back(std::ldexp(1.0, -j));
    return d;
}

namespace {

const ScalarFn kOne = [](const Vec3&) { return 1.0; };

double localizer(const SurfaceField& G, const TangentialCollar& collar, double t, double delta, const ScalarFn& phi,
                 const std::vector<double>& breaks, int n_s, int n_w) {
    if (t + delta > 1.0 + 1e-15) throw StokesError("localizer: layer (t, t + delta) leaves the collar");
    const auto& p = collar.manifold.patch;
    const double integral = collar_layer_integral(
        collar, t, t + delta,
        [&](const LayerPoint& lp) {
            const double f = phi(lp.x);
            if (f == 0.0) return 0.0;
            return f * dot(G(lp.x, p.normal(lp.u, lp.v)), lp.grad_s);
        },
        breaks, n_s, n_w);
    return integral / delta;
}

void check_halvings(const std::vector<double>& d) {
    for (std::size_t k = 0; k + 1 < d.size(); ++k)
        if (std::fabs(d[k] / d[k + 1] - 2.0) > 1e-9)
            throw StokesError("delta sequence must consist of successive halvings");
}

void assess(StokesResult& r, const StokesOptions& opt) {
    const auto& l = r.localizer;
    const std::size_t n_osc = std::min<std::size_t>(4, l.size());
    if (n_osc > 0) {
        const auto [lo, hi] = std::minmax_element(l.end() - static_cast<std::ptrdiff_t>(n_osc), l.end());
        r.t_osc = *hi - *lo;
    }
    const auto table = richardson_table(l, 2);
    if (table.size() < 3 || table[2].size() < 3) {
        r.spread = std::numeric_limits<double>::infinity();
        r.converged = false;
        return;
    }
    r.richardson = table[2];
    const auto& R = r.richardson;
    const auto [lo, hi] = std::minmax_element(R.end() - 3, R.end());
    r.spread = *hi - *lo;
    r.converged = r.spread < opt.spread_tol && r.t_osc < opt.osc_tol;
    if (r.converged) r.extrapolated = -R.back();
}

StokesResult run_sequence(const SurfaceField& G, const TangentialCollar& collar, double t, const ScalarFn& testfn,
                          const StokesOptions& opt, Route route) {
    StokesResult r;
    r.route = route;
    r.deltas = opt.deltas.empty() ? default_delta_seq() : opt.deltas;
    check_halvings(r.deltas);
    const ScalarFn phi = testfn ? testfn : kOne;
    const auto breaks = collar_breaks(G.singular, collar);
    for (double d : r.deltas) r.localizer.push_back(localizer(G, collar, t, d, phi, breaks, opt.n_s, opt.n_w));
    assess(r, opt);
    return r;
}

double patch_diameter(const SurfacePatch& p) {
    double d = 0.0;
    const QuadratureRule q = surface_rule(p, 6, 12);
    const Vec3 c = p.X(0.5 * (p.u0 + p.u1), 0.5 * (p.v0 + p.v1));
    for (const auto& [u, v] : q.nodes) d = std::max(d, norm(p.X(u, v) - c));
    for (double u : {p.u0, p.u1})
        for (double v : {p.v0, p.v1}) d = std::max(d, norm(p.X(u, v) - c));
    return 2.0 * d;
}

}  // namespace

StokesResult stokes_tangential(const SurfaceField& trace, const BoundaryManifold& manifold,
                               const TangentialCollar& collar, double t, const ScalarFn& testfn,
                               const StokesOptions& opt) {
    (void)manifold;
    if (collar.empty) throw StokesError("stokes_tangential: closed manifold has no boundary layer");
    if (!(t >= 0.0 && t < 1.0)) throw StokesError("stokes_tangential: t must lie in [0, 1)");
    return run_sequence(trace, collar, t, testfn, opt, Route::TangentialLocalizer);
}

FluxReport vorticity_flux(const SurfaceField& trace, const BoundaryManifold& manifold, const TangentialCollar& collar,
                          double t, const StokesOptions& opt) {
    FluxReport rep;
    rep.result = stokes_tangential(trace, manifold, collar, t, {}, opt);
    if (!rep.result.converged) throw StokesError("vorticity_flux: delta sequence did not converge");
    rep.flux = *rep.result.extrapolated;

    const auto& p = manifold.patch;
    const Vec3 c = p.X(p.u0, p.v0);
    const double R = patch_diameter(p);
    const ScalarFn cutoff = [c, R](const Vec3& x) { return cutoff_theta(norm(x - c) / (2.0 * R)); };
    const StokesResult alt = stokes_tangential(trace, manifold, collar, t, cutoff, opt);
    if (!alt.converged) throw StokesError("vorticity_flux: delta sequence did not converge for the second cutoff");
    rep.flux_cutoff = *alt.extrapolated;
    rep.cutoff_gap = std::fabs(rep.flux - rep.flux_cutoff);
    return rep;
}

StokesDensity stokes_density(const SurfaceField& trace, const BoundaryManifold& manifold,
                             const TangentialCollar& collar, double t, const Vec3& x0,
                             const std::vector<double>& r_grid, double tol) {
    StokesDensity out;
    out.point = x0;
    out.r_grid = r_grid;
    const BoundaryManifold level = shrink_tangential(manifold, collar, t);
    const Curve& gamma = level.boundary;
    if (gamma.empty()) throw StokesError("stokes_density: manifold has no boundary");
    double length = 0.0;
    {
        const Rule1D rl = line_rule(gamma, 512);
        for (std::size_t i = 0; i < rl.nodes.size(); ++i) length += rl.weights[i] * norm(gamma.dgamma(rl.nodes[i]));
    }
    const auto breaks = collar_breaks(trace.singular, collar);
    for (double r : r_grid) {
        if (!(r > 0.0)) throw StokesError("stokes_density: radii must be positive");
        const ScalarFn bump = [x0, r](const Vec3& x) {
            const double q = 1.0 - norm2(x - x0) / (r * r);
            return q > 0.0 ? q * q : 0.0;
        };
        const int n_w = std::max(64, static_cast<int>(std::ceil(12.0 * length / r)));
        std::vector<double> ell;
        for (int k = 1; k <= 7; ++k) ell.push_back(localizer(trace, collar, t, r * std::ldexp(1.0, -k), bump, breaks, 12, n_w));
        const auto table = richardson_table(ell, 2);
        const double functional = -table[2].back();

        const int n_l = std::max(512, static_cast<int>(std::ceil(40.0 * length / r)));
        const Rule1D rl = line_rule(gamma, n_l);
        double mass = 0.0;
        for (std::size_t i = 0; i < rl.nodes.size(); ++i) {
            const double w = rl.nodes[i];
            mass += rl.weights[i] * bump(gamma.gamma(w)) * norm(gamma.dgamma(w));
        }
        if (!(mass > 0.0)) throw StokesError("stokes_density: x0 is not on the boundary curve");
        out.estimates.push_back(functional / mass);
    }
    const auto& e = out.estimates;
    if (e.size() >= 2 && std::fabs(e[e.size() - 1] - e[e.size() - 2]) < tol) out.limit = e.back();
    return out;
}

double normal_trace_ext(const CurlMeasure& mu, const SolidRegion& region, const TestFunction& phi, int order,
                        int panels) {
    if (!phi.gradient) throw StokesError("normal_trace_ext: test function has no gradient");
    double acc = 0.0;
    visit_measure(mu, region, order, [&](const Vec3& x, double w, const Vec3& d) {
        const Vec3 g = phi.gradient(x);
        if (!is_finite(g)) throw StokesError("normal_trace_ext: gradient unavailable on the support of the measure");
        acc -= w * dot(g, d);
    }, panels);
    return acc;
}

StokesResult stokes_transversal(const VectorField& F, const CurlMeasure& mu, const BoundaryManifold& manifold,
                                const TransversalCollar& collar, double t, const TestFunction& testfn) {
    const MaximalScan scan = maximal_transversal(mu, manifold, collar, {t});
    if (scan.infinite[0])
        throw StokesRefusal("stokes_transversal: maximal function of the curl is infinite at t = " + std::to_string(t) +
                            " (layer mass " + std::to_string(scan.layer_mass[0]) + ")");
    const int face = face_containing(collar.region, manifold.patch);
    const BoundaryManifold shifted = shift_transversal(manifold, collar, t);

    // Interior layerwise trace on the shifted surface.
    SurfaceField v;
    v.name = F.name + "_layer_trace";
    v.singular = F.singular;
    v.eval = [F, collar, face](const Vec3& x, const Vec3& nu) {
        const Vec3 h = collar.h(x, face);
        Vec3 vals[3];
        for (int k = 0; k < 3; ++k) vals[k] = cross(F(x - 1e-3 * std::ldexp(1.0, -k) * h), nu);
        Vec3 out;
        for (int c = 0; c < 3; ++c) out[c] = aitken(vals[0][c], vals[1][c], vals[2][c]);
        return out;
    };

    StokesResult r;
    r.route = Route::TransversalGaussGreen;
    r.maximal_plus = scan.plus[0];
    const ManifoldDivMeasure div = manifold_div_measure(v, shifted);
    r.div_mass = div.mass_bound;
    r.converged = !div.unbounded;
    if (r.converged) r.extrapolated = -gauss_green_manifold(div, testfn);
    return r;
}

PairingMass boundary_pairing_mass(const SurfaceField& G, const BoundaryManifold& manifold,
                                  const TangentialCollar& collar, double t, const ScalarFn& testfn,
                                  const StokesOptions& opt) {
    (void)manifold;
    if (collar.empty) throw StokesError("boundary_pairing_mass: closed manifold has no boundary layer");
    PairingMass out;
    out.pairing_seq = run_sequence(G, collar, t, testfn, opt, Route::MassPairing);
    const auto& R = out.pairing_seq.richardson;
    out.pairing = R.empty() ? out.pairing_seq.localizer.back() : R.back();
    if (!testfn) {
        out.mass = -out.pairing;
    } else {
        const StokesResult one = run_sequence(G, collar, t, {}, opt, Route::MassPairing);
        out.mass = one.richardson.empty() ? -one.localizer.back() : -one.richardson.back();
    }
    return out;
}

MassIndependence mass_representative_independence(const SurfaceField& G1, const SurfaceField& G2,
                                                  const BoundaryManifold& manifold, const TangentialCollar& collar,
                                                  double t, double tol, const StokesOptions& opt) {
    MassIndependence out;
    const auto& p = manifold.patch;
    const Vec3 nu = p.normal(0.5 * (p.u0 + p.u1), p.v0);
    std::vector<Vec3> poles = singular_points_on(G1.singular, p);
    for (const Vec3& x : singular_points_on(G2.singular, p)) poles.push_back(x);
    for (const SurfaceBump& b : bump_dictionary(manifold)) {
        const double a = bump_integral(
            p, b,
            [&](const Vec3& x) {
                const Vec3 g = b.gradient(x);
                if (norm2(g) == 0.0) return 0.0;
                return -dot(g, G1(x, nu) - G2(x, nu));
            },
            24, 48, poles);
        out.precondition_residual = std::max(out.precondition_residual, std::fabs(a));
    }
    if (out.precondition_residual > tol)
        throw StokesError("mass_representative_independence: div(G1 - G2) does not vanish on the dictionary (" +
                          std::to_string(out.precondition_residual) + ")");
    out.mass1 = boundary_pairing_mass(G1, manifold, collar, t, {}, opt).mass;
    out.mass2 = boundary_pairing_mass(G2, manifold, collar, t, {}, opt).mass;
    out.difference = std::fabs(out.mass1 - out.mass2);
    return out;
}

CM1Report vorticity_flux_cm1(const CurlMeasure& mu, const SolidRegion& region, const BoundaryManifold& manifold,
                             const TangentialCollar& collar, double t, const SurfaceField& G, double tol,
                             const StokesOptions& opt) {
    const int face = face_containing(region, manifold.patch);
    if (face < 0) throw StokesError("vorticity_flux_cm1: manifold does not lie on a face of the region");
    CM1Report out;
    const auto& p = manifold.patch;
    const Vec3 nu = p.normal(0.5 * (p.u0 + p.u1), p.v0);
    const double ext_delta = 0.5 * region.collar_width();

    const std::vector<Vec3> poles = singular_points_on(G.singular, p);
    for (const SurfaceBump& b : bump_dictionary(manifold, 2)) {
        const double lhs = bump_integral(
            p, b,
            [&](const Vec3& x) {
                const Vec3 g = b.gradient(x);
                if (norm2(g) == 0.0) return 0.0;
                return -dot(g, G(x, nu));
            },
            24, 48, poles);
        const TestFunction e = collar_extension(region, face, [b](const Vec3& x) { return b.value(x); }, ext_delta);
        const double rhs = normal_trace_ext(mu, region, e, 24);
        out.dictionary_residual = std::max(out.dictionary_residual, std::fabs(lhs - rhs));
    }
    if (out.dictionary_residual > tol)
        throw StokesError("vorticity_flux_cm1: G does not reproduce the normal trace of the curl (" +
                          std::to_string(out.dictionary_residual) + ")");

    const PairingMass pm = boundary_pairing_mass(G, manifold, collar, t, {}, opt);
    if (!pm.pairing_seq.converged) throw StokesError("vorticity_flux_cm1: boundary pairing did not converge");
    out.flux = pm.mass;

    const HeightFunction hf = height_function(manifold, collar, t, std::min(0.125, 0.5 * (1.0 - t)));
    const TestFunction e = collar_extension(region, face, [hf](const Vec3& x) { return hf.value(x); }, ext_delta);
    out.cross_check = normal_trace_ext(mu, region, e, 24);
    return out;
}

// ---------------------------------------------------------------------------

double ValidatorReport::max() const { return std::max(std::max(d1, d2), std::max(d3, d4)); }

ValidatorReport smooth_validators(const VectorField& F, const SolidRegion& region, const TestFunction& phi_in,
                                  const TestVector& G_in, int order) {
    const TestFunction phi =
        phi_in.value ? phi_in
                     : TestFunction{[](const Vec3& x) { return 1.0 + x.x * x.y + x.z * x.z; },
                                    [](const Vec3& x) { return Vec3{x.y, x.x, 2.0 * x.z}; }};
    const TestVector G = G_in.value ? G_in
                                    : TestVector{[](const Vec3& x) { return Vec3{x.y * x.z, x.x * x.x, x.x * x.y * x.z}; },
                                                 [](const Vec3& x) {
                                                     return Vec3{x.x * x.z, x.y - x.y * x.z, 2.0 * x.x - x.z};
                                                 }};
    const VectorFn curlF = F.analytic_curl ? F.analytic_curl : VectorFn([F](const Vec3& x) { return fd_curl(F.eval, x); });

    Vec3 v1, v2;
    double v3 = 0.0, v4 = 0.0;
    const VolumeRule vr = region.volume_rule(order);
    for (std::size_t i = 0; i < vr.x.size(); ++i) {
        const Vec3& x = vr.x[i];
        const double w = vr.w[i];
        const Vec3 f = F(x), c = curlF(x), g = G.value(x), cg = G.curl(x);
        v1 += w * c;
        v2 += w * (phi.value(x) * c - cross(f, phi.gradient(x)));
        v3 += w * (dot(f, cg) - dot(c, g));
        v4 += w * (dot(c, g) - dot(f, cg));
    }
    Vec3 s1, s2;
    double s3 = 0.0, s4 = 0.0;
    for (const SurfacePatch& p : region.boundary) {
        const QuadratureRule q = surface_rule(p, order, 2 * order);
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const auto [u, v] = q.nodes[i];
            const Vec3 x = p.X(u, v), nu = p.normal(u, v);
            const double w = q.weights[i] * p.jacobian(u, v);
            const Vec3 f = F(x), g = G.value(x);
            s1 += w * cross(f, nu);
            s2 += w * phi.value(x) * cross(f, nu);
            s3 += w * dot(cross(f, g), nu);
            s4 += w * dot(cross(f, nu), g);
        }
    }
    ValidatorReport rep;
    rep.d1 = norm(v1 - s1);
    rep.d2 = norm(v2 - s2);
    rep.d3 = std::fabs(v3 - s3);
    rep.d4 = std::fabs(v4 - s4);
    return rep;
}

double faraday_face_check(const EMPair& em, const SurfacePatch& face, int order) {
    const BoundaryManifold m = make_manifold(face);
    const Curve& c = m.boundary;
    std::vector<double> br{c.a};
    for (double k : c.corners) br.push_back(k);
    br.push_back(c.b);
    const Rule1D rl = c.corners.empty() && c.closed ? trapezoid_periodic(4 * order, c.a, c.b - c.a)
                                                    : composite_gauss(br, order);
    double circ = 0.0;
    for (std::size_t i = 0; i < rl.nodes.size(); ++i) {
        const double w = rl.nodes[i];
        circ += rl.weights[i] * dot(em.E(c.gamma(w)), m.tangent(w)) * norm(c.dgamma(w));
    }
    const double flux_curl = -circ;
    const double flux_h = surface_integral(
        face, [&](const Vec3& x) {
            const auto uv = face.locate(x, 1e-9);
            const Vec3 nu = uv ? face.normal(uv->first, uv->second) : face.axis;
            return dot(em.dt_H(x), nu);
        },
        surface_rule(face, order, face.v_periodic ? 2 * order : order));
    return std::fabs(flux_curl + flux_h);
}

RHResidual rankine_hugoniot_check(const VortexSheet& sheet, int order) {
    const PiecewiseField& pf = sheet.field;
    const SurfacePatch& p = pf.interface;
    const VectorFn omega = sheet.curl.sheets.empty() ? VectorFn([](const Vec3&) { return Vec3{}; })
                                                     : sheet.curl.sheets.front().density;
    RHResidual r;
    const QuadratureRule q = surface_rule(p, order, 2 * order);
    for (const auto& [u, v] : q.nodes) {
        const Vec3 x = p.X(u, v), n = p.normal(u, v);
        const Vec3 jump = pf.trace_plus(u, v) - pf.trace_minus(u, v);
        const double jn = dot(jump, n);
        r.normal = std::max(r.normal, std::fabs(jn));
        r.tangential = std::max(r.tangential, norm(jump - jn * n - cross(omega(x), n)));
    }
    return r;
}

}  // namespace curlflux
