#include <algorithm>
#include <cmath>

#include "curlflux/stokes.hpp"

namespace curlflux {

namespace {

bool flat(const SurfacePatch& p) { return p.kind == PatchKind::Disk || p.kind == PatchKind::Rect; }

std::pair<Vec3, Vec3> plane_frame(const SurfacePatch& p) {
    if (p.kind == PatchKind::Disk) return {p.e1, p.e2};
    const Vec3 e1 = normalized(p.edge_a);
    return {e1, cross(p.axis, e1)};
}

// Contravariant components (a, b) of a tangent vector: vec = a X_u + b X_v.
std::pair<double, double> contravariant(const SurfacePatch& p, double u, double w, const Vec3& vec) {
    const Vec3 xu = p.Xu(u, w), xv = p.Xv(u, w);
    const double g11 = dot(xu, xu), g12 = dot(xu, xv), g22 = dot(xv, xv);
    const double b1 = dot(vec, xu), b2 = dot(vec, xv);
    const double det = g11 * g22 - g12 * g12;
    return {(b1 * g22 - b2 * g12) / det, (b2 * g11 - b1 * g12) / det};
}

Vec3 eval_v(const ManifoldDivMeasure& d, double u, double w) {
    const auto& p = d.manifold.patch;
    return d.v(p.X(u, w), p.normal(u, w));
}

// Radii of singular circles concentric with a disk patch.
std::vector<double> jump_radii(const SingularSet& s, const SurfacePatch& p) {
    std::vector<double> out;
    if (p.kind != PatchKind::Disk) return out;
    for (const auto& c : s.cylinders) {
        if (norm(cross(normalized(c.axis), p.axis)) > 1e-12) continue;
        const Vec3 off = p.center - c.point;
        if (norm(off - dot(off, p.axis) * p.axis) > 1e-12) continue;
        if (c.radius > p.u0 && c.radius < p.u1) out.push_back(c.radius);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct ParamNode {
    double u, w, weight, h;
};

// Tensor rule over the parameter domain with u-panels split at jump radii.
// Each node carries a difference step that stays inside its panel.
std::vector<ParamNode> param_rule(const SurfacePatch& p, const std::vector<double>& radii, int order) {
    std::vector<double> br{p.u0};
    for (double r : radii)
        if (r - br.back() > 1e-12) br.push_back(r);
    if (p.u1 - br.back() > 1e-12)
        br.push_back(p.u1);
    else
        br.back() = p.u1;
    const Rule1D rw = p.v_periodic ? trapezoid_periodic(4 * order, p.v0, p.v1 - p.v0)
                                   : gauss_legendre(order, p.v0, p.v1);
    std::vector<ParamNode> out;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        const Rule1D ru = gauss_legendre(order, br[k], br[k + 1]);
        for (std::size_t i = 0; i < ru.nodes.size(); ++i) {
            const double u = ru.nodes[i];
            const double room = std::min(u - br[k], br[k + 1] - u);
            const double h = std::min(1e-6 * std::max(1.0, p.u1 - p.u0), 0.3 * room);
            for (std::size_t j = 0; j < rw.nodes.size(); ++j)
                out.push_back({u, rw.nodes[j], ru.weights[i] * rw.weights[j], h});
        }
    }
    return out;
}

}  // namespace

std::vector<Vec3> singular_points_on(const SingularSet& s, const SurfacePatch& p) {
    std::vector<Vec3> out;
    if (!flat(p)) return out;
    for (const Vec3& x : s.points)
        if (p.locate(x, 1e-9)) out.push_back(x);
    const Vec3 n = p.axis;
    for (const auto& ln : s.lines) {
        const double dn = dot(ln.dir, n);
        if (std::fabs(dn) < 1e-12) continue;
        const Vec3 x = ln.point + (dot(p.center - ln.point, n) / dn) * ln.dir;
        if (p.locate(x, 1e-9)) out.push_back(x);
    }
    return out;
}

namespace {

double circle_flux(const ManifoldDivMeasure& d, const Vec3& c, double eps) {
    const auto [e1, e2] = plane_frame(d.manifold.patch);
    const Vec3 nu = d.manifold.patch.normal(0.5 * (d.manifold.patch.u0 + d.manifold.patch.u1), d.manifold.patch.v0);
    const int n = 256;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n;
        const Vec3 rh = std::cos(th) * e1 + std::sin(th) * e2;
        acc += dot(d.v(c + eps * rh, nu), rh);
    }
    return acc * eps * 2.0 * kPi / n;
}

double distance_to_edge(const SurfacePatch& p, const Vec3& x) {
    if (p.kind == PatchKind::Disk) return p.u1 - norm(x - p.center - dot(x - p.center, p.axis) * p.axis);
    const auto uv = p.locate(x, 1e-9);
    if (!uv) return 0.0;
    const double a = norm(p.edge_a), b = norm(p.edge_b);
    return std::min(std::min(uv->first * a, (1.0 - uv->first) * a), std::min(uv->second * b, (1.0 - uv->second) * b));
}

// Dual estimate of |div v| on the hat partition of level L.
double level_mass(const ManifoldDivMeasure& d, int L) {
    const auto& p = d.manifold.patch;
    const int nu = 1 << L;
    const int nv = p.v_periodic ? 4 * nu : nu;
    const double du = (p.u1 - p.u0) / nu, dv = (p.v1 - p.v0) / nv;
    const bool centre = p.polar() && p.u0 == 0.0;
    std::vector<double> act(static_cast<std::size_t>((nu + 1) * (nv + 1)), 0.0);
    double act_centre = 0.0;
    const Rule1D g = gauss_legendre(6, 0.0, 1.0);

    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            for (std::size_t a = 0; a < g.nodes.size(); ++a)
                for (std::size_t b = 0; b < g.nodes.size(); ++b) {
                    const double fu = g.nodes[a], fv = g.nodes[b];
                    const double u = p.u0 + (i + fu) * du, w = p.v0 + (j + fv) * dv;
                    const Vec3 vec = eval_v(d, u, w);
                    if (!is_finite(vec)) continue;
                    const auto [cu, cv] = contravariant(p, u, w, vec);
                    const double wt = g.weights[a] * g.weights[b] * du * dv * p.jacobian(u, w);
                    // Corner hats: B(u) P(v) with B, P linear on the cell.
                    for (int ci = 0; ci < 2; ++ci)
                        for (int cj = 0; cj < 2; ++cj) {
                            const double B = ci ? fu : 1.0 - fu;
                            const double Bp = (ci ? 1.0 : -1.0) / du;
                            const double P = cj ? fv : 1.0 - fv;
                            const double Pp = (cj ? 1.0 : -1.0) / dv;
                            const double contrib = -(Bp * P * cu + B * Pp * cv) * wt;
                            const int ii = i + ci;
                            int jj = j + cj;
                            if (ii == nu) continue;
                            if (ii == 0) {
                                if (centre) act_centre += contrib;
                                continue;
                            }
                            if (p.v_periodic) {
                                jj %= nv;
                            } else if (jj == 0 || jj == nv) {
                                continue;
                            }
                            act[static_cast<std::size_t>(ii * (nv + 1) + jj)] += contrib;
                        }
                }
    double m = std::fabs(act_centre);
    for (double a : act) m += std::fabs(a);
    return m;
}

}  // namespace

double ManifoldDivMeasure::ac_divergence(double u, double w, double h) const {
    const auto& p = manifold.patch;
    auto flux_u = [&](double uu) {
        const auto [a, b] = contravariant(p, uu, w, eval_v(*this, uu, w));
        (void)b;
        return p.jacobian(uu, w) * a;
    };
    auto flux_v = [&](double ww) {
        const auto [a, b] = contravariant(p, u, ww, eval_v(*this, u, ww));
        (void)a;
        return p.jacobian(u, ww) * b;
    };
    const double ua = std::max(p.u0, u - h), ub = std::min(p.u1, u + h);
    double wa = w - h, wb = w + h;
    if (!p.v_periodic) {
        wa = std::max(p.v0, wa);
        wb = std::min(p.v1, wb);
    }
    const double d = (flux_u(ub) - flux_u(ua)) / (ub - ua) + (flux_v(wb) - flux_v(wa)) / (wb - wa);
    return d / p.jacobian(u, w);
}

double ManifoldDivMeasure::action(const ScalarFn& phi, const VectorFn& grad) const {
    (void)phi;
    const auto& p = manifold.patch;
    double acc = 0.0;
    for (const ParamNode& n : param_rule(p, jump_radii(v.singular, p), order)) {
        const Vec3 x = p.X(n.u, n.w);
        const Vec3 nu = p.normal(n.u, n.w);
        const Vec3 vec = v(x, nu);
        if (!is_finite(vec)) continue;
        Vec3 g = grad(x);
        g -= dot(g, nu) * nu;
        acc -= n.weight * p.jacobian(n.u, n.w) * dot(g, vec);
    }
    return acc;
}

double ManifoldDivMeasure::integrate(const ScalarFn& phi) const {
    const auto& p = manifold.patch;
    double acc = 0.0;
    for (const ParamNode& n : param_rule(p, jump_radii(v.singular, p), order)) {
        const double dv = ac_divergence(n.u, n.w, n.h);
        if (!std::isfinite(dv)) continue;
        acc += n.weight * p.jacobian(n.u, n.w) * phi(p.X(n.u, n.w)) * dv;
    }
    for (const DivAtom& a : atoms) acc += a.mass * phi(a.x);
    for (const DivJump& j : jumps) {
        const std::size_t n = j.density.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double th = p.v0 + (p.v1 - p.v0) * static_cast<double>(k) / static_cast<double>(n);
            acc += phi(p.X(j.radius, th)) * j.density[k] * j.radius * (p.v1 - p.v0) / static_cast<double>(n);
        }
    }
    return acc;
}

ManifoldDivMeasure manifold_div_measure(const SurfaceField& v, const BoundaryManifold& manifold, int levels,
                                        double tangential_tol) {
    ManifoldDivMeasure d;
    d.manifold = manifold;
    d.v = v;
    const auto& p = manifold.patch;

    const QuadratureRule q = surface_rule(p, 12, 24);
    for (const auto& [u, w] : q.nodes) {
        const Vec3 nu = p.normal(u, w);
        const Vec3 vec = v(p.X(u, w), nu);
        if (!is_finite(vec)) continue;
        d.tangential_residual = std::max(d.tangential_residual, std::fabs(dot(vec, nu)) / std::max(1.0, norm(vec)));
    }
    if (d.tangential_residual > tangential_tol)
        throw StokesError("manifold_div_measure: field is not tangential (residual " +
                          std::to_string(d.tangential_residual) + ")");

    for (const Vec3& x : singular_points_on(v.singular, p)) {
        const double eps = std::min(1e-3, 0.25 * distance_to_edge(p, x));
        if (!(eps > 0.0)) continue;
        const double f1 = circle_flux(d, x, eps), f2 = circle_flux(d, x, 2 * eps);
        d.atoms.push_back({x, (4.0 * f1 - f2) / 3.0});
    }

    const auto radii = jump_radii(v.singular, p);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        const double gap = std::min(k > 0 ? r - radii[k - 1] : r - p.u0, k + 1 < radii.size() ? radii[k + 1] - r : p.u1 - r);
        if (gap < 1e-9) continue;
        const double eta = std::min(1e-10, 0.25 * gap);
        DivJump j;
        j.radius = r;
        const int n = 4 * d.order;
        for (int i = 0; i < n; ++i) {
            const double th = p.v0 + (p.v1 - p.v0) * i / n;
            const Vec3 rh = p.Xu(r, th);
            j.density.push_back(dot(eval_v(d, r + eta, th), rh) - dot(eval_v(d, r - eta, th), rh));
        }
        d.jumps.push_back(std::move(j));
    }

    for (int L = 1; L <= levels; ++L) d.level_mass.push_back(level_mass(d, L));
    d.mass_bound = d.level_mass.back();
    if (d.level_mass.size() >= 3) {
        const std::size_t n = d.level_mass.size();
        const double inc = d.level_mass[n - 1] - d.level_mass[n - 2];
        const double prev = d.level_mass[n - 2] - d.level_mass[n - 3];
        d.unbounded = inc > 1e-3 * std::max(1.0, d.level_mass[n - 1]) && inc > 0.5 * prev;
    }
    return d;
}

double gauss_green_manifold(const ManifoldDivMeasure& div, const TestFunction& phi) {
    if (div.unbounded) throw StokesError("gauss_green_manifold: divergence mass is not finite");
    const ScalarFn f = phi.value ? phi.value : ScalarFn([](const Vec3&) { return 1.0; });
    const VectorFn g = phi.gradient ? phi.gradient : VectorFn([](const Vec3&) { return Vec3{}; });
    return -div.integrate(f) + div.action(f, g);
}

// ---------------------------------------------------------------------------

double SurfaceBump::value(const Vec3& x) const {
    const double q = 1.0 - norm2(x - center) / (radius * radius);
    return q > 0.0 ? q * q : 0.0;
}

Vec3 SurfaceBump::gradient(const Vec3& x) const {
    const double q = 1.0 - norm2(x - center) / (radius * radius);
    if (q <= 0.0) return {};
    return (-4.0 * q / (radius * radius)) * (x - center);
}

std::vector<SurfaceBump> bump_dictionary(const BoundaryManifold& manifold, int scales) {
    const auto& p = manifold.patch;
    if (!flat(p)) throw StokesError("bump_dictionary: flat patches only");
    std::vector<SurfaceBump> out;
    if (p.kind == PatchKind::Disk) {
        for (int k = 0; k < scales; ++k) {
            const double r = p.u1 * std::ldexp(1.0, -(k + 2));
            for (int m = 0; m * r + r < p.u1 * (1.0 - 1e-12); ++m) {
                const double rho = m * r;
                const int na = m == 0 ? 1 : static_cast<int>(std::floor(2.0 * kPi * rho / r));
                for (int a = 0; a < na; ++a) out.push_back({p.X(rho, p.v0 + 2.0 * kPi * a / na), r});
            }
        }
        return out;
    }
    const double la = norm(p.edge_a), lb = norm(p.edge_b);
    for (int k = 0; k < scales; ++k) {
        const double r = std::min(la, lb) * std::ldexp(1.0, -(k + 2));
        for (int i = 1; i * r + r < la * (1.0 - 1e-12); ++i)
            for (int j = 1; j * r + r < lb * (1.0 - 1e-12); ++j) out.push_back({p.X(i * r / la, j * r / lb), r});
    }
    return out;
}

double bump_integral(const SurfacePatch& patch, const SurfaceBump& b, const ScalarFn& f, int n_r, int n_t,
                     const std::vector<Vec3>& singular) {
    if (!flat(patch)) throw StokesError("bump_integral: flat patches only");
    const auto [e1, e2] = plane_frame(patch);
    const double r = b.radius;
    const Vec3* pole = nullptr;
    for (const Vec3& s : singular)
        if (norm(s - b.center) < r * (1.0 + 1e-12)) pole = &s;

    double acc = 0.0;
    if (!pole) {
        const Rule1D rr = gauss_legendre(n_r, 0.0, r);
        const Rule1D rt = trapezoid_periodic(n_t, 0.0, 2.0 * kPi);
        for (std::size_t i = 0; i < rr.nodes.size(); ++i)
            for (std::size_t j = 0; j < rt.nodes.size(); ++j) {
                const double rho = rr.nodes[i], th = rt.nodes[j];
                const Vec3 x = b.center + rho * (std::cos(th) * e1 + std::sin(th) * e2);
                acc += rr.weights[i] * rt.weights[j] * rho * f(x);
            }
        return acc;
    }
    // Polar coordinates about the singular point; rays end on the support circle.
    const Vec3 q = *pole - b.center;
    const double qa = dot(q, e1), qb = dot(q, e2);
    const double q2 = qa * qa + qb * qb;
    const bool on_edge = q2 >= r * r * (1.0 - 1e-12);
    const double tq = std::atan2(qb, qa);
    const Rule1D rt = on_edge ? gauss_legendre(n_t, tq + 0.5 * kPi, tq + 1.5 * kPi)
                              : trapezoid_periodic(n_t, 0.0, 2.0 * kPi);
    for (std::size_t j = 0; j < rt.nodes.size(); ++j) {
        const double th = rt.nodes[j];
        const double ca = std::cos(th), cb = std::sin(th);
        const double qd = qa * ca + qb * cb;
        const double rho_max = on_edge ? std::max(0.0, -2.0 * qd) : -qd + std::sqrt(qd * qd - (q2 - r * r));
        const Rule1D rr = gauss_legendre(n_r, 0.0, rho_max);
        for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
            const double rho = rr.nodes[i];
            const Vec3 x = *pole + rho * (ca * e1 + cb * e2);
            acc += rr.weights[i] * rt.weights[j] * rho * f(x);
        }
    }
    return acc;
}

TestFunction collar_extension(const SolidRegion& region, int face, const ScalarFn& f, double delta) {
    auto value = [region, face, f, delta](const Vec3& x) {
        const auto cp = region.collar_invert(x);
        if (!cp || cp->face != face || cp->s >= delta) return 0.0;
        return f(cp->y) * cutoff_theta(std::max(cp->s, 0.0) / delta);
    };
    return {value, [value](const Vec3& x) { return fd_gradient(value, x, 1e-6); }};
}

}  // namespace curlflux
