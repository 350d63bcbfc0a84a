#include "curlflux/traces.hpp"

#include <algorithm>
#include <cmath>

namespace curlflux {

TestFunction test_function(ScalarFn f, VectorFn grad) {
    TestFunction t;
    t.value = f;
    if (grad) {
        t.gradient = std::move(grad);
    } else {
        t.gradient = [f](const Vec3& x) { return fd_gradient(f, x, 1e-5); };
    }
    return t;
}

TestVector test_vector(VectorFn f, VectorFn curl) {
    TestVector t;
    t.value = f;
    if (curl) {
        t.curl = std::move(curl);
    } else {
        t.curl = [f](const Vec3& x) { return fd_curl(f, x, 1e-5); };
    }
    return t;
}

namespace {

bool excluded(const VectorField& F, const Vec3& x, double eps) {
    return eps > 0.0 && F.singular.distance(x) < eps;
}

Vec3 interior_pairing(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region, const TestFunction& phi,
                      const PairingOptions& opt) {
    Vec3 acc = integrate_measure_scalar(mu, phi.value, region, opt.order);
    const VolumeRule vr = region.volume_rule(opt.order);
    for (std::size_t i = 0; i < vr.x.size(); ++i) {
        const Vec3& x = vr.x[i];
        if (excluded(F, x, opt.exclusion)) continue;
        const Vec3 g = cross(F(x), phi.gradient(x));
        if (!is_finite(g)) throw FieldError("trace_pairing: non-finite volume integrand");
        acc -= vr.w[i] * g;
    }
    return acc;
}

double interior_pairing_vector(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region,
                               const TestVector& psi, const PairingOptions& opt) {
    double acc = integrate_measure(mu, psi.value, region, opt.order);
    const VolumeRule vr = region.volume_rule(opt.order);
    for (std::size_t i = 0; i < vr.x.size(); ++i) {
        const Vec3& x = vr.x[i];
        if (excluded(F, x, opt.exclusion)) continue;
        const double g = dot(F(x), psi.curl(x));
        if (!std::isfinite(g)) throw FieldError("trace_pairing_vector: non-finite volume integrand");
        acc -= vr.w[i] * g;
    }
    return acc;
}

Vec3 boundary_normal(const SolidRegion& region, const Vec3& y) {
    const int face = region.nearest_face(y);
    const SurfacePatch& p = region.boundary[face];
    if (auto uv = p.locate(y, 1e-6)) return p.normal(uv->first, uv->second);
    return -region.transversal_field(y, face);
}

}  // namespace

Vec3 trace_pairing(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region, const TestFunction& phi,
                   Side side, const PairingOptions& opt) {
    if (side == Side::Interior) return interior_pairing(F, mu, region, phi, opt);
    Vec3 acc{};
    for (const SolidRegion& piece : region.complement_in(opt.ambient_radius))
        acc += interior_pairing(F, mu, piece, phi, opt);
    return -acc;
}

double trace_pairing_vector(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region,
                            const TestVector& psi, Side side, const PairingOptions& opt) {
    if (side == Side::Interior) return interior_pairing_vector(F, mu, region, psi, opt);
    double acc = 0.0;
    for (const SolidRegion& piece : region.complement_in(opt.ambient_radius))
        acc += interior_pairing_vector(F, mu, piece, psi, opt);
    return -acc;
}

std::vector<double> default_layer_grid() {
    std::vector<double> t;
    for (int k = 4; k <= 12; ++k) t.push_back(std::ldexp(1.0, -k));
    return t;
}

TangentialTrace estimate_trace_layerwise(const VectorField& F, const SolidRegion& region,
                                         const TransversalCollar& collar, const std::vector<double>& t_grid_in,
                                         Side side, int order, double tol) {
    std::vector<double> t_grid = t_grid_in;
    std::sort(t_grid.begin(), t_grid.end(), std::greater<>());
    if (t_grid.empty() || t_grid.front() >= 0.5 || t_grid.back() <= 0.0)
        throw GeometryError("estimate_trace_layerwise: t grid must lie in (0, 1/2)");
    TangentialTrace tr;
    tr.side = side;
    const double sgn = side == Side::Interior ? 1.0 : -1.0;
    for (std::size_t f = 0; f < region.boundary.size(); ++f) {
        const SurfacePatch& p = region.boundary[f];
        const QuadratureRule q = surface_rule(p, order, 2 * order);
        for (const auto& [u, v] : q.nodes) {
            TraceNode nd;
            nd.x = p.X(u, v);
            nd.nu = p.normal(u, v);
            nd.face = static_cast<int>(f);
            std::vector<Vec3> vals;
            for (double t : t_grid) vals.push_back(cross(F(collar.phi(sgn * t, nd.x, nd.face)), nd.nu));
            if (vals.size() < 4) {
                nd.value = vals.back();
                nd.converged = vals.size() >= 2 && norm(vals[vals.size() - 1] - vals[vals.size() - 2]) < tol;
            } else {
                std::vector<Vec3> acc;
                for (std::size_t k = 0; k + 2 < vals.size(); ++k) {
                    Vec3 a;
                    for (int c = 0; c < 3; ++c) a[c] = aitken(vals[k][c], vals[k + 1][c], vals[k + 2][c]);
                    acc.push_back(a);
                }
                nd.value = acc.back();
                nd.converged = is_finite(nd.value) && norm(acc[acc.size() - 1] - acc[acc.size() - 2]) < tol;
            }
            nd.residual = std::fabs(dot(nd.value, nd.nu));
            if (nd.converged) {
                tr.sup_bound = std::max(tr.sup_bound, norm(nd.value));
                tr.max_residual = std::max(tr.max_residual, nd.residual);
            } else {
                ++tr.non_converged;
            }
            tr.nodes.push_back(nd);
        }
    }
    return tr;
}

LayerPairing trace_pairing_via_layers(const VectorField& F, const SolidRegion& region, const VectorFn& psi,
                                      const std::vector<double>& eps_grid, int order, double tol) {
    LayerPairing lp;
    lp.eps = eps_grid;
    std::sort(lp.eps.begin(), lp.eps.end(), std::greater<>());
    for (std::size_t k = 1; k < lp.eps.size(); ++k)
        if (std::fabs(lp.eps[k] - 0.5 * lp.eps[k - 1]) > 1e-12 * lp.eps[k - 1])
            throw GeometryError("trace_pairing_via_layers: eps grid must consist of successive halvings");
    for (double eps : lp.eps) {
        const ShellRule sr = region.shell_rule(eps, order);
        double acc = 0.0;
        for (std::size_t i = 0; i < sr.x.size(); ++i)
            acc += sr.w[i] * dot(cross(F(sr.x[i]), sr.grad_depth[i]), psi(sr.x[i]));
        lp.values.push_back(acc / eps);
    }
    if (lp.values.empty()) return lp;
    const auto table = richardson_table(lp.values, 2);
    const auto& row = table.back();
    lp.value = row.back();
    lp.error = row.size() >= 2 ? std::fabs(row[row.size() - 1] - row[row.size() - 2]) : std::fabs(lp.value);
    lp.converged = row.size() >= 2 && lp.error < tol;
    return lp;
}

DefectReport tangentiality_defect(const VectorField& F, const CurlMeasure& mu, const SolidRegion& region,
                                  const VectorFn& psi, double delta, const PairingOptions& opt) {
    const SolidRegion reg = region;
    VectorFn psi_tau = [reg, psi](const Vec3& y) {
        const Vec3 n = boundary_normal(reg, y);
        const Vec3 v = psi(y);
        return v - dot(v, n) * n;
    };
    const VectorExtension e_full = extend_boundary_vector(region, psi, delta);
    const VectorExtension e_tan = extend_boundary_vector(region, psi_tau, delta);
    auto as_test = [](const VectorExtension& e) {
        return test_vector([e](const Vec3& x) { return e.value(x); }, [e](const Vec3& x) { return e.curl(x); });
    };
    DefectReport r;
    r.full = trace_pairing_vector(F, mu, region, as_test(e_full), Side::Interior, opt);
    r.tangential = trace_pairing_vector(F, mu, region, as_test(e_tan), Side::Interior, opt);
    r.defect = std::fabs(r.full - r.tangential);
    return r;
}

namespace {

// Singular points lying on a face: declared points on the patch and
// intersections of declared lines with planar faces.
std::vector<std::pair<double, double>> singular_points_on(const SingularSet& s, const SurfacePatch& p) {
    std::vector<std::pair<double, double>> out;
    for (const Vec3& q : s.points)
        if (auto uv = p.locate(q, 1e-9)) out.push_back(*uv);
    if (p.kind == PatchKind::Disk || p.kind == PatchKind::Rect) {
        const Vec3 n = p.normal(0.5 * (p.u0 + p.u1), 0.5 * (p.v0 + p.v1));
        const Vec3 o = p.X(p.u0, p.v0);
        for (const auto& l : s.lines) {
            const double dn = dot(l.dir, n);
            if (std::fabs(dn) < 1e-14) continue;
            const Vec3 q = l.point + (dot(o - l.point, n) / dn) * l.dir;
            if (auto uv = p.locate(q, 1e-9)) out.push_back(*uv);
        }
    }
    return out;
}

}  // namespace

TraceDiagnostic trace_order_diagnostic(const VectorField& F, const SolidRegion& region,
                                       const std::vector<double>& eps_grid, int order) {
    TraceDiagnostic d;
    d.eps = eps_grid;
    std::sort(d.eps.begin(), d.eps.end(), std::greater<>());
    for (double eps : d.eps) {
        double tv = 0.0;
        for (const SurfacePatch& p : region.boundary) {
            const auto sing = singular_points_on(F.singular, p);
            const bool centred = p.kind == PatchKind::Disk && p.u0 == 0.0 && sing.size() == 1 && sing[0].first < 1e-12;
            auto integrand = [&](const SurfacePatch& patch, double u, double v) {
                const Vec3 x = patch.X(u, v);
                for (const auto& [su, sv] : sing)
                    if (norm(x - p.X(su, sv)) < eps) return 0.0;
                return norm(cross(F(x), patch.normal(u, v))) * patch.jacobian(u, v);
            };
            if (centred) {
                SurfacePatch q = p;
                q.u0 = eps;
                const QuadratureRule rule = surface_rule_graded(q, eps, order / 2 + 4, 2 * order);
                for (std::size_t i = 0; i < rule.weights.size(); ++i)
                    tv += rule.weights[i] * norm(cross(F(q.X(rule.nodes[i].first, rule.nodes[i].second)),
                                                       q.normal(rule.nodes[i].first, rule.nodes[i].second))) *
                          q.jacobian(rule.nodes[i].first, rule.nodes[i].second);
            } else {
                const QuadratureRule rule = surface_rule(p, order, 2 * order);
                for (std::size_t i = 0; i < rule.weights.size(); ++i)
                    tv += rule.weights[i] * integrand(p, rule.nodes[i].first, rule.nodes[i].second);
            }
        }
        d.total_variation.push_back(tv);
    }
    const std::size_t n = d.eps.size();
    if (n >= 3) {
        const double inc1 = d.total_variation[n - 2] - d.total_variation[n - 3];
        const double inc2 = d.total_variation[n - 1] - d.total_variation[n - 2];
        const double ratio = std::fabs(inc1) > 0.0 ? std::fabs(inc2 / inc1) : 0.0;
        d.order_flag = ratio > 0.5 ? OrderFlag::OrderOneOnly : OrderFlag::OrderZero;
    }
    if (n >= 2) {
        // Least-squares slopes against ln(1/eps) for tv and ln(tv).
        double sx = 0, sy = 0, sxx = 0, sxy = 0, sly = 0, sxly = 0;
        int m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::log(1.0 / d.eps[i]), y = d.total_variation[i];
            if (!(y > 0.0)) continue;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            sly += std::log(y);
            sxly += x * std::log(y);
            ++m;
        }
        const double den = m * sxx - sx * sx;
        if (m >= 2 && den != 0.0) {
            d.log_slope = (m * sxy - sx * sy) / den;
            d.power_exponent = (m * sxly - sx * sly) / den;
        }
    }
    return d;
}

std::string to_string(OrderFlag f) { return f == OrderFlag::OrderZero ? "order_zero" : "order_one_only"; }

}  // namespace curlflux
