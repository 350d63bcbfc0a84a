#include "curlflux/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curlflux {

namespace {

double wrap_angle(double a, double v0) {
    double d = std::fmod(a - v0, 2.0 * kPi);
    if (d < 0) d += 2.0 * kPi;
    return v0 + d;
}

constexpr double kFdStep = 1e-6;

}  // namespace

// ---------------------------------------------------------------------------
// SurfacePatch

Vec3 SurfacePatch::X(double u, double v) const {
    switch (kind) {
        case PatchKind::Disk:
            return center + u * (std::cos(v) * e1 + std::sin(v) * e2);
        case PatchKind::Cap:
            return center + radius * (std::sin(u) * (std::cos(v) * e1 + std::sin(v) * e2) + std::cos(u) * axis);
        case PatchKind::Rect:
            return center + u * edge_a + v * edge_b;
        case PatchKind::CylinderSide:
            return center + radius * (std::cos(v) * e1 + std::sin(v) * e2) + u * axis;
        case PatchKind::Generic:
            return map(u, v);
    }
    return {};
}

Vec3 SurfacePatch::Xu(double u, double v) const {
    switch (kind) {
        case PatchKind::Disk:
            return std::cos(v) * e1 + std::sin(v) * e2;
        case PatchKind::Cap:
            return radius * (std::cos(u) * (std::cos(v) * e1 + std::sin(v) * e2) - std::sin(u) * axis);
        case PatchKind::Rect:
            return edge_a;
        case PatchKind::CylinderSide:
            return axis;
        case PatchKind::Generic:
            return (map(u + kFdStep, v) - map(u - kFdStep, v)) / (2.0 * kFdStep);
    }
    return {};
}

Vec3 SurfacePatch::Xv(double u, double v) const {
    switch (kind) {
        case PatchKind::Disk:
            return u * (-std::sin(v) * e1 + std::cos(v) * e2);
        case PatchKind::Cap:
            return radius * std::sin(u) * (-std::sin(v) * e1 + std::cos(v) * e2);
        case PatchKind::Rect:
            return edge_b;
        case PatchKind::CylinderSide:
            return radius * (-std::sin(v) * e1 + std::cos(v) * e2);
        case PatchKind::Generic:
            return (map(u, v + kFdStep) - map(u, v - kFdStep)) / (2.0 * kFdStep);
    }
    return {};
}

Vec3 SurfacePatch::normal(double u, double v) const {
    // Polar kinds degenerate at u = 0; use the limiting normal there.
    if (kind == PatchKind::Disk) return static_cast<double>(normal_sign) * axis;
    if (kind == PatchKind::Cap && std::fabs(std::sin(u)) < 1e-14)
        return static_cast<double>(normal_sign) * (std::cos(u) > 0 ? axis : -axis);
    return static_cast<double>(normal_sign) * normalized(cross(Xu(u, v), Xv(u, v)));
}

double SurfacePatch::jacobian(double u, double v) const {
    switch (kind) {
        case PatchKind::Disk:
            return std::fabs(u);
        case PatchKind::Cap:
            return radius * radius * std::fabs(std::sin(u));
        default:
            return norm(cross(Xu(u, v), Xv(u, v)));
    }
}

Vec3 SurfacePatch::tangential_gradient(double u, double v, double fu, double fv) const {
    const Vec3 a = Xu(u, v), b = Xv(u, v);
    const double E = dot(a, a), F = dot(a, b), G = dot(b, b);
    const double D = E * G - F * F;
    if (D <= 0.0) {
        // Coordinate singularity of polar kinds: only the radial part survives.
        return E > 0.0 ? (fu / E) * a : Vec3{};
    }
    return ((G * fu - F * fv) / D) * a + ((E * fv - F * fu) / D) * b;
}

std::optional<std::pair<double, double>> SurfacePatch::locate(const Vec3& x, double tol) const {
    const Vec3 d = x - center;
    switch (kind) {
        case PatchKind::Disk: {
            const double h = dot(d, axis);
            if (std::fabs(h) > tol) return std::nullopt;
            const Vec3 p = d - h * axis;
            const double r = norm(p);
            if (r < u0 - tol || r > u1 + tol) return std::nullopt;
            const double th = wrap_angle(std::atan2(dot(p, e2), dot(p, e1)), v0);
            return std::make_pair(std::clamp(r, u0, u1), th);
        }
        case PatchKind::Cap: {
            const double r = norm(d);
            if (std::fabs(r - radius) > tol || r == 0.0) return std::nullopt;
            const double c = std::clamp(dot(d, axis) / r, -1.0, 1.0);
            const double colat = std::acos(c);
            if (colat < u0 - tol / radius || colat > u1 + tol / radius) return std::nullopt;
            const double th = wrap_angle(std::atan2(dot(d, e2), dot(d, e1)), v0);
            return std::make_pair(std::clamp(colat, u0, u1), th);
        }
        case PatchKind::Rect: {
            const Vec3 n = normalized(cross(edge_a, edge_b));
            if (std::fabs(dot(d, n)) > tol) return std::nullopt;
            const double aa = dot(edge_a, edge_a), bb = dot(edge_b, edge_b), ab = dot(edge_a, edge_b);
            const double da = dot(d, edge_a), db = dot(d, edge_b);
            const double det = aa * bb - ab * ab;
            const double u = (da * bb - db * ab) / det;
            const double v = (db * aa - da * ab) / det;
            const double tu = tol / std::sqrt(aa), tv = tol / std::sqrt(bb);
            if (u < u0 - tu || u > u1 + tu || v < v0 - tv || v > v1 + tv) return std::nullopt;
            return std::make_pair(std::clamp(u, u0, u1), std::clamp(v, v0, v1));
        }
        case PatchKind::CylinderSide: {
            const double z = dot(d, axis);
            const Vec3 p = d - z * axis;
            if (std::fabs(norm(p) - radius) > tol) return std::nullopt;
            if (z < u0 - tol || z > u1 + tol) return std::nullopt;
            const double th = wrap_angle(std::atan2(dot(p, e2), dot(p, e1)), v0);
            return std::make_pair(std::clamp(z, u0, u1), th);
        }
        case PatchKind::Generic:
            return std::nullopt;
    }
    return std::nullopt;
}

SurfacePatch make_disk(const Vec3& center, const Vec3& normal, double radius, double inner_radius) {
    if (!(radius > 0.0) || inner_radius < 0.0 || inner_radius >= radius)
        throw GeometryError("make_disk: invalid radii");
    SurfacePatch p;
    p.kind = PatchKind::Disk;
    p.center = center;
    p.axis = normalized(normal);
    auto fr = tangent_frame(p.axis);
    p.e1 = fr[0];
    p.e2 = fr[1];
    p.radius = radius;
    p.u0 = inner_radius;
    p.u1 = radius;
    p.v0 = 0.0;
    p.v1 = 2.0 * kPi;
    p.v_periodic = true;
    p.normal_sign = 1;
    return p;
}

SurfacePatch make_cap(const Vec3& center, double radius, const Vec3& pole, double colat_max, bool inward_normal,
                      double colat_min) {
    if (!(radius > 0.0) || !(colat_max > colat_min) || colat_max > kPi + 1e-15 || colat_min < 0.0)
        throw GeometryError("make_cap: invalid parameters");
    SurfacePatch p;
    p.kind = PatchKind::Cap;
    p.center = center;
    p.axis = normalized(pole);
    auto fr = tangent_frame(p.axis);
    p.e1 = fr[0];
    p.e2 = fr[1];
    p.radius = radius;
    p.u0 = colat_min;
    p.u1 = std::min(colat_max, kPi);
    p.v0 = 0.0;
    p.v1 = 2.0 * kPi;
    p.v_periodic = true;
    // X_u x X_v points outward.
    p.normal_sign = inward_normal ? -1 : 1;
    return p;
}

SurfacePatch make_sphere(const Vec3& center, double radius, bool inward_normal) {
    return make_cap(center, radius, {0, 0, 1}, kPi, inward_normal);
}

SurfacePatch make_rect(const Vec3& origin, const Vec3& a, const Vec3& b, int normal_sign) {
    if (norm(cross(a, b)) <= 0.0) throw GeometryError("make_rect: degenerate edges");
    SurfacePatch p;
    p.kind = PatchKind::Rect;
    p.center = origin;
    p.edge_a = a;
    p.edge_b = b;
    p.axis = normalized(cross(a, b));
    p.u0 = 0.0;
    p.u1 = 1.0;
    p.v0 = 0.0;
    p.v1 = 1.0;
    p.v_periodic = false;
    p.normal_sign = normal_sign >= 0 ? 1 : -1;
    return p;
}

SurfacePatch make_cylinder_side(const Vec3& base_center, const Vec3& axis, double radius, double z0, double z1,
                                bool inward_normal) {
    if (!(radius > 0.0) || !(z1 > z0)) throw GeometryError("make_cylinder_side: invalid parameters");
    SurfacePatch p;
    p.kind = PatchKind::CylinderSide;
    p.center = base_center;
    p.axis = normalized(axis);
    auto fr = tangent_frame(p.axis);
    p.e1 = fr[0];
    p.e2 = fr[1];
    p.radius = radius;
    p.u0 = z0;
    p.u1 = z1;
    p.v0 = 0.0;
    p.v1 = 2.0 * kPi;
    p.v_periodic = true;
    // X_u x X_v = axis x (tangential) points toward the axis.
    p.normal_sign = inward_normal ? 1 : -1;
    p.regularity = Regularity::C2;
    return p;
}

SurfacePatch make_generic_patch(std::function<Vec3(double, double)> map, double u0, double u1, double v0, double v1,
                                bool v_periodic, int normal_sign) {
    SurfacePatch p;
    p.kind = PatchKind::Generic;
    p.map = std::move(map);
    p.u0 = u0;
    p.u1 = u1;
    p.v0 = v0;
    p.v1 = v1;
    p.v_periodic = v_periodic;
    p.normal_sign = normal_sign >= 0 ? 1 : -1;
    p.regularity = Regularity::C1;
    return p;
}

QuadratureRule surface_rule(const SurfacePatch& patch, int nu, int nv) {
    const Rule1D ru = gauss_legendre(nu, patch.u0, patch.u1);
    const Rule1D rv = patch.v_periodic ? trapezoid_periodic(nv, patch.v0, patch.v1 - patch.v0)
                                       : gauss_legendre(nv, patch.v0, patch.v1);
    return tensor_rule(ru, rv);
}

QuadratureRule surface_rule_graded(const SurfacePatch& patch, double first_panel, int n_per_panel, int nv) {
    const Rule1D ru = graded_gauss(patch.u0, patch.u1, first_panel, n_per_panel);
    const Rule1D rv = patch.v_periodic ? trapezoid_periodic(nv, patch.v0, patch.v1 - patch.v0)
                                       : gauss_legendre(nv, patch.v0, patch.v1);
    return tensor_rule(ru, rv);
}

double surface_integral(const SurfacePatch& patch, const ScalarFn& integrand, const QuadratureRule& rule) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const auto [u, v] = rule.nodes[i];
        const Vec3 x = patch.X(u, v);
        const double f = integrand(x);
        if (!std::isfinite(f)) {
            std::ostringstream os;
            os << "surface_integral: non-finite integrand at node (u=" << u << ", v=" << v << ") x=" << x;
            throw GeometryError(os.str());
        }
        s += rule.weights[i] * f * patch.jacobian(u, v);
    }
    return s;
}

double surface_integral(const SurfacePatch& patch, const ScalarFn& integrand, int nu, int nv) {
    return surface_integral(patch, integrand, surface_rule(patch, nu, nv));
}

// ---------------------------------------------------------------------------
// Curves

Curve make_circle(const Vec3& center, const Vec3& e1, const Vec3& e2, double radius) {
    Curve c;
    c.gamma = [=](double w) { return center + radius * (std::cos(w) * e1 + std::sin(w) * e2); };
    c.dgamma = [=](double w) { return radius * (-std::sin(w) * e1 + std::cos(w) * e2); };
    c.a = 0.0;
    c.b = 2.0 * kPi;
    c.closed = true;
    return c;
}

Curve make_segment(const Vec3& p0, const Vec3& p1) {
    Curve c;
    c.gamma = [=](double w) { return p0 + w * (p1 - p0); };
    c.dgamma = [=](double) { return p1 - p0; };
    c.a = 0.0;
    c.b = 1.0;
    c.closed = false;
    return c;
}

Rule1D line_rule(const Curve& c, int n) {
    if (c.empty()) return {};
    if (!c.corners.empty()) {
        std::vector<double> br{c.a};
        for (double k : c.corners)
            if (k > c.a && k < c.b) br.push_back(k);
        br.push_back(c.b);
        const int per = std::max(2, n / static_cast<int>(br.size() - 1));
        return composite_gauss(br, per);
    }
    if (c.closed) return trapezoid_periodic(n, c.a, c.b - c.a);
    return gauss_legendre(n, c.a, c.b);
}

double line_integral(const Curve& c, const ScalarFn& integrand, const Rule1D& rule) {
    if (c.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double w = rule.nodes[i];
        const Vec3 x = c.gamma(w);
        const double f = integrand(x);
        if (!std::isfinite(f)) {
            std::ostringstream os;
            os << "line_integral: non-finite integrand at w=" << w << " x=" << x;
            throw GeometryError(os.str());
        }
        s += rule.weights[i] * f * norm(c.dgamma(w));
    }
    return s;
}

double line_integral(const Curve& c, const ScalarFn& integrand, int n) {
    return line_integral(c, integrand, line_rule(c, n));
}

// ---------------------------------------------------------------------------
// BoundaryManifold

namespace {

// Parameters (u,v) of the boundary point with curve parameter w.
std::pair<double, double> boundary_param(const SurfacePatch& p, double w) {
    if (p.polar()) return {p.u1, w};
    // Rect: counter-clockwise in (u,v), one unit of w per edge.
    const int k = std::clamp(static_cast<int>(std::floor(w)), 0, 3);
    const double f = w - k;
    switch (k) {
        case 0: return {f, 0.0};
        case 1: return {1.0, f};
        case 2: return {1.0 - f, 1.0};
        default: return {0.0, 1.0 - f};
    }
}

}  // namespace

Vec3 BoundaryManifold::surface_normal_at_boundary(double w) const {
    const auto [u, v] = boundary_param(patch, w);
    return patch.normal(u, v);
}

Vec3 BoundaryManifold::conormal(double w) const {
    const auto [u, v] = boundary_param(patch, w);
    const Vec3 n = patch.normal(u, v);
    Vec3 d;
    if (patch.polar()) {
        d = -patch.Xu(u, v);
    } else {
        const int k = std::clamp(static_cast<int>(std::floor(w)), 0, 3);
        switch (k) {
            case 0: d = patch.Xv(u, v); break;
            case 1: d = -patch.Xu(u, v); break;
            case 2: d = -patch.Xv(u, v); break;
            default: d = patch.Xu(u, v); break;
        }
    }
    const Vec3 t = normalized(boundary.dgamma(w));
    d = d - dot(d, n) * n - dot(d, t) * t;
    return normalized(d);
}

Vec3 BoundaryManifold::tangent(double w) const {
    return cross(surface_normal_at_boundary(w), conormal(w));
}

BoundaryManifold make_manifold(const SurfacePatch& patch) {
    BoundaryManifold m;
    m.patch = patch;
    if (patch.polar()) {
        if (patch.u0 > 1e-14) throw GeometryError("make_manifold: annular patches have two boundary curves");
        const bool closed = patch.kind == PatchKind::Cap && patch.u1 >= kPi - 1e-14;
        if (closed) return m;
        const SurfacePatch p = patch;
        m.boundary.gamma = [p](double w) { return p.X(p.u1, w); };
        m.boundary.dgamma = [p](double w) { return p.Xv(p.u1, w); };
        m.boundary.a = patch.v0;
        m.boundary.b = patch.v1;
        m.boundary.closed = true;
        return m;
    }
    if (patch.kind == PatchKind::Rect) {
        const SurfacePatch p = patch;
        m.boundary.gamma = [p](double w) {
            const auto [u, v] = boundary_param(p, w);
            return p.X(u, v);
        };
        m.boundary.dgamma = [p](double w) {
            const int k = std::clamp(static_cast<int>(std::floor(w)), 0, 3);
            switch (k) {
                case 0: return p.edge_a;
                case 1: return p.edge_b;
                case 2: return -p.edge_a;
                default: return -p.edge_b;
            }
        };
        m.boundary.a = 0.0;
        m.boundary.b = 4.0;
        m.boundary.closed = true;
        m.boundary.corners = {1.0, 2.0, 3.0};
        return m;
    }
    throw GeometryError("make_manifold: boundary curve not available for this patch kind");
}

// ---------------------------------------------------------------------------
// Tangential collar

double TangentialCollar::u_of_s(double s) const {
    const auto& p = manifold.patch;
    return p.u1 - s * (p.u1 - p.u0);
}

Vec3 TangentialCollar::psi(double t, double w) const {
    const auto& p = manifold.patch;
    if (p.polar()) return p.X(u_of_s(t), w);
    // Rect: level set {s = t} is the square [t/2, 1 - t/2]^2.
    const double lo = 0.5 * t, len = 1.0 - t;
    const int k = std::clamp(static_cast<int>(std::floor(w)), 0, 3);
    const double f = w - k;
    switch (k) {
        case 0: return p.X(lo + f * len, lo);
        case 1: return p.X(1.0 - lo, lo + f * len);
        case 2: return p.X(1.0 - lo - f * len, 1.0 - lo);
        default: return p.X(lo, 1.0 - lo - f * len);
    }
}

double TangentialCollar::s_of(double u, double v) const {
    if (empty) return 1.0;
    const auto& p = manifold.patch;
    if (p.polar()) return (p.u1 - u) / (p.u1 - p.u0);
    return 2.0 * std::min(std::min(u, 1.0 - u), std::min(v, 1.0 - v));
}

Vec3 TangentialCollar::grad_s(double u, double v) const {
    if (empty) return {};
    const auto& p = manifold.patch;
    if (p.polar()) return p.tangential_gradient(u, v, -1.0 / (p.u1 - p.u0), 0.0);
    const double d[4] = {u, 1.0 - u, v, 1.0 - v};
    const int k = static_cast<int>(std::min_element(d, d + 4) - d);
    const double fu = k == 0 ? 2.0 : (k == 1 ? -2.0 : 0.0);
    const double fv = k == 2 ? 2.0 : (k == 3 ? -2.0 : 0.0);
    return p.tangential_gradient(u, v, fu, fv);
}

TangentialCollar build_tangential_collar(const BoundaryManifold& manifold) {
    TangentialCollar c;
    c.manifold = manifold;
    if (manifold.closed()) {
        c.empty = true;
        return c;
    }
    const auto& p = manifold.patch;
    if (!p.polar() && p.kind != PatchKind::Rect)
        throw GeometryError("build_tangential_collar: unsupported patch kind");
    const double len = line_integral(manifold.boundary, [](const Vec3&) { return 1.0; }, 128);
    if (!(len > 1e-12)) throw GeometryError("build_tangential_collar: degenerate boundary curve");

    // Fit the comparability constant on a sample grid of layers.
    const int nw = 48;
    std::vector<double> ts;
    for (int i = 0; i <= 9; ++i) ts.push_back(0.05 * i);
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    std::vector<std::vector<Vec3>> layers;
    for (double t : ts) {
        std::vector<Vec3> pts;
        for (int j = 0; j < nw; ++j)
            pts.push_back(c.psi(t, manifold.boundary.a + (manifold.boundary.b - manifold.boundary.a) * j / nw));
        layers.push_back(std::move(pts));
    }
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t k = i + 1; k < ts.size(); ++k) {
            double d = std::numeric_limits<double>::infinity();
            for (const Vec3& a : layers[i])
                for (const Vec3& b : layers[k]) d = std::min(d, norm(a - b));
            const double r = d / (ts[k] - ts[i]);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
    c.theta_fitted = std::max(rmax, 1.0 / rmin);
    c.theta = std::max(2.0, c.theta_fitted);
    return c;
}

BoundaryManifold shrink_tangential(const BoundaryManifold& manifold, const TangentialCollar& collar, double t) {
    if (!(t >= 0.0 && t < 0.5)) throw GeometryError("shrink_tangential: t must lie in [0, 1/2)");
    if (collar.empty || t == 0.0) return manifold;
    SurfacePatch p = manifold.patch;
    if (p.polar()) {
        p.u1 = collar.u_of_s(t);
        return make_manifold(p);
    }
    // Rect: inner square [t/2, 1 - t/2]^2 as a new parallelogram.
    const double lo = 0.5 * t;
    SurfacePatch q = make_rect(p.X(lo, lo), (1.0 - t) * p.edge_a, (1.0 - t) * p.edge_b, p.normal_sign);
    return make_manifold(q);
}

// ---------------------------------------------------------------------------
// Height function

double HeightFunction::value_param(double u, double v) const {
    if (collar.empty) return 1.0;
    const double s = collar.s_of(u, v);
    if (s <= t) return 0.0;
    if (s >= t + delta) return 1.0;
    return (s - t) / delta;
}

Vec3 HeightFunction::gradient_param(double u, double v) const {
    if (collar.empty) return {};
    const double s = collar.s_of(u, v);
    if (s <= t || s >= t + delta) return {};
    return collar.grad_s(u, v) / delta;
}

double HeightFunction::value(const Vec3& x) const {
    if (collar.empty) return 1.0;
    auto uv = collar.manifold.patch.locate(x);
    if (!uv) return 0.0;
    return value_param(uv->first, uv->second);
}

Vec3 HeightFunction::gradient(const Vec3& x) const {
    if (collar.empty) return {};
    auto uv = collar.manifold.patch.locate(x);
    if (!uv) return {};
    return gradient_param(uv->first, uv->second);
}

HeightFunction height_function(const BoundaryManifold& manifold, const TangentialCollar& collar, double t,
                               double delta) {
    if (!(t >= 0.0 && t < 0.5)) throw GeometryError("height_function: t must lie in [0, 1/2)");
    if (!(delta > 0.0 && delta < 0.25)) throw GeometryError("height_function: delta must lie in (0, 1/4)");
    HeightFunction h;
    h.collar = collar;
    h.collar.manifold = manifold;
    h.t = t;
    h.delta = delta;
    return h;
}

// ---------------------------------------------------------------------------
// Collar layer integrals

double collar_layer_integral(const TangentialCollar& collar, double s_lo, double s_hi,
                             const std::function<double(const LayerPoint&)>& g, const std::vector<double>& breaks,
                             int n_s, int n_w) {
    if (collar.empty) return 0.0;
    s_lo = std::max(s_lo, 0.0);
    s_hi = std::min(s_hi, 1.0);
    if (!(s_hi > s_lo)) return 0.0;
    std::vector<double> br{s_lo};
    for (double b : breaks)
        if (b > s_lo && b < s_hi) br.push_back(b);
    br.push_back(s_hi);
    std::sort(br.begin(), br.end());
    const Rule1D rs = composite_gauss(br, n_s);
    const auto& p = collar.manifold.patch;

    double total = 0.0;
    if (p.polar()) {
        const double du_ds = p.u1 - p.u0;
        const Rule1D rw = trapezoid_periodic(n_w, p.v0, p.v1 - p.v0);
        for (std::size_t i = 0; i < rs.nodes.size(); ++i) {
            const double s = rs.nodes[i];
            const double u = collar.u_of_s(s);
            double ring = 0.0;
            for (std::size_t j = 0; j < rw.nodes.size(); ++j) {
                const double v = rw.nodes[j];
                LayerPoint lp{p.X(u, v), u, v, s, collar.grad_s(u, v)};
                ring += rw.weights[j] * g(lp) * p.jacobian(u, v);
            }
            total += rs.weights[i] * du_ds * ring;
        }
        return total;
    }
    // Rect: four trapezoids, one per edge; (u,v) = edge map of (s, f), f in (s/2, 1 - s/2).
    for (int k = 0; k < 4; ++k) {
        for (std::size_t i = 0; i < rs.nodes.size(); ++i) {
            const double s = rs.nodes[i];
            const Rule1D rf = gauss_legendre(n_w, 0.5 * s, 1.0 - 0.5 * s);
            double strip = 0.0;
            for (std::size_t j = 0; j < rf.nodes.size(); ++j) {
                const double f = rf.nodes[j];
                double u = 0, v = 0;
                switch (k) {
                    case 0: u = f; v = 0.5 * s; break;
                    case 1: u = 1.0 - 0.5 * s; v = f; break;
                    case 2: u = f; v = 1.0 - 0.5 * s; break;
                    default: u = 0.5 * s; v = f; break;
                }
                LayerPoint lp{p.X(u, v), u, v, s, collar.grad_s(u, v)};
                strip += rf.weights[j] * g(lp) * p.jacobian(u, v);
            }
            total += rs.weights[i] * 0.5 * strip;
        }
    }
    return total;
}

double collar_layer_area(const TangentialCollar& collar, double t, double delta) {
    return collar_layer_integral(collar, t, t + delta, [](const LayerPoint&) { return 1.0; });
}

}  // namespace curlflux
