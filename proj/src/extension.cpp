#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "curlflux/region.hpp"

namespace curlflux {

double cutoff_theta(double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    const double x = 2.0 * (t - 0.5);
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double cutoff_theta_prime(double t) {
    if (t <= 0.5 || t >= 1.0) return 0.0;
    const double x = 2.0 * (t - 0.5);
    return -60.0 * x * x * (1.0 - x) * (1.0 - x);
}

double mollifier2(double r) {
    if (r >= 1.0) return 0.0;
    const double q = 1.0 - r * r;
    return (4.0 / kPi) * q * q * q;
}

double mollifier3(double r) {
    if (r >= 1.0) return 0.0;
    const double q = 1.0 - r * r;
    return (315.0 / (64.0 * kPi)) * q * q * q;
}

namespace {

struct DiskStencil {
    std::vector<double> r, phi, w;
};

DiskStencil build_disk_stencil(int nr, int na) {
    DiskStencil st;
    const Rule1D rr = gauss_legendre(nr, 0.0, 1.0);
    const Rule1D ra = trapezoid_periodic(na, 0.0, 2.0 * kPi);
    double total = 0.0;
    for (std::size_t i = 0; i < rr.nodes.size(); ++i)
        for (std::size_t j = 0; j < ra.nodes.size(); ++j) {
            const double w = rr.weights[i] * ra.weights[j] * rr.nodes[i] * mollifier2(rr.nodes[i]);
            st.r.push_back(rr.nodes[i]);
            st.phi.push_back(ra.nodes[j]);
            st.w.push_back(w);
            total += w;
        }
    // Normalize so constants are reproduced exactly.
    for (double& w : st.w) w /= total;
    return st;
}

const DiskStencil& disk_stencil(int nr, int na) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, DiskStencil> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({nr, na});
    if (it == cache.end()) it = cache.emplace(std::make_pair(nr, na), build_disk_stencil(nr, na)).first;
    return it->second;
}

// Surface normal of the face at a boundary point.
Vec3 face_normal(const SolidRegion& region, int face, const Vec3& y) {
    const SurfacePatch& p = region.boundary[face];
    auto uv = p.locate(y, 1e-6);
    if (uv) return p.normal(uv->first, uv->second);
    return -region.transversal_field(y, face);
}

template <class T, class Fn>
T mollify_boundary(const SolidRegion& region, const Fn& f, const Vec3& y, int face, double s,
                   const DiskStencil& st) {
    if (s <= 0.0) return f(y);
    const Vec3 n = face_normal(region, face, y);
    const auto fr = tangent_frame(normalized(n));
    T acc{};
    for (std::size_t q = 0; q < st.w.size(); ++q) {
        const Vec3 z = y + (s * st.r[q]) * (std::cos(st.phi[q]) * fr[0] + std::sin(st.phi[q]) * fr[1]);
        auto cp = region.collar_invert(z);
        const Vec3 foot = cp ? cp->y : z;
        acc += st.w[q] * f(foot);
    }
    return acc;
}

}  // namespace

double BoundaryExtension::mollified(const Vec3& y, int face, double s) const {
    const DiskStencil& st = disk_stencil(n_radial, n_angular);
    return mollify_boundary<double>(region, f, y, face, s, st);
}

double BoundaryExtension::value(const Vec3& x) const {
    auto cp = region.collar_invert(x);
    if (!cp) return 0.0;
    const double s = std::max(cp->s, 0.0);
    if (s >= delta) return 0.0;
    return cutoff_theta(s / delta) * mollified(cp->y, cp->face, s);
}

Vec3 BoundaryExtension::gradient(const Vec3& x, double h) const {
    return fd_gradient([this](const Vec3& p) { return value(p); }, x, h);
}

BoundaryExtension extend_boundary_function(const SolidRegion& region, ScalarFn f, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw GeometryError("extend_boundary_function: delta must lie in (0,1)");
    if (delta > region.collar_width())
        throw GeometryError("extend_boundary_function: delta exceeds the collar width of the region");
    if (!f) throw GeometryError("extend_boundary_function: missing boundary data");
    BoundaryExtension e;
    e.region = region;
    e.delta = delta;
    e.f = std::move(f);
    return e;
}

ExtensionReport extension_gradient_report(const BoundaryExtension& ext, int order) {
    ExtensionReport rep;
    const ShellRule sr = ext.region.shell_rule(ext.delta, order);
    for (const Vec3& x : sr.x) rep.grad_sup = std::max(rep.grad_sup, norm(ext.gradient(x)));
    const double h = 1e-6;
    for (const SurfacePatch& p : ext.region.boundary) {
        const QuadratureRule q = surface_rule(p, order + 4, 2 * order + 8);
        for (const auto& [u, v] : q.nodes) {
            const double fu = (ext.f(p.X(std::min(u + h, p.u1), v)) - ext.f(p.X(std::max(u - h, p.u0), v))) /
                              (std::min(u + h, p.u1) - std::max(u - h, p.u0));
            const double fv = (ext.f(p.X(u, v + h)) - ext.f(p.X(u, v - h))) / (2.0 * h);
            rep.tangential_grad_sup = std::max(rep.tangential_grad_sup, norm(p.tangential_gradient(u, v, fu, fv)));
            rep.f_sup = std::max(rep.f_sup, std::fabs(ext.f(p.X(u, v))));
        }
    }
    const double denom = rep.tangential_grad_sup + rep.f_sup / ext.delta;
    rep.constant = denom > 0.0 ? rep.grad_sup / denom : 0.0;
    return rep;
}

Vec3 VectorExtension::value(const Vec3& x) const {
    auto cp = region.collar_invert(x);
    if (!cp) return {};
    const double s = std::max(cp->s, 0.0);
    if (s >= delta) return {};
    const DiskStencil& st = disk_stencil(n_radial, n_angular);
    return cutoff_theta(s / delta) * mollify_boundary<Vec3>(region, f, cp->y, cp->face, s, st);
}

Vec3 VectorExtension::curl(const Vec3& x, double h) const {
    return fd_curl([this](const Vec3& p) { return value(p); }, x, h);
}

VectorExtension extend_boundary_vector(const SolidRegion& region, const VectorFn& f, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw GeometryError("extend_boundary_vector: delta must lie in (0,1)");
    if (delta > region.collar_width())
        throw GeometryError("extend_boundary_vector: delta exceeds the collar width of the region");
    VectorExtension e;
    e.region = region;
    e.delta = delta;
    e.f = f;
    return e;
}

}  // namespace curlflux
