#include "curlflux/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curlflux {

namespace {

constexpr Vec3 kE3{0, 0, 1};

bool is_half(double a) { return std::fabs(a - 0.5 * kPi) < 1e-12; }

bool spherical(RegionKind k) {
    return k == RegionKind::Ball || k == RegionKind::HalfBall || k == RegionKind::CollarShell;
}

// Face layout of the spherical family: outer sphere, [inner sphere], [flat face].
struct SphericalFaces {
    int outer = 0, inner = -1, flat = -1;
    double flat_sign = 0.0;  // +1: region above the flat face, -1: below
};

SphericalFaces spherical_faces(const SolidRegion& r) {
    SphericalFaces f;
    int k = 1;
    if (r.r_inner > 0.0) f.inner = k++;
    if (is_half(r.colat_hi)) {
        f.flat = k++;
        f.flat_sign = 1.0;
    } else if (is_half(r.colat_lo)) {
        f.flat = k++;
        f.flat_sign = -1.0;
    }
    return f;
}

// Box faces: -x, +x, -y, +y, -z, +z.
double box_radial_extent(const SolidRegion& r, const Vec3& d, int* face) {
    const Vec3 c = 0.5 * (r.lo + r.hi);
    const Vec3 H = 0.5 * (r.hi - r.lo);
    (void)c;
    const double n = norm(d);
    double best = std::numeric_limits<double>::infinity();
    int bf = 0;
    for (int i = 0; i < 3; ++i) {
        const double di = d[i] / n;
        if (std::fabs(di) < 1e-300) continue;
        const double ext = H[i] / std::fabs(di);
        if (ext < best) {
            best = ext;
            bf = 2 * i + (di > 0 ? 1 : 0);
        }
    }
    if (face) *face = bf;
    return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

SolidRegion make_spherical_sector(const Vec3& center, double r_inner, double r_outer, double colat_lo,
                                  double colat_hi) {
    if (!(r_outer > r_inner) || r_inner < 0.0) throw GeometryError("spherical sector: invalid radii");
    const bool full = colat_lo == 0.0 && std::fabs(colat_hi - kPi) < 1e-12;
    const bool upper = colat_lo == 0.0 && is_half(colat_hi);
    const bool lower = is_half(colat_lo) && std::fabs(colat_hi - kPi) < 1e-12;
    if (!(full || upper || lower)) throw GeometryError("spherical sector: colatitude range must be a half or full");
    SolidRegion r;
    r.center = center;
    r.radius = r_outer;
    r.r_inner = r_inner;
    r.colat_lo = colat_lo;
    r.colat_hi = full ? kPi : colat_hi;
    if (r_inner == 0.0)
        r.kind = full ? RegionKind::Ball : RegionKind::HalfBall;
    else
        r.kind = RegionKind::CollarShell;
    r.name = r.kind == RegionKind::Ball ? "ball" : (r.kind == RegionKind::HalfBall ? "half-ball" : "collar-shell");

    r.boundary.push_back(make_cap(center, r_outer, kE3, r.colat_hi, true, r.colat_lo));
    if (r_inner > 0.0) r.boundary.push_back(make_cap(center, r_inner, kE3, r.colat_hi, false, r.colat_lo));
    if (upper) r.boundary.push_back(make_disk(center, kE3, r_outer, r_inner));
    if (lower) r.boundary.push_back(make_disk(center, -kE3, r_outer, r_inner));
    return r;
}

SolidRegion make_ball(const Vec3& center, double radius) {
    return make_spherical_sector(center, 0.0, radius, 0.0, kPi);
}

SolidRegion make_half_ball(const Vec3& center, double radius, bool upper) {
    return upper ? make_spherical_sector(center, 0.0, radius, 0.0, 0.5 * kPi)
                 : make_spherical_sector(center, 0.0, radius, 0.5 * kPi, kPi);
}

SolidRegion make_cylinder(const Vec3& base_center, double radius, double z0, double z1) {
    if (!(radius > 0.0) || !(z1 > z0)) throw GeometryError("make_cylinder: invalid parameters");
    SolidRegion r;
    r.kind = RegionKind::Cylinder;
    r.name = "cylinder";
    r.center = base_center;
    r.radius = radius;
    r.z0 = z0;
    r.z1 = z1;
    r.boundary.push_back(make_disk(base_center + z0 * kE3, kE3, radius));
    r.boundary.push_back(make_disk(base_center + z1 * kE3, -kE3, radius));
    r.boundary.push_back(make_cylinder_side(base_center, kE3, radius, z0, z1, true));
    return r;
}

SolidRegion make_box(const Vec3& lo, const Vec3& hi) {
    if (!(hi.x > lo.x && hi.y > lo.y && hi.z > lo.z)) throw GeometryError("make_box: empty box");
    SolidRegion r;
    r.kind = RegionKind::Box;
    r.name = "box";
    r.lo = lo;
    r.hi = hi;
    r.center = 0.5 * (lo + hi);
    const Vec3 L = hi - lo;
    const Vec3 ex{L.x, 0, 0}, ey{0, L.y, 0}, ez{0, 0, L.z};
    r.boundary.push_back(make_rect(lo, ey, ez, 1));
    r.boundary.push_back(make_rect({hi.x, lo.y, lo.z}, ey, ez, -1));
    r.boundary.push_back(make_rect(lo, ez, ex, 1));
    r.boundary.push_back(make_rect({lo.x, hi.y, lo.z}, ez, ex, -1));
    r.boundary.push_back(make_rect(lo, ex, ey, 1));
    r.boundary.push_back(make_rect({lo.x, lo.y, hi.z}, ex, ey, -1));
    return r;
}

// ---------------------------------------------------------------------------
// Membership and collar coordinates

bool SolidRegion::contains(const Vec3& x, double tol) const {
    switch (kind) {
        case RegionKind::Ball:
        case RegionKind::HalfBall:
        case RegionKind::CollarShell: {
            const Vec3 d = x - center;
            const double r = norm(d);
            if (!(r < radius - tol && r > r_inner + tol)) return false;
            const auto f = spherical_faces(*this);
            if (f.flat >= 0 && !(f.flat_sign * d.z > tol)) return false;
            return true;
        }
        case RegionKind::Cylinder: {
            const Vec3 d = x - center;
            const double rho = std::hypot(d.x, d.y);
            return rho < radius - tol && d.z > z0 + tol && d.z < z1 - tol;
        }
        case RegionKind::Box:
            return x.x > lo.x + tol && x.x < hi.x - tol && x.y > lo.y + tol && x.y < hi.y - tol &&
                   x.z > lo.z + tol && x.z < hi.z - tol;
    }
    return false;
}

int SolidRegion::nearest_face(const Vec3& x) const {
    const Vec3 d = x - center;
    if (spherical(kind)) {
        const auto f = spherical_faces(*this);
        const double r = norm(d);
        double best = radius - r;
        int bf = f.outer;
        if (f.inner >= 0 && r - r_inner < best) {
            best = r - r_inner;
            bf = f.inner;
        }
        if (f.flat >= 0 && f.flat_sign * d.z < best) bf = f.flat;
        return bf;
    }
    if (kind == RegionKind::Cylinder) {
        const double rho = std::hypot(d.x, d.y);
        const double dz0 = d.z - z0, dz1 = z1 - d.z, ds = radius - rho;
        if (dz0 <= dz1 && dz0 <= ds) return 0;
        if (dz1 <= ds) return 1;
        return 2;
    }
    int face = 0;
    box_radial_extent(*this, d, &face);
    return face;
}

double SolidRegion::depth(const Vec3& x) const {
    const Vec3 d = x - center;
    if (spherical(kind)) {
        const auto f = spherical_faces(*this);
        const double r = norm(d);
        double best = radius - r;
        if (f.inner >= 0) best = std::min(best, r - r_inner);
        if (f.flat >= 0) best = std::min(best, f.flat_sign * d.z);
        return best;
    }
    if (kind == RegionKind::Cylinder) {
        const double rho = std::hypot(d.x, d.y);
        return std::min(std::min(d.z - z0, z1 - d.z), radius - rho);
    }
    const double n = norm(d);
    if (n == 0.0) return 0.5 * std::min(std::min(hi.x - lo.x, hi.y - lo.y), hi.z - lo.z);
    return box_radial_extent(*this, d, nullptr) - n;
}

Vec3 SolidRegion::depth_gradient(const Vec3& x) const {
    const Vec3 d = x - center;
    const int face = nearest_face(x);
    if (spherical(kind)) {
        const auto f = spherical_faces(*this);
        if (face == f.outer) return -normalized(d);
        if (face == f.inner) return normalized(d);
        return f.flat_sign * kE3;
    }
    if (kind == RegionKind::Cylinder) {
        if (face == 0) return kE3;
        if (face == 1) return -kE3;
        return -normalized(Vec3{d.x, d.y, 0.0});
    }
    const int i = face / 2;
    const Vec3 H = 0.5 * (hi - lo);
    const double n = norm(d);
    const double di = d[i];
    Vec3 g = (H[i] / std::fabs(di) - 1.0) * (d / n);
    g[i] -= n * H[i] * (di > 0 ? 1.0 : -1.0) / (di * di);
    return g;
}

Vec3 SolidRegion::transversal_field(const Vec3& y, int face) const {
    const Vec3 d = y - center;
    if (spherical(kind)) {
        const auto f = spherical_faces(*this);
        if (face == f.outer) return normalized(d);
        if (face == f.inner) return -normalized(d);
        return -f.flat_sign * kE3;
    }
    if (kind == RegionKind::Cylinder) {
        if (face == 0) return -kE3;
        if (face == 1) return kE3;
        return normalized(Vec3{d.x, d.y, 0.0});
    }
    return normalized(d);
}

std::optional<CollarPoint> SolidRegion::collar_invert(const Vec3& x) const {
    const Vec3 d = x - center;
    const int face = nearest_face(x);
    CollarPoint cp;
    cp.face = face;
    cp.s = depth(x);
    if (spherical(kind)) {
        const auto f = spherical_faces(*this);
        const double r = norm(d);
        if (face == f.flat) {
            cp.y = x - d.z * kE3;
        } else {
            if (r == 0.0) return std::nullopt;
            cp.y = center + (face == f.outer ? radius : r_inner) * (d / r);
        }
        return cp;
    }
    if (kind == RegionKind::Cylinder) {
        if (face == 0) {
            cp.y = {x.x, x.y, center.z + z0};
        } else if (face == 1) {
            cp.y = {x.x, x.y, center.z + z1};
        } else {
            const double rho = std::hypot(d.x, d.y);
            if (rho == 0.0) return std::nullopt;
            cp.y = {center.x + radius * d.x / rho, center.y + radius * d.y / rho, x.z};
        }
        return cp;
    }
    const double n = norm(d);
    if (n == 0.0) return std::nullopt;
    cp.y = center + box_radial_extent(*this, d, nullptr) * (d / n);
    return cp;
}

double SolidRegion::collar_width() const {
    if (spherical(kind)) {
        const auto f = spherical_faces(*this);
        double w = radius - r_inner;
        if (f.inner >= 0 || f.flat >= 0) w *= 0.5;
        return w;
    }
    if (kind == RegionKind::Cylinder) return std::min(radius, 0.5 * (z1 - z0));
    const Vec3 H = 0.5 * (hi - lo);
    return std::min(std::min(H.x, H.y), H.z);
}

// ---------------------------------------------------------------------------
// Quadrature

VolumeRule SolidRegion::volume_rule(int n) const {
    VolumeRule vr;
    if (spherical(kind)) {
        const Rule1D rr = gauss_legendre(n, r_inner, radius);
        const Rule1D rc = gauss_legendre(n, std::cos(colat_hi), std::cos(colat_lo));
        const Rule1D rp = trapezoid_periodic(2 * n, 0.0, 2.0 * kPi);
        for (std::size_t i = 0; i < rr.nodes.size(); ++i)
            for (std::size_t j = 0; j < rc.nodes.size(); ++j) {
                const double r = rr.nodes[i], c = rc.nodes[j], s = std::sqrt(std::max(0.0, 1.0 - c * c));
                for (std::size_t k = 0; k < rp.nodes.size(); ++k) {
                    const double p = rp.nodes[k];
                    vr.x.push_back(center + r * Vec3{s * std::cos(p), s * std::sin(p), c});
                    vr.w.push_back(rr.weights[i] * rc.weights[j] * rp.weights[k] * r * r);
                }
            }
        return vr;
    }
    if (kind == RegionKind::Cylinder) {
        const Rule1D rr = gauss_legendre(n, 0.0, radius);
        const Rule1D rz = gauss_legendre(n, z0, z1);
        const Rule1D rp = trapezoid_periodic(2 * n, 0.0, 2.0 * kPi);
        for (std::size_t i = 0; i < rr.nodes.size(); ++i)
            for (std::size_t k = 0; k < rp.nodes.size(); ++k)
                for (std::size_t j = 0; j < rz.nodes.size(); ++j) {
                    const double r = rr.nodes[i], p = rp.nodes[k];
                    vr.x.push_back(center + Vec3{r * std::cos(p), r * std::sin(p), rz.nodes[j]});
                    vr.w.push_back(rr.weights[i] * rp.weights[k] * rz.weights[j] * r);
                }
        return vr;
    }
    const Rule1D rx = gauss_legendre(n, lo.x, hi.x);
    const Rule1D ry = gauss_legendre(n, lo.y, hi.y);
    const Rule1D rz = gauss_legendre(n, lo.z, hi.z);
    for (std::size_t i = 0; i < rx.nodes.size(); ++i)
        for (std::size_t j = 0; j < ry.nodes.size(); ++j)
            for (std::size_t k = 0; k < rz.nodes.size(); ++k) {
                vr.x.push_back({rx.nodes[i], ry.nodes[j], rz.nodes[k]});
                vr.w.push_back(rx.weights[i] * ry.weights[j] * rz.weights[k]);
            }
    return vr;
}

ShellRule SolidRegion::shell_rule(double eps, int n) const {
    if (!(eps > 0.0) || eps > collar_width() + 1e-15)
        throw GeometryError("shell_rule: eps outside (0, collar width]");
    ShellRule sr;
    auto push = [&](const Vec3& x, double w, const Vec3& g) {
        sr.x.push_back(x);
        sr.w.push_back(w);
        sr.grad_depth.push_back(g);
    };
    if (spherical(kind)) {
        const auto f = spherical_faces(*this);
        const Rule1D rp = trapezoid_periodic(2 * n, 0.0, 2.0 * kPi);
        auto sphere_piece = [&](double ra, double rb, bool outer) {
            const Rule1D rr = gauss_legendre(n, ra, rb);
            for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
                const double r = rr.nodes[i];
                const double dep = outer ? radius - r : r - r_inner;
                double clo = std::cos(colat_hi), chi = std::cos(colat_lo);
                if (f.flat_sign > 0) clo = std::max(clo, dep / r);
                if (f.flat_sign < 0) chi = std::min(chi, -dep / r);
                if (!(chi > clo)) continue;
                const Rule1D rc = gauss_legendre(n, clo, chi);
                for (std::size_t j = 0; j < rc.nodes.size(); ++j) {
                    const double c = rc.nodes[j], s = std::sqrt(std::max(0.0, 1.0 - c * c));
                    for (std::size_t k = 0; k < rp.nodes.size(); ++k) {
                        const double p = rp.nodes[k];
                        const Vec3 u{s * std::cos(p), s * std::sin(p), c};
                        push(center + r * u, rr.weights[i] * rc.weights[j] * rp.weights[k] * r * r,
                             outer ? -u : u);
                    }
                }
            }
        };
        sphere_piece(radius - eps, radius, true);
        if (f.inner >= 0) sphere_piece(r_inner, r_inner + eps, false);
        if (f.flat >= 0) {
            const Rule1D rz = gauss_legendre(n, 0.0, eps);
            for (std::size_t i = 0; i < rz.nodes.size(); ++i) {
                const double z = rz.nodes[i];
                const double rlo = std::sqrt(r_inner * r_inner + 2.0 * r_inner * z);
                const double rhi = std::sqrt(std::max(0.0, radius * radius - 2.0 * radius * z));
                if (!(rhi > rlo)) continue;
                const Rule1D rr = gauss_legendre(n, rlo, rhi);
                for (std::size_t j = 0; j < rr.nodes.size(); ++j)
                    for (std::size_t k = 0; k < rp.nodes.size(); ++k) {
                        const double rho = rr.nodes[j], p = rp.nodes[k];
                        push(center + Vec3{rho * std::cos(p), rho * std::sin(p), f.flat_sign * z},
                             rz.weights[i] * rr.weights[j] * rp.weights[k] * rho, f.flat_sign * kE3);
                    }
            }
        }
        return sr;
    }
    if (kind == RegionKind::Cylinder) {
        const Rule1D rp = trapezoid_periodic(2 * n, 0.0, 2.0 * kPi);
        const Rule1D rz = gauss_legendre(n, 0.0, eps);
        for (int side = 0; side < 2; ++side)
            for (std::size_t i = 0; i < rz.nodes.size(); ++i) {
                const double dz = rz.nodes[i];
                const Rule1D rr = gauss_legendre(n, 0.0, radius - dz);
                const double z = side == 0 ? z0 + dz : z1 - dz;
                for (std::size_t j = 0; j < rr.nodes.size(); ++j)
                    for (std::size_t k = 0; k < rp.nodes.size(); ++k) {
                        const double rho = rr.nodes[j], p = rp.nodes[k];
                        push(center + Vec3{rho * std::cos(p), rho * std::sin(p), z},
                             rz.weights[i] * rr.weights[j] * rp.weights[k] * rho, side == 0 ? kE3 : -kE3);
                    }
            }
        const Rule1D rd = gauss_legendre(n, 0.0, eps);
        for (std::size_t i = 0; i < rd.nodes.size(); ++i) {
            const double d = rd.nodes[i], rho = radius - d;
            const Rule1D rzz = gauss_legendre(n, z0 + d, z1 - d);
            for (std::size_t j = 0; j < rzz.nodes.size(); ++j)
                for (std::size_t k = 0; k < rp.nodes.size(); ++k) {
                    const double p = rp.nodes[k];
                    const Vec3 radial{std::cos(p), std::sin(p), 0.0};
                    push(center + rho * radial + Vec3{0, 0, rzz.nodes[j]},
                         rd.weights[i] * rzz.weights[j] * rp.weights[k] * rho, -radial);
                }
        }
        return sr;
    }
    // Box with the radial collar: x = c + (1 - s/|w|) w, w = y - c.
    const Rule1D rs = gauss_legendre(n, 0.0, eps);
    const Rule1D ra = gauss_legendre(n, 0.0, 1.0);
    for (const SurfacePatch& face : boundary) {
        const Vec3 fn = normalized(cross(face.edge_a, face.edge_b));
        const double area = norm(cross(face.edge_a, face.edge_b));
        for (std::size_t i = 0; i < ra.nodes.size(); ++i)
            for (std::size_t j = 0; j < ra.nodes.size(); ++j) {
                const Vec3 y = face.X(ra.nodes[i], ra.nodes[j]);
                const Vec3 w = y - center;
                const double nw = norm(w);
                const double cosang = std::fabs(dot(w, fn)) / nw;
                for (std::size_t k = 0; k < rs.nodes.size(); ++k) {
                    const double lam = 1.0 - rs.nodes[k] / nw;
                    const Vec3 x = center + lam * w;
                    push(x, ra.weights[i] * ra.weights[j] * rs.weights[k] * lam * lam * cosang * area,
                         depth_gradient(x));
                }
            }
    }
    return sr;
}

std::vector<SolidRegion> SolidRegion::complement_in(double ambient_radius) const {
    if (!spherical(kind)) throw GeometryError("complement_in: only the spherical family is supported");
    if (!(ambient_radius > radius)) throw GeometryError("complement_in: ambient ball must contain the region");
    std::vector<SolidRegion> out;
    if (r_inner > 0.0) out.push_back(make_spherical_sector(center, 0.0, r_inner, colat_lo, colat_hi));
    out.push_back(make_spherical_sector(center, radius, ambient_radius, colat_lo, colat_hi));
    if (colat_lo > 0.0) out.push_back(make_spherical_sector(center, 0.0, ambient_radius, 0.0, colat_lo));
    if (colat_hi < kPi - 1e-12) out.push_back(make_spherical_sector(center, 0.0, ambient_radius, colat_hi, kPi));
    return out;
}

double SolidRegion::boundary_area() const {
    double a = 0.0;
    for (const auto& p : boundary) a += surface_integral(p, [](const Vec3&) { return 1.0; }, 24, 48);
    return a;
}

// ---------------------------------------------------------------------------
// Transversal collar

Vec3 TransversalCollar::h(const Vec3& y) const { return region.transversal_field(y, region.nearest_face(y)); }

TransversalCollar build_transversal_collar(const SolidRegion& region) {
    TransversalCollar c;
    c.region = region;
    double kappa = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < region.boundary.size(); ++f) {
        const auto& p = region.boundary[f];
        const QuadratureRule q = surface_rule(p, 8, 16);
        for (const auto& [u, v] : q.nodes) {
            const Vec3 y = p.X(u, v);
            const Vec3 h = region.transversal_field(y, static_cast<int>(f));
            if (std::fabs(norm(h) - 1.0) > 1e-12) throw GeometryError("transversal collar: h is not unit length");
            kappa = std::min(kappa, -dot(p.normal(u, v), h));
        }
    }
    if (!(kappa > 0.0)) throw GeometryError("transversal collar: no positive transversality constant");
    c.kappa = kappa;

    // Per-face injectivity on a coarse (t, x) grid.
    const double w = region.collar_width();
    for (std::size_t f = 0; f < region.boundary.size() && c.injective; ++f) {
        const auto& p = region.boundary[f];
        std::vector<Vec3> pts;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 6; ++j) {
                const double u = p.u0 + (p.u1 - p.u0) * (i + 0.5) / 5.0;
                const double v = p.v0 + (p.v1 - p.v0) * (j + 0.5) / 6.0;
                const Vec3 y = p.X(u, v);
                for (int k = 0; k < 4; ++k) pts.push_back(c.phi(0.2 * k * w, y, static_cast<int>(f)));
            }
        for (std::size_t a = 0; a < pts.size() && c.injective; ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                if (norm(pts[a] - pts[b]) < 1e-12) {
                    c.injective = false;
                    break;
                }
    }
    return c;
}

int face_containing(const SolidRegion& region, const SurfacePatch& patch) {
    std::vector<Vec3> samples;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double u = patch.u0 + (patch.u1 - patch.u0) * (0.1 + 0.4 * i);
            const double v = patch.v0 + (patch.v1 - patch.v0) * (0.1 + 0.4 * j);
            samples.push_back(patch.X(u, v));
        }
    for (std::size_t f = 0; f < region.boundary.size(); ++f) {
        bool all = true;
        for (const Vec3& x : samples)
            if (!region.boundary[f].locate(x, 1e-9)) {
                all = false;
                break;
            }
        if (all) return static_cast<int>(f);
    }
    return -1;
}

BoundaryManifold shift_transversal(const BoundaryManifold& manifold, const TransversalCollar& collar, double t) {
    if (!(std::fabs(t) < 0.5)) throw GeometryError("shift_transversal: |t| must be below 1/2");
    if (std::fabs(t) >= collar.region.collar_width())
        throw GeometryError("shift_transversal: shifted manifold leaves the collar neighbourhood");
    if (t == 0.0) return manifold;
    const SurfacePatch& p = manifold.patch;
    const int face = face_containing(collar.region, p);
    if (face < 0) throw GeometryError("shift_transversal: manifold does not lie on a region face");
    const SurfacePatch& fp = collar.region.boundary[face];

    if (p.kind == PatchKind::Disk && fp.kind == PatchKind::Disk) {
        SurfacePatch q = p;
        q.center = p.center - t * collar.h(p.center, face);
        return make_manifold(q);
    }
    if (p.kind == PatchKind::Cap && fp.kind == PatchKind::Cap) {
        SurfacePatch q = p;
        const Vec3 probe = p.X(0.5 * (p.u0 + p.u1), p.v0);
        const double outward = dot(collar.h(probe, face), normalized(probe - p.center));
        q.radius = p.radius - t * outward;
        if (!(q.radius > 0.0)) throw GeometryError("shift_transversal: sphere collapses");
        return make_manifold(q);
    }
    const TransversalCollar cc = collar;
    SurfacePatch q = make_generic_patch(
        [p, cc, t, face](double u, double v) { return cc.phi(t, p.X(u, v), face); }, p.u0, p.u1, p.v0, p.v1,
        p.v_periodic, 1);
    q.polar_layout = p.polar();
    const double um = 0.5 * (p.u0 + p.u1), vm = 0.5 * (p.v0 + p.v1);
    if (dot(q.normal(um, vm), p.normal(um, vm)) < 0) q.normal_sign = -1;
    BoundaryManifold m;
    m.patch = q;
    if (!manifold.closed()) {
        Curve b = manifold.boundary;
        const Curve ob = manifold.boundary;
        b.gamma = [ob, cc, t, face](double w) { return cc.phi(t, ob.gamma(w), face); };
        b.dgamma = [ob, cc, t, face](double w) {
            const double h = 1e-6;
            return (cc.phi(t, ob.gamma(w + h), face) - cc.phi(t, ob.gamma(w - h), face)) / (2.0 * h);
        };
        m.boundary = b;
    }
    return m;
}

}  // namespace curlflux
