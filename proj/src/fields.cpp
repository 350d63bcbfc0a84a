#include "curlflux/fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace curlflux {

namespace {

constexpr Vec3 kE3{0, 0, 1};

// eta of the annuli example: (-1)^(k+1) on the ring 1 - 2^-k <= r < 1 - 2^-(k+1).
double annuli_eta(double r) {
    if (r < 0.5 || r >= 1.0) return 0.0;
    int e = 0;
    std::frexp(1.0 - r, &e);  // 1 - r in [2^(e-1), 2^e)
    const int k = -e;
    if (k < 1) return 0.0;
    return (k % 2 == 1) ? 1.0 : -1.0;
}

// Sign of the oscillating gradient field on dyadic layers |z| in [2^-(k+1), 2^-k).
double oscillation_sign(double z) {
    const double a = std::fabs(z);
    if (a >= 1.0 || a == 0.0) return 1.0;
    int e = 0;
    std::frexp(a, &e);  // a in [2^-(k+1), 2^-k) with k = -e
    return (e % 2 == 0) ? 1.0 : -1.0;
}

CatalogField make_newtonian() {
    CatalogField c;
    c.field.name = "newtonian";
    c.field.eval = [](const Vec3& x) {
        const double r = norm(x);
        return (-1.0 / (4.0 * kPi * r * r * r)) * x;
    };
    c.field.analytic_curl = [](const Vec3&) { return Vec3{}; };
    c.field.p = 1.4;
    c.field.singular.points.push_back({});
    return c;
}

CatalogField make_line_vortex() {
    CatalogField c;
    c.field.name = "line_vortex";
    c.field.eval = [](const Vec3& x) {
        const double r2 = x.x * x.x + x.y * x.y;
        return (1.0 / (2.0 * kPi)) * Vec3{-x.y / r2, x.x / r2, x.z};
    };
    c.field.analytic_curl = [](const Vec3&) { return Vec3{}; };
    c.field.p = 1.9;
    c.field.singular.lines.push_back({{}, kE3});
    LinePart axis;
    axis.curve = make_segment({0, 0, -2}, {0, 0, 2});
    axis.density = [](const Vec3&) { return kE3; };
    c.curl.lines.push_back(axis);
    return c;
}

CatalogField make_annuli() {
    CatalogField c;
    c.field.name = "annuli";
    c.field.eval = [](const Vec3& x) {
        const double r = std::hypot(x.x, x.y);
        const double eta = annuli_eta(r);
        if (eta == 0.0) return Vec3{};
        return (eta / r) * Vec3{x.y, -x.x, 0.0};
    };
    c.field.p = std::numeric_limits<double>::infinity();
    c.field.singular.cylinders.push_back({{}, kE3, 0.5});
    for (int k = 2; k <= 52; ++k) c.field.singular.cylinders.push_back({{}, kE3, 1.0 - std::ldexp(1.0, -k)});
    c.has_curl = false;
    c.trace = trace_field(c.field);
    return c;
}

CatalogField make_rigid_rotation() {
    CatalogField c;
    c.field.name = "rigid_rotation";
    c.field.eval = [](const Vec3& x) { return Vec3{-x.y, x.x, 0.0}; };
    c.field.analytic_curl = [](const Vec3&) { return Vec3{0, 0, 2}; };
    c.curl.lebesgue = [](const Vec3&) { return Vec3{0, 0, 2}; };
    return c;
}

CatalogField make_oscillating_gradient() {
    CatalogField c;
    c.field.name = "oscillating_gradient";
    c.field.eval = [](const Vec3& x) { return Vec3{0, 0, oscillation_sign(x.z)}; };
    c.field.analytic_curl = [](const Vec3&) { return Vec3{}; };
    for (int k = 0; k <= 60; ++k) {
        const double z = std::ldexp(1.0, -k);
        c.field.singular.planes.push_back({{0, 0, z}, kE3});
        c.field.singular.planes.push_back({{0, 0, -z}, kE3});
    }
    return c;
}

CatalogField make_plane_wave() {
    CatalogField c;
    const EMPair em = plane_wave_em(0.0);
    c.field.name = "plane_wave_em";
    c.field.eval = em.E;
    c.field.analytic_curl = em.curl_E;
    c.curl.lebesgue = em.curl_E;
    return c;
}

// Sub-intervals of [a, b] on which inside() holds, located by sampling and
// bisection.
std::vector<std::pair<double, double>> inside_intervals(double a, double b, const std::function<bool(double)>& inside,
                                                        int samples = 64) {
    std::vector<std::pair<double, double>> out;
    if (!(b > a)) return out;
    auto refine = [&](double lo, double hi, bool lo_in) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (inside(mid) == lo_in)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    double prev_s = a;
    bool prev_in = inside(a);
    double start = a;
    for (int i = 1; i <= samples; ++i) {
        const double s = a + (b - a) * i / samples;
        const bool in = inside(s);
        if (in != prev_in) {
            const double c = refine(prev_s, s, prev_in);
            if (in)
                start = c;
            else
                out.emplace_back(start, c);
        }
        prev_s = s;
        prev_in = in;
    }
    if (prev_in) out.emplace_back(start, b);
    return out;
}

}  // namespace

double SingularSet::distance(const Vec3& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const Vec3& p : points) d = std::min(d, norm(x - p));
    for (const Line& l : lines) {
        const Vec3 u = normalized(l.dir), w = x - l.point;
        d = std::min(d, norm(w - dot(w, u) * u));
    }
    for (const Plane& p : planes) d = std::min(d, std::fabs(dot(x - p.point, normalized(p.normal))));
    for (const Cylinder& c : cylinders) {
        const Vec3 u = normalized(c.axis), w = x - c.point;
        d = std::min(d, std::fabs(norm(w - dot(w, u) * u) - c.radius));
    }
    return d;
}

SurfaceField trace_field(const VectorField& F) {
    SurfaceField s;
    s.name = F.name + "_trace";
    auto eval = F.eval;
    s.eval = [eval](const Vec3& x, const Vec3& nu) { return cross(eval(x), nu); };
    s.singular = F.singular;
    return s;
}

SurfaceField surface_field(std::string name, VectorFn G, SingularSet singular) {
    SurfaceField s;
    s.name = std::move(name);
    s.eval = [G](const Vec3& x, const Vec3&) { return G(x); };
    s.singular = std::move(singular);
    return s;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"newtonian",      "line_vortex",          "annuli",
                                                "rigid_rotation", "oscillating_gradient", "plane_wave_em"};
    return names;
}

CatalogField catalog(const std::string& name) {
    if (name == "newtonian") return make_newtonian();
    if (name == "line_vortex") return make_line_vortex();
    if (name == "annuli") return make_annuli();
    if (name == "rigid_rotation") return make_rigid_rotation();
    if (name == "oscillating_gradient") return make_oscillating_gradient();
    if (name == "plane_wave_em") return make_plane_wave();
    throw FieldError("catalog: unknown field '" + name + "'");
}

Vec3 numeric_curl(const VectorField& field, const Vec3& x, double h) {
    if (!(h > 0.0)) throw FieldError("numeric_curl: step must be positive");
    if (field.singular.distance(x) <= 2.0 * h) throw FieldError("numeric_curl: stencil touches the singular set");
    return fd_curl(field.eval, x, h);
}

void visit_singular_parts(const CurlMeasure& mu, const std::function<bool(const Vec3&)>& inside, int order,
                          const std::function<void(const Vec3&, double, const Vec3&)>& g, int samples,
                          int panels) {
    auto rule = [order, panels](double a, double b) {
        std::vector<double> br;
        for (int k = 0; k <= panels; ++k) br.push_back(a + (b - a) * k / panels);
        return composite_gauss(br, order);
    };
    for (const SheetPart& sh : mu.sheets) {
        const SurfacePatch& p = sh.patch;
        const Rule1D rv = p.v_periodic ? trapezoid_periodic(2 * order, p.v0, p.v1 - p.v0)
                                       : gauss_legendre(order, p.v0, p.v1);
        for (std::size_t j = 0; j < rv.nodes.size(); ++j) {
            const double v = rv.nodes[j];
            const auto pieces = inside_intervals(
                p.u0, p.u1, [&](double u) { return inside(p.X(u, v)); }, samples);
            for (const auto& [ua, ub] : pieces) {
                const Rule1D ru = rule(ua, ub);
                for (std::size_t i = 0; i < ru.nodes.size(); ++i) {
                    const double u = ru.nodes[i];
                    const Vec3 x = p.X(u, v);
                    g(x, rv.weights[j] * ru.weights[i] * p.jacobian(u, v), sh.density(x));
                }
            }
        }
    }
    for (const LinePart& ln : mu.lines) {
        const Curve& c = ln.curve;
        std::vector<double> br{c.a};
        for (double k : c.corners) br.push_back(k);
        br.push_back(c.b);
        for (std::size_t k = 0; k + 1 < br.size(); ++k) {
            const auto pieces = inside_intervals(
                br[k], br[k + 1], [&](double w) { return inside(c.gamma(w)); }, samples);
            for (const auto& [wa, wb] : pieces) {
                const Rule1D rw = rule(wa, wb);
                for (std::size_t i = 0; i < rw.nodes.size(); ++i) {
                    const Vec3 x = c.gamma(rw.nodes[i]);
                    g(x, rw.weights[i] * norm(c.dgamma(rw.nodes[i])), ln.density(x));
                }
            }
        }
    }
}

void visit_measure(const CurlMeasure& mu, const SolidRegion& region, int order,
                   const std::function<void(const Vec3&, double, const Vec3&)>& g, int panels) {
    if (mu.lebesgue) {
        const VolumeRule vr = region.volume_rule(order);
        for (std::size_t i = 0; i < vr.x.size(); ++i) g(vr.x[i], vr.w[i], mu.lebesgue(vr.x[i]));
    }
    visit_singular_parts(mu, [&](const Vec3& x) { return region.contains(x); }, order, g, 64, panels);
}

double integrate_measure(const CurlMeasure& mu, const VectorFn& testfn, const SolidRegion& region, int order) {
    double acc = 0.0;
    visit_measure(mu, region, order, [&](const Vec3& x, double w, const Vec3& d) {
        const Vec3 t = testfn(x);
        if (!is_finite(t)) throw FieldError("integrate_measure: non-finite test function value");
        acc += w * dot(t, d);
    });
    return acc;
}

Vec3 integrate_measure_scalar(const CurlMeasure& mu, const ScalarFn& phi, const SolidRegion& region, int order) {
    Vec3 acc{};
    visit_measure(mu, region, order, [&](const Vec3& x, double w, const Vec3& d) { acc += (w * phi(x)) * d; });
    return acc;
}

double total_variation(const CurlMeasure& mu, const SolidRegion& region, int order) {
    double acc = 0.0;
    visit_measure(mu, region, order, [&](const Vec3&, double w, const Vec3& d) { acc += w * norm(d); });
    return acc;
}

// ---------------------------------------------------------------------------
// Piecewise fields

namespace {

Vec3 interface_normal(const SurfacePatch& p, const Vec3& x) {
    if (p.kind == PatchKind::Cap) {
        const Vec3 r = normalized(x - p.center);
        const Vec3 n0 = p.normal(0.5 * (p.u0 + p.u1), p.v0);
        const Vec3 r0 = normalized(p.X(0.5 * (p.u0 + p.u1), p.v0) - p.center);
        return dot(n0, r0) > 0 ? r : -r;
    }
    return p.normal(0.5 * (p.u0 + p.u1), 0.5 * (p.v0 + p.v1));
}

bool canonical_interface(const SurfacePatch& p) {
    return p.kind == PatchKind::Disk || p.kind == PatchKind::Rect || p.kind == PatchKind::Cap;
}

}  // namespace

int PiecewiseField::side(const Vec3& x) const {
    double s = 0.0;
    if (interface.kind == PatchKind::Cap) {
        const Vec3 n0 = interface.normal(0.5 * (interface.u0 + interface.u1), interface.v0);
        const Vec3 r0 = interface.X(0.5 * (interface.u0 + interface.u1), interface.v0) - interface.center;
        s = (norm(x - interface.center) - interface.radius) * (dot(n0, r0) > 0 ? 1.0 : -1.0);
    } else {
        const Vec3 n = interface_normal(interface, x);
        s = dot(x - interface.X(interface.u0, interface.v0), n);
    }
    return s > 0 ? 1 : (s < 0 ? -1 : 0);
}

Vec3 PiecewiseField::eval(const Vec3& x) const {
    const int s = side(x);
    if (s > 0) return plus.eval(x);
    if (s < 0) return minus.eval(x);
    return {std::nan(""), std::nan(""), std::nan("")};
}

Vec3 PiecewiseField::trace_plus(double u, double v) const {
    const Vec3 x = interface.X(u, v);
    return plus.eval(x + offset * interface_normal(interface, x));
}

Vec3 PiecewiseField::trace_minus(double u, double v) const {
    const Vec3 x = interface.X(u, v);
    return minus.eval(x - offset * interface_normal(interface, x));
}

VectorField PiecewiseField::as_field() const {
    VectorField f;
    f.name = plus.name + "|" + minus.name;
    const PiecewiseField self = *this;
    f.eval = [self](const Vec3& x) { return self.eval(x); };
    f.p = std::min(plus.p, minus.p);
    f.singular = plus.singular;
    for (const auto& q : minus.singular.points) f.singular.points.push_back(q);
    for (const auto& q : minus.singular.lines) f.singular.lines.push_back(q);
    for (const auto& q : minus.singular.planes) f.singular.planes.push_back(q);
    for (const auto& q : minus.singular.cylinders) f.singular.cylinders.push_back(q);
    if (interface.kind == PatchKind::Cap)
        f.singular.points.push_back(interface.center);
    else
        f.singular.planes.push_back({interface.X(interface.u0, interface.v0), interface_normal(interface, {})});
    return f;
}

namespace {

VectorFn curl_of(const VectorField& f) {
    if (f.analytic_curl) return f.analytic_curl;
    auto e = f.eval;
    return [e](const Vec3& x) { return fd_curl(e, x, 1e-5); };
}

}  // namespace

VortexSheet make_vortex_sheet(const VectorField& u_plus, const VectorField& u_minus, const SurfacePatch& interface) {
    if (!canonical_interface(interface))
        throw FieldError("make_vortex_sheet: interface must be a disk, rectangle or spherical cap");
    VortexSheet vs;
    vs.field.interface = interface;
    vs.field.plus = u_plus;
    vs.field.minus = u_minus;

    const PiecewiseField pf = vs.field;
    SheetPart sheet;
    sheet.patch = interface;
    sheet.density = [pf](const Vec3& x) {
        const Vec3 n = interface_normal(pf.interface, x);
        const Vec3 jump = pf.plus.eval(x + pf.offset * n) - pf.minus.eval(x - pf.offset * n);
        return cross(n, jump);
    };
    vs.curl.sheets.push_back(sheet);

    const VectorFn cp = curl_of(u_plus), cm = curl_of(u_minus);
    vs.curl.lebesgue = [pf, cp, cm](const Vec3& x) {
        const int s = pf.side(x);
        if (s > 0) return cp(x);
        if (s < 0) return cm(x);
        return Vec3{};
    };
    return vs;
}

double clipped_volume_integral(const SolidRegion& region, const ScalarFn& f, const std::function<bool(const Vec3&)>& keep,
                               const Vec3& axis_in, int order) {
    const Vec3 axis = normalized(axis_in);
    const auto fr = tangent_frame(axis);
    auto line = [&](const Vec3& base, double half) {
        auto inside = [&](double t) {
            const Vec3 x = base + t * axis;
            return region.contains(x) && keep(x);
        };
        double acc = 0.0;
        for (const auto& [ta, tb] : inside_intervals(-half, half, inside, 48)) {
            const Rule1D rt = gauss_legendre(order, ta, tb);
            for (std::size_t i = 0; i < rt.nodes.size(); ++i) acc += rt.weights[i] * f(base + rt.nodes[i] * axis);
        }
        return acc;
    };

    const bool axis_is_e3 = norm(cross(axis, kE3)) < 1e-14;
    if (region.kind == RegionKind::Box) {
        // Rectangular cross-section when the axis is a coordinate direction.
        int ax = -1;
        for (int i = 0; i < 3; ++i)
            if (std::fabs(std::fabs(axis[i]) - 1.0) < 1e-14) ax = i;
        if (ax >= 0) {
            const int i1 = (ax + 1) % 3, i2 = (ax + 2) % 3;
            const Rule1D r1 = gauss_legendre(order, region.lo[i1], region.hi[i1]);
            const Rule1D r2 = gauss_legendre(order, region.lo[i2], region.hi[i2]);
            const Vec3 mid = 0.5 * (region.lo + region.hi);
            const double half = 0.5 * (region.hi[ax] - region.lo[ax]) * 1.01;
            double acc = 0.0;
            for (std::size_t a = 0; a < r1.nodes.size(); ++a)
                for (std::size_t b = 0; b < r2.nodes.size(); ++b) {
                    Vec3 base = mid;
                    base[i1] = r1.nodes[a];
                    base[i2] = r2.nodes[b];
                    acc += r1.weights[a] * r2.weights[b] * line(base, half);
                }
            return acc;
        }
    }

    Vec3 c = region.center;
    double rho_max = region.radius, half = region.radius;
    if (region.kind == RegionKind::Cylinder) {
        const double hz = 0.5 * (region.z1 - region.z0);
        c = region.center + Vec3{0, 0, 0.5 * (region.z0 + region.z1)};
        half = std::hypot(region.radius, hz);
        rho_max = axis_is_e3 ? region.radius : half;
    } else if (region.kind == RegionKind::Box) {
        c = 0.5 * (region.lo + region.hi);
        half = 0.5 * norm(region.hi - region.lo);
        rho_max = half;
    }
    half *= 1.01;
    // rho = rho_max (1 - (1 - w)^2) removes the square-root edge behaviour.
    const Rule1D rw = gauss_legendre(order, 0.0, 1.0);
    const Rule1D rp = trapezoid_periodic(2 * order, 0.0, 2.0 * kPi);
    double acc = 0.0;
    for (std::size_t i = 0; i < rw.nodes.size(); ++i) {
        const double w = rw.nodes[i];
        const double rho = rho_max * (1.0 - (1.0 - w) * (1.0 - w));
        const double drho = 2.0 * rho_max * (1.0 - w);
        for (std::size_t j = 0; j < rp.nodes.size(); ++j) {
            const double p = rp.nodes[j];
            const Vec3 base = c + rho * (std::cos(p) * fr[0] + std::sin(p) * fr[1]);
            acc += rw.weights[i] * drho * rho * rp.weights[j] * line(base, half);
        }
    }
    return acc;
}

double gluing_total_variation(const PiecewiseField& field, const SolidRegion& region, int order) {
    const SurfacePatch& p = field.interface;
    const Vec3 axis = interface_normal(p, p.X(0.5 * (p.u0 + p.u1), 0.5 * (p.v0 + p.v1)));
    const VectorFn cp = curl_of(field.plus), cm = curl_of(field.minus);
    const double plus_tv = clipped_volume_integral(
        region, [&](const Vec3& x) { return norm(cp(x)); }, [&](const Vec3& x) { return field.side(x) > 0; }, axis,
        order);
    const double minus_tv = clipped_volume_integral(
        region, [&](const Vec3& x) { return norm(cm(x)); }, [&](const Vec3& x) { return field.side(x) < 0; }, axis,
        order);
    const VortexSheet vs = make_vortex_sheet(field.plus, field.minus, p);
    CurlMeasure sheet_only;
    sheet_only.sheets = vs.curl.sheets;
    return plus_tv + minus_tv + total_variation(sheet_only, region, order);
}

VectorField mollify(const VectorField& field, double delta, int n_radial, int n_polar, int n_azimuth) {
    if (!(delta > 0.0)) throw FieldError("mollify: delta must be positive");
    struct Node {
        Vec3 z;
        double w;
    };
    std::vector<Node> st;
    const Rule1D rr = gauss_legendre(n_radial, 0.0, 1.0);
    const Rule1D rc = gauss_legendre(n_polar, -1.0, 1.0);
    const Rule1D ra = trapezoid_periodic(n_azimuth, 0.0, 2.0 * kPi);
    double total = 0.0;
    for (std::size_t i = 0; i < rr.nodes.size(); ++i)
        for (std::size_t j = 0; j < rc.nodes.size(); ++j)
            for (std::size_t k = 0; k < ra.nodes.size(); ++k) {
                const double r = rr.nodes[i], c = rc.nodes[j], s = std::sqrt(1.0 - c * c), a = ra.nodes[k];
                const double w = rr.weights[i] * rc.weights[j] * ra.weights[k] * r * r * mollifier3(r);
                st.push_back({r * Vec3{s * std::cos(a), s * std::sin(a), c}, w});
                total += w;
            }
    for (Node& n : st) n.w /= total;

    VectorField out;
    out.name = field.name + "_mollified";
    auto e = field.eval;
    out.eval = [e, st, delta](const Vec3& x) {
        Vec3 acc{};
        for (const Node& n : st) acc += n.w * e(x - delta * n.z);
        return acc;
    };
    out.p = field.p;
    return out;
}

EMPair plane_wave_em(double time) {
    EMPair em;
    em.E = [time](const Vec3& x) { return Vec3{0.0, std::sin(2.0 * kPi * (x.x - time)), 0.0}; };
    em.curl_E = [time](const Vec3& x) { return Vec3{0.0, 0.0, 2.0 * kPi * std::cos(2.0 * kPi * (x.x - time))}; };
    em.dt_H = [time](const Vec3& x) { return Vec3{0.0, 0.0, -2.0 * kPi * std::cos(2.0 * kPi * (x.x - time))}; };
    return em;
}

EMPair random_em_pair(std::uint64_t seed, int n_modes) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), wave(-3.0, 3.0), phase(0.0, 2.0 * kPi);
    struct Mode {
        Vec3 a, k;
        double phi;
    };
    std::vector<Mode> modes;
    for (int m = 0; m < n_modes; ++m) {
        Mode md;
        md.a = {amp(rng), amp(rng), amp(rng)};
        md.k = {wave(rng), wave(rng), wave(rng)};
        md.phi = phase(rng);
        modes.push_back(md);
    }
    EMPair em;
    em.E = [modes](const Vec3& x) {
        Vec3 acc{};
        for (const Mode& m : modes) acc += std::sin(dot(m.k, x) + m.phi) * m.a;
        return acc;
    };
    em.curl_E = [modes](const Vec3& x) {
        Vec3 acc{};
        for (const Mode& m : modes) acc += std::cos(dot(m.k, x) + m.phi) * cross(m.k, m.a);
        return acc;
    };
    auto curl = em.curl_E;
    em.dt_H = [curl](const Vec3& x) { return -curl(x); };
    return em;
}

}  // namespace curlflux
