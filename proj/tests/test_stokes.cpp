#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curlflux/stokes.hpp"

using namespace curlflux;

namespace {

BoundaryManifold unit_disk() { return make_manifold(make_disk({0, 0, 0}, {0, 0, 1}, 1.0)); }

double annuli_value(int j) { return kPi * ((j % 2) ? 1.0 : -1.0) * (2.0 / 3.0 - 0.6 * std::ldexp(1.0, -j)); }

VectorField constant(const Vec3& v) {
    VectorField f;
    f.name = "constant";
    f.eval = [v](const Vec3&) { return v; };
    f.analytic_curl = [](const Vec3&) { return Vec3{}; };
    return f;
}

}  // namespace

TEST_CASE("default delta sequence") {
    const auto d = default_delta_seq();
    CHECK(d.size() == 11);
    CHECK(d.front() == 0.25);
    CHECK(d.back() == std::ldexp(1.0, -12));
}

TEST_CASE("annuli localizer values follow the closed form and do not converge at t = 0") {
    const BoundaryManifold disk = unit_disk();
    StokesOptions o;
    for (int j = 1; j <= 6; ++j) o.deltas.push_back(std::ldexp(1.0, -j));
    const StokesResult r = stokes_tangential(catalog("annuli").trace, disk, build_tangential_collar(disk), 0.0, {}, o);
    for (int j = 1; j <= 6; ++j) CHECK(r.localizer[j - 1] == doctest::Approx(annuli_value(j)).epsilon(1e-9));
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.extrapolated.has_value());
    CHECK(r.t_osc > 4.0);
}

TEST_CASE("annuli functional converges once the collar layer clears the annuli") {
    const BoundaryManifold disk = unit_disk();
    const StokesResult r = stokes_tangential(catalog("annuli").trace, disk, build_tangential_collar(disk), 0.3);
    CHECK(r.converged);
    REQUIRE(r.extrapolated.has_value());
    CHECK(std::isfinite(*r.extrapolated));
}

TEST_CASE("rigid rotation flux equals the circulation") {
    const BoundaryManifold disk = unit_disk();
    const FluxReport f = vorticity_flux(trace_field(catalog("rigid_rotation").field), disk,
                                        build_tangential_collar(disk), 0.0);
    CHECK(f.flux == doctest::Approx(2.0 * kPi).epsilon(1e-10));
    CHECK(f.cutoff_gap < 1e-8);
}

TEST_CASE("flux is linear in the trace") {
    const BoundaryManifold disk = unit_disk();
    const TangentialCollar c = build_tangential_collar(disk);
    const SurfaceField G = trace_field(catalog("rigid_rotation").field);
    const SurfaceField G3{"triple", [G](const Vec3& x, const Vec3& nu) { return -3.0 * G(x, nu); }, {}};
    CHECK(vorticity_flux(G3, disk, c, 0.0).flux == doctest::Approx(-6.0 * kPi).epsilon(1e-10));
}

TEST_CASE("line vortex flux through an axis disk by the tangential and mass routes") {
    const BoundaryManifold d = make_manifold(make_disk({0, 0, 0.5}, {0, 0, 1}, 0.5));
    const TangentialCollar c = build_tangential_collar(d);
    const SurfaceField G = trace_field(catalog("line_vortex").field);
    CHECK(vorticity_flux(G, d, c, 0.0).flux == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(boundary_pairing_mass(G, d, c, 0.0).mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("flux through a disk missing the axis vanishes") {
    const BoundaryManifold d = make_manifold(make_disk({0.6, 0.0, 0.5}, {0, 0, 1}, 0.3));
    const SurfaceField G = trace_field(catalog("line_vortex").field);
    CHECK(std::fabs(vorticity_flux(G, d, build_tangential_collar(d), 0.0).flux) < 1e-8);
}

TEST_CASE("transversal route refuses on a sheet layer") {
    const SolidRegion cyl = make_cylinder({0, 0, 0}, 1.0, 0.25, 1.75);
    const VortexSheet vs = make_vortex_sheet(constant({1, 0, 0}), constant({}), make_disk({0, 0, 0.75}, {0, 0, 1}, 0.8));
    const BoundaryManifold base = make_manifold(make_disk({0, 0, 0.25}, {0, 0, 1}, 0.5));
    CHECK_THROWS_AS(stokes_transversal(vs.field.as_field(), vs.curl, base, build_transversal_collar(cyl), 0.5),
                    StokesRefusal);
}

TEST_CASE("stokes density of the rigid rotation is minus F dot tau") {
    const BoundaryManifold disk = unit_disk();
    const TangentialCollar c = build_tangential_collar(disk);
    const Vec3 x0{std::cos(0.4), std::sin(0.4), 0.0};
    const StokesDensity d = stokes_density(trace_field(catalog("rigid_rotation").field), disk, c, 0.0, x0,
                                           {0.125, 0.0625, 0.03125});
    // F(x0) = (-y0, x0, 0) and tau = e3 x (-x0) give F . tau = -1.
    CHECK(d.estimates.back() == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("smooth validators vanish for polynomial fields") {
    const ValidatorReport v = smooth_validators(catalog("rigid_rotation").field, make_half_ball({0, 0, 0}, 1.0, true));
    CHECK(v.max() < 1e-10);
}

TEST_CASE("faraday face residuals") {
    const SurfacePatch face = make_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    CHECK(faraday_face_check(plane_wave_em(0.3), face) < 1e-10);
    CHECK(faraday_face_check(random_em_pair(2), face) < 1e-8);
}

TEST_CASE("rankine-hugoniot residuals of a constructed sheet") {
    const VortexSheet vs = make_vortex_sheet(constant({1, 0, 0}), constant({}), make_disk({0, 0, 0}, {0, 0, 1}, 1.0));
    const RHResidual rh = rankine_hugoniot_check(vs);
    CHECK(rh.normal == 0.0);
    CHECK(rh.tangential < 1e-12);
}

TEST_CASE("manifold divergence of a rotation field is zero") {
    const BoundaryManifold disk = unit_disk();
    const SurfaceField v = surface_field("rot", [](const Vec3& x) { return Vec3{-x.y, x.x, 0.0}; });
    const ManifoldDivMeasure m = manifold_div_measure(v, disk, 4);
    CHECK(m.atoms.empty());
    CHECK(m.jumps.empty());
    CHECK(std::fabs(m.ac_divergence(0.5, 1.0)) < 1e-6);
    CHECK_FALSE(m.unbounded);
}

TEST_CASE("manifold divergence rejects normal fields") {
    const BoundaryManifold disk = unit_disk();
    CHECK_THROWS(manifold_div_measure(surface_field("n", [](const Vec3&) { return Vec3{0, 0, 1}; }), disk));
}
