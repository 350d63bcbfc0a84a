#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curlflux/selection.hpp"

using namespace curlflux;

namespace {

struct Setup {
    SolidRegion cyl = make_cylinder({0, 0, 0}, 1.0, 0.25, 1.75);
    TransversalCollar tc = build_transversal_collar(cyl);
    BoundaryManifold base = make_manifold(make_disk({0, 0, 0.25}, {0, 0, 1}, 0.5));
};

VectorField constant(const Vec3& v) {
    VectorField f;
    f.name = "constant";
    f.eval = [v](const Vec3&) { return v; };
    f.analytic_curl = [](const Vec3&) { return Vec3{}; };
    return f;
}

}  // namespace

TEST_CASE("shell masses of a line and of a constant density") {
    const Setup s;
    // The axis crosses every shell over the disk with unit density.
    CHECK(shell_mass(catalog("line_vortex").curl, s.base, s.tc, 0.1, 0.35) == doctest::Approx(0.25).epsilon(1e-10));
    // |curl| = 2 over a cylinder of radius 1/2.
    CHECK(shell_mass(catalog("rigid_rotation").curl, s.base, s.tc, 0.1, 0.35) ==
          doctest::Approx(2.0 * 0.25 * kPi * 0.25).epsilon(1e-8));
    CHECK(shell_mass(catalog("rigid_rotation").curl, s.base, s.tc, 0.3, 0.3) == 0.0);
}

TEST_CASE("maximal function of bounded densities is flat in t") {
    const Setup s;
    const MaximalScan sc = maximal_transversal(catalog("rigid_rotation").curl, s.base, s.tc, {0.2, 0.3, 0.4});
    for (std::size_t i = 0; i < sc.t_grid.size(); ++i) {
        CHECK(sc.two_sided[i] == doctest::Approx(2.0 * 2.0 * kPi * 0.25).epsilon(1e-8));
        CHECK(sc.plus[i] == doctest::Approx(2.0 * kPi * 0.25).epsilon(1e-8));
        CHECK(sc.minus[i] == doctest::Approx(2.0 * kPi * 0.25).epsilon(1e-8));
        CHECK_FALSE(sc.infinite[i]);
    }
    const MaximalScan lv = maximal_transversal(catalog("line_vortex").curl, s.base, s.tc, {0.2, 0.3});
    for (double m : lv.two_sided) CHECK(m == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("a sheet on the layer makes the maximal function infinite there") {
    const Setup s;
    const VortexSheet vs = make_vortex_sheet(constant({1, 0, 0}), constant({}), make_disk({0, 0, 0.75}, {0, 0, 1}, 0.8));
    const MaximalScan sc = maximal_transversal(vs.curl, s.base, s.tc, {0.25, 0.5});
    CHECK_FALSE(sc.infinite[0]);
    CHECK(sc.two_sided[0] == 0.0);
    CHECK(sc.infinite[1]);
    CHECK(sc.layer_mass[1] == doctest::Approx(kPi * 0.25).epsilon(1e-6));
}

TEST_CASE("good set bound holds for the line vortex") {
    const Setup s;
    std::vector<double> tg;
    for (int i = 0; i <= 8; ++i) tg.push_back(0.05 * i);
    const MaximalScan sc = maximal_transversal(catalog("line_vortex").curl, s.base, s.tc, tg);
    for (int k = -4; k <= 4; ++k) {
        const GoodSetReport g = good_set_scan(sc, std::ldexp(1.0, k));
        CHECK(g.holds);
        CHECK(g.bad_measure <= g.bound);
        CHECK(g.good_t.size() + static_cast<std::size_t>(std::lround(g.bad_measure / 0.05)) == tg.size());
    }
    CHECK_THROWS(good_set_scan(sc, 0.0));
}

TEST_CASE("tangential maximal function of a bounded trace") {
    const BoundaryManifold disk = make_manifold(make_disk({0, 0, 0}, {0, 0, 1}, 1.0));
    const TangentialCollar c = build_tangential_collar(disk);
    const SurfaceField G = trace_field(catalog("rigid_rotation").field);
    const MaximalScan sc = maximal_tangential(G, disk, c, {0.3, 0.5});
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::isfinite(sc.two_sided[i]));
        CHECK_FALSE(sc.infinite[i]);
        CHECK(sc.two_sided[i] > 0.0);
    }
}

TEST_CASE("collar breaks sit at the annulus radii") {
    const BoundaryManifold disk = make_manifold(make_disk({0, 0, 0}, {0, 0, 1}, 1.0));
    const TangentialCollar c = build_tangential_collar(disk);
    const auto br = collar_breaks(catalog("annuli").trace.singular, c);
    REQUIRE_FALSE(br.empty());
    CHECK(std::is_sorted(br.begin(), br.end()));
    bool found_half = false;
    for (double b : br) found_half = found_half || std::fabs(b - 0.5) < 1e-12;
    CHECK(found_half);
}

TEST_CASE("default eps grid") {
    const auto g = default_eps_grid();
    CHECK(g.size() == 11);
    CHECK(g.front() == 0.25);
    CHECK(g.back() == std::ldexp(1.0, -12));
}
