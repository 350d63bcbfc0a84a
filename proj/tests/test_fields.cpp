#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "curlflux/fields.hpp"
#include "curlflux/quadrature.hpp"

using namespace curlflux;

namespace {

VectorField constant(const Vec3& v) {
    VectorField f;
    f.name = "constant";
    f.eval = [v](const Vec3&) { return v; };
    f.analytic_curl = [](const Vec3&) { return Vec3{}; };
    return f;
}

}  // namespace

TEST_CASE("catalog lookup") {
    for (const auto& n : catalog_names()) CHECK(catalog(n).field.name == n);
    CHECK_THROWS_AS(catalog("no_such_field"), FieldError);
    CHECK_FALSE(catalog("annuli").has_curl);
    CHECK(catalog("annuli").trace.eval);
}

TEST_CASE("analytic curls agree with central differences away from singular sets") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-0.9, 0.9);
    for (const char* n : {"newtonian", "line_vortex", "rigid_rotation", "plane_wave_em"}) {
        const CatalogField c = catalog(n);
        for (int k = 0; k < 20; ++k) {
            const Vec3 x{U(rng), U(rng), U(rng)};
            if (c.field.singular.distance(x) < 0.2) continue;
            CHECK(norm(numeric_curl(c.field, x) - c.field.analytic_curl(x)) < 1e-6);
        }
    }
}

TEST_CASE("numeric curl refuses stencils touching the singular set") {
    const CatalogField lv = catalog("line_vortex");
    CHECK_THROWS_AS(numeric_curl(lv.field, {1e-6, 0, 0.3}), FieldError);
}

TEST_CASE("line vortex circulation is one around the axis") {
    const CatalogField lv = catalog("line_vortex");
    const Curve c = make_circle({0, 0, 0.4}, {1, 0, 0}, {0, 1, 0}, 0.37);
    const Rule1D r = line_rule(c, 64);
    double circ = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        circ += r.weights[i] * dot(lv.field(c.gamma(r.nodes[i])), c.dgamma(r.nodes[i]));
    CHECK(circ == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("total variation of catalog curls") {
    // Unit line density along the axis.
    CHECK(total_variation(catalog("line_vortex").curl, make_cylinder({0, 0, 0}, 1.0, 0.25, 1.75)) ==
          doctest::Approx(1.5).epsilon(1e-10));
    // |curl| = 2 on the unit ball.
    CHECK(total_variation(catalog("rigid_rotation").curl, make_ball({0, 0, 0}, 1.0)) ==
          doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-8));
    CHECK(catalog("newtonian").curl.zero());
}

TEST_CASE("measure integration against a test field") {
    const CatalogField rr = catalog("rigid_rotation");
    const double got = integrate_measure(rr.curl, [](const Vec3& x) { return Vec3{0, 0, x.z * x.z}; },
                                         make_box({0, 0, 0}, {1, 1, 1}));
    CHECK(got == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("vortex sheet jump and gluing total variation") {
    const VortexSheet vs = make_vortex_sheet(constant({1, 0, 0}), constant({}), make_disk({0, 0, 0}, {0, 0, 1}, 1.0));
    CHECK(vs.field.side({0, 0, 0.2}) == 1);
    CHECK(vs.field.side({0, 0, -0.2}) == -1);
    CHECK(norm(vs.field.eval({0.1, 0.1, 0.3}) - Vec3{1, 0, 0}) == 0.0);
    // n x jump = e3 x e1 = e2 over the unit disk.
    CHECK(norm(integrate_measure_scalar(vs.curl, [](const Vec3&) { return 1.0; }, make_ball({0, 0, 0}, 2.0)) -
               Vec3{0, kPi, 0}) < 1e-10);
    CHECK(gluing_total_variation(vs.field, make_ball({0, 0, 0}, 1.0)) == doctest::Approx(kPi).epsilon(1e-10));
    // A jump of size two doubles the sheet mass.
    const VortexSheet vs2 =
        make_vortex_sheet(constant({1, 0, 0}), constant({-1, 0, 0}), make_disk({0, 0, 0}, {0, 0, 1}, 1.0));
    CHECK(gluing_total_variation(vs2.field, make_ball({0, 0, 0}, 1.0)) == doctest::Approx(2.0 * kPi).epsilon(1e-10));
}

TEST_CASE("mollification preserves linear fields") {
    const CatalogField rr = catalog("rigid_rotation");
    const VectorField m = mollify(rr.field, 0.1);
    for (const Vec3& x : {Vec3{0.2, 0.1, 0.0}, Vec3{-0.4, 0.3, 0.5}}) CHECK(norm(m(x) - rr.field(x)) < 1e-12);
}

TEST_CASE("plane wave satisfies the Faraday law pointwise") {
    const EMPair em = plane_wave_em(0.3);
    for (const Vec3& x : {Vec3{0.1, 0.2, 0.3}, Vec3{0.7, -0.2, 0.0}}) {
        CHECK(norm(em.curl_E(x) + em.dt_H(x)) < 1e-12);
        CHECK(norm(fd_curl(em.E, x) - em.curl_E(x)) < 1e-6);
    }
}

TEST_CASE("random electromagnetic pairs are deterministic and consistent") {
    const EMPair a = random_em_pair(5), b = random_em_pair(5), c = random_em_pair(6);
    const Vec3 x{0.3, -0.1, 0.4};
    CHECK(norm(a.E(x) - b.E(x)) == 0.0);
    CHECK(norm(a.E(x) - c.E(x)) > 0.0);
    CHECK(norm(fd_curl(a.E, x) - a.curl_E(x)) < 1e-6);
    CHECK(norm(a.curl_E(x) + a.dt_H(x)) < 1e-12);
}

TEST_CASE("singular set distance") {
    const CatalogField lv = catalog("line_vortex");
    CHECK(lv.field.singular.distance({0.3, 0.4, 7.0}) == doctest::Approx(0.5));
    const CatalogField nw = catalog("newtonian");
    CHECK(nw.field.singular.distance({0.0, 0.3, 0.4}) == doctest::Approx(0.5));
}
