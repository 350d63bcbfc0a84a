#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "curlflux/geometry.hpp"
#include "curlflux/quadrature.hpp"
#include "curlflux/region.hpp"

using namespace curlflux;

TEST_CASE("gauss-legendre integrates polynomials up to degree 2n-1") {
    for (int n : {2, 5, 12}) {
        const Rule1D r = gauss_legendre(n, -0.5, 2.0);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            const double got = integrate(r, [deg](double x) { return std::pow(x, deg); });
            const double exact = (std::pow(2.0, deg + 1) - std::pow(-0.5, deg + 1)) / (deg + 1);
            CHECK(got == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("periodic trapezoid is spectrally accurate") {
    const Rule1D r = trapezoid_periodic(32, 0.0, 2.0 * kPi);
    const double got = integrate(r, [](double t) { return std::exp(std::cos(t)); });
    CHECK(got == doctest::Approx(2.0 * kPi * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("richardson table removes even powers") {
    std::vector<double> seq;
    for (int k = 0; k < 6; ++k) {
        const double h = std::ldexp(1.0, -k);
        seq.push_back(3.0 + 2.0 * h + 5.0 * h * h);
    }
    const auto tab = richardson_table(seq, 3);
    REQUIRE(tab.size() >= 3);
    CHECK(tab[2].back() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("aitken recovers a geometric limit") {
    const double q = 0.3, L = 1.25;
    CHECK(aitken(L + q, L + q * q, L + q * q * q) == doctest::Approx(L).epsilon(1e-13));
}

TEST_CASE("patch areas") {
    CHECK(surface_integral(make_disk({0, 0, 1}, {0, 0, 1}, 0.7), [](const Vec3&) { return 1.0; }) ==
          doctest::Approx(kPi * 0.49).epsilon(1e-12));
    CHECK(surface_integral(make_sphere({1, 2, 3}, 2.0, true), [](const Vec3&) { return 1.0; }, 32, 64) ==
          doctest::Approx(16.0 * kPi).epsilon(1e-10));
    CHECK(surface_integral(make_rect({0, 0, 0}, {2, 0, 0}, {0, 3, 0}), [](const Vec3&) { return 1.0; }) ==
          doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("locate inverts the patch map") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const std::vector<SurfacePatch> patches = {make_disk({0.1, 0, 0.5}, normalized(Vec3{1, 1, 1}), 0.8),
                                               make_rect({0, 0, 0}, {1, 0, 0}, {0, 2, 0}),
                                               make_sphere({0, 0, 0}, 1.5, false)};
    for (const auto& p : patches) {
        for (int k = 0; k < 50; ++k) {
            const double u = p.u0 + (0.05 + 0.9 * U(rng)) * (p.u1 - p.u0);
            const double v = p.v0 + (0.05 + 0.9 * U(rng)) * (p.v1 - p.v0);
            const auto uv = p.locate(p.X(u, v));
            REQUIRE(uv.has_value());
            CHECK(norm(p.X(uv->first, uv->second) - p.X(u, v)) < 1e-10);
        }
        CHECK_FALSE(p.locate(p.X(0.5 * (p.u0 + p.u1), 0.3) + 0.1 * p.normal(0.5 * (p.u0 + p.u1), 0.3)).has_value());
    }
}

TEST_CASE("boundary frame is orthonormal with tau = nu x conormal") {
    const BoundaryManifold m = make_manifold(make_disk({0, 0, 0}, {0, 0, 1}, 1.0));
    const Rule1D r = line_rule(m.boundary, 16);
    for (double w : r.nodes) {
        const Vec3 nu = m.surface_normal_at_boundary(w);
        const Vec3 cn = m.conormal(w);
        const Vec3 tau = m.tangent(w);
        CHECK(std::fabs(norm(tau) - 1.0) < 1e-12);
        CHECK(std::fabs(dot(tau, nu)) < 1e-12);
        CHECK(std::fabs(dot(tau, cn)) < 1e-12);
        CHECK(norm(tau - cross(nu, cn)) < 1e-12);
        // Inner conormal points to the centre of the unit disk.
        CHECK(norm(cn + m.boundary.gamma(w)) < 1e-12);
    }
}

TEST_CASE("tangential collar parameter vanishes on the boundary") {
    const BoundaryManifold m = make_manifold(make_disk({0, 0, 0}, {0, 0, 1}, 1.0));
    const TangentialCollar c = build_tangential_collar(m);
    CHECK(c.theta >= 2.0);
    CHECK(c.s_of(m.patch.u1, 0.3) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.s_of(0.5, 0.3) > 0.0);
    const double area = collar_layer_area(c, 0.2, 0.1);
    CHECK(area > 0.0);
}

TEST_CASE("region volumes") {
    auto vol = [](const SolidRegion& r) {
        const VolumeRule q = r.volume_rule(16);
        double s = 0.0;
        for (double w : q.w) s += w;
        return s;
    };
    CHECK(vol(make_ball({0, 0, 0}, 1.0)) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-10));
    CHECK(vol(make_half_ball({0, 0, 0}, 1.0, true)) == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-10));
    CHECK(vol(make_cylinder({0, 0, 0}, 0.5, 0.0, 2.0)) == doctest::Approx(0.5 * kPi).epsilon(1e-10));
    CHECK(vol(make_box({0, 0, 0}, {1, 2, 3})) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("region boundary normals point inward") {
    for (const auto& r : {make_ball({0, 0, 0}, 1.0), make_half_ball({0, 0, 0}, 1.0, true),
                          make_cylinder({0, 0, 0}, 1.0, 0.0, 1.0), make_box({-1, -1, -1}, {1, 1, 1})}) {
        for (const auto& p : r.boundary) {
            const double u = 0.5 * (p.u0 + p.u1), v = 0.3 * p.v0 + 0.7 * p.v1;
            CHECK(r.contains(p.X(u, v) + 1e-3 * p.normal(u, v)));
            CHECK_FALSE(r.contains(p.X(u, v) - 1e-3 * p.normal(u, v)));
        }
    }
}

TEST_CASE("transversal collar inverts its own map") {
    const SolidRegion hb = make_half_ball({0, 0, 0}, 1.0, true);
    const TransversalCollar tc = build_transversal_collar(hb);
    CHECK(tc.injective);
    const Vec3 y{0.3, 0.2, 0.0};
    const auto cp = hb.collar_invert(tc.phi(0.05, y, hb.nearest_face(y)));
    REQUIRE(cp.has_value());
    CHECK(cp->s == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(norm(cp->y - y) < 1e-9);
}

TEST_CASE("cutoff theta profile") {
    CHECK(cutoff_theta(0.0) == 1.0);
    CHECK(cutoff_theta(0.5) == 1.0);
    CHECK(cutoff_theta(1.0) == 0.0);
    CHECK(cutoff_theta(0.75) == doctest::Approx(0.5));
    double prev = 1.0;
    for (int k = 0; k <= 100; ++k) {
        const double v = cutoff_theta(0.5 + 0.005 * k);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}
