#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curlflux/quadrature.hpp"
#include "curlflux/traces.hpp"

using namespace curlflux;

namespace {

// int over the unit sphere of phi (F x nu) with the inner normal nu = -x.
Vec3 sphere_oracle(const VectorFn& F, const ScalarFn& phi) {
    const Rule1D rc = gauss_legendre(40, -1.0, 1.0);
    const Rule1D ra = trapezoid_periodic(80, 0.0, 2.0 * kPi);
    Vec3 acc;
    for (std::size_t i = 0; i < rc.nodes.size(); ++i) {
        const double c = rc.nodes[i], s = std::sqrt(1.0 - c * c);
        for (std::size_t k = 0; k < ra.nodes.size(); ++k) {
            const Vec3 x{s * std::cos(ra.nodes[k]), s * std::sin(ra.nodes[k]), c};
            acc += (rc.weights[i] * ra.weights[k] * phi(x)) * cross(F(x), -x);
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("layerwise trace of a smooth field is F x nu") {
    const CatalogField rr = catalog("rigid_rotation");
    const SolidRegion ball = make_ball({0, 0, 0}, 1.0);
    const TangentialTrace tr =
        estimate_trace_layerwise(rr.field, ball, build_transversal_collar(ball), default_layer_grid(), Side::Interior);
    REQUIRE_FALSE(tr.nodes.empty());
    CHECK(tr.non_converged == 0);
    for (const auto& n : tr.nodes) {
        CHECK(norm(n.value - cross(rr.field(n.x), n.nu)) < 1e-8);
        CHECK(n.residual < 1e-10);
    }
    CHECK(tr.sup_bound <= 1.0 + 1e-12);
    CHECK(tr.sup_bound > 0.9);
}

TEST_CASE("layerwise trace is tangential for the singular catalog fields") {
    const SolidRegion hb = make_half_ball({0, 0, 0}, 1.0, true);
    for (const char* n : {"line_vortex", "newtonian"}) {
        const TangentialTrace tr = estimate_trace_layerwise(catalog(n).field, hb, build_transversal_collar(hb),
                                                            default_layer_grid(), Side::Interior);
        CHECK(tr.max_residual < 1e-6);
    }
}

TEST_CASE("trace layer grid rejects parameters outside (0, 1/2)") {
    const SolidRegion ball = make_ball({0, 0, 0}, 1.0);
    CHECK_THROWS(estimate_trace_layerwise(catalog("rigid_rotation").field, ball, build_transversal_collar(ball),
                                          {0.6, 0.1}, Side::Interior));
}

TEST_CASE("pairing of a smooth field equals the boundary integral") {
    const CatalogField rr = catalog("rigid_rotation");
    const SolidRegion ball = make_ball({0, 0, 0}, 1.0);
    auto phi = [](const Vec3& x) { return 1.0 + x.x + x.y * x.z; };
    const Vec3 got = trace_pairing(rr.field, rr.curl, ball, test_function(phi), Side::Interior);
    const Vec3 want = sphere_oracle(rr.field.eval, phi);
    CHECK(norm(got - want) < 1e-10);
}

TEST_CASE("vector pairing of a smooth field equals the boundary integral") {
    const CatalogField rr = catalog("rigid_rotation");
    const SolidRegion ball = make_ball({0, 0, 0}, 1.0);
    auto psi = [](const Vec3& x) { return Vec3{x.z, 1.0, x.x * x.y}; };
    const double got = trace_pairing_vector(rr.field, rr.curl, ball, test_vector(psi), Side::Interior);
    // (F x nu) . psi integrated directly.
    const Rule1D rc = gauss_legendre(40, -1.0, 1.0);
    const Rule1D ra = trapezoid_periodic(80, 0.0, 2.0 * kPi);
    double want = 0.0;
    for (std::size_t i = 0; i < rc.nodes.size(); ++i) {
        const double c = rc.nodes[i], s = std::sqrt(1.0 - c * c);
        for (std::size_t k = 0; k < ra.nodes.size(); ++k) {
            const Vec3 x{s * std::cos(ra.nodes[k]), s * std::sin(ra.nodes[k]), c};
            want += rc.weights[i] * ra.weights[k] * dot(cross(rr.field(x), -x), psi(x));
        }
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("layer route agrees with the distributional pairing") {
    const CatalogField rr = catalog("rigid_rotation");
    const SolidRegion ball = make_ball({0, 0, 0}, 1.0);
    auto psi = [](const Vec3& x) { return Vec3{x.z, 1.0, x.x * x.y}; };
    const double dist = trace_pairing_vector(rr.field, rr.curl, ball, test_vector(psi), Side::Interior);
    const LayerPairing lp = trace_pairing_via_layers(rr.field, ball, psi, {0.1, 0.05, 0.025, 0.0125});
    CHECK(lp.value == doctest::Approx(dist).epsilon(1e-4));
}

TEST_CASE("newtonian trace total variation grows like half log") {
    const TraceDiagnostic d =
        trace_order_diagnostic(catalog("newtonian").field, make_half_ball({0, 0, 0}, 1.0, true), {1e-1, 1e-2});
    for (std::size_t i = 0; i < d.eps.size(); ++i)
        CHECK(d.total_variation[i] == doctest::Approx(0.5 * std::log(1.0 / d.eps[i])).epsilon(1e-2));
    CHECK(d.log_slope == doctest::Approx(0.5).epsilon(2e-2));
}

TEST_CASE("trace total variation of a smooth field stays bounded") {
    const TraceDiagnostic d = trace_order_diagnostic(catalog("rigid_rotation").field,
                                                     make_half_ball({0, 0, 0}, 1.0, true), {1e-1, 1e-2, 1e-3});
    CHECK(d.order_flag == OrderFlag::OrderZero);
    CHECK(std::fabs(d.total_variation.back() - d.total_variation.front()) < 1e-1);
}

TEST_CASE("pairing of the tangential part matches the full pairing on the ball") {
    const CatalogField lv = catalog("line_vortex");
    const DefectReport d = tangentiality_defect(lv.field, lv.curl, make_ball({0, 0, 0}, 1.0),
                                                [](const Vec3& x) { return Vec3{x.y, -x.x, x.z}; });
    CHECK(d.defect < 1e-3);
}

TEST_CASE("newtonian pairing on the flat face is a principal value") {
    const CatalogField nw = catalog("newtonian");
    auto phi = [](const Vec3& x) { return (1.0 + x.x + 2.0 * x.y + x.x * x.y) * cutoff_theta(norm(x) / 1.8); };
    const Vec3 got =
        trace_pairing(nw.field, nw.curl, make_half_ball({0, 0, 0}, 1.0, true), test_function(phi), Side::Interior);
    // -(1/4pi) P.V. int_disk (x2, -x1, 0) / r^3 phi; the curved face contributes nothing since F x nu = 0 there.
    const Rule1D rr = gauss_legendre(200, 0.0, 1.0);
    const Rule1D rt = trapezoid_periodic(256, 0.0, 2.0 * kPi);
    Vec3 want;
    for (std::size_t i = 0; i < rr.nodes.size(); ++i)
        for (std::size_t k = 0; k < rt.nodes.size(); ++k) {
            const double r = rr.nodes[i], c = std::cos(rt.nodes[k]), s = std::sin(rt.nodes[k]);
            const double p = phi({r * c, r * s, 0.0}) - phi({});
            want += (rr.weights[i] * rt.weights[k] * p / r) * Vec3{s, -c, 0.0};
        }
    want *= -1.0 / (4.0 * kPi);
    CHECK(norm(got - want) < 1e-6);
}
