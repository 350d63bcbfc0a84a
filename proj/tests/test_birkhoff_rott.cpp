#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "curlflux/birkhoff_rott.hpp"

using namespace curlflux;

namespace {

// Image offsets for an index difference di on an n-periodic axis, with ties
// at half the period split evenly between the two nearest copies.
std::vector<std::pair<int, double>> image_offsets(int di, int n) {
    std::vector<std::pair<int, double>> out;
    auto add = [&](int c, double w) {
        for (int k = c - 1; k <= c + 1; ++k) {
            bool found = false;
            for (auto& p : out)
                if (p.first == k) {
                    p.second += w;
                    found = true;
                }
            if (!found) out.push_back({k, w});
        }
    };
    if (2 * di == n) {
        add(0, 0.5);
        add(1, 0.5);
    } else if (2 * di == -n) {
        add(0, 0.5);
        add(-1, 0.5);
    } else if (2 * di > n) {
        add(1, 1.0);
    } else if (2 * di < -n) {
        add(-1, 1.0);
    } else {
        add(0, 1.0);
    }
    return out;
}

Vec3 brute_force(const SheetState& s, int i) {
    const int n1 = s.n1, n2 = s.n2;
    const int i1 = i % n1, i2 = i / n1;
    Vec3 acc;
    auto kernel = [&](const Vec3& d, const Vec3& g, double w) {
        const double r2 = norm2(d) + s.delta * s.delta;
        acc += w * cross(g, d) / (r2 * std::sqrt(r2));
    };
    for (int j = 0; j < static_cast<int>(s.size()); ++j) {
        if (j == i) continue;
        const int j1 = j % n1, j2 = j / n1;
        for (auto [a, wa] : image_offsets(i1 - j1, n1))
            for (auto [b, wb] : image_offsets(i2 - j2, n2))
                kernel(s.X[i] - s.X[j] - Vec3{a * s.L1, b * s.L2, 0}, s.gamma[j], wa * wb * s.weight[j]);
    }
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            if (a || b) kernel(-Vec3{a * s.L1, b * s.L2, 0}, s.gamma[i], s.weight[i]);
    return -acc / (4.0 * kPi);
}

SheetState random_sheet(int n1, int n2, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    SheetState s = make_perturbed_sheet(n1, n2, 0.1, 0.15);
    for (auto& g : s.gamma) g = {U(rng), U(rng), U(rng)};
    for (auto& x : s.X) x += Vec3{0.02 * U(rng), 0.02 * U(rng), 0.02 * U(rng)};
    return s;
}

}  // namespace

TEST_CASE("sheet velocities match a direct image sum") {
    for (auto [n1, n2] : std::vector<std::pair<int, int>>{{6, 8}, {5, 7}, {8, 5}, {16, 16}}) {
        const SheetState s = random_sheet(n1, n2, 3);
        const auto v = br_velocities(s, 1);
        for (int i = 0; i < static_cast<int>(s.size()); ++i) {
            const Vec3 want = brute_force(s, i);
            CHECK(norm(v[i] - want) < 1e-12 * (1.0 + norm(want)));
            CHECK(norm(br_velocity(s, s.X[i], i) - want) < 1e-12 * (1.0 + norm(want)));
        }
    }
}

TEST_CASE("worker count does not change velocities") {
    const SheetState s = random_sheet(12, 10, 5);
    const auto a = br_velocities(s, 1);
    const auto b = br_velocities(s, 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(norm(a[i] - b[i]) < 1e-14);
}

TEST_CASE("flat uniform sheet stays flat and keeps its circulation") {
    SheetState s = make_flat_sheet(16, 16, {0, 1, 0});
    const SheetDiagnostics d0 = diagnostics(s);
    CHECK(d0.area == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm(d0.circulation - Vec3{0, 1, 0}) < 1e-14);
    for (int k = 0; k < 10; ++k) s = step(s, 0.01);
    double drift = 0.0;
    for (const auto& x : s.X) drift = std::max(drift, std::fabs(x.z));
    CHECK(drift < 1e-12);
    CHECK(norm(diagnostics(s).circulation - d0.circulation) < 1e-12);
    CHECK(s.time == doctest::Approx(0.1));
    CHECK_FALSE(s.collided);
}

TEST_CASE("background flow translates the sheet") {
    SheetState s = make_flat_sheet(8, 8, {0, 1, 0});
    const Vec3 x0 = s.X[9];
    s = step(s, 0.1, {0.5, 0, 0});
    CHECK(norm(s.X[9] - x0 - Vec3{0.05, 0, 0}) < 1e-12);
}

TEST_CASE("strength stays tangent after a step") {
    SheetState s = make_perturbed_sheet(16, 16, 0.05);
    for (int k = 0; k < 3; ++k) s = step(s, 0.01);
    CHECK(diagnostics(s).tangential_residual < 1e-12);
}

TEST_CASE("perturbed sheet geometry") {
    const SheetState s = make_perturbed_sheet(32, 8, 0.05);
    const SheetDiagnostics d = diagnostics(s);
    // Curvature of z = A sin(2 pi x) peaks at A (2 pi)^2.
    CHECK(d.curvature == doctest::Approx(0.05 * 4.0 * kPi * kPi).epsilon(2e-2));
    CHECK(d.area > 1.0);
    CHECK(d.min_distance == doctest::Approx(1.0 / 32.0).epsilon(0.1));
}

TEST_CASE("periodic image truncation is small for a flat sheet") {
    const SheetState s = make_flat_sheet(16, 16, {0, 1, 0});
    CHECK(image_truncation(s, 0) < 1e-3);
}

TEST_CASE("colliding markers are flagged") {
    SheetState s = make_flat_sheet(8, 8, {0, 1, 0}, 0.5);
    s.X[1] = s.X[0] + Vec3{1e-3, 0, 0};
    s = step(s, 1e-6);
    CHECK(s.collided);
}

TEST_CASE("thread count from the environment") {
    ::setenv("CURLFLUX_THREADS", "3", 1);
    CHECK(configured_threads() == 3);
    ::setenv("CURLFLUX_THREADS", "garbage", 1);
    CHECK(configured_threads() == 1);
    ::unsetenv("CURLFLUX_THREADS");
    CHECK(configured_threads() == 1);
}
