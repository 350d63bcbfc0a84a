#include "curlflux/birkhoff_rott.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define CURLFLUX_HAVE_AVX512 1
#endif

namespace curlflux {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);


// Structure-of-arrays copy of positions and w * gamma.
struct Sources {
    std::vector<double> x, y, z, gx, gy, gz;
};

Sources pack(const SheetState& s) {
    Sources out;
    const std::size_t n = s.size();
    out.x.resize(n);
    out.y.resize(n);
    out.z.resize(n);
    out.gx.resize(n);
    out.gy.resize(n);
    out.gz.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.x[j] = s.X[j].x;
        out.y[j] = s.X[j].y;
        out.z[j] = s.X[j].z;
        const Vec3 g = s.weight[j] * s.gamma[j];
        out.gx[j] = g.x;
        out.gy[j] = g.y;
        out.gz[j] = g.z;
    }
    return out;
}

// One row segment of sources against a target. For each source j,
// D_j = sum over images (a, b) in [-R, R]^2 of d / (|d|^2 + d2)^{3/2} with
// d = t - X_j - (cx_j + a L1, cy + b L2, 0). The target gains
// wy w_j gamma_j x D_j; when aj is set, source j gains -wy w_i gamma_i x D_j.
struct RowTask {
    const double *x, *y, *z, *gx, *gy, *gz;  // sources, offset to the segment
    const double* cx;                        // x shift of the centred image, times L1
    int n;
    double tx, ty, tz;  // ty already includes the row shift
    double L1, L2, d2, wy;
    int R;
    double gi[3];
    double* aj[3];  // offset to the segment, or null
};

void row_generic(const RowTask& r, double* ai) {
    double ax = 0.0, ay = 0.0, az = 0.0;
    for (int j = 0; j < r.n; ++j) {
        const double dx0 = r.tx - r.x[j] - r.cx[j];
        const double dy0 = r.ty - r.y[j];
        const double dz = r.tz - r.z[j];
        double Dx = 0.0, Dy = 0.0, Dz = 0.0;
        for (int a = -r.R; a <= r.R; ++a) {
            const double dx = dx0 - a * r.L1;
            for (int b = -r.R; b <= r.R; ++b) {
                const double dy = dy0 - b * r.L2;
                const double r2 = dx * dx + dy * dy + dz * dz + r.d2;
                const double inv = 1.0 / (r2 * std::sqrt(r2));
                Dx += dx * inv;
                Dy += dy * inv;
                Dz += dz * inv;
            }
        }
        Dx *= r.wy;
        Dy *= r.wy;
        Dz *= r.wy;
        ax += r.gy[j] * Dz - r.gz[j] * Dy;
        ay += r.gz[j] * Dx - r.gx[j] * Dz;
        az += r.gx[j] * Dy - r.gy[j] * Dx;
        if (r.aj[0] != nullptr) {
            r.aj[0][j] -= r.gi[1] * Dz - r.gi[2] * Dy;
            r.aj[1][j] -= r.gi[2] * Dx - r.gi[0] * Dz;
            r.aj[2][j] -= r.gi[0] * Dy - r.gi[1] * Dx;
        }
    }
    ai[0] += ax;
    ai[1] += ay;
    ai[2] += az;
}

#ifdef CURLFLUX_HAVE_AVX512
// Same sums with rsqrt14 refined by two Newton steps (relative error near 1e-16).
__attribute__((target("avx512f"))) void row_avx512(const RowTask& r, double* ai) {
    const __m512d half = _mm512_set1_pd(0.5), three_half = _mm512_set1_pd(1.5), d2 = _mm512_set1_pd(r.d2);
    const __m512d tx = _mm512_set1_pd(r.tx), ty = _mm512_set1_pd(r.ty), tz = _mm512_set1_pd(r.tz);
    const __m512d wy = _mm512_set1_pd(r.wy);
    const __m512d g0 = _mm512_set1_pd(r.gi[0]), g1 = _mm512_set1_pd(r.gi[1]), g2 = _mm512_set1_pd(r.gi[2]);
    __m512d ax = _mm512_setzero_pd(), ay = _mm512_setzero_pd(), az = _mm512_setzero_pd();
    for (int j = 0; j < r.n; j += 8) {
        const __mmask8 m =
            r.n - j >= 8 ? static_cast<__mmask8>(0xFF) : static_cast<__mmask8>((1u << (r.n - j)) - 1u);
        const __m512d x0 = _mm512_sub_pd(_mm512_sub_pd(tx, _mm512_maskz_loadu_pd(m, r.x + j)),
                                         _mm512_maskz_loadu_pd(m, r.cx + j));
        const __m512d y0 = _mm512_sub_pd(ty, _mm512_maskz_loadu_pd(m, r.y + j));
        const __m512d z0 = _mm512_sub_pd(tz, _mm512_maskz_loadu_pd(m, r.z + j));
        const __m512d zz = _mm512_fmadd_pd(z0, z0, d2);
        __m512d Dx = _mm512_setzero_pd(), Dy = _mm512_setzero_pd(), Dz = _mm512_setzero_pd();
        for (int a = -r.R; a <= r.R; ++a) {
            const __m512d dx = _mm512_sub_pd(x0, _mm512_set1_pd(a * r.L1));
            const __m512d dxx = _mm512_fmadd_pd(dx, dx, zz);
            for (int b = -r.R; b <= r.R; ++b) {
                const __m512d dy = _mm512_sub_pd(y0, _mm512_set1_pd(b * r.L2));
                const __m512d r2 = _mm512_fmadd_pd(dy, dy, dxx);
                const __m512d hr = _mm512_mul_pd(half, r2);
                __m512d q = _mm512_rsqrt14_pd(r2);
                q = _mm512_mul_pd(q, _mm512_fnmadd_pd(hr, _mm512_mul_pd(q, q), three_half));
                q = _mm512_mul_pd(q, _mm512_fnmadd_pd(hr, _mm512_mul_pd(q, q), three_half));
                const __m512d inv = _mm512_mul_pd(q, _mm512_mul_pd(q, q));
                Dx = _mm512_fmadd_pd(dx, inv, Dx);
                Dy = _mm512_fmadd_pd(dy, inv, Dy);
                Dz = _mm512_fmadd_pd(z0, inv, Dz);
            }
        }
        Dx = _mm512_maskz_mul_pd(m, Dx, wy);
        Dy = _mm512_maskz_mul_pd(m, Dy, wy);
        Dz = _mm512_maskz_mul_pd(m, Dz, wy);
        const __m512d gx = _mm512_maskz_loadu_pd(m, r.gx + j);
        const __m512d gy = _mm512_maskz_loadu_pd(m, r.gy + j);
        const __m512d gz = _mm512_maskz_loadu_pd(m, r.gz + j);
        ax = _mm512_add_pd(ax, _mm512_fmsub_pd(gy, Dz, _mm512_mul_pd(gz, Dy)));
        ay = _mm512_add_pd(ay, _mm512_fmsub_pd(gz, Dx, _mm512_mul_pd(gx, Dz)));
        az = _mm512_add_pd(az, _mm512_fmsub_pd(gx, Dy, _mm512_mul_pd(gy, Dx)));
        if (r.aj[0] != nullptr) {
            const __m512d cxv = _mm512_fmsub_pd(g1, Dz, _mm512_mul_pd(g2, Dy));
            const __m512d cyv = _mm512_fmsub_pd(g2, Dx, _mm512_mul_pd(g0, Dz));
            const __m512d czv = _mm512_fmsub_pd(g0, Dy, _mm512_mul_pd(g1, Dx));
            _mm512_mask_storeu_pd(r.aj[0] + j, m, _mm512_sub_pd(_mm512_maskz_loadu_pd(m, r.aj[0] + j), cxv));
            _mm512_mask_storeu_pd(r.aj[1] + j, m, _mm512_sub_pd(_mm512_maskz_loadu_pd(m, r.aj[1] + j), cyv));
            _mm512_mask_storeu_pd(r.aj[2] + j, m, _mm512_sub_pd(_mm512_maskz_loadu_pd(m, r.aj[2] + j), czv));
        }
    }
    ai[0] += _mm512_reduce_add_pd(ax);
    ai[1] += _mm512_reduce_add_pd(ay);
    ai[2] += _mm512_reduce_add_pd(az);
}

bool use_avx512() {
    static const bool ok = __builtin_cpu_supports("avx512f");
    return ok;
}
#endif

void run_row(const RowTask& r, double* ai) {
#ifdef CURLFLUX_HAVE_AVX512
    if (use_avx512()) return row_avx512(r, ai);
#endif
    row_generic(r, ai);
}

// Centre of the nearest image block for an index offset di on a periodic
// axis of n markers; offsets of exactly n/2 are ties.
int image_centre(int di, int n) {
    if (2 * di > n) return 1;
    if (2 * di < -n) return -1;
    return 0;
}

bool is_tie(int di, int n) { return 2 * di == n || 2 * di == -n; }

// Kernel sum over image copies for a single pair, used for tie corrections.
Vec3 pair_sum(const Vec3& d0, double L1, double L2, double d2, int a0, int a1, int b0, int b1) {
    Vec3 D;
    for (int a = a0; a <= a1; ++a) {
        for (int b = b0; b <= b1; ++b) {
            const Vec3 d = d0 - Vec3{a * L1, b * L2, 0.0};
            const double r2 = norm2(d) + d2;
            D += d / (r2 * std::sqrt(r2));
        }
    }
    return D;
}

struct Target {
    Vec3 g;  // w_i gamma_i
    double d2;
};

// Accumulates the velocity sums of target i. In symmetric mode only sources
// j > i are visited and each pair also feeds the source accumulators.
void target_sums(const SheetState& s, const Sources& src, std::size_t i, const Vec3& x, int radius, bool symmetric,
                 const std::vector<std::vector<double>>& centres, double* ai, double* ajx, double* ajy, double* ajz) {
    const int n1 = s.n1, n2 = s.n2;
    const std::size_t N = s.size();
    const int i1 = static_cast<int>(i % n1), i2 = static_cast<int>(i / n1);
    const Vec3 gi = s.weight[i] * s.gamma[i];
    const double d2 = s.delta * s.delta;
    const std::size_t j0 = symmetric ? i + 1 : 0;
    if (j0 >= N) return;
    const double* cx = centres[i1].data();
    const bool periodic = radius > 0;

    RowTask r{};
    r.tx = x.x;
    r.tz = x.z;
    r.L1 = s.L1;
    r.L2 = s.L2;
    r.d2 = d2;
    r.R = radius;
    r.gi[0] = gi.x;
    r.gi[1] = gi.y;
    r.gi[2] = gi.z;
    auto run = [&](std::size_t start, int first, double cy, double wy) {
        r.x = src.x.data() + start;
        r.y = src.y.data() + start;
        r.z = src.z.data() + start;
        r.gx = src.gx.data() + start;
        r.gy = src.gy.data() + start;
        r.gz = src.gz.data() + start;
        r.cx = cx + first;
        r.n = n1 - first;
        r.ty = x.y - cy * s.L2;
        r.wy = wy;
        for (int c = 0; c < 3; ++c) r.aj[c] = nullptr;
        if (symmetric) {
            r.aj[0] = ajx + start;
            r.aj[1] = ajy + start;
            r.aj[2] = ajz + start;
        }
        run_row(r, ai);
    };
    // A row at offset n2/2 is a tie and is split between its two nearest
    // image blocks.
    int tie_dy = 0;
    for (int j2 = static_cast<int>(j0 / n1); j2 < n2; ++j2) {
        const int dy = i2 - j2;
        const std::size_t row = static_cast<std::size_t>(j2) * n1;
        const int first = row < j0 ? static_cast<int>(j0 - row) : 0;
        if (first >= n1) continue;
        if (periodic && is_tie(dy, n2)) {
            tie_dy = dy > 0 ? 1 : -1;
            run(row + first, first, 0.0, 0.5);
            run(row + first, first, tie_dy, 0.5);
        } else {
            run(row + first, first, image_centre(dy, n2), 1.0);
        }
    }

    // Ties in x: the passes above use the block around the minimum image;
    // the other nearest block differs by one copy at each end.
    if (!periodic || n1 % 2 != 0) return;
    const int tie_col = ((i1 - n1 / 2) % n1 + n1) % n1;
    const int tie_dir = i1 - tie_col > 0 ? 1 : -1;
    const int far = tie_dir * (radius + 1), near = -tie_dir * radius;
    const Target t{gi, d2};
    for (int j2 = 0; j2 < n2; ++j2) {
        const std::size_t j = static_cast<std::size_t>(j2) * n1 + tie_col;
        if (j < j0) continue;
        const int dy = i2 - j2;
        std::pair<double, double> ys[2] = {{static_cast<double>(image_centre(dy, n2)), 1.0}, {0.0, 0.0}};
        if (is_tie(dy, n2)) ys[0] = {0.0, 0.5}, ys[1] = {static_cast<double>(tie_dy), 0.5};
        const Vec3 gj = s.weight[j] * s.gamma[j];
        for (const auto& [cy, wy] : ys) {
            if (wy == 0.0) continue;
            const Vec3 d0 = x - s.X[j] - Vec3{0.0, cy * s.L2, 0.0};
            const Vec3 D = 0.5 * wy *
                           (pair_sum(d0, s.L1, s.L2, t.d2, far, far, -radius, radius) -
                            pair_sum(d0, s.L1, s.L2, t.d2, near, near, -radius, radius));
            const Vec3 vi = cross(gj, D);
            ai[0] += vi.x;
            ai[1] += vi.y;
            ai[2] += vi.z;
            if (symmetric) {
                const Vec3 vj = cross(t.g, D);
                ajx[j] -= vj.x;
                ajy[j] -= vj.y;
                ajz[j] -= vj.z;
            }
        }
    }
}

std::vector<std::vector<double>> column_centres(const SheetState& s) {
    std::vector<std::vector<double>> c(s.n1, std::vector<double>(s.n1, 0.0));
    if (!s.periodic) return c;
    for (int i1 = 0; i1 < s.n1; ++i1)
        for (int j1 = 0; j1 < s.n1; ++j1) c[i1][j1] = image_centre(i1 - j1, s.n1);
    return c;
}

// Velocity at marker i (positions of `s`), evaluated at x.
Vec3 marker_velocity(const SheetState& s, const Sources& src, std::size_t i, const Vec3& x, int radius) {
    double acc[3] = {0.0, 0.0, 0.0};
    if (!s.periodic) {
        SheetState flat = s;
        flat.L1 = flat.L2 = 0.0;
        const auto centres = column_centres(flat);
        target_sums(flat, src, i, x, 0, false, centres, acc, nullptr, nullptr, nullptr);
    } else {
        const auto centres = column_centres(s);
        target_sums(s, src, i, x, radius, false, centres, acc, nullptr, nullptr, nullptr);
    }
    return -kInv4Pi * Vec3{acc[0], acc[1], acc[2]};
}

// Geometric minimum image for points that are not markers.
Vec3 point_velocity(const SheetState& s, const Vec3& x) {
    const double d2 = s.delta * s.delta;
    Vec3 acc;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const Vec3 g = s.weight[j] * s.gamma[j];
        if (!s.periodic) {
            const Vec3 d = x - s.X[j];
            const double r2 = norm2(d) + d2;
            acc += cross(g, d) / (r2 * std::sqrt(r2));
            continue;
        }
        const Vec3 d0 = x - s.X[j];
        const double c1 = std::round(d0.x / s.L1), c2 = std::round(d0.y / s.L2);
        for (int a = -1; a <= 1; ++a) {
            for (int b = -1; b <= 1; ++b) {
                const Vec3 d = d0 - Vec3{(c1 + a) * s.L1, (c2 + b) * s.L2, 0.0};
                const double r2 = norm2(d) + d2;
                acc += cross(g, d) / (r2 * std::sqrt(r2));
            }
        }
    }
    return -kInv4Pi * acc;
}

void check(const SheetState& s) {
    if (!(s.delta > 0.0)) throw std::invalid_argument("Birkhoff-Rott: desingularization must be positive");
    if (s.X.size() != static_cast<std::size_t>(s.n1) * s.n2 || s.gamma.size() != s.X.size() ||
        s.weight.size() != s.X.size())
        throw std::invalid_argument("Birkhoff-Rott: marker arrays do not match the grid");
}

std::vector<Vec3> velocities_at(const SheetState& s, const std::vector<Vec3>& pos, int threads) {
    SheetState moved = s;
    moved.X = pos;
    if (!moved.periodic) moved.L1 = moved.L2 = 0.0;
    const int radius = moved.periodic ? 1 : 0;
    const Sources src = pack(moved);
    const auto centres = column_centres(moved);
    const std::size_t n = pos.size();
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));

    // Each worker owns a full accumulator; targets are dealt round-robin
    // because later targets have fewer partners.
    std::vector<std::vector<double>> buf(nt, std::vector<double>(3 * n, 0.0));
    auto work = [&](int t) {
        double* bx = buf[t].data();
        double* by = bx + n;
        double* bz = by + n;
        for (std::size_t i = t; i < n; i += nt) {
            double ai[3] = {0.0, 0.0, 0.0};
            target_sums(moved, src, i, pos[i], radius, true, centres, ai, bx, by, bz);
            bx[i] += ai[0];
            by[i] += ai[1];
            bz[i] += ai[2];
        }
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    std::vector<Vec3> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 v;
        for (int t = 0; t < nt; ++t) v += Vec3{buf[t][i], buf[t][n + i], buf[t][2 * n + i]};
        out[i] = -kInv4Pi * v;
    }
    return out;
}

// Neighbour difference along one grid axis, unwrapping the period.
Vec3 neighbour(const SheetState& s, int i1, int i2, int d1, int d2) {
    int j1 = i1 + d1, j2 = i2 + d2;
    Vec3 shift;
    if (s.periodic) {
        if (j1 < 0) { j1 += s.n1; shift.x -= s.L1; }
        if (j1 >= s.n1) { j1 -= s.n1; shift.x += s.L1; }
        if (j2 < 0) { j2 += s.n2; shift.y -= s.L2; }
        if (j2 >= s.n2) { j2 -= s.n2; shift.y += s.L2; }
    } else {
        j1 = std::clamp(j1, 0, s.n1 - 1);
        j2 = std::clamp(j2, 0, s.n2 - 1);
    }
    return s.X[static_cast<std::size_t>(j2) * s.n1 + j1] + shift;
}

std::pair<Vec3, Vec3> tangents(const SheetState& s, int i1, int i2) {
    return {neighbour(s, i1, i2, 1, 0) - neighbour(s, i1, i2, -1, 0),
            neighbour(s, i1, i2, 0, 1) - neighbour(s, i1, i2, 0, -1)};
}

double min_pair_distance(const SheetState& s) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            Vec3 d = s.X[i] - s.X[j];
            if (s.periodic) {
                d.x -= s.L1 * std::round(d.x / s.L1);
                d.y -= s.L2 * std::round(d.y / s.L2);
            }
            best = std::min(best, norm2(d));
        }
    }
    return std::sqrt(best);
}

}  // namespace

int configured_threads() {
    if (const char* env = std::getenv("CURLFLUX_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

SheetState make_flat_sheet(int n1, int n2, const Vec3& gamma, double delta, double L) {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("make_flat_sheet: empty grid");
    SheetState s;
    s.n1 = n1;
    s.n2 = n2;
    s.L1 = L;
    s.L2 = L;
    const double h1 = L / n1, h2 = L / n2;
    s.delta = delta > 0.0 ? delta : 2.0 * std::max(h1, h2);
    for (int i2 = 0; i2 < n2; ++i2) {
        for (int i1 = 0; i1 < n1; ++i1) {
            s.X.push_back({i1 * h1, i2 * h2, 0.0});
            s.gamma.push_back(gamma);
            s.weight.push_back(h1 * h2);
        }
    }
    return s;
}

SheetState make_perturbed_sheet(int n1, int n2, double amplitude, double delta) {
    SheetState s = make_flat_sheet(n1, n2, {0.0, 1.0, 0.0}, delta);
    const double h1 = 1.0 / n1, h2 = 1.0 / n2;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x1 = s.X[i].x;
        s.X[i].z = amplitude * std::sin(2.0 * kPi * x1);
        const double slope = 2.0 * kPi * amplitude * std::cos(2.0 * kPi * x1);
        s.weight[i] = std::sqrt(1.0 + slope * slope) * h1 * h2;
    }
    return s;
}

Vec3 br_velocity(const SheetState& sheet, const Vec3& x, long self) {
    check(sheet);
    if (sheet.size() == 0) return {};
    // The kernel vanishes at zero separation, so excluding the self term is
    // automatic; the index only selects the minimum-image pattern.
    if (self >= 0) {
        const Sources src = pack(sheet);
        return marker_velocity(sheet, src, static_cast<std::size_t>(self), x, 1);
    }
    return point_velocity(sheet, x);
}

double image_truncation(const SheetState& sheet, std::size_t marker) {
    check(sheet);
    if (!sheet.periodic || marker >= sheet.size()) return 0.0;
    const Sources src = pack(sheet);
    const Vec3 x = sheet.X[marker];
    return norm(marker_velocity(sheet, src, marker, x, 2) - marker_velocity(sheet, src, marker, x, 1));
}

std::vector<Vec3> br_velocities(const SheetState& sheet, int threads) {
    check(sheet);
    return velocities_at(sheet, sheet.X, threads > 0 ? threads : configured_threads());
}

SheetState step(const SheetState& sheet, double dt, const Vec3& background, int threads) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    check(sheet);
    const int nt = threads > 0 ? threads : configured_threads();
    const std::size_t n = sheet.size();
    auto rhs = [&](const std::vector<Vec3>& pos) {
        auto v = velocities_at(sheet, pos, nt);
        for (auto& vi : v) vi += background;
        return v;
    };
    auto offset = [&](const std::vector<Vec3>& k, double c) {
        std::vector<Vec3> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = sheet.X[i] + c * k[i];
        return p;
    };
    const auto k1 = rhs(sheet.X);
    const auto k2 = rhs(offset(k1, 0.5 * dt));
    const auto k3 = rhs(offset(k2, 0.5 * dt));
    const auto k4 = rhs(offset(k3, dt));

    SheetState out = sheet;
    for (std::size_t i = 0; i < n; ++i) out.X[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.time += dt;

    for (int i2 = 0; i2 < out.n2; ++i2) {
        for (int i1 = 0; i1 < out.n1; ++i1) {
            const auto [a1, a2] = tangents(out, i1, i2);
            const Vec3 nrm = normalized(cross(a1, a2));
            Vec3& g = out.gamma[static_cast<std::size_t>(i2) * out.n1 + i1];
            g -= dot(g, nrm) * nrm;
        }
    }
    out.min_distance = n > 1 ? min_pair_distance(out) : 0.0;
    out.collided = sheet.collided || out.min_distance < out.delta / 10.0;
    return out;
}

SheetDiagnostics diagnostics(const SheetState& sheet) {
    SheetDiagnostics d;
    if (sheet.size() == 0) return d;
    for (std::size_t i = 0; i < sheet.size(); ++i) {
        d.circulation += sheet.weight[i] * sheet.gamma[i];
        d.area += sheet.weight[i];
    }
    for (int i2 = 0; i2 < sheet.n2; ++i2) {
        for (int i1 = 0; i1 < sheet.n1; ++i1) {
            const std::size_t i = static_cast<std::size_t>(i2) * sheet.n1 + i1;
            const Vec3 x = sheet.X[i];
            const auto [a1, a2] = tangents(sheet, i1, i2);
            const Vec3 s1 = neighbour(sheet, i1, i2, 1, 0) - 2.0 * x + neighbour(sheet, i1, i2, -1, 0);
            const Vec3 s2 = neighbour(sheet, i1, i2, 0, 1) - 2.0 * x + neighbour(sheet, i1, i2, 0, -1);
            const double q1 = norm2(a1) / 4.0, q2 = norm2(a2) / 4.0;
            if (q1 > 0.0) d.curvature = std::max(d.curvature, norm(s1) / q1);
            if (q2 > 0.0) d.curvature = std::max(d.curvature, norm(s2) / q2);
            const double g = norm(sheet.gamma[i]);
            const Vec3 nrm = normalized(cross(a1, a2));
            if (g > 0.0) d.tangential_residual = std::max(d.tangential_residual, std::fabs(dot(sheet.gamma[i], nrm)) / g);
        }
    }
    d.min_distance = sheet.size() > 1 ? min_pair_distance(sheet) : 0.0;
    return d;
}

}  // namespace curlflux
