#include "curlflux/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace curlflux {

namespace {

const Rule1D& reference_gauss(int n) {
    static std::map<int, Rule1D> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Rule1D r;
    r.order = 2 * n - 1;
    const auto zeros = boost::math::legendre_p_zeros<double>(n);
    auto weight = [n](double x) {
        const double dp = boost::math::legendre_p_prime(n, x);
        return 2.0 / ((1.0 - x * x) * dp * dp);
    };
    for (auto it2 = zeros.rbegin(); it2 != zeros.rend(); ++it2) {
        if (*it2 == 0.0) continue;
        r.nodes.push_back(-*it2);
        r.weights.push_back(weight(*it2));
    }
    for (double z : zeros) {
        r.nodes.push_back(z);
        r.weights.push_back(weight(z));
    }
    return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    const Rule1D& ref = reference_gauss(n);
    Rule1D r;
    r.order = ref.order;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    r.nodes.reserve(ref.nodes.size());
    r.weights.reserve(ref.nodes.size());
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
        r.nodes.push_back(mid + half * ref.nodes[i]);
        r.weights.push_back(half * ref.weights[i]);
    }
    return r;
}

Rule1D composite_gauss(const std::vector<double>& breaks, int n_per_panel) {
    Rule1D out;
    out.order = 2 * n_per_panel - 1;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        Rule1D p = gauss_legendre(n_per_panel, breaks[i], breaks[i + 1]);
        out.nodes.insert(out.nodes.end(), p.nodes.begin(), p.nodes.end());
        out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
    }
    return out;
}

Rule1D graded_gauss(double a, double b, double first_panel, int n_per_panel) {
    std::vector<double> breaks{a};
    double w = std::min(first_panel, b - a);
    double x = a + w;
    while (x < b) {
        breaks.push_back(x);
        w *= 2.0;
        x += w;
    }
    breaks.push_back(b);
    return composite_gauss(breaks, n_per_panel);
}

Rule1D trapezoid_periodic(int n, double a, double period) {
    Rule1D r;
    r.order = n - 1;
    const double h = period / n;
    for (int i = 0; i < n; ++i) {
        r.nodes.push_back(a + i * h);
        r.weights.push_back(h);
    }
    return r;
}

QuadratureRule tensor_rule(const Rule1D& ru, const Rule1D& rv) {
    QuadratureRule q;
    q.order = std::min(ru.order, rv.order);
    q.nodes.reserve(ru.nodes.size() * rv.nodes.size());
    q.weights.reserve(ru.nodes.size() * rv.nodes.size());
    for (std::size_t i = 0; i < ru.nodes.size(); ++i)
        for (std::size_t j = 0; j < rv.nodes.size(); ++j) {
            q.nodes.emplace_back(ru.nodes[i], rv.nodes[j]);
            q.weights.push_back(ru.weights[i] * rv.weights[j]);
        }
    return q;
}

double integrate(const Rule1D& r, const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
    return s;
}

Vec3 fd_gradient(const ScalarFn& f, const Vec3& x, double h) {
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 p = x, m = x;
        p[i] += h;
        m[i] -= h;
        g[i] = (f(p) - f(m)) / (2.0 * h);
    }
    return g;
}

Vec3 fd_curl(const VectorFn& F, const Vec3& x, double h) {
    // J[i][j] = dF_i/dx_j
    Vec3 d[3];
    for (int j = 0; j < 3; ++j) {
        Vec3 p = x, m = x;
        p[j] += h;
        m[j] -= h;
        d[j] = (F(p) - F(m)) / (2.0 * h);
    }
    return {d[1].z - d[2].y, d[2].x - d[0].z, d[0].y - d[1].x};
}

double fd_divergence(const VectorFn& F, const Vec3& x, double h) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) {
        Vec3 p = x, m = x;
        p[j] += h;
        m[j] -= h;
        s += (F(p)[j] - F(m)[j]) / (2.0 * h);
    }
    return s;
}

std::vector<std::vector<double>> richardson_table(const std::vector<double>& seq, int levels) {
    std::vector<std::vector<double>> table{seq};
    for (int k = 1; k <= levels; ++k) {
        const auto& prev = table.back();
        if (prev.size() < 2) break;
        const double f = std::ldexp(1.0, k);
        std::vector<double> row;
        for (std::size_t i = 0; i + 1 < prev.size(); ++i)
            row.push_back((f * prev[i + 1] - prev[i]) / (f - 1.0));
        table.push_back(std::move(row));
    }
    return table;
}

double aitken(double a0, double a1, double a2) {
    const double d2 = a2 - 2.0 * a1 + a0;
    const double scale = std::fmax(std::fabs(a0), std::fmax(std::fabs(a1), std::fabs(a2)));
    if (std::fabs(d2) <= 1e-14 * std::fmax(scale, 1e-300)) return a2;
    const double d1 = a2 - a1;
    return a2 - d1 * d1 / d2;
}

}  // namespace curlflux
