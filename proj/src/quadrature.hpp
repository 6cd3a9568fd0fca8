#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace mlab::detail {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};

inline GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.x[i] = x;
        r.w[i] = 2.0 / ((1 - x * x) * dp * dp);
    }
    return r;
}

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, const GaussRule& g) {
    const double hw = 0.5 * (b - a) / panels;
    double s = 0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (2 * p + 1) * hw;
        double ps = 0;
        for (std::size_t i = 0; i < g.x.size(); ++i) ps += g.w[i] * f(mid + hw * g.x[i]);
        s += ps * hw;
    }
    return s;
}

}  // namespace mlab::detail
