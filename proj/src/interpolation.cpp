#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mlab/certificates.hpp"
#include "mlab/error.hpp"

namespace mlab {

namespace {

constexpr int kGrid1D = 256;
constexpr int kGrid2D = 64;

bool is_1d(InterpFamily f) { return f == InterpFamily::GN_1D; }

Domain family_domain(InterpFamily f) {
    return is_1d(f) ? Domain::box(1.0, 1.0, 8, kGrid1D) : Domain::box(1.0, 1.0, kGrid2D, kGrid2D);
}

double lp(const std::vector<double>& v, double p, double cell) {
    if (p == kInf) {
        double m = 0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s * cell, 1.0 / p);
}

}  // namespace

std::string to_string(InterpFamily f) {
    switch (f) {
        case InterpFamily::GN_1D: return "GN_1D";
        case InterpFamily::GN_2D_L43: return "GN_2D_L43";
        case InterpFamily::GN_2D_L2: return "GN_2D_L2";
        case InterpFamily::GN_2D_LINF: return "GN_2D_LINF";
        case InterpFamily::MIXED: return "MIXED";
    }
    return "?";
}

InterpFamily interp_family_from_string(const std::string& s) {
    for (InterpFamily f : {InterpFamily::GN_1D, InterpFamily::GN_2D_L43, InterpFamily::GN_2D_L2,
                           InterpFamily::GN_2D_LINF, InterpFamily::MIXED})
        if (to_string(f) == s) return f;
    throw PreconditionError("unknown interpolation family '" + s + "'");
}

double interpolation_ratio(InterpFamily family, const GridField& f) {
    const Domain& d = f.domain();
    const double cell = d.cell_area();
    if (is_1d(family)) {
        const GridField f1 = derivative(f, 0, 1), f2 = derivative(f, 0, 2);
        const double rhs = lp(f1.values(), 2, cell);
        if (!(rhs > 0)) return -1;
        return std::pow(lp(f.values(), 1, cell), 0.4) * std::pow(lp(f2.values(), 2, cell), 0.6) / rhs;
    }
    // x1 is the theta direction, x2 the z direction.
    const GridField fx = derivative(f, 1, 0), fy = derivative(f, 0, 1);
    const GridField fxx = derivative(f, 2, 0), fxy = derivative(f, 1, 1), fyy = derivative(f, 0, 2);
    std::vector<double> grad(f.size()), hess(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        grad[k] = std::hypot(fx.data()[k], fy.data()[k]);
        hess[k] = std::sqrt(fxx.data()[k] * fxx.data()[k] + 2.0 * fxy.data()[k] * fxy.data()[k] +
                            fyy.data()[k] * fyy.data()[k]);
    }
    const double d2 = lp(hess, 2, cell);
    switch (family) {
        case InterpFamily::GN_2D_L43: {
            const double rhs = lp(grad, 4.0 / 3.0, cell);
            if (!(rhs > 0)) return -1;
            return std::sqrt(lp(f.values(), 1, cell) * d2) / rhs;
        }
        case InterpFamily::GN_2D_L2: {
            const double rhs = lp(grad, 2, cell);
            if (!(rhs > 0)) return -1;
            return std::sqrt(lp(f.values(), 2, cell) * d2) / rhs;
        }
        case InterpFamily::GN_2D_LINF: {
            const double rhs = lp(grad, 2, cell);
            if (!(rhs > 0)) return -1;
            return std::cbrt(lp(grad, kInf, cell) * lp(f.values(), 1, cell) * d2) / rhs;
        }
        case InterpFamily::MIXED: {
            const double rhs = lp(f.values(), 2, cell);
            if (!(rhs > 0)) return -1;
            const double a = mixed_norm(f, 2, 1);
            const double b = mixed_norm(fx, 4, 2);
            return (a + std::cbrt(b) * std::pow(a, 2.0 / 3.0)) / rhs;
        }
        default: break;
    }
    throw PreconditionError("unknown interpolation family");
}

GridField interpolation_sample(InterpFamily family, std::uint64_t seed, int index) {
    const Domain d = family_domain(family);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x9e3779b9u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    GridField f(d);
    if (is_1d(family)) {
        const int K = kGrid1D / 8;  // a quarter of the Nyquist index N/2
        std::vector<double> a(K + 1), b(K + 1);
        for (int k = 0; k <= K; ++k) a[k] = normal(rng), b[k] = k ? normal(rng) : 0.0;
        for (int j = 0; j < d.n_z; ++j) {
            const double z = d.z(j);
            double s = 0;
            for (int k = 0; k <= K; ++k) s += a[k] * std::cos(kTwoPi * k * z) + b[k] * std::sin(kTwoPi * k * z);
            for (int i = 0; i < d.n_theta; ++i) f(i, j) = s;
        }
        return f;
    }
    const int K = kGrid2D / 8;
    // a cos(phase) + b sin(phase) = Re((a - i b) e^{i phase}), summed row by row.
    using cplx = std::complex<double>;
    std::vector<cplx> coef(static_cast<std::size_t>(K + 1) * (2 * K + 1));
    for (int k1 = 0; k1 <= K; ++k1)
        for (int k2 = -K; k2 <= K; ++k2) {
            if (k1 == 0 && k2 < 0) continue;
            const double a = normal(rng);
            const double b = (k1 == 0 && k2 == 0) ? 0.0 : normal(rng);
            coef[static_cast<std::size_t>(k1) * (2 * K + 1) + (k2 + K)] = cplx(a, -b);
        }
    std::vector<cplx> row(2 * K + 1);
    for (int i = 0; i < d.n_theta; ++i) {
        const double x1 = -0.5 + i * d.dtheta();
        std::fill(row.begin(), row.end(), cplx(0, 0));
        for (int k1 = 0; k1 <= K; ++k1) {
            const cplx e = std::polar(1.0, kTwoPi * k1 * x1);
            for (int k2 = 0; k2 <= 2 * K; ++k2) row[k2] += coef[static_cast<std::size_t>(k1) * (2 * K + 1) + k2] * e;
        }
        for (int j = 0; j < d.n_z; ++j) {
            const double x2 = d.z(j);
            double s = 0;
            for (int k2 = -K; k2 <= K; ++k2) s += (row[k2 + K] * std::polar(1.0, kTwoPi * k2 * x2)).real();
            f(i, j) = s;
        }
    }
    return f;
}

InterpolationReport check_interpolation(InterpFamily family, int samples, std::uint64_t seed) {
    if (samples < 1) throw PreconditionError("interpolation check needs at least one sample");
    InterpolationReport rep;
    rep.family = family;
    rep.samples = samples;
    rep.seed = seed;
    std::vector<double> ratio(samples), amp_err(samples, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < samples; ++s) {
        const GridField f = interpolation_sample(family, seed, s);
        ratio[s] = interpolation_ratio(family, f);
        if (ratio[s] < 0) continue;
        for (double alpha : {-3.7, 1e-3, 250.0}) {
            const double r = interpolation_ratio(family, alpha * f);
            amp_err[s] = std::max(amp_err[s], std::abs(r / ratio[s] - 1.0));
        }
    }
    rep.min_ratio = kInf;
    rep.max_ratio = 0;
    for (int s = 0; s < samples; ++s) {
        if (ratio[s] < 0) {
            ++rep.skipped;
            continue;
        }
        rep.min_ratio = std::min(rep.min_ratio, ratio[s]);
        rep.max_ratio = std::max(rep.max_ratio, ratio[s]);
        if (ratio[s] <= kRatioFloor) ++rep.violations;
        rep.amplitude_error = std::max(rep.amplitude_error, amp_err[s]);
    }
    return rep;
}

}  // namespace mlab
