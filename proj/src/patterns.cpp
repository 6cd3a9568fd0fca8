#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/patterns.hpp"

namespace mlab {

namespace {

void check_pattern(const PatternParams& pp) {
    if (!(pp.delta > 0 && pp.delta <= 1)) throw PreconditionError("delta must lie in (0,1]");
    if (pp.n < 1 || pp.k < 1) throw PreconditionError("n and k must be positive integers");
}

// Axisymmetric radial profile scale * f_{delta,n}(z).
GridField axisymmetric(const Domain& dom, const ProfileFunction& p, const PatternParams& pp, double scale) {
    return GridField::sample(dom, [&](double, double z) { return scale * rescaled(p, pp.delta, pp.n, z).f; });
}

}  // namespace

double vkd_slope_bound(double lambda, double delta) {
    return 2.0 * std::max(std::sqrt(2.0 * lambda / delta), 2.0 * lambda / delta);
}

double nl_slope_bound() { return 1.0; }

double fs_slope_bound(double lambda, double delta, int n, int k) {
    const double pi = std::numbers::pi;
    return 2.0 * std::max({std::sqrt(2.0 * lambda / delta), 2.0 * lambda / delta,
                           2.0 * lambda / (pi * k * delta) + 2.0 * pi * std::sqrt(2.0 * lambda * delta) / n});
}

Configuration build_vkd_pattern(const ModelParams& mp, const PatternParams& pp, const Domain& dom) {
    mp.validate();
    if (pp.regime == Regime::UNBUCKLED) return vkd_unbuckled(mp, dom);
    check_pattern(pp);
    require_resolved(dom, pp.n, 1, pp.delta, false, kMinSamplesPerCell);
    const ProfileFunction& prof = default_profile(ProfileVariant::VKD_PROFILE);
    const GridField w = axisymmetric(dom, prof, pp, std::sqrt(2.0 * mp.lambda));
    const GridField wz = derivative(w, 0, 1);
    GridField integrand(dom);
    for (std::size_t i = 0; i < integrand.size(); ++i)
        integrand.data()[i] = mp.lambda - 0.5 * wz.data()[i] * wz.data()[i];
    Configuration c;
    c.model = Model::VKD;
    c.params = mp;
    c.comp_rho = w;
    for (double& x : c.comp_rho.values()) x += mp.rho - 1.0;
    c.comp_theta = GridField(dom);
    c.comp_z = z_antiderivative(integrand);
    return c;
}

Configuration build_nl_pattern(const ModelParams& mp, const PatternParams& pp, const Domain& dom) {
    mp.validate();
    if (pp.regime == Regime::UNBUCKLED) return nl_uniform(mp, dom);
    check_pattern(pp);
    if (pp.delta < 2.0 * mp.lambda * (1 - 1e-12)) {
        std::ostringstream os;
        os << "NL pattern needs delta >= 2 lambda (delta = " << pp.delta << ", lambda = " << mp.lambda << ")";
        throw PreconditionError(os.str());
    }
    require_resolved(dom, pp.n, 1, pp.delta, false, kMinSamplesPerCell);
    const SProfile& S = default_s_profile();
    const double q0 = S.inverse(std::min(0.5, mp.lambda / pp.delta));
    const GridField unit = axisymmetric(dom, S.profile(), pp, 1.0);
    const GridField uz = derivative(unit, 0, 1);
    // Newton on the scale so the grid mean of sqrt(1 - w_z^2) is exactly
    // 1 - lambda; the analytic amplitude is only right up to quadrature error.
    const double umax = uz.max_abs();
    double q = q0;
    for (int it = 0; it < 50 && umax > 0; ++it) {
        double g = 0, dg = 0;
        for (double u : uz.values()) {
            const double r = std::sqrt(std::max(1e-300, 1.0 - q * q * u * u));
            g += r;
            dg -= q * u * u / r;
        }
        g = g / static_cast<double>(uz.size()) - (1.0 - mp.lambda);
        dg /= static_cast<double>(uz.size());
        if (dg == 0) break;
        const double hi = std::min(2.0 * q, (1 - 1e-12) / umax);
        const double next = std::clamp(q - g / dg, std::min(0.5 * q, hi), hi);
        const bool done = std::abs(next - q) <= 1e-15 * q;
        q = next;
        if (done) break;
    }
    GridField w = unit;
    for (double& v : w.values()) v *= q;
    GridField wz = uz;
    for (double& v : wz.values()) v *= q;
    GridField integrand(dom);
    for (std::size_t i = 0; i < integrand.size(); ++i) {
        const double d = wz.data()[i];
        integrand.data()[i] = std::sqrt(std::max(0.0, 1.0 - d * d)) - (1.0 - mp.lambda);
    }
    Configuration c;
    c.model = Model::NL;
    c.params = mp;
    c.comp_rho = w;
    for (double& x : c.comp_rho.values()) x += mp.rho;
    c.comp_theta = GridField(dom);
    c.comp_z = z_antiderivative(integrand);
    return c;
}

Configuration build_fs_pattern(const ModelParams& mp, const PatternParams& pp, const Domain& dom) {
    mp.validate();
    if (pp.regime == Regime::UNBUCKLED) return vkd_unbuckled(mp, dom);
    check_pattern(pp);
    require_resolved(dom, pp.n, pp.k, pp.delta, true, kMinSamplesPerCell);
    const ProfileFunction& prof = default_profile(ProfileVariant::VKD_PROFILE);
    const double amp = std::sqrt(2.0 * mp.lambda) / pp.k;
    const GridField w = GridField::sample(dom, [&](double th, double z) {
        return amp * rescaled(prof, pp.delta, pp.n, th / kTwoPi + pp.k * z).f;
    });
    const GridField wt = derivative(w, 1, 0);
    const GridField wz = derivative(w, 0, 1);
    GridField it(dom), iz(dom);
    for (std::size_t i = 0; i < w.size(); ++i) {
        it.data()[i] = -(0.5 * wt.data()[i] * wt.data()[i] + w.data()[i]);
        iz.data()[i] = mp.lambda - 0.5 * wz.data()[i] * wz.data()[i];
    }
    Configuration c;
    c.model = Model::VKD;
    c.params = mp;
    c.comp_rho = w;
    for (double& x : c.comp_rho.values()) x += mp.rho - 1.0;
    c.comp_theta = theta_antiderivative(it);
    c.comp_z = z_antiderivative(iz);
    return c;
}

Configuration build_pattern(Functional model, const ModelParams& mp, const PatternParams& pp, const Domain& dom) {
    switch (model) {
        case Functional::VKD: return build_vkd_pattern(mp, pp, dom);
        case Functional::NL: return build_nl_pattern(mp, pp, dom);
        case Functional::FS: return build_fs_pattern(mp, pp, dom);
    }
    throw PreconditionError("unknown model");
}

double vkd_pattern_excess_reduced(const ModelParams& mp, const PatternParams& pp) {
    const double lam = mp.lambda, R = mp.rho - 1.0, h = mp.h;
    if (pp.regime == Regime::UNBUCKLED) return kTwoPi * lam * lam;
    check_pattern(pp);
    const ProfileMoments& M = default_profile(ProfileVariant::VKD_PROFILE).moments();
    const double n = pp.n, d = pp.delta;
    const double int_w = std::sqrt(2.0 * lam) * std::pow(d, 1.5) * M.f1 / n;
    const double int_w2 = 2.0 * lam * d * d * M.f_sq / (n * n);
    const double int_wzz2 = 2.0 * lam * n * n * M.d2f_sq / (d * d);
    return kTwoPi * (2.0 * R * int_w + int_w2 + h * h * int_wzz2);
}

double fs_pattern_energy_reduced(const ModelParams& mp, const PatternParams& pp) {
    const double lam = mp.lambda, h = mp.h;
    if (pp.regime == Regime::UNBUCKLED) return kTwoPi * lam * lam;
    check_pattern(pp);
    const ProfileMoments& M = default_profile(ProfileVariant::VKD_PROFILE).moments();
    const double n = pp.n, k = pp.k, d = pp.delta;
    const double c = lam / (kTwoPi * kTwoPi * k * k) + std::sqrt(2.0 * lam) * std::pow(d, 1.5) * M.f1 / (k * n);
    const double geo = std::pow(1.0 / kTwoPi, 4) + 2.0 * std::pow(k / kTwoPi, 2) + std::pow(k, 4);
    const double bend = kTwoPi * (2.0 * lam / (k * k)) * (n * n / (d * d)) * M.d2f_sq * geo;
    return kTwoPi * c * c + h * h * bend;
}

Domain pattern_domain(Functional model, const PatternParams& pp, double samples_per_cell, int min_theta,
                      int min_z) {
    auto pow2 = [](double need, int floor_) {
        const double v = std::max<double>(need, floor_);
        if (v > (1u << 30)) throw ResolutionError("pattern needs more than 2^30 nodes in one direction");
        return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::ceil(v))));
    };
    if (pp.regime == Regime::UNBUCKLED) return Domain::omega(pow2(min_theta, 8), pow2(min_z, 8));
    const bool tilted = model == Functional::FS;
    const int k = tilted ? pp.k : 1;
    const int nz = pow2(samples_per_cell * pp.n * k / pp.delta, min_z);
    const int nt = tilted ? pow2(samples_per_cell * pp.n / pp.delta, min_theta) : pow2(min_theta, 8);
    return Domain::omega(nt, nz);
}

}  // namespace mlab
