// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "mlab/certificates.hpp"
#include "mlab/energy.hpp"
#include "mlab/error.hpp"
#include "mlab/minimizer.hpp"
#include "mlab/patterns.hpp"
#include "mlab/sweep.hpp"

using namespace mlab;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Tally {
    int evaluated = 0;
    int failed = 0;
    double worst_slack = kInf;

    void add(const std::vector<CertificateReport>& reports) {
        for (const auto& r : reports) {
            ++evaluated;
            if (!r.passed) ++failed;
            worst_slack = std::min(worst_slack, r.slack);
        }
    }
};

Tally certs;
int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Runs one criterion, turning an escaped exception into a FAIL line.
void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        verdict(id, false, std::string("exception: ") + e.what());
    }
}

void criterion1() {
    const auto t0 = Clock::now();
    const auto u = vkd_energy(vkd_unbuckled({1e-3, 0.25, 1.5, kInf}, Domain::omega(8, 64)));
    const auto id = nl_energy(nl_uniform({1e-3, 0.0, 1.0, kInf}, Domain::omega(8, 64)));
    const double e_total = rel(u.total, 2 * pi * 0.3125);
    const double e_excess = rel(u.excess, 2 * pi * 0.0625);
    const double t = seconds_since(t0);
    const bool ok = e_total <= 1e-9 && e_excess <= 1e-9 && std::abs(id.excess) <= 1e-9 && t < 1;
    verdict(1, ok,
            fmt("vkd total rel err %.2e, excess rel err %.2e, nl identity excess %.2e, %.3fs", e_total, e_excess,
                id.excess, t));
}

double theta_mean_deviation(const GridField& f) {
    const auto avg = theta_average(f);
    const Domain& d = f.domain();
    double dev = 0;
    for (int i = 0; i < d.n_theta; ++i)
        for (int j = 0; j < d.n_z; ++j) dev = std::max(dev, std::abs(f(i, j) - avg[j]));
    return dev;
}

// Cases are chosen with at least ~460 nodes per wrinkle cell on the
// 512x4096 grid; below that the identities degrade with the spectral tail of
// the bump (see build_vkd_pattern).
void criterion2() {
    const Domain dom = Domain::omega(512, 4096);
    bool ok = true;
    std::string detail;
    auto note = [&](const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; };

    const std::vector<ModelParams> vkd_cases = {{3e-3, 0.25, 1.5, 4}, {1e-2, 0.25, 1.5, kInf}, {1e-3, 0.25, 1.0, kInf}};
    for (const auto& mp : vkd_cases) {
        const auto t0 = Clock::now();
        const PatternParams pp = select_regime_params(Functional::VKD, mp);
        const Configuration c = build_vkd_pattern(mp, pp, dom);
        const StrainField e = vkd_strain(c);
        const double zz = e.eps_zz.max_abs(), tz = e.eps_tz.max_abs();
        certs.add(vkd_certificates(c));
        const double t = seconds_since(t0);
        ok = ok && zz <= 1e-8 && tz <= 1e-8 && t < 10;
        note(fmt("vkd %s |e_zz| %.1e |e_tz| %.1e %.1fs", to_string(pp.regime).c_str(), zz, tz, t));
    }

    {
        const auto t0 = Clock::now();
        const ModelParams mp{3e-2, 0.25, 1.5, 4};
        const PatternParams pp = select_regime_params(Functional::NL, mp);
        const Configuration c = build_nl_pattern(mp, pp, dom);
        const MetricField g = nl_metric(c);
        double gz = 0;
        for (std::size_t k = 0; k < g.g_zz.size(); ++k) gz = std::max(gz, std::abs(g.g_zz.data()[k] - 1));
        const GridField wz = derivative(c.comp_rho, 0, 1);
        double len_err = 0;
        for (int i = 0; i < dom.n_theta; ++i) {
            double s = 0;
            for (int j = 0; j < dom.n_z; ++j) s += std::sqrt(1 - wz(i, j) * wz(i, j));
            len_err = std::max(len_err, std::abs(s * dom.dz() - (1 - mp.lambda)));
        }
        certs.add(nl_certificates(c));
        const double t = seconds_since(t0);
        ok = ok && gz <= 1e-8 && len_err <= 1e-9 && t < 10;
        note(fmt("nl %s |g_zz-1| %.1e slice length err %.1e %.1fs", to_string(pp.regime).c_str(), gz, len_err, t));
    }

    // The regime-selected FS patterns at these h need k in the tens and do not
    // resolve on this grid, so the tilted construction is checked directly.
    const std::vector<PatternParams> fs_cases = {{2, 4, 0.9, Regime::FS_FEW_TILTED},
                                                 {1, 2, 0.8, Regime::FS_FEW_TILTED}};
    for (const auto& pp : fs_cases) {
        const auto t0 = Clock::now();
        const ModelParams mp{1e-3, 0.25, 1.0, kInf};
        const Configuration c = build_fs_pattern(mp, pp, dom);
        const double dev = theta_mean_deviation(vkd_strain(c).eps_tt);
        certs.add(fs_certificates(c));
        const double t = seconds_since(t0);
        ok = ok && dev <= 1e-8 && t < 10;
        note(fmt("fs %s (n=%d,k=%d) hoop deviation %.1e %.1fs", to_string(pp.regime).c_str(), pp.n, pp.k, dev, t));
    }
    verdict(2, ok, detail);
}

struct FitCase {
    const char* name;
    Functional model;
    SweepVar var;
    double lo, hi;
    ModelParams fixed;
    double min_exp, max_exp;
    double samples_per_cell;
};

void criterion3() {
    const std::vector<FitCase> cases = {
        {"vkd MANY vs h", Functional::VKD, SweepVar::H, 1e-6, 1e-3, {1e-3, 0.25, 1.5, 4}, 0.60, 0.73, 32},
        {"vkd ONE vs h", Functional::VKD, SweepVar::H, 1e-6, 1e-3, {1e-3, 0.25, 1.5, kInf}, 0.82, 0.90, 32},
        {"vkd ONE vs rho-1", Functional::VKD, SweepVar::RHO_MINUS_1, 0.5, 10, {1e-4, 0.25, 1.5, kInf}, 0.52, 0.62, 32},
        {"fs tilted vs h", Functional::FS, SweepVar::H, 2e-6, 1e-3, {1e-3, 0.25, 1.0, 4}, 1.04, 1.14, 32},
        {"fs MANY vs lambda", Functional::FS, SweepVar::LAMBDA, 0.04, 0.5, {1e-10, 0.25, 1.0, 4}, 1.42, 1.58, 32},
        {"nl MANY vs h", Functional::NL, SweepVar::H, 1e-4, 1e-2, {1e-3, 0.25, 1.5, 4}, 0.60, 0.73, 64},
    };
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (const auto& fc : cases) {
        SweepSpec s;
        s.model = fc.model;
        s.varying = fc.var;
        s.lo = fc.lo;
        s.hi = fc.hi;
        s.fixed = fc.fixed;
        s.count = 8;
        s.samples_per_cell = fc.samples_per_cell;
        const SweepResult r = run_sweep(s);
        std::vector<double> x, y;
        for (const auto& row : r.rows) {
            x.push_back(row.x);
            y.push_back(row.excess);
            certs.evaluated += row.certificates_evaluated ? 1 : 0;
            certs.failed += row.certificates_failed;
        }
        const FitResult f = fit_exponent(x, y);
        const bool pass = f.exponent >= fc.min_exp && f.exponent <= fc.max_exp && f.r_squared >= 0.995;
        ok = ok && pass;
        detail += fmt("%s%s exp %.4f in [%.2f, %.2f] r2 %.5f", detail.empty() ? "" : "; ", fc.name, f.exponent,
                      fc.min_exp, fc.max_exp, f.r_squared);
    }
    const double t = seconds_since(t0);
    ok = ok && t <= 600;
    verdict(3, ok, detail + fmt("; %.1fs", t));
}

void criterion5() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (InterpFamily fam :
         {InterpFamily::GN_1D, InterpFamily::GN_2D_L43, InterpFamily::GN_2D_L2, InterpFamily::GN_2D_LINF,
          InterpFamily::MIXED}) {
        const InterpolationReport r = check_interpolation(fam, 500, 20240601);
        const bool pass = r.violations == 0 && r.min_ratio > 1e-3 && r.amplitude_error <= 1e-12 && r.samples == 500;
        ok = ok && pass;
        detail += fmt("%s%s viol %d min %.3g amp %.1e", detail.empty() ? "" : "; ", to_string(fam).c_str(),
                      r.violations, r.min_ratio, r.amplitude_error);
    }
    verdict(5, ok, detail + fmt("; %.1fs", seconds_since(t0)));
}

// Smooth, strictly feasible perturbation of the reference state.
Configuration perturbed(Functional f, const ModelParams& mp, const Domain& d, std::uint64_t seed) {
    Configuration c = f == Functional::NL ? nl_uniform(mp, d) : vkd_unbuckled(mp, d);
    const GridField a = band_limited_noise(d, 2, 3, seed, 0);
    const GridField b = band_limited_noise(d, 2, 3, seed, 1);
    const GridField e = band_limited_noise(d, 2, 3, seed, 2);
    for (std::size_t k = 0; k < d.size(); ++k) {
        c.comp_rho.data()[k] += 0.05 * (a.data()[k] + 1.5);
        c.comp_theta.data()[k] += 0.02 * b.data()[k];
        c.comp_z.data()[k] += 0.01 * e.data()[k];
    }
    return c;
}

void criterion6() {
    const auto t0 = Clock::now();
    const Domain d = Domain::omega(16, 32);
    double worst = 0;
    for (Functional f : {Functional::VKD, Functional::FS, Functional::NL})
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const ModelParams mp{2e-2, 0.2, f == Functional::FS ? 1.0 : 1.3, kInf};
            worst = std::max(worst, gradient_check(f, mp, perturbed(f, mp, d, seed), 3, 100 + seed));
        }
    const double t = seconds_since(t0);
    verdict(6, worst <= 1e-6 && t < 60, fmt("worst relative error %.2e over 15 fields, %.1fs", worst, t));
}

// Three points only, so the library fit (which wants four) is not usable here.
double three_point_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

double best_constructed(const ModelParams& mp) {
    double best = vkd_energy(vkd_unbuckled(mp, Domain::omega(8, 64))).excess;
    const double one = 4 * std::pow(mp.lambda, 1.0 / 7) * std::pow(mp.rho - 1, -2.0 / 7) * std::pow(mp.h, 4.0 / 7);
    const double flat = 4 * std::sqrt(mp.h);
    for (const PatternParams pp : {PatternParams{1, 1, one, Regime::ONE}, PatternParams{1, 1, flat, Regime::FLAT}}) {
        if (pp.delta > 1) continue;
        const Configuration c = build_vkd_pattern(mp, pp, pattern_domain(Functional::VKD, pp, kMinSamplesPerCell));
        certs.add(vkd_certificates(c));
        best = std::min(best, vkd_energy(c).excess);
    }
    return best;
}

void criterion7() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    std::vector<double> hs, slopes;
    for (double h : {1e-2, 3e-3, 1e-3}) {
        const ModelParams mp{h, 0.25, 1.5, kInf};
        const double best = best_constructed(mp);
        MinimizeOptions o;
        o.obstacle_mode = ObstacleMode::PENALTY;
        o.noise_amplitude = 0.03;
        o.max_iterations = 3000;
        const MinimizeResult r = minimize(Functional::VKD, mp, Domain::omega(16, 256), o);
        const auto reports = vkd_certificates(r.final);
        certs.add(reports);
        double rhs = 0;
        for (const auto& c : reports)
            if (c.passed) rhs = std::max(rhs, c.rhs);
        const double e = r.report.excess;
        ok = ok && e <= 1.5 * best && e >= rhs;
        hs.push_back(h);
        slopes.push_back(r.slope_linf);
        detail += fmt("h=%g excess %.4g best %.4g cert %.4g slope %.3g; ", h, e, best, rhs, r.slope_linf);
    }
    const double p = three_point_slope(hs, slopes);
    const double t = seconds_since(t0);
    ok = ok && p <= -0.15 && t <= 1800;
    verdict(7, ok, detail + fmt("slope exponent %.3f, %.1fs", p, t));
}

void criterion8() {
    const auto t0 = Clock::now();
    const ModelParams mp{0.2, 0.1, 1.0, kInf};
    const MinimizeResult r = minimize(Functional::VKD, mp, Domain::omega(16, 128));
    certs.add(vkd_certificates(r.final));
    const double target = 2 * pi * 0.01;
    const double err = rel(r.report.excess, target);
    const double t = seconds_since(t0);
    verdict(8, err <= 0.05 && t < 120,
            fmt("excess %.6g vs %.6g (rel %.2e), %d iterations, %.1fs", r.report.excess, target, err, r.iterations, t));
}

}  // namespace

int main() {
    guarded(1, criterion1);
    guarded(2, criterion2);
    guarded(3, criterion3);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    guarded(8, criterion8);
    // Certificates from every field built above.
    verdict(4, certs.failed == 0 && certs.evaluated > 0,
            fmt("%d failures over %d certificate evaluations, worst slack %.3g", certs.failed,
                certs.evaluated, certs.worst_slack));
    std::printf("%s\n", failures == 0 ? "ALL PASS" : "SOME FAILED");
    return failures == 0 ? 0 : 1;
}
