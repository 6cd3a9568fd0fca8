#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mlab/error.hpp"
#include "mlab/patterns.hpp"

using namespace mlab;
using std::numbers::pi;

namespace {

double max_dev_from_theta_mean(const GridField& f) {
    const auto avg = theta_average(f);
    const Domain& d = f.domain();
    double dev = 0;
    for (int i = 0; i < d.n_theta; ++i)
        for (int j = 0; j < d.n_z; ++j) dev = std::max(dev, std::abs(f(i, j) - avg[j]));
    return dev;
}

}  // namespace

TEST_CASE("regime selection at the reference parameters") {
    const ModelParams mp{1e-3, 0.25, 1.5, 4};
    const RegimeChoice v = select_regime(Functional::VKD, mp);
    CHECK(v.params.regime == Regime::MANY);
    // n is the smallest integer in [lo, 2 lo) with lo = R^{1/3} lambda h^{-2/3} m^{-7/6}.
    const double lo = std::cbrt(0.5) * 0.25 * std::pow(1e-3, -2.0 / 3) * std::pow(4.0, -7.0 / 6);
    CHECK(v.params.n == static_cast<int>(std::ceil(lo)));
    CHECK(v.params.delta == doctest::Approx(0.25));
    CHECK_FALSE(v.comparisons.empty());

    const PatternParams one = select_regime_params(Functional::VKD, {1e-3, 0.25, 1.5, kInf});
    CHECK(one.regime == Regime::ONE);
    CHECK(one.n == 1);
    CHECK(one.delta == doctest::Approx(4 * std::pow(0.25, 1.0 / 7) * std::pow(0.5, -2.0 / 7) * std::pow(1e-3, 4.0 / 7)));

    CHECK(select_regime_params(Functional::VKD, {0.2, 0.1, 1.0, kInf}).regime == Regime::UNBUCKLED);
    CHECK(select_regime_params(Functional::VKD, {1e-3, 0.25, 1.0, kInf}).regime == Regime::FLAT);
}

TEST_CASE("regime selection is idempotent and pure") {
    for (double h : {1e-5, 1e-4, 1e-3, 1e-2})
        for (Functional f : {Functional::VKD, Functional::FS, Functional::NL}) {
            const ModelParams mp{h, 0.25, f == Functional::FS ? 1.0 : 1.5, 4};
            PatternParams a, b;
            try {
                a = select_regime_params(f, mp);
            } catch (const PreconditionError&) {
                continue;
            }
            b = select_regime_params(f, mp);
            CHECK(a.regime == b.regime);
            CHECK(a.n == b.n);
            CHECK(a.k == b.k);
            CHECK(a.delta == b.delta);
        }
}

TEST_CASE("vKD pattern has no axial or shear strain and respects the slope bound") {
    const ModelParams mp{1e-3, 0.25, 1.5, 4};
    const PatternParams pp = select_regime_params(Functional::VKD, mp);
    const Domain d = pattern_domain(Functional::VKD, pp, 512);
    const Configuration c = build_vkd_pattern(mp, pp, d);
    const StrainField e = vkd_strain(c);
    CHECK(e.eps_zz.max_abs() <= 1e-8);
    CHECK(e.eps_tz.max_abs() <= 1e-8);
    CHECK(c.comp_rho.min() >= mp.rho - 1 - 1e-12);
    CHECK(slope_linf(c) <= 4 + 1e-9);
    CHECK(vkd_slope_bound(0.25, pp.delta) <= 4);
    const auto r = vkd_energy(c);
    CHECK(r.admissible);
    // Grid and closed-form energies agree.
    CHECK(r.excess == doctest::Approx(vkd_pattern_excess_reduced(mp, pp)).epsilon(1e-6));
}

TEST_CASE("NL pattern is an axial isometry with the imposed shortening") {
    const ModelParams mp{1e-3, 0.25, 1.5, 4};
    const PatternParams pp = select_regime_params(Functional::NL, mp);
    const Domain d = pattern_domain(Functional::NL, pp, 512);
    const Configuration c = build_nl_pattern(mp, pp, d);
    const MetricField g = nl_metric(c);
    double gz = 0;
    for (std::size_t k = 0; k < g.g_zz.size(); ++k) gz = std::max(gz, std::abs(g.g_zz.data()[k] - 1));
    CHECK(gz <= 1e-8);
    const GridField wz = derivative(c.comp_rho, 0, 1);
    for (int i = 0; i < d.n_theta; i += 3) {
        double s = 0;
        for (int j = 0; j < d.n_z; ++j) s += std::sqrt(1 - wz(i, j) * wz(i, j));
        CHECK(s * d.dz() == doctest::Approx(1 - mp.lambda).epsilon(1e-9));
    }
    CHECK(c.comp_rho.min() >= mp.rho - 1e-12);
    CHECK(derivative(c.comp_z, 0, 1).min() + (1 - mp.lambda) >= 0);
    CHECK(nl_energy(c).admissible);
}

TEST_CASE("FS tilted pattern has theta-constant hoop strain") {
    const ModelParams mp{1e-3, 0.25, 1.0, kInf};
    const PatternParams pp{1, 1, 0.8, Regime::FS_FEW_TILTED};
    const Domain d = pattern_domain(Functional::FS, pp, 512);
    const Configuration c = build_fs_pattern(mp, pp, d);
    const StrainField e = vkd_strain(c);
    CHECK(max_dev_from_theta_mean(e.eps_tt) <= 1e-8);
    CHECK(e.eps_zz.max_abs() <= 1e-8);
    CHECK(fs_energy(c).total == doctest::Approx(fs_pattern_energy_reduced(mp, pp)).epsilon(1e-6));
    CHECK(slope_linf(c) <= fs_slope_bound(0.25, pp.delta, pp.n, pp.k) + 1e-9);
}

TEST_CASE("pattern builders reject bad inputs") {
    const ModelParams mp{1e-3, 0.25, 1.5, kInf};
    CHECK_THROWS_AS(build_vkd_pattern(mp, {1, 1, 1.5, Regime::ONE}, Domain::omega(8, 256)), PreconditionError);
    CHECK_THROWS_AS(build_vkd_pattern(mp, {0, 1, 0.5, Regime::ONE}, Domain::omega(8, 256)), PreconditionError);
    CHECK_THROWS_AS(build_vkd_pattern(mp, {8, 1, 0.1, Regime::MANY}, Domain::omega(8, 256)), ResolutionError);
    CHECK_THROWS_AS(build_nl_pattern(mp, {1, 1, 0.3, Regime::ONE}, Domain::omega(8, 256)), PreconditionError);
    CHECK_THROWS_AS(regime_from_string("SIDEWAYS"), PreconditionError);
    CHECK(regime_from_string(to_string(Regime::FS_MANY_TILTED)) == Regime::FS_MANY_TILTED);
}

TEST_CASE("pattern_domain gives power-of-two grids meeting the sample factor") {
    const PatternParams pp{3, 1, 0.2, Regime::MANY};
    const Domain d = pattern_domain(Functional::VKD, pp, 32);
    CHECK((d.n_z & (d.n_z - 1)) == 0);
    CHECK(d.n_z >= 32 * 3 / 0.2);
    CHECK(d.n_z / 2 < 32 * 3 / 0.2);
    CHECK_NOTHROW(require_resolved(d, pp.n, pp.k, pp.delta, false));
}

TEST_CASE("unbuckled branch returns the reference state") {
    const ModelParams mp{0.2, 0.1, 1.0, kInf};
    const PatternParams pp = select_regime_params(Functional::VKD, mp);
    const auto r = vkd_energy(build_pattern(Functional::VKD, mp, pp, Domain::omega(8, 64)));
    CHECK(r.excess == doctest::Approx(2 * pi * 0.01).epsilon(1e-12));
}
