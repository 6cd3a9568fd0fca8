#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mlab/energy.hpp"
#include "mlab/error.hpp"
#include "mlab/exec.hpp"
#include "mlab/minimizer.hpp"

using namespace mlab;
using std::numbers::pi;

namespace {

EnergyOptions unchecked() {
    EnergyOptions o;
    o.check_resolution = false;
    return o;
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

}  // namespace

TEST_CASE("unbuckled vKD energy is 2 pi ((rho-1)^2 + lambda^2)") {
    const ModelParams mp{1e-3, 0.25, 1.5, kInf};
    const auto r = vkd_energy(vkd_unbuckled(mp, Domain::omega(8, 64)));
    CHECK(r.total == doctest::Approx(2 * pi * 0.3125).epsilon(1e-12));
    CHECK(r.excess == doctest::Approx(2 * pi * 0.0625).epsilon(1e-12));
    CHECK(r.bulk == doctest::Approx(2 * pi * 0.25).epsilon(1e-12));
    CHECK(r.admissible);
    CHECK(r.slope_linf == doctest::Approx(0.25));
}

TEST_CASE("identity deformation has zero NL excess and the NL bulk") {
    const ModelParams mp{1e-3, 0.0, 1.0, kInf};
    const auto r = nl_energy(nl_uniform(mp, Domain::omega(8, 16)));
    CHECK(std::abs(r.excess) < 1e-12);
    // Only the curvature of the unit cylinder remains.
    CHECK(r.total == doctest::Approx(r.bulk).epsilon(1e-12));
    const ModelParams big{1e-2, 0.2, 1.5, kInf};
    const auto u = nl_energy(nl_uniform(big, Domain::omega(8, 16)));
    // The bulk is attained by the uniform hoop stretch with the h^2 curvature term.
    const double rho = 1.5, h = 1e-2;
    CHECK(u.bulk == doctest::Approx(2 * pi * ((rho * rho - 1) * (rho * rho - 1) + rho * rho * h * h)).epsilon(1e-12));
    const double axial = std::pow(0.8 * 0.8 - 1, 2);
    CHECK(u.excess == doctest::Approx(2 * pi * axial).epsilon(1e-12));
}

TEST_CASE("report totals match the discrete energy used by the minimizer") {
    const Domain d = Domain::omega(16, 32);
    for (Functional f : {Functional::VKD, Functional::FS, Functional::NL}) {
        const ModelParams mp{2e-2, 0.2, f == Functional::FS ? 1.0 : 1.3, kInf};
        const Configuration c = perturbed(f, mp, d, 11);
        EnergyReport r;
        if (f == Functional::VKD) r = vkd_energy(c, unchecked());
        if (f == Functional::FS) r = fs_energy(c, unchecked());
        if (f == Functional::NL) r = nl_energy(c, unchecked());
        CHECK(discrete_energy(f, c, nullptr) == doctest::Approx(r.total).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradients match central differences") {
    const Domain d = Domain::omega(16, 32);
    for (Functional f : {Functional::VKD, Functional::FS, Functional::NL}) {
        const ModelParams mp{2e-2, 0.2, f == Functional::FS ? 1.0 : 1.3, kInf};
        CAPTURE(to_string(f));
        CHECK(gradient_check(f, mp, perturbed(f, mp, d, 21), 3, 5) <= 1e-6);
    }
}

TEST_CASE("free-shear energy drops the shear term") {
    const Domain d = Domain::omega(16, 32);
    const ModelParams mp{2e-2, 0.2, 1.0, kInf};
    const Configuration c = perturbed(Functional::FS, mp, d, 3);
    const auto v = vkd_energy(c, unchecked());
    const auto s = fs_energy(c, unchecked());
    CHECK(s.membrane_tz == 0.0);
    CHECK(s.total == doctest::Approx(v.total - 2 * v.membrane_tz).epsilon(1e-12));
}

TEST_CASE("vKD excess is nonnegative over random feasible fields") {
    const Domain d = Domain::omega(16, 32);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ModelParams mp{1e-2, 0.1 + 0.02 * seed, 1.0 + 0.05 * seed, kInf};
        const auto r = vkd_energy(perturbed(Functional::VKD, mp, d, seed), unchecked());
        CHECK(r.excess >= -1e-9);
        const auto n = nl_energy(perturbed(Functional::NL, mp, d, seed), unchecked());
        CHECK(n.total >= n.bulk - 1e-9);
    }
}

TEST_CASE("energies are invariant under theta translation") {
    const Domain d = Domain::omega(16, 32);
    const ModelParams mp{2e-2, 0.2, 1.3, kInf};
    Configuration c = perturbed(Functional::NL, mp, d, 9);
    Configuration s = c;
    s.comp_rho = theta_translate(c.comp_rho, 0.7);
    s.comp_theta = theta_translate(c.comp_theta, 0.7);
    s.comp_z = theta_translate(c.comp_z, 0.7);
    CHECK(nl_energy(s, unchecked()).total == doctest::Approx(nl_energy(c, unchecked()).total).epsilon(1e-12));
}

TEST_CASE("serial and parallel energies agree bitwise") {
    const Domain d = Domain::omega(32, 64);
    const ModelParams mp{2e-2, 0.2, 1.3, kInf};
    const Configuration c = perturbed(Functional::NL, mp, d, 4);
    double a, b;
    {
        ScopedExecution s(Execution::Serial);
        a = nl_energy(c, unchecked()).total;
    }
    {
        ScopedExecution s(Execution::Parallel);
        b = nl_energy(c, unchecked()).total;
    }
    CHECK(a == b);
}

TEST_CASE("pointwise densities") {
    // F = diag-like embedding with singular values 1.2 and 0.7.
    std::array<std::array<double, 2>, 3> F{{{1.2, 0.0}, {0.0, 0.7}, {0.0, 0.0}}};
    CHECK(relaxed_density(F) == doctest::Approx(std::pow(1.44 - 1, 2)));
    CHECK(metric_density(F) == doctest::Approx(std::pow(1.44 - 1, 2) + std::pow(0.49 - 1, 2)));
    // A rotation of the columns leaves both unchanged.
    const double c = std::cos(0.4), s = std::sin(0.4);
    std::array<std::array<double, 2>, 3> G{{{1.2 * c, -0.7 * s}, {1.2 * s, 0.7 * c}, {0.0, 0.0}}};
    CHECK(relaxed_density(G) == doctest::Approx(relaxed_density(F)));
    CHECK(metric_density(G) == doctest::Approx(metric_density(F)));
}

TEST_CASE("under-resolved fields are rejected by default") {
    const Domain d = Domain::omega(8, 16);
    Configuration c = vkd_unbuckled({1e-3, 0.2, 1.2, kInf}, d);
    for (int j = 0; j < d.n_z; ++j)
        for (int i = 0; i < d.n_theta; ++i) c.comp_rho(i, j) += 0.1 * std::cos(2 * pi * 7 * d.z(j)) + 0.1;
    CHECK_THROWS_AS(vkd_energy(c), ResolutionError);
    CHECK_NOTHROW(vkd_energy(c, unchecked()));
}
