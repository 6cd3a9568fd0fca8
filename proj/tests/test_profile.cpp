#include <doctest.h>

#include <cmath>

#include "mlab/error.hpp"
#include "mlab/patterns.hpp"

using namespace mlab;

namespace {

// Composite trapezoid on [lo, hi]; spectrally accurate for the smooth,
// compactly supported integrands used here.
template <class F>
double trapezoid(F&& f, double lo, double hi, int n = 200000) {
    const double dx = (hi - lo) / n;
    double s = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < n; ++i) s += f(lo + i * dx);
    return s * dx;
}

}  // namespace

TEST_CASE("Friedrichs profile amplitude from an independent quadrature") {
    const double w0 = kDefaultHalfWidth;
    auto unit_slope = [&](double t) {
        const double x = t / w0;
        if (std::abs(x) >= 1) return 0.0;
        const double d = 1 - x * x;
        return std::exp(1 - 1 / d) * (-2 * x / (d * d)) / w0;
    };
    const double I = trapezoid([&](double t) { return std::pow(unit_slope(t), 2); }, -w0, w0);
    const ProfileFunction& p = default_profile(ProfileVariant::VKD_PROFILE);
    CHECK(p.shape() == ProfileShape::FRIEDRICHS);
    CHECK(p.amplitude() == doctest::Approx(1 / std::sqrt(I)).epsilon(1e-10));
    CHECK(p.moments().df_sq == doctest::Approx(1.0).epsilon(1e-12));
    const double f1 = trapezoid([&](double t) { return p.f(t); }, -0.5, 0.5);
    CHECK(p.moments().f1 == doctest::Approx(f1).epsilon(1e-9));
    const double d2 = trapezoid([&](double t) { return std::pow(p.d2f(t), 2); }, -0.5, 0.5);
    CHECK(p.moments().d2f_sq == doctest::Approx(d2).epsilon(1e-8));
}

TEST_CASE("profiles are one-periodic with consistent derivatives") {
    for (ProfileVariant v : {ProfileVariant::VKD_PROFILE, ProfileVariant::NL_PROFILE}) {
        const ProfileFunction& p = default_profile(v);
        for (double t : {-0.31, 0.0, 0.12, 0.4}) {
            CHECK(p.f(t + 1) == doctest::Approx(p.f(t)));
            const double e = 1e-6;
            CHECK(p.df(t) == doctest::Approx((p.f(t + e) - p.f(t - e)) / (2 * e)).epsilon(1e-6));
            CHECK(p.d2f(t) == doctest::Approx((p.df(t + e) - p.df(t - e)) / (2 * e)).epsilon(1e-5));
        }
        CHECK(p.f(0.5) == 0.0);
        CHECK(p.f(0.0) > 0.0);
    }
}

TEST_CASE("NL profile: arclength normalization and slope below one") {
    const ProfileFunction& p = default_profile(ProfileVariant::NL_PROFILE);
    CHECK(p.shape() == ProfileShape::PLATEAU);
    const double L = trapezoid([&](double t) { return std::sqrt(1 - p.df(t) * p.df(t)); }, -0.5, 0.5);
    CHECK(L == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p.moments().df_max < 1.0);
    // The Friedrichs shape cannot satisfy the NL normalization.
    CHECK_THROWS_AS(make_profile(ProfileVariant::NL_PROFILE, kDefaultHalfWidth, ProfileShape::FRIEDRICHS),
                    PreconditionError);
    CHECK_THROWS_AS(make_profile(ProfileVariant::VKD_PROFILE, 0.6), PreconditionError);
}

TEST_CASE("S-map endpoints and inverse") {
    const SProfile& S = default_s_profile();
    CHECK(std::abs(S(0.0)) < 1e-12);
    CHECK(S(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    for (double s : {0.01, 0.1, 0.25, 0.45}) CHECK(S(S.inverse(s)) == doctest::Approx(s).epsilon(1e-10));
    // Monotone: S' > 0 on (0, 1].
    for (double q : {0.1, 0.5, 0.9}) CHECK(S.derivative(q) > 0);
    const double e = 1e-6;
    CHECK(S.derivative(0.6) == doctest::Approx((S(0.6 + e) - S(0.6 - e)) / (2 * e)).epsilon(1e-5));
}

TEST_CASE("rescaled vKD profile keeps unit axial slope energy") {
    const ProfileFunction& p = default_profile(ProfileVariant::VKD_PROFILE);
    for (int n : {1, 2, 3, 6})
        for (double delta : {1.0, 0.5, 0.13}) {
            CAPTURE(n);
            CAPTURE(delta);
            const double I =
                trapezoid([&](double t) { return std::pow(rescaled(p, delta, n, t).df, 2); }, -0.5, 0.5, 400000);
            CHECK(I == doctest::Approx(1.0).epsilon(1e-6));
            // Whole bumps: the profile vanishes at the window edge.
            CHECK(std::abs(rescale_profile(p, delta, n, 0.5 * delta - 1e-12)) < 1e-9);
            CHECK(rescale_profile(p, delta, n, 0.5 * delta + 1e-3) == 0.0);
        }
}

TEST_CASE("rescaled NL profile shortens each slice by delta/2") {
    const ProfileFunction& p = default_profile(ProfileVariant::NL_PROFILE);
    for (int n : {1, 4})
        for (double delta : {1.0, 0.3}) {
            const double L = trapezoid(
                [&](double t) { return std::sqrt(1 - std::pow(rescaled(p, delta, n, t).df, 2)); }, -0.5, 0.5, 400000);
            CHECK(L == doctest::Approx(1 - delta / 2).epsilon(1e-6));
        }
}
