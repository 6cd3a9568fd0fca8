#include <doctest.h>

#include <cmath>

#include "mlab/certificates.hpp"
#include "mlab/error.hpp"
#include "mlab/patterns.hpp"

using namespace mlab;

namespace {

Configuration translated(const Configuration& c, double shift) {
    Configuration s = c;
    s.comp_rho = theta_translate(c.comp_rho, shift);
    s.comp_theta = theta_translate(c.comp_theta, shift);
    s.comp_z = theta_translate(c.comp_z, shift);
    return s;
}

Configuration pattern(Functional f, const ModelParams& mp) {
    const PatternParams pp = select_regime_params(f, mp);
    return build_pattern(f, mp, pp, pattern_domain(f, pp, 32));
}

}  // namespace

TEST_CASE("report pass rule") {
    CHECK(make_report("a", 1.0, 1.0, CertificateMode::EXPLICIT).passed);
    CHECK(make_report("a", 1.0, 1.0 + 5e-10, CertificateMode::EXPLICIT).passed);
    CHECK_FALSE(make_report("a", 1.0, 1.0 + 2e-9, CertificateMode::EXPLICIT).passed);
    const auto r = make_report("b", 3.0, 2.0, CertificateMode::EXPLICIT);
    CHECK(r.slack == doctest::Approx(1.0));
    CHECK(r.ratio == doctest::Approx(1.5));
}

TEST_CASE("vKD constructions pass every certificate") {
    for (double h : {1e-4, 1e-3})
        for (double m : {4.0, kInf}) {
            const ModelParams mp{h, 0.25, 1.5, m};
            const auto reps = vkd_certificates(pattern(Functional::VKD, mp));
            CHECK(reps.size() >= 4);
            for (const auto& r : reps) {
                CAPTURE(r.name);
                CHECK(r.passed);
            }
        }
}

TEST_CASE("unbuckled state saturates the axial chain") {
    const auto reps = vkd_certificates(vkd_unbuckled({1e-3, 0.25, 1.5, kInf}, Domain::omega(8, 64)));
    for (const auto& r : reps) {
        CHECK(r.passed);
        if (r.name == "vkd_axial_jensen") CHECK(std::abs(r.slack) < 1e-12);
    }
}

TEST_CASE("NL constructions pass every certificate") {
    const ModelParams mp{1e-3, 0.25, 1.5, 4};
    const auto reps = nl_certificates(pattern(Functional::NL, mp));
    CHECK(reps.size() >= 10);
    for (const auto& r : reps) {
        CAPTURE(r.name);
        CHECK(r.passed);
    }
    for (const auto& r : nl_certificates(nl_uniform(mp, Domain::omega(8, 64)))) CHECK(r.passed);
}

TEST_CASE("FS certificates on a tilted pattern") {
    const ModelParams mp{1e-3, 0.25, 1.0, kInf};
    const PatternParams pp{2, 2, 0.5, Regime::FS_FEW_TILTED};
    const Configuration c = build_fs_pattern(mp, pp, pattern_domain(Functional::FS, pp, 32));
    CHECK(all_passed(fs_certificates(c)));
    CHECK(all_passed(certificates(Functional::FS, c)));
    CHECK_THROWS_AS(fs_certificates(vkd_unbuckled({1e-3, 0.25, 1.2, kInf}, Domain::omega(8, 64))),
                    PreconditionError);
}

TEST_CASE("certificates are invariant under theta translation") {
    const ModelParams mp{1e-3, 0.25, 1.0, kInf};
    const PatternParams pp{1, 2, 0.6, Regime::FS_FEW_TILTED};
    const Configuration c = build_fs_pattern(mp, pp, pattern_domain(Functional::FS, pp, 32));
    // Whole-cell shift: a fractional spectral shift rings below the obstacle.
    const Configuration s = translated(c, 5 * c.domain().dtheta());
    const auto a = vkd_certificates(c), b = vkd_certificates(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CAPTURE(a[i].name);
        CHECK(b[i].lhs == doctest::Approx(a[i].lhs).epsilon(1e-9));
        CHECK(b[i].rhs == doctest::Approx(a[i].rhs).epsilon(1e-6));
        CHECK(b[i].passed == a[i].passed);
    }
}

TEST_CASE("obstacle violations are preconditions, not failures") {
    Configuration c = vkd_unbuckled({1e-3, 0.25, 1.5, kInf}, Domain::omega(8, 64));
    c.comp_rho(0, 0) -= 1e-3;
    CHECK_THROWS_AS(vkd_certificates(c), PreconditionError);
    Configuration n = nl_uniform({1e-3, 0.25, 1.5, kInf}, Domain::omega(8, 64));
    n.comp_rho(2, 3) -= 1e-3;
    CHECK_THROWS_AS(nl_certificates(n), PreconditionError);
}

TEST_CASE("ratio-mode certificates carry the floor") {
    const auto reps = nl_certificates(pattern(Functional::NL, {1e-3, 0.25, 1.5, 4}));
    bool saw_ratio = false;
    for (const auto& r : reps)
        if (r.mode == CertificateMode::RATIO) {
            saw_ratio = true;
            CHECK(r.ratio > kRatioFloor);
        }
    CHECK(saw_ratio);
}
