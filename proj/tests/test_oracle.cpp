#include <doctest.h>

#include <cmath>
#include <random>

#include "mlab/error.hpp"
#include "mlab/oracle.hpp"

using namespace mlab;

TEST_CASE("large-mandrel ONE branch value") {
    const ScalingPrediction p = predict(Functional::VKD, {1e-3, 0.25, 1.5, kInf});
    CHECK(p.branch == ScalingBranch::ONE);
    // (rho-1)^{4/7} h^{6/7} lambda^{5/7}, evaluated independently.
    CHECK(p.value == doctest::Approx(0.0006706739488199317).epsilon(1e-12));
    CHECK(p.lower == p.upper);
    CHECK(p.hypothesis_ok);
}

TEST_CASE("large-mandrel MANY branch at finite m") {
    const ModelParams mp{1e-5, 0.25, 1.5, 4};
    const ScalingPrediction p = predict(Functional::VKD, mp);
    CHECK(p.branch == ScalingBranch::MANY);
    CHECK(p.value == doctest::Approx(std::pow(0.5, 2.0 / 3) * std::pow(1e-5, 2.0 / 3) * 0.25).epsilon(1e-12));
}

TEST_CASE("small mandrel: flat upper bound with separate lower bound") {
    const ScalingPrediction p = predict(Functional::VKD, {1e-3, 0.25, 1.001, kInf});
    CHECK(p.branch == ScalingBranch::FLAT);
    CHECK(p.upper == doctest::Approx(0.25 * 1e-3));
    CHECK(p.lower < p.upper);
    CHECK_FALSE(p.hypothesis_ok);
    // rho = 1: the neutral bound max(h lambda^{3/2}, (h lambda)^{12/11}) applies.
    const ScalingPrediction n = predict(Functional::VKD, {1e-3, 0.25, 1.0, 4});
    CHECK(n.lower == doctest::Approx(std::max(1e-3 * std::pow(0.25, 1.5), std::pow(0.25e-3, 12.0 / 11))));
}

TEST_CASE("free-shear law") {
    const ScalingPrediction a = predict(Functional::FS, {1e-3, 0.25, 1.0, kInf});
    CHECK(a.branch == ScalingBranch::FS_12_11);
    CHECK(a.value == doctest::Approx(std::pow(0.25e-3, 12.0 / 11)).epsilon(1e-12));
    const ScalingPrediction b = predict(Functional::FS, {1e-10, 0.25, 1.0, 4});
    CHECK(b.branch == ScalingBranch::FS_3_2);
    CHECK(b.value == doctest::Approx(1e-10 * 0.125).epsilon(1e-12));
    const ScalingPrediction c = predict(Functional::FS, {0.5, 0.1, 1.0, 4});
    CHECK(c.branch == ScalingBranch::UNBUCKLED);
    CHECK(c.value == doctest::Approx(0.01));
}

TEST_CASE("NL law is not guaranteed at m = inf") {
    const ScalingPrediction p = predict(Functional::NL, {1e-3, 0.25, 1.5, kInf});
    CHECK_FALSE(p.hypothesis_ok);
    const ScalingPrediction q = predict(Functional::NL, {1e-3, 0.25, 1.5, 4});
    CHECK(q.hypothesis_ok);
    CHECK(q.branch == ScalingBranch::MANY);
    CHECK(q.value == doctest::Approx(std::pow(1.25, 2.0 / 3) * std::pow(1e-3, 2.0 / 3) * 0.25).epsilon(1e-12));
}

TEST_CASE("c0 threshold") {
    CHECK(c0(0.5, 1e-3, kInf) == doctest::Approx(0.12574334296829356).epsilon(1e-12));
    CHECK(c0(0.5, 1e-3, 4) == doctest::Approx(0.06324555320336758).epsilon(1e-12));
    CHECK(c0(0.25, 1e-4, 4) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(c0(0.5, 1e-3, 1) == doctest::Approx(std::sqrt(1e-3)).epsilon(1e-12));
}

TEST_CASE("blow-up rates") {
    const BlowupPrediction v = blowup(BlowupModel::VKD_LARGE, {1e-4, 0.25, 2.0, kInf});
    CHECK(v.rate == doctest::Approx(7.670637023171954).epsilon(1e-12));
    CHECK(v.hypothesis_ok);
    CHECK(blowup_rate(BlowupModel::FS, {1e-3, 0.25, 1.0, kInf}) == doctest::Approx(1.062747283529282).epsilon(1e-12));
    CHECK_THROWS_AS(blowup(BlowupModel::VKD_LARGE, {1e-4, 0.25, 1.0, kInf}), PreconditionError);
    CHECK_FALSE(blowup(BlowupModel::FS, {0.5, 0.25, 1.0, kInf}).hypothesis_ok);
}

TEST_CASE("predict is total on valid inputs and rejects invalid ones") {
    CHECK_THROWS_AS(predict(Functional::VKD, {-1, 0.25, 1.5, kInf}), PreconditionError);
    CHECK_NOTHROW(predict(Functional::NL, {0.9, 0.99, 1.0, kInf}));
}

TEST_CASE("regime boundary equivalences hold on random parameters") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lh(-8, 0), ll(-4, -0.01), lr(-6, 1), lm(-1, 2);
    std::bernoulli_distribution inf_m(0.3);
    int disagreements = 0;
    for (int s = 0; s < 10000; ++s) {
        ModelParams mp;
        mp.h = std::pow(10.0, lh(rng));
        mp.lambda = std::pow(10.0, ll(rng));
        mp.rho = 1 + std::pow(10.0, lr(rng));
        mp.m = inf_m(rng) ? kInf : std::pow(10.0, lm(rng));
        for (Functional f : {Functional::VKD, Functional::NL, Functional::FS})
            if (!regime_boundary(f, mp).all_agree) ++disagreements;
    }
    CHECK(disagreements == 0);
}

TEST_CASE("unbuckled regime boundary matches the FS prediction") {
    for (double lam : {0.05, 0.1, 0.3})
        for (double h : {1e-3, 1e-2, 0.1, 0.5}) {
            const ModelParams mp{h, lam, 1.0, kInf};
            const bool unbuckled = predict(Functional::FS, mp).branch == ScalingBranch::UNBUCKLED;
            CHECK(unbuckled == (h >= std::pow(lam, 5.0 / 6) * (1 - 1e-10)));
        }
}

TEST_CASE("prediction is deterministic") {
    const ModelParams mp{3e-4, 0.2, 1.7, 6};
    const auto a = predict(Functional::VKD, mp), b = predict(Functional::VKD, mp);
    CHECK(a.branch == b.branch);
    CHECK(a.value == b.value);
    CHECK(a.active_inequalities == b.active_inequalities);
}
