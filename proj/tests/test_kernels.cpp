#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mlab/kernels.hpp"

using namespace mlab;
using namespace mlab::kernels;

namespace {

struct Arrays {
    std::vector<std::vector<double>> a;
    Arrays(int count, std::size_t n, std::uint64_t seed) : a(count, std::vector<double>(n)) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (auto& v : a)
            for (double& x : v) x = u(rng);
    }
    const double* operator[](int i) const { return a[i].data(); }
    double* mut(int i) { return a[i].data(); }
};

VkdInputs vkd_inputs(const Arrays& x, std::size_t rows, std::size_t cols, double shear) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8], x[9], 0.2, 1e-2, shear, rows, cols};
}

NlInputs nl_inputs(const Arrays& x, std::size_t rows, std::size_t cols) {
    return {x[0], x[1], x[2],  x[3],  x[4],  x[5],  x[6],  x[7], x[8],
            x[9], x[10], x[11], x[12], x[13], x[14], x[15], 0.2,  1e-2, rows, cols};
}

}  // namespace

TEST_CASE("vkd density: serial and parallel drivers agree bitwise") {
    const std::size_t rows = 37, cols = 16;
    Arrays x(10, rows * cols, 1);
    x.a[0].assign(rows * cols, 0.7);
    for (double shear : {1.0, 0.0}) {
        Arrays rs(10, rows * cols, 0), rp(10, rows * cols, 0);
        VkdResiduals r1{rs.mut(0), rs.mut(1), rs.mut(2), rs.mut(3), rs.mut(4),
                        rs.mut(5), rs.mut(6), rs.mut(7), rs.mut(8), rs.mut(9)};
        VkdResiduals r2{rp.mut(0), rp.mut(1), rp.mut(2), rp.mut(3), rp.mut(4),
                        rp.mut(5), rp.mut(6), rp.mut(7), rp.mut(8), rp.mut(9)};
        const VkdSums a = vkd_density(vkd_inputs(x, rows, cols, shear), &r1, Execution::Serial);
        const VkdSums b = vkd_density(vkd_inputs(x, rows, cols, shear), &r2, Execution::Parallel);
        CHECK(a.tt == b.tt);
        CHECK(a.zz == b.zz);
        CHECK(a.tz == b.tz);
        CHECK(a.bend == b.bend);
        for (int k = 0; k < 10; ++k) CHECK(rs.a[k] == rp.a[k]);
    }
}

TEST_CASE("nl density: serial and parallel drivers agree bitwise") {
    const std::size_t rows = 19, cols = 8;
    Arrays x(16, rows * cols, 2);
    for (double& v : x.a[0]) v += 1.3;
    const NlSums a = nl_density(nl_inputs(x, rows, cols), nullptr, Execution::Serial);
    const NlSums b = nl_density(nl_inputs(x, rows, cols), nullptr, Execution::Parallel);
    CHECK(a.tt == b.tt);
    CHECK(a.zz == b.zz);
    CHECK(a.tz == b.tz);
    CHECK(a.bend == b.bend);
}

TEST_CASE("vkd density residuals match finite differences of the sums") {
    const std::size_t rows = 2, cols = 3, n = rows * cols;
    Arrays x(10, n, 4);
    auto total = [&](const Arrays& xs) {
        const VkdSums s = vkd_density(vkd_inputs(xs, rows, cols, 1.0), nullptr, Execution::Serial);
        return s.tt + s.zz + 2 * s.tz + 1e-2 * s.bend;
    };
    Arrays res(10, n, 0);
    for (auto& v : res.a) std::fill(v.begin(), v.end(), 0.0);
    VkdResiduals r{res.mut(0), res.mut(1), res.mut(2), res.mut(3), res.mut(4),
                   res.mut(5), res.mut(6), res.mut(7), res.mut(8), res.mut(9)};
    vkd_density(vkd_inputs(x, rows, cols, 1.0), &r, Execution::Serial);
    const double step = 1e-6;
    double worst = 0;
    for (int k = 0; k < 10; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            Arrays p = x, m = x;
            p.a[k][i] += step;
            m.a[k][i] -= step;
            const double fd = (total(p) - total(m)) / (2 * step);
            worst = std::max(worst, std::abs(fd - res.a[k][i]) / std::max(1.0, std::abs(fd)));
        }
    CHECK(worst < 1e-7);
}

TEST_CASE("hinge and negative-part penalties") {
    std::vector<double> x{-3.0, -1.0, 0.5, 2.5};
    std::vector<double> g(4, 0.0);
    // (|x| - 2)_+^2 with weight 2: (1)^2 + 0 + 0 + (0.5)^2 -> 2 * 1.25
    const double v = hinge_penalty(x.data(), 0.0, 2.0, 2.0, 4, g.data(), Execution::Serial);
    CHECK(v == doctest::Approx(2.5));
    CHECK(g[0] == doctest::Approx(2.0 * 2 * 1.0 * -1.0));
    CHECK(g[3] == doctest::Approx(2.0 * 2 * 0.5));
    CHECK(g[1] == 0.0);
    std::vector<double> h(4, 0.0);
    // (-(x + 0.5))_+^2: 2.5^2 + 0.5^2
    const double w = negative_part_penalty(x.data(), 0.5, 1.0, 4, h.data(), Execution::Parallel);
    CHECK(w == doctest::Approx(6.5));
    CHECK(h[0] == doctest::Approx(-5.0));
    CHECK(h[2] == 0.0);
}
