// Serial reference drivers against the OpenMP drivers. The first argument is
// the execution mode (0 serial, 1 parallel), the second the grid side.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mlab/energy.hpp"
#include "mlab/exec.hpp"
#include "mlab/kernels.hpp"
#include "mlab/minimizer.hpp"

using namespace mlab;
using namespace mlab::kernels;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) == 0 ? Execution::Serial : Execution::Parallel; }

std::vector<std::vector<double>> random_arrays(int count, std::size_t n, double shift) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<std::vector<double>> a(count, std::vector<double>(n));
    for (auto& v : a)
        for (double& x : v) x = u(rng);
    for (double& x : a[0]) x += shift;
    return a;
}

void BM_VkdDensity(benchmark::State& st) {
    const std::size_t side = st.range(1), n = side * side;
    auto x = random_arrays(10, n, 0.5);
    auto g = random_arrays(10, n, 0.0);
    const VkdInputs in{x[0].data(), x[1].data(), x[2].data(), x[3].data(), x[4].data(), x[5].data(), x[6].data(),
                       x[7].data(), x[8].data(), x[9].data(), 0.25,        1e-6,        1.0,         side,        side};
    VkdResiduals res{g[0].data(), g[1].data(), g[2].data(), g[3].data(), g[4].data(),
                     g[5].data(), g[6].data(), g[7].data(), g[8].data(), g[9].data()};
    for (auto _ : st) benchmark::DoNotOptimize(vkd_density(in, &res, mode(st)));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

void BM_NlDensity(benchmark::State& st) {
    const std::size_t side = st.range(1), n = side * side;
    auto x = random_arrays(16, n, 1.5);
    auto g = random_arrays(16, n, 0.0);
    std::vector<const double*> p;
    std::vector<double*> q;
    for (int k = 0; k < 16; ++k) {
        p.push_back(x[k].data());
        q.push_back(g[k].data());
    }
    const NlInputs in{p[0], p[1], p[2],  p[3],  p[4],  p[5],  p[6],  p[7], p[8],
                      p[9], p[10], p[11], p[12], p[13], p[14], p[15], 0.25, 1e-6, side, side};
    NlResiduals res{q[0], q[1], q[2], q[3], q[4], q[5], q[6], q[7], q[8], q[9], q[10], q[11], q[12], q[13], q[14], q[15]};
    for (auto _ : st) benchmark::DoNotOptimize(nl_density(in, &res, mode(st)));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

void BM_Derivative(benchmark::State& st) {
    const int side = static_cast<int>(st.range(1));
    const Domain d = Domain::omega(side, side);
    const GridField f = band_limited_noise(d, 8, 8, 3, 0);
    ScopedExecution scope(mode(st));
    for (auto _ : st) benchmark::DoNotOptimize(derivative(f, 1, 1));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(d.size()));
}

void BM_EnergyGradient(benchmark::State& st) {
    const int side = static_cast<int>(st.range(1));
    const Domain d = Domain::omega(side, side);
    const ModelParams mp{1e-2, 0.25, 1.5, kInf};
    MinimizeOptions o;
    o.noise_amplitude = 0.05;
    const Functional f = st.range(2) == 0 ? Functional::VKD : Functional::NL;
    const Configuration c = initial_configuration(f, mp, d, o);
    ScopedExecution scope(mode(st));
    ComponentGradient g;
    for (auto _ : st) benchmark::DoNotOptimize(discrete_energy(f, c, &g));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(d.size()));
}

}  // namespace

BENCHMARK(BM_VkdDensity)->ArgsProduct({{0, 1}, {256, 1024}});
BENCHMARK(BM_NlDensity)->ArgsProduct({{0, 1}, {256, 1024}});
BENCHMARK(BM_Derivative)->ArgsProduct({{0, 1}, {256, 1024}});
BENCHMARK(BM_EnergyGradient)->ArgsProduct({{0, 1}, {128, 512}, {0, 1}});

BENCHMARK_MAIN();
