#include "phburgers/integrator.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_AssembleOperators(benchmark::State& st)
{
    const auto mesh = phb::build_mesh(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(phb::assemble_operators(mesh));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_AssembleOperators)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_MakeState(benchmark::State& st)
{
    const auto ops = phb::assemble_operators(phb::build_mesh(static_cast<std::size_t>(st.range(0))));
    const auto v = phb::interpolate(ops.mesh, phb::InitialProfile::gaussian().value);
    for (auto _ : st)
        benchmark::DoNotOptimize(phb::make_state(ops, v, 0.0, phb::Mode::viscous(1e-3)));
}
BENCHMARK(BM_MakeState)->Arg(1000);

void BM_NewtonStep(benchmark::State& st)
{
    const bool viscous = st.range(1) != 0;
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto ops = phb::assemble_operators(phb::build_mesh(n));
    const double h = 1.0 / static_cast<double>(n);
    const auto mode = viscous ? phb::Mode::viscous(h) : phb::Mode::inviscid();
    const auto s = phb::make_state(ops, phb::interpolate(ops.mesh, phb::InitialProfile::gaussian().value), 0.0, mode);
    const double dt = viscous && n >= 1000 ? 0.25 * h : h;
    for (auto _ : st)
        benchmark::DoNotOptimize(phb::newton_solve(ops, s, dt, 1e-10, 10));
}
BENCHMARK(BM_NewtonStep)->Args({100, 0})->Args({100, 1})->Args({1000, 0})->Args({1000, 1});

void BM_ViscousRun(benchmark::State& st)
{
    phb::RunConfig c;
    c.n_elems = static_cast<std::size_t>(st.range(0));
    c.beta = 1.0;
    c.snapshots = 0;
    for (auto _ : st)
        benchmark::DoNotOptimize(phb::run_simulation(c));
}
BENCHMARK(BM_ViscousRun)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
