// Hot paths: the Poisson kernels, the mean-field fixed point, the bubble
// integrator and family bookkeeping.
#include <benchmark/benchmark.h>

#include "vortexmf/blowup.hpp"
#include "vortexmf/bubble.hpp"
#include "vortexmf/canonical.hpp"
#include "vortexmf/disk_exact.hpp"
#include "vortexmf/mesh.hpp"

namespace {

constexpr double PI = 3.14159265358979323846;

void bm_poisson_radial(benchmark::State& state) {
    auto mesh = vmf::build_disk_mesh(int(state.range(0)), vmf::Grading::LogNearOrigin);
    vmf::ScalarField rhs(mesh, 1.0 / PI);
    for (auto _ : state) benchmark::DoNotOptimize(vmf::poisson_solve(rhs));
}
BENCHMARK(bm_poisson_radial)->Arg(1024)->Arg(4096)->Arg(16384);

void bm_poisson_grid(benchmark::State& state) {
    double h = 2.0 / double(state.range(0));
    auto mesh = vmf::build_grid_mesh(2.0, 2.0, h);
    vmf::ScalarField rhs(mesh, 0.25 / PI);
    vmf::poisson_solve(rhs);   // factor outside the timed loop
    for (auto _ : state) benchmark::DoNotOptimize(vmf::poisson_solve(rhs));
}
BENCHMARK(bm_poisson_grid)->Arg(40)->Arg(100);

// argument: lambda as a percentage of the existence threshold
void bm_cvp_disk(benchmark::State& state) {
    auto mesh = vmf::build_disk_mesh(4096, vmf::Grading::LogNearOrigin);
    double lam = 0.01 * double(state.range(0)) * vmf::lambda_sigma(-0.5);
    vmf::WeightSpec spec{-0.5, lam, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(vmf::solve_cvp(mesh, spec));
}
BENCHMARK(bm_cvp_disk)->Arg(50)->Arg(90)->Arg(99);

void bm_sweep(benchmark::State& state) {
    auto mesh = vmf::build_disk_mesh(1024, vmf::Grading::LogNearOrigin);
    std::vector<double> lams;
    for (int i = 0; i < 16; ++i) lams.push_back(0.2 * PI * i);
    for (auto _ : state)
        benchmark::DoNotOptimize(vmf::sweep_lambda(mesh, -0.5, 1e-3, lams));
}
BENCHMARK(bm_sweep);

void bm_bubble(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(vmf::bubble_solve(0.5, 0.5, 0.0));
}
BENCHMARK(bm_bubble);

void bm_member_bookkeeping(benchmark::State& state) {
    auto mesh = vmf::build_disk_mesh(4096, vmf::Grading::LogNearOrigin);
    vmf::DiskSolution ds = vmf::disk_solution(-0.5, 2.0 * PI);
    vmf::ScalarField v(mesh);
    for (std::size_t i = 0; i < mesh->size(); ++i) v[i] = ds.v(mesh->r[i]);
    for (auto _ : state) {
        vmf::ScalarField copy = v;
        benchmark::DoNotOptimize(vmf::make_member(std::move(copy), -0.5, 0.0, 0.0, ds.lambda));
    }
}
BENCHMARK(bm_member_bookkeeping);

} // namespace

BENCHMARK_MAIN();
