// Microbenchmarks for the hot paths: triangulation, system assembly, the
// eigensolver, and one implicit Euler run. Mesh sizes are swept through the
// benchmark range argument as h = 1/range.

#include <benchmark/benchmark.h>

#include "roadfield/assembly.hpp"
#include "roadfield/evolution.hpp"
#include "roadfield/meshing.hpp"
#include "roadfield/network.hpp"
#include "roadfield/spectral.hpp"

using namespace roadfield;

namespace {

DomainGeometry unit_square() {
    return {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
}

RoadNetwork midline() {
    RoadNetwork net;
    net.vertices = {{0.0, 0.5}, {1.0, 0.5}};
    net.edges = {{0, 1}};
    net.boundary_vertex_flags = {1, 1};
    return net;
}

void bm_triangulate(benchmark::State& state) {
    const DomainGeometry dom = unit_square();
    const RoadNetwork net = midline();
    const double h = 1.0 / static_cast<double>(state.range(0));
    std::size_t vertices = 0;
    for (auto _ : state) {
        const Mesh mesh = triangulate(dom, net, h);
        vertices = mesh.vertices.size();
        benchmark::DoNotOptimize(mesh.triangles.data());
    }
    state.counters["vertices"] = static_cast<double>(vertices);
}
BENCHMARK(bm_triangulate)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_assembly(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const Mesh mesh = triangulate(unit_square(), midline(), h);
    int dofs = 0;
    for (auto _ : state) {
        const FemSystem sys = build_system(mesh, {1.0, 2.0, 1.5, 0.7});
        dofs = sys.dofs.n_total();
        benchmark::DoNotOptimize(sys.B.valuePtr());
    }
    state.counters["dofs"] = static_cast<double>(dofs);
}
BENCHMARK(bm_assembly)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_eigensolve(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const Mesh mesh = triangulate(unit_square(), midline(), h);
    const FemSystem sys = build_system(mesh, {1.0, 2.0, 1.5, 0.7});
    for (auto _ : state) {
        const Spectrum spec = smallest_eigenpairs(sys, 6, 1e-8);
        benchmark::DoNotOptimize(spec.eigenvalues.data());
    }
    state.counters["dofs"] = static_cast<double>(sys.dofs.n_total());
}
BENCHMARK(bm_eigensolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_implicit_euler(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const Mesh mesh = triangulate(unit_square(), midline(), h);
    const FemSystem sys = build_system(mesh, {1.0, 2.0, 1.5, 0.7});
    const State s0 = bump_initial(sys);
    for (auto _ : state) {
        const EvolutionTrace trace = implicit_euler(sys, s0, 0.01, 1.0);
        benchmark::DoNotOptimize(trace.l_norms.data());
    }
    state.counters["steps"] = 100.0;
}
BENCHMARK(bm_implicit_euler)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
