// Microbenchmarks for the dense state/density kernels that dominate runs.

#include <benchmark/benchmark.h>

#include "curvedborn/protocol.hpp"

using namespace cborn;

namespace {

const GateModel kFree = GateModel::free_walk(0.37);
const GateModel kInteracting = GateModel::emission_absorption(0.4, 0.3, 0.5, 0.7);

StateVector make_state(Species species, int n, std::uint64_t seed) {
    Rng rng(seed);
    return random_state(SiteBasis::over(species, full_sites(n)), rng);
}

} // namespace

static void BM_site_gate_statevector(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    StateVector psi = make_state(Species::x_only, n, 1);
    const LocalGates gates = local_gates(kFree);
    const std::vector<int> sites{n / 2};
    for (auto _ : state) {
        apply_gate(psi, sites, gates.on_site);
        benchmark::DoNotOptimize(psi.amps().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(psi.dim()));
}
BENCHMARK(BM_site_gate_statevector)->Arg(6)->Arg(9);

static void BM_pair_gate_statevector(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    StateVector psi = make_state(Species::x_only, n, 2);
    const LocalGates gates = local_gates(kFree);
    const std::vector<int> sites{n / 2, n / 2 + 1};
    for (auto _ : state) {
        apply_gate(psi, sites, gates.shift);
        benchmark::DoNotOptimize(psi.amps().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(psi.dim()));
}
BENCHMARK(BM_pair_gate_statevector)->Arg(6)->Arg(9);

static void BM_pair_gate_density(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    DensityOp rho = DensityOp::from_pure(make_state(Species::x_only, n, 3));
    const LocalGates gates = local_gates(kFree);
    const std::vector<int> sites{0, 1};
    for (auto _ : state) {
        conjugate_gate(rho, sites, gates.shift);
        benchmark::DoNotOptimize(rho.mat().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(rho.mat().size()));
}
BENCHMARK(BM_pair_gate_density)->Arg(4)->Arg(5);

static void BM_partial_trace(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const DensityOp rho = DensityOp::from_pure(make_state(Species::x_only, n, 4));
    for (auto _ : state) {
        DensityOp reduced = partial_trace(rho, site_range(0, n / 2));
        benchmark::DoNotOptimize(reduced.mat().data());
    }
}
BENCHMARK(BM_partial_trace)->Arg(4)->Arg(5);

static void BM_evolve_layers(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const StateVector psi = make_state(Species::x_only, n, 5);
    const Surface from = Surface::flat(n, 0);
    const Surface to = Surface::flat(n, 6);
    for (auto _ : state) {
        StateVector out = evolve(psi, from, to, kFree);
        benchmark::DoNotOptimize(out.amps().data());
    }
}
BENCHMARK(BM_evolve_layers)->Arg(6)->Arg(9);

static void BM_sequential_run(benchmark::State &state) {
    const int n = 4;
    RunSpec spec{kFree, make_state(Species::x_only, n, 6), staircase_surface(n, 1, 3),
                 Partition(n, {site_range(1, 2)}), 1, false, 1e-14};
    for (auto _ : state) {
        const SequentialResult result = run_sequential(spec);
        benchmark::DoNotOptimize(result.total);
    }
}
BENCHMARK(BM_sequential_run);

static void BM_sequential_run_interacting(benchmark::State &state) {
    const int n = 4;
    RunSpec spec{kInteracting, make_state(Species::xy, n, 7), vee_surface(n, 1, 3),
                 Partition(n, {site_range(1, 2)}), 2, false, 1e-14};
    for (auto _ : state) {
        const SequentialResult result = run_sequential(spec);
        benchmark::DoNotOptimize(result.total);
    }
}
BENCHMARK(BM_sequential_run_interacting);

static void BM_closed_form(benchmark::State &state) {
    const int n = 5;
    RunSpec spec{kFree, make_state(Species::x_only, n, 8), staircase_surface(n, 1, 4),
                 Partition(n, {site_range(1, 3)}), 2, false, 1e-14};
    const SliceDecomposition dec = slice_decompose(spec.sigma, spec.partition, spec.m);
    const ClosedFormEvaluator closed(spec, dec);
    OutcomeSeq s{dec.kappa, 1, std::vector<std::uint32_t>(dec.n_rounds(), 0)};
    s.rows.back() = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(closed.prob(s));
}
BENCHMARK(BM_closed_form);

static void BM_reconstruct_distribution(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(9);
    std::vector<double> vp(std::size_t{1} << n);
    for (double &v : vp)
        v = rng.uniform();
    vp[0] = 1.0;
    for (auto _ : state) {
        const Reconstruction rec = reconstruct_distribution(vp, n);
        benchmark::DoNotOptimize(rec.p.data());
    }
    state.SetItemsProcessed(state.iterations() * (long{1} << n));
}
BENCHMARK(BM_reconstruct_distribution)->Arg(10)->Arg(16);

BENCHMARK_MAIN();
