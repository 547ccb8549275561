// Serial reference against the OpenMP kernel for each parallel workload:
// frontier lambda sweep, cost-surface sampling and multi-seed simulation.

#include <benchmark/benchmark.h>

#include <numeric>

#include "execlab/exec_algos.hpp"
#include "execlab/parallel.hpp"

using namespace execlab;

namespace {

opt::Problem problem() {
  cost::ImpactParams ip;
  ip.x = 250'000;
  return opt::Problem::from(ip, 1.0 / 250);
}

std::vector<double> lambdas(std::size_t n) {
  const auto p = problem();
  const double per_alpha = p.coeffs.temporary / p.risk_scale();
  return opt::log_grid(1e-3 * per_alpha, per_alpha, n);
}

void BM_FrontierSerial(benchmark::State& st) {
  const auto p = problem();
  const auto l = lambdas(std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(opt::frontier(l, p, opt::Benchmark::arrival));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_FrontierParallel(benchmark::State& st) {
  const auto p = problem();
  const auto l = lambdas(std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(par::frontier_parallel(l, p, opt::Benchmark::arrival));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SurfaceSerial(benchmark::State& st) {
  const auto p = problem();
  const auto a = opt::log_grid(1e-4, 1, std::size_t(st.range(0)));
  const auto l = lambdas(std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(par::cost_surface_serial(a, l, p));
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

void BM_SurfaceParallel(benchmark::State& st) {
  const auto p = problem();
  const auto a = opt::log_grid(1e-4, 1, std::size_t(st.range(0)));
  const auto l = lambdas(std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(par::cost_surface_parallel(a, l, p));
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

double pov_run(std::uint64_t seed) {
  sim::MarketParams m;
  m.seed = seed;
  m.session_ticks = 3600;
  sim::Simulator sim(m, {sim::VenueConfig{}}, sim::u_shape_profile(6, m.session_ticks));
  algo::AlgoSpec spec;
  spec.type = algo::AlgoType::pov;
  spec.bucket_ticks = 60;
  algo::ParentOrder parent;
  parent.quantity = 1'000'000;
  parent.end = m.session_ticks;
  return algo::run_algorithm(spec, parent, sim).participation();
}

std::vector<std::uint64_t> seeds(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

void BM_SeedsSerial(benchmark::State& st) {
  const auto s = seeds(std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(par::map_seeds_serial(std::span<const std::uint64_t>(s), pov_run));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SeedsParallel(benchmark::State& st) {
  const auto s = seeds(std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(par::map_seeds(std::span<const std::uint64_t>(s), pov_run));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

BENCHMARK(BM_FrontierSerial)->Arg(50)->Arg(10'000);
BENCHMARK(BM_FrontierParallel)->Arg(50)->Arg(10'000);
BENCHMARK(BM_SurfaceSerial)->Arg(100)->Arg(1'000);
BENCHMARK(BM_SurfaceParallel)->Arg(100)->Arg(1'000);
BENCHMARK(BM_SeedsSerial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeedsParallel)->Arg(8)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("omp_max_threads", std::to_string(par::max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
}
