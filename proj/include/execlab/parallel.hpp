#pragma once

#include <cstdint>
#include <exception>
#include <span>
#include <type_traits>
#include <vector>

#include "execlab/optimizer.hpp"

namespace execlab::par {

/// Frontier over a lambda grid, one point per OpenMP iteration. Same result
/// as opt::frontier, element for element.
std::vector<opt::FrontierPoint> frontier_parallel(std::span<const double> lambdas, const opt::Problem& p,
                                                  opt::Benchmark b);

struct SurfaceSample {
  double alpha = 0;
  double lambda = 0;
  double impact = 0;  // MI(alpha)
  double risk = 0;    // R(alpha)
  double objective = 0;

  bool operator==(const SurfaceSample&) const = default;
};

/// Objective sampled on alphas x lambdas, lambda-major: sample (i, j) sits at
/// i * alphas.size() + j for lambda i and alpha j.
std::vector<SurfaceSample> cost_surface_serial(std::span<const double> alphas, std::span<const double> lambdas,
                                               const opt::Problem& p);
std::vector<SurfaceSample> cost_surface_parallel(std::span<const double> alphas, std::span<const double> lambdas,
                                                 const opt::Problem& p);

int max_threads();

template <class F>
auto map_seeds_serial(std::span<const std::uint64_t> seeds, F&& f) {
  using R = std::invoke_result_t<F&, std::uint64_t>;
  std::vector<R> out;
  out.reserve(seeds.size());
  for (std::uint64_t s : seeds) out.push_back(f(s));
  return out;
}

/// Runs f(seed) for every seed on the OpenMP pool; results come back in seed
/// order. The first exception (by seed position) is rethrown after the loop.
template <class F>
auto map_seeds(std::span<const std::uint64_t> seeds, F&& f) {
  using R = std::invoke_result_t<F&, std::uint64_t>;
  const std::ptrdiff_t n = std::ptrdiff_t(seeds.size());
  std::vector<R> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[std::size_t(i)] = f(seeds[std::size_t(i)]);
    } catch (...) {
      errors[std::size_t(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

} // namespace execlab::par
