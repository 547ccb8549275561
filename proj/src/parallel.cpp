#include "execlab/parallel.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace execlab::par {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<opt::FrontierPoint> frontier_parallel(std::span<const double> lambdas, const opt::Problem& p,
                                                  opt::Benchmark b) {
  opt::validate_lambda_grid(lambdas);
  const std::ptrdiff_t n = std::ptrdiff_t(lambdas.size());
  std::vector<opt::FrontierPoint> out(lambdas.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[std::size_t(i)] = opt::frontier_point(lambdas[std::size_t(i)], p, b);
    } catch (...) {
#pragma omp critical(execlab_frontier_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

namespace {

SurfaceSample sample(double alpha, double lambda, const opt::Problem& p) {
  const double mi = cost::mi_rate(alpha, p.coeffs);
  const double r = opt::risk_at(alpha, p);
  return {alpha, lambda, mi, r, mi + lambda * r};
}

} // namespace

std::vector<SurfaceSample> cost_surface_serial(std::span<const double> alphas, std::span<const double> lambdas,
                                               const opt::Problem& p) {
  std::vector<SurfaceSample> out;
  out.reserve(alphas.size() * lambdas.size());
  for (double l : lambdas)
    for (double a : alphas) out.push_back(sample(a, l, p));
  return out;
}

std::vector<SurfaceSample> cost_surface_parallel(std::span<const double> alphas, std::span<const double> lambdas,
                                                 const opt::Problem& p) {
  const std::ptrdiff_t na = std::ptrdiff_t(alphas.size()), n = na * std::ptrdiff_t(lambdas.size());
  std::vector<SurfaceSample> out(static_cast<std::size_t>(n));
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      out[std::size_t(k)] = sample(alphas[std::size_t(k % na)], lambdas[std::size_t(k / na)], p);
    } catch (...) {
#pragma omp critical(execlab_surface_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

} // namespace execlab::par
