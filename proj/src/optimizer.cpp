#include "execlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace execlab::opt {

std::string_view to_string(Benchmark b) noexcept {
  return b == Benchmark::arrival ? "arrival" : "previous-close";
}

Benchmark parse_benchmark(std::string_view s) {
  if (s == "arrival") return Benchmark::arrival;
  if (s == "previous-close" || s == "close") return Benchmark::previous_close;
  throw std::invalid_argument("unknown benchmark '" + std::string(s) + "'");
}

Problem Problem::from(const cost::ImpactParams& ip, double horizon_years, RateBounds bounds, double close_drift) {
  Problem p;
  p.coeffs = cost::rate_coefficients(ip);
  p.x = ip.x;
  p.sigma = ip.sigma;
  p.p0 = ip.p0;
  p.horizon_years = horizon_years;
  p.bounds = bounds;
  p.close_drift = close_drift;
  return p;
}

double Problem::risk_scale() const { return p0 * x * sigma * std::sqrt(horizon_years / 3.0); }

double risk_at(double alpha, const Problem& p) {
  return cost::risk_rate(alpha, p.x, p.sigma, p.p0, p.horizon_years);
}

double cost_at(double alpha, const Problem& p, Benchmark b) {
  const double temporary = p.coeffs.temporary * std::sqrt(alpha);
  if (b == Benchmark::arrival) return temporary;
  return temporary + p.coeffs.permanent + p.close_drift;
}

double objective(double alpha, double lambda, const Problem& p) {
  if (!(alpha > 0)) throw std::domain_error("objective needs a positive rate");
  return cost::mi_rate(alpha, p.coeffs) + lambda * risk_at(alpha, p);
}

double solve_rate(double lambda, const Problem& p) {
  if (lambda < 0) throw std::domain_error("lambda must be non-negative");
  if (lambda == 0) return p.bounds.alpha_min;
  if (!(p.coeffs.temporary > 0)) throw std::domain_error("temporary impact coefficient is zero");
  const double alpha = lambda * p.risk_scale() / p.coeffs.temporary;
  return std::clamp(alpha, p.bounds.alpha_min, p.bounds.alpha_max);
}

double solve_constrained(double risk_cap, const Problem& p) {
  if (!(risk_cap > 0)) throw std::domain_error("risk cap must be positive");
  if (risk_at(p.bounds.alpha_max, p) > risk_cap) throw std::domain_error("risk cap infeasible at alpha_max");
  const double c = p.p0 * p.x * p.sigma;
  const double alpha = c * c * p.horizon_years / (3.0 * risk_cap * risk_cap);
  return std::clamp(alpha, p.bounds.alpha_min, p.bounds.alpha_max);
}

FrontierPoint frontier_point(double lambda, const Problem& p, Benchmark b) {
  FrontierPoint fp;
  fp.lambda = lambda;
  fp.alpha = solve_rate(lambda, p);
  fp.cost = cost_at(fp.alpha, p, b);
  fp.risk = risk_at(fp.alpha, p);
  fp.benchmark = b;
  return fp;
}

void validate_lambda_grid(std::span<const double> lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0)) throw std::invalid_argument("lambda grid must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw std::invalid_argument("lambda grid must be strictly increasing");
  }
}

std::vector<FrontierPoint> frontier(std::span<const double> lambdas, const Problem& p, Benchmark b) {
  validate_lambda_grid(lambdas);
  std::vector<FrontierPoint> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(frontier_point(l, p, b));
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("log grid needs 0 < lo < hi");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / double(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

} // namespace execlab::opt
