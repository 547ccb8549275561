#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "execlab/cost_model.hpp"

namespace execlab::opt {

enum class Benchmark : std::uint8_t { arrival, previous_close };

std::string_view to_string(Benchmark b) noexcept;
Benchmark parse_benchmark(std::string_view s);

struct RateBounds {
  double alpha_min = 1e-4;
  double alpha_max = 1.0;
};

/// Everything the constant-rate problem needs: impact coefficients plus the
/// timing-risk inputs (X, sigma, P0, s).
struct Problem {
  cost::RateCoefficients coeffs;
  double x = 0;
  double sigma = 0;
  double p0 = 0;
  double horizon_years = 1.0 / 250.0;
  RateBounds bounds;
  double close_drift = 0;  // decision-to-arrival drift, currency per share

  static Problem from(const cost::ImpactParams& ip, double horizon_years, RateBounds bounds = {},
                      double close_drift = 0);

  /// c in R(alpha) = c / sqrt(alpha).
  double risk_scale() const;
};

struct FrontierPoint {
  double lambda = 0;
  double alpha = 0;
  double cost = 0;
  double risk = 0;
  Benchmark benchmark = Benchmark::arrival;

  bool operator==(const FrontierPoint&) const = default;
};

double risk_at(double alpha, const Problem& p);

/// Benchmark-dependent cost coordinate. Arrival uses the temporary term only;
/// previous close adds the permanent term and the drift.
double cost_at(double alpha, const Problem& p, Benchmark b);

/// MI(alpha) + lambda R(alpha). Throws std::domain_error for alpha <= 0.
double objective(double alpha, double lambda, const Problem& p);

/// Closed-form minimizer lambda c / I1 clamped to the rate bounds. lambda = 0
/// returns alpha_min. Throws std::domain_error for lambda < 0 or I1 = 0.
double solve_rate(double lambda, const Problem& p);

/// Smallest alpha with R(alpha) <= cap. Throws std::domain_error when the cap
/// is non-positive or infeasible even at alpha_max.
double solve_constrained(double risk_cap, const Problem& p);

FrontierPoint frontier_point(double lambda, const Problem& p, Benchmark b);

/// Serial frontier. Throws std::invalid_argument unless lambdas are positive
/// and strictly increasing.
std::vector<FrontierPoint> frontier(std::span<const double> lambdas, const Problem& p, Benchmark b);

/// n log-spaced values in [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

void validate_lambda_grid(std::span<const double> lambdas);

} // namespace execlab::opt
