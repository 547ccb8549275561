#include "execlab/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace execlab::cost {

void validate(const ImpactParams& p) {
  if (!(p.adv > 0)) throw std::invalid_argument("ADV must be positive");
  if (p.b1 < 0 || p.b1 > 1) throw std::invalid_argument("b1 must lie in [0, 1]");
  if (p.x < 0) throw std::invalid_argument("order size must be non-negative");
  if (p.sigma < 0) throw std::invalid_argument("sigma must be non-negative");
}

double impact_I(const ImpactParams& p) {
  validate(p);
  if (p.x == 0) return 0.0;
  return p.a1 * std::pow(p.x / p.adv, p.a2) * std::pow(p.sigma, p.a3) * p.x * p.p0;
}

RateCoefficients rate_coefficients(const ImpactParams& p) {
  RateCoefficients c;
  c.impact = impact_I(p);
  if (p.x > 0) {
    c.temporary = (2.0 / 3.0) * p.b1 * c.impact / p.x;
    c.permanent = (1.0 - p.b1) * c.impact / p.x;
  }
  return c;
}

double mi_schedule(std::span<const double> traded, std::span<const double> expected_volume, double b1,
                   double impact, double x) {
  if (traded.size() != expected_volume.size())
    throw std::invalid_argument("schedule and volume lengths differ");
  if (x <= 0) return 0.0;
  double temporary = 0.0;
  for (std::size_t j = 0; j < traded.size(); ++j) {
    const double xj = traded[j];
    if (xj == 0) continue;
    const double base = xj + 0.5 * expected_volume[j];
    if (base <= 0) throw std::invalid_argument("traded period with no volume base");
    temporary += b1 * impact * xj * xj / (x * base);
  }
  return temporary + (1.0 - b1) * impact / x;
}

double mi_rate(double alpha, const RateCoefficients& c) {
  if (alpha < 0) throw std::domain_error("trading rate must be non-negative");
  return c.temporary * std::sqrt(alpha) + c.permanent;
}

double mi_dissipation(double impact_bp, double mu, double b1) {
  if (!(mu > 0)) throw std::domain_error("dissipation ratio must be positive");
  return impact_bp * (b1 / mu + (1.0 - b1));
}

double same_side_ratio(std::span<const double> signed_volumes, double imbalance) {
  if (imbalance == 0) throw std::domain_error("imbalance must be non-zero");
  double v_side = 0;
  for (double v : signed_volumes) v_side += (v > 0) - (v < 0);
  return v_side / imbalance;
}

double risk_schedule(std::span<const double> residuals, double sigma, double p0, double t) {
  if (residuals.empty()) return 0.0;
  const double n = static_cast<double>(residuals.size());
  double sum_sq = 0;
  for (double r : residuals) sum_sq += r * r;
  return p0 * std::sqrt(sum_sq * t * sigma * sigma / n);
}

double risk_rate(double alpha, double x, double sigma, double p0, double s) {
  if (!(alpha > 0)) throw std::domain_error("trading rate must be positive for timing risk");
  return p0 * x * sigma * std::sqrt(s / (3.0 * alpha));
}

std::vector<double> residuals_from_schedule(std::span<const double> traded, double x) {
  std::vector<double> r;
  r.reserve(traded.size());
  double left = x;
  for (double q : traded) {
    r.push_back(left);
    left -= q;
  }
  return r;
}

} // namespace execlab::cost
