#pragma once

#include <span>
#include <vector>

#include "execlab/types.hpp"

namespace execlab::cost {

/// Market-impact calibration and order description.
struct ImpactParams {
  double a1 = 0.5;   // scale coefficient
  double a2 = 0.5;   // size exponent
  double a3 = 0.75;  // volatility exponent
  double b1 = 0.8;   // temporary fraction of impact, in [0, 1]
  double adv = 1e6;  // shares per day
  double sigma = 0.25;  // annualized volatility
  double p0 = 50.0;     // current price
  double x = 1e5;       // order size in shares
};

/// Coefficients of the rate form MI(alpha) = I1 * sqrt(alpha) + I2.
struct RateCoefficients {
  double impact = 0;     // I, total impact in currency
  double temporary = 0;  // I1 = (2/3) * b1 * I / X
  double permanent = 0;  // I2 = (1 - b1) * I / X
};

struct RiskParams {
  double lambda = 0;
  double x = 0;
  double sigma = 0;
  double p0 = 0;
  double period_years = 1.0 / 250.0;   // t: one period as a year fraction
  double horizon_years = 1.0 / 250.0;  // s: whole horizon as a year fraction
};

void validate(const ImpactParams& p);

/// I = a1 (X/ADV)^a2 sigma^a3 X P0; zero for an empty order.
double impact_I(const ImpactParams& p);

RateCoefficients rate_coefficients(const ImpactParams& p);

/// Per-period schedule form: sum_j b1 I x_j^2 / (X (x_j + v_j/2)) + (1 - b1) I / X.
/// Throws std::invalid_argument on length mismatch or a traded period with no volume base.
double mi_schedule(std::span<const double> traded, std::span<const double> expected_volume, double b1,
                   double impact, double x);

/// Constant-rate form I1 sqrt(alpha) + I2. Throws std::domain_error for alpha < 0.
double mi_rate(double alpha, const RateCoefficients& c);

/// Dissipation form I_bp (b1 / mu + (1 - b1)). Throws std::domain_error for mu <= 0.
double mi_dissipation(double impact_bp, double mu, double b1);

/// Same-side ratio mu = V_side / Q with V_side = sum of sign(v_j) over the
/// imbalance window, as printed (a count of same-side prints, not a volume).
double same_side_ratio(std::span<const double> signed_volumes, double imbalance);

/// P0 sqrt(sum_j r_j^2 t sigma^2 / n) over unexecuted residuals r_j.
double risk_schedule(std::span<const double> residuals, double sigma, double p0, double t);

/// P0 X sigma sqrt(s / (3 alpha)). Throws std::domain_error for alpha <= 0.
double risk_rate(double alpha, double x, double sigma, double p0, double s);

/// Residual holdings entering each period for a trade list.
std::vector<double> residuals_from_schedule(std::span<const double> traded, double x);

} // namespace execlab::cost
