#pragma once

#include <optional>
#include <span>
#include <vector>

#include "execlab/types.hpp"

namespace execlab::tca {

struct Trade {
  double price = 0;
  double size = 0;
  Tick time = 0;
  std::optional<Side> aggressor;
};

using TradeTape = std::vector<Trade>;

/// Throws std::invalid_argument for an empty tape, non-positive sizes or
/// decreasing times.
void validate(std::span<const Trade> tape);

double vwap(std::span<const Trade> tape);
double twap(std::span<const Trade> tape);
double ohlc(double open, double high, double low, double close);

/// Per-period form sum_j z_j * VWAP_j where z_j is the period's volume share.
/// period_ends are exclusive upper time bounds; trades past the last bound
/// fall into the last period.
double vwap_by_periods(std::span<const Trade> tape, std::span<const Tick> period_ends);

enum class RpmBasis : std::uint8_t { volume, trades };

/// Share of the tape printed at prices strictly less favorable than
/// exec_price for the given side.
double rpm(std::span<const Trade> tape, double exec_price, Side side, RpmBasis basis);

struct Fill {
  Qty qty = 0;
  Price price = 0;  // ticks
  Tick time = 0;
};

/// Prices in ticks; fixed fees in tick-shares (price tick times one share).
struct TCAInputs {
  Side side = Side::buy;
  Qty intended = 0;                // X
  Price decision = 0;              // P_d
  std::optional<Price> arrival;    // P_0
  Price final_price = 0;           // P_N, also P_n for the expanded form
  std::vector<Fill> fills;
  std::int64_t fixed = 0;
};

/// Every field in tick-shares. Positive is adverse for either side.
struct ISReport {
  std::int64_t execution = 0;
  std::int64_t opportunity = 0;
  std::int64_t fixed = 0;
  std::int64_t delay = 0;
  std::int64_t trade_related = 0;
  std::int64_t total = 0;
  Qty executed = 0;
  Qty unexecuted = 0;

  bool operator==(const ISReport&) const = default;
};

/// Execution + opportunity + fixed. Throws std::invalid_argument when fills
/// exceed the intended size.
ISReport shortfall(const TCAInputs& in);

/// Delay + trade-related + opportunity + fixed. Requires an arrival price.
ISReport expanded_tc(const TCAInputs& in);

struct PaperVsReal {
  std::int64_t paper = 0;
  std::int64_t real = 0;
  std::int64_t shortfall = 0;
};

/// Paper return X(P_N - P_d) against real return on the executed position,
/// X_exec P_N - sum x_j p_j - fixed, signed for the side.
PaperVsReal paper_vs_real(const TCAInputs& in);

/// Mirror prices about the decision price.
TCAInputs reflect(const TCAInputs& in);

} // namespace execlab::tca
