#pragma once

#include <optional>
#include <string>
#include <vector>

#include "execlab/tactics.hpp"
#include "execlab/venue_sim.hpp"

namespace execlab::algo {

enum class BenchmarkChoice : std::uint8_t { close, open, arrival, decision };
std::string_view to_string(BenchmarkChoice b) noexcept;
BenchmarkChoice parse_benchmark_choice(std::string_view text);

struct ParentOrder {
  Side side = Side::buy;
  Qty quantity = 0;
  Tick start = 0;
  Tick end = 0;
  std::optional<Price> limit;
  BenchmarkChoice benchmark = BenchmarkChoice::arrival;
};

void validate(const ParentOrder& p);

struct ScheduleBucket {
  Tick start = 0;
  Tick end = 0;
  Qty target = 0;
  // Tick inside [start, end) at which the bucket's child is released.
  Tick release = 0;

  bool operator==(const ScheduleBucket&) const = default;
};

struct Schedule {
  std::vector<ScheduleBucket> buckets;

  Qty total() const;
  std::vector<Qty> targets() const;
};

struct TiltPolicy {
  double threshold = 1.0;  // fraction of X completed before accelerating
  double factor = 1.0;     // multiplier on buckets after the trigger
  double jitter = 0.0;     // max fractional size deviation
  double timing_jitter = 0.0;  // max fraction of a bucket the release may slip
  std::uint64_t seed = 0;
};

void validate(const TiltPolicy& t);

/// Largest-remainder apportionment of `total` over non-negative weights.
/// Equal remainders favour the later index. All-zero weights put everything
/// in the last slot.
std::vector<Qty> apportion(const std::vector<double>& weights, Qty total);

Schedule twap_schedule(const ParentOrder& parent, Tick bucket_ticks, const TiltPolicy& tilt = {});

/// Buckets are the profile buckets overlapping the parent's horizon, weighted
/// by z_j times the overlapped share of the bucket.
Schedule vwap_schedule(const ParentOrder& parent, const sim::VolumeProfile& profile, const TiltPolicy& tilt = {});

/// round(pr / (1 - pr) * other_volume). Throws for pr outside [0, 1).
Qty pov_child_size(Qty other_volume, double pr);

/// Exact child size before rounding for a rational pr = num / den:
/// child = num * other / (den - num).
struct Rational {
  __int128 num = 0;
  __int128 den = 1;
};
Rational pov_child_rational(Qty other_volume, std::int64_t pr_num, std::int64_t pr_den);

/// Linear price-adaptive participation: pr * (1 - sensitivity * deviation),
/// deviation = side sign * (price - benchmark) / benchmark, clamped to [0, pr_max].
double pov_adaptive_rate(double base_pr, double price, double benchmark, double sensitivity, Side side,
                         double pr_max = 0.9);

enum class AlgoType : std::uint8_t { twap, vwap, pov, pov_adaptive };
std::string_view to_string(AlgoType t) noexcept;
AlgoType parse_algo_type(std::string_view text);

/// Which trades count as market volume for POV: all of them, or only those
/// whose aggressor is on the parent's side.
enum class VolumeSide : std::uint8_t { both, same };
std::string_view to_string(VolumeSide v) noexcept;
VolumeSide parse_volume_side(std::string_view text);

struct AlgoSpec {
  AlgoType type = AlgoType::twap;
  Tick bucket_ticks = 900;
  double pr = 0.1;
  double sensitivity = 50;
  double pr_max = 0.9;
  TiltPolicy tilt;
  Qty max_child = 0;  // 0 = uncapped
  std::optional<Price> price_limit;
  // Marketable children may walk this many ticks through the opposite best.
  Price cross_ticks = 2;
  // POV decides once per bucket on the volume traded in the bucket just closed.
  VolumeSide volume_side = VolumeSide::both;
  tactics::RouteWeights route;
};

void validate(const AlgoSpec& a);

struct ExecFill {
  OrderId child = 0;
  VenueIndex venue = 0;
  Price price = 0;
  Qty qty = 0;
  Tick time = 0;
  sim::Role role = sim::Role::taker;
  double fee = 0;
};

struct ExecutionTrace {
  std::vector<Order> children;
  std::vector<ExecFill> fills;
  // Realized fills per schedule bucket (TWAP/VWAP) or per decision window (POV).
  std::vector<Qty> realized;
  std::vector<Qty> planned;
  Qty filled = 0;
  Qty unfilled = 0;      // opportunity residual at parent end
  Qty other_volume = 0;  // market volume not involving the agent over the horizon
  Price arrival_price = 0;  // consolidated mid at start, rounded to a tick
  Price final_price = 0;    // consolidated mid at end, rounded to a tick
  double arrival_mid = 0;
  double final_mid = 0;

  double participation() const {
    return filled + other_volume ? double(filled) / double(filled + other_volume) : 0.0;
  }
};

/// Drives the parent through the simulator from its start to its end tick.
/// Children are marketable IOC limits, routed across venues, capped at
/// max_child and the parent limit; unfilled targets roll into the next
/// bucket. POV sizes each child so that cumulative own volume tracks
/// pr / (1 - pr) times the cumulative other volume seen in closed windows.
ExecutionTrace run_algorithm(const AlgoSpec& spec, const ParentOrder& parent, sim::Simulator& sim);

} // namespace execlab::algo
