#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "execlab/orderbook.hpp"

namespace execlab::tactics {

using IdSource = std::function<OrderId()>;

/// Sequential counter usable as an IdSource.
IdSource counter_ids(OrderId first);

// ---------------------------------------------------------------- slicing

enum class SliceMode : std::uint8_t { sequential, parallel };

struct SlicePolicy {
  Qty display = 1000;
  double jitter = 0;  // max fractional deviation of each child from display, in [0, 1)
  SliceMode mode = SliceMode::sequential;
  std::uint64_t seed = 0;
  // Explicit child sizes used before falling back to display/jitter.
  std::vector<Qty> size_script;
};

void validate(const SlicePolicy& p);

/// Synthetic iceberg. In sequential mode a new child is released only after
/// the previous one is confirmed filled or cancelled, so crosses that a
/// native iceberg would catch can be missed.
class Slicer {
public:
  Slicer(Side side, Qty total, std::optional<Price> limit, SlicePolicy policy, IdSource ids, TimeInForce tif = TimeInForce::gtc);

  /// Next child, or nothing while a child is outstanding (sequential) or the
  /// parent is fully allocated.
  std::optional<Order> next();

  /// Parallel mode: up to one child per venue, tagged with the venue index.
  std::vector<Order> next_batch(std::size_t venues);

  void on_fill(OrderId child, Qty qty);
  /// Child left the book without filling `unfilled` shares.
  void on_done(OrderId child, Qty unfilled);

  Qty filled() const noexcept { return filled_; }
  Qty outstanding() const noexcept { return outstanding_; }
  Qty remaining() const noexcept { return total_ - filled_; }
  bool done() const noexcept { return filled_ == total_; }
  const std::map<OrderId, Qty>& live() const noexcept { return live_; }

private:
  Qty draw_size();
  Order make_child(Qty qty);

  Side side_;
  Qty total_;
  std::optional<Price> limit_;
  SlicePolicy policy_;
  IdSource ids_;
  TimeInForce tif_;
  std::mt19937_64 rng_;
  std::size_t emitted_ = 0;
  Qty filled_ = 0;
  Qty outstanding_ = 0;
  std::map<OrderId, Qty> live_;
};

// --------------------------------------------------------------- layering

struct LayerSpec {
  // Distance of each rung from the mid, in ticks, measured away from the market.
  std::vector<Price> offsets{1, 2, 3};
  Qty rung_size = 100;
};

struct LayerAction {
  enum class Kind : std::uint8_t { place, cancel } kind = Kind::place;
  Order order;         // place
  OrderId target = 0;  // cancel
};

/// Standing ladder of limit orders. Maintenance never amends a rung: missing
/// prices get new orders and out-of-range rungs are cancelled, so surviving
/// rungs keep their time priority.
class LayerSet {
public:
  LayerSet(Side side, LayerSpec spec, IdSource ids);

  std::vector<LayerAction> maintain(Price mid, Qty parent_remaining);
  void on_fill(OrderId id, Qty qty);
  void on_gone(OrderId id);

  struct Rung {
    OrderId id;
    Price price;
    Qty qty;
  };
  const std::vector<Rung>& rungs() const noexcept { return rungs_; }
  Qty live_quantity() const;

private:
  Side side_;
  LayerSpec spec_;
  IdSource ids_;
  std::vector<Rung> rungs_;
};

// ------------------------------------------------------ hidden liquidity

struct HiddenEvidence {
  std::uint32_t attempts = 0;
  std::uint32_t hits = 0;
  Qty hidden_filled = 0;

  /// Beta(1,1) posterior mean.
  double probability() const noexcept { return (hits + 1.0) / (attempts + 2.0); }
  double expected_size() const noexcept { return hits ? double(hidden_filled) / hits : 0.0; }
};

class HiddenLiquidityEstimate {
public:
  void record(VenueIndex venue, Side resting_side, Price price, Qty hidden_filled);
  HiddenEvidence at(VenueIndex venue, Side resting_side, Price price) const;
  double probability(VenueIndex venue, Side resting_side, Price price) const {
    return at(venue, resting_side, price).probability();
  }

private:
  std::map<std::tuple<VenueIndex, Side, Price>, HiddenEvidence> cells_;
};

enum class PingInstruction : std::uint8_t { ioc, fok };

struct PingResult {
  Qty filled = 0;
  Qty hidden_filled = 0;
  Qty visible_before = 0;
  std::vector<Fill> fills;
};

/// Sends an IOC or FOK probe and records whether hidden liquidity answered.
PingResult ping(OrderBook& book, VenueIndex venue, Side side, Price price, Qty qty, PingInstruction instruction,
                OrderId id, HiddenLiquidityEstimate& estimate);

// ---------------------------------------------------- virtual book, routing

struct VenueQuoteInput {
  VenueIndex venue = 0;
  BookView view;  // public snapshot
  double taker_fee = 0;
  Tick latency = 0;
  // Probability that an order at the top of this venue executes; defaults to 1.
  double exec_probability = 1.0;
};

struct VirtualEntry {
  VenueIndex venue = 0;
  Price price = 0;
  Qty visible = 0;
  double exec_probability = 0;
  double fee = 0;
  Tick latency = 0;

  bool operator==(const VirtualEntry&) const = default;
};

struct VirtualBook {
  std::vector<VirtualEntry> bids;
  std::vector<VirtualEntry> asks;
};

/// Merges public snapshots: price priority, then execution probability
/// (descending), then venue index.
VirtualBook aggregate(const std::vector<VenueQuoteInput>& venues);

struct RouteWeights {
  double price = 1.0;
  double probability = 1.0;
  double latency = 0.1;
  double fee = 0.1;
};

struct RouteCandidate {
  VenueIndex venue = 0;
  double score = 0;
};

/// Scores every venue quoting the opposite side (all listed venues when none
/// quote): -w_p * ticks from best + w_e * probability - w_l * latency - w_f * fee,
/// latency and fee min-max scaled across candidates. Ties go to the lowest index.
std::vector<RouteCandidate> score_venues(const VirtualBook& vb, Side child_side, const RouteWeights& w,
                                         const std::vector<VenueQuoteInput>& venues);
VenueIndex route(const VirtualBook& vb, Side child_side, const RouteWeights& w,
                 const std::vector<VenueQuoteInput>& venues);

// ---------------------------------------------------------------- sniping

/// Watches for liquidity at or better than a trigger and fires a marketable
/// IOC limit at the trigger. Never rests; re-arms after partial fills.
class Sniper {
public:
  Sniper(Side side, Price trigger, Qty qty, double hidden_threshold = 1.1);

  /// Best opposite visible price (or nullopt) plus the estimated hidden
  /// probability at the trigger.
  std::optional<Order> poll(std::optional<Price> best_opposite, double hidden_probability, OrderId id);
  void on_result(Qty filled);

  bool armed() const noexcept { return armed_; }
  Qty remaining() const noexcept { return remaining_; }

private:
  Side side_;
  Price trigger_;
  Qty remaining_;
  double hidden_threshold_;
  bool armed_ = true;
};

// ----------------------------------------------------- catching, pricing

/// True when the mid has moved against the parent by at least threshold ticks
/// since the reference mid (up for buys, down for sells).
bool should_catch(Side side, Price reference_mid, Price mid, Price threshold);

/// Marketable IOC replacements for outstanding passive children.
std::vector<Order> catch_children(const std::vector<Order>& passive, Price best_opposite, const IdSource& ids);

/// Urgency = (elapsed / horizon) / liquidity score, liquidity score > 0.
double timing_factor(Tick elapsed, Tick horizon, double liquidity_score);

enum class PricingStyle : std::uint8_t { passive, aggressive };

/// Child limit price. Aggressiveness 0 joins the own-side best, each step
/// moves one tick toward the market, and the last step crosses to the
/// opposite best. The trend term follows the trend for passive pricing and
/// leans against it (sign flipped) for aggressive pricing.
Price price_child(Side side, Price best_bid, Price best_ask, int aggressiveness, double trend_ticks,
                  double trend_weight, PricingStyle style);

/// Aggressiveness after applying the timing factor: one step up once urgency
/// crosses the threshold.
int urgency_step(int base, double urgency, double threshold);

} // namespace execlab::tactics
