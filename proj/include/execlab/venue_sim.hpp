#pragma once

#include <deque>
#include <map>
#include <random>
#include <vector>

#include "execlab/orderbook.hpp"

namespace execlab::sim {

struct VenueConfig {
  VenueIndex venue_id = 0;
  // Currency per share; negative is a rebate.
  double maker_fee = 0;
  double taker_fee = 0;
  Tick latency = 0;
  bool supports_hidden = true;
  bool supports_iceberg = true;
};

void validate(const VenueConfig& v);

/// Bucket boundaries in ticks (size n+1, strictly increasing) and the
/// expected fraction of daily volume traded in each bucket.
struct VolumeProfile {
  std::vector<Tick> boundaries;
  std::vector<double> fractions;

  std::size_t buckets() const noexcept { return fractions.size(); }
  /// Bucket holding tick t, clamped to the first/last bucket.
  std::size_t bucket_of(Tick t) const;
};

void validate(const VolumeProfile& p);

/// Symmetric convex intraday profile, heaviest at the open and close.
VolumeProfile u_shape_profile(std::size_t buckets, Tick session_ticks = 23'400);
VolumeProfile uniform_profile(std::size_t buckets, Tick session_ticks = 23'400);

struct MarketParams {
  double p0 = 50.0;          // currency per share
  double tick_size = 0.01;   // currency per price tick
  double sigma = 0.25;       // annualized
  double adv = 1'000'000;    // shares per day
  std::uint64_t seed = 1;
  Tick session_ticks = 23'400;
  double intensity = 0.5;        // background orders per tick, session average
  double market_fraction = 0.3;  // share of background arrivals that are market orders
  Price limit_depth = 5;         // limit orders land 1..limit_depth ticks from the reference
  double limit_lifetime = 600;   // mean resting time before cancel, ticks
  double hidden_fraction = 0.0;  // share of background limits sent fully hidden
  double trading_days = 252;

  Price p0_ticks() const;
  /// Standard deviation of one tick's fundamental move, in price ticks.
  double tick_volatility() const;
  /// Mean background market-order size that trades ADV per session in expectation.
  double market_order_size() const;
};

void validate(const MarketParams& p);

enum class Role : std::uint8_t { maker, taker };

/// Fee paid for a fill in one role; rebates come back negative.
double settle_fees(const VenueConfig& venue, const Fill& fill, Role role);

/// Order ids at or above this value belong to the trading agent.
inline constexpr OrderId kAgentIdBase = OrderId{1} << 48;
constexpr bool is_agent(OrderId id) noexcept { return id >= kAgentIdBase; }

struct SimEvent {
  VenueIndex venue = 0;
  BookEvent event;

  bool operator==(const SimEvent&) const = default;
};

/// Event-log line with the venue appended as a flag.
std::string format_sim_event(const SimEvent& e);

/// Seeded multi-venue market. Single threaded; two instances built from the
/// same inputs produce identical event streams.
///
/// Ticks are processed in order: due agent arrivals (by arrival time, then
/// dispatch order), scheduled background cancels, the fundamental step, then
/// new background arrivals.
class Simulator {
public:
  Simulator(MarketParams params, std::vector<VenueConfig> venues, VolumeProfile profile);

  /// Runs ticks [clock, clock + dt) and returns the events produced, including
  /// any from immediate (zero-latency) dispatches made since the last call.
  std::vector<SimEvent> advance(Tick dt);

  /// Queues an agent order for the venue; returns the tick it reaches the
  /// book. Zero latency submits at once.
  Tick dispatch(VenueIndex venue, Order order);
  Tick dispatch_cancel(VenueIndex venue, OrderId id);

  OrderId next_agent_id() noexcept { return next_agent_id_++; }

  Tick clock() const noexcept { return clock_; }
  const MarketParams& params() const noexcept { return params_; }
  const std::vector<VenueConfig>& venues() const noexcept { return venues_; }
  const VolumeProfile& profile() const noexcept { return profile_; }
  const OrderBook& book(VenueIndex v) const { return books_.at(v); }
  double fundamental() const noexcept { return fundamental_; }

  /// Book mid in ticks on one venue; falls back to the fundamental when a side is empty.
  double mid(VenueIndex v) const;
  /// Mid of the consolidated best bid and offer.
  double consolidated_mid() const;

  /// Every event so far, in order.
  const std::vector<SimEvent>& log() const noexcept { return log_; }

  /// Agent fees paid so far, per venue.
  const std::vector<double>& agent_fees() const noexcept { return agent_fees_; }

  /// Shares traded with a background taker and a background maker.
  Qty background_volume() const noexcept { return background_volume_; }

private:
  struct Pending {
    Tick arrival;
    std::uint64_t seq;
    VenueIndex venue;
    bool cancel;
    Order order;
  };

  void run_tick(Tick t);
  void deliver(const Pending& p);
  void background_arrival(Tick t);
  void collect(VenueIndex v);
  Price reference() const;

  MarketParams params_;
  std::vector<VenueConfig> venues_;
  VolumeProfile profile_;
  std::vector<OrderBook> books_;
  std::vector<std::vector<BookEvent>> sinks_;
  std::mt19937_64 rng_;
  double fundamental_ = 0;
  Tick clock_ = 0;
  OrderId next_background_id_ = 1;
  OrderId next_agent_id_ = kAgentIdBase;
  std::uint64_t dispatch_seq_ = 0;
  std::map<std::pair<Tick, std::uint64_t>, Pending> pending_;
  std::multimap<Tick, std::pair<VenueIndex, OrderId>> lifetimes_;
  std::vector<SimEvent> log_;
  std::size_t returned_ = 0;
  std::vector<double> agent_fees_;
  Qty background_volume_ = 0;
};

} // namespace execlab::sim
