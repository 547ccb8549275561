#pragma once

#include <deque>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "execlab/order.hpp"

namespace execlab {

struct Fill {
  OrderId taker_order_id = 0;
  OrderId maker_order_id = 0;
  Side taker_side = Side::buy;
  Price price = 0;
  Qty quantity = 0;
  Tick time = 0;
  bool maker_was_hidden = false;

  bool operator==(const Fill&) const = default;
};

enum class Disposition : std::uint8_t { filled, partial_resting, resting, cancelled, rejected };
std::string_view to_string(Disposition d) noexcept;

enum class EventType : std::uint8_t { submit, fill, cancel, expire, trigger, reject };
std::string_view to_string(EventType t) noexcept;

enum class Reason : std::uint8_t {
  none,
  user,
  ioc,
  fok,
  market_remainder,
  gtd,
  day,
  malformed,
  no_liquidity,
  duplicate_id,
  unsupported,
  stop,
  gat,
};
std::string_view to_string(Reason r) noexcept;

/// One entry of the order-event log. Submit events carry the order so the
/// log can render its flags; fills carry the maker.
struct BookEvent {
  EventType type = EventType::submit;
  Tick clock = 0;
  OrderId id = 0;
  Side side = Side::buy;
  std::optional<Price> price;
  Qty qty = 0;
  OrderId maker = 0;
  bool maker_hidden = false;
  Reason reason = Reason::none;
  std::optional<Order> order;

  bool operator==(const BookEvent&) const = default;
};

struct SubmitResult {
  OrderId id = 0;
  Disposition disposition = Disposition::rejected;
  // Fills where this order was the taker.
  std::vector<Fill> fills;
  // Fills caused by stop activations or all-or-none re-evaluation during this call.
  std::vector<Fill> side_effects;
  Qty filled = 0;
  Qty resting = 0;
  Qty cancelled = 0;
  Reason reject_reason = Reason::none;
};

enum class Visibility : std::uint8_t { public_view, omniscient };

struct EntryView {
  OrderId id = 0;
  Qty qty = 0;
  Tick timestamp = 0;
  std::uint64_t seq = 0;
  bool hidden = false;
  Qty display_quantity = 0;
  Price discretion_offset = 0;

  bool operator==(const EntryView&) const = default;
};

struct LevelView {
  Price price = 0;
  Qty visible_qty = 0;
  Qty hidden_qty = 0;
  // Matching order: visible slices by time, then hidden remainders by time.
  std::vector<EntryView> entries;

  bool operator==(const LevelView&) const = default;
};

struct PendingView {
  Order order;
  std::uint64_t seq = 0;
  bool operator==(const PendingView&) const = default;
};

struct BookView {
  std::vector<LevelView> bids;  // best first
  std::vector<LevelView> asks;  // best first
  std::vector<PendingView> stops;
  std::vector<PendingView> all_or_none;
  std::vector<PendingView> scheduled;  // good-after-time orders awaiting activation
  std::optional<Price> last_trade;

  bool operator==(const BookView&) const = default;
};

struct BookConfig {
  Tick session_close = 23'400;
  bool allow_hidden = true;
  bool allow_iceberg = true;
};

struct ExpireResult {
  std::vector<OrderId> expired;
  std::vector<OrderId> activated;
  std::vector<Fill> fills;
};

/// Single-venue continuous limit order book with price-time priority.
///
/// Matching walks the opposite side best price first. At a price, visible
/// slices fill in time order, then hidden remainders in time order, then
/// discretionary orders resting deeper whose reach covers that price.
/// Icebergs refill their display from the hidden reserve with a fresh
/// timestamp, so every refill goes to the back of the visible queue.
///
/// All-or-none orders never act as passive liquidity; they wait in their own
/// queue and are re-evaluated as takers after every mutation.
class OrderBook {
public:
  explicit OrderBook(BookConfig cfg = {});

  SubmitResult submit(Order order);

  /// Removes a resting or pending order and returns its unfilled quantity.
  /// Throws std::out_of_range for an unknown id.
  Qty cancel(OrderId id);

  /// Activates pending stops reached by `last_trade_price` (buy stops at or
  /// below it, sell stops at or above it) in stop-entry order and submits them.
  std::vector<Order> trigger_stops(Price last_trade_price);

  /// Advances the clock: drops GTD orders whose expiry has arrived and day
  /// orders at session close, then activates good-after-time orders.
  ExpireResult expire(Tick clock);

  BookView snapshot(std::size_t depth = 0, Visibility visibility = Visibility::public_view) const;

  std::optional<Price> best_bid() const;
  std::optional<Price> best_ask() const;
  /// Best price holding any liquidity (visible or hidden).
  std::optional<Price> best_price(Side side, Visibility visibility) const;
  Qty visible_depth_at(Side side, Price price) const;
  std::optional<Price> last_trade() const noexcept { return last_trade_; }
  Tick clock() const noexcept { return clock_; }
  bool contains(OrderId id) const;
  const BookConfig& config() const noexcept { return cfg_; }

  /// Quantity a taker on `taker_side` could reach up to `limit` (nullopt = no bound).
  Qty crossable(Side taker_side, std::optional<Price> limit) const;

  /// Events are appended to `sink` while it is set.
  void set_event_sink(std::vector<BookEvent>* sink) noexcept { sink_ = sink; }

private:
  struct Slot {
    OrderId id;
    Qty qty;
    Tick timestamp;
    std::uint64_t seq;
  };
  using SlotList = std::list<Slot>;

  struct Level {
    SlotList visible;
    SlotList hidden;
    bool empty() const noexcept { return visible.empty() && hidden.empty(); }
  };

  using ExpiryKey = std::pair<Tick, std::uint64_t>;

  struct Resting {
    Order order;
    Price price = 0;
    Qty remaining = 0;
    std::uint64_t entry_seq = 0;
    std::optional<SlotList::iterator> visible;
    std::optional<SlotList::iterator> hidden;
    std::optional<ExpiryKey> expiry;
  };

  // (sort reach, sort price, entry seq, id); buys store negated prices so
  // that ascending order is price priority on both sides.
  using DiscretionKey = std::tuple<Price, Price, std::uint64_t, OrderId>;

  using Ladder = std::map<Price, Level>;

  Ladder& ladder(Side s) noexcept { return s == Side::buy ? bids_ : asks_; }
  const Ladder& ladder(Side s) const noexcept { return s == Side::buy ? bids_ : asks_; }
  std::set<DiscretionKey>& discretion(Side s) noexcept { return s == Side::buy ? buy_disc_ : sell_disc_; }
  const std::set<DiscretionKey>& discretion(Side s) const noexcept {
    return s == Side::buy ? buy_disc_ : sell_disc_;
  }

  void emit(BookEvent ev);
  Reason validate(const Order& o) const;
  void process_active(Order order, std::uint64_t entry_seq);
  void settle();
  bool reevaluate_all_or_none();
  Qty match(const Order& taker, Qty qty, std::optional<Price> reach);
  void take(Resting& maker, bool from_visible, Qty qty, Price price, const Order& taker);
  void rest(const Order& order, Qty remaining, std::uint64_t entry_seq);
  void erase_resting(OrderId id);
  void collect_stops(Price trade_price);
  bool price_acceptable(Side taker_side, Price p, std::optional<Price> reach) const;
  bool can_fill(Side taker_side, std::optional<Price> reach, Qty needed) const;
  std::optional<ExpiryKey> expiry_of(const Order& o, std::uint64_t seq) const;
  static DiscretionKey make_disc_key(const Resting& r);
  std::uint64_t next_seq() noexcept { return ++seq_; }

  BookConfig cfg_;
  Ladder bids_;
  Ladder asks_;
  std::unordered_map<OrderId, Resting> resting_;
  std::set<DiscretionKey> buy_disc_;
  std::set<DiscretionKey> sell_disc_;
  std::map<std::uint64_t, Order> stops_;
  std::map<std::uint64_t, Order> all_or_none_;
  std::map<std::pair<Tick, std::uint64_t>, Order> scheduled_;
  std::map<ExpiryKey, OrderId> expiries_;
  std::unordered_set<OrderId> known_ids_;
  std::deque<Order> activation_queue_;
  std::vector<Fill> call_fills_;
  std::optional<Price> last_trade_;
  Tick clock_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<BookEvent>* sink_ = nullptr;
};

} // namespace execlab
