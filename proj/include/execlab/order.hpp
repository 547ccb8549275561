#pragma once

#include <optional>
#include <string>

#include "execlab/types.hpp"

namespace execlab {

enum class OrderKind : std::uint8_t { market, limit, market_protected, stop };

enum class TimeInForce : std::uint8_t { gtc, gtd, gat, ioc, fok, aon, day };

std::string_view to_string(OrderKind k) noexcept;
std::string_view to_string(TimeInForce t) noexcept;

/// Full order description accepted by a venue book.
///
/// Plain orders set display_quantity == quantity; icebergs display a smaller
/// peak; fully hidden orders display 0. A stop order wraps a market order
/// (no limit_price) or a limit order (limit_price set) and stays pending until
/// the last trade reaches stop_price.
struct Order {
  OrderId id = 0;
  Side side = Side::buy;
  OrderKind kind = OrderKind::limit;
  std::optional<Price> limit_price;
  Qty quantity = 0;
  Qty display_quantity = 0;
  std::optional<Price> stop_price;
  Price protection_offset = 0;
  Price discretion_offset = 0;
  TimeInForce tif = TimeInForce::gtc;
  // GTD: expiry clock (inclusive). GAT: activation clock.
  Tick tif_time = 0;
  Tick timestamp = 0;
  VenueIndex venue = 0;

  bool operator==(const Order&) const = default;

  bool is_iceberg() const noexcept { return display_quantity > 0 && display_quantity < quantity; }
  bool is_hidden() const noexcept { return display_quantity == 0; }

  static Order limit(OrderId id, Side side, Price price, Qty qty, TimeInForce tif = TimeInForce::gtc);
  static Order market(OrderId id, Side side, Qty qty, TimeInForce tif = TimeInForce::ioc);
};

/// Empty string when the order is well formed, otherwise the violated invariant.
std::string check_order(const Order& o);

/// Compact flag rendering used by the event log ("limit|gtc|display=0").
std::string order_flags(const Order& o);

} // namespace execlab
