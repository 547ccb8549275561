#include "execlab/order.hpp"

#include <sstream>

namespace execlab {

std::string_view to_string(Side s) noexcept { return s == Side::buy ? "buy" : "sell"; }

Side parse_side(std::string_view text) {
  if (text == "buy" || text == "B" || text == "b") return Side::buy;
  if (text == "sell" || text == "S" || text == "s") return Side::sell;
  throw ValidationError("unknown side '" + std::string(text) + "'");
}

std::string_view to_string(OrderKind k) noexcept {
  switch (k) {
    case OrderKind::market: return "market";
    case OrderKind::limit: return "limit";
    case OrderKind::market_protected: return "protected";
    case OrderKind::stop: return "stop";
  }
  return "?";
}

std::string_view to_string(TimeInForce t) noexcept {
  switch (t) {
    case TimeInForce::gtc: return "gtc";
    case TimeInForce::gtd: return "gtd";
    case TimeInForce::gat: return "gat";
    case TimeInForce::ioc: return "ioc";
    case TimeInForce::fok: return "fok";
    case TimeInForce::aon: return "aon";
    case TimeInForce::day: return "day";
  }
  return "?";
}

Order Order::limit(OrderId id, Side side, Price price, Qty qty, TimeInForce tif) {
  Order o;
  o.id = id;
  o.side = side;
  o.kind = OrderKind::limit;
  o.limit_price = price;
  o.quantity = qty;
  o.display_quantity = qty;
  o.tif = tif;
  return o;
}

Order Order::market(OrderId id, Side side, Qty qty, TimeInForce tif) {
  Order o;
  o.id = id;
  o.side = side;
  o.kind = OrderKind::market;
  o.quantity = qty;
  o.display_quantity = qty;
  o.tif = tif;
  return o;
}

std::string check_order(const Order& o) {
  if (o.quantity <= 0) return "quantity must be positive";
  if (o.display_quantity < 0 || o.display_quantity > o.quantity)
    return "display_quantity must lie in [0, quantity]";
  if (o.discretion_offset < 0) return "discretion_offset must be non-negative";
  if (o.protection_offset < 0) return "protection_offset must be non-negative";
  if (o.limit_price && *o.limit_price <= 0) return "limit_price must be positive";
  switch (o.kind) {
    case OrderKind::limit:
      if (!o.limit_price) return "limit order requires limit_price";
      break;
    case OrderKind::market:
    case OrderKind::market_protected:
      if (o.limit_price) return "market order must not carry limit_price";
      if (o.discretion_offset != 0) return "discretion requires a limit price";
      break;
    case OrderKind::stop:
      if (!o.stop_price) return "stop order requires stop_price";
      if (!o.limit_price && o.discretion_offset != 0) return "discretion requires a limit price";
      break;
  }
  if (o.stop_price && o.kind != OrderKind::stop) return "stop_price only valid on stop orders";
  return {};
}

std::string order_flags(const Order& o) {
  std::ostringstream out;
  out << to_string(o.kind);
  if (o.kind == OrderKind::stop) out << (o.limit_price ? "-limit" : "-market");
  out << '|' << to_string(o.tif);
  if (o.tif == TimeInForce::gtd || o.tif == TimeInForce::gat) out << '=' << o.tif_time;
  if (o.display_quantity != o.quantity) out << "|display=" << o.display_quantity;
  if (o.stop_price) out << "|stop=" << *o.stop_price;
  if (o.protection_offset != 0) out << "|protect=" << o.protection_offset;
  if (o.discretion_offset != 0) out << "|disc=" << o.discretion_offset;
  return out.str();
}

} // namespace execlab
