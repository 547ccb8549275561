#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "execlab/orderbook.hpp"

namespace execlab {

// Order-event log: one comma-separated line per event with the fixed column
// order  event,clock,order_id,side,price_ticks,qty,flags
// price_ticks is "-" for unpriced events; flags are '|'-separated tokens.
inline constexpr std::string_view kEventLogColumns = "event,clock,order_id,side,price_ticks,qty,flags";

using IdFormatter = std::function<std::string(OrderId)>;

std::string format_event(const BookEvent& ev, const IdFormatter& ids = {}, std::string_view extra_flags = {});

/// Splits a delimited line on `sep`, keeping empty fields.
std::vector<std::string> split(std::string_view line, char sep);

/// Accepts plain ticks ("38100") or a wall-clock time ("10:35:00", seconds since midnight).
Tick parse_clock(std::string_view text);

/// Applies flag tokens (market, limit, ioc, fok, aon, day, gtc, gtd=T, gat=T,
/// display=N, stop=P, protect=P, disc=P, stop-limit, stop-market, protected)
/// to `order`. Throws ValidationError on an unknown token.
void apply_order_flags(std::string_view flags, Order& order);

} // namespace execlab
