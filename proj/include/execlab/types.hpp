#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace execlab {

// Prices are integer ticks; tick size (currency per tick) lives in book/market config.
using Price = std::int64_t;
using Qty = std::int64_t;
using Tick = std::int64_t;
using OrderId = std::uint64_t;
using VenueIndex = std::uint32_t;

enum class Side : std::uint8_t { buy, sell };

constexpr Side opposite(Side s) noexcept { return s == Side::buy ? Side::sell : Side::buy; }

// +1 for buys, -1 for sells.
constexpr int sign(Side s) noexcept { return s == Side::buy ? 1 : -1; }

// True when `a` is a strictly better price than `b` for a resting order on `s`.
constexpr bool better_price(Side s, Price a, Price b) noexcept {
  return s == Side::buy ? a > b : a < b;
}

std::string_view to_string(Side s) noexcept;
Side parse_side(std::string_view text);

class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace execlab
