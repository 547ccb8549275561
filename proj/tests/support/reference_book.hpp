#pragma once

#include <optional>
#include <vector>

#include "execlab/orderbook.hpp"

namespace execlab::testing {

/// Deliberately naive matcher used as an oracle: every match scans every
/// resting order. Covers limit and market orders, GTC/IOC/FOK, icebergs,
/// fully hidden orders and cancels.
class ReferenceBook {
public:
  struct RefFill {
    OrderId taker;
    OrderId maker;
    Price price;
    Qty qty;
    bool hidden;
    bool operator==(const RefFill&) const = default;
  };

  struct Outcome {
    bool rejected = false;
    std::vector<RefFill> fills;
    Qty resting = 0;
    Qty cancelled = 0;
  };

  struct Entry {
    OrderId id;
    Qty qty;
    bool hidden;
    bool operator==(const Entry&) const = default;
  };
  struct Level {
    Price price;
    std::vector<Entry> entries;
    bool operator==(const Level&) const = default;
  };

  Outcome submit(const Order& o);
  std::optional<Qty> cancel(OrderId id);
  std::vector<Level> levels(Side side) const;

private:
  struct R {
    OrderId id;
    Side side;
    Price price;
    Qty visible;
    Qty reserve;
    Qty peak;  // 0 = fully hidden
    std::uint64_t vseq;
    std::uint64_t rseq;
  };

  Qty reachable(Side taker, std::optional<Price> limit) const;

  std::vector<R> rest_;
  std::uint64_t seq_ = 0;
};

/// Converts an omniscient snapshot side into the reference representation.
std::vector<ReferenceBook::Level> to_reference(const std::vector<LevelView>& side);

} // namespace execlab::testing
