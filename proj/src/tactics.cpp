#include "execlab/tactics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace execlab::tactics {

IdSource counter_ids(OrderId first) {
  return [next = first]() mutable { return next++; };
}

void validate(const SlicePolicy& p) {
  if (p.display <= 0) throw std::invalid_argument("slice display size must be positive");
  if (p.jitter < 0 || p.jitter >= 1) throw std::invalid_argument("slice jitter must lie in [0, 1)");
  for (Qty q : p.size_script)
    if (q <= 0) throw std::invalid_argument("scripted slice sizes must be positive");
}

Slicer::Slicer(Side side, Qty total, std::optional<Price> limit, SlicePolicy policy, IdSource ids, TimeInForce tif)
    : side_(side), total_(total), limit_(limit), policy_(std::move(policy)), ids_(std::move(ids)), tif_(tif),
      rng_(policy_.seed) {
  validate(policy_);
  if (total <= 0) throw std::invalid_argument("parent quantity must be positive");
}

Qty Slicer::draw_size() {
  const std::size_t k = emitted_++;
  if (k < policy_.size_script.size()) return policy_.size_script[k];
  if (policy_.jitter == 0) return policy_.display;
  std::uniform_real_distribution<double> u(-policy_.jitter, policy_.jitter);
  return std::max<Qty>(1, std::llround(static_cast<double>(policy_.display) * (1.0 + u(rng_))));
}

Order Slicer::make_child(Qty qty) {
  Order o;
  o.id = ids_();
  o.side = side_;
  o.kind = limit_ ? OrderKind::limit : OrderKind::market;
  o.limit_price = limit_;
  o.quantity = qty;
  o.display_quantity = qty;
  o.tif = limit_ ? tif_ : TimeInForce::ioc;
  live_[o.id] = qty;
  outstanding_ += qty;
  return o;
}

std::optional<Order> Slicer::next() {
  if (policy_.mode == SliceMode::sequential && outstanding_ > 0) return std::nullopt;
  const Qty free = total_ - filled_ - outstanding_;
  if (free <= 0) return std::nullopt;
  return make_child(std::min(draw_size(), free));
}

std::vector<Order> Slicer::next_batch(std::size_t venues) {
  std::vector<Order> out;
  for (std::size_t v = 0; v < venues; ++v) {
    const Qty free = total_ - filled_ - outstanding_;
    if (free <= 0) break;
    Order o = make_child(std::min(draw_size(), free));
    o.venue = static_cast<VenueIndex>(v);
    out.push_back(o);
  }
  return out;
}

void Slicer::on_fill(OrderId child, Qty qty) {
  auto it = live_.find(child);
  if (it == live_.end() || qty > it->second) throw std::logic_error("fill for unknown or overfilled child");
  it->second -= qty;
  outstanding_ -= qty;
  filled_ += qty;
  if (it->second == 0) live_.erase(it);
}

void Slicer::on_done(OrderId child, Qty unfilled) {
  auto it = live_.find(child);
  if (it == live_.end()) return;
  if (unfilled != it->second) throw std::logic_error("child closed with inconsistent remainder");
  outstanding_ -= unfilled;
  live_.erase(it);
}

LayerSet::LayerSet(Side side, LayerSpec spec, IdSource ids) : side_(side), spec_(std::move(spec)), ids_(std::move(ids)) {
  if (spec_.rung_size <= 0) throw std::invalid_argument("rung size must be positive");
  std::vector<Price> sorted = spec_.offsets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("rung offsets must be distinct");
  spec_.offsets = sorted;
}

Qty LayerSet::live_quantity() const {
  Qty q = 0;
  for (const Rung& r : rungs_) q += r.qty;
  return q;
}

std::vector<LayerAction> LayerSet::maintain(Price mid, Qty parent_remaining) {
  std::vector<LayerAction> actions;
  std::vector<Price> targets;
  for (Price off : spec_.offsets) {
    const Price p = mid - sign(side_) * off;
    if (p > 0) targets.push_back(p);
  }
  for (auto it = rungs_.begin(); it != rungs_.end();) {
    if (std::find(targets.begin(), targets.end(), it->price) == targets.end()) {
      actions.push_back({LayerAction::Kind::cancel, {}, it->id});
      it = rungs_.erase(it);
    } else {
      ++it;
    }
  }
  Qty room = parent_remaining - live_quantity();
  // targets are ordered nearest the market first
  for (Price p : targets) {
    if (room <= 0) break;
    const bool have = std::any_of(rungs_.begin(), rungs_.end(), [&](const Rung& r) { return r.price == p; });
    if (have) continue;
    const Qty q = std::min(spec_.rung_size, room);
    Order o = Order::limit(ids_(), side_, p, q);
    rungs_.push_back({o.id, p, q});
    actions.push_back({LayerAction::Kind::place, o, 0});
    room -= q;
  }
  return actions;
}

void LayerSet::on_fill(OrderId id, Qty qty) {
  for (auto it = rungs_.begin(); it != rungs_.end(); ++it) {
    if (it->id != id) continue;
    it->qty -= qty;
    if (it->qty <= 0) rungs_.erase(it);
    return;
  }
}

void LayerSet::on_gone(OrderId id) {
  std::erase_if(rungs_, [&](const Rung& r) { return r.id == id; });
}

void HiddenLiquidityEstimate::record(VenueIndex venue, Side resting_side, Price price, Qty hidden_filled) {
  HiddenEvidence& e = cells_[{venue, resting_side, price}];
  ++e.attempts;
  if (hidden_filled > 0) {
    ++e.hits;
    e.hidden_filled += hidden_filled;
  }
}

HiddenEvidence HiddenLiquidityEstimate::at(VenueIndex venue, Side resting_side, Price price) const {
  auto it = cells_.find({venue, resting_side, price});
  return it == cells_.end() ? HiddenEvidence{} : it->second;
}

PingResult ping(OrderBook& book, VenueIndex venue, Side side, Price price, Qty qty, PingInstruction instruction,
                OrderId id, HiddenLiquidityEstimate& estimate) {
  PingResult out;
  out.visible_before = book.visible_depth_at(opposite(side), price);
  Order o = Order::limit(id, side, price, qty, instruction == PingInstruction::ioc ? TimeInForce::ioc : TimeInForce::fok);
  o.venue = venue;
  SubmitResult r = book.submit(o);
  out.fills = r.fills;
  for (const Fill& f : r.fills) {
    out.filled += f.quantity;
    if (f.maker_was_hidden && f.price == price) out.hidden_filled += f.quantity;
  }
  estimate.record(venue, opposite(side), price, out.hidden_filled);
  return out;
}

VirtualBook aggregate(const std::vector<VenueQuoteInput>& venues) {
  VirtualBook vb;
  for (const VenueQuoteInput& v : venues) {
    auto add = [&](const std::vector<LevelView>& levels, std::vector<VirtualEntry>& out) {
      for (const LevelView& l : levels)
        if (l.visible_qty > 0) out.push_back({v.venue, l.price, l.visible_qty, v.exec_probability, v.taker_fee, v.latency});
    };
    add(v.view.bids, vb.bids);
    add(v.view.asks, vb.asks);
  }
  auto order = [](Side s) {
    return [s](const VirtualEntry& a, const VirtualEntry& b) {
      if (a.price != b.price) return better_price(s, a.price, b.price);
      if (a.exec_probability != b.exec_probability) return a.exec_probability > b.exec_probability;
      return a.venue < b.venue;
    };
  };
  std::stable_sort(vb.bids.begin(), vb.bids.end(), order(Side::buy));
  std::stable_sort(vb.asks.begin(), vb.asks.end(), order(Side::sell));
  return vb;
}

std::vector<RouteCandidate> score_venues(const VirtualBook& vb, Side child_side, const RouteWeights& w,
                                         const std::vector<VenueQuoteInput>& venues) {
  if (venues.empty()) throw std::invalid_argument("no venues to route to");
  const std::vector<VirtualEntry>& side = child_side == Side::buy ? vb.asks : vb.bids;
  struct Cand {
    VenueIndex venue;
    std::optional<Price> price;
    double prob, latency, fee;
  };
  std::vector<Cand> cands;
  for (const VenueQuoteInput& v : venues) {
    std::optional<Price> best;
    for (const VirtualEntry& e : side)
      if (e.venue == v.venue) {
        best = e.price;
        break;
      }
    cands.push_back({v.venue, best, v.exec_probability, double(v.latency), v.taker_fee});
  }
  const bool any_quote = std::any_of(cands.begin(), cands.end(), [](const Cand& c) { return c.price.has_value(); });
  if (any_quote) std::erase_if(cands, [](const Cand& c) { return !c.price; });

  std::optional<Price> best_price;
  double lat_lo = INFINITY, lat_hi = -INFINITY, fee_lo = INFINITY, fee_hi = -INFINITY;
  for (const Cand& c : cands) {
    if (c.price && (!best_price || better_price(opposite(child_side), *c.price, *best_price))) best_price = c.price;
    lat_lo = std::min(lat_lo, c.latency);
    lat_hi = std::max(lat_hi, c.latency);
    fee_lo = std::min(fee_lo, c.fee);
    fee_hi = std::max(fee_hi, c.fee);
  }
  auto scale = [](double x, double lo, double hi) { return hi > lo ? (x - lo) / (hi - lo) : 0.0; };

  std::vector<RouteCandidate> out;
  for (const Cand& c : cands) {
    const double ticks = c.price ? static_cast<double>(std::llabs(*c.price - *best_price)) : 0.0;
    const double score = -w.price * ticks + w.probability * c.prob - w.latency * scale(c.latency, lat_lo, lat_hi) -
                         w.fee * scale(c.fee, fee_lo, fee_hi);
    out.push_back({c.venue, score});
  }
  return out;
}

VenueIndex route(const VirtualBook& vb, Side child_side, const RouteWeights& w,
                 const std::vector<VenueQuoteInput>& venues) {
  auto scores = score_venues(vb, child_side, w, venues);
  const RouteCandidate* best = &scores.front();
  for (const RouteCandidate& c : scores)
    if (c.score > best->score || (c.score == best->score && c.venue < best->venue)) best = &c;
  return best->venue;
}

Sniper::Sniper(Side side, Price trigger, Qty qty, double hidden_threshold)
    : side_(side), trigger_(trigger), remaining_(qty), hidden_threshold_(hidden_threshold) {
  if (qty <= 0) throw std::invalid_argument("snipe quantity must be positive");
}

std::optional<Order> Sniper::poll(std::optional<Price> best_opposite, double hidden_probability, OrderId id) {
  if (!armed_ || remaining_ == 0) return std::nullopt;
  const bool shown = best_opposite && (side_ == Side::buy ? *best_opposite <= trigger_ : *best_opposite >= trigger_);
  if (!shown && hidden_probability < hidden_threshold_) return std::nullopt;
  armed_ = false;
  return Order::limit(id, side_, trigger_, remaining_, TimeInForce::ioc);
}

void Sniper::on_result(Qty filled) {
  remaining_ -= std::min(filled, remaining_);
  armed_ = remaining_ > 0;
}

bool should_catch(Side side, Price reference_mid, Price mid, Price threshold) {
  return sign(side) * (mid - reference_mid) >= threshold;
}

std::vector<Order> catch_children(const std::vector<Order>& passive, Price best_opposite, const IdSource& ids) {
  std::vector<Order> out;
  for (const Order& p : passive) out.push_back(Order::limit(ids(), p.side, best_opposite, p.quantity, TimeInForce::ioc));
  return out;
}

double timing_factor(Tick elapsed, Tick horizon, double liquidity_score) {
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  if (!(liquidity_score > 0)) throw std::invalid_argument("liquidity score must be positive");
  return (static_cast<double>(elapsed) / static_cast<double>(horizon)) / liquidity_score;
}

int urgency_step(int base, double urgency, double threshold) { return urgency >= threshold ? base + 1 : base; }

Price price_child(Side side, Price best_bid, Price best_ask, int aggressiveness, double trend_ticks,
                  double trend_weight, PricingStyle style) {
  const Price own = side == Side::buy ? best_bid : best_ask;
  const Price other = side == Side::buy ? best_ask : best_bid;
  const Price trend = static_cast<Price>(std::llround(trend_weight * trend_ticks));
  const Price lean = style == PricingStyle::passive ? trend : -trend;
  Price p = own + sign(side) * static_cast<Price>(std::max(aggressiveness, 0)) + lean;
  // Anything at or through the opposite best becomes a marketable limit there.
  if (side == Side::buy ? p >= other : p <= other) p = other;
  return std::max<Price>(p, 1);
}

} // namespace execlab::tactics
