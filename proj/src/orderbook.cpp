#include "execlab/orderbook.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace execlab {

std::string_view to_string(Disposition d) noexcept {
  switch (d) {
    case Disposition::filled: return "filled";
    case Disposition::partial_resting: return "partial-resting";
    case Disposition::resting: return "resting";
    case Disposition::cancelled: return "cancelled";
    case Disposition::rejected: return "rejected";
  }
  return "?";
}

std::string_view to_string(EventType t) noexcept {
  switch (t) {
    case EventType::submit: return "submit";
    case EventType::fill: return "fill";
    case EventType::cancel: return "cancel";
    case EventType::expire: return "expire";
    case EventType::trigger: return "trigger";
    case EventType::reject: return "reject";
  }
  return "?";
}

std::string_view to_string(Reason r) noexcept {
  switch (r) {
    case Reason::none: return "";
    case Reason::user: return "user";
    case Reason::ioc: return "ioc";
    case Reason::fok: return "fok";
    case Reason::market_remainder: return "market-remainder";
    case Reason::gtd: return "gtd";
    case Reason::day: return "day";
    case Reason::malformed: return "malformed";
    case Reason::no_liquidity: return "no-liquidity";
    case Reason::duplicate_id: return "duplicate-id";
    case Reason::unsupported: return "unsupported";
    case Reason::stop: return "stop";
    case Reason::gat: return "gat";
  }
  return "?";
}

OrderBook::OrderBook(BookConfig cfg) : cfg_(cfg) {}

void OrderBook::emit(BookEvent ev) {
  if (sink_) sink_->push_back(std::move(ev));
}

Reason OrderBook::validate(const Order& o) const {
  if (!check_order(o).empty()) return Reason::malformed;
  if (known_ids_.count(o.id)) return Reason::duplicate_id;
  if (o.display_quantity == 0 && !cfg_.allow_hidden) return Reason::unsupported;
  if (o.display_quantity > 0 && o.display_quantity < o.quantity && !cfg_.allow_iceberg)
    return Reason::unsupported;
  if (o.kind == OrderKind::stop && last_trade_) {
    // Buy stops sit at or above the last trade, sell stops at or below.
    if (o.side == Side::buy && *o.stop_price < *last_trade_) return Reason::malformed;
    if (o.side == Side::sell && *o.stop_price > *last_trade_) return Reason::malformed;
  }
  return Reason::none;
}

bool OrderBook::price_acceptable(Side taker_side, Price p, std::optional<Price> reach) const {
  if (!reach) return true;
  return taker_side == Side::buy ? p <= *reach : p >= *reach;
}

OrderBook::DiscretionKey OrderBook::make_disc_key(const Resting& r) {
  const Order& o = r.order;
  if (o.side == Side::buy) {
    Price reach = r.price + o.discretion_offset;
    return {-reach, -r.price, r.entry_seq, o.id};
  }
  Price reach = r.price - o.discretion_offset;
  return {reach, r.price, r.entry_seq, o.id};
}

std::optional<OrderBook::ExpiryKey> OrderBook::expiry_of(const Order& o, std::uint64_t seq) const {
  if (o.tif == TimeInForce::gtd) return ExpiryKey{o.tif_time, seq};
  if (o.tif == TimeInForce::day) return ExpiryKey{cfg_.session_close, seq};
  return std::nullopt;
}

Qty OrderBook::crossable(Side taker_side, std::optional<Price> reach) const {
  const Side os = opposite(taker_side);
  const Ladder& lad = ladder(os);
  Qty total = 0;
  auto add_level = [&](const Level& lvl) {
    for (const Slot& s : lvl.visible) total += s.qty;
    for (const Slot& s : lvl.hidden) total += s.qty;
  };
  if (os == Side::sell) {
    for (auto it = lad.begin(); it != lad.end() && price_acceptable(taker_side, it->first, reach); ++it)
      add_level(it->second);
  } else {
    for (auto it = lad.rbegin(); it != lad.rend() && price_acceptable(taker_side, it->first, reach); ++it)
      add_level(it->second);
  }
  // Discretionary orders whose displayed price is out of reach but whose
  // discretion brings them inside it.
  for (const DiscretionKey& key : discretion(os)) {
    Price reach_price = os == Side::buy ? -std::get<0>(key) : std::get<0>(key);
    if (!price_acceptable(taker_side, reach_price, reach)) break;
    const Resting& r = resting_.at(std::get<3>(key));
    if (!price_acceptable(taker_side, r.price, reach)) total += r.remaining;
  }
  return total;
}

bool OrderBook::can_fill(Side taker_side, std::optional<Price> reach, Qty needed) const {
  return crossable(taker_side, reach) >= needed;
}

SubmitResult OrderBook::submit(Order order) {
  SubmitResult result;
  result.id = order.id;
  order.timestamp = clock_;

  Reason bad = validate(order);
  if (bad == Reason::none && (order.kind == OrderKind::market || order.kind == OrderKind::market_protected)) {
    // A market order needs something to trade against; a protected one also
    // needs a reference price for its protective limit.
    bool has_reference = order.kind == OrderKind::market_protected && last_trade_;
    if (!has_reference && crossable(order.side, std::nullopt) == 0) bad = Reason::no_liquidity;
  }
  if (bad != Reason::none) {
    emit({EventType::reject, clock_, order.id, order.side, order.limit_price, order.quantity, 0, false, bad,
          order});
    result.disposition = Disposition::rejected;
    result.reject_reason = bad;
    result.cancelled = order.quantity;
    return result;
  }

  known_ids_.insert(order.id);
  call_fills_.clear();
  emit({EventType::submit, clock_, order.id, order.side, order.limit_price, order.quantity, 0, false,
        Reason::none, order});

  const std::uint64_t seq = next_seq();
  if (order.kind == OrderKind::stop) {
    stops_.emplace(seq, order);
  } else if (order.tif == TimeInForce::gat && order.tif_time > clock_) {
    scheduled_.emplace(std::make_pair(order.tif_time, seq), order);
  } else {
    process_active(order, seq);
  }
  settle();

  for (const Fill& f : call_fills_) {
    if (f.taker_order_id == order.id) {
      result.fills.push_back(f);
      result.filled += f.quantity;
    } else {
      if (f.maker_order_id == order.id) result.filled += f.quantity;
      result.side_effects.push_back(f);
    }
  }
  call_fills_.clear();

  if (auto it = resting_.find(order.id); it != resting_.end()) {
    result.resting = it->second.remaining;
  } else {
    auto pending = [&](const auto& m) {
      return std::any_of(m.begin(), m.end(), [&](const auto& kv) { return kv.second.id == order.id; });
    };
    if (pending(stops_) || pending(all_or_none_) || pending(scheduled_)) result.resting = order.quantity;
  }
  result.cancelled = order.quantity - result.filled - result.resting;
  if (result.resting > 0)
    result.disposition = result.filled > 0 ? Disposition::partial_resting : Disposition::resting;
  else if (result.filled == order.quantity)
    result.disposition = Disposition::filled;
  else
    result.disposition = Disposition::cancelled;
  return result;
}

void OrderBook::process_active(Order o, std::uint64_t entry_seq) {
  o.timestamp = clock_;
  if (o.kind == OrderKind::market_protected) {
    std::optional<Price> ref = last_trade_;
    if (!ref) ref = best_price(opposite(o.side), Visibility::omniscient);
    if (!ref) {
      emit({EventType::cancel, clock_, o.id, o.side, std::nullopt, o.quantity, 0, false, Reason::no_liquidity,
            std::nullopt});
      return;
    }
    o.kind = OrderKind::limit;
    o.limit_price = *ref + sign(o.side) * o.protection_offset;
    o.protection_offset = 0;
  }

  std::optional<Price> reach;
  if (o.limit_price) reach = *o.limit_price + sign(o.side) * o.discretion_offset;

  if (o.tif == TimeInForce::fok && !can_fill(o.side, reach, o.quantity)) {
    emit({EventType::cancel, clock_, o.id, o.side, o.limit_price, o.quantity, 0, false, Reason::fok,
          std::nullopt});
    return;
  }
  if (o.tif == TimeInForce::aon) {
    if (can_fill(o.side, reach, o.quantity)) {
      match(o, o.quantity, reach);
    } else {
      all_or_none_.emplace(entry_seq, o);
    }
    return;
  }

  const Qty filled = match(o, o.quantity, reach);
  const Qty remaining = o.quantity - filled;
  if (remaining == 0) return;

  if (o.kind == OrderKind::market || o.tif == TimeInForce::ioc || o.tif == TimeInForce::fok) {
    Reason why = o.kind == OrderKind::market && o.tif != TimeInForce::ioc ? Reason::market_remainder
                 : o.tif == TimeInForce::fok                             ? Reason::fok
                                                                         : Reason::ioc;
    if (o.kind == OrderKind::market && filled == 0) why = Reason::no_liquidity;
    emit({EventType::cancel, clock_, o.id, o.side, o.limit_price, remaining, 0, false, why, std::nullopt});
    return;
  }
  rest(o, remaining, entry_seq);
}

Qty OrderBook::match(const Order& taker, Qty qty, std::optional<Price> reach) {
  const Side os = opposite(taker.side);
  Ladder& lad = ladder(os);
  std::set<DiscretionKey>& disc = discretion(os);
  Qty filled = 0;

  while (filled < qty) {
    Level* level = nullptr;
    Price level_price = 0;
    if (!lad.empty()) {
      auto it = os == Side::sell ? lad.begin() : std::prev(lad.end());
      level = &it->second;
      level_price = it->first;
    }
    std::optional<Price> disc_price;
    if (!disc.empty()) {
      const DiscretionKey& key = *disc.begin();
      disc_price = os == Side::buy ? -std::get<0>(key) : std::get<0>(key);
    }
    if (!level && !disc_price) break;

    // Displayed and hidden liquidity at a price outranks discretionary reach to it.
    const bool use_level = level && (!disc_price || !better_price(os, *disc_price, level_price));
    const Price price = use_level ? level_price : *disc_price;
    if (!price_acceptable(taker.side, price, reach)) break;

    const Qty want = qty - filled;
    if (use_level) {
      const bool from_visible = !level->visible.empty();
      const Slot& slot = from_visible ? level->visible.front() : level->hidden.front();
      Resting& maker = resting_.at(slot.id);
      const Qty n = std::min(want, slot.qty);
      take(maker, from_visible, n, price, taker);
      filled += n;
    } else {
      Resting& maker = resting_.at(std::get<3>(*disc.begin()));
      const bool from_visible = maker.visible.has_value();
      const Qty n = std::min(want, from_visible ? (*maker.visible)->qty : (*maker.hidden)->qty);
      take(maker, from_visible, n, price, taker);
      filled += n;
    }
  }
  return filled;
}

void OrderBook::take(Resting& maker, bool from_visible, Qty n, Price price, const Order& taker) {
  const OrderId maker_id = maker.order.id;
  const Price maker_price = maker.price;
  Ladder& lad = ladder(maker.order.side);
  Level& level = lad.at(maker_price);
  SlotList::iterator slot = from_visible ? *maker.visible : *maker.hidden;

  slot->qty -= n;
  maker.remaining -= n;

  Fill fill{taker.id, maker_id, taker.side, price, n, clock_, !from_visible};
  call_fills_.push_back(fill);
  last_trade_ = price;
  emit({EventType::fill, clock_, taker.id, taker.side, price, n, maker_id, !from_visible, Reason::none,
        std::nullopt});

  if (slot->qty == 0) {
    if (from_visible) {
      level.visible.erase(slot);
      maker.visible.reset();
      if (maker.hidden && maker.order.display_quantity > 0) {
        // Iceberg refill: the new peak joins the back of the queue.
        SlotList::iterator reserve = *maker.hidden;
        const Qty peak = std::min(maker.order.display_quantity, reserve->qty);
        reserve->qty -= peak;
        if (reserve->qty == 0) {
          level.hidden.erase(reserve);
          maker.hidden.reset();
        }
        level.visible.push_back(Slot{maker_id, peak, clock_, next_seq()});
        maker.visible = std::prev(level.visible.end());
      }
    } else {
      level.hidden.erase(slot);
      maker.hidden.reset();
    }
  }
  if (maker.remaining == 0) erase_resting(maker_id);
  if (auto it = lad.find(maker_price); it != lad.end() && it->second.empty()) lad.erase(it);

  collect_stops(price);
}

void OrderBook::rest(const Order& order, Qty remaining, std::uint64_t entry_seq) {
  Resting r;
  r.order = order;
  r.price = *order.limit_price;
  r.remaining = remaining;
  r.entry_seq = entry_seq;

  Level& level = ladder(order.side)[r.price];
  const Qty shown = order.display_quantity == 0 ? 0 : std::min(order.display_quantity, remaining);
  const Qty reserve = remaining - shown;
  if (shown > 0) {
    level.visible.push_back(Slot{order.id, shown, order.timestamp, entry_seq});
    r.visible = std::prev(level.visible.end());
  }
  if (reserve > 0) {
    level.hidden.push_back(Slot{order.id, reserve, order.timestamp, entry_seq});
    r.hidden = std::prev(level.hidden.end());
  }
  r.expiry = expiry_of(order, entry_seq);
  if (r.expiry) expiries_.emplace(*r.expiry, order.id);
  if (order.discretion_offset > 0) discretion(order.side).insert(make_disc_key(r));
  resting_.emplace(order.id, std::move(r));
}

void OrderBook::erase_resting(OrderId id) {
  auto it = resting_.find(id);
  if (it == resting_.end()) return;
  Resting& r = it->second;
  if (r.order.discretion_offset > 0) discretion(r.order.side).erase(make_disc_key(r));
  if (r.expiry) expiries_.erase(*r.expiry);
  Ladder& lad = ladder(r.order.side);
  if (r.visible || r.hidden) {
    auto lvl = lad.find(r.price);
    if (r.visible) lvl->second.visible.erase(*r.visible);
    if (r.hidden) lvl->second.hidden.erase(*r.hidden);
    if (lvl->second.empty()) lad.erase(lvl);
  }
  resting_.erase(it);
}

void OrderBook::collect_stops(Price trade_price) {
  for (auto it = stops_.begin(); it != stops_.end();) {
    const Order& s = it->second;
    const bool fire = s.side == Side::buy ? *s.stop_price <= trade_price : *s.stop_price >= trade_price;
    if (fire) {
      activation_queue_.push_back(s);
      it = stops_.erase(it);
    } else {
      ++it;
    }
  }
}

bool OrderBook::reevaluate_all_or_none() {
  for (auto it = all_or_none_.begin(); it != all_or_none_.end(); ++it) {
    const Order& o = it->second;
    std::optional<Price> reach;
    if (o.limit_price) reach = *o.limit_price + sign(o.side) * o.discretion_offset;
    if (can_fill(o.side, reach, o.quantity)) {
      Order taker = o;
      all_or_none_.erase(it);
      match(taker, taker.quantity, reach);
      return true;
    }
  }
  return false;
}

void OrderBook::settle() {
  bool progress = true;
  while (progress) {
    progress = false;
    while (!activation_queue_.empty()) {
      Order o = activation_queue_.front();
      activation_queue_.pop_front();
      emit({EventType::trigger, clock_, o.id, o.side, o.stop_price, o.quantity, 0, false, Reason::stop,
            std::nullopt});
      o.kind = o.limit_price ? OrderKind::limit : OrderKind::market;
      o.stop_price.reset();
      if (o.kind == OrderKind::market && crossable(o.side, std::nullopt) == 0) {
        emit({EventType::cancel, clock_, o.id, o.side, std::nullopt, o.quantity, 0, false, Reason::no_liquidity,
              std::nullopt});
        continue;
      }
      process_active(o, next_seq());
      progress = true;
    }
    if (reevaluate_all_or_none()) progress = true;
  }
}

std::vector<Order> OrderBook::trigger_stops(Price last_trade_price) {
  const std::size_t before = activation_queue_.size();
  collect_stops(last_trade_price);
  std::vector<Order> activated(activation_queue_.begin() + static_cast<std::ptrdiff_t>(before),
                               activation_queue_.end());
  for (Order& o : activated) {
    o.kind = o.limit_price ? OrderKind::limit : OrderKind::market;
  }
  settle();
  call_fills_.clear();
  return activated;
}

Qty OrderBook::cancel(OrderId id) {
  if (auto it = resting_.find(id); it != resting_.end()) {
    const Qty left = it->second.remaining;
    emit({EventType::cancel, clock_, id, it->second.order.side, it->second.price, left, 0, false, Reason::user,
          std::nullopt});
    erase_resting(id);
    return left;
  }
  auto drop = [&](auto& pending) -> std::optional<Qty> {
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      if (it->second.id != id) continue;
      const Order& o = it->second;
      emit({EventType::cancel, clock_, id, o.side, o.limit_price, o.quantity, 0, false, Reason::user,
            std::nullopt});
      Qty q = o.quantity;
      pending.erase(it);
      return q;
    }
    return std::nullopt;
  };
  if (auto q = drop(stops_)) return *q;
  if (auto q = drop(all_or_none_)) return *q;
  if (auto q = drop(scheduled_)) return *q;
  throw std::out_of_range("unknown order id " + std::to_string(id));
}

ExpireResult OrderBook::expire(Tick clock) {
  ExpireResult out;
  clock_ = std::max(clock_, clock);
  call_fills_.clear();

  auto expired_now = [&](const Order& o) {
    return (o.tif == TimeInForce::gtd && o.tif_time <= clock_) ||
           (o.tif == TimeInForce::day && clock_ >= cfg_.session_close);
  };
  auto expire_event = [&](const Order& o, std::optional<Price> price, Qty qty) {
    emit({EventType::expire, clock_, o.id, o.side, price, qty, 0, false,
          o.tif == TimeInForce::gtd ? Reason::gtd : Reason::day, std::nullopt});
    out.expired.push_back(o.id);
  };

  while (!expiries_.empty() && expiries_.begin()->first.first <= clock_) {
    const OrderId id = expiries_.begin()->second;
    const Resting& r = resting_.at(id);
    expire_event(r.order, r.price, r.remaining);
    erase_resting(id);
  }
  auto sweep = [&](auto& pending) {
    for (auto it = pending.begin(); it != pending.end();) {
      if (expired_now(it->second)) {
        expire_event(it->second, it->second.limit_price, it->second.quantity);
        it = pending.erase(it);
      } else {
        ++it;
      }
    }
  };
  sweep(stops_);
  sweep(all_or_none_);
  sweep(scheduled_);

  while (!scheduled_.empty() && scheduled_.begin()->first.first <= clock_) {
    Order o = scheduled_.begin()->second;
    scheduled_.erase(scheduled_.begin());
    emit({EventType::trigger, clock_, o.id, o.side, o.limit_price, o.quantity, 0, false, Reason::gat,
          std::nullopt});
    o.tif = TimeInForce::gtc;
    out.activated.push_back(o.id);
    if (o.kind == OrderKind::market && crossable(o.side, std::nullopt) == 0) {
      emit({EventType::cancel, clock_, o.id, o.side, std::nullopt, o.quantity, 0, false, Reason::no_liquidity,
            std::nullopt});
      continue;
    }
    process_active(o, next_seq());
  }
  settle();
  out.fills = std::move(call_fills_);
  call_fills_.clear();
  return out;
}

BookView OrderBook::snapshot(std::size_t depth, Visibility visibility) const {
  BookView view;
  const bool all = visibility == Visibility::omniscient;
  auto entry = [&](const Slot& s, bool hidden) {
    const Order& o = resting_.at(s.id).order;
    return EntryView{s.id, s.qty, s.timestamp, s.seq, hidden, o.display_quantity, o.discretion_offset};
  };
  auto render = [&](Price price, const Level& lvl, std::vector<LevelView>& out) {
    if (!all && lvl.visible.empty()) return;
    if (depth != 0 && out.size() >= depth) return;
    LevelView lv;
    lv.price = price;
    for (const Slot& s : lvl.visible) {
      lv.visible_qty += s.qty;
      lv.entries.push_back(entry(s, false));
    }
    if (all) {
      for (const Slot& s : lvl.hidden) {
        lv.hidden_qty += s.qty;
        lv.entries.push_back(entry(s, true));
      }
    }
    out.push_back(std::move(lv));
  };
  for (auto it = bids_.rbegin(); it != bids_.rend(); ++it) render(it->first, it->second, view.bids);
  for (auto it = asks_.begin(); it != asks_.end(); ++it) render(it->first, it->second, view.asks);
  if (all) {
    for (const auto& [seq, o] : stops_) view.stops.push_back({o, seq});
    for (const auto& [seq, o] : all_or_none_) view.all_or_none.push_back({o, seq});
    for (const auto& [key, o] : scheduled_) view.scheduled.push_back({o, key.second});
  }
  view.last_trade = last_trade_;
  return view;
}

std::optional<Price> OrderBook::best_price(Side side, Visibility visibility) const {
  const Ladder& lad = ladder(side);
  auto usable = [&](const Level& l) { return visibility == Visibility::omniscient || !l.visible.empty(); };
  if (side == Side::buy) {
    for (auto it = lad.rbegin(); it != lad.rend(); ++it)
      if (usable(it->second)) return it->first;
  } else {
    for (auto it = lad.begin(); it != lad.end(); ++it)
      if (usable(it->second)) return it->first;
  }
  return std::nullopt;
}

std::optional<Price> OrderBook::best_bid() const { return best_price(Side::buy, Visibility::public_view); }
std::optional<Price> OrderBook::best_ask() const { return best_price(Side::sell, Visibility::public_view); }

Qty OrderBook::visible_depth_at(Side side, Price price) const {
  const Ladder& lad = ladder(side);
  auto it = lad.find(price);
  if (it == lad.end()) return 0;
  Qty total = 0;
  for (const Slot& s : it->second.visible) total += s.qty;
  return total;
}

bool OrderBook::contains(OrderId id) const {
  if (resting_.count(id)) return true;
  auto has = [&](const auto& m) {
    return std::any_of(m.begin(), m.end(), [&](const auto& kv) { return kv.second.id == id; });
  };
  return has(stops_) || has(all_or_none_) || has(scheduled_);
}

} // namespace execlab
