#include "execlab/venue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "execlab/event_log.hpp"

namespace execlab::sim {

void validate(const VenueConfig& v) {
  if (v.latency < 0) throw ValidationError("venue latency must be >= 0");
  if (!std::isfinite(v.maker_fee) || !std::isfinite(v.taker_fee)) throw ValidationError("venue fees must be finite");
}

std::size_t VolumeProfile::bucket_of(Tick t) const {
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), t);
  if (it == boundaries.begin()) return 0;
  return std::min<std::size_t>(std::size_t(it - boundaries.begin()) - 1, buckets() - 1);
}

void validate(const VolumeProfile& p) {
  if (p.fractions.empty()) throw ValidationError("volume profile needs at least one bucket");
  if (p.boundaries.size() != p.fractions.size() + 1)
    throw ValidationError("volume profile needs one more boundary than buckets");
  for (std::size_t i = 0; i + 1 < p.boundaries.size(); ++i)
    if (p.boundaries[i + 1] <= p.boundaries[i]) throw ValidationError("volume profile boundaries must increase");
  double sum = 0;
  for (double z : p.fractions) {
    if (!(z >= 0)) throw ValidationError("volume profile fractions must be >= 0");
    sum += z;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("volume profile fractions must sum to 1");
}

namespace {

VolumeProfile with_weights(std::vector<double> w, Tick session) {
  const std::size_t n = w.size();
  if (n == 0) throw ValidationError("profile needs at least one bucket");
  if (session < Tick(n)) throw ValidationError("session shorter than bucket count");
  VolumeProfile p;
  for (std::size_t j = 0; j <= n; ++j) p.boundaries.push_back(Tick(j) * session / Tick(n));
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= sum;
  p.fractions = std::move(w);
  return p;
}

} // namespace

VolumeProfile u_shape_profile(std::size_t buckets, Tick session_ticks) {
  std::vector<double> w(buckets);
  for (std::size_t j = 0; j < buckets; ++j) {
    // Bucket centre mapped to [-1, 1]; the ends weigh up to four times midday.
    const double x = 2.0 * (double(j) + 0.5) / double(buckets) - 1.0;
    w[j] = 1.0 + 3.0 * x * x;
  }
  return with_weights(std::move(w), session_ticks);
}

VolumeProfile uniform_profile(std::size_t buckets, Tick session_ticks) {
  return with_weights(std::vector<double>(buckets, 1.0), session_ticks);
}

Price MarketParams::p0_ticks() const { return std::llround(p0 / tick_size); }

double MarketParams::tick_volatility() const {
  return sigma * p0 * std::sqrt(1.0 / (trading_days * double(session_ticks))) / tick_size;
}

double MarketParams::market_order_size() const {
  return adv / (intensity * double(session_ticks) * market_fraction);
}

void validate(const MarketParams& p) {
  if (!(p.p0 > 0)) throw ValidationError("market.p0 must be > 0");
  if (!(p.tick_size > 0)) throw ValidationError("market.tick_size must be > 0");
  if (!(p.sigma >= 0)) throw ValidationError("market.sigma must be >= 0");
  if (!(p.adv > 0)) throw ValidationError("market.adv must be > 0");
  if (p.session_ticks <= 0) throw ValidationError("market.session_ticks must be > 0");
  if (!(p.intensity >= 0)) throw ValidationError("market.intensity must be >= 0");
  if (!(p.market_fraction >= 0 && p.market_fraction <= 1))
    throw ValidationError("market.market_fraction must lie in [0, 1]");
  if (p.limit_depth < 1) throw ValidationError("market.limit_depth must be >= 1");
  if (!(p.limit_lifetime > 0)) throw ValidationError("market.limit_lifetime must be > 0");
  if (!(p.hidden_fraction >= 0 && p.hidden_fraction <= 1))
    throw ValidationError("market.hidden_fraction must lie in [0, 1]");
  if (!(p.trading_days > 0)) throw ValidationError("market.trading_days must be > 0");
}

double settle_fees(const VenueConfig& venue, const Fill& fill, Role role) {
  return double(fill.quantity) * (role == Role::maker ? venue.maker_fee : venue.taker_fee);
}

std::string format_sim_event(const SimEvent& e) {
  return format_event(e.event, {}, "venue=" + std::to_string(e.venue));
}

Simulator::Simulator(MarketParams params, std::vector<VenueConfig> venues, VolumeProfile profile)
    : params_(params), venues_(std::move(venues)), profile_(std::move(profile)), rng_(params.seed) {
  validate(params_);
  validate(profile_);
  if (venues_.empty()) throw ValidationError("simulator needs at least one venue");
  for (std::size_t i = 0; i < venues_.size(); ++i) {
    validate(venues_[i]);
    venues_[i].venue_id = VenueIndex(i);
    BookConfig cfg;
    cfg.session_close = params_.session_ticks;
    cfg.allow_hidden = venues_[i].supports_hidden;
    cfg.allow_iceberg = venues_[i].supports_iceberg;
    books_.emplace_back(cfg);
  }
  // Sinks must not move once books point at them.
  sinks_.resize(books_.size());
  for (std::size_t i = 0; i < books_.size(); ++i) books_[i].set_event_sink(&sinks_[i]);
  agent_fees_.assign(venues_.size(), 0.0);
  fundamental_ = double(params_.p0_ticks());
}

Price Simulator::reference() const { return std::llround(fundamental_); }

double Simulator::mid(VenueIndex v) const {
  const OrderBook& b = books_.at(v);
  auto bid = b.best_bid();
  auto ask = b.best_ask();
  if (!bid || !ask) return fundamental_;
  return 0.5 * double(*bid + *ask);
}

double Simulator::consolidated_mid() const {
  std::optional<Price> bid, ask;
  for (const OrderBook& b : books_) {
    if (auto p = b.best_bid(); p && (!bid || *p > *bid)) bid = p;
    if (auto p = b.best_ask(); p && (!ask || *p < *ask)) ask = p;
  }
  if (!bid || !ask) return fundamental_;
  return 0.5 * double(*bid + *ask);
}

void Simulator::collect(VenueIndex v) {
  std::vector<BookEvent>& sink = sinks_[v];
  const VenueConfig& cfg = venues_[v];
  for (BookEvent& ev : sink) {
    if (ev.type == EventType::fill) {
      const bool agent_taker = is_agent(ev.id), agent_maker = is_agent(ev.maker);
      if (agent_taker) agent_fees_[v] += double(ev.qty) * cfg.taker_fee;
      if (agent_maker) agent_fees_[v] += double(ev.qty) * cfg.maker_fee;
      if (!agent_taker && !agent_maker) background_volume_ += ev.qty;
    }
    log_.push_back({v, std::move(ev)});
  }
  sink.clear();
}

Tick Simulator::dispatch(VenueIndex venue, Order order) {
  if (venue >= books_.size()) throw ValidationError("dispatch to unknown venue " + std::to_string(venue));
  if (!is_agent(order.id)) throw ValidationError("agent order ids must come from next_agent_id()");
  order.venue = venue;
  Pending p{clock_ + venues_[venue].latency, ++dispatch_seq_, venue, false, order};
  if (p.arrival == clock_) {
    books_[venue].expire(clock_);
    collect(venue);
    deliver(p);
  } else {
    pending_.emplace(std::make_pair(p.arrival, p.seq), p);
  }
  return p.arrival;
}

Tick Simulator::dispatch_cancel(VenueIndex venue, OrderId id) {
  if (venue >= books_.size()) throw ValidationError("cancel to unknown venue " + std::to_string(venue));
  Order o;
  o.id = id;
  Pending p{clock_ + venues_[venue].latency, ++dispatch_seq_, venue, true, o};
  if (p.arrival == clock_) {
    books_[venue].expire(clock_);
    collect(venue);
    deliver(p);
  } else {
    pending_.emplace(std::make_pair(p.arrival, p.seq), p);
  }
  return p.arrival;
}

void Simulator::deliver(const Pending& p) {
  OrderBook& b = books_[p.venue];
  if (p.cancel) {
    // The order may already have traded or expired while the cancel was in flight.
    if (b.contains(p.order.id)) b.cancel(p.order.id);
  } else {
    b.submit(p.order);
  }
  collect(p.venue);
}

void Simulator::background_arrival(Tick t) {
  const std::size_t nv = books_.size();
  const VenueIndex v = nv == 1 ? 0 : VenueIndex(std::uniform_int_distribution<std::size_t>(0, nv - 1)(rng_));
  OrderBook& b = books_[v];
  const Side side = std::bernoulli_distribution(0.5)(rng_) ? Side::buy : Side::sell;
  const bool market = std::bernoulli_distribution(params_.market_fraction)(rng_);
  const double mean = params_.market_order_size();
  const Qty qty = 1 + std::geometric_distribution<Qty>(std::min(1.0, 1.0 / mean))(rng_);

  Order o;
  o.id = next_background_id_++;
  o.side = side;
  o.quantity = qty;
  o.display_quantity = qty;
  if (market) {
    o.kind = OrderKind::market;
    o.tif = TimeInForce::ioc;
    if (b.crossable(side, std::nullopt) == 0) return;
    b.submit(o);
    collect(v);
    return;
  }

  const Price offset = std::uniform_int_distribution<Price>(1, params_.limit_depth)(rng_);
  Price price = reference() - sign(side) * offset;
  // Post-only: never cross anything resting on the other side.
  if (auto opp = b.best_price(opposite(side), Visibility::omniscient)) {
    price = side == Side::buy ? std::min(price, *opp - 1) : std::max(price, *opp + 1);
  }
  price = std::max<Price>(price, 1);
  o.kind = OrderKind::limit;
  o.tif = TimeInForce::gtc;
  o.limit_price = price;
  if (venues_[v].supports_hidden && params_.hidden_fraction > 0 &&
      std::bernoulli_distribution(params_.hidden_fraction)(rng_))
    o.display_quantity = 0;
  const double life = std::exponential_distribution<double>(1.0 / params_.limit_lifetime)(rng_);
  b.submit(o);
  collect(v);
  if (b.contains(o.id)) lifetimes_.emplace(t + 1 + Tick(life), std::make_pair(v, o.id));
}

void Simulator::run_tick(Tick t) {
  for (std::size_t v = 0; v < books_.size(); ++v) {
    books_[v].expire(t);
    collect(VenueIndex(v));
  }
  while (!pending_.empty() && pending_.begin()->first.first <= t) {
    Pending p = pending_.begin()->second;
    pending_.erase(pending_.begin());
    deliver(p);
  }
  for (auto it = lifetimes_.begin(); it != lifetimes_.end() && it->first <= t; it = lifetimes_.erase(it)) {
    auto [v, id] = it->second;
    if (books_[v].contains(id)) {
      books_[v].cancel(id);
      collect(v);
    }
  }

  const double vol = params_.tick_volatility();
  if (vol > 0) fundamental_ += std::normal_distribution<double>(0.0, vol)(rng_);

  if (params_.intensity <= 0 || t >= params_.session_ticks) return;
  const std::size_t j = profile_.bucket_of(t);
  const double len = double(profile_.boundaries[j + 1] - profile_.boundaries[j]);
  const double rate = params_.intensity * profile_.fractions[j] * double(params_.session_ticks) / len;
  if (rate <= 0) return;
  const int n = std::poisson_distribution<int>(rate)(rng_);
  for (int i = 0; i < n; ++i) background_arrival(t);
}

std::vector<SimEvent> Simulator::advance(Tick dt) {
  if (dt <= 0) throw ValidationError("advance needs dt > 0");
  for (Tick t = clock_; t < clock_ + dt; ++t) run_tick(t);
  clock_ += dt;
  std::vector<SimEvent> out(log_.begin() + std::ptrdiff_t(returned_), log_.end());
  returned_ = log_.size();
  return out;
}

} // namespace execlab::sim
