#include "execlab/exec_algos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace execlab::algo {

std::string_view to_string(BenchmarkChoice b) noexcept {
  switch (b) {
    case BenchmarkChoice::close: return "close";
    case BenchmarkChoice::open: return "open";
    case BenchmarkChoice::arrival: return "arrival";
    case BenchmarkChoice::decision: return "decision";
  }
  return "?";
}

BenchmarkChoice parse_benchmark_choice(std::string_view text) {
  if (text == "close") return BenchmarkChoice::close;
  if (text == "open") return BenchmarkChoice::open;
  if (text == "arrival") return BenchmarkChoice::arrival;
  if (text == "decision") return BenchmarkChoice::decision;
  throw ValidationError("unknown benchmark '" + std::string(text) + "'");
}

std::string_view to_string(AlgoType t) noexcept {
  switch (t) {
    case AlgoType::twap: return "twap";
    case AlgoType::vwap: return "vwap";
    case AlgoType::pov: return "pov";
    case AlgoType::pov_adaptive: return "pov-adaptive";
  }
  return "?";
}

AlgoType parse_algo_type(std::string_view text) {
  if (text == "twap") return AlgoType::twap;
  if (text == "vwap") return AlgoType::vwap;
  if (text == "pov") return AlgoType::pov;
  if (text == "pov-adaptive") return AlgoType::pov_adaptive;
  throw ValidationError("unknown algo type '" + std::string(text) + "'");
}

std::string_view to_string(VolumeSide v) noexcept { return v == VolumeSide::both ? "both" : "same"; }

VolumeSide parse_volume_side(std::string_view text) {
  if (text == "both") return VolumeSide::both;
  if (text == "same") return VolumeSide::same;
  throw ValidationError("unknown volume side '" + std::string(text) + "'");
}

void validate(const ParentOrder& p) {
  if (p.quantity <= 0) throw ValidationError("parent quantity must be > 0");
  if (p.end <= p.start) throw ValidationError("parent end must be after start");
  if (p.limit && *p.limit <= 0) throw ValidationError("parent limit must be positive");
}

void validate(const TiltPolicy& t) {
  if (!(t.threshold >= 0 && t.threshold <= 1)) throw ValidationError("tilt.threshold must lie in [0, 1]");
  if (!(t.factor > 0)) throw ValidationError("tilt.factor must be > 0");
  if (!(t.jitter >= 0 && t.jitter < 1)) throw ValidationError("tilt.jitter must lie in [0, 1)");
  if (!(t.timing_jitter >= 0 && t.timing_jitter < 1)) throw ValidationError("tilt.timing_jitter must lie in [0, 1)");
}

void validate(const AlgoSpec& a) {
  if (a.bucket_ticks <= 0) throw ValidationError("algo.bucket_ticks must be > 0");
  if (!(a.pr >= 0 && a.pr < 1)) throw ValidationError("algo.pr must lie in [0, 1)");
  if (!(a.pr_max >= 0 && a.pr_max < 1)) throw ValidationError("algo.pr_max must lie in [0, 1)");
  if (!(a.sensitivity >= 0)) throw ValidationError("algo.sensitivity must be >= 0");
  if (a.max_child < 0) throw ValidationError("algo.max_child must be >= 0");
  if (a.cross_ticks < 0) throw ValidationError("algo.cross_ticks must be >= 0");
  if (a.price_limit && *a.price_limit <= 0) throw ValidationError("algo.price_limit must be positive");
  validate(a.tilt);
}

Qty Schedule::total() const {
  Qty s = 0;
  for (const auto& b : buckets) s += b.target;
  return s;
}

std::vector<Qty> Schedule::targets() const {
  std::vector<Qty> out;
  for (const auto& b : buckets) out.push_back(b.target);
  return out;
}

std::vector<Qty> apportion(const std::vector<double>& weights, Qty total) {
  const std::size_t n = weights.size();
  if (n == 0) throw ValidationError("apportion needs at least one slot");
  if (total < 0) throw ValidationError("apportion total must be >= 0");
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw ValidationError("apportion weights must be finite and >= 0");
    sum += w;
  }
  std::vector<Qty> out(n, 0);
  if (sum == 0) {
    out.back() = total;
    return out;
  }
  std::vector<double> rem(n);
  Qty assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = weights[i] / sum * double(total);
    out[i] = Qty(std::floor(exact));
    rem[i] = exact - double(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rem[a] != rem[b]) return rem[a] > rem[b];
    return a > b;
  });
  for (Qty left = total - assigned, k = 0; left > 0; --left, ++k) ++out[order[std::size_t(k) % n]];
  for (Qty left = total - assigned; left < 0; ++left) {
    // Floating overshoot; take back from the largest slot.
    auto it = std::max_element(out.begin(), out.end());
    --*it;
  }
  return out;
}

namespace {

// Integer targets from base weights, then tilt, then jitter.
std::vector<Qty> shape(const std::vector<double>& base_weights, Qty x, const TiltPolicy& tilt,
                       std::mt19937_64& rng) {
  std::vector<Qty> base = apportion(base_weights, x);
  const std::size_t n = base.size();

  // First bucket after which planned completion reaches the threshold.
  std::optional<std::size_t> trigger;
  Qty cum = 0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += base[k];
    if (double(cum) >= tilt.threshold * double(x)) {
      trigger = k;
      break;
    }
  }
  if (trigger && *trigger + 1 < n && tilt.factor != 1.0) {
    Qty done = 0;
    for (std::size_t k = 0; k <= *trigger; ++k) done += base[k];
    const Qty remaining = x - done;
    std::vector<double> scaled;
    double left = double(remaining);
    for (std::size_t k = *trigger + 1; k < n; ++k) {
      const double s = std::min(tilt.factor * double(base[k]), left);
      scaled.push_back(s);
      left -= s;
    }
    const std::vector<Qty> tail = apportion(scaled, remaining);
    std::copy(tail.begin(), tail.end(), base.begin() + std::ptrdiff_t(*trigger + 1));
  }

  if (tilt.jitter > 0) {
    std::uniform_real_distribution<double> u(-tilt.jitter, tilt.jitter);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = double(base[k]) * (1.0 + u(rng));
    base = apportion(w, x);
  }
  return base;
}

Schedule build(std::vector<std::pair<Tick, Tick>> spans, const std::vector<double>& weights, Qty x,
               const TiltPolicy& tilt) {
  validate(tilt);
  std::mt19937_64 rng(tilt.seed);
  const std::vector<Qty> targets = shape(weights, x, tilt, rng);
  Schedule s;
  std::uniform_real_distribution<double> slip(0.0, tilt.timing_jitter);
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto [a, b] = spans[k];
    Tick release = a;
    if (tilt.timing_jitter > 0) release = a + Tick(std::floor(slip(rng) * double(b - a)));
    s.buckets.push_back({a, b, targets[k], std::min(release, b - 1)});
  }
  return s;
}

} // namespace

Schedule twap_schedule(const ParentOrder& parent, Tick bucket_ticks, const TiltPolicy& tilt) {
  validate(parent);
  if (bucket_ticks <= 0) throw ValidationError("bucket length must be > 0");
  std::vector<std::pair<Tick, Tick>> spans;
  for (Tick a = parent.start; a < parent.end; a += bucket_ticks) spans.emplace_back(a, std::min(a + bucket_ticks, parent.end));
  return build(spans, std::vector<double>(spans.size(), 1.0), parent.quantity, tilt);
}

Schedule vwap_schedule(const ParentOrder& parent, const sim::VolumeProfile& profile, const TiltPolicy& tilt) {
  validate(parent);
  sim::validate(profile);
  std::vector<std::pair<Tick, Tick>> spans;
  std::vector<double> weights;
  for (std::size_t j = 0; j < profile.buckets(); ++j) {
    const Tick lo = profile.boundaries[j], hi = profile.boundaries[j + 1];
    const Tick a = std::max(lo, parent.start), b = std::min(hi, parent.end);
    if (a >= b) continue;
    spans.emplace_back(a, b);
    weights.push_back(profile.fractions[j] * double(b - a) / double(hi - lo));
  }
  if (spans.empty()) throw ValidationError("parent horizon does not overlap the volume profile");
  return build(spans, weights, parent.quantity, tilt);
}

Qty pov_child_size(Qty other_volume, double pr) {
  if (!(pr >= 0 && pr < 1)) throw ValidationError("participation rate must lie in [0, 1)");
  if (other_volume < 0) throw ValidationError("other volume must be >= 0");
  return std::llround(pr / (1.0 - pr) * double(other_volume));
}

Rational pov_child_rational(Qty other_volume, std::int64_t pr_num, std::int64_t pr_den) {
  if (pr_den <= 0 || pr_num < 0 || pr_num >= pr_den) throw ValidationError("participation rate must lie in [0, 1)");
  if (other_volume < 0) throw ValidationError("other volume must be >= 0");
  return {__int128(pr_num) * other_volume, __int128(pr_den - pr_num)};
}

double pov_adaptive_rate(double base_pr, double price, double benchmark, double sensitivity, Side side,
                         double pr_max) {
  if (!(benchmark > 0)) throw ValidationError("benchmark price must be > 0");
  const double deviation = sign(side) * (price - benchmark) / benchmark;
  return std::clamp(base_pr * (1.0 - sensitivity * deviation), 0.0, pr_max);
}

namespace {

class Runner {
public:
  Runner(const AlgoSpec& spec, const ParentOrder& parent, sim::Simulator& sim)
      : spec_(spec), parent_(parent), sim_(sim) {}

  ExecutionTrace run() {
    validate(spec_);
    validate(parent_);
    if (sim_.clock() > parent_.start) throw ValidationError("parent starts before the simulator clock");
    if (sim_.clock() < parent_.start) sim_.advance(parent_.start - sim_.clock());
    trace_.arrival_mid = sim_.consolidated_mid();
    trace_.arrival_price = std::llround(trace_.arrival_mid);

    if (spec_.type == AlgoType::twap || spec_.type == AlgoType::vwap)
      run_schedule();
    else
      run_pov();

    Tick drain = 0;
    for (const auto& v : sim_.venues()) drain = std::max(drain, v.latency);
    if (inflight_total() > 0 && drain > 0) step_to(sim_.clock() + drain);
    trace_.final_mid = sim_.consolidated_mid();
    trace_.final_price = std::llround(trace_.final_mid);
    trace_.unfilled = parent_.quantity - trace_.filled;
    return std::move(trace_);
  }

private:
  Qty inflight_total() const {
    Qty s = 0;
    for (const auto& [id, q] : inflight_) s += q;
    return s;
  }

  std::size_t window_of(Tick t) const {
    if (windows_.empty()) return 0;
    auto it = std::upper_bound(windows_.begin(), windows_.end(), t);
    const std::size_t k = it == windows_.begin() ? 0 : std::size_t(it - windows_.begin()) - 1;
    return std::min(k, trace_.realized.size() - 1);
  }

  void absorb(const std::vector<sim::SimEvent>& events) {
    for (const sim::SimEvent& se : events) {
      const BookEvent& e = se.event;
      if (e.type == EventType::fill) {
        const bool mine_taker = own_.count(e.id) > 0;
        const bool mine_maker = own_.count(e.maker) > 0;
        if (mine_taker || mine_maker) {
          const OrderId child = mine_taker ? e.id : e.maker;
          const sim::Role role = mine_taker ? sim::Role::taker : sim::Role::maker;
          Fill f;
          f.quantity = e.qty;
          f.price = *e.price;
          const double fee = sim::settle_fees(sim_.venues()[se.venue], f, role);
          trace_.fills.push_back({child, se.venue, *e.price, e.qty, e.clock, role, fee});
          trace_.filled += e.qty;
          if (!trace_.realized.empty()) trace_.realized[window_of(e.clock)] += e.qty;
          settle(child, e.qty);
        } else if (!sim::is_agent(e.id) && !sim::is_agent(e.maker) && e.clock < parent_.end) {
          if (spec_.volume_side == VolumeSide::both || e.side == parent_.side) trace_.other_volume += e.qty;
        }
      } else if ((e.type == EventType::cancel || e.type == EventType::reject || e.type == EventType::expire) &&
                 own_.count(e.id)) {
        settle(e.id, e.qty);
      }
    }
  }

  void settle(OrderId child, Qty qty) {
    auto it = inflight_.find(child);
    if (it == inflight_.end()) return;
    it->second -= std::min(qty, it->second);
    if (it->second == 0) inflight_.erase(it);
  }

  void step_to(Tick t) {
    if (t > sim_.clock()) absorb(sim_.advance(t - sim_.clock()));
  }

  std::optional<Price> cap() const {
    std::optional<Price> c = parent_.limit;
    if (spec_.price_limit) {
      if (!c)
        c = spec_.price_limit;
      else
        c = parent_.side == Side::buy ? std::min(*c, *spec_.price_limit) : std::max(*c, *spec_.price_limit);
    }
    return c;
  }

  VenueIndex pick_venue() const {
    const auto& venues = sim_.venues();
    if (venues.size() == 1) return 0;
    std::vector<tactics::VenueQuoteInput> inputs;
    for (const auto& v : venues)
      inputs.push_back({v.venue_id, sim_.book(v.venue_id).snapshot(1), v.taker_fee, v.latency, 1.0});
    return tactics::route(tactics::aggregate(inputs), parent_.side, spec_.route, inputs);
  }

  // Sends marketable IOC children for `need` shares now. False when the
  // opposite side is empty and nothing could be sent.
  bool send(Qty need) {
    need = std::min(need, parent_.quantity - trace_.filled - inflight_total());
    while (need > 0) {
      const VenueIndex v = pick_venue();
      const auto opp = sim_.book(v).best_price(opposite(parent_.side), Visibility::public_view);
      if (!opp) return false;
      Price price = *opp + sign(parent_.side) * spec_.cross_ticks;
      if (auto c = cap()) {
        if (better_price(parent_.side, *opp, *c)) return true;  // market already through the limit
        price = parent_.side == Side::buy ? std::min(price, *c) : std::max(price, *c);
      }
      const Qty q = spec_.max_child > 0 ? std::min(need, spec_.max_child) : need;
      Order o = Order::limit(sim_.next_agent_id(), parent_.side, price, q, TimeInForce::ioc);
      own_.insert(o.id);
      inflight_[o.id] = q;
      o.venue = v;
      trace_.children.push_back(o);
      sim_.dispatch(v, o);
      need -= q;
    }
    return true;
  }

  void run_schedule() {
    const Schedule s = spec_.type == AlgoType::twap
                           ? twap_schedule(parent_, spec_.bucket_ticks, spec_.tilt)
                           : vwap_schedule(parent_, sim_.profile(), spec_.tilt);
    for (const auto& b : s.buckets) {
      windows_.push_back(b.start);
      trace_.planned.push_back(b.target);
    }
    trace_.realized.assign(s.buckets.size(), 0);
    Qty cum_target = 0;
    for (const auto& b : s.buckets) {
      step_to(b.release);
      cum_target += b.target;
      // An empty opposite side is retried tick by tick until the bucket closes.
      while (!send(cum_target - trace_.filled - inflight_total()) && sim_.clock() + 1 < b.end) step_to(sim_.clock() + 1);
    }
    step_to(parent_.end);
  }

  void run_pov() {
    for (Tick a = parent_.start; a < parent_.end; a += spec_.bucket_ticks) windows_.push_back(a);
    trace_.realized.assign(windows_.size(), 0);
    trace_.planned.assign(windows_.size(), 0);
    double target = 0;
    Qty seen = 0;
    // Decide at every window boundary, plus once on the last tick so the
    // final window's volume is answered before the parent ends.
    std::vector<Tick> decisions(windows_.begin() + 1, windows_.end());
    if (parent_.end - 1 > windows_.back()) decisions.push_back(parent_.end - 1);
    for (std::size_t k = 0; k < decisions.size(); ++k) {
      step_to(decisions[k]);
      const Qty window_other = trace_.other_volume - seen;
      seen = trace_.other_volume;
      Qty goal;
      if (spec_.type == AlgoType::pov) {
        goal = pov_child_size(trace_.other_volume, spec_.pr);
      } else {
        const double pr = pov_adaptive_rate(spec_.pr, sim_.consolidated_mid(), trace_.arrival_mid, spec_.sensitivity,
                                            parent_.side, spec_.pr_max);
        target += pr / (1.0 - pr) * double(window_other);
        goal = std::llround(target);
      }
      const Qty need = std::max<Qty>(0, goal - trace_.filled - inflight_total());
      trace_.planned[std::min(k + 1, windows_.size() - 1)] += need;
      send(need);
    }
    step_to(parent_.end);
  }

  const AlgoSpec& spec_;
  const ParentOrder& parent_;
  sim::Simulator& sim_;
  ExecutionTrace trace_;
  std::vector<Tick> windows_;
  std::unordered_map<OrderId, Qty> inflight_;
  std::unordered_set<OrderId> own_;
};

} // namespace

ExecutionTrace run_algorithm(const AlgoSpec& spec, const ParentOrder& parent, sim::Simulator& sim) {
  return Runner(spec, parent, sim).run();
}

} // namespace execlab::algo
