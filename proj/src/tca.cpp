#include "execlab/tca.hpp"

#include <algorithm>
#include <stdexcept>

namespace execlab::tca {

void validate(std::span<const Trade> tape) {
  if (tape.empty()) throw std::invalid_argument("empty trade tape");
  for (std::size_t i = 0; i < tape.size(); ++i) {
    if (!(tape[i].size > 0)) throw std::invalid_argument("trade size must be positive");
    if (i > 0 && tape[i].time < tape[i - 1].time) throw std::invalid_argument("trade times must be non-decreasing");
  }
}

double vwap(std::span<const Trade> tape) {
  validate(tape);
  double value = 0, volume = 0;
  for (const Trade& t : tape) {
    value += t.price * t.size;
    volume += t.size;
  }
  return value / volume;
}

double twap(std::span<const Trade> tape) {
  validate(tape);
  double sum = 0;
  for (const Trade& t : tape) sum += t.price;
  return sum / static_cast<double>(tape.size());
}

double ohlc(double open, double high, double low, double close) { return (open + high + low + close) / 4.0; }

double vwap_by_periods(std::span<const Trade> tape, std::span<const Tick> period_ends) {
  validate(tape);
  if (period_ends.empty()) throw std::invalid_argument("no periods");
  std::vector<double> value(period_ends.size()), volume(period_ends.size());
  double total = 0;
  for (const Trade& t : tape) {
    auto it = std::upper_bound(period_ends.begin(), period_ends.end(), t.time);
    std::size_t j = std::min<std::size_t>(it - period_ends.begin(), period_ends.size() - 1);
    value[j] += t.price * t.size;
    volume[j] += t.size;
    total += t.size;
  }
  double out = 0;
  for (std::size_t j = 0; j < value.size(); ++j) {
    if (volume[j] == 0) continue;
    out += (volume[j] / total) * (value[j] / volume[j]);
  }
  return out;
}

double rpm(std::span<const Trade> tape, double exec_price, Side side, RpmBasis basis) {
  validate(tape);
  double worse = 0, all = 0;
  for (const Trade& t : tape) {
    const double w = basis == RpmBasis::volume ? t.size : 1.0;
    all += w;
    const bool less_favorable = side == Side::buy ? t.price > exec_price : t.price < exec_price;
    if (less_favorable) worse += w;
  }
  return worse / all;
}

namespace {

struct Sums {
  Qty executed = 0;
  std::int64_t value = 0;  // sum x_j p_j in tick-shares
};

Sums sums(const TCAInputs& in) {
  Sums s;
  for (const Fill& f : in.fills) {
    if (f.qty <= 0) throw std::invalid_argument("fill quantity must be positive");
    s.executed += f.qty;
    s.value += f.qty * f.price;
  }
  if (s.executed > in.intended) throw std::invalid_argument("fills exceed intended size");
  return s;
}

} // namespace

ISReport shortfall(const TCAInputs& in) {
  const Sums s = sums(in);
  const std::int64_t sg = sign(in.side);
  ISReport r;
  r.executed = s.executed;
  r.unexecuted = in.intended - s.executed;
  r.execution = sg * (s.value - s.executed * in.decision);
  r.opportunity = sg * r.unexecuted * (in.final_price - in.decision);
  r.fixed = in.fixed;
  r.total = r.execution + r.opportunity + r.fixed;
  return r;
}

ISReport expanded_tc(const TCAInputs& in) {
  if (!in.arrival) throw std::invalid_argument("expanded decomposition needs an arrival price");
  ISReport r = shortfall(in);
  const Sums s = sums(in);
  const std::int64_t sg = sign(in.side);
  r.delay = sg * s.executed * (*in.arrival - in.decision);
  r.trade_related = sg * (s.value - s.executed * *in.arrival);
  r.total = r.delay + r.trade_related + r.opportunity + r.fixed;
  return r;
}

PaperVsReal paper_vs_real(const TCAInputs& in) {
  const Sums s = sums(in);
  const std::int64_t sg = sign(in.side);
  PaperVsReal out;
  out.paper = sg * in.intended * (in.final_price - in.decision);
  out.real = sg * (s.executed * in.final_price - s.value) - in.fixed;
  out.shortfall = out.paper - out.real;
  return out;
}

TCAInputs reflect(const TCAInputs& in) {
  TCAInputs out = in;
  auto mirror = [&](Price p) { return 2 * in.decision - p; };
  if (out.arrival) out.arrival = mirror(*out.arrival);
  out.final_price = mirror(out.final_price);
  for (Fill& f : out.fills) f.price = mirror(f.price);
  return out;
}

} // namespace execlab::tca
