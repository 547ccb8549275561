#include <gtest/gtest.h>

#include <random>

#include "execlab/tca.hpp"

using namespace execlab;
using namespace execlab::tca;

namespace {

// Cents as ticks; tick-share results are cents.
TCAInputs eq9_fixture() {
  TCAInputs in;
  in.side = Side::buy;
  in.intended = 1000;
  in.decision = 5000;
  in.final_price = 5100;
  in.fills = {{600, 5050, 1}};
  return in;
}

TCAInputs random_inputs(std::mt19937_64& rng) {
  std::uniform_int_distribution<Price> price(4000, 6000);
  std::uniform_int_distribution<Qty> size(1, 500);
  std::uniform_int_distribution<int> nfills(0, 12);
  TCAInputs in;
  in.side = rng() % 2 ? Side::buy : Side::sell;
  in.decision = price(rng);
  in.arrival = price(rng);
  in.final_price = price(rng);
  in.fixed = static_cast<std::int64_t>(rng() % 1000);
  const int n = nfills(rng);
  Qty total = 0;
  for (int i = 0; i < n; ++i) {
    in.fills.push_back({size(rng), price(rng), i});
    total += in.fills.back().qty;
  }
  in.intended = total + static_cast<Qty>(rng() % 3 == 0 ? 0 : rng() % 2000);
  return in;
}

} // namespace

TEST(Tca, Vwap) {
  EXPECT_EQ(vwap(TradeTape{{50, 100, 0}}), 50);
  EXPECT_EQ(vwap(TradeTape{{50, 100, 0}, {52, 100, 1}}), 51);
  EXPECT_EQ(vwap(TradeTape{{50, 300, 0}, {54, 100, 1}}), 51);
  EXPECT_THROW(vwap(TradeTape{}), std::invalid_argument);
  EXPECT_THROW(vwap(TradeTape{{50, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(vwap(TradeTape{{50, 1, 5}, {50, 1, 4}}), std::invalid_argument);
}

TEST(Tca, VwapPeriodFormAgrees) {
  TradeTape tape{{50, 100, 0}, {51, 300, 5}, {49, 200, 11}, {52, 50, 14}, {50.5, 250, 25}, {51.5, 100, 29}};
  const std::vector<Tick> ends{10, 20, 30};
  EXPECT_NEAR(vwap_by_periods(tape, ends), vwap(tape), 1e-12);
}

TEST(Tca, Twap) {
  EXPECT_EQ(twap(TradeTape{{50, 100, 0}}), 50);
  EXPECT_EQ(twap(TradeTape{{50, 100, 0}, {54, 1, 1}}), 52);
  TradeTape equal{{50, 10, 0}, {53, 10, 1}, {48, 10, 2}};
  EXPECT_DOUBLE_EQ(twap(equal), vwap(equal));
}

TEST(Tca, Ohlc) {
  EXPECT_EQ(ohlc(50, 50, 50, 50), 50);
  EXPECT_EQ(ohlc(50, 54, 48, 52), 51);
  EXPECT_EQ(ohlc(50, 100, 50, 50), 62.5);
}

TEST(Tca, BenchmarkBounds) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(40, 60), v(1, 1000);
  for (int k = 0; k < 500; ++k) {
    TradeTape tape;
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 1 + k % 20; ++i) {
      tape.push_back({p(rng), v(rng), i});
      lo = std::min(lo, tape.back().price);
      hi = std::max(hi, tape.back().price);
    }
    EXPECT_GE(vwap(tape), lo - 1e-12);
    EXPECT_LE(vwap(tape), hi + 1e-12);
    EXPECT_GE(twap(tape), lo - 1e-12);
    EXPECT_LE(twap(tape), hi + 1e-12);
  }
}

TEST(Tca, RpmAgainstBruteForce) {
  TradeTape tape;
  for (int i = 0; i < 10; ++i) tape.push_back({50.0 + i * 0.1, 100.0 + 10 * i, i});
  // buy at the tape minimum: every other print is less favorable
  const double worse_vol = [&] {
    double s = 0;
    for (int i = 1; i < 10; ++i) s += 100.0 + 10 * i;
    return s;
  }();
  const double all_vol = worse_vol + 100;
  EXPECT_DOUBLE_EQ(rpm(tape, 50.0, Side::buy, RpmBasis::volume), worse_vol / all_vol);
  EXPECT_DOUBLE_EQ(rpm(tape, 50.0, Side::buy, RpmBasis::trades), 0.9);
  EXPECT_DOUBLE_EQ(rpm(tape, 50.95, Side::sell, RpmBasis::trades), 1.0);
  EXPECT_EQ(rpm(tape, 99, Side::buy, RpmBasis::volume), 0.0);
  TradeTape flat{{50, 10, 0}, {50, 20, 1}};
  EXPECT_EQ(rpm(flat, 50, Side::buy, RpmBasis::volume), 0.0);
  EXPECT_EQ(rpm(flat, 50, Side::sell, RpmBasis::trades), 0.0);
}

TEST(Tca, RpmRangeAndUnitTapes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p(40, 60);
  for (int k = 0; k < 300; ++k) {
    TradeTape tape;
    for (int i = 0; i < 15; ++i) tape.push_back({std::round(p(rng)), 1.0, i});
    const double exec = std::round(p(rng));
    for (Side s : {Side::buy, Side::sell}) {
      const double v = rpm(tape, exec, s, RpmBasis::volume);
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 1);
      EXPECT_EQ(v, rpm(tape, exec, s, RpmBasis::trades));
    }
  }
}

TEST(Tca, ShortfallWorkedFixture) {
  auto r = shortfall(eq9_fixture());
  EXPECT_EQ(r.execution, 30000);
  EXPECT_EQ(r.opportunity, 40000);
  EXPECT_EQ(r.total, 70000);
  EXPECT_EQ(r.unexecuted, 400);
}

TEST(Tca, ShortfallLimits) {
  TCAInputs in;
  in.intended = 500;
  in.decision = 5000;
  in.final_price = 5200;
  in.fills = {{500, 5000, 0}};
  EXPECT_EQ(shortfall(in).total, 0);
  in.fixed = 1234;
  EXPECT_EQ(shortfall(in).total, 1234);
  auto part = eq9_fixture();
  part.final_price = part.decision;
  EXPECT_EQ(shortfall(part).opportunity, 0);
  part.fills.push_back({500, 5000, 2});
  EXPECT_THROW(shortfall(part), std::invalid_argument);
}

TEST(Tca, ShortfallFullExecutionForm) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 1000; ++k) {
    auto in = random_inputs(rng);
    Qty total = 0;
    std::int64_t value = 0;
    for (auto& f : in.fills) {
      total += f.qty;
      value += f.qty * f.price;
    }
    in.intended = total;
    const std::int64_t sg = in.side == Side::buy ? 1 : -1;
    // fully executed: sum x_j p_j - X P_d + fixed
    EXPECT_EQ(shortfall(in).total, sg * (value - total * in.decision) + in.fixed);
    EXPECT_EQ(shortfall(in).opportunity, 0);
  }
}

TEST(Tca, ExpandedWorkedFixture) {
  auto in = eq9_fixture();
  in.arrival = 5020;
  auto r = expanded_tc(in);
  EXPECT_EQ(r.delay, 12000);
  EXPECT_EQ(r.trade_related, 18000);
  EXPECT_EQ(r.opportunity, 40000);
  EXPECT_EQ(r.total, 70000);
  EXPECT_THROW(expanded_tc(eq9_fixture()), std::invalid_argument);
}

TEST(Tca, ExpandedLimits) {
  auto in = eq9_fixture();
  in.arrival = in.decision;
  auto r = expanded_tc(in);
  EXPECT_EQ(r.delay, 0);
  EXPECT_EQ(r.trade_related, r.execution);
  in.arrival = 5050;
  r = expanded_tc(in);
  EXPECT_EQ(r.trade_related, 0);
  EXPECT_EQ(r.total, r.delay + r.opportunity);
}

TEST(Tca, DecompositionIdentityRandom) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 1000; ++k) {
    const auto in = random_inputs(rng);
    const auto is = shortfall(in);
    const auto ex = expanded_tc(in);
    EXPECT_EQ(ex.delay + ex.trade_related, is.execution);
    EXPECT_EQ(ex.delay + ex.trade_related + ex.opportunity + ex.fixed, is.total);
    EXPECT_EQ(ex.total, is.total);
  }
}

TEST(Tca, SideAntisymmetry) {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 1000; ++k) {
    auto in = random_inputs(rng);
    in.fixed = 0;
    const auto base = expanded_tc(in);
    auto flipped = in;
    flipped.side = opposite(in.side);
    const auto f = expanded_tc(flipped);
    EXPECT_EQ(f.execution, -base.execution);
    EXPECT_EQ(f.opportunity, -base.opportunity);
    EXPECT_EQ(f.delay, -base.delay);
    EXPECT_EQ(f.trade_related, -base.trade_related);
    EXPECT_EQ(f.total, -base.total);
    const auto mirrored = expanded_tc(reflect(in));
    EXPECT_EQ(mirrored.total, -base.total);
    EXPECT_EQ(mirrored.delay, -base.delay);
    // both flips together leave every component unchanged
    EXPECT_EQ(expanded_tc(reflect(flipped)), base);
  }
}

TEST(Tca, PaperVersusReal) {
  TCAInputs in;
  in.intended = 800;
  in.decision = 5000;
  in.final_price = 5300;
  in.fills = {{800, 5000, 0}};
  auto pr = paper_vs_real(in);
  EXPECT_EQ(pr.paper, pr.real);
  EXPECT_EQ(pr.shortfall, 0);
  auto full = eq9_fixture();
  full.fills = {{1000, 5050, 0}};
  pr = paper_vs_real(full);
  EXPECT_EQ(pr.shortfall, 50000);
  EXPECT_EQ(shortfall(full).total, 50000);
  in.fixed = 700;
  EXPECT_EQ(paper_vs_real(in).shortfall, 700);
}

TEST(Tca, PaperVersusRealMatchesShortfallRandom) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 1000; ++k) {
    const auto in = random_inputs(rng);
    EXPECT_EQ(paper_vs_real(in).shortfall, shortfall(in).total);
  }
}
