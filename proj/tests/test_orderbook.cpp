#include <gtest/gtest.h>

#include "execlab/orderbook.hpp"

using namespace execlab;

namespace {

Order limit(OrderId id, Side side, Price px, Qty qty, TimeInForce tif = TimeInForce::gtc) {
  return Order::limit(id, side, px, qty, tif);
}

Order iceberg(OrderId id, Side side, Price px, Qty qty, Qty peak) {
  Order o = Order::limit(id, side, px, qty);
  o.display_quantity = peak;
  return o;
}

struct BookFixture : ::testing::Test {
  OrderBook book;
  std::vector<BookEvent> events;
  void SetUp() override { book.set_event_sink(&events); }
  SubmitResult at(Tick t, Order o) {
    book.expire(t);
    return book.submit(o);
  }
};

// Ids 1-99 resting liquidity, 100+ aggressors.
constexpr OrderId S1 = 1, S2 = 2, S3 = 3, S4 = 4, B1 = 11, B2 = 12, B3 = 13, B4 = 14;

} // namespace

TEST_F(BookFixture, MarketBuyWalksLevelsInPriceThenTimeOrder) {
  // Sell side of the 2,200-share slicing example.
  at(10, limit(S1, Side::sell, 51, 1000));
  at(20, limit(S3, Side::sell, 52, 2500));
  at(30, limit(S2, Side::sell, 51, 800));
  auto r = at(40, Order::market(100, Side::buy, 2200));

  ASSERT_EQ(r.fills.size(), 3u);
  EXPECT_EQ(r.fills[0].maker_order_id, S1);
  EXPECT_EQ(r.fills[0].price, 51);
  EXPECT_EQ(r.fills[0].quantity, 1000);
  EXPECT_EQ(r.fills[1].maker_order_id, S2);
  EXPECT_EQ(r.fills[1].quantity, 800);
  EXPECT_EQ(r.fills[2].maker_order_id, S3);
  EXPECT_EQ(r.fills[2].price, 52);
  EXPECT_EQ(r.fills[2].quantity, 400);
  EXPECT_EQ(r.disposition, Disposition::filled);

  auto view = book.snapshot(0, Visibility::omniscient);
  ASSERT_EQ(view.asks.size(), 1u);
  EXPECT_EQ(view.asks[0].price, 52);
  EXPECT_EQ(view.asks[0].entries[0].qty, 2100);
  EXPECT_EQ(book.last_trade(), 52);
}

TEST_F(BookFixture, NativeIcebergReserveCompletesMarketOrderAtOnePrice) {
  at(10, iceberg(S1, Side::sell, 51, 10000, 1000));
  at(20, limit(S3, Side::sell, 52, 2500));
  at(30, limit(S2, Side::sell, 51, 800));
  auto r = at(40, Order::market(100, Side::buy, 2200));

  ASSERT_EQ(r.fills.size(), 3u);
  for (const Fill& f : r.fills) EXPECT_EQ(f.price, 51);
  EXPECT_EQ(r.fills[0].maker_order_id, S1);
  EXPECT_EQ(r.fills[1].maker_order_id, S2);
  EXPECT_EQ(r.fills[2].maker_order_id, S1);
  EXPECT_EQ(r.fills[2].quantity, 400);

  auto view = book.snapshot(0, Visibility::omniscient);
  ASSERT_EQ(view.asks.size(), 2u);
  const LevelView& l51 = view.asks[0];
  EXPECT_EQ(l51.visible_qty, 600);
  EXPECT_EQ(l51.hidden_qty, 8000);
  EXPECT_EQ(l51.entries[0].timestamp, 40);  // refreshed slice
  EXPECT_EQ(view.asks[1].visible_qty, 2500);
}

TEST_F(BookFixture, NonCrossingLimitRests) {
  at(1, limit(S1, Side::sell, 51, 1000));
  auto r = at(2, limit(100, Side::buy, 49, 100));
  EXPECT_TRUE(r.fills.empty());
  EXPECT_EQ(r.disposition, Disposition::resting);
  EXPECT_EQ(book.best_bid(), 49);
  EXPECT_EQ(book.best_ask(), 51);
}

TEST_F(BookFixture, FillOrKillShortByOneLeavesBookUntouched) {
  at(1, limit(S1, Side::sell, 51, 2000));
  at(2, iceberg(S2, Side::sell, 52, 2999, 0));  // hidden counts toward feasibility
  const BookView before = book.snapshot(0, Visibility::omniscient);

  Order fok = limit(100, Side::buy, 52, 5000);
  fok.tif = TimeInForce::fok;
  auto r = at(3, fok);
  EXPECT_EQ(r.disposition, Disposition::cancelled);
  EXPECT_TRUE(r.fills.empty());
  EXPECT_EQ(r.cancelled, 5000);
  EXPECT_EQ(book.snapshot(0, Visibility::omniscient), before);

  Order fits = limit(101, Side::buy, 52, 4999);
  fits.tif = TimeInForce::fok;
  auto ok = at(4, fits);
  EXPECT_EQ(ok.disposition, Disposition::filled);
  EXPECT_EQ(ok.fills.back().maker_was_hidden, true);
}

TEST_F(BookFixture, HiddenBuyRestsLatentAndIsFoundByIocPing) {
  at(1, limit(S1, Side::sell, 51, 1000));
  at(2, limit(S2, Side::sell, 52, 1500));
  at(3, limit(B1, Side::buy, 50, 2000));

  Order hidden = limit(100, Side::buy, 51, 2000);
  hidden.display_quantity = 0;
  auto r = at(10, hidden);
  ASSERT_EQ(r.fills.size(), 1u);
  EXPECT_EQ(r.fills[0].quantity, 1000);
  EXPECT_EQ(r.disposition, Disposition::partial_resting);
  EXPECT_EQ(r.resting, 1000);
  // Public book shows nothing at 51.
  EXPECT_EQ(book.best_bid(), 50);
  EXPECT_EQ(book.best_ask(), 52);

  Order ping = limit(101, Side::sell, 51, 1000, TimeInForce::ioc);
  auto p = at(11, ping);
  ASSERT_EQ(p.fills.size(), 1u);
  EXPECT_EQ(p.fills[0].maker_order_id, 100u);
  EXPECT_TRUE(p.fills[0].maker_was_hidden);
  EXPECT_EQ(p.fills[0].quantity, 1000);
  EXPECT_FALSE(book.contains(100));
}

TEST_F(BookFixture, VisibleBeforeHiddenAtSamePrice) {
  Order h = limit(S1, Side::sell, 51, 500);
  h.display_quantity = 0;
  at(1, h);
  at(2, limit(S2, Side::sell, 51, 300));
  auto r = at(3, Order::market(100, Side::buy, 600));
  ASSERT_EQ(r.fills.size(), 2u);
  EXPECT_EQ(r.fills[0].maker_order_id, S2);
  EXPECT_FALSE(r.fills[0].maker_was_hidden);
  EXPECT_EQ(r.fills[1].maker_order_id, S1);
  EXPECT_TRUE(r.fills[1].maker_was_hidden);
}

TEST_F(BookFixture, IcebergRefillLosesTimePriority) {
  at(1, iceberg(S1, Side::sell, 51, 500, 100));
  at(2, limit(S2, Side::sell, 51, 50));
  at(3, Order::market(100, Side::buy, 100));  // exhausts S1's peak
  auto view = book.snapshot(0, Visibility::omniscient);
  ASSERT_EQ(view.asks[0].entries.size(), 3u);
  EXPECT_EQ(view.asks[0].entries[0].id, S2);
  EXPECT_EQ(view.asks[0].entries[1].id, S1);
  EXPECT_EQ(view.asks[0].entries[1].qty, 100);
  EXPECT_GT(view.asks[0].entries[1].seq, view.asks[0].entries[0].seq);
  EXPECT_TRUE(view.asks[0].entries[2].hidden);
  EXPECT_EQ(view.asks[0].entries[2].qty, 300);
}

TEST_F(BookFixture, CancelReturnsRemainingQuantity) {
  at(1, limit(S1, Side::sell, 51, 500));
  EXPECT_EQ(book.cancel(S1), 500);
  at(2, limit(S2, Side::sell, 51, 500));
  at(3, Order::market(100, Side::buy, 300));
  EXPECT_EQ(book.cancel(S2), 200);
  EXPECT_THROW(book.cancel(999), std::out_of_range);
  EXPECT_TRUE(book.snapshot(0, Visibility::omniscient).asks.empty());
}

TEST_F(BookFixture, StopSellFiresWhenPriceFallsThroughThreshold) {
  // Tick size 0.1: a long from 10.0, protected by a stop at 11.0 after the rise.
  at(1, limit(B1, Side::buy, 105, 1000));
  at(1, limit(B2, Side::buy, 109, 100));
  at(1, limit(S1, Side::sell, 110, 100));
  at(2, Order::market(100, Side::buy, 100));  // prints 11.0
  ASSERT_EQ(book.last_trade(), 110);

  Order stop;
  stop.id = 200;
  stop.side = Side::sell;
  stop.kind = OrderKind::stop;
  stop.stop_price = 110;
  stop.quantity = 300;
  stop.display_quantity = 300;
  auto placed = at(3, stop);
  EXPECT_EQ(placed.disposition, Disposition::resting);

  auto r = at(4, Order::market(101, Side::sell, 50));  // prints 10.9
  ASSERT_EQ(r.fills.size(), 1u);
  EXPECT_EQ(r.fills[0].price, 109);
  // Stop fired as a market sell: 50 left at 10.9, then 250 at 10.5.
  ASSERT_EQ(r.side_effects.size(), 2u);
  EXPECT_EQ(r.side_effects[0].taker_order_id, 200u);
  EXPECT_EQ(r.side_effects[0].price, 109);
  EXPECT_EQ(r.side_effects[1].price, 105);
  EXPECT_EQ(r.side_effects[1].quantity, 250);
  EXPECT_FALSE(book.contains(200));
}

TEST_F(BookFixture, StopThresholdIsInclusive) {
  at(1, limit(S1, Side::sell, 110, 100));
  at(1, limit(S2, Side::sell, 111, 500));
  at(1, limit(B1, Side::buy, 100, 500));
  at(2, Order::market(100, Side::buy, 50));  // last trade 110
  Order stop;
  stop.id = 200;
  stop.side = Side::buy;
  stop.kind = OrderKind::stop;
  stop.stop_price = 110;
  stop.quantity = 10;
  stop.display_quantity = 10;
  at(3, stop);
  auto r = at(4, Order::market(101, Side::buy, 10));  // prints exactly 110
  ASSERT_EQ(r.side_effects.size(), 1u);
  EXPECT_EQ(r.side_effects[0].taker_order_id, 200u);
}

TEST_F(BookFixture, StopUntouchedWhenNoTradeReachesIt) {
  at(1, limit(S1, Side::sell, 110, 100));
  at(1, limit(B1, Side::buy, 100, 500));
  at(2, Order::market(100, Side::buy, 10));
  Order stop;
  stop.id = 200;
  stop.side = Side::buy;
  stop.kind = OrderKind::stop;
  stop.stop_price = 120;
  stop.quantity = 10;
  stop.display_quantity = 10;
  at(3, stop);
  at(4, Order::market(101, Side::buy, 10));
  auto view = book.snapshot(0, Visibility::omniscient);
  ASSERT_EQ(view.stops.size(), 1u);
  EXPECT_TRUE(book.trigger_stops(119).empty());
  auto fired = book.trigger_stops(120);
  ASSERT_EQ(fired.size(), 1u);
  EXPECT_EQ(fired[0].kind, OrderKind::market);
}

TEST_F(BookFixture, StopOnWrongSideOfLastTradeIsRejected) {
  at(1, limit(S1, Side::sell, 110, 100));
  at(2, Order::market(100, Side::buy, 10));
  Order stop;
  stop.id = 200;
  stop.side = Side::buy;
  stop.kind = OrderKind::stop;
  stop.stop_price = 105;
  stop.quantity = 10;
  stop.display_quantity = 10;
  EXPECT_EQ(at(3, stop).disposition, Disposition::rejected);
}

TEST_F(BookFixture, SnapshotHidesReserveInPublicView) {
  // Iceberg H1 shows a 2,000 peak over an 18,000 reserve.
  at(10, iceberg(S1, Side::sell, 51, 20000, 2000));
  at(20, limit(S2, Side::sell, 51, 2000));
  at(30, limit(S3, Side::sell, 52, 2500));

  auto pub = book.snapshot();
  ASSERT_EQ(pub.asks.size(), 2u);
  EXPECT_EQ(pub.asks[0].visible_qty, 4000);
  EXPECT_EQ(pub.asks[0].hidden_qty, 0);
  EXPECT_EQ(pub.asks[0].entries.size(), 2u);
  EXPECT_EQ(pub.asks[1].price, 52);

  auto all = book.snapshot(0, Visibility::omniscient);
  ASSERT_EQ(all.asks[0].entries.size(), 3u);
  EXPECT_TRUE(all.asks[0].entries[2].hidden);
  EXPECT_EQ(all.asks[0].entries[2].qty, 18000);
  EXPECT_EQ(all.asks[0].entries[2].id, S1);

  OrderBook empty;
  auto v = empty.snapshot(5, Visibility::omniscient);
  EXPECT_TRUE(v.bids.empty());
  EXPECT_TRUE(v.asks.empty());
}

TEST_F(BookFixture, SnapshotDepthLimitsLevels) {
  for (int i = 0; i < 5; ++i) at(1, limit(S1 + i, Side::sell, 51 + i, 10));
  EXPECT_EQ(book.snapshot(2).asks.size(), 2u);
  EXPECT_EQ(book.snapshot(0).asks.size(), 5u);
}

TEST_F(BookFixture, ExpireDropsGtdAndDayButKeepsGtc) {
  Order gtd = limit(S1, Side::sell, 51, 100);
  gtd.tif = TimeInForce::gtd;
  gtd.tif_time = book.config().session_close;
  Order day = limit(S2, Side::sell, 52, 100);
  day.tif = TimeInForce::day;
  at(1, gtd);
  at(1, day);
  at(1, limit(S3, Side::sell, 53, 100));
  auto early = book.expire(100);
  EXPECT_TRUE(early.expired.empty());
  auto close = book.expire(book.config().session_close);
  EXPECT_EQ(close.expired, (std::vector<OrderId>{S1, S2}));
  EXPECT_TRUE(book.contains(S3));
  EXPECT_FALSE(book.contains(S1));
}

TEST_F(BookFixture, GoodAfterTimeActivatesAndCrosses) {
  at(1, limit(S1, Side::sell, 51, 100));
  Order gat = limit(100, Side::buy, 51, 60);
  gat.tif = TimeInForce::gat;
  gat.tif_time = 100;
  auto r = at(5, gat);
  EXPECT_EQ(r.disposition, Disposition::resting);
  EXPECT_TRUE(r.fills.empty());
  EXPECT_TRUE(book.expire(99).activated.empty());
  auto act = book.expire(100);
  EXPECT_EQ(act.activated, (std::vector<OrderId>{100}));
  ASSERT_EQ(act.fills.size(), 1u);
  EXPECT_EQ(act.fills[0].quantity, 60);
  EXPECT_EQ(act.fills[0].time, 100);
}

TEST_F(BookFixture, AllOrNoneWaitsForFullSizeThenEntryOrderWins) {
  at(1, limit(S1, Side::sell, 51, 300));
  Order a = limit(100, Side::buy, 51, 500);
  a.tif = TimeInForce::aon;
  Order b = limit(101, Side::buy, 51, 500);
  b.tif = TimeInForce::aon;
  EXPECT_EQ(at(2, a).disposition, Disposition::resting);
  EXPECT_EQ(at(3, b).disposition, Disposition::resting);
  // Never passive: a sell that could partially fill it rests instead.
  auto s = at(4, limit(S2, Side::sell, 51, 200));
  EXPECT_EQ(s.fills.size(), 0u);
  // Book reached 500: the earlier AON fills entirely as a side effect.
  ASSERT_EQ(s.side_effects.size(), 2u);
  EXPECT_EQ(s.side_effects[0].taker_order_id, 100u);
  EXPECT_FALSE(book.contains(100));
  EXPECT_TRUE(book.contains(101));
}

TEST_F(BookFixture, MarketWithProtectionBecomesLimitOffLastTrade) {
  at(1, limit(S1, Side::sell, 51, 100));
  at(1, limit(S2, Side::sell, 53, 100));
  at(2, Order::market(100, Side::buy, 10));  // last = 51
  Order p;
  p.id = 101;
  p.side = Side::buy;
  p.kind = OrderKind::market_protected;
  p.protection_offset = 1;
  p.quantity = 200;
  p.display_quantity = 200;
  auto r = at(3, p);
  ASSERT_EQ(r.fills.size(), 1u);
  EXPECT_EQ(r.fills[0].quantity, 90);
  EXPECT_EQ(r.disposition, Disposition::partial_resting);
  EXPECT_EQ(book.best_bid(), 52);  // protective limit 51 + 1
}

TEST_F(BookFixture, DiscretionReachRanksBehindDisplayedOrdersAtThatPrice) {
  // S3 displays 52 but would take 51.
  at(1, limit(S1, Side::sell, 51, 1000));
  at(2, limit(S2, Side::sell, 51, 3000));
  Order s3 = limit(S3, Side::sell, 52, 4000);
  s3.discretion_offset = 1;
  at(3, s3);
  at(4, limit(S4, Side::sell, 52, 2000));
  EXPECT_EQ(book.best_ask(), 51);

  auto r = at(5, limit(100, Side::buy, 51, 5000));
  ASSERT_EQ(r.fills.size(), 3u);
  EXPECT_EQ(r.fills[0].maker_order_id, S1);
  EXPECT_EQ(r.fills[1].maker_order_id, S2);
  EXPECT_EQ(r.fills[2].maker_order_id, S3);
  EXPECT_EQ(r.fills[2].price, 51);
  EXPECT_EQ(r.fills[2].quantity, 1000);
  EXPECT_EQ(r.disposition, Disposition::filled);
  EXPECT_EQ(book.best_ask(), 52);
}

TEST_F(BookFixture, TakerDiscretionExtendsReach) {
  at(1, limit(S1, Side::sell, 52, 100));
  Order b = limit(100, Side::buy, 51, 150);
  b.discretion_offset = 1;
  auto r = at(2, b);
  ASSERT_EQ(r.fills.size(), 1u);
  EXPECT_EQ(r.fills[0].price, 52);
  EXPECT_EQ(book.best_bid(), 51);
}

TEST_F(BookFixture, RejectsMalformedAndUnpricedMarketOrders) {
  Order bad = limit(1, Side::buy, 50, 0);
  EXPECT_EQ(at(1, bad).disposition, Disposition::rejected);
  Order no_px = limit(2, Side::buy, 50, 10);
  no_px.limit_price.reset();
  EXPECT_EQ(at(1, no_px).reject_reason, Reason::malformed);
  auto m = at(1, Order::market(3, Side::buy, 10));
  EXPECT_EQ(m.disposition, Disposition::rejected);
  EXPECT_EQ(m.reject_reason, Reason::no_liquidity);
  at(1, limit(4, Side::sell, 50, 10));
  EXPECT_EQ(at(1, limit(4, Side::sell, 50, 10)).reject_reason, Reason::duplicate_id);
}

TEST_F(BookFixture, VenueWithoutHiddenSupportRejectsHiddenOrders) {
  OrderBook lit(BookConfig{23'400, false, false});
  Order h = limit(1, Side::sell, 50, 10);
  h.display_quantity = 0;
  EXPECT_EQ(lit.submit(h).reject_reason, Reason::unsupported);
  Order ice = limit(2, Side::sell, 50, 10);
  ice.display_quantity = 5;
  EXPECT_EQ(lit.submit(ice).reject_reason, Reason::unsupported);
}

TEST_F(BookFixture, IocRemainderIsCancelledNeverRests) {
  at(1, limit(S1, Side::sell, 51, 100));
  auto r = at(2, limit(100, Side::buy, 51, 300, TimeInForce::ioc));
  EXPECT_EQ(r.filled, 100);
  EXPECT_EQ(r.cancelled, 200);
  EXPECT_EQ(r.disposition, Disposition::cancelled);
  EXPECT_FALSE(book.contains(100));
}

TEST_F(BookFixture, EventsRecordEveryLifecycleStep) {
  at(1, limit(S1, Side::sell, 51, 100));
  at(2, limit(100, Side::buy, 51, 300, TimeInForce::ioc));
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[0].type, EventType::submit);
  EXPECT_EQ(events[1].type, EventType::submit);
  EXPECT_EQ(events[2].type, EventType::fill);
  EXPECT_EQ(events[2].maker, S1);
  EXPECT_EQ(events[3].type, EventType::cancel);
  EXPECT_EQ(events[3].reason, Reason::ioc);
  EXPECT_EQ(events[3].qty, 200);
}
