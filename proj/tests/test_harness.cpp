#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "execlab/event_log.hpp"
#include "execlab/harness.hpp"

using namespace execlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("execlab_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> table(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> out;
  std::getline(in, line);  // file header
  std::getline(in, line);  // columns
  while (std::getline(in, line)) out.push_back(split(line, ','));
  return out;
}

std::set<std::string> names(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
  return out;
}

Scenario small_twap(std::uint64_t seed = 5) {
  return parse_scenario("[run]\nseed = " + std::to_string(seed) +
                        "\n[parent]\nquantity = 6000\nend = 7200\n[algo]\ntype = twap\nbucket_ticks = 600\n"
                        "[venue.0]\ntaker_fee = 0.003\n[optimizer]\nsurface_alpha_points = 5\n"
                        "surface_lambda_points = 4\n");
}

} // namespace

TEST(Harness, TwapFillsTheParent) {
  const fs::path dir = scratch("twap");
  const auto r = harness::run(small_twap(), dir);
  EXPECT_TRUE(r.simulated);
  EXPECT_EQ(r.intended, 6000);
  EXPECT_EQ(r.filled, 6000);
  EXPECT_EQ(r.unfilled, 0);
  EXPECT_EQ(r.shortfall.opportunity, 0);
  EXPECT_EQ(r.shortfall.total, r.expanded.total);
  EXPECT_EQ(names(dir), (std::set<std::string>{"scenario.ini", "frontier.csv", "cost_surface.csv", "events.log",
                                                "fills.log", "report.csv"}));
  EXPECT_EQ(table(dir / "cost_surface.csv").size(), 20u);
}

TEST(Harness, EveryFileStartsWithTheHeader) {
  const Scenario s = small_twap();
  const fs::path dir = scratch("header");
  harness::run(s, dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path());
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, file_header(s)) << e.path();
  }
}

TEST(Harness, SameScenarioTwiceIsByteIdentical) {
  const Scenario s = small_twap(21);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  harness::run(s, a);
  harness::run(s, b);
  ASSERT_EQ(names(a), names(b));
  for (const auto& n : names(a)) EXPECT_EQ(slurp(a / n), slurp(b / n)) << n;
}

TEST(Harness, DifferentSeedsDiffer) {
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  harness::run(small_twap(1), a);
  harness::run(small_twap(2), b);
  EXPECT_NE(slurp(a / "events.log"), slurp(b / "events.log"));
}

TEST(Harness, RunManyMatchesSerialRuns) {
  std::vector<Scenario> ss{small_twap(1), small_twap(2), small_twap(3)};
  std::vector<fs::path> par_dirs, ser_dirs;
  for (int i = 0; i < 3; ++i) {
    par_dirs.push_back(scratch("many_p" + std::to_string(i)));
    ser_dirs.push_back(scratch("many_s" + std::to_string(i)));
  }
  harness::run_many(ss, par_dirs);
  for (int i = 0; i < 3; ++i) harness::run(ss[i], ser_dirs[i]);
  for (int i = 0; i < 3; ++i)
    for (const auto& n : names(ser_dirs[i])) EXPECT_EQ(slurp(par_dirs[i] / n), slurp(ser_dirs[i] / n)) << n;
}

TEST(Harness, FillsTraceToBookEvents) {
  const fs::path dir = scratch("trace");
  harness::run(small_twap(), dir);
  std::multiset<std::string> book;
  for (const auto& e : table(dir / "events.log")) {
    if (e[0] != "fill") continue;
    // clock, venue, price, qty, taker id and maker id
    const std::string maker = e[6].substr(6, e[6].find('|') - 6);
    const std::string venue = e[6].substr(e[6].rfind('=') + 1);
    const std::string key = e[1] + "," + venue + "," + e[4] + "," + e[5] + ",";
    book.insert(key + e[2]);
    book.insert(key + maker);
  }
  const auto fills = table(dir / "fills.log");
  ASSERT_FALSE(fills.empty());
  for (const auto& f : fills) {
    const auto it = book.find(f[4] + "," + f[1] + "," + f[2] + "," + f[3] + "," + f[0]);
    ASSERT_NE(it, book.end()) << f[0];
    book.erase(it);
  }
}

TEST(Harness, JsonReport) {
  const Scenario s = small_twap();
  const fs::path dir = scratch("json");
  const auto r = harness::run(s, dir, harness::Format::json);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["header"], file_header(s));
  EXPECT_EQ(j["filled"], r.filled);
  EXPECT_EQ(j["shortfall"]["total"], r.shortfall.total);
  EXPECT_FALSE(fs::exists(dir / "report.csv"));
}

TEST(Harness, FrontierOnlyWritesFrontierOnly) {
  const Scenario s = parse_scenario("[run]\nseed = 1\nsimulate = false\n[optimizer]\nlambda_points = 7\n");
  const fs::path dir = scratch("frontier_only");
  const auto r = harness::run(s, dir);
  EXPECT_FALSE(r.simulated);
  EXPECT_EQ(names(dir), std::set<std::string>{"frontier.csv"});
  const auto rows = table(dir / "frontier.csv");
  ASSERT_EQ(rows.size(), 14u);
  EXPECT_EQ(rows.front()[0], "arrival");
  EXPECT_EQ(rows.back()[0], "previous-close");
}

TEST(Harness, EmptyLambdaGridGivesHeaderOnly) {
  const Scenario s = parse_scenario("[run]\nseed = 1\nsimulate = false\n[optimizer]\nlambda_points = 0\n");
  const fs::path dir = scratch("empty_grid");
  harness::write_frontier(s, dir);
  EXPECT_EQ(slurp(dir / "frontier.csv"), file_header(s) + "\nbenchmark,lambda,alpha,cost,risk\n");
  harness::emit_figures(s, dir);
  EXPECT_EQ(slurp(dir / "figure2_arrival.csv"), file_header(s) + "\nlambda,alpha,cost,risk\n");
  EXPECT_EQ(slurp(dir / "figure2_close.csv"), file_header(s) + "\nlambda,alpha,cost,risk\n");
}

TEST(Harness, FigureOneHasUniqueInteriorMinimum) {
  const fs::path dir = scratch("fig1");
  harness::run(small_twap(), dir);
  harness::emit_figures(dir);
  const auto rows = table(dir / "figure1.csv");
  const Scenario s = load_scenario(dir / "scenario.ini");
  ASSERT_EQ(rows.size(), s.figure_lambdas.size() * s.figure_alpha_points);
  // The middle figure lambda targets an interior rate.
  const std::size_t n = s.figure_alpha_points, k = 1;
  std::vector<double> obj;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& r = rows[k * n + j];
    obj.push_back(std::stod(r[4]));
    EXPECT_NEAR(std::stod(r[2]) + std::stod(r[3]), obj.back(), 1e-9 * obj.back());
  }
  const auto best = std::size_t(std::min_element(obj.begin(), obj.end()) - obj.begin());
  EXPECT_GT(best, 0u);
  EXPECT_LT(best, n - 1);
  EXPECT_EQ(std::count(obj.begin(), obj.end(), obj[best]), 1);
  // Decreasing into the minimum, increasing after it.
  for (std::size_t j = 1; j <= best; ++j) EXPECT_LT(obj[j], obj[j - 1]);
  for (std::size_t j = best + 1; j < n; ++j) EXPECT_GT(obj[j], obj[j - 1]);
}

TEST(Harness, FigureTwoArrivalFrontierIsMonotone) {
  const Scenario s = parse_scenario("[run]\nseed = 1\nsimulate = false\n[cost]\nx = 250000\n");
  const fs::path dir = scratch("fig2");
  harness::emit_figures(s, dir);
  auto rows = table(dir / "figure2_arrival.csv");
  ASSERT_EQ(rows.size(), s.lambda_points);
  // Sort by risk and check that cost falls strictly as risk rises: no point is dominated.
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) pts.emplace_back(std::stod(r[3]), std::stod(r[2]));
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_GT(pts[i].first, pts[i - 1].first);
    EXPECT_LT(pts[i].second, pts[i - 1].second);
  }
}

TEST(Harness, FiguresNeedAScenarioEcho) {
  const fs::path dir = scratch("no_echo");
  fs::create_directories(dir);
  EXPECT_THROW(harness::emit_figures(dir), ValidationError);
}

TEST(Harness, BenchmarkChoiceSetsDecisionPrice) {
  const std::string base = "[run]\nseed = 4\n[parent]\nquantity = 2000\nend = 3600\n[algo]\nbucket_ticks = 600\n";
  const auto arrival = harness::run(parse_scenario(base), scratch("bm_arrival"));
  EXPECT_EQ(arrival.tca_inputs.decision, *arrival.tca_inputs.arrival);
  EXPECT_EQ(arrival.expanded.delay, 0);
  const auto close = harness::run(parse_scenario(base + "[tca]\nbenchmark = close\n"), scratch("bm_close"));
  EXPECT_EQ(close.tca_inputs.decision, 5000);
  const auto dec =
      harness::run(parse_scenario(base + "[tca]\nbenchmark = decision\ndecision_price = 4990\n"), scratch("bm_dec"));
  EXPECT_EQ(dec.tca_inputs.decision, 4990);
  EXPECT_EQ(dec.expanded.delay, dec.filled * (*dec.tca_inputs.arrival - 4990));
  EXPECT_EQ(dec.expanded.total, dec.shortfall.total);
}
