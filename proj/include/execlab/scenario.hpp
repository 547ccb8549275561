#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "execlab/cost_model.hpp"
#include "execlab/exec_algos.hpp"
#include "execlab/optimizer.hpp"
#include "execlab/venue_sim.hpp"

namespace execlab {

inline constexpr std::string_view kVersion = "0.1.0";

/// Scenario file: INI sections and keys. Every key is optional except
/// run.seed; see README for the full list with defaults.
///
///   [run]        seed, output, simulate
///   [market]     p0 tick_size sigma adv session_ticks intensity market_fraction
///                limit_depth limit_lifetime hidden_fraction trading_days
///                profile (u-shape|uniform) profile_buckets
///   [venue.N]    maker_fee taker_fee latency supports_hidden supports_iceberg
///   [parent]     side quantity start end limit benchmark
///   [algo]       type bucket_ticks pr sensitivity pr_max max_child price_limit
///                cross_ticks volume_side
///   [tilt]       threshold factor jitter timing_jitter seed
///   [routing]    price probability latency fee
///   [cost]       a1 a2 a3 b1 adv sigma p0 x
///   [optimizer]  horizon_years alpha_min alpha_max close_drift lambda_min
///                lambda_max lambda_points surface_alpha_points
///                surface_lambda_points figure_lambdas figure_alpha_points
///   [tca]        benchmark (arrival|decision|open|close) decision_price
struct Scenario {
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
  bool simulate = true;

  sim::MarketParams market;
  std::string profile_shape = "u-shape";
  std::size_t profile_buckets = 13;
  std::vector<sim::VenueConfig> venues;

  algo::ParentOrder parent;
  algo::AlgoSpec algo;

  cost::ImpactParams cost;
  double horizon_years = 1.0 / 250.0;
  opt::RateBounds bounds;
  double close_drift = 0;
  double lambda_min = 1e-8;  // unset bounds are derived from the rate bounds
  double lambda_max = 1e-3;
  std::size_t lambda_points = 50;
  std::size_t surface_alpha_points = 0;
  std::size_t surface_lambda_points = 0;
  std::vector<double> figure_lambdas;
  std::size_t figure_alpha_points = 200;

  algo::BenchmarkChoice tca_benchmark = algo::BenchmarkChoice::arrival;
  std::optional<Price> decision_price;

  sim::VolumeProfile profile() const;
  opt::Problem problem() const;
  std::vector<double> lambda_grid() const;
};

/// Parses and validates. Throws ValidationError naming the line or the field.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

void validate(const Scenario& s);

/// Canonical INI with every default written out. Parsing the echo yields the
/// same scenario.
std::string echo(const Scenario& s);

/// FNV-1a over the echo, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

/// First line of every output file.
std::string file_header(const Scenario& s);

} // namespace execlab
