#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "execlab/scenario.hpp"
#include "execlab/tca.hpp"

namespace execlab::harness {

enum class Format : std::uint8_t { csv, json };

Format parse_format(std::string_view text);

struct VenueTotals {
  VenueIndex venue = 0;
  Qty filled = 0;
  double fees = 0;  // currency, rebates negative
};

struct RunReport {
  std::string scenario_hash;
  bool simulated = false;

  // Execution summary.
  Qty intended = 0;
  Qty filled = 0;
  Qty unfilled = 0;
  Qty other_volume = 0;
  std::size_t children = 0;
  std::size_t fill_count = 0;
  double participation = 0;
  std::vector<Qty> planned;
  std::vector<Qty> realized;
  std::vector<VenueTotals> venues;

  tca::TCAInputs tca_inputs;
  tca::ISReport shortfall;
  tca::ISReport expanded;

  std::vector<opt::FrontierPoint> frontier;  // arrival rows, then close rows
  std::vector<std::filesystem::path> files;
};

/// Runs one scenario into out_dir (created if missing). A scenario with
/// run.simulate = false writes frontier.csv only. Deterministic for a fixed
/// scenario: repeated runs write byte-identical files. Simulated runs also
/// write scenario.ini (the canonical echo), events.log, fills.log and the report.
RunReport run(const Scenario& s, const std::filesystem::path& out_dir, Format format = Format::csv);

/// Independent scenarios on the OpenMP pool, one output directory each.
/// Results come back in input order; the first failure is rethrown.
std::vector<RunReport> run_many(const std::vector<Scenario>& scenarios,
                                const std::vector<std::filesystem::path>& out_dirs, Format format = Format::csv);

/// Arrival and close frontiers over the scenario's lambda grid.
std::vector<opt::FrontierPoint> frontier_rows(const Scenario& s);

/// Writes frontier.csv for the scenario (header only for an empty grid).
std::filesystem::path write_frontier(const Scenario& s, const std::filesystem::path& out_dir);

/// Reads scenario.ini from a run directory and writes figure1.csv
/// (lambda,alpha,impact,lambda_risk,objective per figure lambda over the rate
/// grid) and figure2_arrival.csv / figure2_close.csv (frontier tables).
std::vector<std::filesystem::path> emit_figures(const std::filesystem::path& run_dir);
std::vector<std::filesystem::path> emit_figures(const Scenario& s, const std::filesystem::path& out_dir);

} // namespace execlab::harness
