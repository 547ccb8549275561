// execlab command line: run scenarios, replay golden fixtures, write
// frontier and figure data.
//
// Exit codes: 0 ok, 1 validation error, 2 runtime error, 3 fixture mismatch.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "execlab/fixture.hpp"
#include "execlab/harness.hpp"

namespace fs = std::filesystem;
using namespace execlab;

namespace {

constexpr int kOk = 0, kValidation = 1, kRuntime = 2, kMismatch = 3;

Scenario load(const fs::path& path, std::optional<std::uint64_t> seed) {
  Scenario s = load_scenario(path);
  if (seed) {
    if (s.algo.tilt.seed == s.seed) s.algo.tilt.seed = *seed;
    s.seed = *seed;
    s.market.seed = *seed;
  }
  return s;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"execlab: order book, execution algorithms, cost model and TCA"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::optional<std::uint64_t> seed;
  std::string out_flag, format_flag = "csv";

  auto* run = app.add_subcommand("run", "Simulate one or more scenarios and write logs and reports");
  std::vector<std::string> run_files;
  run->add_option("scenario", run_files, "Scenario INI files")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override run.seed");
  run->add_option("--out", out_flag, "Output directory (default: run.output)");
  run->add_option("--format", format_flag, "Report format")->check(CLI::IsMember({"csv", "json"}));

  auto* replay = app.add_subcommand("replay-fixtures", "Replay golden order-book fixtures");
  std::string fixture_dir = EXECLAB_DEFAULT_FIXTURE_DIR;
  replay->add_option("dir", fixture_dir, "Fixture directory")->check(CLI::ExistingDirectory);

  auto* frontier = app.add_subcommand("frontier", "Write the efficient frontier for a scenario");
  std::string frontier_file;
  frontier->add_option("scenario", frontier_file, "Scenario INI file")->required()->check(CLI::ExistingFile);
  frontier->add_option("--seed", seed, "Override run.seed");
  frontier->add_option("--out", out_flag, "Output directory (default: run.output)");

  auto* figures = app.add_subcommand("figures", "Write figure data from a run directory");
  std::string run_dir;
  figures->add_option("run-dir", run_dir, "Run directory holding scenario.ini, or a scenario file")
      ->required()
      ->check(CLI::ExistingPath);
  figures->add_option("--out", out_flag, "Output directory when given a scenario file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*run) {
      const harness::Format format = harness::parse_format(format_flag);
      std::vector<Scenario> scenarios;
      std::vector<fs::path> dirs;
      for (const auto& f : run_files) {
        scenarios.push_back(load(f, seed));
        const fs::path base = out_flag.empty() ? scenarios.back().output : fs::path(out_flag);
        dirs.push_back(run_files.size() == 1 ? base : base / fs::path(f).stem());
      }
      const auto reports = harness::run_many(scenarios, dirs, format);
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        std::cout << run_files[i] << ": scenario=" << r.scenario_hash;
        if (r.simulated)
          std::cout << " filled=" << r.filled << '/' << r.intended << " participation=" << r.participation
                    << " is_total=" << r.shortfall.total;
        std::cout << " -> " << dirs[i].string() << '\n';
      }
    } else if (*replay) {
      bool ok = true;
      const auto results = replay_directory(fixture_dir);
      if (results.empty()) {
        std::cerr << "no fixtures in " << fixture_dir << '\n';
        return kValidation;
      }
      for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << '\n';
        if (!r.passed) std::cout << r.diff << '\n';
        ok = ok && r.passed;
      }
      return ok ? kOk : kMismatch;
    } else if (*frontier) {
      const Scenario s = load(frontier_file, seed);
      const fs::path dir = out_flag.empty() ? s.output : fs::path(out_flag);
      std::cout << harness::write_frontier(s, dir).string() << '\n';
    } else if (*figures) {
      std::vector<fs::path> files;
      if (fs::is_directory(run_dir)) {
        files = harness::emit_figures(run_dir);
      } else {
        const Scenario s = load(run_dir, seed);
        files = harness::emit_figures(s, out_flag.empty() ? s.output : fs::path(out_flag));
      }
      for (const auto& p : files) std::cout << p.string() << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
