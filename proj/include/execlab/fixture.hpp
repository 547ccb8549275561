#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace execlab {

/// Golden book fixture.
///
/// A fixture is a sequence of sections evaluated in order:
///
///   [actions]  submit,<clock>,<name>,<side>,<price|->,<qty>,<flags>
///              cancel,<clock>,<name>
///              advance,<clock>
///              slicer,<clock>,<name>,<side>,<price>,<total>,display=<n>[|script=a/b/..][|ids=X/Y/..]
///              confirm,<clock>,<slicer-name>
///   [expect]   event-log lines (fill/cancel/expire/trigger/reject) produced
///              since the previous [expect]; submit events are not listed
///   [book]     <side>,<price>,<name>,<qty>,<time>,<visible|hidden>, one line
///              per omniscient queue entry, bids then asks, best first
///
/// Clocks accept ticks or hh:mm:ss. Submit lines use the event-log column
/// order, so an action is the submit event it produces. Lines starting with
/// '#' are comments.
struct FixtureLine {
  std::size_t line_no = 0;
  std::string text;
};

struct FixtureSection {
  enum class Kind { actions, expect, book } kind = Kind::actions;
  std::vector<FixtureLine> lines;
};

struct Fixture {
  std::string name;
  std::vector<FixtureSection> sections;
};

struct FixtureResult {
  std::string name;
  bool passed = false;
  std::string diff;  // first divergence when failed
};

/// Throws ValidationError with the offending line number.
Fixture parse_fixture(const std::string& text, const std::string& name);
Fixture load_fixture(const std::filesystem::path& path);

FixtureResult replay(const Fixture& fx);

/// Every *.fix file in the directory, sorted by name.
std::vector<FixtureResult> replay_directory(const std::filesystem::path& dir);

} // namespace execlab
