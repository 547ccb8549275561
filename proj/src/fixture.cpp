#include "execlab/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "execlab/event_log.hpp"
#include "execlab/orderbook.hpp"
#include "execlab/tactics.hpp"

namespace execlab {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_line(const std::string& fixture, const FixtureLine& l, const std::string& why) {
  throw ValidationError(fixture + ":" + std::to_string(l.line_no) + ": " + why + " in '" + l.text + "'");
}

std::int64_t to_int(const std::string& s, const std::string& fixture, const FixtureLine& l) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad_line(fixture, l, "bad integer '" + s + "'");
  }
}

// Event-log line with its clock rewritten in ticks.
std::string canonical_event(const std::string& fixture, const FixtureLine& l) {
  auto f = split(l.text, ',');
  if (f.size() < 6 || f.size() > 7) bad_line(fixture, l, "expected 6 or 7 event-log columns");
  f.resize(7);
  f[1] = std::to_string(parse_clock(f[1]));
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
  return out;
}

std::string canonical_book(const std::string& fixture, const FixtureLine& l) {
  auto f = split(l.text, ',');
  if (f.size() != 6) bad_line(fixture, l, "expected side,price,name,qty,time,visibility");
  f[4] = std::to_string(parse_clock(f[4]));
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
  return out;
}

struct SlicerState {
  std::unique_ptr<tactics::Slicer> slicer;
  std::size_t cursor = 0;
  std::vector<OrderId> children;
};

class Replayer {
public:
  explicit Replayer(const Fixture& fx) : fx_(fx) { book_.set_event_sink(&events_); }

  FixtureResult run() {
    FixtureResult res{fx_.name, true, {}};
    for (const FixtureSection& sec : fx_.sections) {
      std::string diff;
      switch (sec.kind) {
        case FixtureSection::Kind::actions:
          for (const FixtureLine& l : sec.lines) act(l);
          break;
        case FixtureSection::Kind::expect:
          diff = check_events(sec);
          break;
        case FixtureSection::Kind::book:
          diff = check_book(sec);
          break;
      }
      if (!diff.empty()) {
        res.passed = false;
        res.diff = fx_.name + ": " + diff;
        return res;
      }
    }
    return res;
  }

private:
  OrderId id_of(const std::string& name) {
    auto [it, fresh] = ids_.try_emplace(name, next_id_);
    if (fresh) {
      names_[next_id_] = name;
      ++next_id_;
    }
    return it->second;
  }

  std::string name_of(OrderId id) const {
    auto it = names_.find(id);
    return it == names_.end() ? std::to_string(id) : it->second;
  }

  void advance(Tick clock, const FixtureLine& l) {
    if (clock < book_.clock()) bad_line(fx_.name, l, "clock goes backwards");
    book_.expire(clock);
  }

  void act(const FixtureLine& l) {
    const auto f = split(l.text, ',');
    const std::string& verb = f[0];
    if (verb == "submit") {
      if (f.size() < 6 || f.size() > 7) bad_line(fx_.name, l, "submit needs 6 or 7 columns");
      Order o;
      o.id = id_of(f[2]);
      o.side = parse_side(f[3]);
      if (f[4] == "-") {
        o.kind = OrderKind::market;
        o.tif = TimeInForce::ioc;
      } else {
        o.limit_price = to_int(f[4], fx_.name, l);
      }
      o.quantity = to_int(f[5], fx_.name, l);
      o.display_quantity = o.quantity;
      if (f.size() == 7) apply_order_flags(f[6], o);
      advance(parse_clock(f[1]), l);
      book_.submit(o);
    } else if (verb == "cancel") {
      if (f.size() != 3) bad_line(fx_.name, l, "cancel needs clock and name");
      advance(parse_clock(f[1]), l);
      book_.cancel(id_of(f[2]));
    } else if (verb == "advance") {
      if (f.size() != 2) bad_line(fx_.name, l, "advance needs a clock");
      advance(parse_clock(f[1]), l);
    } else if (verb == "slicer") {
      start_slicer(f, l);
    } else if (verb == "confirm") {
      if (f.size() != 3) bad_line(fx_.name, l, "confirm needs clock and slicer name");
      confirm(f[2], parse_clock(f[1]), l);
    } else {
      bad_line(fx_.name, l, "unknown action '" + verb + "'");
    }
  }

  void start_slicer(const std::vector<std::string>& f, const FixtureLine& l) {
    if (f.size() != 7) bad_line(fx_.name, l, "slicer needs 7 columns");
    const std::string name = f[2];
    tactics::SlicePolicy policy;
    std::vector<std::string> child_names;
    for (const std::string& tok : split(f[6], '|')) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) bad_line(fx_.name, l, "slicer option without value");
      const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
      if (key == "display") {
        policy.display = to_int(value, fx_.name, l);
      } else if (key == "script") {
        for (const std::string& s : split(value, '/')) policy.size_script.push_back(to_int(s, fx_.name, l));
      } else if (key == "ids") {
        child_names = split(value, '/');
      } else {
        bad_line(fx_.name, l, "unknown slicer option '" + key + "'");
      }
    }
    auto& st = slicers_[name];
    auto ids = [this, name, child_names, k = std::size_t{0}]() mutable {
      const std::string child = k < child_names.size() ? child_names[k] : name + "." + std::to_string(k + 1);
      ++k;
      return id_of(child);
    };
    st.slicer = std::make_unique<tactics::Slicer>(parse_side(f[3]), to_int(f[5], fx_.name, l),
                                                  to_int(f[4], fx_.name, l), policy, ids);
    advance(parse_clock(f[1]), l);
    st.cursor = events_.size();
    release(st);
  }

  void release(SlicerState& st) {
    if (auto child = st.slicer->next()) {
      st.children.push_back(child->id);
      book_.submit(*child);
    }
  }

  void confirm(const std::string& name, Tick clock, const FixtureLine& l) {
    auto it = slicers_.find(name);
    if (it == slicers_.end()) bad_line(fx_.name, l, "unknown slicer '" + name + "'");
    SlicerState& st = it->second;
    auto mine = [&](OrderId id) { return std::find(st.children.begin(), st.children.end(), id) != st.children.end(); };
    for (; st.cursor < events_.size(); ++st.cursor) {
      const BookEvent& e = events_[st.cursor];
      if (e.type == EventType::fill) {
        if (mine(e.maker)) st.slicer->on_fill(e.maker, e.qty);
        if (mine(e.id)) st.slicer->on_fill(e.id, e.qty);
      } else if ((e.type == EventType::cancel || e.type == EventType::expire) && mine(e.id)) {
        st.slicer->on_done(e.id, e.qty);
      }
    }
    advance(clock, l);
    st.cursor = events_.size();
    release(st);
  }

  template <class Canon>
  std::string compare(const std::vector<std::string>& got, const FixtureSection& sec, Canon canon,
                      const char* what) {
    for (std::size_t i = 0; i < std::max(got.size(), sec.lines.size()); ++i) {
      const std::string want = i < sec.lines.size() ? canon(fx_.name, sec.lines[i]) : std::string();
      const std::string have = i < got.size() ? got[i] : std::string();
      if (want == have) continue;
      std::ostringstream out;
      out << "first divergence in " << what << " entry " << i + 1;
      if (i < sec.lines.size()) out << " (line " << sec.lines[i].line_no << ")";
      out << "\n  expected: " << (i < sec.lines.size() ? want : "<nothing>");
      out << "\n  got:      " << (i < got.size() ? have : "<nothing>");
      return out.str();
    }
    return {};
  }

  std::string check_events(const FixtureSection& sec) {
    std::vector<std::string> got;
    auto namer = [this](OrderId id) { return name_of(id); };
    for (; checked_ < events_.size(); ++checked_)
      if (events_[checked_].type != EventType::submit) got.push_back(format_event(events_[checked_], namer));
    return compare(got, sec, canonical_event, "events");
  }

  std::string check_book(const FixtureSection& sec) {
    std::vector<std::string> got;
    const BookView v = book_.snapshot(0, Visibility::omniscient);
    auto emit = [&](const char* side, const std::vector<LevelView>& levels) {
      for (const LevelView& lvl : levels)
        for (const EntryView& e : lvl.entries)
          got.push_back(std::string(side) + "," + std::to_string(lvl.price) + "," + name_of(e.id) + "," +
                        std::to_string(e.qty) + "," + std::to_string(e.timestamp) + "," +
                        (e.hidden ? "hidden" : "visible"));
    };
    emit("buy", v.bids);
    emit("sell", v.asks);
    return compare(got, sec, canonical_book, "book");
  }

  const Fixture& fx_;
  OrderBook book_;
  std::vector<BookEvent> events_;
  std::size_t checked_ = 0;
  std::map<std::string, OrderId> ids_;
  std::map<OrderId, std::string> names_;
  OrderId next_id_ = 1;
  std::map<std::string, SlicerState> slicers_;
};

} // namespace

Fixture parse_fixture(const std::string& text, const std::string& name) {
  Fixture fx;
  fx.name = name;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      FixtureSection sec;
      if (line == "[actions]") sec.kind = FixtureSection::Kind::actions;
      else if (line == "[expect]") sec.kind = FixtureSection::Kind::expect;
      else if (line == "[book]") sec.kind = FixtureSection::Kind::book;
      else throw ValidationError(name + ":" + std::to_string(line_no) + ": unknown section " + line);
      fx.sections.push_back(sec);
      continue;
    }
    if (fx.sections.empty())
      throw ValidationError(name + ":" + std::to_string(line_no) + ": content before the first section");
    fx.sections.back().lines.push_back({line_no, line});
  }
  return fx;
}

Fixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open fixture " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fixture(buf.str(), path.stem().string());
}

FixtureResult replay(const Fixture& fx) {
  try {
    return Replayer(fx).run();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    return {fx.name, false, fx.name + ": replay aborted: " + e.what()};
  }
}

std::vector<FixtureResult> replay_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".fix") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<FixtureResult> out;
  for (const auto& f : files) out.push_back(replay(load_fixture(f)));
  return out;
}

} // namespace execlab
