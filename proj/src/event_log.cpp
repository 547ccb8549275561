#include "execlab/event_log.hpp"

#include <charconv>
#include <sstream>

namespace execlab {

namespace {

std::int64_t to_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ValidationError("bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

} // namespace

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

Tick parse_clock(std::string_view text) {
  if (text.find(':') == std::string_view::npos) return to_int(text, "clock");
  auto parts = split(text, ':');
  if (parts.size() != 3) throw ValidationError("bad clock '" + std::string(text) + "'");
  return to_int(parts[0], "hours") * 3600 + to_int(parts[1], "minutes") * 60 + to_int(parts[2], "seconds");
}

std::string format_event(const BookEvent& ev, const IdFormatter& ids, std::string_view extra_flags) {
  auto id = [&](OrderId x) { return ids ? ids(x) : std::to_string(x); };
  std::ostringstream out;
  out << to_string(ev.type) << ',' << ev.clock << ',' << id(ev.id) << ',' << to_string(ev.side) << ',';
  if (ev.price)
    out << *ev.price;
  else
    out << '-';
  out << ',' << ev.qty << ',';

  std::string flags;
  switch (ev.type) {
    case EventType::submit:
      flags = ev.order ? order_flags(*ev.order) : std::string{};
      break;
    case EventType::fill:
      flags = "maker=" + id(ev.maker);
      if (ev.maker_hidden) flags += "|hidden";
      break;
    default:
      flags = std::string(to_string(ev.reason));
      break;
  }
  if (!extra_flags.empty()) {
    if (!flags.empty()) flags += '|';
    flags += extra_flags;
  }
  out << flags;
  return out.str();
}

void apply_order_flags(std::string_view flags, Order& o) {
  if (flags.empty() || flags == "-") return;
  for (const std::string& token : split(flags, '|')) {
    if (token.empty()) continue;
    const auto eq = token.find('=');
    const std::string key = token.substr(0, eq);
    const std::string value = eq == std::string::npos ? std::string{} : token.substr(eq + 1);
    if (key == "market") {
      o.kind = OrderKind::market;
    } else if (key == "limit") {
      o.kind = OrderKind::limit;
    } else if (key == "protected") {
      o.kind = OrderKind::market_protected;
    } else if (key == "stop-market" || key == "stop-limit") {
      o.kind = OrderKind::stop;
    } else if (key == "gtc") {
      o.tif = TimeInForce::gtc;
    } else if (key == "ioc") {
      o.tif = TimeInForce::ioc;
    } else if (key == "fok") {
      o.tif = TimeInForce::fok;
    } else if (key == "aon") {
      o.tif = TimeInForce::aon;
    } else if (key == "day") {
      o.tif = TimeInForce::day;
    } else if (key == "gtd") {
      o.tif = TimeInForce::gtd;
      o.tif_time = parse_clock(value);
    } else if (key == "gat") {
      o.tif = TimeInForce::gat;
      o.tif_time = parse_clock(value);
    } else if (key == "display") {
      o.display_quantity = to_int(value, "display");
    } else if (key == "stop") {
      o.kind = OrderKind::stop;
      o.stop_price = to_int(value, "stop");
    } else if (key == "protect") {
      o.kind = OrderKind::market_protected;
      o.protection_offset = to_int(value, "protect");
    } else if (key == "disc") {
      o.discretion_offset = to_int(value, "disc");
    } else {
      throw ValidationError("unknown order flag '" + token + "'");
    }
  }
}

} // namespace execlab
