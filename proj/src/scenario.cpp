#include "execlab/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "execlab/event_log.hpp"

namespace execlab {

namespace pt = boost::property_tree;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

class Reader {
public:
  Reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    sections_.insert(section);
    auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return std::nullopt;
    auto it = sec->second.find(key);
    if (it == sec->second.not_found()) return std::nullopt;
    return it->second.data();
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const {
    throw ValidationError(origin_ + ": " + section + "." + key + ": " + why);
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    auto v = raw(section, key);
    return v ? to_double(section, key, *v) : fallback;
  }

  std::optional<double> maybe_number(const std::string& section, const std::string& key) {
    auto v = raw(section, key);
    if (!v) return std::nullopt;
    return to_double(section, key, *v);
  }

  std::int64_t integer(const std::string& section, const std::string& key, std::int64_t fallback) {
    auto v = raw(section, key);
    return v ? to_int(section, key, *v) : fallback;
  }

  std::optional<std::int64_t> maybe_integer(const std::string& section, const std::string& key) {
    auto v = raw(section, key);
    if (!v) return std::nullopt;
    return to_int(section, key, *v);
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) {
    auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(section, key, "expected true or false, got '" + *v + "'");
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) {
    return raw(section, key).value_or(fallback);
  }

  std::vector<double> list(const std::string& section, const std::string& key) {
    std::vector<double> out;
    auto v = raw(section, key);
    if (!v || v->empty()) return out;
    for (const std::string& item : split(*v, ',')) out.push_back(to_double(section, key, item));
    return out;
  }

  template <class Parse>
  auto choice(const std::string& section, const std::string& key, const std::string& fallback, Parse parse) {
    const std::string v = text(section, key, fallback);
    try {
      return parse(v);
    } catch (const ValidationError& e) {
      fail(section, key, e.what());
    }
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty())
        throw ValidationError(origin_ + ": key '" + section + "' outside any section");
      if (!sections_.count(section)) throw ValidationError(origin_ + ": unknown section [" + section + "]");
      for (const auto& [key, value] : body)
        if (!used_.count(section + "." + key)) throw ValidationError(origin_ + ": unknown key " + section + "." + key);
    }
  }

private:
  double to_double(const std::string& section, const std::string& key, const std::string& v) const {
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
      fail(section, key, "expected a number, got '" + v + "'");
    return out;
  }

  std::int64_t to_int(const std::string& section, const std::string& key, const std::string& v) const {
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) fail(section, key, "expected an integer, got '" + v + "'");
    return out;
  }

  const pt::ptree& tree_;
  std::string origin_;
  std::set<std::string> used_;
  std::set<std::string> sections_;
};

} // namespace

sim::VolumeProfile Scenario::profile() const {
  return profile_shape == "uniform" ? sim::uniform_profile(profile_buckets, market.session_ticks)
                                    : sim::u_shape_profile(profile_buckets, market.session_ticks);
}

opt::Problem Scenario::problem() const { return opt::Problem::from(cost, horizon_years, bounds, close_drift); }

std::vector<double> Scenario::lambda_grid() const {
  if (lambda_points == 0) return {};
  if (lambda_points == 1) return {lambda_min};
  return opt::log_grid(lambda_min, lambda_max, lambda_points);
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  Reader r(tree, origin);
  Scenario s;

  const auto seed = r.maybe_integer("run", "seed");
  if (!seed) throw ValidationError(origin + ": run.seed is required");
  if (*seed < 0) r.fail("run", "seed", "must be >= 0");
  s.seed = std::uint64_t(*seed);
  s.output = r.text("run", "output", s.output.string());
  s.simulate = r.flag("run", "simulate", true);

  auto& m = s.market;
  m.seed = s.seed;
  m.p0 = r.number("market", "p0", m.p0);
  m.tick_size = r.number("market", "tick_size", m.tick_size);
  m.sigma = r.number("market", "sigma", m.sigma);
  m.adv = r.number("market", "adv", m.adv);
  m.session_ticks = r.integer("market", "session_ticks", m.session_ticks);
  m.intensity = r.number("market", "intensity", m.intensity);
  m.market_fraction = r.number("market", "market_fraction", m.market_fraction);
  m.limit_depth = r.integer("market", "limit_depth", m.limit_depth);
  m.limit_lifetime = r.number("market", "limit_lifetime", m.limit_lifetime);
  m.hidden_fraction = r.number("market", "hidden_fraction", m.hidden_fraction);
  m.trading_days = r.number("market", "trading_days", m.trading_days);
  s.profile_shape = r.text("market", "profile", s.profile_shape);
  if (s.profile_shape != "u-shape" && s.profile_shape != "uniform")
    r.fail("market", "profile", "expected u-shape or uniform, got '" + s.profile_shape + "'");
  const auto buckets = r.integer("market", "profile_buckets", std::int64_t(s.profile_buckets));
  if (buckets < 1) r.fail("market", "profile_buckets", "must be >= 1");
  s.profile_buckets = std::size_t(buckets);

  // The INI reader drops empty sections, so section names come from the text.
  std::size_t venue_count = 0;
  {
    static const std::set<std::string> known{"run",  "market",  "parent",    "algo", "tilt",
                                             "routing", "cost", "optimizer", "tca"};
    std::set<std::size_t> venue_ids;
    std::istringstream lines(text);
    std::string line;
    for (int n = 1; std::getline(lines, line); ++n) {
      const auto a = line.find_first_not_of(" \t"), b = line.find_last_not_of(" \t\r");
      if (a == std::string::npos || line[a] != '[' || line[b] != ']') continue;
      const std::string name = line.substr(a + 1, b - a - 1);
      if (known.count(name)) continue;
      std::size_t id = 0;
      const char* first = name.data() + 6;
      const char* last = name.data() + name.size();
      if (name.rfind("venue.", 0) == 0 && name.size() > 6) {
        auto [ptr, ec] = std::from_chars(first, last, id);
        if (ec == std::errc{} && ptr == last) {
          venue_ids.insert(id);
          continue;
        }
      }
      throw ValidationError(origin + ":" + std::to_string(n) + ": unknown section [" + name + "]");
    }
    venue_count = venue_ids.size();
    if (!venue_ids.empty() && *venue_ids.rbegin() + 1 != venue_count)
      throw ValidationError(origin + ": found [venue." + std::to_string(*venue_ids.rbegin()) +
                            "] but venue sections must be numbered from venue.0 without gaps");
  }
  for (std::size_t v = 0; v < venue_count; ++v) {
    const std::string sec = "venue." + std::to_string(v);
    sim::VenueConfig c;
    c.venue_id = VenueIndex(v);
    c.maker_fee = r.number(sec, "maker_fee", c.maker_fee);
    c.taker_fee = r.number(sec, "taker_fee", c.taker_fee);
    c.latency = r.integer(sec, "latency", c.latency);
    c.supports_hidden = r.flag(sec, "supports_hidden", c.supports_hidden);
    c.supports_iceberg = r.flag(sec, "supports_iceberg", c.supports_iceberg);
    s.venues.push_back(c);
  }
  if (s.venues.empty()) s.venues.push_back(sim::VenueConfig{});

  auto& p = s.parent;
  p.side = r.choice("parent", "side", "buy", [](const std::string& v) { return parse_side(v); });
  p.quantity = r.integer("parent", "quantity", 100'000);
  p.start = r.integer("parent", "start", 0);
  p.end = r.integer("parent", "end", m.session_ticks);
  if (auto lim = r.maybe_integer("parent", "limit")) p.limit = *lim;
  p.benchmark = r.choice("parent", "benchmark", "arrival", [](const std::string& v) { return algo::parse_benchmark_choice(v); });

  auto& a = s.algo;
  a.type = r.choice("algo", "type", "twap", [](const std::string& v) { return algo::parse_algo_type(v); });
  a.bucket_ticks = r.integer("algo", "bucket_ticks", a.bucket_ticks);
  a.pr = r.number("algo", "pr", a.pr);
  a.sensitivity = r.number("algo", "sensitivity", a.sensitivity);
  a.pr_max = r.number("algo", "pr_max", a.pr_max);
  a.max_child = r.integer("algo", "max_child", a.max_child);
  if (auto lim = r.maybe_integer("algo", "price_limit")) a.price_limit = *lim;
  a.cross_ticks = r.integer("algo", "cross_ticks", a.cross_ticks);
  a.volume_side = r.choice("algo", "volume_side", "both", [](const std::string& v) { return algo::parse_volume_side(v); });
  a.tilt.threshold = r.number("tilt", "threshold", a.tilt.threshold);
  a.tilt.factor = r.number("tilt", "factor", a.tilt.factor);
  a.tilt.jitter = r.number("tilt", "jitter", a.tilt.jitter);
  a.tilt.timing_jitter = r.number("tilt", "timing_jitter", a.tilt.timing_jitter);
  a.tilt.seed = std::uint64_t(r.integer("tilt", "seed", std::int64_t(s.seed)));
  a.route.price = r.number("routing", "price", a.route.price);
  a.route.probability = r.number("routing", "probability", a.route.probability);
  a.route.latency = r.number("routing", "latency", a.route.latency);
  a.route.fee = r.number("routing", "fee", a.route.fee);

  auto& c = s.cost;
  c.a1 = r.number("cost", "a1", c.a1);
  c.a2 = r.number("cost", "a2", c.a2);
  c.a3 = r.number("cost", "a3", c.a3);
  c.b1 = r.number("cost", "b1", c.b1);
  c.adv = r.number("cost", "adv", m.adv);
  c.sigma = r.number("cost", "sigma", m.sigma);
  c.p0 = r.number("cost", "p0", m.p0);
  c.x = r.number("cost", "x", double(p.quantity));

  s.horizon_years = r.number("optimizer", "horizon_years", s.horizon_years);
  s.bounds.alpha_min = r.number("optimizer", "alpha_min", s.bounds.alpha_min);
  s.bounds.alpha_max = r.number("optimizer", "alpha_max", s.bounds.alpha_max);
  s.close_drift = r.number("optimizer", "close_drift", s.close_drift);
  const auto lambda_min = r.maybe_number("optimizer", "lambda_min");
  const auto lambda_max = r.maybe_number("optimizer", "lambda_max");
  auto count = [&](const std::string& key, std::size_t fallback) {
    const auto v = r.integer("optimizer", key, std::int64_t(fallback));
    if (v < 0) r.fail("optimizer", key, "must be >= 0");
    return std::size_t(v);
  };
  s.lambda_points = count("lambda_points", s.lambda_points);
  s.surface_alpha_points = count("surface_alpha_points", s.surface_alpha_points);
  s.surface_lambda_points = count("surface_lambda_points", s.surface_lambda_points);
  s.figure_alpha_points = count("figure_alpha_points", s.figure_alpha_points);
  s.figure_lambdas = r.list("optimizer", "figure_lambdas");

  s.tca_benchmark = r.choice("tca", "benchmark", std::string(algo::to_string(p.benchmark)),
                             [](const std::string& v) { return algo::parse_benchmark_choice(v); });
  if (auto d = r.maybe_integer("tca", "decision_price")) s.decision_price = *d;

  r.reject_unknown();

  // Unset lambda bounds map the rate range [10 alpha_min, alpha_max] through
  // alpha* = lambda c / I1, so the default sweep never sits on a rate bound.
  {
    const opt::Problem prob = s.problem();
    const double per_alpha = prob.risk_scale() > 0 ? prob.coeffs.temporary / prob.risk_scale() : 0;
    const bool derive = std::isfinite(per_alpha) && per_alpha > 0;
    s.lambda_min = lambda_min.value_or(derive ? 10 * s.bounds.alpha_min * per_alpha : s.lambda_min);
    s.lambda_max = lambda_max.value_or(derive ? s.bounds.alpha_max * per_alpha : s.lambda_max);
    if (lambda_min && !lambda_max && s.lambda_max <= s.lambda_min) s.lambda_max = s.lambda_min * 1e5;
    if (lambda_max && !lambda_min && s.lambda_min >= s.lambda_max) s.lambda_min = s.lambda_max * 1e-5;
    validate(s);
    if (s.figure_lambdas.empty() && derive)
      for (double alpha : {0.05, 0.2, 0.5}) s.figure_lambdas.push_back(alpha * per_alpha);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

void validate(const Scenario& s) {
  auto wrap = [](const char* where, auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(where) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string(where) + ": " + e.what());
    } catch (const std::domain_error& e) {
      throw ValidationError(std::string(where) + ": " + e.what());
    }
  };
  wrap("market", [&] { sim::validate(s.market); });
  wrap("market.profile", [&] { sim::validate(s.profile()); });
  if (s.venues.empty()) throw ValidationError("venues: at least one venue is required");
  for (const auto& v : s.venues) wrap("venue", [&] { sim::validate(v); });
  wrap("parent", [&] { algo::validate(s.parent); });
  if (s.parent.end > s.market.session_ticks) throw ValidationError("parent.end: must not exceed market.session_ticks");
  wrap("algo", [&] { algo::validate(s.algo); });
  wrap("cost", [&] { cost::validate(s.cost); });
  if (!(s.horizon_years > 0)) throw ValidationError("optimizer.horizon_years: must be > 0");
  if (!(s.bounds.alpha_min > 0 && s.bounds.alpha_min <= s.bounds.alpha_max))
    throw ValidationError("optimizer.alpha_min: need 0 < alpha_min <= alpha_max");
  if (!(s.lambda_min > 0 && s.lambda_min <= s.lambda_max))
    throw ValidationError("optimizer.lambda_min: need 0 < lambda_min <= lambda_max");
  if (s.lambda_points > 1 && !(s.lambda_min < s.lambda_max))
    throw ValidationError("optimizer.lambda_max: must exceed lambda_min for more than one point");
  for (double l : s.figure_lambdas)
    if (!(l >= 0)) throw ValidationError("optimizer.figure_lambdas: values must be >= 0");
  if (s.surface_alpha_points == 1 || s.surface_lambda_points == 1 || s.figure_alpha_points == 1)
    throw ValidationError("optimizer: sampled grids need 0 or at least 2 points");
}

std::string echo(const Scenario& s) {
  std::ostringstream o;
  const auto& m = s.market;
  o << "[run]\nseed = " << s.seed << "\noutput = " << s.output.string() << "\nsimulate = "
    << (s.simulate ? "true" : "false") << "\n\n";
  o << "[market]\np0 = " << fmt(m.p0) << "\ntick_size = " << fmt(m.tick_size) << "\nsigma = " << fmt(m.sigma)
    << "\nadv = " << fmt(m.adv) << "\nsession_ticks = " << m.session_ticks << "\nintensity = " << fmt(m.intensity)
    << "\nmarket_fraction = " << fmt(m.market_fraction) << "\nlimit_depth = " << m.limit_depth
    << "\nlimit_lifetime = " << fmt(m.limit_lifetime) << "\nhidden_fraction = " << fmt(m.hidden_fraction)
    << "\ntrading_days = " << fmt(m.trading_days) << "\nprofile = " << s.profile_shape
    << "\nprofile_buckets = " << s.profile_buckets << "\n\n";
  for (std::size_t i = 0; i < s.venues.size(); ++i) {
    const auto& v = s.venues[i];
    o << "[venue." << i << "]\nmaker_fee = " << fmt(v.maker_fee) << "\ntaker_fee = " << fmt(v.taker_fee)
      << "\nlatency = " << v.latency << "\nsupports_hidden = " << (v.supports_hidden ? "true" : "false")
      << "\nsupports_iceberg = " << (v.supports_iceberg ? "true" : "false") << "\n\n";
  }
  const auto& p = s.parent;
  o << "[parent]\nside = " << to_string(p.side) << "\nquantity = " << p.quantity << "\nstart = " << p.start
    << "\nend = " << p.end << "\n";
  if (p.limit) o << "limit = " << *p.limit << "\n";
  o << "benchmark = " << algo::to_string(p.benchmark) << "\n\n";
  const auto& a = s.algo;
  o << "[algo]\ntype = " << algo::to_string(a.type) << "\nbucket_ticks = " << a.bucket_ticks << "\npr = " << fmt(a.pr)
    << "\nsensitivity = " << fmt(a.sensitivity) << "\npr_max = " << fmt(a.pr_max) << "\nmax_child = " << a.max_child
    << "\n";
  if (a.price_limit) o << "price_limit = " << *a.price_limit << "\n";
  o << "cross_ticks = " << a.cross_ticks << "\nvolume_side = " << algo::to_string(a.volume_side) << "\n\n";
  o << "[tilt]\nthreshold = " << fmt(a.tilt.threshold) << "\nfactor = " << fmt(a.tilt.factor)
    << "\njitter = " << fmt(a.tilt.jitter) << "\ntiming_jitter = " << fmt(a.tilt.timing_jitter)
    << "\nseed = " << a.tilt.seed << "\n\n";
  o << "[routing]\nprice = " << fmt(a.route.price) << "\nprobability = " << fmt(a.route.probability)
    << "\nlatency = " << fmt(a.route.latency) << "\nfee = " << fmt(a.route.fee) << "\n\n";
  const auto& c = s.cost;
  o << "[cost]\na1 = " << fmt(c.a1) << "\na2 = " << fmt(c.a2) << "\na3 = " << fmt(c.a3) << "\nb1 = " << fmt(c.b1)
    << "\nadv = " << fmt(c.adv) << "\nsigma = " << fmt(c.sigma) << "\np0 = " << fmt(c.p0) << "\nx = " << fmt(c.x)
    << "\n\n";
  o << "[optimizer]\nhorizon_years = " << fmt(s.horizon_years) << "\nalpha_min = " << fmt(s.bounds.alpha_min)
    << "\nalpha_max = " << fmt(s.bounds.alpha_max) << "\nclose_drift = " << fmt(s.close_drift)
    << "\nlambda_min = " << fmt(s.lambda_min) << "\nlambda_max = " << fmt(s.lambda_max)
    << "\nlambda_points = " << s.lambda_points << "\nsurface_alpha_points = " << s.surface_alpha_points
    << "\nsurface_lambda_points = " << s.surface_lambda_points << "\nfigure_lambdas = " << fmt_list(s.figure_lambdas)
    << "\nfigure_alpha_points = " << s.figure_alpha_points << "\n\n";
  o << "[tca]\nbenchmark = " << algo::to_string(s.tca_benchmark) << "\n";
  if (s.decision_price) o << "decision_price = " << *s.decision_price << "\n";
  return o.str();
}

std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : echo(s)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_header(const Scenario& s) {
  return "# execlab " + std::string(kVersion) + " scenario=" + scenario_hash(s);
}

} // namespace execlab
