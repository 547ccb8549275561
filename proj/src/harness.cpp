#include "execlab/harness.hpp"

#include <charconv>
#include <exception>
#include <fstream>

#include <json.hpp>

#include "execlab/event_log.hpp"
#include "execlab/parallel.hpp"

namespace execlab::harness {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string join(const std::vector<Qty>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + std::to_string(v[i]);
  return out;
}

std::ofstream open_out(const fs::path& path, const Scenario& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << file_header(s) << '\n';
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<double> alpha_grid(const Scenario& s, std::size_t n) {
  if (n == 0) return {};
  return opt::log_grid(s.bounds.alpha_min, s.bounds.alpha_max, n);
}

Price decision_price(const Scenario& s, const algo::ExecutionTrace& trace, const sim::Simulator& sim) {
  switch (s.tca_benchmark) {
    case algo::BenchmarkChoice::close: return s.market.p0_ticks();
    case algo::BenchmarkChoice::open:
      for (const auto& e : sim.log())
        if (e.event.type == EventType::fill && e.event.price) return *e.event.price;
      return trace.arrival_price;
    case algo::BenchmarkChoice::decision: return s.decision_price.value_or(trace.arrival_price);
    case algo::BenchmarkChoice::arrival: break;
  }
  return trace.arrival_price;
}

void write_report_csv(const RunReport& r, const Scenario& s, const fs::path& path) {
  std::ofstream out = open_out(path, s);
  const auto& in = r.tca_inputs;
  out << "key,value\n";
  auto row = [&](std::string_view k, const std::string& v) { out << k << ',' << v << '\n'; };
  row("algo", std::string(algo::to_string(s.algo.type)));
  row("side", std::string(to_string(in.side)));
  row("seed", std::to_string(s.seed));
  row("tca_benchmark", std::string(algo::to_string(s.tca_benchmark)));
  row("intended", std::to_string(r.intended));
  row("filled", std::to_string(r.filled));
  row("unfilled", std::to_string(r.unfilled));
  row("children", std::to_string(r.children));
  row("fills", std::to_string(r.fill_count));
  row("other_volume", std::to_string(r.other_volume));
  row("participation", num(r.participation));
  row("planned", join(r.planned));
  row("realized", join(r.realized));
  row("decision_price", std::to_string(in.decision));
  row("arrival_price", std::to_string(in.arrival.value_or(0)));
  row("final_price", std::to_string(in.final_price));
  row("tick_size", num(s.market.tick_size));
  row("fixed", std::to_string(in.fixed));
  row("is_execution", std::to_string(r.shortfall.execution));
  row("is_opportunity", std::to_string(r.shortfall.opportunity));
  row("is_fixed", std::to_string(r.shortfall.fixed));
  row("is_total", std::to_string(r.shortfall.total));
  row("expanded_delay", std::to_string(r.expanded.delay));
  row("expanded_trade_related", std::to_string(r.expanded.trade_related));
  row("expanded_opportunity", std::to_string(r.expanded.opportunity));
  row("expanded_fixed", std::to_string(r.expanded.fixed));
  row("expanded_total", std::to_string(r.expanded.total));
  for (const auto& v : r.venues) {
    row("venue" + std::to_string(v.venue) + "_filled", std::to_string(v.filled));
    row("venue" + std::to_string(v.venue) + "_fees", num(v.fees));
  }
  finish(out, path);
}

void write_report_json(const RunReport& r, const Scenario& s, const fs::path& path) {
  using nlohmann::ordered_json;
  const auto& in = r.tca_inputs;
  auto is_json = [](const tca::ISReport& x) {
    return ordered_json{{"execution", x.execution}, {"opportunity", x.opportunity}, {"fixed", x.fixed},
                        {"delay", x.delay},         {"trade_related", x.trade_related}, {"total", x.total}};
  };
  ordered_json venues = ordered_json::array();
  for (const auto& v : r.venues) venues.push_back({{"venue", v.venue}, {"filled", v.filled}, {"fees", v.fees}});
  ordered_json j = {
      {"header", file_header(s)},
      {"algo", algo::to_string(s.algo.type)},
      {"side", to_string(in.side)},
      {"seed", s.seed},
      {"tca_benchmark", algo::to_string(s.tca_benchmark)},
      {"intended", r.intended},
      {"filled", r.filled},
      {"unfilled", r.unfilled},
      {"children", r.children},
      {"fills", r.fill_count},
      {"other_volume", r.other_volume},
      {"participation", r.participation},
      {"planned", r.planned},
      {"realized", r.realized},
      {"decision_price", in.decision},
      {"arrival_price", in.arrival.value_or(0)},
      {"final_price", in.final_price},
      {"tick_size", s.market.tick_size},
      {"fixed", in.fixed},
      {"shortfall", is_json(r.shortfall)},
      {"expanded", is_json(r.expanded)},
      {"venues", venues},
  };
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_frontier_table(const fs::path& path, const Scenario& s, const std::vector<opt::FrontierPoint>& rows,
                          bool with_benchmark) {
  std::ofstream out = open_out(path, s);
  out << (with_benchmark ? "benchmark,lambda,alpha,cost,risk\n" : "lambda,alpha,cost,risk\n");
  for (const auto& p : rows) {
    if (with_benchmark) out << opt::to_string(p.benchmark) << ',';
    out << num(p.lambda) << ',' << num(p.alpha) << ',' << num(p.cost) << ',' << num(p.risk) << '\n';
  }
  finish(out, path);
}

void write_surface(const fs::path& path, const Scenario& s, const std::vector<par::SurfaceSample>& samples,
                   bool lambda_risk) {
  std::ofstream out = open_out(path, s);
  out << (lambda_risk ? "lambda,alpha,impact,lambda_risk,objective\n" : "lambda,alpha,impact,risk,objective\n");
  for (const auto& x : samples)
    out << num(x.lambda) << ',' << num(x.alpha) << ',' << num(x.impact) << ','
        << num(lambda_risk ? x.lambda * x.risk : x.risk) << ',' << num(x.objective) << '\n';
  finish(out, path);
}

} // namespace

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw ValidationError("unknown report format '" + std::string(text) + "'");
}

std::vector<opt::FrontierPoint> frontier_rows(const Scenario& s) {
  const std::vector<double> lambdas = s.lambda_grid();
  const opt::Problem p = s.problem();
  std::vector<opt::FrontierPoint> rows = par::frontier_parallel(lambdas, p, opt::Benchmark::arrival);
  const auto close = par::frontier_parallel(lambdas, p, opt::Benchmark::previous_close);
  rows.insert(rows.end(), close.begin(), close.end());
  return rows;
}

fs::path write_frontier(const Scenario& s, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const fs::path path = out_dir / "frontier.csv";
  write_frontier_table(path, s, frontier_rows(s), true);
  return path;
}

RunReport run(const Scenario& s, const fs::path& out_dir, Format format) {
  validate(s);
  fs::create_directories(out_dir);
  RunReport r;
  r.scenario_hash = scenario_hash(s);
  r.simulated = s.simulate;
  r.frontier = frontier_rows(s);

  {
    const fs::path path = out_dir / "frontier.csv";
    write_frontier_table(path, s, r.frontier, true);
    r.files.push_back(path);
  }
  if (!s.simulate) return r;
  {
    const fs::path path = out_dir / "scenario.ini";
    std::ofstream out = open_out(path, s);
    out << echo(s);
    finish(out, path);
    r.files.push_back(path);
  }

  if (s.surface_alpha_points > 0 && s.surface_lambda_points > 0) {
    const auto alphas = alpha_grid(s, s.surface_alpha_points);
    const auto lambdas = opt::log_grid(s.lambda_min, s.lambda_max, s.surface_lambda_points);
    const fs::path path = out_dir / "cost_surface.csv";
    write_surface(path, s, par::cost_surface_parallel(alphas, lambdas, s.problem()), false);
    r.files.push_back(path);
  }

  sim::MarketParams market = s.market;
  market.seed = s.seed;
  sim::Simulator sim(market, s.venues, s.profile());
  const algo::ExecutionTrace trace = algo::run_algorithm(s.algo, s.parent, sim);

  r.intended = s.parent.quantity;
  r.filled = trace.filled;
  r.unfilled = trace.unfilled;
  r.other_volume = trace.other_volume;
  r.children = trace.children.size();
  r.fill_count = trace.fills.size();
  r.participation = trace.participation();
  r.planned = trace.planned;
  r.realized = trace.realized;
  for (const auto& v : s.venues) r.venues.push_back({v.venue_id, 0, 0.0});
  double fees = 0;
  for (const auto& f : trace.fills) {
    r.venues[f.venue].filled += f.qty;
    r.venues[f.venue].fees += f.fee;
    fees += f.fee;
  }

  auto& in = r.tca_inputs;
  in.side = s.parent.side;
  in.intended = s.parent.quantity;
  in.decision = decision_price(s, trace, sim);
  in.arrival = trace.arrival_price;
  in.final_price = trace.final_price;
  for (const auto& f : trace.fills) in.fills.push_back({f.qty, f.price, f.time});
  in.fixed = std::llround(fees / s.market.tick_size);
  r.shortfall = tca::shortfall(in);
  r.expanded = tca::expanded_tc(in);

  {
    const fs::path path = out_dir / "events.log";
    std::ofstream out = open_out(path, s);
    out << kEventLogColumns << '\n';
    for (const auto& e : sim.log()) out << sim::format_sim_event(e) << '\n';
    finish(out, path);
    r.files.push_back(path);
  }
  {
    const fs::path path = out_dir / "fills.log";
    std::ofstream out = open_out(path, s);
    out << "child,venue,price_ticks,qty,clock,role,fee\n";
    for (const auto& f : trace.fills)
      out << f.child << ',' << f.venue << ',' << f.price << ',' << f.qty << ',' << f.time << ','
          << (f.role == sim::Role::maker ? "maker" : "taker") << ',' << num(f.fee) << '\n';
    finish(out, path);
    r.files.push_back(path);
  }
  {
    const fs::path path = out_dir / (format == Format::json ? "report.json" : "report.csv");
    if (format == Format::json)
      write_report_json(r, s, path);
    else
      write_report_csv(r, s, path);
    r.files.push_back(path);
  }
  return r;
}

std::vector<RunReport> run_many(const std::vector<Scenario>& scenarios, const std::vector<fs::path>& out_dirs,
                                Format format) {
  if (scenarios.size() != out_dirs.size()) throw std::invalid_argument("one output directory per scenario");
  const std::ptrdiff_t n = std::ptrdiff_t(scenarios.size());
  std::vector<RunReport> out(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[std::size_t(i)] = run(scenarios[std::size_t(i)], out_dirs[std::size_t(i)], format);
    } catch (...) {
      errors[std::size_t(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<fs::path> emit_figures(const fs::path& run_dir) {
  const fs::path ini = run_dir / "scenario.ini";
  if (!fs::exists(ini)) throw ValidationError("no scenario.ini in " + run_dir.string());
  return emit_figures(load_scenario(ini), run_dir);
}

std::vector<fs::path> emit_figures(const Scenario& s, const fs::path& run_dir) {
  fs::create_directories(run_dir);
  std::vector<fs::path> files;

  const fs::path f1 = run_dir / "figure1.csv";
  write_surface(f1, s, par::cost_surface_parallel(alpha_grid(s, s.figure_alpha_points), s.figure_lambdas, s.problem()),
                true);
  files.push_back(f1);

  const auto rows = frontier_rows(s);
  const std::size_t half = rows.size() / 2;
  const fs::path f2a = run_dir / "figure2_arrival.csv";
  const fs::path f2c = run_dir / "figure2_close.csv";
  write_frontier_table(f2a, s, {rows.begin(), rows.begin() + std::ptrdiff_t(half)}, false);
  write_frontier_table(f2c, s, {rows.begin() + std::ptrdiff_t(half), rows.end()}, false);
  files.push_back(f2a);
  files.push_back(f2c);
  return files;
}

} // namespace execlab::harness
