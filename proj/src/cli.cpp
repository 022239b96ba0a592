#include "rbmld/cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "rbmld/acceptance.hpp"
#include "rbmld/errors.hpp"
#include "rbmld/fredholm.hpp"
#include "rbmld/saddle.hpp"
#include "rbmld/sim.hpp"

namespace rbmld::cli {

namespace {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\r\n";
  }
}

void write_json(const Table& t, std::ostream& os) {
  nlohmann::ordered_json doc;
  doc["command"] = t.command;
  if (!t.summary.empty()) doc["summary"] = t.summary;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (n == 1) return {lo};
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw invalid_argument(what);
}

// key=value lines, '#' comments.  Keys mirror the long flag names.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

// Appends config entries whose flag is absent from the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  for (const auto& [key, value] : read_config(path)) {
    if (key == "config" || given.count(key)) continue;
    if (value == "true") {
      args.push_back("--" + key);
    } else if (value != "false") {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

struct Common {
  std::string out;
  std::string format = "csv";
  std::string config;
  std::string log_level = "info";
};

struct RatesArgs {
  std::string ic = "all";
  double a_min = 0.01, a_max = 10.0;
  int points = 50;
};

struct ProbArgs {
  std::string ic = "packed";
  double t = 4, a = 1, rho = 1, s_offset = 0;
  int grid = 48, ppu = 64;
  bool no_refine = false;
};

struct TailArgs {
  std::string ic = "packed";
  double a = 1;
  std::vector<double> t_list{4, 8, 16};
  int grid = 48, ppu = 64;
};

struct SimArgs {
  std::string ic = "packed";
  int t = 4, reps = 1000, cutoff = 0;
  double dt = 0, rho = 1, a = 0;
  unsigned long long seed = 1;
  unsigned workers = 0;
  bool plain = false;
};

struct FigureArgs {
  double a_max = 6;
  int points = 200;
};

struct VerifyArgs {
  bool fast = false;
  unsigned long long seed = 20240611;
  std::vector<int> criteria;
  unsigned workers = 0;
};

FredholmOptions fredholm_options(int grid, int ppu, bool refine, double s_offset = 0) {
  require(grid >= 8, "--grid must be >= 8");
  FredholmOptions fo;
  fo.grid_size = static_cast<std::size_t>(grid);
  fo.contour.points_per_unit = ppu;
  fo.contour.validate();
  fo.refine = refine;
  fo.s_offset = s_offset;
  return fo;
}

Table cmd_rates(const RatesArgs& r) {
  require(r.a_min > 0 && r.a_max >= r.a_min && std::isfinite(r.a_max), "rates: need 0 < a-min <= a-max");
  require(r.points >= 1, "rates: --points must be >= 1");
  require(r.ic == "all" || r.ic == "packed" || r.ic == "flat" || r.ic == "stationary" || r.ic == "stat",
          "rates: --ic must be all, packed, flat or stationary");
  const bool all = r.ic == "all";
  const auto ic = all ? InitialCondition::packed : parse_initial_condition(r.ic);
  Table t;
  t.command = "rates";
  if (all) t.columns = {"a", "r_packed", "r_flat", "r_stat", "z_a", "w_minus", "w_plus"};
  else if (ic == InitialCondition::packed) t.columns = {"a", "r_packed", "w_minus", "w_plus"};
  else if (ic == InitialCondition::flat) t.columns = {"a", "r_flat", "z_a"};
  else t.columns = {"a", "r_stat", "w_plus"};
  for (double a : log_grid(r.a_min, r.a_max, r.points)) {
    const Deviation d(a);
    std::vector<Cell> row{a};
    if (all) {
      const auto s = saddle_packed(d);
      row.insert(row.end(), {rate_packed(d), rate_flat(d).rate, rate_stat(d), solve_za(d), s.saddle_lo, s.saddle_hi});
    } else if (ic == InitialCondition::packed) {
      const auto s = saddle_packed(d);
      row.insert(row.end(), {rate_packed(d), s.saddle_lo, s.saddle_hi});
    } else if (ic == InitialCondition::flat) {
      const auto f = rate_flat(d);
      row.insert(row.end(), {f.rate, f.saddle_lo});
    } else {
      row.insert(row.end(), {rate_stat(d), saddle_packed(d).saddle_hi});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table cmd_prob(const ProbArgs& p) {
  const auto ic = parse_initial_condition(p.ic);
  const Deviation a(p.a);
  require(p.t > 0 && std::isfinite(p.t), "prob: --t must be > 0");
  require(p.rho > 0 && p.rho <= 1, "prob: --rho must lie in (0, 1]");
  require(p.rho == 1 || ic == InitialCondition::stationary, "prob: --rho applies to the stationary case only");
  require(std::isfinite(p.s_offset), "prob: --s-offset must be finite");
  const auto fo = fredholm_options(p.grid, p.ppu, !p.no_refine, p.s_offset);
  ProbResult res{};
  switch (ic) {
    case InitialCondition::packed: res = prob_packed(p.t, a, fo); break;
    case InitialCondition::flat: res = prob_flat(p.t, a, fo); break;
    case InitialCondition::stationary:
      res = p.rho == 1 ? prob_stat(p.t, a, 0.0, fo) : prob_stat_rho(p.t, a, p.rho, fo);
      break;
  }
  Table t;
  t.command = "prob";
  t.columns = {"ic", "t", "a", "rho", "s_offset", "p", "log_survival", "im_residue", "refinement_delta"};
  t.rows.push_back({std::string(to_string(ic)), p.t, p.a, p.rho, p.s_offset, res.p, res.log_survival,
                    res.im_residue, res.refinement_delta});
  return t;
}

Table cmd_tail(const TailArgs& ta) {
  const auto ic = parse_initial_condition(ta.ic);
  const Deviation a(ta.a);
  require(!ta.t_list.empty(), "tail: --t-list is empty");
  for (double t : ta.t_list) require(t > 0 && std::isfinite(t), "tail: times must be > 0");
  const auto fo = fredholm_options(ta.grid, ta.ppu, true);
  Table t;
  t.command = "tail";
  t.columns = {"t", "log_survival", "r_hat", "r_theory", "scaled_prefactor", "predicted_log_survival"};
  for (const auto& row : tail_rate_table(ic, a, ta.t_list, fo))
    t.rows.push_back({row.t, row.log_survival, row.r_hat, row.r_theory, row.scaled_prefactor,
                      row.predicted_log_survival});
  return t;
}

Table cmd_simulate(const SimArgs& s) {
  SimConfig cfg;
  cfg.ic = parse_initial_condition(s.ic);
  cfg.t = s.t;
  cfg.dt = s.dt;
  cfg.reps = s.reps;
  cfg.cutoff = s.cutoff;
  cfg.seed = s.seed;
  cfg.rho = s.rho;
  cfg.workers = s.workers;
  cfg.bridge = !s.plain;
  require(s.dt >= 0, "simulate: --dt must be > 0");
  require(s.a >= 0 && std::isfinite(s.a), "simulate: --a must be > 0");
  cfg.validate();
  const auto batch = simulate_samples(cfg);
  spdlog::info("simulate: {} replicas in {:.2f} s", cfg.reps, batch.elapsed);
  Table t;
  t.command = "simulate";
  t.columns = {"rep", "position"};
  const double level = 2.0 * cfg.t + s.a * cfg.t;
  if (s.a > 0) t.columns.push_back("exceeds");
  for (std::size_t r = 0; r < batch.values.size(); ++r) {
    std::vector<Cell> row{static_cast<long long>(r), batch.values[r]};
    if (s.a > 0) row.emplace_back(static_cast<long long>(batch.values[r] >= level));
    t.rows.push_back(std::move(row));
  }
  t.summary["ic"] = std::string(to_string(cfg.ic));
  t.summary["t"] = cfg.t;
  t.summary["dt"] = cfg.step();
  t.summary["reps"] = cfg.reps;
  t.summary["seed"] = cfg.seed;
  if (s.a > 0) {
    const auto est = tail_estimate(batch, Deviation(s.a));
    t.summary["a"] = s.a;
    t.summary["p_hat"] = est.p_hat;
    t.summary["stderr"] = est.stderr_;
    t.summary["upper_bound"] = est.upper_bound;
    t.summary["hits"] = est.hits;
    spdlog::info("simulate: p_hat = {:.6g} +- {:.3g}", est.p_hat, est.stderr_);
  }
  return t;
}

Table cmd_figure1(const FigureArgs& f) {
  require(f.a_max > 0 && std::isfinite(f.a_max), "figure1: --a-max must be > 0");
  require(f.points >= 2, "figure1: --points must be >= 2");
  Table t;
  t.command = "figure1";
  t.columns = {"a", "r_flat", "asym_small", "asym_large"};
  for (int i = 1; i <= f.points; ++i) {
    const Deviation d(f.a_max * i / f.points);
    t.rows.push_back({d.value(), rate_flat(d).rate, rate_asymptote(InitialCondition::flat, d, Regime::small),
                      rate_asymptote(InitialCondition::flat, d, Regime::large)});
  }
  return t;
}

int cmd_verify(const VerifyArgs& v, Table& t, std::ostream& out) {
  AcceptanceOptions opt;
  opt.fast = v.fast;
  opt.seed = v.seed;
  opt.workers = v.workers;
  const auto all = criterion_ids();
  std::vector<int> ids = v.criteria.empty() ? all : v.criteria;
  for (int id : ids)
    require(std::find(all.begin(), all.end(), id) != all.end(), "verify: unknown criterion " + std::to_string(id));
  t.command = "verify";
  t.columns = {"id", "name", "status", "detail"};
  bool ok = true;
  for (int id : ids) {
    const auto r = run_criterion(id, opt);
    out << report_line(r) << "\n" << std::flush;
    spdlog::info("criterion {} took {:.1f} s", id, r.seconds);
    ok = ok && r.passed;
    t.rows.push_back({static_cast<long long>(r.id), r.name, std::string(r.passed ? "PASS" : "FAIL"), r.detail});
  }
  return ok ? exit_ok : exit_verify_failed;
}

void configure_logging(std::ostream& err, const std::string& level) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto logger = std::make_shared<spdlog::logger>("rbmld", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::from_str(level));
  spdlog::set_default_logger(logger);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Common common;
  RatesArgs rates;
  ProbArgs prob;
  TailArgs tail;
  SimArgs sim;
  FigureArgs fig;
  VerifyArgs verify;

  CLI::App app{"Tail probabilities and rate functions for one-sided reflected Brownian motions"};
  app.name("rbmld");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--out", common.out, "Write the table to this file instead of stdout");
  app.add_option("--format", common.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", common.config, "key=value file mirroring the flags; flags win");
  app.add_option("--log-level", common.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  auto* c_rates = app.add_subcommand("rates", "Rate functions and saddles on a log grid of a");
  c_rates->add_option("--ic", rates.ic, "all, packed, flat or stationary");
  c_rates->add_option("--a-min", rates.a_min);
  c_rates->add_option("--a-max", rates.a_max);
  c_rates->add_option("--points", rates.points);

  auto* c_prob = app.add_subcommand("prob", "P(x_t(t) <= 2t + at) from the Fredholm determinant");
  c_prob->add_option("--ic", prob.ic);
  c_prob->add_option("--t", prob.t);
  c_prob->add_option("--a", prob.a);
  c_prob->add_option("--rho", prob.rho);
  c_prob->add_option("--s-offset", prob.s_offset);
  c_prob->add_option("--grid", prob.grid);
  c_prob->add_option("--ppu", prob.ppu, "Contour nodes per unit length");
  c_prob->add_flag("--no-refine", prob.no_refine);

  auto* c_tail = app.add_subcommand("tail", "Finite-t rate estimates against the rate function");
  c_tail->add_option("--ic", tail.ic);
  c_tail->add_option("--a", tail.a);
  c_tail->add_option("--t-list", tail.t_list)->delimiter(',');
  c_tail->add_option("--grid", tail.grid);
  c_tail->add_option("--ppu", tail.ppu);

  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo samples of x_t(t)");
  c_sim->add_option("--ic", sim.ic);
  c_sim->add_option("--t", sim.t);
  c_sim->add_option("--dt", sim.dt, "Time step (default 1e-4 max(1, t))");
  c_sim->add_option("--reps", sim.reps);
  c_sim->add_option("--cutoff", sim.cutoff, "Particles kept below x_t (default 4t)");
  c_sim->add_option("--seed", sim.seed);
  c_sim->add_option("--rho", sim.rho);
  c_sim->add_option("--a", sim.a, "Also estimate P(x_t(t) >= 2t + at)");
  c_sim->add_option("--workers", sim.workers);
  c_sim->add_flag("--plain", sim.plain, "Endpoint reflection only");

  auto* c_fig = app.add_subcommand("figure1", "Flat rate function and its two asymptotes");
  c_fig->add_option("--a-max", fig.a_max);
  c_fig->add_option("--points", fig.points);

  auto* c_verify = app.add_subcommand("verify", "Run the acceptance suite");
  c_verify->add_flag("--fast", verify.fast, "Reduced sample sizes");
  c_verify->add_option("--seed", verify.seed);
  c_verify->add_option("--criterion", verify.criteria)->delimiter(',');
  c_verify->add_option("--workers", verify.workers);

  std::vector<std::string> args;
  try {
    args = merge_config(raw_args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_validation;
  }

  configure_logging(err, common.log_level);
  try {
    Table table;
    int status = exit_ok;
    std::ostringstream verify_text;
    if (*c_rates) table = cmd_rates(rates);
    else if (*c_prob) table = cmd_prob(prob);
    else if (*c_tail) table = cmd_tail(tail);
    else if (*c_sim) table = cmd_simulate(sim);
    else if (*c_fig) table = cmd_figure1(fig);
    else if (*c_verify) status = cmd_verify(verify, table, common.out.empty() ? out : verify_text);

    if (*c_verify && common.out.empty()) return status;
    std::ofstream file;
    if (!common.out.empty()) {
      file.open(common.out, std::ios::binary);
      if (!file) throw invalid_argument("cannot open " + common.out + " for writing");
    }
    std::ostream& os = common.out.empty() ? out : file;
    if (common.format == "json") write_json(table, os);
    else write_csv(table, os);
    if (*c_verify) out << verify_text.str();
    return status;
  } catch (const invalid_argument& e) {
    spdlog::error("{}", e.what());
    return exit_validation;
  } catch (const numeric_failure& e) {
    spdlog::error("{}", e.what());
    return exit_numeric;
  } catch (const singularity_error& e) {
    spdlog::error("{}", e.what());
    return exit_numeric;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rbmld::cli
