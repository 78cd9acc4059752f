#include "p2plab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "p2plab/btsim.hpp"
#include "p2plab/engine.hpp"
#include "p2plab/io.hpp"
#include "p2plab/lyapunov.hpp"
#include "p2plab/metrics.hpp"
#include "p2plab/rational.hpp"
#include "p2plab/scenario.hpp"
#include "p2plab/stats.hpp"

namespace p2plab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

long long parse_ll(const std::string& text) {
  std::size_t used = 0;
  const long long v = std::stoll(text, &used);
  if (used != text.size())
    throw std::invalid_argument("not an integer: '" + text + "'");
  return v;
}

double parse_dbl(const std::string& text) {
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size())
    throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

std::vector<long long> parse_ll_list(const std::string& text) {
  std::vector<long long> out;
  for (const auto& item : split_list(text, ',')) out.push_back(parse_ll(item));
  if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
  return out;
}

std::vector<double> parse_dbl_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text, ',')) out.push_back(parse_dbl(item));
  if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
  return out;
}

// "lo:hi:step" inclusive range, or a plain comma list.
std::vector<long long> parse_shell_list(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split_list(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("shell range must be lo:hi:step");
    const long long lo = parse_ll(parts[0]);
    const long long hi = parse_ll(parts[1]);
    const long long step = parse_ll(parts[2]);
    if (step <= 0 || hi < lo)
      throw std::invalid_argument("shell range must be lo:hi:step with step > 0");
    std::vector<long long> out;
    for (long long s = lo; s <= hi; s += step) out.push_back(s);
    return out;
  }
  return parse_ll_list(text);
}

std::string find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

json load_config_json(const std::string& path) {
  return json::parse(read_text_file(path));
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw std::invalid_argument("config must be a JSON object");
  for (const auto& item : j.items())
    if (allowed.count(item.key()) == 0)
      throw std::invalid_argument("unknown config key: " + item.key());
}

void cfg_get(const json& j, const char* key, double& v) {
  if (j.contains(key)) v = j.at(key).get<double>();
}
void cfg_get(const json& j, const char* key, long long& v) {
  if (j.contains(key)) v = j.at(key).get<long long>();
}
void cfg_get(const json& j, const char* key, std::uint64_t& v) {
  if (j.contains(key)) v = j.at(key).get<std::uint64_t>();
}
void cfg_get(const json& j, const char* key, std::string& v) {
  if (j.contains(key)) v = j.at(key).get<std::string>();
}
void cfg_get(const json& j, const char* key, bool& v) {
  if (j.contains(key)) v = j.at(key).get<bool>();
}

fs::path resolve_out_dir(const std::string& flag_value) {
  return flag_value.empty() ? default_out_dir() : fs::path(flag_value);
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  std::string protocol = "unstructured";
  long long k = 2;
  double lambda = 4;
  double us = 2;
  double mu = 1;
  std::string init = "one_club:500";
  double horizon = 1000;
  long long reps = 1;
  std::uint64_t seed = 1;
  double sample_dt = 1;
  long long m = 3;
  long long population_cap = 1'000'000;
  double fit_lo = -1;  // < 0: first half point of the horizon
  double fit_hi = -1;  // < 0: horizon
  std::string out_dir;
  bool svg = false;
};

void apply_sim_config(SimArgs& a, const json& j) {
  reject_unknown_keys(j, {"protocol", "k", "lambda", "us", "mu", "init",
                          "horizon", "reps", "seed", "sample_dt", "m",
                          "population_cap", "fit_lo", "fit_hi", "out", "svg"});
  cfg_get(j, "protocol", a.protocol);
  cfg_get(j, "k", a.k);
  cfg_get(j, "lambda", a.lambda);
  cfg_get(j, "us", a.us);
  cfg_get(j, "mu", a.mu);
  cfg_get(j, "init", a.init);
  cfg_get(j, "horizon", a.horizon);
  cfg_get(j, "reps", a.reps);
  cfg_get(j, "seed", a.seed);
  cfg_get(j, "sample_dt", a.sample_dt);
  cfg_get(j, "m", a.m);
  cfg_get(j, "population_cap", a.population_cap);
  cfg_get(j, "fit_lo", a.fit_lo);
  cfg_get(j, "fit_hi", a.fit_hi);
  cfg_get(j, "out", a.out_dir);
  cfg_get(j, "svg", a.svg);
}

void add_sim_options(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--protocol", a.protocol,
                  "unstructured|gs|dgs|waiting|ff|cc")
      ->capture_default_str();
  cmd->add_option("--k", a.k, "pieces in the file")->capture_default_str();
  cmd->add_option("--lambda", a.lambda, "peer arrival rate")
      ->capture_default_str();
  cmd->add_option("--us", a.us, "seed contact rate")->capture_default_str();
  cmd->add_option("--mu", a.mu, "peer contact rate")->capture_default_str();
  cmd->add_option("--init", a.init,
                  "empty | one_club:N | bt_mixed:A,B | custom:bits*N,...")
      ->capture_default_str();
  cmd->add_option("--horizon", a.horizon, "simulated time")
      ->capture_default_str();
  cmd->add_option("--reps", a.reps, "independent replications")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "rng seed")->capture_default_str();
  cmd->add_option("--sample-dt", a.sample_dt, "sampling interval")
      ->capture_default_str();
  cmd->add_option("--m", a.m, "common-chunk contact count")
      ->capture_default_str();
  cmd->add_option("--population-cap", a.population_cap,
                  "explosion guard on the population")
      ->capture_default_str();
  cmd->add_option("--fit-lo", a.fit_lo, "slope window start (default horizon/2)");
  cmd->add_option("--fit-hi", a.fit_hi, "slope window end (default horizon)");
  cmd->add_option("--out", a.out_dir, "output directory (default $P2PLAB_OUT or .)");
  cmd->add_flag("--svg", a.svg, "also render plot.svg");
}

ScenarioConfig scenario_from(const SimArgs& a) {
  ScenarioConfig cfg;
  cfg.protocol = protocol_from_string(a.protocol);
  cfg.k = a.k;
  cfg.lambda = a.lambda;
  cfg.mu = a.mu;
  cfg.us = a.us;
  cfg.horizon = a.horizon;
  cfg.init = InitSpec::parse(a.init);
  cfg.rng_seed = a.seed;
  cfg.replications = a.reps;
  cfg.sample_dt = a.sample_dt;
  cfg.m = a.m;
  cfg.population_cap = a.population_cap;
  cfg.validate();
  return cfg;
}

struct SimOutcome {
  fs::path dir;
  std::optional<double> slope;
  double fit_lo = 0;
  double fit_hi = 0;
  bool explosion = false;
  double final_population = 0;
  std::size_t sojourns = 0;
};

json sim_config_echo(const SimArgs& a) {
  return json{{"protocol", a.protocol},
              {"k", a.k},
              {"lambda", a.lambda},
              {"us", a.us},
              {"mu", a.mu},
              {"init", a.init},
              {"horizon", a.horizon},
              {"reps", a.reps},
              {"seed", a.seed},
              {"sample_dt", a.sample_dt},
              {"m", a.m},
              {"population_cap", a.population_cap}};
}

SimOutcome run_simulate_job(const SimArgs& a, const fs::path& dir,
                            std::ostream& out) {
  const ScenarioConfig cfg = scenario_from(a);
  std::vector<RunResult> runs;
  runs.reserve(static_cast<std::size_t>(a.reps));
  for (long long r = 0; r < a.reps; ++r)
    runs.push_back(run_scenario(cfg, static_cast<std::uint64_t>(r)));

  const auto averaged = average_replications(runs);

  SimOutcome res;
  res.dir = dir;
  res.fit_lo = a.fit_lo >= 0 ? a.fit_lo : a.horizon / 2;
  res.fit_hi = a.fit_hi >= 0 ? a.fit_hi : a.horizon;
  const bool explicit_fit = a.fit_lo >= 0 || a.fit_hi >= 0;
  try {
    res.slope = growth_slope(averaged, res.fit_lo, res.fit_hi);
  } catch (const std::invalid_argument&) {
    if (explicit_fit) throw;
  }
  for (const auto& run : runs) {
    res.explosion = res.explosion || run.explosion;
    res.sojourns += run.sojourns.size();
  }
  if (!averaged.empty()) res.final_population = averaged.back().population;

  write_timeseries_csv(dir / "timeseries.csv", averaged);
  std::vector<SojournRecord> sojourns;
  for (const auto& run : runs)
    sojourns.insert(sojourns.end(), run.sojourns.begin(), run.sojourns.end());
  write_sojourn_csv(dir / "sojourns.csv", sojourns);

  json j;
  j["command"] = "simulate";
  j["config"] = sim_config_echo(a);
  j["explosion"] = res.explosion;
  j["final_population"] = res.final_population;
  j["fit"] = {{"t_lo", res.fit_lo},
              {"t_hi", res.fit_hi},
              {"slope", res.slope ? json(*res.slope) : json(nullptr)}};
  j["sojourn_count"] = res.sojourns;
  j["streams"] = a.reps;
  write_text_file(dir / "summary.json", j.dump(2) + "\n");

  if (a.svg) {
    SvgSeries pop{"population", {}};
    SvgSeries club{"largest club", {}};
    for (const auto& s : averaged) {
      pop.points.emplace_back(s.t, s.population);
      club.points.emplace_back(s.t, s.largest_club);
    }
    const std::string title = a.protocol + ", k=" + std::to_string(a.k) +
                              ", lambda=" + format_double(a.lambda);
    write_text_file(dir / "plot.svg",
                    render_line_svg({pop, club}, title, "t", "peers"));
  }

  out << "wrote " << (dir / "timeseries.csv").string() << " ("
      << averaged.size() << " samples, " << a.reps << " replications)\n";
  out << "wrote " << (dir / "sojourns.csv").string() << " (" << res.sojourns
      << " records)\n";
  out << "wrote " << (dir / "summary.json").string() << "\n";
  if (a.svg) out << "wrote " << (dir / "plot.svg").string() << "\n";
  if (res.slope)
    out << "population slope over [" << format_double(res.fit_lo) << ", "
        << format_double(res.fit_hi) << "] = " << format_double(*res.slope)
        << "\n";
  if (res.explosion) out << "explosion: population cap reached\n";
  return res;
}

int cmd_simulate(const SimArgs& a, std::ostream& out) {
  run_simulate_job(a, resolve_out_dir(a.out_dir), out);
  return 0;
}

// -------------------------------------------------------------- bt-simulate

struct BtArgs {
  long long k = 12;
  long long arrivals = -1;  // per round; wins over lambda when >= 0
  double lambda = -1;       // peers per second
  std::string init = "bt_mixed:494,5";
  long long rounds = -1;  // wins over horizon when >= 0
  double horizon = -1;    // seconds
  bool gs = false;
  long long reps = 1;
  std::uint64_t seed = 1;
  long long neighbor_max = 50;
  long long topup_threshold = 20;
  long long tracker_response = 40;
  long long upload_slots = 4;
  long long download_cap = 40;
  long long population_cap = 1'000'000;
  double fit_lo = -1;
  double fit_hi = -1;
  std::string out_dir;
  bool svg = false;
};

void apply_bt_config(BtArgs& a, const json& j) {
  reject_unknown_keys(
      j, {"k", "arrivals", "lambda", "init", "rounds", "horizon", "gs", "reps",
          "seed", "neighbor_max", "topup_threshold", "tracker_response",
          "upload_slots", "download_cap", "population_cap", "fit_lo", "fit_hi",
          "out", "svg"});
  cfg_get(j, "k", a.k);
  cfg_get(j, "arrivals", a.arrivals);
  cfg_get(j, "lambda", a.lambda);
  cfg_get(j, "init", a.init);
  cfg_get(j, "rounds", a.rounds);
  cfg_get(j, "horizon", a.horizon);
  cfg_get(j, "gs", a.gs);
  cfg_get(j, "reps", a.reps);
  cfg_get(j, "seed", a.seed);
  cfg_get(j, "neighbor_max", a.neighbor_max);
  cfg_get(j, "topup_threshold", a.topup_threshold);
  cfg_get(j, "tracker_response", a.tracker_response);
  cfg_get(j, "upload_slots", a.upload_slots);
  cfg_get(j, "download_cap", a.download_cap);
  cfg_get(j, "population_cap", a.population_cap);
  cfg_get(j, "fit_lo", a.fit_lo);
  cfg_get(j, "fit_hi", a.fit_hi);
  cfg_get(j, "out", a.out_dir);
  cfg_get(j, "svg", a.svg);
}

void add_bt_options(CLI::App* cmd, BtArgs& a) {
  cmd->add_option("--k", a.k, "pieces in the file")->capture_default_str();
  cmd->add_option("--arrivals", a.arrivals,
                  "arrivals per 10 s round (default 30)");
  cmd->add_option("--lambda", a.lambda,
                  "arrival rate per second (alternative to --arrivals)");
  cmd->add_option("--init", a.init, "empty | one_club:N | bt_mixed:A,B")
      ->capture_default_str();
  cmd->add_option("--rounds", a.rounds, "rounds to simulate (default 300)");
  cmd->add_option("--horizon", a.horizon,
                  "seconds to simulate (alternative to --rounds)");
  cmd->add_flag("--gs", a.gs, "enable the group suppression variant");
  cmd->add_option("--reps", a.reps, "independent replications")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "rng seed")->capture_default_str();
  cmd->add_option("--neighbor-max", a.neighbor_max, "neighbor list cap")
      ->capture_default_str();
  cmd->add_option("--topup-threshold", a.topup_threshold,
                  "ask the tracker below this many neighbors")
      ->capture_default_str();
  cmd->add_option("--tracker-response", a.tracker_response,
                  "peers returned per tracker request")
      ->capture_default_str();
  cmd->add_option("--slots", a.upload_slots, "upload slots per peer")
      ->capture_default_str();
  cmd->add_option("--download-cap", a.download_cap,
                  "pieces a peer may complete per round")
      ->capture_default_str();
  cmd->add_option("--population-cap", a.population_cap,
                  "explosion guard on the population")
      ->capture_default_str();
  cmd->add_option("--fit-lo", a.fit_lo, "slope window start in seconds");
  cmd->add_option("--fit-hi", a.fit_hi, "slope window end in seconds");
  cmd->add_option("--out", a.out_dir, "output directory (default $P2PLAB_OUT or .)");
  cmd->add_flag("--svg", a.svg, "also render plot.svg");
}

BtConfig bt_config_from(const BtArgs& a) {
  BtConfig cfg;
  cfg.k = a.k;
  if (a.arrivals >= 0)
    cfg.arrivals_per_round = a.arrivals;
  else if (a.lambda >= 0)
    cfg.arrivals_per_round =
        static_cast<long long>(std::llround(a.lambda * cfg.round_seconds));
  cfg.init = InitSpec::parse(a.init);
  if (a.rounds >= 0)
    cfg.horizon_rounds = a.rounds;
  else if (a.horizon >= 0)
    cfg.horizon_rounds =
        static_cast<long long>(std::llround(a.horizon / cfg.round_seconds));
  cfg.gs_enabled = a.gs;
  cfg.rng_seed = a.seed;
  cfg.replications = a.reps;
  cfg.neighbor_max = a.neighbor_max;
  cfg.tracker_topup_threshold = a.topup_threshold;
  cfg.tracker_response = a.tracker_response;
  cfg.upload_slots = static_cast<int>(a.upload_slots);
  cfg.download_cap = a.download_cap;
  cfg.population_cap = a.population_cap;
  cfg.validate();
  return cfg;
}

int cmd_bt_simulate(const BtArgs& a, std::ostream& out) {
  const BtConfig cfg = bt_config_from(a);
  const fs::path dir = resolve_out_dir(a.out_dir);

  std::vector<BtRunResult> runs;
  runs.reserve(static_cast<std::size_t>(a.reps));
  for (long long r = 0; r < a.reps; ++r)
    runs.push_back(run_bt(cfg, static_cast<std::uint64_t>(r)));
  const auto averaged = average_bt(runs);

  const double total_seconds =
      static_cast<double>(cfg.horizon_rounds) * cfg.round_seconds;
  const double fit_lo = a.fit_lo >= 0 ? a.fit_lo : total_seconds / 2;
  const double fit_hi = a.fit_hi >= 0 ? a.fit_hi : total_seconds;
  const bool explicit_fit = a.fit_lo >= 0 || a.fit_hi >= 0;
  std::optional<double> slope;
  try {
    std::vector<double> xs, ys;
    for (const auto& s : averaged)
      if (s.t_seconds >= fit_lo && s.t_seconds <= fit_hi) {
        xs.push_back(s.t_seconds);
        ys.push_back(s.population);
      }
    slope = least_squares(xs, ys).slope;
  } catch (const std::invalid_argument&) {
    if (explicit_fit) throw;
  }
  bool explosion = false;
  for (const auto& run : runs) explosion = explosion || run.explosion;

  write_bt_csv(dir / "rounds.csv", averaged);
  json j;
  j["command"] = "bt-simulate";
  j["config"] = {{"k", cfg.k},
                 {"arrivals_per_round", cfg.arrivals_per_round},
                 {"init", a.init},
                 {"rounds", cfg.horizon_rounds},
                 {"gs", cfg.gs_enabled},
                 {"reps", a.reps},
                 {"seed", a.seed},
                 {"neighbor_max", cfg.neighbor_max},
                 {"topup_threshold", cfg.tracker_topup_threshold},
                 {"tracker_response", cfg.tracker_response},
                 {"upload_slots", cfg.upload_slots},
                 {"download_cap", cfg.download_cap},
                 {"population_cap", cfg.population_cap}};
  j["explosion"] = explosion;
  j["final_population"] = averaged.empty() ? 0.0 : averaged.back().population;
  j["fit"] = {{"t_lo", fit_lo},
              {"t_hi", fit_hi},
              {"slope", slope ? json(*slope) : json(nullptr)}};
  write_text_file(dir / "summary.json", j.dump(2) + "\n");

  if (a.svg) {
    SvgSeries pop{"population", {}};
    SvgSeries club{"largest club", {}};
    for (const auto& s : averaged) {
      pop.points.emplace_back(s.t_seconds, s.population);
      club.points.emplace_back(s.t_seconds, s.largest_club);
    }
    const std::string title =
        std::string(cfg.gs_enabled ? "bt+gs" : "bt") + ", k=" +
        std::to_string(cfg.k) + ", arrivals=" +
        std::to_string(cfg.arrivals_per_round) + "/round";
    write_text_file(dir / "plot.svg",
                    render_line_svg({pop, club}, title, "t (s)", "peers"));
  }

  out << "wrote " << (dir / "rounds.csv").string() << " (" << averaged.size()
      << " rows, " << a.reps << " replications)\n";
  out << "wrote " << (dir / "summary.json").string() << "\n";
  if (a.svg) out << "wrote " << (dir / "plot.svg").string() << "\n";
  if (slope)
    out << "population slope over [" << format_double(fit_lo) << ", "
        << format_double(fit_hi) << "] s = " << format_double(*slope)
        << " peers/s\n";
  if (explosion) out << "explosion: population cap reached\n";
  return 0;
}

// ------------------------------------------------------------ sojourn-table

struct TableArgs {
  double lambda = 6;
  double us = 1;
  double mu = 1;
  std::string init = "one_club:500";
  double warmup = 2000;
  long long count = 500;
  long long reps = 20;
  double horizon = 3000;
  std::string protocols = "gs,dgs,waiting,ff,cc:5,cc:3";
  std::string ks = "25,50,100";
  std::uint64_t seed = 1;
  std::string out_dir;
};

void apply_table_config(TableArgs& a, const json& j) {
  reject_unknown_keys(j, {"lambda", "us", "mu", "init", "warmup", "count",
                          "reps", "horizon", "protocols", "ks", "seed", "out"});
  cfg_get(j, "lambda", a.lambda);
  cfg_get(j, "us", a.us);
  cfg_get(j, "mu", a.mu);
  cfg_get(j, "init", a.init);
  cfg_get(j, "warmup", a.warmup);
  cfg_get(j, "count", a.count);
  cfg_get(j, "reps", a.reps);
  cfg_get(j, "horizon", a.horizon);
  cfg_get(j, "protocols", a.protocols);
  cfg_get(j, "ks", a.ks);
  cfg_get(j, "seed", a.seed);
  cfg_get(j, "out", a.out_dir);
}

// "cc:5" -> (cc, m=5); plain names keep the default m.
std::pair<Protocol, long long> parse_protocol_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    return {protocol_from_string(spec), 3};
  const Protocol p = protocol_from_string(spec.substr(0, colon));
  return {p, parse_ll(spec.substr(colon + 1))};
}

int cmd_sojourn_table(const TableArgs& a, std::ostream& out) {
  const fs::path dir = resolve_out_dir(a.out_dir);
  const auto protocol_specs = split_list(a.protocols, ',');
  const auto k_values = parse_ll_list(a.ks);
  if (protocol_specs.empty())
    throw std::invalid_argument("protocol list is empty");

  struct Row {
    std::string protocol;
    long long k;
    SojournStats stats;
  };
  std::vector<Row> rows;
  std::uint64_t stream = 0;
  const EarlyStop early{a.warmup, static_cast<std::size_t>(a.count)};
  for (const auto& spec : protocol_specs) {
    const auto [protocol, m] = parse_protocol_spec(spec);
    for (const long long k : k_values) {
      ScenarioConfig cfg;
      cfg.protocol = protocol;
      cfg.k = k;
      cfg.lambda = a.lambda;
      cfg.us = a.us;
      cfg.mu = a.mu;
      cfg.horizon = a.horizon;
      cfg.init = InitSpec::parse(a.init);
      cfg.rng_seed = a.seed;
      cfg.replications = a.reps;
      cfg.m = m;
      cfg.validate();
      std::vector<RunResult> runs;
      runs.reserve(static_cast<std::size_t>(a.reps));
      for (long long r = 0; r < a.reps; ++r)
        runs.push_back(run_scenario(cfg, stream++, &early));
      rows.push_back(
          {spec, k, sojourn_stats(runs, a.warmup, static_cast<std::size_t>(a.count))});
      out << spec << " k=" << k << ": mean=" << format_double(rows.back().stats.mean)
          << " ci=[" << format_double(rows.back().stats.ci_lo) << ", "
          << format_double(rows.back().stats.ci_hi) << "]"
          << (rows.back().stats.shortfall_runs > 0
                  ? " (shortfall in " +
                        std::to_string(rows.back().stats.shortfall_runs) + " runs)"
                  : "")
          << "\n";
    }
  }

  std::string csv = "protocol,k,mean,ci_lo,ci_hi,runs,records,shortfall_runs\n";
  json jrows = json::array();
  for (const auto& row : rows) {
    csv += row.protocol + "," + std::to_string(row.k) + "," +
           format_double(row.stats.mean) + "," + format_double(row.stats.ci_lo) +
           "," + format_double(row.stats.ci_hi) + "," +
           std::to_string(row.stats.runs) + "," +
           std::to_string(row.stats.records) + "," +
           std::to_string(row.stats.shortfall_runs) + "\n";
    jrows.push_back({{"protocol", row.protocol},
                     {"k", row.k},
                     {"mean", row.stats.mean},
                     {"ci_lo", row.stats.ci_lo},
                     {"ci_hi", row.stats.ci_hi},
                     {"runs", row.stats.runs},
                     {"records", row.stats.records},
                     {"shortfall_runs", row.stats.shortfall_runs}});
  }
  write_text_file(dir / "sojourn_table.csv", csv);
  json j;
  j["command"] = "sojourn-table";
  j["config"] = {{"lambda", a.lambda}, {"us", a.us},       {"mu", a.mu},
                 {"init", a.init},     {"warmup", a.warmup}, {"count", a.count},
                 {"reps", a.reps},     {"horizon", a.horizon}, {"seed", a.seed}};
  j["rows"] = jrows;
  write_text_file(dir / "sojourn_table.json", j.dump(2) + "\n");
  out << "wrote " << (dir / "sojourn_table.csv").string() << "\n";
  out << "wrote " << (dir / "sojourn_table.json").string() << "\n";
  return 0;
}

// ------------------------------------------------------- lyapunov-constants

struct ConstArgs {
  std::string lambda;
  std::string us;
  std::string c1 = "32";
  std::string c3 = "20";
  std::string c4 = "10";
};

int cmd_lyapunov_constants(const ConstArgs& a, std::ostream& out) {
  const Rational lambda = parse_rational(a.lambda);
  const Rational us = parse_rational(a.us);
  ConstantPreset preset;
  preset.c1 = parse_rational(a.c1);
  preset.c3 = parse_rational(a.c3);
  preset.c4 = parse_rational(a.c4);
  const LyapunovConstants consts = find_constants(lambda, us, preset);
  const auto ok = check_conditions(consts, lambda, us);

  out << "c1 = " << to_string(consts.c1) << "\n";
  out << "c2 = " << to_string(consts.c2) << "\n";
  out << "c3 = " << to_string(consts.c3) << "\n";
  out << "c4 = " << to_string(consts.c4) << "\n";
  out << "p  = " << to_string(consts.p) << "\n";
  bool all = true;
  out << "conditions:";
  for (std::size_t i = 0; i < ok.size(); ++i) {
    out << " " << (i + 1) << ":" << (ok[i] ? "ok" : "FAIL");
    all = all && ok[i];
  }
  out << "\n";
  out << (all ? "all conditions satisfied\n" : "conditions violated\n");
  return all ? 0 : 1;
}

// ------------------------------------------------------------ lyapunov-scan

struct ScanArgs {
  std::string lambda;
  std::string us;
  std::string mu = "1";
  std::string c1 = "32";
  std::string c3 = "20";
  std::string c4 = "10";
  std::string shells;
  std::string mode = "full";
  std::string out_dir;
};

json rational_json(const Rational& r) {
  return json{{"exact", to_string(r)}, {"value", to_double(r)}};
}

int cmd_lyapunov_scan(const ScanArgs& a, std::ostream& out) {
  Rates rates;
  rates.lambda = parse_rational(a.lambda);
  rates.us = parse_rational(a.us);
  rates.mu = parse_rational(a.mu);
  ConstantPreset preset;
  preset.c1 = parse_rational(a.c1);
  preset.c3 = parse_rational(a.c3);
  preset.c4 = parse_rational(a.c4);
  const LyapunovConstants consts = find_constants(rates.lambda, rates.us, preset);
  const auto shells = parse_shell_list(a.shells);
  ScanMode mode;
  if (a.mode == "full")
    mode = ScanMode::full;
  else if (a.mode == "grid")
    mode = ScanMode::grid;
  else
    throw std::invalid_argument("mode must be full or grid");

  const DriftScanResult res = drift_scan(consts, rates, shells, mode);
  const fs::path dir = resolve_out_dir(a.out_dir);

  std::string csv = "s,max_dv,argmax_n0,argmax_n1,argmax_n2\n";
  json jshells = json::array();
  for (const auto& shell : res.shells) {
    csv += std::to_string(shell.s) + "," +
           format_double(to_double(shell.max_dv)) + "," +
           std::to_string(shell.argmax.n0) + "," +
           std::to_string(shell.argmax.n1) + "," +
           std::to_string(shell.argmax.n2) + "\n";
    jshells.push_back({{"s", shell.s},
                       {"max_dv", rational_json(shell.max_dv)},
                       {"argmax", {shell.argmax.n0, shell.argmax.n1, shell.argmax.n2}}});
  }
  write_text_file(dir / "scan.csv", csv);

  json j;
  j["command"] = "lyapunov-scan";
  j["rates"] = {{"lambda", to_string(rates.lambda)},
                {"us", to_string(rates.us)},
                {"mu", to_string(rates.mu)}};
  j["constants"] = {{"c1", to_string(consts.c1)},
                    {"c2", to_string(consts.c2)},
                    {"c3", to_string(consts.c3)},
                    {"c4", to_string(consts.c4)},
                    {"p", to_string(consts.p)}};
  j["mode"] = a.mode;
  j["shells"] = jshells;
  j["s0"] = res.s0 ? json(*res.s0) : json(nullptr);
  j["epsilon"] = res.epsilon ? rational_json(*res.epsilon) : json(nullptr);
  j["b_bound"] = res.b_bound ? rational_json(*res.b_bound) : json(nullptr);
  j["b_argmax"] = res.b_argmax
                      ? json{res.b_argmax->n0, res.b_argmax->n1, res.b_argmax->n2}
                      : json(nullptr);
  write_text_file(dir / "scan.json", j.dump(2) + "\n");

  out << "wrote " << (dir / "scan.csv").string() << "\n";
  out << "wrote " << (dir / "scan.json").string() << "\n";
  if (res.s0) {
    out << "drift maxima negative for every scanned shell >= " << *res.s0
        << "; epsilon = " << to_string(*res.epsilon) << " ("
        << format_double(to_double(*res.epsilon)) << ")\n";
    if (res.b_bound)
      out << "drift bounded below the threshold by " << to_string(*res.b_bound)
          << " (" << format_double(to_double(*res.b_bound)) << ")\n";
    else
      out << "no scanned states below the threshold\n";
  } else {
    out << "no all-negative suffix among the scanned shells\n";
  }
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  SimArgs base;
  std::string lambda_list;
  std::string k_list;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const bool by_lambda = !a.lambda_list.empty();
  const bool by_k = !a.k_list.empty();
  if (by_lambda == by_k)
    throw std::invalid_argument("pass exactly one of --lambda-list / --k-list");

  const fs::path base_dir = resolve_out_dir(a.base.out_dir);
  json entries = json::array();
  if (by_lambda) {
    for (const double lambda : parse_dbl_list(a.lambda_list)) {
      SimArgs run = a.base;
      run.lambda = lambda;
      const fs::path dir = base_dir / ("lambda=" + format_double(lambda));
      const SimOutcome res = run_simulate_job(run, dir, out);
      entries.push_back({{"lambda", lambda},
                         {"dir", dir.string()},
                         {"slope", res.slope ? json(*res.slope) : json(nullptr)},
                         {"final_population", res.final_population},
                         {"explosion", res.explosion}});
    }
  } else {
    for (const long long k : parse_ll_list(a.k_list)) {
      SimArgs run = a.base;
      run.k = k;
      const fs::path dir = base_dir / ("k=" + std::to_string(k));
      const SimOutcome res = run_simulate_job(run, dir, out);
      entries.push_back({{"k", k},
                         {"dir", dir.string()},
                         {"slope", res.slope ? json(*res.slope) : json(nullptr)},
                         {"final_population", res.final_population},
                         {"explosion", res.explosion}});
    }
  }
  json j;
  j["command"] = "sweep";
  j["base_config"] = sim_config_echo(a.base);
  j["runs"] = entries;
  write_text_file(base_dir / "sweep_summary.json", j.dump(2) + "\n");
  out << "wrote " << (base_dir / "sweep_summary.json").string() << "\n";
  return 0;
}

// -------------------------------------------------------------------- plot

struct PlotArgs {
  std::string in;
  std::string out_path;
  std::string title;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  const std::string text = read_text_file(a.in);
  const std::string first_line = text.substr(0, text.find('\n'));

  SvgSeries pop{"population", {}};
  SvgSeries club{"largest club", {}};
  std::string x_label;
  if (first_line.rfind("t,population", 0) == 0) {
    for (const auto& s : read_timeseries_csv(a.in)) {
      pop.points.emplace_back(s.t, s.population);
      club.points.emplace_back(s.t, s.largest_club);
    }
    x_label = "t";
  } else if (first_line.rfind("round,t_seconds", 0) == 0) {
    for (const auto& s : read_bt_csv(a.in)) {
      pop.points.emplace_back(s.t_seconds, s.population);
      club.points.emplace_back(s.t_seconds, s.largest_club);
    }
    x_label = "t (s)";
  } else {
    throw std::invalid_argument("unrecognized CSV header: " + first_line);
  }

  fs::path out_path = a.out_path.empty()
                          ? fs::path(a.in).replace_extension(".svg")
                          : fs::path(a.out_path);
  const std::string title =
      a.title.empty() ? fs::path(a.in).stem().string() : a.title;
  write_text_file(out_path, render_line_svg({pop, club}, title, x_label, "peers"));
  out << "wrote " << out_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- dispatch

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"simulation lab for piece-level p2p sharing protocols"};
  app.name("p2plab");
  app.require_subcommand(1);

  const std::string sub =
      args.empty() || args[0].empty() || args[0][0] == '-' ? "" : args[0];
  const std::string config_path = find_config_arg(args);
  json config;
  if (!config_path.empty() && !sub.empty()) config = load_config_json(config_path);
  const bool have_config = !config.is_null();

  SimArgs sim_args;
  BtArgs bt_args;
  TableArgs table_args;
  ConstArgs const_args;
  ScanArgs scan_args;
  SweepArgs sweep_args;
  PlotArgs plot_args;
  std::string config_flag;  // value already consumed by the pre-scan

  if (have_config && sub == "simulate") apply_sim_config(sim_args, config);
  if (have_config && sub == "bt-simulate") apply_bt_config(bt_args, config);
  if (have_config && sub == "sojourn-table") apply_table_config(table_args, config);
  if (have_config && sub == "sweep") apply_sim_config(sweep_args.base, config);

  auto* sim = app.add_subcommand("simulate", "event-driven swarm simulation");
  add_sim_options(sim, sim_args);
  sim->add_option("--config", config_flag, "JSON config file; flags win");

  auto* bt = app.add_subcommand("bt-simulate", "round-based swarm simulation");
  add_bt_options(bt, bt_args);
  bt->add_option("--config", config_flag, "JSON config file; flags win");

  auto* table = app.add_subcommand("sojourn-table",
                                   "mean sojourn times per protocol and k");
  table->add_option("--lambda", table_args.lambda)->capture_default_str();
  table->add_option("--us", table_args.us)->capture_default_str();
  table->add_option("--mu", table_args.mu)->capture_default_str();
  table->add_option("--init", table_args.init)->capture_default_str();
  table->add_option("--warmup", table_args.warmup,
                    "count departures only after this time")
      ->capture_default_str();
  table->add_option("--count", table_args.count, "departures counted per run")
      ->capture_default_str();
  table->add_option("--reps", table_args.reps)->capture_default_str();
  table->add_option("--horizon", table_args.horizon)->capture_default_str();
  table->add_option("--protocols", table_args.protocols,
                    "comma list; cc takes cc:m")
      ->capture_default_str();
  table->add_option("--k-list", table_args.ks)->capture_default_str();
  table->add_option("--seed", table_args.seed)->capture_default_str();
  table->add_option("--out", table_args.out_dir,
                    "output directory (default $P2PLAB_OUT or .)");
  table->add_option("--config", config_flag, "JSON config file; flags win");

  auto* consts = app.add_subcommand("lyapunov-constants",
                                    "derive and check drift constants");
  consts->add_option("--lambda", const_args.lambda, "arrival rate (rational)")
      ->required();
  consts->add_option("--us", const_args.us, "seed rate (rational)")->required();
  consts->add_option("--c1", const_args.c1)->capture_default_str();
  consts->add_option("--c3", const_args.c3)->capture_default_str();
  consts->add_option("--c4", const_args.c4)->capture_default_str();

  auto* scan = app.add_subcommand("lyapunov-scan",
                                  "exact drift maxima over population shells");
  scan->add_option("--lambda", scan_args.lambda, "arrival rate (rational)")
      ->required();
  scan->add_option("--us", scan_args.us, "seed rate (rational)")->required();
  scan->add_option("--mu", scan_args.mu, "peer contact rate (rational)")
      ->capture_default_str();
  scan->add_option("--c1", scan_args.c1)->capture_default_str();
  scan->add_option("--c3", scan_args.c3)->capture_default_str();
  scan->add_option("--c4", scan_args.c4)->capture_default_str();
  scan->add_option("--shells", scan_args.shells, "lo:hi:step or comma list")
      ->required();
  scan->add_option("--mode", scan_args.mode, "full | grid")
      ->capture_default_str();
  scan->add_option("--out", scan_args.out_dir,
                   "output directory (default $P2PLAB_OUT or .)");

  auto* sweep = app.add_subcommand("sweep", "simulate across a parameter list");
  add_sim_options(sweep, sweep_args.base);
  sweep->add_option("--lambda-list", sweep_args.lambda_list, "e.g. 3,4,8");
  sweep->add_option("--k-list", sweep_args.k_list, "e.g. 2,6,48");
  sweep->add_option("--config", config_flag, "JSON config file; flags win");

  auto* plot = app.add_subcommand("plot", "render a series CSV to SVG");
  plot->add_option("--in", plot_args.in, "timeseries or rounds CSV")->required();
  plot->add_option("--out", plot_args.out_path, "SVG path (default: input with .svg)");
  plot->add_option("--title", plot_args.title);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  if (sim->parsed()) return cmd_simulate(sim_args, out);
  if (bt->parsed()) return cmd_bt_simulate(bt_args, out);
  if (table->parsed()) return cmd_sojourn_table(table_args, out);
  if (consts->parsed()) return cmd_lyapunov_constants(const_args, out);
  if (scan->parsed()) return cmd_lyapunov_scan(scan_args, out);
  if (sweep->parsed()) return cmd_sweep(sweep_args, out);
  if (plot->parsed()) return cmd_plot(plot_args, out);
  return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace p2plab
