// Acceptance checklist. Each criterion prints one PASS/FAIL line; the exit
// code is 0 only when every selected criterion passes. Run a single one with
// --criterion N.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "p2plab/btsim.hpp"
#include "p2plab/cli.hpp"
#include "p2plab/engine.hpp"
#include "p2plab/io.hpp"
#include "p2plab/lyapunov.hpp"
#include "p2plab/metrics.hpp"
#include "p2plab/rng.hpp"
#include "p2plab/scenario.hpp"
#include "p2plab/stats.hpp"

namespace {

using namespace p2plab;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::vector<RunResult> replicate(const ScenarioConfig& cfg, int reps,
                                 const EarlyStop* stop = nullptr) {
  std::vector<RunResult> runs;
  runs.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r)
    runs.push_back(run_scenario(cfg, static_cast<std::uint64_t>(r), stop));
  return runs;
}

bool any_explosion(const std::vector<RunResult>& runs) {
  for (const auto& r : runs)
    if (r.explosion) return true;
  return false;
}

struct Window {
  double mean = 0;
  double max = 0;
};

Window population_window(const std::vector<AveragedSample>& series, double lo, double hi) {
  Window w;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& s : series) {
    if (s.t < lo || s.t > hi) continue;
    sum += s.population;
    w.max = std::max(w.max, s.population);
    ++n;
  }
  if (n) w.mean = sum / static_cast<double>(n);
  return w;
}

Window bt_population_window(const std::vector<BtAveragedSample>& series, double lo, double hi) {
  Window w;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& s : series) {
    if (s.t_seconds < lo || s.t_seconds > hi) continue;
    sum += s.population;
    w.max = std::max(w.max, s.population);
    ++n;
  }
  if (n) w.mean = sum / static_cast<double>(n);
  return w;
}

double bt_slope(const std::vector<BtAveragedSample>& series, double lo, double hi) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    if (s.t_seconds < lo || s.t_seconds > hi) continue;
    xs.push_back(s.t_seconds);
    ys.push_back(s.population);
  }
  return least_squares(xs, ys).slope;
}

ScenarioConfig one_club_config(Protocol proto, int k, double lambda, double us, double horizon) {
  ScenarioConfig cfg;
  cfg.protocol = proto;
  cfg.k = k;
  cfg.lambda = lambda;
  cfg.us = us;
  cfg.mu = 1;
  cfg.init = InitSpec::parse("one_club:500");
  cfg.horizon = horizon;
  cfg.sample_dt = 1;
  cfg.rng_seed = 1;
  return cfg;
}

// 1. A one-club swarm without suppression grows linearly at lambda - us.
Outcome unstructured_growth() {
  std::ostringstream msg;
  bool ok = true;
  for (double lambda : {3.0, 4.0}) {
    ScenarioConfig cfg = one_club_config(Protocol::unstructured, 2, lambda, 2, 1000);
    auto runs = replicate(cfg, 5);
    if (any_explosion(runs)) return {false, "population explosion"};
    double slope = growth_slope(average_replications(runs), 200, 1000);
    double expect = lambda - 2;
    if (std::fabs(slope - expect) > 0.25 * expect) ok = false;
    msg << "lambda " << lambda << ": slope " << fmt(slope) << " vs " << fmt(expect)
        << " +/- 25%; ";
  }
  return {ok, msg.str()};
}

// 2. In the same lambda = 4 run the club holds >= 90% of the population from
// t = 200 on.
Outcome one_club_dominance() {
  ScenarioConfig cfg = one_club_config(Protocol::unstructured, 2, 4, 2, 1000);
  auto runs = replicate(cfg, 5);
  if (any_explosion(runs)) return {false, "population explosion"};
  auto avg = average_replications(runs);
  double min_ratio = 1;
  for (const auto& s : avg) {
    if (s.t < 200 || s.population <= 0) continue;
    min_ratio = std::min(min_ratio, s.largest_club / s.population);
  }
  return {min_ratio >= 0.9,
          "min largest-club share for t >= 200: " + fmt(min_ratio) + " (need 0.9)"};
}

// Shared stability test: flat slope over [1500, 3000] and no sample in that
// window above 10x the window mean. The run starts from a 500-peer club far
// above the small equilibrium, so the outlier bound reads the measurement
// window; divergence through the transient would still trip the slope, the
// window maximum or the population cap.
Outcome stability_battery(const std::vector<std::tuple<Protocol, int, double>>& cases) {
  std::ostringstream msg;
  bool ok = true;
  for (const auto& [proto, k, lambda] : cases) {
    ScenarioConfig cfg = one_club_config(proto, k, lambda, 2, 3000);
    auto runs = replicate(cfg, 5);
    if (any_explosion(runs)) return {false, "population explosion"};
    auto avg = average_replications(runs);
    double slope = growth_slope(avg, 1500, 3000);
    Window w = population_window(avg, 1500, 3000);
    double bound = 0.05 * (lambda - 2);
    bool flat = std::fabs(slope) < bound;
    bool bounded = w.mean > 0 && w.max <= 10 * w.mean;
    if (!(flat && bounded)) ok = false;
    msg << to_string(proto) << " k=" << k << " lambda=" << lambda << ": slope " << fmt(slope)
        << " (bound " << fmt(bound) << "), max/mean " << fmt(w.max / w.mean) << "; ";
  }
  return {ok, msg.str()};
}

Outcome gs_stability_two_pieces() {
  return stability_battery({{Protocol::gs, 2, 8.0}, {Protocol::gs, 2, 24.0}});
}

Outcome gs_stability_many_pieces() {
  return stability_battery({{Protocol::gs, 6, 12.0}, {Protocol::gs, 48, 12.0}});
}

Outcome dgs_stability() {
  return stability_battery(
      {{Protocol::dgs, 2, 12.0}, {Protocol::dgs, 6, 12.0}, {Protocol::dgs, 48, 12.0}});
}

// 6. Mean sojourn times, pooled over 20 replications of the first 500
// departures after a 2000 time-unit warmup.
Outcome sojourn_table() {
  struct Cell {
    const char* name;
    Protocol proto;
    int m;
    int k;
    double expect;
  };
  static const Cell cells[] = {
      {"gs", Protocol::gs, 3, 25, 28.95},         {"gs", Protocol::gs, 3, 50, 54.50},
      {"gs", Protocol::gs, 3, 100, 106.11},       {"dgs", Protocol::dgs, 3, 25, 29.12},
      {"dgs", Protocol::dgs, 3, 50, 54.60},       {"dgs", Protocol::dgs, 3, 100, 105.39},
      {"waiting", Protocol::waiting, 3, 25, 29.18}, {"waiting", Protocol::waiting, 3, 50, 54.92},
      {"waiting", Protocol::waiting, 3, 100, 105.69}, {"ff", Protocol::ff, 3, 25, 30.54},
      {"ff", Protocol::ff, 3, 50, 55.89},         {"ff", Protocol::ff, 3, 100, 105.84},
      {"cc m=5", Protocol::cc, 5, 25, 30.39},     {"cc m=5", Protocol::cc, 5, 50, 57.63},
      {"cc m=5", Protocol::cc, 5, 100, 110.92},   {"cc m=3", Protocol::cc, 3, 25, 36.88},
      {"cc m=3", Protocol::cc, 3, 50, 67.39},     {"cc m=3", Protocol::cc, 3, 100, 126.02},
  };
  const int reps = 20;
  const EarlyStop stop{2000, 500};
  double means[18];
  std::size_t shortfalls = 0;
  bool ok = true;
  double worst_rel = 0;
  const Cell* worst = &cells[0];
  for (int i = 0; i < 18; ++i) {
    const Cell& cell = cells[i];
    ScenarioConfig cfg;
    cfg.protocol = cell.proto;
    cfg.k = cell.k;
    cfg.lambda = 6;
    cfg.us = 1;
    cfg.mu = 1;
    cfg.m = cell.m;
    cfg.init = InitSpec::parse("one_club:500");
    cfg.horizon = 3000;
    cfg.sample_dt = 1;
    cfg.rng_seed = 1;
    std::vector<RunResult> runs;
    for (int r = 0; r < reps; ++r)
      runs.push_back(run_scenario(cfg, static_cast<std::uint64_t>(i * reps + r), &stop));
    SojournStats stats = sojourn_stats(runs, 2000, 500);
    shortfalls += stats.shortfall_runs;
    means[i] = stats.mean;
    double rel = std::fabs(stats.mean - cell.expect) / cell.expect;
    if (rel > worst_rel) {
      worst_rel = rel;
      worst = &cell;
    }
    if (rel > 0.10) ok = false;
  }
  bool slowest = true;
  for (int j = 0; j < 3; ++j)
    for (int p = 0; p < 5; ++p)
      if (means[15 + j] <= means[3 * p + j]) slowest = false;
  if (!slowest || shortfalls) ok = false;
  std::ostringstream msg;
  msg << "worst cell " << worst->name << " k=" << worst->k << ": " << fmt(100 * worst_rel)
      << "% off (bound 10%); cc m=3 slowest at every k: " << (slowest ? "yes" : "NO")
      << "; shortfall runs: " << shortfalls;
  return {ok, msg.str()};
}

// 7. The constant search lands on the published pair and every condition
// holds exactly.
Outcome constant_search() {
  LyapunovConstants consts = find_constants(4, 2);
  auto conds = check_conditions(consts, 4, 2);
  bool all = true;
  for (bool c : conds) all = all && c;
  bool ok = consts.c1 == 32 && consts.c3 == 20 && consts.c4 == 10 && consts.c2 == 9693 &&
            consts.p == Rational(1, 19388) && all;
  return {ok, "c2 = " + to_string(consts.c2) + ", p = " + to_string(consts.p) +
                  ", conditions " + (all ? "all true" : "VIOLATED")};
}

// 8. Full-enumeration scan certifies negative drift above some shell for the
// small-lambda constants; grid scan stays negative at 2e4 / 5e4 / 1e5 for the
// lambda = 4 constants.
Outcome drift_certification() {
  std::ostringstream msg;
  LyapunovConstants small = find_constants(Rational(1, 2), 2,
                                           ConstantPreset{20, Rational(25, 2), Rational(25, 4)});
  Rates small_rates{Rational(1, 2), 2, 1};
  std::vector<long long> shells;
  for (long long s = 100; s <= 2000; s += 50) shells.push_back(s);
  DriftScanResult scan = drift_scan(small, small_rates, shells, ScanMode::full);
  bool doubled = false;
  if (!scan.s0) {
    doubled = true;
    shells.clear();
    for (long long s = 100; s <= 4000; s += 50) shells.push_back(s);
    scan = drift_scan(small, small_rates, shells, ScanMode::full);
  }
  bool ok = scan.s0.has_value();
  if (ok)
    for (const auto& sh : scan.shells)
      if (sh.s >= *scan.s0 && !(sh.max_dv < 0)) ok = false;
  msg << "full scan: s0 " << (scan.s0 ? std::to_string(*scan.s0) : std::string("absent"))
      << (doubled ? " (after doubling)" : "") << "; ";

  LyapunovConstants paper = find_constants(4, 2);
  Rates paper_rates{4, 2, 1};
  DriftScanResult grid = drift_scan(paper, paper_rates, {20000, 50000, 100000}, ScanMode::grid);
  msg << "grid maxima:";
  for (const auto& sh : grid.shells) {
    if (!(sh.max_dv < 0)) ok = false;
    msg << " " << fmt(to_double(sh.max_dv));
  }
  return {ok, msg.str()};
}

// 9. The per-case drift formulas match the generator sum exactly on 1000
// draws per covered region and shell; draws are with replacement since the
// tie regions hold fewer than 1000 states.
Outcome closed_form_agreement() {
  const LyapunovConstants consts{20, 61, Rational(25, 2), Rational(25, 4), Rational(1, 63)};
  const Rates rates{Rational(1, 200), 2, 1};
  struct Region {
    const char* label;
    TypeCountState (*draw)(long long, Rng&);
  };
  static const Region regions[] = {
      {"1",
       [](long long s, Rng& rng) {
         long long lim = (s - 62) / 62 + 1;
         long long n1 = static_cast<long long>(rng.uniform_int(static_cast<std::uint64_t>(lim)));
         long long n2 = static_cast<long long>(rng.uniform_int(static_cast<std::uint64_t>(lim)));
         return TypeCountState{s - n1 - n2, n1, n2};
       }},
      {"3.1",
       [](long long s, Rng& rng) {
         long long n0 = 1 + static_cast<long long>(rng.uniform_int(100));
         long long n2 = static_cast<long long>(rng.uniform_int(101));
         return TypeCountState{n0, s - n0 - n2, n2};
       }},
      {"3.1m",
       [](long long s, Rng& rng) {
         long long n0 = 1 + static_cast<long long>(rng.uniform_int(100));
         long long n1 = static_cast<long long>(rng.uniform_int(101));
         return TypeCountState{n0, n1, s - n0 - n1};
       }},
      {"3.2",
       [](long long s, Rng& rng) {
         long long n2 = static_cast<long long>(rng.uniform_int(301));
         return TypeCountState{0, s - n2, n2};
       }},
      {"3.2m",
       [](long long s, Rng& rng) {
         long long n1 = static_cast<long long>(rng.uniform_int(301));
         return TypeCountState{0, n1, s - n1};
       }},
      {"4.3",
       [](long long s, Rng& rng) {
         long long lo = (s + 3) / 3;
         long long hi = (s - 1) / 2;
         long long t = lo + static_cast<long long>(
                                rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
         return TypeCountState{s - 2 * t, t, t};
       }},
      {"4.4", [](long long s, Rng&) { return TypeCountState{0, s / 2, s / 2}; }},
  };
  Rng rng(2026, 9);
  std::size_t min_distinct = static_cast<std::size_t>(-1);
  for (long long s : {2000LL, 5000LL}) {
    for (const Region& region : regions) {
      int accepted = 0;
      int attempts = 0;
      std::set<std::tuple<long long, long long, long long>> distinct;
      while (accepted < 1000 && attempts < 50000) {
        ++attempts;
        TypeCountState st = region.draw(s, rng);
        auto label = closed_form_case(st, consts);
        if (!label || *label != region.label) continue;
        auto formula = closed_form_drift(st, consts, rates);
        if (!formula || *formula != drift(st, consts, rates)) {
          std::ostringstream bad;
          bad << "mismatch in region " << region.label << " at (" << st.n0 << "," << st.n1
              << "," << st.n2 << ")";
          return {false, bad.str()};
        }
        ++accepted;
        distinct.insert({st.n0, st.n1, st.n2});
      }
      if (accepted < 1000) {
        std::ostringstream bad;
        bad << "region " << region.label << " at s=" << s << ": only " << accepted
            << " matching draws";
        return {false, bad.str()};
      }
      min_distinct = std::min(min_distinct, distinct.size());
    }
  }
  return {true, "7 regions x 2 shells, 1000 exact matches each (smallest region holds " +
                    std::to_string(min_distinct) + " distinct states)"};
}

// 10. One simulated event from a frozen state follows the two-piece chain's
// transition rates.
Outcome generator_agreement() {
  const int trials = 100000;
  Rng rng(1, 42);
  std::ostringstream msg;
  bool ok = true;
  for (const auto& start : {std::array<long long, 3>{10, 5, 3}, std::array<long long, 3>{0, 8, 2}}) {
    std::string init = "custom:";
    bool first = true;
    const char* bits[] = {"00", "10", "01"};
    for (int i = 0; i < 3; ++i) {
      if (start[i] == 0) continue;
      if (!first) init += ",";
      init += std::string(bits[i]) + "*" + std::to_string(start[i]);
      first = false;
    }
    ScenarioConfig cfg;
    cfg.protocol = Protocol::gs;
    cfg.k = 2;
    cfg.lambda = 4;
    cfg.us = 2;
    cfg.mu = 1;
    cfg.init = InitSpec::parse(init);
    NetworkState base(cfg);
    const PieceProfile p00 = PieceProfile::from_string("00");
    const PieceProfile p10 = PieceProfile::from_string("10");
    const PieceProfile p01 = PieceProfile::from_string("01");

    TypeCountState tc{start[0], start[1], start[2]};
    Rates rates{4, 2, 1};
    Rational total_rate = 0;
    std::map<std::array<long long, 3>, Rational> rate_of;
    for (const auto& [rate, next] : gs_generator_k2(tc, rates)) {
      rate_of[{next.n0, next.n1, next.n2}] += rate;
      total_rate += rate;
    }
    Rational R = rates.lambda + rates.us + rates.mu * tc.s();

    std::map<std::array<long long, 3>, long long> observed;
    for (int t = 0; t < trials; ++t) {
      NetworkState st = base;
      Event ev = next_event(st, rng);
      ArrivalLedger ledger;
      dispatch(st, ev, ledger, rng);
      observed[{st.groups().count_of(p00), st.groups().count_of(p10),
                st.groups().count_of(p01)}]++;
    }
    for (const auto& [key, count] : observed) {
      if (key != start && rate_of.find(key) == rate_of.end()) {
        std::ostringstream bad;
        bad << "unexpected transition to (" << key[0] << "," << key[1] << "," << key[2]
            << ") x" << count;
        return {false, bad.str()};
      }
    }
    std::vector<double> obs, expect;
    for (const auto& [key, rate] : rate_of) {
      obs.push_back(static_cast<double>(observed[key]));
      expect.push_back(to_double(rate / R) * trials);
    }
    obs.push_back(static_cast<double>(observed[start]));
    expect.push_back(to_double((R - total_rate) / R) * trials);
    Chi2Result chi = chi2_test(obs, expect);
    if (!chi.pass) ok = false;
    msg << "(" << start[0] << "," << start[1] << "," << start[2] << "): chi2 "
        << fmt(chi.statistic) << " vs " << fmt(chi.critical_99) << " (df " << chi.df << "); ";
  }
  return {ok, msg.str()};
}

// 11. Swapping the two single-piece types never changes the potential or the
// drift.
Outcome swap_symmetry() {
  LyapunovConstants consts = find_constants(4, 2);
  Rates rates{4, 2, 1};
  long long pairs = 0;
  for (long long s = 0; s <= 100; ++s)
    for (long long n0 = 0; n0 <= s; ++n0)
      for (long long n1 = 0; n0 + n1 <= s; ++n1) {
        long long n2 = s - n0 - n1;
        if (n1 >= n2) continue;
        TypeCountState a{n0, n1, n2};
        TypeCountState b{n0, n2, n1};
        if (potential(a, consts).V != potential(b, consts).V)
          return {false, "potential asymmetry at (" + std::to_string(n0) + "," +
                             std::to_string(n1) + "," + std::to_string(n2) + ")"};
        if (drift(a, consts, rates) != drift(b, consts, rates))
          return {false, "drift asymmetry at (" + std::to_string(n0) + "," +
                             std::to_string(n1) + "," + std::to_string(n2) + ")"};
        ++pairs;
      }
  return {true, std::to_string(pairs) + " swapped pairs over s <= 100, all exactly equal"};
}

// 12. The round-based swarm without suppression grows at about 1 peer/s when
// 30 peers arrive per 10 s round and the seed sustains ~2 departures/s.
Outcome bt_growth() {
  BtConfig cfg;
  cfg.k = 12;
  cfg.arrivals_per_round = 30;
  cfg.init = InitSpec::parse("bt_mixed:494,5");
  cfg.horizon_rounds = 300;
  cfg.rng_seed = 1;
  std::vector<BtRunResult> runs;
  for (int r = 0; r < 5; ++r) runs.push_back(run_bt(cfg, static_cast<std::uint64_t>(r)));
  for (const auto& r : runs)
    if (r.explosion) return {false, "population explosion"};
  double slope = bt_slope(average_bt(runs), 500, 3000);
  return {std::fabs(slope - 1) <= 0.3,
          "slope " + fmt(slope) + " peers/s vs 1 +/- 30% over t in [500, 3000]"};
}

// 13. With local suppression the same swarm stays bounded at both sizes.
Outcome bt_gs_stability() {
  std::ostringstream msg;
  bool ok = true;
  struct Case {
    long long k;
    long long arrivals;
    const char* rate;
  };
  for (const Case& c : {Case{12, 30, "3/s"}, Case{48, 80, "8/s"}}) {
    BtConfig cfg;
    cfg.k = c.k;
    cfg.arrivals_per_round = c.arrivals;
    cfg.init = InitSpec::parse("bt_mixed:499,0");
    cfg.horizon_rounds = 500;
    cfg.gs_enabled = true;
    cfg.rng_seed = 1;
    std::vector<BtRunResult> runs;
    for (int r = 0; r < 3; ++r) runs.push_back(run_bt(cfg, static_cast<std::uint64_t>(r)));
    for (const auto& r : runs)
      if (r.explosion) return {false, "population explosion"};
    auto avg = average_bt(runs);
    double slope = bt_slope(avg, 2500, 5000);
    Window w = bt_population_window(avg, 2500, 5000);
    bool flat = std::fabs(slope) < 0.05;
    bool bounded = w.mean > 0 && w.max <= 10 * w.mean;
    if (!(flat && bounded)) ok = false;
    msg << "k=" << c.k << " lambda=" << c.rate << ": slope " << fmt(slope) << ", max/mean "
        << fmt(w.max / w.mean) << "; ";
  }
  return {ok, msg.str()};
}

// 14. Re-running a command with the same seed reproduces the CSV outputs byte
// for byte.
Outcome rerun_determinism() {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "p2plab_acceptance_c14";
  fs::remove_all(base);

  auto run_into = [](const std::vector<std::string>& head, const fs::path& dir) {
    std::vector<std::string> args = head;
    args.push_back("--out");
    args.push_back(dir.string());
    std::ostringstream out, err;
    return run_cli(args, out, err);
  };

  const std::vector<std::string> simulate = {
      "simulate", "--protocol", "gs",   "--k",       "2",    "--lambda", "8",
      "--us",     "2",          "--mu", "1",         "--init", "one_club:500",
      "--horizon", "3000",      "--reps", "5",       "--sample-dt", "1",
      "--seed",   "1",          "--fit-lo", "1500",  "--fit-hi", "3000"};
  if (run_into(simulate, base / "a") != 0 || run_into(simulate, base / "b") != 0)
    return {false, "simulate command failed"};
  bool sim_ok =
      read_text_file(base / "a" / "timeseries.csv") == read_text_file(base / "b" / "timeseries.csv") &&
      read_text_file(base / "a" / "sojourns.csv") == read_text_file(base / "b" / "sojourns.csv");

  const std::vector<std::string> scan = {
      "lyapunov-scan", "--lambda", "1/2", "--us",     "2",           "--c1",   "20",
      "--c3",          "25/2",     "--c4", "25/4",    "--shells",    "100:2000:50",
      "--mode",        "full"};
  if (run_into(scan, base / "sa") != 0 || run_into(scan, base / "sb") != 0)
    return {false, "scan command failed"};
  bool scan_ok =
      read_text_file(base / "sa" / "scan.csv") == read_text_file(base / "sb" / "scan.csv");

  std::string detail = std::string("simulate CSVs ") + (sim_ok ? "identical" : "DIFFER") +
                       ", scan CSV " + (scan_ok ? "identical" : "DIFFERS");
  return {sim_ok && scan_ok, detail};
}

struct Entry {
  int n;
  const char* name;
  Outcome (*fn)();
};

const Entry kEntries[] = {
    {1, "unstructured one-club growth rate", unstructured_growth},
    {2, "one-club dominance", one_club_dominance},
    {3, "group suppression stability, k=2", gs_stability_two_pieces},
    {4, "group suppression stability, k=6/48", gs_stability_many_pieces},
    {5, "decentralized suppression stability", dgs_stability},
    {6, "sojourn time table", sojourn_table},
    {7, "constant search", constant_search},
    {8, "negative drift certification", drift_certification},
    {9, "closed-form drift agreement", closed_form_agreement},
    {10, "generator vs simulator rates", generator_agreement},
    {11, "swap symmetry", swap_symmetry},
    {12, "round-based swarm growth", bt_growth},
    {13, "round-based swarm with suppression", bt_gs_stability},
    {14, "rerun determinism", rerun_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else if (arg == "--help") {
      std::cout << "usage: acceptance [--criterion N]\n";
      return 0;
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      return 2;
    }
  }
  if (selected < 0 || selected > 14) {
    std::cerr << "criterion out of range: " << selected << "\n";
    return 2;
  }
  bool all = true;
  for (const Entry& entry : kEntries) {
    if (selected && entry.n != selected) continue;
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& ex) {
      outcome = {false, std::string("exception: ") + ex.what()};
    }
    std::cout << "criterion " << std::setw(2) << entry.n << ": "
              << (outcome.pass ? "PASS" : "FAIL") << "  " << entry.name;
    if (!outcome.detail.empty()) std::cout << "  [" << outcome.detail << "]";
    std::cout << "\n" << std::flush;
    if (!outcome.pass) all = false;
  }
  return all ? 0 : 1;
}
