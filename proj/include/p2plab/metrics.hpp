#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "p2plab/network_state.hpp"

namespace p2plab {

struct MetricsSample {
  double t = 0;
  std::uint64_t population = 0;
  std::uint64_t largest_club = 0;  // 0 when no strictly largest group
  std::array<long long, 5> top_groups{};
};

struct SojournRecord {
  PeerId id;
  double t_arrive;
  double t_depart;
};

struct RunResult {
  std::vector<MetricsSample> samples;
  std::vector<SojournRecord> sojourns;
  bool explosion = false;
  std::uint64_t rng_seed = 0;
  std::uint64_t stream = 0;
};

// Time series after averaging replications pointwise.
struct AveragedSample {
  double t = 0;
  double population = 0;
  double largest_club = 0;
  std::array<double, 5> top_groups{};
};

std::vector<AveragedSample> average_replications(const std::vector<RunResult>& runs);

// Least-squares slope of population over t in [t_lo, t_hi].
double growth_slope(const std::vector<AveragedSample>& series, double t_lo, double t_hi);
double growth_slope(const std::vector<MetricsSample>& series, double t_lo, double t_hi);

struct SojournStats {
  double mean = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  std::size_t runs = 0;
  std::size_t records = 0;
  std::size_t shortfall_runs = 0;  // runs that produced fewer than count_per_run
};

// Per run, the first count_per_run departures at or after the warmup time;
// the estimate is the mean of per-run means with a normal 95% interval.
SojournStats sojourn_stats(const std::vector<RunResult>& runs, double warmup,
                           std::size_t count_per_run);

MetricsSample snapshot(const NetworkState& state, double t);

}  // namespace p2plab
