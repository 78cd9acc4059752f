#include "p2plab/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "p2plab/stats.hpp"

namespace p2plab {

MetricsSample snapshot(const NetworkState& state, double t) {
  MetricsSample s;
  s.t = t;
  s.population = state.population();
  s.largest_club = static_cast<std::uint64_t>(state.groups().largest_club_size());
  auto top = state.groups().top_counts(5);
  for (std::size_t i = 0; i < top.size(); ++i) s.top_groups[i] = top[i];
  return s;
}

std::vector<AveragedSample> average_replications(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("average_replications: no runs");
  const std::size_t n = runs[0].samples.size();
  for (const auto& run : runs) {
    if (run.samples.size() != n)
      throw std::invalid_argument("average_replications: sample grids differ in length");
    for (std::size_t i = 0; i < n; ++i)
      if (run.samples[i].t != runs[0].samples[i].t)
        throw std::invalid_argument("average_replications: sample grids differ in t");
  }
  std::vector<AveragedSample> out(n);
  const double r = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    AveragedSample& avg = out[i];
    avg.t = runs[0].samples[i].t;
    for (const auto& run : runs) {
      const MetricsSample& s = run.samples[i];
      avg.population += static_cast<double>(s.population);
      avg.largest_club += static_cast<double>(s.largest_club);
      for (int g = 0; g < 5; ++g) avg.top_groups[g] += static_cast<double>(s.top_groups[g]);
    }
    avg.population /= r;
    avg.largest_club /= r;
    for (int g = 0; g < 5; ++g) avg.top_groups[g] /= r;
  }
  return out;
}

namespace {

template <typename Sample>
double slope_over(const std::vector<Sample>& series, double t_lo, double t_hi) {
  if (t_hi <= t_lo) throw std::invalid_argument("growth_slope: empty window");
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    if (s.t < t_lo || s.t > t_hi) continue;
    xs.push_back(s.t);
    ys.push_back(static_cast<double>(s.population));
  }
  if (xs.size() < 2) throw std::invalid_argument("growth_slope: fewer than 2 samples in window");
  return least_squares(xs, ys).slope;
}

}  // namespace

double growth_slope(const std::vector<AveragedSample>& series, double t_lo, double t_hi) {
  return slope_over(series, t_lo, t_hi);
}

double growth_slope(const std::vector<MetricsSample>& series, double t_lo, double t_hi) {
  return slope_over(series, t_lo, t_hi);
}

SojournStats sojourn_stats(const std::vector<RunResult>& runs, double warmup,
                           std::size_t count_per_run) {
  if (runs.empty()) throw std::invalid_argument("sojourn_stats: no runs");
  if (count_per_run == 0) throw std::invalid_argument("sojourn_stats: count_per_run == 0");
  SojournStats stats;
  std::vector<double> run_means;
  for (const auto& run : runs) {
    double sum = 0;
    std::size_t used = 0;
    for (const auto& rec : run.sojourns) {
      if (rec.t_depart < warmup) continue;
      sum += rec.t_depart - rec.t_arrive;
      if (++used == count_per_run) break;
    }
    if (used < count_per_run) ++stats.shortfall_runs;
    if (used == 0) continue;
    run_means.push_back(sum / static_cast<double>(used));
    stats.records += used;
  }
  if (run_means.empty()) throw std::invalid_argument("sojourn_stats: no post-warmup departures");
  stats.runs = run_means.size();
  stats.mean = mean_of(run_means);
  const double half =
      1.96 * std::sqrt(sample_variance(run_means) / static_cast<double>(run_means.size()));
  stats.ci_lo = stats.mean - half;
  stats.ci_hi = stats.mean + half;
  return stats;
}

}  // namespace p2plab
