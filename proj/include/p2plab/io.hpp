#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2plab/btsim.hpp"
#include "p2plab/metrics.hpp"
#include "p2plab/scenario.hpp"

namespace p2plab {

// Unreadable or unwritable paths; the CLI maps this to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// $P2PLAB_OUT when set, otherwise the current directory.
std::filesystem::path default_out_dir();

// Shortest decimal that parses back to the same double; used for every float
// we emit so files are byte-identical across runs and round-trip exactly.
std::string format_double(double v);

void write_timeseries_csv(const std::filesystem::path& path,
                          const std::vector<MetricsSample>& samples);
void write_timeseries_csv(const std::filesystem::path& path,
                          const std::vector<AveragedSample>& samples);
std::vector<AveragedSample> read_timeseries_csv(const std::filesystem::path& path);

void write_sojourn_csv(const std::filesystem::path& path,
                       const std::vector<SojournRecord>& records);

// Replication-averaged BT series; identical column layout, float cells.
struct BtAveragedSample {
  long long round = 0;
  double t_seconds = 0;
  double population = 0;
  double largest_club = 0;
  double departures_cum = 0;
};

std::vector<BtAveragedSample> average_bt(const std::vector<BtRunResult>& runs);

void write_bt_csv(const std::filesystem::path& path,
                  const std::vector<BtRoundSample>& samples);
void write_bt_csv(const std::filesystem::path& path,
                  const std::vector<BtAveragedSample>& samples);
std::vector<BtAveragedSample> read_bt_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Plain line chart: axes, tick labels, one polyline per series, a small
// legend. Self-contained SVG, no renderer involved.
std::string render_line_svg(const std::vector<SvgSeries>& series, const std::string& title,
                            const std::string& x_label, const std::string& y_label);

}  // namespace p2plab
