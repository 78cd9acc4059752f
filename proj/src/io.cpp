#include "p2plab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace p2plab {

std::filesystem::path default_out_dir() {
  if (const char* dir = std::getenv("P2PLAB_OUT"); dir && *dir)
    return std::filesystem::path(dir);
  return std::filesystem::path(".");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(pos));
      return cells;
    }
    cells.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

double parse_cell(const std::string& cell, const std::filesystem::path& path) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw std::invalid_argument("bad numeric cell '" + cell + "' in " + path.string());
  return v;
}

constexpr const char* kTimeseriesHeader =
    "t,population,largest_club,group1,group2,group3,group4,group5";
constexpr const char* kBtHeader = "round,t_seconds,population,largest_club_size,departures_cum";

}  // namespace

void write_timeseries_csv(const std::filesystem::path& path,
                          const std::vector<MetricsSample>& samples) {
  auto out = open_out(path);
  out << kTimeseriesHeader << "\n";
  for (const auto& s : samples) {
    out << format_double(s.t) << ',' << s.population << ',' << s.largest_club;
    for (long long g : s.top_groups) out << ',' << g;
    out << "\n";
  }
  finish(out, path);
}

void write_timeseries_csv(const std::filesystem::path& path,
                          const std::vector<AveragedSample>& samples) {
  auto out = open_out(path);
  out << kTimeseriesHeader << "\n";
  for (const auto& s : samples) {
    out << format_double(s.t) << ',' << format_double(s.population) << ','
        << format_double(s.largest_club);
    for (double g : s.top_groups) out << ',' << format_double(g);
    out << "\n";
  }
  finish(out, path);
}

std::vector<AveragedSample> read_timeseries_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kTimeseriesHeader)
    throw std::invalid_argument("not a time-series CSV (bad header): " + path.string());
  std::vector<AveragedSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8)
      throw std::invalid_argument("bad row width in " + path.string());
    AveragedSample s;
    s.t = parse_cell(cells[0], path);
    s.population = parse_cell(cells[1], path);
    s.largest_club = parse_cell(cells[2], path);
    for (int g = 0; g < 5; ++g) s.top_groups[g] = parse_cell(cells[3 + g], path);
    out.push_back(s);
  }
  return out;
}

void write_sojourn_csv(const std::filesystem::path& path,
                       const std::vector<SojournRecord>& records) {
  auto out = open_out(path);
  out << "peer_id,t_arrive,t_depart\n";
  for (const auto& r : records)
    out << r.id << ',' << format_double(r.t_arrive) << ',' << format_double(r.t_depart)
        << "\n";
  finish(out, path);
}

std::vector<BtAveragedSample> average_bt(const std::vector<BtRunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("average_bt: no runs");
  const std::size_t n = runs[0].samples.size();
  for (const auto& run : runs)
    if (run.samples.size() != n)
      throw std::invalid_argument("average_bt: sample grids differ in length");
  std::vector<BtAveragedSample> out(n);
  const double r = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    out[i].round = runs[0].samples[i].round;
    out[i].t_seconds = runs[0].samples[i].t_seconds;
    for (const auto& run : runs) {
      out[i].population += static_cast<double>(run.samples[i].population);
      out[i].largest_club += static_cast<double>(run.samples[i].largest_club);
      out[i].departures_cum += static_cast<double>(run.samples[i].departures_cum);
    }
    out[i].population /= r;
    out[i].largest_club /= r;
    out[i].departures_cum /= r;
  }
  return out;
}

void write_bt_csv(const std::filesystem::path& path,
                  const std::vector<BtRoundSample>& samples) {
  auto out = open_out(path);
  out << kBtHeader << "\n";
  for (const auto& s : samples)
    out << s.round << ',' << format_double(s.t_seconds) << ',' << s.population << ','
        << s.largest_club << ',' << s.departures_cum << "\n";
  finish(out, path);
}

void write_bt_csv(const std::filesystem::path& path,
                  const std::vector<BtAveragedSample>& samples) {
  auto out = open_out(path);
  out << kBtHeader << "\n";
  for (const auto& s : samples)
    out << s.round << ',' << format_double(s.t_seconds) << ','
        << format_double(s.population) << ',' << format_double(s.largest_club) << ','
        << format_double(s.departures_cum) << "\n";
  finish(out, path);
}

std::vector<BtAveragedSample> read_bt_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kBtHeader)
    throw std::invalid_argument("not a BT rounds CSV (bad header): " + path.string());
  std::vector<BtAveragedSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) throw std::invalid_argument("bad row width in " + path.string());
    BtAveragedSample s;
    s.round = static_cast<long long>(parse_cell(cells[0], path));
    s.t_seconds = parse_cell(cells[1], path);
    s.population = parse_cell(cells[2], path);
    s.largest_club = parse_cell(cells[3], path);
    s.departures_cum = parse_cell(cells[4], path);
    out.push_back(s);
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  finish(out, path);
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buf.str();
}

namespace {

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  if (std::abs(v) >= 1 && std::abs(v - std::round(v)) < 1e-9)
    return format_double(std::round(v));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string render_line_svg(const std::vector<SvgSeries>& series, const std::string& title,
                            const std::string& x_label, const std::string& y_label) {
  const double width = 860, height = 520;
  const double left = 70, right = 30, top = 46, bottom = 56;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x_min = x_max = x;
        y_min = y_max = y;
        any = true;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  y_min = std::min(y_min, 0.0);

  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  static const char* palette[] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1=\"" << svg_num(sx(fx)) << "\" y1=\"" << svg_num(top) << "\" x2=\""
        << svg_num(sx(fx)) << "\" y2=\"" << svg_num(top + plot_h)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << svg_num(left) << "\" y1=\"" << svg_num(sy(fy)) << "\" x2=\""
        << svg_num(left + plot_w) << "\" y2=\"" << svg_num(sy(fy))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << svg_num(sx(fx)) << "\" y=\"" << svg_num(top + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(fx) << "</text>\n";
    svg << "<text x=\"" << svg_num(left - 8) << "\" y=\"" << svg_num(sy(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(fy) << "</text>\n";
  }

  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">" << y_label
      << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % 5];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[i].points)
      svg << svg_num(sx(x)) << ',' << svg_num(sy(y)) << ' ';
    svg << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(i);
    svg << "<line x1=\"" << left + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
        << left + plot_w - 122 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w - 116 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace p2plab
