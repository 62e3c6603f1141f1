#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "commands.hpp"
#include "racing/track_geometry.hpp"

namespace racing::cli {

namespace {

struct Columns {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;

  std::size_t index(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::runtime_error("log is missing column '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Columns parse_log(const std::string& text) {
  Columns c;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("log is empty");
  c.names = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      row.push_back(end == cell.c_str() ? std::nan("") : v);
    }
    c.rows.push_back(std::move(row));
  }
  return c;
}

// Piecewise-linear blue-green-yellow-red ramp.
std::string ramp(double t) {
  static constexpr std::array<std::array<double, 3>, 4> stops = {
      {{0.17, 0.27, 0.75}, {0.13, 0.66, 0.52}, {0.96, 0.80, 0.18}, {0.85, 0.19, 0.15}}};
  t = std::clamp(t, 0.0, 1.0) * 3.0;
  const auto i = std::min<std::size_t>(2, static_cast<std::size_t>(t));
  const double f = t - static_cast<double>(i);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(255 * (stops[i][0] + f * (stops[i + 1][0] - stops[i][0])))),
                static_cast<int>(std::lround(255 * (stops[i][1] + f * (stops[i + 1][1] - stops[i][1])))),
                static_cast<int>(std::lround(255 * (stops[i][2] + f * (stops[i + 1][2] - stops[i][2])))));
  return buf;
}

}  // namespace

std::string render_plot(const std::string& log_text, const std::string& track_text, const std::string& raceline_text) {
  const Columns log = parse_log(log_text);
  const std::size_t ix = log.index("X"), iy = log.index("Y"), iv = log.index("speed");
  std::vector<Vec2> traj;
  std::vector<double> speed;
  for (const auto& r : log.rows) {
    if (r.size() <= std::max({ix, iy, iv})) throw std::runtime_error("log row has too few columns");
    traj.push_back({r[ix], r[iy]});
    speed.push_back(r[iv]);
  }

  std::vector<std::vector<Vec2>> bounds;
  bool bounds_closed = false;
  if (!track_text.empty()) {
    const Track t = track_from_csv_text(track_text, "track");
    bounds = {t.left_boundary(), t.right_boundary()};
    bounds_closed = t.closed();
  }
  std::vector<Vec2> line;
  bool line_closed = false;
  if (!raceline_text.empty()) {
    const Raceline r = raceline_from_csv_text(raceline_text, "raceline");
    for (const auto& p : r.points()) line.push_back({p.x, p.y});
    line_closed = r.closed();
  }

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  const auto grow = [&](const std::vector<Vec2>& pts) {
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
  };
  grow(traj);
  grow(line);
  for (const auto& b : bounds) grow(b);
  if (x0 > x1) x0 = x1 = y0 = y1 = 0.0;
  const double pad = 10.0;
  const double span = std::max({x1 - x0, y1 - y0, 1.0});
  const double width = 900.0, scale = width / span;
  const double w = (x1 - x0) * scale + 2 * pad, h = (y1 - y0) * scale + 2 * pad + 40.0;

  std::string svg;
  char buf[256];
  const auto px = [&](const Vec2& p) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", pad + (p.x - x0) * scale, pad + (y1 - p.y) * scale);
    return std::string(buf);
  };
  const auto polyline = [&](const std::vector<Vec2>& pts, bool closed, const std::string& style) {
    std::string s = closed ? "<polygon points=\"" : "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? " " : "") + px(pts[i]);
    return s + "\" fill=\"none\" " + style + "/>\n";
  };

  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                w, h, w, h);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& b : bounds) svg += polyline(b, bounds_closed, "stroke=\"black\" stroke-width=\"1.5\"");
  if (!line.empty()) svg += polyline(line, line_closed, "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"2,4\"");

  double vmin = 1e300, vmax = -1e300;
  for (double v : speed) vmin = std::min(vmin, v), vmax = std::max(vmax, v);
  const double vr = vmax > vmin ? vmax - vmin : 1.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const std::string color = ramp((0.5 * (speed[i - 1] + speed[i]) - vmin) / vr);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                  pad + (traj[i - 1].x - x0) * scale, pad + (y1 - traj[i - 1].y) * scale, pad + (traj[i].x - x0) * scale,
                  pad + (y1 - traj[i].y) * scale, color.c_str());
    svg += buf;
  }

  // Colour bar.
  const double by = h - 30.0;
  for (int i = 0; i < 20; ++i) {
    std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>\n",
                  pad + 60.0 + 10.0 * i, by, ramp(i / 19.0).c_str());
    svg += buf;
  }
  if (speed.empty()) vmin = vmax = 0.0;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%.1f</text>\n<text x=\"%.1f\" y=\"%.1f\" "
                "font-size=\"12\">%.1f m/s</text>\n",
                pad, by + 10.0, vmin, pad + 270.0, by + 10.0, vmax);
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace racing::cli
