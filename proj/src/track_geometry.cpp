#include "racing/track_geometry.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "racing/key_value.hpp"

namespace racing {

namespace {

// Thomas algorithm; sub[i] couples i to i-1, sup[i] couples i to i+1.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                      std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

// Cyclic tridiagonal system via Sherman-Morrison. sub[0] couples row 0 to
// n-1 and sup[n-1] couples row n-1 to 0.
std::vector<double> solve_cyclic(const std::vector<double>& sub, const std::vector<double>& diag,
                                 const std::vector<double>& sup, const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  const double gamma = -diag[0];
  const double alpha = sup[n - 1];
  const double beta = sub[0];
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  std::vector<double> lo = sub, up = sup;
  const auto x = solve_tridiagonal(lo, d, up, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const auto z = solve_tridiagonal(lo, d, up, u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

// Second derivatives of the interpolant at the knots.
std::vector<double> spline_moments(const std::vector<double>& h, const std::vector<double>& y, bool closed) {
  const std::size_t n = y.size();
  if (closed) {
    std::vector<double> sub(n), diag(n), sup(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n;
      const std::size_t ip = (i + 1) % n;
      sub[i] = h[im];
      diag[i] = 2.0 * (h[im] + h[i]);
      sup[i] = h[i];
      rhs[i] = 6.0 * ((y[ip] - y[i]) / h[i] - (y[i] - y[im]) / h[im]);
    }
    return solve_cyclic(sub, diag, sup, rhs);
  }
  std::vector<double> M(n, 0.0);
  const std::size_t m = n - 2;
  std::vector<double> sub(m), diag(m), sup(m), rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    sub[k] = h[i - 1];
    diag[k] = 2.0 * (h[i - 1] + h[i]);
    sup[k] = h[i];
    rhs[k] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
  }
  const auto inner = solve_tridiagonal(sub, diag, sup, rhs);
  for (std::size_t k = 0; k < m; ++k) M[k + 1] = inner[k];
  return M;
}

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

CubicSpline2D CubicSpline2D::fit(std::span<const Vec2> points, bool closed) {
  const std::size_t n = points.size();
  if (n < 4) throw GeometryError("spline needs at least 4 points");
  const std::size_t segs = closed ? n : n - 1;
  std::vector<double> h(segs);
  for (std::size_t i = 0; i < segs; ++i) {
    h[i] = dist(points[i], points[(i + 1) % n]);
    if (!(h[i] > 1e-9)) throw GeometryError("duplicate consecutive points at index " + std::to_string(i));
  }
  CubicSpline2D sp;
  sp.closed_ = closed;
  sp.knots_.resize(segs + 1);
  sp.knots_[0] = 0.0;
  for (std::size_t i = 0; i < segs; ++i) sp.knots_[i + 1] = sp.knots_[i] + h[i];

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  const auto build = [&](const std::vector<double>& v, std::vector<Coeffs>& out) {
    const auto M = spline_moments(h, v, closed);
    out.resize(segs);
    for (std::size_t i = 0; i < segs; ++i) {
      const std::size_t j = (i + 1) % n;
      out[i].a = v[i];
      out[i].b = (v[j] - v[i]) / h[i] - h[i] * (2.0 * M[i] + M[j]) / 6.0;
      out[i].c = 0.5 * M[i];
      out[i].d = (M[j] - M[i]) / (6.0 * h[i]);
    }
  };
  build(xs, sp.cx_);
  build(ys, sp.cy_);
  return sp;
}

double CubicSpline2D::curvature(double s) const {
  const auto p = eval(s);
  const double sp2 = p.dx * p.dx + p.dy * p.dy;
  return (p.dx * p.ddy - p.dy * p.ddx) / (sp2 * std::sqrt(sp2));
}

std::size_t CubicSpline2D::nearest_knot(double x, double y) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  const std::size_t count = closed_ ? segment_count() : segment_count() + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = cx_[std::min(i, segment_count() - 1)].a - x;
    const double dy = cy_[std::min(i, segment_count() - 1)].a - y;
    double d = dx * dx + dy * dy;
    if (i == segment_count()) {
      const Vec2 end = point(length());
      d = (end.x - x) * (end.x - x) + (end.y - y) * (end.y - y);
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

bool ends_meet(std::span<const Vec2> pts) {
  if (pts.size() < 2) return false;
  double max_step = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) max_step = std::max(max_step, dist(pts[i - 1], pts[i]));
  return dist(pts.front(), pts.back()) <= 1.5 * max_step;
}

namespace {

template <class P>
std::vector<Vec2> positions(const std::vector<P>& pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

template <class P>
void drop_closing_duplicate(std::vector<P>& pts) {
  if (pts.size() > 1 && std::hypot(pts.front().x - pts.back().x, pts.front().y - pts.back().y) < 1e-9)
    pts.pop_back();
}

}  // namespace

Raceline Raceline::from_points(std::vector<RacelinePoint> points) {
  const bool closed = ends_meet(positions(points));
  return from_points(std::move(points), closed);
}

Raceline Raceline::from_points(std::vector<RacelinePoint> points, bool closed) {
  if (closed) drop_closing_duplicate(points);
  Raceline line;
  const auto pos = positions(points);
  line.spline_ = CubicSpline2D::fit(pos, closed);
  line.points_ = std::move(points);
  const std::size_t n = line.points_.size();
  line.s_.resize(n);
  line.heading_.resize(n);
  line.curvature_.resize(n);
  line.radius_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    line.s_[i] = line.spline_.knots()[i];
    line.heading_[i] = line.spline_.heading(line.s_[i]);
    line.curvature_[i] = line.spline_.curvature(line.s_[i]);
    line.radius_[i] = 1.0 / std::max(std::abs(line.curvature_[i]), kCurvatureMin);
  }
  return line;
}

double Raceline::project(double x, double y, int r_proj, std::optional<double> alpha0) const {
  const double start = alpha0 ? *alpha0 : s_[spline_.nearest_knot(x, y) % s_.size()];
  return project_on(spline_, x, y, start, r_proj);
}

HeadingRadius Raceline::heading_and_radius(double alpha) const {
  const auto hr = heading_and_radius_at(spline_, alpha);
  return {hr.theta, hr.R};
}

double Raceline::ref_speed(double alpha) const {
  const double w = spline_.wrap(alpha);
  const std::size_t i = spline_.segment_at(w);
  const std::size_t j = (i + 1) % points_.size();
  const auto& k = spline_.knots();
  const double f = (w - k[i]) / (k[i + 1] - k[i]);
  const double vi = std::hypot(points_[i].vx, points_[i].vy);
  const double vj = std::hypot(points_[j].vx, points_[j].vy);
  return vi + f * (vj - vi);
}

Track Track::from_points(std::vector<TrackPoint> points) {
  const bool closed = ends_meet(positions(points));
  return from_points(std::move(points), closed);
}

Track Track::from_points(std::vector<TrackPoint> points, bool closed) {
  if (closed) drop_closing_duplicate(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].w_left > 0.0 && points[i].w_right > 0.0))
      throw GeometryError("track widths must be positive at point " + std::to_string(i));
  }
  Track t;
  t.spline_ = CubicSpline2D::fit(positions(points), closed);
  t.points_ = std::move(points);
  return t;
}

double Track::project(double x, double y, int iterations, std::optional<double> alpha0) const {
  const double start = alpha0 ? *alpha0 : spline_.knots()[spline_.nearest_knot(x, y)];
  return project_on(spline_, x, y, start, iterations);
}

double Track::lane_violation(double x, double y, std::optional<double> alpha0) const {
  // A cold projection gets extra iterations so boundary tests are exact.
  const double alpha = project(x, y, alpha0 ? 3 : 8, alpha0);
  return lane_margin_at(x, y, alpha);
}

std::vector<Vec2> Track::left_boundary() const {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double s = spline_.knots()[i];
    const auto p = spline_.eval(s);
    const double n = std::hypot(p.dx, p.dy);
    out.push_back({p.x - p.dy / n * points_[i].w_left, p.y + p.dx / n * points_[i].w_left});
  }
  return out;
}

std::vector<Vec2> Track::right_boundary() const {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double s = spline_.knots()[i];
    const auto p = spline_.eval(s);
    const double n = std::hypot(p.dx, p.dy);
    out.push_back({p.x + p.dy / n * points_[i].w_right, p.y - p.dx / n * points_[i].w_right});
  }
  return out;
}

namespace {

// Rows of a numeric CSV with a required header; `#` lines are comments.
std::vector<std::vector<double>> read_numeric_csv(const std::string& text, const std::string& source,
                                                  const std::string& header) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool seen_header = false;
  std::vector<std::vector<double>> rows;
  const std::size_t cols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      std::string compact;
      for (char c : line)
        if (c != ' ' && c != '\t') compact += c;
      if (compact != header) throw ParseError(source, lineno, "expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ParseError(source, lineno, "non-numeric cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != cols) throw ParseError(source, lineno, "expected " + std::to_string(cols) + " columns");
    rows.push_back(std::move(row));
  }
  if (!seen_header) throw ParseError(source, lineno, "missing header '" + header + "'");
  return rows;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

Track track_from_csv_text(const std::string& text, const std::string& source) {
  std::vector<TrackPoint> pts;
  for (const auto& r : read_numeric_csv(text, source, "x_m,y_m,w_left_m,w_right_m")) pts.push_back({r[0], r[1], r[2], r[3]});
  return Track::from_points(std::move(pts));
}

Track read_track_csv(const std::string& path) { return track_from_csv_text(read_text_file(path), path); }

void write_track_csv(const std::string& path, const Track& track) {
  std::string out = "x_m,y_m,w_left_m,w_right_m\n";
  for (const auto& p : track.points()) out += fmt(p.x) + "," + fmt(p.y) + "," + fmt(p.w_left) + "," + fmt(p.w_right) + "\n";
  write_file(path, out);
}

Raceline raceline_from_csv_text(const std::string& text, const std::string& source) {
  std::vector<RacelinePoint> pts;
  for (const auto& r : read_numeric_csv(text, source, "x_m,y_m,vx_mps,vy_mps")) pts.push_back({r[0], r[1], r[2], r[3]});
  return Raceline::from_points(std::move(pts));
}

Raceline read_raceline_csv(const std::string& path) { return raceline_from_csv_text(read_text_file(path), path); }

std::string raceline_csv_text(const Raceline& line) {
  std::string out = "x_m,y_m,vx_mps,vy_mps\n";
  for (const auto& p : line.points()) out += fmt(p.x) + "," + fmt(p.y) + "," + fmt(p.vx) + "," + fmt(p.vy) + "\n";
  return out;
}

void write_raceline_csv(const std::string& path, const Raceline& line) { write_file(path, raceline_csv_text(line)); }

}  // namespace racing
