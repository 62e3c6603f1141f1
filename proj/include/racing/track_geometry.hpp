#pragma once

// Cubic splines over chord length, racelines and tracks, point-to-line
// projection, and the signed lane margin.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "racing/dual.hpp"

namespace racing {

inline constexpr double kRadiusMax = 1e4;  // m, radius used on straights
inline constexpr double kCurvatureMin = 1.0 / kRadiusMax;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
struct SplineSample {
  T x, y;    // position
  T dx, dy;  // first derivative w.r.t. the chord parameter
  T ddx, ddy;
};

// Interpolating cubic spline through 2D points, parameterized by cumulative
// chord length. Natural end conditions for open curves, periodic for closed
// ones (C2 at every knot).
class CubicSpline2D {
 public:
  CubicSpline2D() = default;

  // Throws GeometryError for fewer than 4 points or repeated consecutive
  // points.
  static CubicSpline2D fit(std::span<const Vec2> points, bool closed);

  bool closed() const { return closed_; }
  double length() const { return knots_.back(); }
  std::size_t segment_count() const { return knots_.size() - 1; }
  const std::vector<double>& knots() const { return knots_; }

  // Parameter mapped into [0, length]: wrapped for closed curves, clamped for
  // open ones.
  double wrap(double s) const {
    const double L = length();
    if (closed_) {
      double w = std::fmod(s, L);
      if (w < 0.0) w += L;
      return w;
    }
    return std::clamp(s, 0.0, L);
  }

  std::size_t segment_at(double s_wrapped) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), s_wrapped);
    std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(i, segment_count() - 1);
  }

  template <class T>
  SplineSample<T> eval(const T& s) const {
    const double sv = value(s);
    const double w = wrap(sv);
    const std::size_t i = segment_at(w);
    // Preserve derivatives through the wrap: t = s - (sv - w) - knot.
    const T t = s - (sv - w) - knots_[i];
    const Coeffs& cx = cx_[i];
    const Coeffs& cy = cy_[i];
    SplineSample<T> out;
    out.x = cx.a + t * (cx.b + t * (cx.c + t * cx.d));
    out.y = cy.a + t * (cy.b + t * (cy.c + t * cy.d));
    out.dx = cx.b + t * (2.0 * cx.c + 3.0 * cx.d * t);
    out.dy = cy.b + t * (2.0 * cy.c + 3.0 * cy.d * t);
    out.ddx = 2.0 * cx.c + 6.0 * cx.d * t;
    out.ddy = 2.0 * cy.c + 6.0 * cy.d * t;
    return out;
  }

  Vec2 point(double s) const {
    const auto p = eval(s);
    return {p.x, p.y};
  }
  double heading(double s) const {
    const auto p = eval(s);
    return std::atan2(p.dy, p.dx);
  }
  double curvature(double s) const;

  // Index of the knot closest to (x, y) by exhaustive scan.
  std::size_t nearest_knot(double x, double y) const;

 private:
  struct Coeffs {
    double a = 0, b = 0, c = 0, d = 0;
  };
  bool closed_ = false;
  std::vector<double> knots_;
  std::vector<Coeffs> cx_, cy_;
};

// Iterative projection: `iterations` damped Newton steps minimizing the
// squared distance from (x, y) to the curve, starting at `alpha`. The result
// is left unwrapped on closed curves and clamped on open ones.
template <class T>
T project_on(const CubicSpline2D& sp, const T& x, const T& y, T alpha, int iterations) {
  const double max_step = 0.25 * sp.length();
  for (int k = 0; k < iterations; ++k) {
    const auto p = sp.eval(alpha);
    const T ex = x - p.x;
    const T ey = y - p.y;
    const T grad = -(ex * p.dx + ey * p.dy);
    const T gn = p.dx * p.dx + p.dy * p.dy;
    T hess = gn - (ex * p.ddx + ey * p.ddy);
    if (value(hess) < 0.1 * value(gn)) hess = gn;
    T step = -grad / hess;
    if (value(step) > max_step) step = T(max_step);
    if (value(step) < -max_step) step = T(-max_step);
    alpha = alpha + step;
    if (!sp.closed()) {
      if (value(alpha) < 0.0) alpha = T(0.0);
      if (value(alpha) > sp.length()) alpha = T(sp.length());
    }
  }
  return alpha;
}

struct RacelinePoint {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;  // target velocity, global x component
  double vy = 0.0;
};

struct HeadingRadius {
  double theta = 0.0;
  double R = kRadiusMax;
};

// Reference line as an N x 4 array with derived arc length, heading,
// curvature and radius at every point.
class Raceline {
 public:
  Raceline() = default;
  // Closed when the ends meet; a duplicated closing point is dropped.
  static Raceline from_points(std::vector<RacelinePoint> points);
  static Raceline from_points(std::vector<RacelinePoint> points, bool closed);

  const std::vector<RacelinePoint>& points() const { return points_; }
  const CubicSpline2D& spline() const { return spline_; }
  bool closed() const { return spline_.closed(); }
  double length() const { return spline_.length(); }
  const std::vector<double>& s() const { return s_; }
  const std::vector<double>& heading() const { return heading_; }
  const std::vector<double>& curvature() const { return curvature_; }
  const std::vector<double>& radius() const { return radius_; }

  // Projection parameter of (x, y). Without a warm start the search starts
  // at the nearest raceline point.
  double project(double x, double y, int r_proj = 3, std::optional<double> alpha0 = std::nullopt) const;
  HeadingRadius heading_and_radius(double alpha) const;
  // Target speed magnitude interpolated along the line.
  double ref_speed(double alpha) const;

 private:
  std::vector<RacelinePoint> points_;
  CubicSpline2D spline_;
  std::vector<double> s_, heading_, curvature_, radius_;
};

template <class T>
struct HeadingRadiusT {
  T theta;
  T R;
};

// Tangent heading and clamped curvature radius at parameter alpha.
template <class T>
HeadingRadiusT<T> heading_and_radius_at(const CubicSpline2D& sp, const T& alpha) {
  using std::abs;
  using std::atan2;
  using std::sqrt;
  const auto p = sp.eval(alpha);
  const T speed2 = p.dx * p.dx + p.dy * p.dy;
  T kappa = abs(p.dx * p.ddy - p.dy * p.ddx) / (speed2 * sqrt(speed2));
  if (value(kappa) < kCurvatureMin) kappa = T(kCurvatureMin);
  return {atan2(p.dy, p.dx), 1.0 / kappa};
}

struct TrackPoint {
  double x = 0.0;
  double y = 0.0;
  double w_left = 0.0;
  double w_right = 0.0;
};

class Track {
 public:
  Track() = default;
  static Track from_points(std::vector<TrackPoint> points);
  static Track from_points(std::vector<TrackPoint> points, bool closed);

  const std::vector<TrackPoint>& points() const { return points_; }
  const CubicSpline2D& centerline() const { return spline_; }
  bool closed() const { return spline_.closed(); }
  double length() const { return spline_.length(); }

  // Linear interpolation of the widths at centerline parameter alpha.
  template <class T>
  void widths_at(const T& alpha, T& w_left, T& w_right) const {
    const double a = value(alpha);
    const double w = spline_.wrap(a);
    const std::size_t i = spline_.segment_at(w);
    const std::size_t j = (i + 1) % points_.size();
    const auto& k = spline_.knots();
    const T f = (alpha - (a - w) - k[i]) / (k[i + 1] - k[i]);
    w_left = points_[i].w_left + f * (points_[j].w_left - points_[i].w_left);
    w_right = points_[i].w_right + f * (points_[j].w_right - points_[i].w_right);
  }

  // Lateral offset (left positive) of (x, y) from the centerline at alpha.
  template <class T>
  T lateral_offset_at(const T& x, const T& y, const T& alpha) const {
    using std::sqrt;
    const auto p = spline_.eval(alpha);
    const T norm = sqrt(p.dx * p.dx + p.dy * p.dy);
    return ((y - p.y) * p.dx - (x - p.x) * p.dy) / norm;
  }

  // Signed clearance to the nearer boundary given a centerline projection
  // alpha of (x, y): positive inside, negative outside.
  template <class T>
  T lane_margin_at(const T& x, const T& y, const T& alpha) const {
    T wl, wr;
    widths_at(alpha, wl, wr);
    const T n = lateral_offset_at(x, y, alpha);
    const T left = wl - n;
    const T right = wr + n;
    return value(left) < value(right) ? left : right;
  }

  double project(double x, double y, int iterations = 3, std::optional<double> alpha0 = std::nullopt) const;
  double lane_violation(double x, double y, std::optional<double> alpha0 = std::nullopt) const;

  // Boundary polylines sampled at the centerline points.
  std::vector<Vec2> left_boundary() const;
  std::vector<Vec2> right_boundary() const;

 private:
  std::vector<TrackPoint> points_;
  CubicSpline2D spline_;
};

// Chord length between successive points, used for closed-curve detection.
bool ends_meet(std::span<const Vec2> pts);

Track read_track_csv(const std::string& path);
Track track_from_csv_text(const std::string& text, const std::string& source);
void write_track_csv(const std::string& path, const Track& track);
Raceline read_raceline_csv(const std::string& path);
Raceline raceline_from_csv_text(const std::string& text, const std::string& source);
void write_raceline_csv(const std::string& path, const Raceline& line);
std::string raceline_csv_text(const Raceline& line);

}  // namespace racing
