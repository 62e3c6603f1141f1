#include "racing/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace racing {

namespace {

int steps(double length, double spacing) { return std::max(1, static_cast<int>(std::lround(length / spacing))); }

}  // namespace

Track oval_track(double straight, double radius, double half_width, double spacing) {
  const double pi = std::numbers::pi;
  std::vector<TrackPoint> pts;
  const auto add = [&](double x, double y) { pts.push_back({x, y, half_width, half_width}); };
  const int ns = steps(straight, spacing);
  const int na = steps(pi * radius, spacing);
  const double h = 0.5 * straight;
  for (int i = 0; i < ns; ++i) add(-h + straight * i / ns, -radius);
  for (int i = 0; i < na; ++i) {
    const double a = -0.5 * pi + pi * i / na;
    add(h + radius * std::cos(a), radius * std::sin(a));
  }
  for (int i = 0; i < ns; ++i) add(h - straight * i / ns, radius);
  for (int i = 0; i < na; ++i) {
    const double a = 0.5 * pi + pi * i / na;
    add(-h + radius * std::cos(a), radius * std::sin(a));
  }
  return Track::from_points(std::move(pts), true);
}

Track straight_then_corner_track(double straight, double radius, double angle, double exit, double half_width,
                                 double spacing) {
  std::vector<TrackPoint> pts;
  const auto add = [&](double x, double y) { pts.push_back({x, y, half_width, half_width}); };
  const int ns = steps(straight, spacing);
  for (int i = 0; i < ns; ++i) add(straight * i / ns, 0.0);
  const int na = steps(radius * angle, spacing);
  for (int i = 0; i < na; ++i) {
    const double a = angle * i / na;
    add(straight + radius * std::sin(a), radius * (1.0 - std::cos(a)));
  }
  const double ex = straight + radius * std::sin(angle);
  const double ey = radius * (1.0 - std::cos(angle));
  const int ne = steps(exit, spacing);
  for (int i = 0; i <= ne; ++i) {
    const double d = exit * i / ne;
    add(ex + d * std::cos(angle), ey + d * std::sin(angle));
  }
  return Track::from_points(std::move(pts), false);
}

Track circle_track(double radius, double half_width, double spacing) {
  const int n = std::max(8, steps(2.0 * std::numbers::pi * radius, spacing));
  std::vector<TrackPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    pts.push_back({radius * std::cos(a), radius * std::sin(a), half_width, half_width});
  }
  return Track::from_points(std::move(pts), true);
}

Track straight_track(double length, double half_width, double spacing) {
  const int n = std::max(3, steps(length, spacing));
  std::vector<TrackPoint> pts;
  for (int i = 0; i <= n; ++i) pts.push_back({length * i / n, 0.0, half_width, half_width});
  return Track::from_points(std::move(pts), false);
}

}  // namespace racing
