#include <doctest.h>

#include <cmath>
#include <numbers>

#include "racing/fixtures.hpp"
#include "racing/raceline_opt.hpp"
#include "racing/scenarios.hpp"

using namespace racing;

TEST_CASE("minimum curvature on an annulus runs along the outer edge") {
  const double R = 100.0, hw = 6.0, margin = 1.0;
  RacelineProblem p{circle_track(R, hw)};
  p.n_points = 200;
  p.margin = margin;
  const auto res = optimize_raceline(p);
  for (const auto& pt : res.line.points()) CHECK(std::abs(std::hypot(pt.x, pt.y) - (R + hw - margin)) < 0.1);
}

TEST_CASE("straight track keeps the centerline") {
  RacelineProblem p{straight_track(500.0, 5.0)};
  p.n_points = 101;
  const auto res = optimize_raceline(p);
  for (double n : res.offsets) CHECK(std::abs(n) < 1e-6);
  for (const auto& pt : res.line.points()) CHECK(std::hypot(pt.vx, pt.vy) == doctest::Approx(p.limits.v_cap));
}

TEST_CASE("objective never increases and the line stays inside the margin") {
  auto p = fixture_raceline_problem(fixture_oval(), 400);
  const auto res = optimize_raceline(p);
  REQUIRE(res.objective_history.size() >= 2);
  for (std::size_t i = 1; i < res.objective_history.size(); ++i)
    CHECK(res.objective_history[i] <= res.objective_history[i - 1]);
  for (const auto& pt : res.line.points()) CHECK(p.track.lane_violation(pt.x, pt.y) >= p.margin - 1e-6);
  const auto& v = res.line.points();
  CHECK(std::hypot(v.front().vx, v.front().vy) == doctest::Approx(std::hypot(v.back().vx, v.back().vy)).epsilon(1e-6));
  CHECK(res.lap_time < lap_time(centerline_raceline(p.track, 400, p.limits)));
}

TEST_CASE("infeasible margin") {
  RacelineProblem p{oval_track(100.0, 50.0, 4.0)};
  p.margin = 4.5;
  CHECK_THROWS_AS(optimize_raceline(p), InfeasibleError);
}

TEST_CASE("velocity profile on a circle is the cornering limit") {
  const std::vector<double> ds(50, 5.0), radius(50, 80.0);
  const SpeedLimits lim{9.0, 4.0, 60.0};
  for (double v : velocity_profile(ds, radius, true, lim)) CHECK(v == doctest::Approx(std::sqrt(9.0 * 80.0)));
  const std::vector<double> straight_r(20, kRadiusMax);
  for (double v : velocity_profile(std::vector<double>(19, 5.0), straight_r, false, lim)) CHECK(v == 60.0);
}

TEST_CASE("velocity profile respects curvature and acceleration limits on a hairpin") {
  // Straight, 180 degree hairpin of radius 15, straight.
  std::vector<Vec2> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({5.0 * i, 0.0});
  for (int i = 1; i < 20; ++i) {
    const double t = std::numbers::pi * i / 20.0;
    pts.push_back({195.0 + 15.0 * std::sin(t), 15.0 - 15.0 * std::cos(t)});
  }
  for (int i = 0; i < 40; ++i) pts.push_back({195.0 - 5.0 * i, 30.0});
  const SpeedLimits lim{10.0, 6.0, 50.0};
  const auto line = profiled_raceline(pts, false, lim);
  const auto& P = line.points();
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double v = std::hypot(P[i].vx, P[i].vy);
    CHECK(v <= std::sqrt(lim.a_lat_max * line.radius()[i]) + 1e-9);
    if (i + 1 < P.size()) {
      const double w = std::hypot(P[i + 1].vx, P[i + 1].vy);
      const double ds = std::hypot(P[i + 1].x - P[i].x, P[i + 1].y - P[i].y);
      CHECK(std::abs(w * w - v * v) / (2.0 * ds) <= lim.a_lon_max + 1e-9);
    }
  }
}
