#include "racing/scenarios.hpp"

#include <numbers>

#include "racing/fixtures.hpp"

namespace racing {

Track fixture_oval() { return oval_track(300.0, 160.0, 7.0); }

Track fixture_corner() { return straight_then_corner_track(400.0, 120.0, 0.5 * std::numbers::pi, 200.0, 7.0); }

SpeedLimits fixture_limits() { return {8.0, 5.0, 45.0}; }

RacelineProblem fixture_raceline_problem(const Track& track, int n_points) {
  return {track, n_points, fixture_limits(), 1.0, 10};
}

namespace {

Scenario on_oval() {
  Scenario sc;
  sc.track = fixture_oval();
  sc.raceline = optimize_raceline(fixture_raceline_problem(sc.track, 1000)).line;
  return sc;
}

}  // namespace

Scenario solo_lap_scenario() {
  Scenario sc = on_oval();
  sc.ego_speed = 35.0;
  sc.laps = 3;
  sc.duration = 200.0;
  return sc;
}

Scenario merge_scenario() {
  Scenario sc;
  sc.track = fixture_corner();
  sc.raceline = optimize_raceline(fixture_raceline_problem(sc.track, 400)).line;
  sc.ego_offset = 4.0;
  sc.ego_speed = 35.0;
  sc.duration = 25.0;
  return sc;
}

Scenario draft_scenario() {
  Scenario sc = on_oval();
  sc.ego_speed = 36.0;
  sc.duration = 6.0;
  sc.opponents.push_back({1, 40.0, 0.75, 3.0, 4.9, 1.9});
  return sc;
}

Scenario overtake_scenario(double gap) {
  Scenario sc = on_oval();
  sc.ego_speed = 36.0;
  sc.laps = 2;
  sc.duration = 120.0;
  sc.opponents.push_back({1, gap, 0.7, 0.0, 4.9, 1.9});
  return sc;
}

}  // namespace racing
