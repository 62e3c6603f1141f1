#pragma once

// Reference scenarios on the synthetic tracks, shared by the acceptance
// runner, the tests and the sample-data generator.

#include "racing/raceline_opt.hpp"
#include "racing/sim_harness.hpp"

namespace racing {

// 300 m straights, 160 m turn radius, 14 m wide.
Track fixture_oval();
// 400 m straight, 90 degree left turn of radius 120 m, 200 m exit.
Track fixture_corner();

SpeedLimits fixture_limits();
RacelineProblem fixture_raceline_problem(const Track& track, int n_points);

// Three laps alone on the oval.
Scenario solo_lap_scenario();
// Ego starts 4 m left of the raceline on the straight-then-corner track.
Scenario merge_scenario();
// A slower car 40 m ahead and 3 m to the left of the raceline.
Scenario draft_scenario();
// One car at 70% of the reference speed `gap` metres ahead; two laps.
Scenario overtake_scenario(double gap = 60.0);

}  // namespace racing
