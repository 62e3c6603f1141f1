#pragma once

// Global racing line: minimum-curvature lateral offsets within the track
// bounds, paired with a friction-limited velocity profile.

#include <span>
#include <stdexcept>
#include <vector>

#include "racing/track_geometry.hpp"

namespace racing {

class InfeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SpeedLimits {
  double a_lat_max = 10.0;  // m/s^2
  double a_lon_max = 5.0;   // m/s^2
  double v_cap = 45.0;      // m/s
};

struct RacelineProblem {
  Track track;
  int n_points = 1000;
  SpeedLimits limits;
  double margin = 1.0;  // m, kept clear of each boundary
  int max_outer_iterations = 10;
};

struct RacelineResult {
  Raceline line;
  std::vector<double> offsets;           // lateral offset per output point, left positive
  std::vector<double> objective_history;  // sum of squared curvature per outer iteration
  double lap_time = 0.0;                  // s, under the velocity profile
};

RacelineResult optimize_raceline(const RacelineProblem& p);

// Forward-backward speed profile over a polyline with segment lengths `ds`
// (ds[i] joins point i to i+1; closed lines carry the wrap segment) and
// curvature radii `radius`.
std::vector<double> velocity_profile(std::span<const double> ds, std::span<const double> radius, bool closed,
                                     const SpeedLimits& limits);

// Velocity-profiled raceline through the given geometry; the target velocity
// is decomposed along the spline tangent into global components.
Raceline profiled_raceline(std::span<const Vec2> points, bool closed, const SpeedLimits& limits);

// Lap (or traversal) time of a raceline under its own target speeds.
double lap_time(const Raceline& line);

// Centerline sampled at `n` equally spaced stations, profiled like a raceline.
Raceline centerline_raceline(const Track& track, int n, const SpeedLimits& limits);

// Sum of squared discrete curvature (central differences over index) of a
// polyline.
double curvature_objective(std::span<const Vec2> pts, bool closed);

}  // namespace racing
