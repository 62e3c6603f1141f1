#pragma once

// Objective of the local NMPC: progress along the reference line, opponent
// avoidance, drafting attraction, slip safety and a soft lane constraint,
// summed over a single-shooting rollout of the control sequence.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "racing/drafting.hpp"
#include "racing/nmpc_config.hpp"
#include "racing/tire_model.hpp"
#include "racing/track_geometry.hpp"
#include "racing/vehicle_dynamics.hpp"

namespace racing {

struct OpponentObservation {
  int id = 0;
  Pose2 pose;
  double vx = 0.0;  // global velocity, m/s
  double vy = 0.0;
  double lx = 4.9;  // footprint length, m
  double ly = 1.9;  // footprint width, m
  // Pose at times (k + 1) * dt for k = 0 .. N-1.
  std::vector<Pose2> predicted_track;
};

// Constant-velocity extrapolation along the current heading.
OpponentObservation predict_constant_velocity(int id, const Pose2& pose, double speed, double lx, double ly, int N,
                                              double dt);

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <int W>
Dual<W> sigmoid(const Dual<W>& z) {
  const double s = sigmoid(z.v);
  return detail::apply(z, s, s * (1.0 - s));
}

// v * cos(heading error) * R / (R + |D|) at the projection alpha.
template <class T>
T progress_term(const StateT<T>& s, const CubicSpline2D& line, const T& alpha) {
  using std::cos;
  using std::sqrt;
  const auto p = line.eval(alpha);
  const auto hr = heading_and_radius_at(line, alpha);
  const T ex = s.X - p.x;
  const T ey = s.Y - p.y;
  const T D = sqrt(ex * ex + ey * ey);
  const T v = sqrt(s.vx * s.vx + s.vy * s.vy);
  return v * cos(s.phi - hr.theta) * hr.R / (hr.R + D);
}

double progress_cost(const VehicleState& s, const Raceline& line, double alpha);

inline constexpr double kObstacleEps = 1e-6;

// Single sensor/opponent contribution: v_rel over the scaled squared
// ellipse distance, gated by sigmoid(S_do (K_do - dx)). `dx` is measured
// backwards from the opponent (positive behind it).
template <class T>
T obstacle_term(const T& v_rel, const T& dx, const T& dy, double lx, double ly, double S_do, double K_do) {
  const T ex = dx / lx;
  const T ey = dy / ly;
  return v_rel / (ex * ex + ey * ey + kObstacleEps) * sigmoid(S_do * (K_do - dx));
}

// |dy| * (1 - sigmoid(S_do (K_do - dx))).
template <class T>
T drafting_term(const T& dx, const T& dy, double S_do, double K_do) {
  using std::abs;
  return abs(dy) * (1.0 - sigmoid(S_do * (K_do - dx)));
}

template <class T>
T safety_term(const T& slip, double alpha_safe) {
  using std::abs;
  const T a = abs(slip);
  if (value(a) > alpha_safe) {
    const T e = a - alpha_safe;
    return e * e;
  }
  return T(0.0);
}

template <class T>
T safety_cost(const T& alphaF, const T& alphaR, double alpha_safe) {
  return safety_term(alphaF, alpha_safe) + safety_term(alphaR, alpha_safe);
}

// An opponent as seen at one horizon step.
struct OpponentSnapshot {
  Pose2 pose;
  double vx = 0.0;
  double vy = 0.0;
  double lx = 4.9;
  double ly = 1.9;
};

// Ego sensor points: the four footprint corners and the center.
template <class T>
std::array<std::array<T, 2>, 5> sensor_points(const StateT<T>& s, double length, double width) {
  using std::cos;
  using std::sin;
  const T c = cos(s.phi);
  const T sn = sin(s.phi);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  const double offs[5][2] = {{hl, hw}, {hl, -hw}, {-hl, hw}, {-hl, -hw}, {0.0, 0.0}};
  std::array<std::array<T, 2>, 5> out;
  for (int i = 0; i < 5; ++i) {
    out[i][0] = s.X + offs[i][0] * c - offs[i][1] * sn;
    out[i][1] = s.Y + offs[i][0] * sn + offs[i][1] * c;
  }
  return out;
}

template <class T>
T obstacle_cost(const StateT<T>& s, std::span<const OpponentSnapshot> opps, const CostWeights& w, double length,
                double width) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  T total(0.0);
  if (opps.empty()) return total;
  const T gvx = s.vx * cos(s.phi) - s.vy * sin(s.phi);
  const T gvy = s.vx * sin(s.phi) + s.vy * cos(s.phi);
  const auto pts = sensor_points(s, length, width);
  for (const auto& o : opps) {
    const T rvx = gvx - o.vx;
    const T rvy = gvy - o.vy;
    const T v_rel = sqrt(rvx * rvx + rvy * rvy);
    for (const auto& p : pts) {
      const auto off = trailing_offset(o.pose, p[0], p[1]);
      total = total + obstacle_term(v_rel, off.behind, off.lateral, o.lx, o.ly, w.S_do, w.K_do);
    }
  }
  return total;
}

template <class T>
T drafting_cost(const StateT<T>& s, std::span<const OpponentSnapshot> opps, const CostWeights& w) {
  T total(0.0);
  for (const auto& o : opps) {
    const auto off = trailing_offset(o.pose, s.X, s.Y);
    total = total + drafting_term(off.behind, off.lateral, w.S_do, w.K_do);
  }
  return total;
}

// Everything the objective needs besides the decision variables.
struct HorizonProblem {
  const Raceline& line;
  const Track& track;
  const VehicleParams& vehicle;
  const TireCoefficients& tires;
  const DraftingParams& drafting;
  const ControllerConfig& config;
  std::span<const OpponentObservation> opponents;
  VehicleState x0;
  double alpha_line0 = 0.0;    // projection of x0 on the raceline
  double alpha_center0 = 0.0;  // projection of x0 on the track centerline
};

// Unweighted per-step terms. `progress` holds C_pt, or the contouring stage
// cost in contouring mode.
struct StageTerms {
  double progress = 0.0;
  double obstacle = 0.0;
  double drafting = 0.0;
  double safety = 0.0;
  double lane = 0.0;  // max(0, lane_buffer - margin)^2
  double alpha_cd = 1.0;
  double lateral_error = 0.0;  // distance to the raceline projection
};

struct WeightedTerms {
  double progress = 0.0;
  double obstacle = 0.0;
  double drafting = 0.0;
  double safety = 0.0;
  double lane = 0.0;
  double sum() const { return progress + obstacle + drafting + safety + lane; }
};

struct RolloutRecord {
  std::vector<VehicleState> states;  // N + 1
  std::vector<double> alpha_line;    // N + 1
  std::vector<double> alpha_center;  // N + 1
  std::vector<StageTerms> stages;    // N, stage k scores state k + 1
  WeightedTerms weighted;
  double total = 0.0;
};

// Decision vector layout: z[2k] = delta_k / delta_max, z[2k+1] = D_k, all in
// [-1, 1].
std::vector<double> to_decision(std::span<const ControlInput> controls, const VehicleParams& p);
std::vector<ControlInput> from_decision(std::span<const double> z, const VehicleParams& p);

// Objective value; fills `record` when given. Returns +inf when the rollout
// leaves the model's validity range (vx < vx_min) or turns non-finite.
double evaluate_horizon(const HorizonProblem& prob, std::span<const double> z, RolloutRecord* record = nullptr);

// Gradient by forward-mode dual numbers, blocks of derivative lanes per
// pass. The parallel kernel distributes blocks across OpenMP threads; the
// serial kernel runs them in order and is kept as the reference.
inline constexpr int kGradientLanes = 10;
double cost_gradient_serial(const HorizonProblem& prob, std::span<const double> z, std::span<double> grad);
double cost_gradient_parallel(const HorizonProblem& prob, std::span<const double> z, std::span<double> grad);

// Sum of weighted terms as recorded in a rollout, recomputed from the
// per-step columns.
WeightedTerms weigh(const std::vector<StageTerms>& stages, const ControllerConfig& cfg);

}  // namespace racing
