#pragma once

// Closed-loop simulation: RK4 plant for the ego, scripted raceline-following
// opponents, collision/lane/lap/overtake bookkeeping and a CSV + JSON-lines
// log.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "racing/nmpc_controller.hpp"
#include "racing/vehicle_config.hpp"

namespace racing {

struct OpponentSpec {
  int id = 0;
  double s = 0.0;               // start arc position on the raceline, m
  double speed_fraction = 0.7;  // of the raceline reference speed
  double offset = 0.0;          // lateral offset from the raceline, left positive
  double length = 4.9;
  double width = 1.9;
};

struct Scenario {
  Track track;
  Raceline raceline;
  VehicleConfig vehicle;
  TireCoefficients tires;
  ControllerConfig controller;
  double ego_s = 0.0;       // start arc position on the raceline
  double ego_offset = 0.0;  // lateral offset from the raceline, left positive
  double ego_speed = 30.0;
  double duration = 60.0;  // s
  int laps = 0;            // stop after this many laps; 0 = duration only
  double dt_sim = 0.01;
  std::vector<OpponentSpec> opponents;

  void validate() const;
};

// Key-value scenario file. Paths are resolved against `base_dir`; each
// `[opponent]` header opens a new opponent block.
Scenario scenario_from_text(const std::string& text, const std::string& source, const std::string& base_dir);
Scenario load_scenario(const std::string& path);

struct OpponentState {
  OpponentSpec spec;
  double s = 0.0;         // unwrapped arc position
  double speed = 0.0;
  Pose2 pose;
};

struct World {
  double t = 0.0;
  VehicleState ego;
  double alpha_cd = 1.0;  // applied on the last plant step
  std::vector<OpponentState> opponents;
};

struct StepContext {
  const Raceline& line;
  const VehicleParams& vehicle;
  const TireCoefficients& tires;
  const DraftingParams& drafting;
  bool draft_model = true;
};

World initial_world(const Scenario& sc);
void place_opponent(OpponentState& o, const Raceline& line);
World step_world(const World& w, const ControlInput& u, double dt, const StepContext& ctx);

struct Footprint {
  Pose2 pose;
  double length = 0.0;
  double width = 0.0;
};

struct Collision {
  double depth = 0.0;  // minimum overlap over the separating axes, m
};

// Oriented-rectangle overlap by the separating-axis test; touching counts.
std::optional<Collision> detect_collision(const Footprint& a, const Footprint& b);

struct RunOptions {
  bool draft_cost = true;   // false forces k_dt = 0
  bool contouring = false;  // contouring/lag term instead of the progress reward
  std::optional<double> contour_weight;
  std::optional<double> lag_weight;
  bool draft_model = true;  // false forces alpha_cd = 1 in plant and controller
  bool parallel_gradient = true;
  std::ostream* timing = nullptr;  // per-plan wall-clock, one line each
  std::function<void(const World&, const PlanResult&)> on_plan;
};

struct Event {
  int tick = 0;
  double t = 0.0;
  std::string type;  // lap, collision, lane_departure, overtake, controller_fault
  std::optional<int> opponent;
  double value = 0.0;  // lap number, penetration depth, lane margin or unused
  std::string detail;
};

struct LogRow {
  int tick = 0;
  double t = 0.0;
  VehicleState ego;
  double speed = 0.0;
  ControlInput control;
  double alpha_cd = 1.0;
  double progress = 0.0;     // unwrapped raceline arc position
  double line_offset = 0.0;  // signed distance to the raceline, left positive
  double lane_margin = 0.0;
  WeightedTerms cost;
  double k_dt = 0.0;
  Side side = Side::None;
  int iterations = 0;
  struct Opp {
    int id = 0;
    Pose2 pose;
    double progress = 0.0;
    double behind = 0.0;   // ego center in the opponent frame
    double lateral = 0.0;
    double ellipse = 0.0;  // (behind/lx)^2 + (lateral/ly)^2
  };
  std::vector<Opp> opponents;
};

struct SimLog {
  std::vector<LogRow> rows;
  std::vector<Event> events;
  bool collided = false;
  int laps_completed = 0;
  std::vector<double> plan_ms;      // wall-clock per plan, not part of the written log
  std::vector<Side> planned_sides;  // committed side per plan call
  std::vector<std::optional<int>> planned_targets;
};

SimLog run(const Scenario& sc, const RunOptions& opts = {});

// CSV log, one row per plant tick; opponent columns are suffixed by id.
std::string log_csv(const SimLog& log);
std::string events_jsonl(const SimLog& log);

}  // namespace racing
