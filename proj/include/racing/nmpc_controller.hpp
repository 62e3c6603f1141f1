#pragma once

// Receding-horizon controller: seeds, solves and commits an overtaking side
// per opponent.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "racing/box_lbfgs.hpp"
#include "racing/nmpc_costs.hpp"

namespace racing {

enum class Side { None, Left, Right };

const char* to_string(Side s);

struct Horizon {
  double dt = 0.0;
  std::vector<ControlInput> controls;  // N
  std::vector<VehicleState> states;    // N + 1, states[0] is the measured state
  std::vector<double> alphas;          // raceline projection per state
};

// Side chosen for each opponent. Only the current target's entry is kept.
struct OvertakeMemory {
  std::map<int, Side> sides;
  std::optional<int> last_target;

  void clear() {
    sides.clear();
    last_target.reset();
  }
};

struct SolveOutcome {
  std::vector<double> z;
  double cost = 0.0;
  double seed_cost = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::IterationLimit;
};

struct PlanResult {
  ControlInput control;
  Horizon horizon;
  RolloutRecord record;
  Side side = Side::None;
  std::optional<int> target;
  bool solved_both_sides = false;
  double cost = 0.0;
  double seed_cost = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::IterationLimit;
  bool fallback = false;
  std::string warning;
};

class NmpcController {
 public:
  NmpcController(const Raceline& line, const Track& track, VehicleParams vehicle, TireCoefficients tires,
                 DraftingParams drafting, ControllerConfig config);

  const ControllerConfig& config() const { return config_; }
  const VehicleParams& vehicle() const { return vehicle_; }
  void set_parallel_gradient(bool on) { parallel_gradient_ = on; }

  HorizonProblem problem(const VehicleState& x, std::span<const OpponentObservation> opponents) const;

  // Pure-pursuit control guess toward the target displaced by +-d along its
  // left normal, or along the raceline when there is no target.
  std::vector<ControlInput> initial_trajectory(const VehicleState& x, const OpponentObservation* target, Side side,
                                               double d_offset) const;

  SolveOutcome solve(const HorizonProblem& prob, std::vector<double> z0) const;

  double total_cost(const HorizonProblem& prob, std::span<const ControlInput> controls,
                    RolloutRecord* record = nullptr) const;

  PlanResult plan(const VehicleState& x, std::span<const OpponentObservation> opponents, OvertakeMemory& memory,
                  const Horizon* previous) const;

  // Closest approach between each opponent's prediction and the previous
  // horizon (or the current state when there is none).
  std::vector<double> proximity(const VehicleState& x, std::span<const OpponentObservation> opponents,
                                const Horizon* previous) const;

  // Opponent within T_d that is closest, ignoring those clearly behind.
  std::optional<std::size_t> find_target(const VehicleState& x, std::span<const OpponentObservation> opponents,
                                         const Horizon* previous) const;

  std::vector<ControlInput> braking_sequence() const;
  static std::vector<ControlInput> shifted(const std::vector<ControlInput>& controls, int N);

 private:
  Horizon make_horizon(const RolloutRecord& rec, const std::vector<ControlInput>& controls) const;

  const Raceline& line_;
  const Track& track_;
  VehicleParams vehicle_;
  TireCoefficients tires_;
  DraftingParams drafting_;
  ControllerConfig config_;
  bool parallel_gradient_ = true;
};

}  // namespace racing
