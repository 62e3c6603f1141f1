#include "racing/nmpc_controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace racing {

const char* to_string(Side s) {
  switch (s) {
    case Side::None: return "none";
    case Side::Left: return "left";
    case Side::Right: return "right";
  }
  return "none";
}

namespace {

// Signed arc distance from a to b, wrapped to half a lap on closed lines.
double arc_ahead(const CubicSpline2D& sp, double a, double b) {
  double d = b - a;
  if (sp.closed()) {
    const double L = sp.length();
    d = std::fmod(d, L);
    if (d > 0.5 * L) d -= L;
    if (d < -0.5 * L) d += L;
  }
  return d;
}

double signed_offset(const CubicSpline2D& sp, double alpha, double x, double y) {
  const auto p = sp.eval(alpha);
  const double n = std::hypot(p.dx, p.dy);
  return (-(x - p.x) * p.dy + (y - p.y) * p.dx) / n;
}

}  // namespace

NmpcController::NmpcController(const Raceline& line, const Track& track, VehicleParams vehicle,
                               TireCoefficients tires, DraftingParams drafting, ControllerConfig config)
    : line_(line),
      track_(track),
      vehicle_(vehicle),
      tires_(tires),
      drafting_(drafting),
      config_(std::move(config)) {
  vehicle_.validate();
  tires_.validate();
  drafting_.validate();
  config_.validate();
}

HorizonProblem NmpcController::problem(const VehicleState& x, std::span<const OpponentObservation> opponents) const {
  HorizonProblem p{line_, track_, vehicle_, tires_, drafting_, config_, opponents, x, 0.0, 0.0};
  p.alpha_line0 = line_.project(x.X, x.Y, config_.r_proj);
  p.alpha_center0 = track_.project(x.X, x.Y, config_.r_proj);
  return p;
}

std::vector<ControlInput> NmpcController::initial_trajectory(const VehicleState& x, const OpponentObservation* target,
                                                             Side side, double d_offset) const {
  const auto& sp = line_.spline();
  const int N = config_.N;
  const double dt = config_.dt;
  const double sign = side == Side::Left ? 1.0 : side == Side::Right ? -1.0 : 0.0;
  const double wheelbase = vehicle_.lF + vehicle_.lR;

  double a_target = 0.0, n_target = 0.0, v_target = 0.0;
  if (target) {
    a_target = line_.project(target->pose.x, target->pose.y, config_.r_proj);
    n_target = signed_offset(sp, a_target, target->pose.x, target->pose.y);
    v_target = std::hypot(target->vx, target->vy);
  }

  std::vector<ControlInput> out(static_cast<std::size_t>(N));
  VehicleState s = x;
  double alpha = line_.project(x.X, x.Y, config_.r_proj);
  for (int k = 0; k < N; ++k) {
    const double v = std::hypot(s.vx, s.vy);
    const double look = std::max(config_.pursuit_lookahead, 0.8 * v);
    double goal_arc = alpha + look;
    double goal_lat = 0.0;
    if (target) {
      const double ahead = arc_ahead(sp, alpha, a_target + v_target * k * dt);
      goal_arc = alpha + std::max(ahead, look);
      goal_lat = n_target + sign * d_offset;
    }
    const auto p = sp.eval(goal_arc);
    const double nn = std::hypot(p.dx, p.dy);
    const double gx = p.x - goal_lat * p.dy / nn;
    const double gy = p.y + goal_lat * p.dx / nn;

    const double c = std::cos(s.phi), sn = std::sin(s.phi);
    const double lx = c * (gx - s.X) + sn * (gy - s.Y);
    const double ly = -sn * (gx - s.X) + c * (gy - s.Y);
    const double kappa = 2.0 * ly / std::max(lx * lx + ly * ly, 1e-6);
    const double delta = std::clamp(std::atan(wheelbase * kappa), -vehicle_.delta_max, vehicle_.delta_max);

    const double resist = vehicle_.CR + 0.5 * vehicle_.rho * vehicle_.Cd * vehicle_.S * s.vx * s.vx;
    const double thrust = std::max(vehicle_.Cm1 - vehicle_.Cm2 * s.vx, 1e-6);
    const double v_ref = line_.ref_speed(alpha);
    const double D = std::clamp(resist / thrust + config_.pursuit_speed_gain * (v_ref - v), -1.0, 1.0);

    out[static_cast<std::size_t>(k)] = {delta, D};
    const ControlInput u{delta, D};
    if (s.vx < vehicle_.vx_min) continue;
    s = config_.model_integrator == Integrator::Euler ? euler_step(s, u, 1.0, dt, vehicle_, tires_)
                                                      : rk4_step(s, u, 1.0, dt, vehicle_, tires_);
    alpha = line_.project(s.X, s.Y, config_.r_proj, alpha + v * dt);
  }
  return out;
}

double NmpcController::total_cost(const HorizonProblem& prob, std::span<const ControlInput> controls,
                                  RolloutRecord* record) const {
  const auto z = to_decision(controls, vehicle_);
  return evaluate_horizon(prob, z, record);
}

SolveOutcome NmpcController::solve(const HorizonProblem& prob, std::vector<double> z0) const {
  const std::size_t n = z0.size();
  const std::vector<double> lower(n, -1.0), upper(n, 1.0);
  BoxLbfgsSettings settings;
  settings.max_iterations = config_.max_iterations;
  settings.memory = config_.lbfgs_memory;
  settings.grad_tol = config_.grad_tol;
  settings.cost_tol = config_.cost_tol;
  const bool parallel = parallel_gradient_;
  const auto f = [&](std::span<const double> z) { return evaluate_horizon(prob, z); };
  const auto fg = [&](std::span<const double> z, std::span<double> g) {
    return parallel ? cost_gradient_parallel(prob, z, g) : cost_gradient_serial(prob, z, g);
  };
  auto res = minimize_box_lbfgs(f, fg, std::move(z0), lower, upper, settings);
  return {std::move(res.x), res.f, res.f_start, res.iterations, res.status};
}

std::vector<ControlInput> NmpcController::braking_sequence() const {
  return std::vector<ControlInput>(static_cast<std::size_t>(config_.N), ControlInput{0.0, -1.0});
}

std::vector<ControlInput> NmpcController::shifted(const std::vector<ControlInput>& controls, int N) {
  std::vector<ControlInput> out;
  out.reserve(static_cast<std::size_t>(N));
  for (std::size_t k = 1; k < controls.size() && static_cast<int>(out.size()) < N; ++k) out.push_back(controls[k]);
  const ControlInput last = controls.empty() ? ControlInput{0.0, 0.0} : controls.back();
  while (static_cast<int>(out.size()) < N) out.push_back(last);
  return out;
}

std::vector<double> NmpcController::proximity(const VehicleState& x, std::span<const OpponentObservation> opponents,
                                              const Horizon* previous) const {
  std::vector<double> out;
  for (const auto& o : opponents) {
    double d = std::hypot(o.pose.x - x.X, o.pose.y - x.Y);
    if (previous) {
      // Planned states 2..N from the previous call line up with the
      // opponent's predictions 0..N-2.
      for (std::size_t k = 2; k < previous->states.size(); ++k) {
        const std::size_t j = k - 2;
        if (j >= o.predicted_track.size()) break;
        const auto& pk = o.predicted_track[j];
        d = std::min(d, std::hypot(pk.x - previous->states[k].X, pk.y - previous->states[k].Y));
      }
    }
    out.push_back(d);
  }
  return out;
}

std::optional<std::size_t> NmpcController::find_target(const VehicleState& x,
                                                       std::span<const OpponentObservation> opponents,
                                                       const Horizon* previous) const {
  const auto& sp = line_.spline();
  const double a_ego = line_.project(x.X, x.Y, config_.r_proj);
  const auto dist = proximity(x, opponents, previous);
  std::optional<std::size_t> best;
  double best_d = config_.weights.T_d;
  for (std::size_t i = 0; i < opponents.size(); ++i) {
    const auto& o = opponents[i];
    const double a_opp = line_.project(o.pose.x, o.pose.y, config_.r_proj);
    if (arc_ahead(sp, a_ego, a_opp) < -vehicle_.length) continue;
    if (dist[i] < best_d) {
      best_d = dist[i];
      best = i;
    }
  }
  return best;
}

Horizon NmpcController::make_horizon(const RolloutRecord& rec, const std::vector<ControlInput>& controls) const {
  Horizon h;
  h.dt = config_.dt;
  h.controls = controls;
  h.states = rec.states;
  h.alphas = rec.alpha_line;
  return h;
}

PlanResult NmpcController::plan(const VehicleState& x, std::span<const OpponentObservation> opponents,
                                OvertakeMemory& memory, const Horizon* previous) const {
  // Only opponents near the ego enter the objective; the drafting term
  // grows with lateral offset and would otherwise react to cars far away.
  std::vector<OpponentObservation> nearby;
  const auto dist = proximity(x, opponents, previous);
  for (std::size_t i = 0; i < opponents.size(); ++i)
    if (dist[i] < config_.weights.T_d) nearby.push_back(opponents[i]);
  const HorizonProblem prob = problem(x, nearby);
  const int N = config_.N;
  std::optional<std::vector<double>> prev_z;
  if (previous && !previous->controls.empty()) prev_z = to_decision(shifted(previous->controls, N), vehicle_);

  const auto pick_seed = [&](const OpponentObservation* target, Side side) {
    auto z = to_decision(initial_trajectory(x, target, side, config_.weights.d_offset), vehicle_);
    if (prev_z && evaluate_horizon(prob, *prev_z) <= evaluate_horizon(prob, z)) z = *prev_z;
    return z;
  };

  PlanResult out;
  const auto target_index = find_target(x, nearby, previous);
  SolveOutcome chosen;
  if (target_index) {
    const auto& target = nearby[*target_index];
    out.target = target.id;
    const bool same = memory.last_target == target.id && memory.sides.count(target.id) > 0;
    if (same) {
      out.side = memory.sides.at(target.id);
      chosen = solve(prob, pick_seed(&target, out.side));
    } else {
      memory.clear();
      SolveOutcome left, right;
#pragma omp parallel sections
      {
#pragma omp section
        left = solve(prob, pick_seed(&target, Side::Left));
#pragma omp section
        right = solve(prob, pick_seed(&target, Side::Right));
      }
      out.solved_both_sides = true;
      // Ties go to the left; non-finite costs never win.
      const bool take_right = std::isfinite(right.cost) && !(left.cost <= right.cost);
      out.side = take_right ? Side::Right : Side::Left;
      chosen = take_right ? std::move(right) : std::move(left);
      memory.sides[target.id] = out.side;
      memory.last_target = target.id;
    }
  } else {
    memory.clear();
    chosen = solve(prob, pick_seed(nullptr, Side::None));
  }

  std::vector<ControlInput> controls;
  if (std::isfinite(chosen.cost)) {
    controls = from_decision(chosen.z, vehicle_);
  } else {
    out.fallback = true;
    if (previous && !previous->controls.empty()) {
      controls = shifted(previous->controls, N);
      out.warning = "solver failed; reusing shifted previous horizon";
    } else {
      controls = braking_sequence();
      out.warning = "solver failed; braking";
    }
  }
  out.cost = total_cost(prob, controls, &out.record);
  if (!std::isfinite(out.cost)) {
    // Rollout leaves the model range; keep whatever prefix was recorded.
    out.record.weighted = weigh(out.record.stages, config_);
  }
  out.seed_cost = chosen.seed_cost;
  out.iterations = chosen.iterations;
  out.status = chosen.status;
  out.control = controls.front();
  out.horizon = make_horizon(out.record, controls);
  return out;
}

}  // namespace racing
