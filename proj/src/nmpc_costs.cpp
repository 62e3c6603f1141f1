#include "racing/nmpc_costs.hpp"

#include <algorithm>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace racing {

OpponentObservation predict_constant_velocity(int id, const Pose2& pose, double speed, double lx, double ly, int N,
                                              double dt) {
  OpponentObservation o;
  o.id = id;
  o.pose = pose;
  o.vx = speed * std::cos(pose.heading);
  o.vy = speed * std::sin(pose.heading);
  o.lx = lx;
  o.ly = ly;
  o.predicted_track.resize(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    const double t = (k + 1) * dt;
    o.predicted_track[static_cast<std::size_t>(k)] = {pose.x + o.vx * t, pose.y + o.vy * t, pose.heading};
  }
  return o;
}

double progress_cost(const VehicleState& s, const Raceline& line, double alpha) {
  return progress_term(s, line.spline(), alpha);
}

std::vector<double> to_decision(std::span<const ControlInput> controls, const VehicleParams& p) {
  std::vector<double> z(2 * controls.size());
  for (std::size_t k = 0; k < controls.size(); ++k) {
    z[2 * k] = std::clamp(controls[k].delta / p.delta_max, -1.0, 1.0);
    z[2 * k + 1] = std::clamp(controls[k].D, -1.0, 1.0);
  }
  return z;
}

std::vector<ControlInput> from_decision(std::span<const double> z, const VehicleParams& p) {
  std::vector<ControlInput> u(z.size() / 2);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = {z[2 * k] * p.delta_max, z[2 * k + 1]};
  return u;
}

WeightedTerms weigh(const std::vector<StageTerms>& stages, const ControllerConfig& cfg) {
  const auto& w = cfg.weights;
  WeightedTerms out;
  for (const auto& st : stages) {
    out.progress += cfg.progress_mode == ProgressMode::Progress ? -w.k_pt * st.progress : st.progress;
    out.obstacle += w.k_ot * st.obstacle;
    out.drafting += w.k_dt * st.drafting;
    out.safety += w.k_st * st.safety;
    out.lane += w.lane_penalty * st.lane;
  }
  return out;
}

namespace {

Pose2 opponent_pose_at(const OpponentObservation& o, int k) {
  return k == 0 ? o.pose : o.predicted_track[static_cast<std::size_t>(k - 1)];
}

template <class T>
T rollout(const HorizonProblem& prob, std::span<const T> z, RolloutRecord* rec) {
  using std::sqrt;
  const auto& cfg = prob.config;
  const auto& w = cfg.weights;
  const auto& vp = prob.vehicle;
  const int N = cfg.N;
  const double dt = cfg.dt;
  const T inf(std::numeric_limits<double>::infinity());

  StateT<T> s{T(prob.x0.X), T(prob.x0.Y), T(prob.x0.phi), T(prob.x0.vx), T(prob.x0.vy), T(prob.x0.r)};
  T a_line(prob.alpha_line0);
  T a_center(prob.alpha_center0);
  const std::size_t n_opp = prob.opponents.size();
  std::vector<OpponentSnapshot> snaps(n_opp);
  std::vector<Pose2> leads(n_opp);
  for (std::size_t i = 0; i < n_opp; ++i) {
    const auto& o = prob.opponents[i];
    snaps[i] = {o.pose, o.vx, o.vy, o.lx, o.ly};
  }

  if (rec) {
    rec->states.assign(1, prob.x0);
    rec->alpha_line.assign(1, prob.alpha_line0);
    rec->alpha_center.assign(1, prob.alpha_center0);
    rec->stages.clear();
  }

  T total(0.0);
  for (int k = 0; k < N; ++k) {
    if (!(value(s.vx) >= vp.vx_min)) return inf;
    const ControlT<T> u{z[2 * k] * vp.delta_max, z[2 * k + 1]};
    const T speed = sqrt(s.vx * s.vx + s.vy * s.vy);

    T alpha_cd(1.0);
    if (cfg.draft_model && n_opp > 0) {
      for (std::size_t i = 0; i < n_opp; ++i) leads[i] = opponent_pose_at(prob.opponents[i], k);
      alpha_cd = combined_drag_scale(s.X, s.Y, speed, std::span<const Pose2>(leads), prob.drafting);
    }
    const auto slip = slip_angles_unchecked(s, u.delta, vp);
    const T c_st = safety_cost(slip.front, slip.rear, w.alpha_safe);

    const StateT<T> next = cfg.model_integrator == Integrator::Euler
                               ? euler_step(s, u, alpha_cd, dt, vp, prob.tires)
                               : rk4_step(s, u, alpha_cd, dt, vp, prob.tires);
    const T a_line_next = project_on(prob.line.spline(), next.X, next.Y, T(a_line + speed * dt), cfg.r_proj);
    const T a_center_next = project_on(prob.track.centerline(), next.X, next.Y, T(a_center + speed * dt), cfg.r_proj);

    const auto ref = prob.line.spline().eval(a_line_next);
    const T ex = next.X - ref.x;
    const T ey = next.Y - ref.y;
    T c_prog;
    T stage_prog;
    if (cfg.progress_mode == ProgressMode::Progress) {
      c_prog = progress_term(next, prob.line.spline(), a_line_next);
      stage_prog = -w.k_pt * c_prog;
    } else {
      c_prog = cfg.contour_weight * (ex * ex + ey * ey) - cfg.lag_weight * (a_line_next - a_line);
      stage_prog = c_prog;
    }

    T c_ot(0.0), c_dt(0.0);
    if (n_opp > 0) {
      for (std::size_t i = 0; i < n_opp; ++i) snaps[i].pose = prob.opponents[i].predicted_track[static_cast<std::size_t>(k)];
      const std::span<const OpponentSnapshot> view(snaps);
      c_ot = obstacle_cost(next, view, w, vp.length, vp.width);
      c_dt = drafting_cost(next, view, w);
    }
    const T short_by = w.lane_buffer - prob.track.lane_margin_at(next.X, next.Y, a_center_next);
    const T c_lane = value(short_by) > 0.0 ? short_by * short_by : T(0.0);

    total = total + stage_prog + w.k_ot * c_ot + w.k_dt * c_dt + w.k_st * c_st + w.lane_penalty * c_lane;

    if (rec) {
      rec->states.push_back({value(next.X), value(next.Y), value(next.phi), value(next.vx), value(next.vy),
                             value(next.r)});
      rec->alpha_line.push_back(value(a_line_next));
      rec->alpha_center.push_back(value(a_center_next));
      StageTerms st;
      st.progress = value(c_prog);
      st.obstacle = value(c_ot);
      st.drafting = value(c_dt);
      st.safety = value(c_st);
      st.lane = value(c_lane);
      st.alpha_cd = value(alpha_cd);
      st.lateral_error = std::sqrt(value(ex) * value(ex) + value(ey) * value(ey));
      rec->stages.push_back(st);
    }
    s = next;
    a_line = a_line_next;
    a_center = a_center_next;
  }
  if (!std::isfinite(value(total))) return inf;
  if (rec) {
    rec->weighted = weigh(rec->stages, cfg);
    rec->total = value(total);
  }
  return total;
}

using GradDual = Dual<kGradientLanes>;

double gradient_block(const HorizonProblem& prob, std::span<const double> z, std::size_t block, std::span<double> grad) {
  const std::size_t begin = block * kGradientLanes;
  const std::size_t end = std::min(z.size(), begin + kGradientLanes);
  std::vector<GradDual> zd(z.begin(), z.end());
  for (std::size_t i = begin; i < end; ++i) zd[i].d[i - begin] = 1.0;
  const GradDual f = rollout<GradDual>(prob, std::span<const GradDual>(zd), nullptr);
  for (std::size_t i = begin; i < end; ++i) grad[i] = std::isfinite(f.v) ? f.d[i - begin] : 0.0;
  return f.v;
}

std::size_t block_count(std::size_t n) { return (n + kGradientLanes - 1) / kGradientLanes; }

}  // namespace

double evaluate_horizon(const HorizonProblem& prob, std::span<const double> z, RolloutRecord* record) {
  return rollout<double>(prob, z, record);
}

double cost_gradient_serial(const HorizonProblem& prob, std::span<const double> z, std::span<double> grad) {
  double f = 0.0;
  const std::size_t blocks = block_count(z.size());
  for (std::size_t b = 0; b < blocks; ++b) {
    const double fb = gradient_block(prob, z, b, grad);
    if (b == 0) f = fb;
  }
  return f;
}

double cost_gradient_parallel(const HorizonProblem& prob, std::span<const double> z, std::span<double> grad) {
  const auto blocks = static_cast<long>(block_count(z.size()));
  double f = 0.0;
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const double fb = gradient_block(prob, z, static_cast<std::size_t>(b), grad);
    if (b == 0) f = fb;
  }
  return f;
}

}  // namespace racing
