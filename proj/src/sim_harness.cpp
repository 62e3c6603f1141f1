#include "racing/sim_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "racing/key_value.hpp"

namespace racing {

namespace {

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

Pose2 pose_on_line(const Raceline& line, double s, double offset) {
  const auto p = line.spline().eval(s);
  const double n = std::hypot(p.dx, p.dy);
  return {p.x - offset * p.dy / n, p.y + offset * p.dx / n, std::atan2(p.dy, p.dx)};
}

double clamp_open(const Raceline& line, double s) { return line.closed() ? s : std::clamp(s, 0.0, line.length()); }

std::string resolve(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base.empty()) return p.string();
  return (std::filesystem::path(base) / p).string();
}

}  // namespace

void Scenario::validate() const {
  if (!(dt_sim > 0.0)) throw std::invalid_argument("scenario: dt_sim must be positive");
  if (dt_sim > controller.dt + 1e-12) throw std::invalid_argument("scenario: dt_sim must not exceed controller dt");
  if (!(duration >= 0.0)) throw std::invalid_argument("scenario: duration must be non-negative");
  if (laps < 0) throw std::invalid_argument("scenario: laps must be non-negative");
  if (!(ego_speed >= 0.0)) throw std::invalid_argument("scenario: ego_speed must be non-negative");
  for (const auto& o : opponents) {
    if (!(o.length > 0.0 && o.width > 0.0)) throw std::invalid_argument("scenario: opponent footprint must be positive");
    if (!(o.speed_fraction >= 0.0)) throw std::invalid_argument("scenario: opponent speed_fraction must be non-negative");
    const Pose2 p = pose_on_line(raceline, clamp_open(raceline, o.s), o.offset);
    if (track.lane_violation(p.x, p.y) < 0.0)
      throw std::invalid_argument("scenario: opponent " + std::to_string(o.id) + " starts outside the track");
  }
}

Scenario scenario_from_text(const std::string& text, const std::string& source, const std::string& base_dir) {
  Scenario sc;
  OpponentSpec* opp = nullptr;
  bool have_track = false, have_line = false;
  for (const auto& e : parse_key_value_text(text, source)) {
    if (e.key.size() > 1 && e.key.front() == '[') {
      if (e.key != "[opponent]") throw ParseError(source, e.line, "unknown section " + e.key);
      sc.opponents.push_back({});
      sc.opponents.back().id = static_cast<int>(sc.opponents.size());
      opp = &sc.opponents.back();
      continue;
    }
    if (opp) {
      if (e.key == "id") opp->id = parse_int(e, source);
      else if (e.key == "s") opp->s = parse_double(e, source);
      else if (e.key == "speed_fraction") opp->speed_fraction = parse_double(e, source);
      else if (e.key == "offset") opp->offset = parse_double(e, source);
      else if (e.key == "length") opp->length = parse_double(e, source);
      else if (e.key == "width") opp->width = parse_double(e, source);
      else throw ParseError(source, e.line, "unknown opponent setting '" + e.key + "'");
      continue;
    }
    const auto path = [&] { return resolve(base_dir, e.value); };
    if (e.key == "track") {
      sc.track = read_track_csv(path());
      have_track = true;
    } else if (e.key == "raceline") {
      sc.raceline = read_raceline_csv(path());
      have_line = true;
    } else if (e.key == "vehicle") {
      sc.vehicle = load_vehicle_config(path());
    } else if (e.key == "tires") {
      sc.tires = load_tire_coefficients(path());
    } else if (e.key == "controller") {
      sc.controller = load_controller_config(path());
    } else if (e.key == "ego_s") {
      sc.ego_s = parse_double(e, source);
    } else if (e.key == "ego_offset") {
      sc.ego_offset = parse_double(e, source);
    } else if (e.key == "ego_speed") {
      sc.ego_speed = parse_double(e, source);
    } else if (e.key == "duration") {
      sc.duration = parse_double(e, source);
    } else if (e.key == "laps") {
      sc.laps = parse_int(e, source);
    } else if (e.key == "dt_sim") {
      sc.dt_sim = parse_double(e, source);
    } else {
      throw ParseError(source, e.line, "unknown scenario setting '" + e.key + "'");
    }
  }
  if (!have_track) throw ParseError(source, 0, "missing 'track'");
  if (!have_line) throw ParseError(source, 0, "missing 'raceline'");
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return scenario_from_text(read_text_file(path), path, base);
}

void place_opponent(OpponentState& o, const Raceline& line) {
  const double s = clamp_open(line, o.s);
  o.pose = pose_on_line(line, s, o.spec.offset);
  o.speed = o.spec.speed_fraction * line.ref_speed(s);
}

World initial_world(const Scenario& sc) {
  World w;
  const auto& line = sc.raceline;
  const double s0 = clamp_open(line, sc.ego_s);
  const Pose2 p = pose_on_line(line, s0, sc.ego_offset);
  w.ego = {p.x, p.y, p.heading, sc.ego_speed, 0.0, 0.0};
  for (const auto& spec : sc.opponents) {
    OpponentState o;
    o.spec = spec;
    // Unwrapped so that relative progress to the ego is within half a lap.
    o.s = s0 + arc_ahead(line.spline(), s0, clamp_open(line, spec.s));
    place_opponent(o, line);
    w.opponents.push_back(o);
  }
  return w;
}

World step_world(const World& w, const ControlInput& u, double dt, const StepContext& ctx) {
  World out = w;
  double alpha_cd = 1.0;
  if (ctx.draft_model && !w.opponents.empty()) {
    std::vector<Pose2> leads;
    for (const auto& o : w.opponents) leads.push_back(o.pose);
    const double v = std::hypot(w.ego.vx, w.ego.vy);
    alpha_cd = combined_drag_scale(w.ego.X, w.ego.Y, v, std::span<const Pose2>(leads), ctx.drafting);
  }
  out.alpha_cd = alpha_cd;
  out.ego = plant_rk4_step(w.ego, clamp_control(u, ctx.vehicle), alpha_cd, dt, ctx.vehicle, ctx.tires);
  for (auto& o : out.opponents) {
    // Midpoint rule on ds/dt = fraction * v_ref(s).
    const double v0 = o.spec.speed_fraction * ctx.line.ref_speed(clamp_open(ctx.line, o.s));
    const double vm = o.spec.speed_fraction * ctx.line.ref_speed(clamp_open(ctx.line, o.s + 0.5 * dt * v0));
    o.s += vm * dt;
    if (!ctx.line.closed()) o.s = std::min(o.s, ctx.line.length());
    place_opponent(o, ctx.line);
  }
  out.t = w.t + dt;
  return out;
}

std::optional<Collision> detect_collision(const Footprint& a, const Footprint& b) {
  const double ca = std::cos(a.pose.heading), sa = std::sin(a.pose.heading);
  const double cb = std::cos(b.pose.heading), sb = std::sin(b.pose.heading);
  const double axes[4][2] = {{ca, sa}, {-sa, ca}, {cb, sb}, {-sb, cb}};
  const double dx = b.pose.x - a.pose.x;
  const double dy = b.pose.y - a.pose.y;
  double depth = std::numeric_limits<double>::infinity();
  for (const auto& ax : axes) {
    const auto radius = [&](const Footprint& f, double c, double s) {
      const double along = std::abs(ax[0] * c + ax[1] * s);
      const double across = std::abs(-ax[0] * s + ax[1] * c);
      return 0.5 * f.length * along + 0.5 * f.width * across;
    };
    const double overlap = radius(a, ca, sa) + radius(b, cb, sb) - std::abs(ax[0] * dx + ax[1] * dy);
    if (overlap < 0.0) return std::nullopt;
    depth = std::min(depth, overlap);
  }
  return Collision{depth};
}

SimLog run(const Scenario& sc, const RunOptions& opts) {
  ControllerConfig cfg = sc.controller;
  if (!opts.draft_cost) cfg.weights.k_dt = 0.0;
  if (opts.contouring) cfg.progress_mode = ProgressMode::Contouring;
  if (opts.contour_weight) cfg.contour_weight = *opts.contour_weight;
  if (opts.lag_weight) cfg.lag_weight = *opts.lag_weight;
  if (!opts.draft_model) cfg.draft_model = false;
  sc.validate();

  const auto& line = sc.raceline;
  const auto& sp = line.spline();
  const auto& vp = sc.vehicle.vehicle;
  NmpcController ctl(line, sc.track, vp, sc.tires, sc.vehicle.drafting, cfg);
  ctl.set_parallel_gradient(opts.parallel_gradient);
  const StepContext ctx{line, vp, sc.tires, sc.vehicle.drafting, opts.draft_model};

  const int ratio = std::max(1, static_cast<int>(std::lround(cfg.dt / sc.dt_sim)));
  const int ticks = static_cast<int>(std::lround(sc.duration / sc.dt_sim));

  SimLog log;
  World w = initial_world(sc);
  double alpha_line = line.project(w.ego.X, w.ego.Y, 8);
  double alpha_center = sc.track.project(w.ego.X, w.ego.Y, 8);
  const double start_progress = clamp_open(line, sc.ego_s);
  double progress = start_progress;
  OvertakeMemory memory;
  std::optional<Horizon> previous;
  PlanResult last_plan;
  ControlInput u{0.0, 0.0};
  bool off_track = false;
  std::vector<double> rel(w.opponents.size());

  const auto record = [&](int tick) {
    LogRow row;
    row.tick = tick;
    row.t = w.t;
    row.ego = w.ego;
    row.speed = std::hypot(w.ego.vx, w.ego.vy);
    row.control = u;
    row.alpha_cd = w.alpha_cd;
    row.progress = progress;
    row.line_offset = signed_offset(sp, alpha_line, w.ego.X, w.ego.Y);
    row.lane_margin = sc.track.lane_margin_at(w.ego.X, w.ego.Y, alpha_center);
    row.cost = last_plan.record.weighted;
    row.k_dt = cfg.weights.k_dt;
    row.side = last_plan.side;
    row.iterations = last_plan.iterations;
    for (const auto& o : w.opponents) {
      LogRow::Opp r;
      r.id = o.spec.id;
      r.pose = o.pose;
      r.progress = o.s;
      const auto off = trailing_offset(o.pose, w.ego.X, w.ego.Y);
      r.behind = off.behind;
      r.lateral = off.lateral;
      r.ellipse = std::pow(off.behind / o.spec.length, 2) + std::pow(off.lateral / o.spec.width, 2);
      row.opponents.push_back(r);
    }
    log.rows.push_back(std::move(row));
  };
  const auto event = [&](int tick, std::string type, std::optional<int> opp, double value, std::string detail) {
    log.events.push_back({tick, w.t, std::move(type), opp, value, std::move(detail)});
  };

  for (std::size_t i = 0; i < w.opponents.size(); ++i) rel[i] = progress - w.opponents[i].s;
  record(0);

  for (int tick = 1; tick <= ticks; ++tick) {
    if ((tick - 1) % ratio == 0) {
      std::vector<OpponentObservation> obs;
      for (const auto& o : w.opponents)
        obs.push_back(predict_constant_velocity(o.spec.id, o.pose, o.speed, o.spec.length, o.spec.width, cfg.N,
                                                cfg.dt));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        last_plan = ctl.plan(w.ego, obs, memory, previous ? &*previous : nullptr);
        u = last_plan.control;
        previous = last_plan.horizon;
        if (opts.on_plan) opts.on_plan(w, last_plan);
        if (last_plan.fallback) event(tick - 1, "controller_fault", std::nullopt, 0.0, last_plan.warning);
      } catch (const std::exception& ex) {
        u = {0.0, -1.0};
        previous.reset();
        event(tick - 1, "controller_fault", std::nullopt, 0.0, ex.what());
      }
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      log.plan_ms.push_back(ms);
      log.planned_sides.push_back(last_plan.side);
      log.planned_targets.push_back(last_plan.target);
      if (opts.timing) *opts.timing << w.t << ' ' << ms << '\n';
    }

    const double speed = std::hypot(w.ego.vx, w.ego.vy);
    w = step_world(w, u, sc.dt_sim, ctx);
    const double a_new = line.project(w.ego.X, w.ego.Y, cfg.r_proj, alpha_line + speed * sc.dt_sim);
    progress += arc_ahead(sp, alpha_line, a_new);
    alpha_line = a_new;
    alpha_center = sc.track.project(w.ego.X, w.ego.Y, cfg.r_proj, alpha_center + speed * sc.dt_sim);
    record(tick);

    const auto& row = log.rows.back();
    if (row.lane_margin < 0.0 && !off_track) event(tick, "lane_departure", std::nullopt, row.lane_margin, "");
    off_track = row.lane_margin < 0.0;

    for (std::size_t i = 0; i < w.opponents.size(); ++i) {
      const auto& o = w.opponents[i];
      const double r = progress - o.s;
      if (rel[i] < 0.0 && r >= 0.0) event(tick, "overtake", o.spec.id, r, "ego_ahead");
      if (rel[i] >= 0.0 && r < 0.0) event(tick, "overtake", o.spec.id, r, "opponent_ahead");
      rel[i] = r;
    }

    if (line.closed()) {
      const int laps = static_cast<int>(std::floor((progress - start_progress) / line.length()));
      while (log.laps_completed < laps) {
        ++log.laps_completed;
        event(tick, "lap", std::nullopt, log.laps_completed, "");
      }
    }

    bool hit = false;
    for (const auto& o : w.opponents) {
      const auto c = detect_collision({{w.ego.X, w.ego.Y, w.ego.phi}, vp.length, vp.width},
                                      {o.pose, o.spec.length, o.spec.width});
      if (c) {
        event(tick, "collision", o.spec.id, c->depth, "");
        hit = true;
      }
    }
    if (hit) {
      log.collided = true;
      break;
    }
    if (sc.laps > 0 && log.laps_completed >= sc.laps) break;
    if (!line.closed() && alpha_line >= line.length() - vp.length) break;
  }
  return log;
}

namespace {

void append(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

}  // namespace

std::string log_csv(const SimLog& log) {
  std::string out =
      "tick,t,X,Y,phi,vx,vy,r,speed,delta,D,alpha_cd,progress,line_offset,lane_margin,"
      "cost_progress,cost_obstacle,cost_drafting,cost_safety,cost_lane,k_dt,side,iterations";
  if (!log.rows.empty()) {
    for (const auto& o : log.rows.front().opponents) {
      const std::string p = ",opp" + std::to_string(o.id) + "_";
      out += p + "x" + p + "y" + p + "heading" + p + "progress" + p + "behind" + p + "lateral" + p + "ellipse";
    }
  }
  out += '\n';
  for (const auto& r : log.rows) {
    out += std::to_string(r.tick);
    for (double v : {r.t, r.ego.X, r.ego.Y, r.ego.phi, r.ego.vx, r.ego.vy, r.ego.r, r.speed, r.control.delta,
                     r.control.D, r.alpha_cd, r.progress, r.line_offset, r.lane_margin, r.cost.progress,
                     r.cost.obstacle, r.cost.drafting, r.cost.safety, r.cost.lane, r.k_dt}) {
      out += ',';
      append(out, v);
    }
    out += ',';
    out += to_string(r.side);
    out += ',';
    out += std::to_string(r.iterations);
    for (const auto& o : r.opponents) {
      for (double v : {o.pose.x, o.pose.y, o.pose.heading, o.progress, o.behind, o.lateral, o.ellipse}) {
        out += ',';
        append(out, v);
      }
    }
    out += '\n';
  }
  return out;
}

std::string events_jsonl(const SimLog& log) {
  std::string out;
  for (const auto& e : log.events) {
    nlohmann::json j;
    j["tick"] = e.tick;
    j["t"] = e.t;
    j["type"] = e.type;
    if (e.opponent) j["opponent"] = *e.opponent;
    j["value"] = e.value;
    if (!e.detail.empty()) j["detail"] = e.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace racing
