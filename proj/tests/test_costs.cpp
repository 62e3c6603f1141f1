#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "racing/fixtures.hpp"
#include "racing/nmpc_controller.hpp"
#include "racing/raceline_opt.hpp"
#include "racing/scenarios.hpp"

using namespace racing;

namespace {

Raceline circle_line(double R, int n) {
  std::vector<RacelinePoint> pts;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    pts.push_back({R * std::cos(t), R * std::sin(t), 0.0, 0.0});
  }
  return Raceline::from_points(pts, true);
}

Raceline straight_line(double length) {
  std::vector<RacelinePoint> pts;
  for (double x = 0.0; x <= length; x += 5.0) pts.push_back({x, 0.0, 40.0, 0.0});
  return Raceline::from_points(pts, false);
}

struct Setup {
  Track track;
  Raceline line;
  VehicleParams vehicle;
  TireCoefficients tires;
  DraftingParams drafting;
  ControllerConfig config;
  std::vector<OpponentObservation> opps;
  HorizonProblem problem(const VehicleState& x) const {
    HorizonProblem p{line, track, vehicle, tires, drafting, config, opps, x, 0.0, 0.0};
    p.alpha_line0 = line.project(x.X, x.Y, config.r_proj);
    p.alpha_center0 = track.project(x.X, x.Y, config.r_proj);
    return p;
  }
};

// Ego on the oval straight with a slower car ahead and slightly to the left.
Setup oval_with_opponent() {
  Setup s;
  s.track = fixture_oval();
  s.line = optimize_raceline(fixture_raceline_problem(s.track, 300)).line;
  s.opps.push_back(predict_constant_velocity(1, {-120.0, -157.0, 0.0}, 25.0, 4.9, 1.9, s.config.N, s.config.dt));
  return s;
}

double fd_relative_error(const HorizonProblem& prob, const std::vector<double>& z) {
  std::vector<double> g(z.size());
  cost_gradient_serial(prob, z, g);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto zp = z, zm = z;
    zp[i] += 1e-6;
    zm[i] -= 1e-6;
    const double fd = (evaluate_horizon(prob, zp) - evaluate_horizon(prob, zm)) / 2e-6;
    num += (g[i] - fd) * (g[i] - fd);
    den += fd * fd;
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("progress term examples") {
  const auto circ = circle_line(200.0, 720);
  const double a = 300.0;
  const auto p = circ.spline().eval(a);
  const double th = std::atan2(p.dy, p.dx);
  const double n = std::hypot(p.dx, p.dy);
  // 5 m to the right of the line (outside of the left-hand circle).
  const VehicleState s{p.x + 5.0 * p.dy / n, p.y - 5.0 * p.dx / n, th + 0.1, 50.0, 0.0, 0.0};
  CHECK(progress_cost(s, circ, a) == doctest::Approx(48.55).epsilon(1e-3));

  const auto st = straight_line(200.0);
  CHECK(progress_cost(VehicleState{50.0, 0.0, 0.0, 33.0, 0.0, 0.0}, st, 50.0) == doctest::Approx(33.0));
  CHECK(std::abs(progress_cost(VehicleState{50.0, 0.0, std::numbers::pi / 2, 33.0, 0.0, 0.0}, st, 50.0)) < 1e-12);
}

TEST_CASE("obstacle term examples") {
  CHECK(obstacle_term(10.0, 2.0, 1.0, 5.0, 2.0, 1.0, 10.0) == doctest::Approx(24.38).epsilon(1e-3));
  CHECK(obstacle_term(10.0, 1e6, 1e6, 5.0, 2.0, 1.0, 10.0) < 1e-9);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(std::isfinite(obstacle_term(10.0, 0.0, 0.0, 5.0, 2.0, 1.0, 10.0)));
}

TEST_CASE("drafting term examples and gate complementarity") {
  CHECK(drafting_term(15.0, 0.0, 0.5, 15.0) == 0.0);
  CHECK(drafting_term(-20.0, 3.0, 0.5, 15.0) < 1e-6);
  CHECK(drafting_term(15.0, 2.0, 0.5, 15.0) == doctest::Approx(1.0));
  for (double dx : {-10.0, 0.0, 7.5, 15.0, 40.0}) {
    const double g = sigmoid(0.5 * (15.0 - dx));
    CHECK(g + drafting_term(dx, 1.0, 0.5, 15.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("safety term examples") {
  CHECK(safety_cost(0.05, -0.05, 0.1) == 0.0);
  CHECK(safety_cost(0.1, 0.0, 0.1) == 0.0);
  CHECK(safety_cost(0.12, 0.01, 0.1) == doctest::Approx(4e-4));
  CHECK(safety_cost(-0.12, 0.01, 0.1) == doctest::Approx(4e-4));
}

TEST_CASE("total cost degenerate cases") {
  Setup s;
  s.track = straight_track(400.0, 6.0);
  s.line = straight_line(400.0);
  s.config.N = 1;
  const VehicleState x{100.0, 0.0, 0.0, 30.0, 0.0, 0.0};
  const std::vector<double> z = {0.0, 0.2};
  RolloutRecord rec;
  const double f = evaluate_horizon(s.problem(x), z, &rec);
  CHECK(f == doctest::Approx(-s.config.weights.k_pt * std::hypot(rec.states[1].vx, rec.states[1].vy)).epsilon(1e-9));

  s.config.weights = {};
  s.config.weights.k_pt = 0.0;
  s.config.weights.k_ot = s.config.weights.k_dt = s.config.weights.k_st = s.config.weights.lane_penalty = 0.0;
  CHECK(evaluate_horizon(s.problem(x), z) == 0.0);
}

TEST_CASE("recorded term columns add up to the total") {
  auto s = oval_with_opponent();
  const VehicleState x{-150.0, -157.0, 0.0, 35.0, 0.0, 0.0};
  std::vector<double> z(2 * s.config.N);
  for (int k = 0; k < s.config.N; ++k) z[2 * k] = 0.05, z[2 * k + 1] = 0.3;
  RolloutRecord rec;
  const double f = evaluate_horizon(s.problem(x), z, &rec);
  CHECK(rec.stages.size() == static_cast<std::size_t>(s.config.N));
  CHECK(rec.states.size() == static_cast<std::size_t>(s.config.N + 1));
  CHECK(rec.weighted.obstacle > 0.0);
  CHECK(rec.weighted.sum() == doctest::Approx(f).epsilon(1e-12));
  CHECK(weigh(rec.stages, s.config).sum() == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("rollout states satisfy the discrete dynamics") {
  auto s = oval_with_opponent();
  const VehicleState x{-150.0, -157.0, 0.0, 35.0, 0.0, 0.0};
  std::vector<double> z(2 * s.config.N, 0.1);
  RolloutRecord rec;
  evaluate_horizon(s.problem(x), z, &rec);
  const auto u = from_decision(z, s.vehicle);
  VehicleState prev = x;
  for (int k = 0; k < s.config.N; ++k) {
    const auto& st = rec.stages[static_cast<std::size_t>(k)];
    const auto next = euler_step(prev, u[static_cast<std::size_t>(k)], st.alpha_cd, s.config.dt, s.vehicle, s.tires);
    CHECK(rec.states[static_cast<std::size_t>(k + 1)].X == next.X);
    CHECK(rec.states[static_cast<std::size_t>(k + 1)].vx == next.vx);
    prev = next;
  }
}

TEST_CASE("rollout below the guard speed is infeasible") {
  auto s = oval_with_opponent();
  const VehicleState x{-150.0, -157.0, 0.0, 0.5, 0.0, 0.0};
  CHECK(std::isinf(evaluate_horizon(s.problem(x), std::vector<double>(2 * s.config.N, 0.0))));
}

TEST_CASE("dual-number gradient matches central differences") {
  auto s = oval_with_opponent();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> steer(-0.2, 0.2), drive(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    const VehicleState x{-150.0, -157.0 + trial, 0.02 * trial, 32.0 + trial, 0.0, 0.0};
    std::vector<double> z(2 * s.config.N);
    for (int k = 0; k < s.config.N; ++k) z[2 * k] = steer(rng), z[2 * k + 1] = drive(rng);
    CHECK(fd_relative_error(s.problem(x), z) < 1e-4);
  }
}

TEST_CASE("parallel gradient kernel equals the serial reference") {
  auto s = oval_with_opponent();
  const VehicleState x{-150.0, -156.0, 0.01, 36.0, 0.2, 0.01};
  std::vector<double> z(2 * s.config.N);
  for (int k = 0; k < s.config.N; ++k) z[2 * k] = 0.1 * std::sin(k), z[2 * k + 1] = 0.5 * std::cos(k);
  std::vector<double> gs(z.size()), gp(z.size());
  const double fs = cost_gradient_serial(s.problem(x), z, gs);
  const double fp = cost_gradient_parallel(s.problem(x), z, gp);
  CHECK(fs == fp);
  CHECK(fs == doctest::Approx(evaluate_horizon(s.problem(x), z)).epsilon(1e-12));
  CHECK(gs == gp);
}

TEST_CASE("decision vector round trip clamps to the box") {
  const VehicleParams p;
  const std::vector<ControlInput> u = {{0.1, 0.5}, {-1.0, 2.0}};
  const auto z = to_decision(u, p);
  CHECK(z[0] == doctest::Approx(0.1 / p.delta_max));
  CHECK(z[2] == -1.0);
  CHECK(z[3] == 1.0);
  CHECK(from_decision(z, p)[0].delta == doctest::Approx(0.1));
}
