#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "racing/vehicle_config.hpp"
#include "racing/vehicle_dynamics.hpp"

using namespace racing;

namespace {

std::array<double, 6> as_array(const VehicleState& s) { return {s.X, s.Y, s.phi, s.vx, s.vy, s.r}; }

double state_distance(const VehicleState& a, const VehicleState& b) {
  const auto x = as_array(a), y = as_array(b);
  double d = 0.0;
  for (int i = 0; i < 6; ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace

TEST_CASE("slip angle examples") {
  VehicleParams p;
  p.lF = 1.5;
  p.lR = 1.5;
  const VehicleState s{0, 0, 0, 50.0, 1.0, 0.1};
  const auto slip = slip_angles(s, 0.05, p);
  CHECK(slip.front == doctest::Approx(0.05 - std::atan(1.15 / 50.0)).epsilon(1e-12));
  CHECK(slip.front == doctest::Approx(0.0270041).epsilon(1e-5));
  CHECK(slip.rear == doctest::Approx(std::atan(-0.85 / 50.0)).epsilon(1e-12));

  const auto straight = slip_angles(VehicleState{0, 0, 0, 20.0, 0, 0}, 0.0, p);
  CHECK(straight.front == 0.0);
  CHECK(straight.rear == 0.0);
  CHECK_THROWS_AS(slip_angles(VehicleState{0, 0, 0, 0.5, 0, 0}, 0.0, p), DomainError);
}

TEST_CASE("vertical loads and longitudinal force examples") {
  VehicleParams p;
  p.ClF = 0.5;
  p.rho = 1.2;
  p.S = 1.0;
  p.FsFz = 3000.0;
  CHECK(vertical_loads(80.0, p).front == doctest::Approx(4920.0));
  CHECK(vertical_loads(0.0, p).front == p.FsFz);
  CHECK(vertical_loads(0.0, p).rear == p.FsRz);
  p.ClF = 0.0;
  CHECK(vertical_loads(60.0, p).front == p.FsFz);

  VehicleParams q;
  q.Cm1 = 8000;
  q.Cm2 = 50;
  q.CR = 100;
  q.Cd = 0.8;
  q.rho = 1.2;
  q.S = 1.0;
  CHECK(longitudinal_force(0.0, 0.0, 1.0, q) == doctest::Approx(-100.0));
  CHECK(longitudinal_force(50.0, 1.0, 1.0, q) == doctest::Approx(4200.0));
  CHECK(longitudinal_force(50.0, 1.0, 0.805, q) == doctest::Approx(4434.0));
}

TEST_CASE("state derivative matches the reference on random inputs") {
  const VehicleParams p;
  const auto c = oracle::full_tire_set();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-500, 500), ang(-std::numbers::pi, std::numbers::pi), vx(2, 80),
      vy(-4, 4), r(-1.5, 1.5), steer(-0.35, 0.35), drive(-1, 1), scale(0.7, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const VehicleState s{pos(rng), pos(rng), ang(rng), vx(rng), vy(rng), r(rng)};
    const ControlInput u{steer(rng), drive(rng)};
    const double a = scale(rng);
    const auto got = as_array(state_derivative(s, u, a, p, c));
    const auto want = oracle::rates(as_array(s), u.delta, u.D, a, p, c);
    for (int k = 0; k < 6; ++k) worst = std::max(worst, oracle::rel_err(got[k], want[k]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("straight-line equilibrium") {
  const VehicleParams p;
  const TireCoefficients c;
  const double vx = 40.0;
  const double resist = p.CR + 0.5 * p.rho * p.Cd * p.S * vx * vx;
  const double D = resist / (p.Cm1 - p.Cm2 * vx);
  const double phi = 0.3;
  const auto d = state_derivative(VehicleState{0, 0, phi, vx, 0, 0}, ControlInput{0, D}, 1.0, p, c);
  CHECK(d.X == doctest::Approx(vx * std::cos(phi)));
  CHECK(d.Y == doctest::Approx(vx * std::sin(phi)));
  CHECK(d.phi == 0.0);
  CHECK(std::abs(d.vx) < 1e-9);
  CHECK(d.vy == 0.0);
  CHECK(d.r == 0.0);
}

TEST_CASE("heading a quarter turn rotates the position rates") {
  const VehicleParams p;
  const TireCoefficients c;
  const auto d = state_derivative(VehicleState{3, 4, std::numbers::pi / 2, 30.0, 1.5, 0.1}, ControlInput{0.02, 0.3},
                                  1.0, p, c);
  CHECK(d.X == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(d.Y == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("translation invariance and rotation equivariance") {
  const VehicleParams p;
  const TireCoefficients c;
  const VehicleState s{10, -20, 0.4, 35, 0.8, 0.2};
  const ControlInput u{0.05, 0.4};
  const auto base = state_derivative(s, u, 0.9, p, c);
  auto moved = s;
  moved.X += 123.0;
  moved.Y -= 77.0;
  CHECK(state_distance(state_derivative(moved, u, 0.9, p, c), base) == 0.0);

  const double th = 0.7;
  auto rot = s;
  rot.X = std::cos(th) * s.X - std::sin(th) * s.Y;
  rot.Y = std::sin(th) * s.X + std::cos(th) * s.Y;
  rot.phi = s.phi + th;
  const auto d = state_derivative(rot, u, 0.9, p, c);
  CHECK(d.X == doctest::Approx(std::cos(th) * base.X - std::sin(th) * base.Y).epsilon(1e-12));
  CHECK(d.Y == doctest::Approx(std::sin(th) * base.X + std::cos(th) * base.Y).epsilon(1e-12));
  CHECK(d.vx == doctest::Approx(base.vx).epsilon(1e-12));
  CHECK(d.vy == doctest::Approx(base.vy).epsilon(1e-12));
  CHECK(d.r == doctest::Approx(base.r).epsilon(1e-12));
}

TEST_CASE("small steps agree with the derivative") {
  const VehicleParams p;
  const TireCoefficients c;
  const VehicleState s{0, 0, 0.2, 30, 0.5, 0.1};
  const ControlInput u{0.03, 0.5};
  const auto d = state_derivative(s, u, 1.0, p, c);
  for (double dt : {1e-3, 1e-4}) {
    const auto e = integrate(s, u, 1.0, dt, p, c, Integrator::Euler);
    const auto r = integrate(s, u, 1.0, dt, p, c, Integrator::RK4);
    CHECK(std::abs((r.vx - s.vx) / dt - d.vx) < 50 * dt);
    CHECK(state_distance(e, r) < 50 * dt * dt);
  }
  CHECK_THROWS_AS(integrate(s, u, 1.0, 0.0, p, c), std::invalid_argument);
}

TEST_CASE("constant force on a straight matches the closed form") {
  VehicleParams p;
  p.Cm2 = 0.0;
  p.CR = 0.0;
  p.Cd = 0.0;
  const TireCoefficients c;
  VehicleState s{0, 0, 0, 10.0, 0, 0};
  const ControlInput u{0.0, 0.5};
  for (int i = 0; i < 100; ++i) s = integrate(s, u, 1.0, 0.01, p, c);
  CHECK(s.vx == doctest::Approx(10.0 + p.Cm1 * 0.5 / p.m * 1.0).epsilon(1e-12));
}

TEST_CASE("rk4 error shrinks with the fourth power of the step") {
  const VehicleParams p;
  const TireCoefficients c;
  const VehicleState s0{0, 0, 0, 25.0, 0.0, 0.0};
  const ControlInput u{0.12, 0.6};
  const auto run = [&](double dt) {
    VehicleState s = s0;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) s = rk4_step(s, u, 1.0, dt, p, c);
    return s;
  };
  const auto ref = run(1e-5);
  const double e1 = state_distance(run(0.04), ref);
  const double e2 = state_distance(run(0.02), ref);
  const double e3 = state_distance(run(0.01), ref);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.5));
  CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.5));
}

TEST_CASE("kinematic fallback keeps the car moving forward at low speed") {
  const VehicleParams p;
  const TireCoefficients c;
  VehicleState s{0, 0, 0, 0.5, 0, 0};
  for (int i = 0; i < 100; ++i) s = plant_rk4_step(s, ControlInput{0.1, -1.0}, 1.0, 0.01, p, c);
  CHECK(s.vx >= 0.0);
  CHECK(std::isfinite(s.X));
  s = VehicleState{0, 0, 0, 0.5, 0, 0};
  for (int i = 0; i < 200; ++i) s = plant_rk4_step(s, ControlInput{0.0, 1.0}, 1.0, 0.01, p, c);
  CHECK(s.vx > 5.0);
}

TEST_CASE("coasting on a straight never gains speed") {
  const VehicleParams p;
  const TireCoefficients c;
  VehicleState s{0, 0, 0, 45.0, 0, 0};
  for (int i = 0; i < 500; ++i) {
    const auto next = plant_rk4_step(s, ControlInput{0.0, 0.0}, 1.0, 0.01, p, c);
    CHECK(next.vx <= s.vx);
    s = next;
  }
}

TEST_CASE("vehicle parameters validate and round-trip") {
  VehicleParams bad;
  bad.FsFz *= 1.1;
  CHECK_THROWS(bad.validate());
  VehicleConfig cfg;
  cfg.drafting.zone_length = 25.0;
  const auto back = vehicle_config_from_text(to_key_value(cfg), "mem");
  CHECK(back.vehicle.Iz == cfg.vehicle.Iz);
  CHECK(back.drafting.zone_length == 25.0);
  CHECK_THROWS(vehicle_config_from_text("m = -3\n", "mem"));
}
