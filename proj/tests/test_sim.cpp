#include <doctest.h>

#include <cmath>
#include <numbers>

#include "racing/fixtures.hpp"
#include "racing/key_value.hpp"
#include "racing/raceline_opt.hpp"
#include "racing/scenarios.hpp"
#include "racing/sim_harness.hpp"

using namespace racing;

TEST_CASE("separating-axis collision test") {
  const Footprint a{{0.0, 0.0, 0.0}, 4.0, 2.0};
  CHECK(detect_collision(a, a).has_value());
  CHECK(detect_collision(a, a)->depth == doctest::Approx(2.0));
  const double diag = std::hypot(4.0, 2.0);
  CHECK_FALSE(detect_collision(a, {{diag + 0.01, 0.0, 0.7}, 4.0, 2.0}).has_value());
  // Corners meet at (2, 1).
  const auto touch = detect_collision(a, {{4.0, 2.0, 0.0}, 4.0, 2.0});
  REQUIRE(touch.has_value());
  CHECK(touch->depth == 0.0);
  CHECK_FALSE(detect_collision(a, {{4.0, 2.0 + 1e-9, 0.0}, 4.0, 2.0}).has_value());
  // Rotated car clear of the gap along x but within the axis-aligned bounds.
  CHECK_FALSE(detect_collision(a, {{3.9, 2.1, std::numbers::pi / 4}, 4.0, 2.0}).has_value());
}

namespace {

Scenario small_oval() {
  Scenario sc;
  sc.track = oval_track(100.0, 50.0, 6.0);
  RacelineProblem p{sc.track};
  p.n_points = 200;
  p.limits.a_lat_max = 8.0;
  sc.raceline = optimize_raceline(p).line;
  sc.ego_speed = 25.0;
  return sc;
}

}  // namespace

TEST_CASE("world step without opponents is the plain plant step") {
  auto sc = small_oval();
  const auto w = initial_world(sc);
  const StepContext ctx{sc.raceline, sc.vehicle.vehicle, sc.tires, sc.vehicle.drafting, true};
  const ControlInput u{0.02, 0.4};
  const auto next = step_world(w, u, 0.01, ctx);
  const auto ref = plant_rk4_step(w.ego, u, 1.0, 0.01, sc.vehicle.vehicle, sc.tires);
  CHECK(next.ego.X == ref.X);
  CHECK(next.ego.vx == ref.vx);
  CHECK(next.alpha_cd == 1.0);
  CHECK(next.t == doctest::Approx(0.01));
}

TEST_CASE("drafting drag follows the actual opponents") {
  auto sc = small_oval();
  sc.opponents.push_back({1, 10.0, 0.9, 0.0, 4.9, 1.9});
  auto w = initial_world(sc);
  const StepContext ctx{sc.raceline, sc.vehicle.vehicle, sc.tires, sc.vehicle.drafting, true};
  const auto drafted = step_world(w, {0.0, 0.3}, 0.01, ctx);
  CHECK(drafted.alpha_cd < 1.0);
  w.opponents.clear();
  CHECK(step_world(w, {0.0, 0.3}, 0.01, ctx).alpha_cd == 1.0);
  const StepContext no_model{sc.raceline, sc.vehicle.vehicle, sc.tires, sc.vehicle.drafting, false};
  CHECK(step_world(initial_world(sc), {0.0, 0.3}, 0.01, no_model).alpha_cd == 1.0);
}

TEST_CASE("two half steps agree with one full step to second order") {
  auto sc = small_oval();
  const auto w = initial_world(sc);
  const StepContext ctx{sc.raceline, sc.vehicle.vehicle, sc.tires, sc.vehicle.drafting, true};
  const ControlInput u{0.03, 0.5};
  for (double dt : {0.02, 0.01}) {
    const auto one = step_world(w, u, dt, ctx);
    const auto two = step_world(step_world(w, u, 0.5 * dt, ctx), u, 0.5 * dt, ctx);
    CHECK(std::abs(one.ego.X - two.ego.X) < 10 * dt * dt);
    CHECK(std::abs(one.ego.vy - two.ego.vy) < 10 * dt * dt);
  }
}

TEST_CASE("zero duration gives the initial record only") {
  auto sc = small_oval();
  sc.duration = 0.0;
  const auto log = run(sc);
  CHECK(log.rows.size() == 1);
  CHECK(log.events.empty());
  CHECK(log.plan_ms.empty());
}

TEST_CASE("closed-loop run bookkeeping") {
  auto sc = small_oval();
  sc.duration = 8.0;
  sc.opponents.push_back({3, 40.0, 0.5, 0.0, 4.9, 1.9});
  const auto log = run(sc);
  CHECK_FALSE(log.collided);
  bool overtook = false;
  for (std::size_t i = 1; i < log.rows.size(); ++i) {
    CHECK(log.rows[i].t > log.rows[i - 1].t);
    CHECK(log.rows[i].opponents[0].progress >= log.rows[i - 1].opponents[0].progress);
  }
  for (const auto& e : log.events) {
    REQUIRE(e.tick >= 1);
    REQUIRE(e.tick < static_cast<int>(log.rows.size()));
    if (e.type != "overtake") continue;
    overtook = overtook || e.detail == "ego_ahead";
    const auto& before = log.rows[static_cast<std::size_t>(e.tick - 1)];
    const auto& after = log.rows[static_cast<std::size_t>(e.tick)];
    const double r0 = before.progress - before.opponents[0].progress;
    const double r1 = after.progress - after.opponents[0].progress;
    CHECK((r0 < 0.0) != (r1 < 0.0));
  }
  CHECK(overtook);
  // Logged cost columns decompose the planned objective.
  for (const auto& r : log.rows) CHECK(std::isfinite(r.cost.sum()));
  CHECK(log_csv(log) == log_csv(run(sc)));
}

TEST_CASE("drafting cost switch zeroes the logged weight") {
  auto sc = small_oval();
  sc.duration = 0.5;
  RunOptions o;
  o.draft_cost = false;
  const auto log = run(sc, o);
  for (const auto& r : log.rows) {
    CHECK(r.k_dt == 0.0);
    CHECK(r.cost.drafting == 0.0);
  }
}

TEST_CASE("scenario files") {
  CHECK_THROWS_AS(scenario_from_text("ego_speed = 30\n", "s.scn", ""), ParseError);
  try {
    scenario_from_text("# header\nego_speed = 30\nego_sped = 31\n", "s.scn", "");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("s.scn:3") != std::string::npos);
  }
  CHECK_THROWS_AS(scenario_from_text("[opponent]\nspeed = 3\n", "s.scn", ""), ParseError);
  CHECK_THROWS_AS(scenario_from_text("ego_speed = fast\n", "s.scn", ""), ParseError);
}

TEST_CASE("scenario validation") {
  auto sc = small_oval();
  sc.dt_sim = 0.05;
  CHECK_THROWS(sc.validate());
  sc.dt_sim = 0.01;
  sc.opponents.push_back({1, 10.0, 0.5, 20.0, 4.9, 1.9});
  CHECK_THROWS(sc.validate());
}
