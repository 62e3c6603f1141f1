#include <doctest.h>

#include <numbers>

#include "racing/drafting.hpp"

using namespace racing;

TEST_CASE("drag scale examples") {
  const DraftingParams p;
  CHECK(drag_scale(5.0, 1.0, 0.0, p) == 1.0);
  CHECK(drag_scale(0.0, 0.0, p.vmax, p) == doctest::Approx(0.805));
  CHECK(drag_scale(100.0, 0.0, p.vmax, p) == doctest::Approx(1.0));
  CHECK(drag_scale(10.0, -2.0, p.vmax, p) == drag_scale(10.0, 2.0, p.vmax, p));
}

TEST_CASE("drag scale stays in range and is monotone") {
  const DraftingParams p;
  double prev = 0.0;
  for (double dx = 0.0; dx <= 30.0; dx += 1.0) {
    const double a = drag_scale(dx, 0.5, 40.0, p);
    CHECK(a >= 1.0 - (40.0 / p.vmax) * (1.0 - p.kc) - 1e-12);
    CHECK(a <= 1.0);
    CHECK(a >= prev);
    prev = a;
  }
  CHECK(drag_scale(10.0, 0.0, 40.0, p) <= drag_scale(10.0, 0.0, 20.0, p));
}

TEST_CASE("area of application") {
  const DraftingParams p;
  const Pose2 lead{100.0, 50.0, std::numbers::pi / 2};  // heading +y
  CHECK(in_draft_zone(lead, lead, p));
  CHECK_FALSE(in_draft_zone({100.0, 55.0, 0.0}, lead, p));
  CHECK(in_draft_zone({100.0, 50.0 - p.zone_length, 0.0}, lead, p));
  CHECK_FALSE(in_draft_zone({100.0, 50.0 - p.zone_length - 0.1, 0.0}, lead, p));
  CHECK(in_draft_zone({100.0 + 2.9, 40.0, 0.0}, lead, p));
  CHECK_FALSE(in_draft_zone({100.0 + 3.1, 40.0, 0.0}, lead, p));
}

TEST_CASE("combined scale takes the strongest zone and is 1 outside") {
  const DraftingParams p;
  const Pose2 leads[2] = {{0.0, 0.0, 0.0}, {-5.0, 1.0, 0.0}};
  const double v = 40.0;
  CHECK(combined_drag_scale(50.0, 0.0, v, std::span<const Pose2>(leads), p) == 1.0);
  CHECK(combined_drag_scale(-10.0, 0.0, v, std::span<const Pose2>{}, p) == 1.0);
  const double both = combined_drag_scale(-10.0, 0.0, v, std::span<const Pose2>(leads), p);
  const double near = drag_scale(5.0, -1.0, v, p);
  const double far = drag_scale(10.0, 0.0, v, p);
  CHECK(both == std::min(near, far));
}

TEST_CASE("trailing offset convention") {
  const Pose2 lead{10.0, 0.0, 0.0};
  const auto off = trailing_offset(lead, 4.0, 1.5);
  CHECK(off.behind == doctest::Approx(6.0));
  CHECK(off.lateral == doctest::Approx(1.5));
}
