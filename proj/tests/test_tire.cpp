#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "racing/tire_model.hpp"

using namespace racing;

TEST_CASE("lateral force matches the reference evaluation") {
  const auto c = oracle::full_tire_set();
  CHECK(oracle::rel_err(lateral_force(0.05, 4000.0, c), oracle::fy(0.05, 4000.0, c)) < 1e-10);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> alpha(-0.4, 0.4), fz(0.0, 9000.0);
  for (int i = 0; i < 200; ++i) {
    const double a = alpha(rng), f = fz(rng);
    CHECK(oracle::rel_err(lateral_force(a, f, c), oracle::fy(a, f, c)) < 1e-10);
  }
}

TEST_CASE("zero slip without offsets gives zero force") {
  TireCoefficients c;
  CHECK(lateral_force(0.0, 4000.0, c) == 0.0);
}

TEST_CASE("reference load reduces coefficients to their first constants") {
  auto c = oracle::full_tire_set();
  auto flat = c;
  flat.PHy2 = flat.PVy2 = flat.PDy2 = flat.PEy2 = flat.PEy3 = 0.0;
  for (double a : {-0.2, -0.03, 0.01, 0.15})
    CHECK(lateral_force(a, c.Fz0, c) == doctest::Approx(lateral_force(a, c.Fz0, flat)).epsilon(1e-12));
}

TEST_CASE("odd symmetry without offsets or sign asymmetry") {
  TireCoefficients c;
  c.PEy3 = 0.1;
  for (double a : {0.01, 0.07, 0.3})
    for (double f : {1000.0, 4000.0, 7000.0}) CHECK(lateral_force(-a, f, c) == -lateral_force(a, f, c));
}

TEST_CASE("force is bounded by peak plus vertical shift") {
  const auto c = oracle::full_tire_set();
  for (double f : {500.0, 3500.0, 8000.0}) {
    const double dfz = (f - c.Fz0) / c.Fz0;
    const double bound = std::abs((c.PDy1 + c.PDy2 * dfz) * f) + std::abs(f * (c.PVy1 + c.PVy2 * dfz));
    for (double a = -0.5; a <= 0.5; a += 0.001) CHECK(std::abs(lateral_force(a, f, c)) <= bound + 1e-9);
  }
}

TEST_CASE("slope at the horizontal shift is the cornering stiffness") {
  auto c = oracle::full_tire_set();
  c.PEy4 = 0.0;
  const double f = 5000.0;
  const double dfz = (f - c.Fz0) / c.Fz0;
  const double shift = c.PHy1 + c.PHy2 * dfz;
  const double Dy = (c.PDy1 + c.PDy2 * dfz) * f;
  const double Ky = c.PKy1 * c.Fz0 * std::sin(2.0 * std::atan(f / (c.PKy2 * c.Fz0)));
  const double By = Ky / (c.PCy1 * Dy + c.eps_y);
  const double h = 1e-6;
  const double slope = (lateral_force(-shift + h, f, c) - lateral_force(-shift - h, f, c)) / (2 * h);
  CHECK(std::abs(slope - By * c.PCy1 * Dy) / std::abs(By * c.PCy1 * Dy) < 1e-4);
}

TEST_CASE("force is continuous down to zero load") {
  const auto c = oracle::full_tire_set();
  const double at_zero = lateral_force(0.1, 0.0, c);
  CHECK(std::isfinite(at_zero));
  CHECK(std::abs(lateral_force(0.1, 1e-7, c) - at_zero) < 1e-6);
}

namespace {

double grid_peak(double Fz, const TireCoefficients& c) {
  double best_a = 0.0, best_f = -1e300;
  for (int i = 0; i <= 50000; ++i) {
    const double a = i * 1e-5;
    const double f = oracle::fy(a, Fz, c);
    if (f > best_f) {
      best_f = f;
      best_a = a;
    }
  }
  return best_a;
}

}  // namespace

TEST_CASE("peak slip agrees with a dense grid scan") {
  const TireCoefficients c;
  for (double f : {2000.0, 4000.0, 8000.0}) CHECK(std::abs(peak_slip(f, c) - grid_peak(f, c)) < 2e-5);
}

TEST_CASE("peak slip sits at the bracket edge for a saturating curve") {
  TireCoefficients c;
  c.PEy1 = c.PEy2 = 0.0;
  c.PCy1 = 0.9;
  CHECK(peak_slip(4000.0, c) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("tire coefficients round-trip through the key-value format") {
  const auto c = oracle::full_tire_set();
  const auto back = tire_coefficients_from_text(to_key_value(c), "mem");
  CHECK(back.PEy4 == c.PEy4);
  CHECK(back.Fz0 == c.Fz0);
  CHECK_THROWS(tire_coefficients_from_text("Fz0 = -1\n", "mem"));
  CHECK_THROWS(tire_coefficients_from_text("bogus = 1\n", "mem"));
}
