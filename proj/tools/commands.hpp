#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace racing::cli {

struct RacelineArgs {
  std::string track;
  std::string out;
  double a_lat_max = 8.0;
  double a_lon_max = 5.0;
  double v_cap = 45.0;
  double margin = 1.0;
  int n_points = 1000;
};

struct SimulateArgs {
  std::string scenario;
  std::string log;
  std::string events;
  std::string timing;
  bool no_draft_cost = false;
  bool contouring = false;
  bool no_draft_model = false;
  std::optional<double> contour_weight;
  std::optional<double> lag_weight;
  bool serial_gradient = false;
};

struct PlotArgs {
  std::string log;
  std::string out;
  std::string track;
  std::string raceline;
};

// Exit codes: 0 success, 1 usage/config error, 2 run ended by a collision.
int cmd_raceline(const RacelineArgs& a, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotArgs& a, std::ostream& out, std::ostream& err);

// SVG text for a log CSV; throws std::runtime_error on missing columns.
std::string render_plot(const std::string& log_csv, const std::string& track_csv, const std::string& raceline_csv);

}  // namespace racing::cli
