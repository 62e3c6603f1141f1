#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace racing::cli;
  CLI::App app{"Raceline generation, closed-loop racing simulation and plotting"};
  app.require_subcommand(1);

  RacelineArgs rl;
  auto* raceline = app.add_subcommand("raceline", "Optimize a minimum-curvature raceline for a track");
  raceline->add_option("--track", rl.track, "Track CSV (x_m,y_m,w_left_m,w_right_m)")->required();
  raceline->add_option("--out", rl.out, "Output raceline CSV (x_m,y_m,vx_mps,vy_mps)")->required();
  raceline->add_option("--a-lat-max", rl.a_lat_max, "Lateral acceleration limit, m/s^2")->capture_default_str();
  raceline->add_option("--a-lon-max", rl.a_lon_max, "Longitudinal acceleration limit, m/s^2")->capture_default_str();
  raceline->add_option("--v-cap", rl.v_cap, "Speed cap, m/s")->capture_default_str();
  raceline->add_option("--margin", rl.margin, "Clearance kept from each boundary, m")->capture_default_str();
  raceline->add_option("--n-points", rl.n_points, "Output point count")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario in closed loop");
  simulate->add_option("--scenario", sim.scenario, "Scenario file")->required();
  simulate->add_option("--log", sim.log, "Per-tick CSV log output");
  simulate->add_option("--events", sim.events, "JSON-lines event output");
  simulate->add_option("--timing", sim.timing, "Per-plan wall-clock output (time_s ms)");
  simulate->add_flag("--no-draft-cost", sim.no_draft_cost, "Set the drafting cost weight k_dt to 0");
  simulate->add_flag("--contouring", sim.contouring, "Use the contouring/lag objective instead of the progress reward");
  simulate->add_flag("--no-draft-model", sim.no_draft_model, "Force alpha_cd = 1 in plant and controller");
  simulate->add_option("--contour-weight", sim.contour_weight, "Contouring error weight");
  simulate->add_option("--lag-weight", sim.lag_weight, "Lag (arc progress) weight");
  simulate->add_flag("--serial-gradient", sim.serial_gradient, "Use the serial gradient kernel");

  PlotArgs plot;
  auto* plotcmd = app.add_subcommand("plot", "Render a log as SVG, trajectory coloured by speed");
  plotcmd->add_option("--log", plot.log, "CSV log from simulate")->required();
  plotcmd->add_option("--out", plot.out, "Output SVG")->required();
  plotcmd->add_option("--track", plot.track, "Track CSV for the boundaries");
  plotcmd->add_option("--raceline", plot.raceline, "Raceline CSV, drawn dotted");

  CLI11_PARSE(app, argc, argv);
  if (*raceline) return cmd_raceline(rl, std::cout, std::cerr);
  if (*simulate) return cmd_simulate(sim, std::cout, std::cerr);
  return cmd_plot(plot, std::cout, std::cerr);
}
