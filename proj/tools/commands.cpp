#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "racing/key_value.hpp"
#include "racing/raceline_opt.hpp"
#include "racing/sim_harness.hpp"

namespace racing::cli {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace

int cmd_raceline(const RacelineArgs& a, std::ostream& out, std::ostream& err) {
  try {
    RacelineProblem p{read_track_csv(a.track)};
    p.n_points = a.n_points;
    p.limits = {a.a_lat_max, a.a_lon_max, a.v_cap};
    p.margin = a.margin;
    const auto res = optimize_raceline(p);
    write_raceline_csv(a.out, res.line);
    const double centre = lap_time(centerline_raceline(p.track, a.n_points, p.limits));
    out << "lap time estimate: " << res.lap_time << " s (centerline " << centre << " s)\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = load_scenario(a.scenario);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  RunOptions opts;
  opts.draft_cost = !a.no_draft_cost;
  opts.contouring = a.contouring;
  opts.draft_model = !a.no_draft_model;
  opts.contour_weight = a.contour_weight;
  opts.lag_weight = a.lag_weight;
  opts.parallel_gradient = !a.serial_gradient;
  std::ofstream timing;
  if (!a.timing.empty()) {
    timing.open(a.timing);
    opts.timing = &timing;
  }
  SimLog log;
  try {
    log = run(sc, opts);
    if (!a.log.empty()) write_text(a.log, log_csv(log));
    if (!a.events.empty()) write_text(a.events, events_jsonl(log));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  out << "ticks: " << (log.rows.empty() ? 0 : log.rows.back().tick) << ", laps: " << log.laps_completed
      << ", events: " << log.events.size() << '\n';
  if (log.collided) {
    err << "run terminated by collision\n";
    return 2;
  }
  return 0;
}

int cmd_plot(const PlotArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const auto svg = render_plot(read_text_file(a.log), a.track.empty() ? "" : read_text_file(a.track),
                                 a.raceline.empty() ? "" : read_text_file(a.raceline));
    write_text(a.out, svg);
    out << "wrote " << a.out << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace racing::cli
