// Writes the fixture tracks, racelines, parameter files and scenario files
// used by the examples in the README into a directory (default: data).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "racing/scenarios.hpp"

using namespace racing;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  std::printf("wrote %s\n", p.string().c_str());
}

std::string scenario_text(const Scenario& sc, const std::string& track, const std::string& line) {
  char buf[256];
  std::string s = "track = " + track + "\nraceline = " + line +
                  "\nvehicle = vehicle.cfg\ntires = tires.cfg\ncontroller = controller.cfg\n";
  std::snprintf(buf, sizeof buf, "ego_s = %g\nego_offset = %g\nego_speed = %g\nduration = %g\nlaps = %d\ndt_sim = %g\n",
                sc.ego_s, sc.ego_offset, sc.ego_speed, sc.duration, sc.laps, sc.dt_sim);
  s += buf;
  for (const auto& o : sc.opponents) {
    std::snprintf(buf, sizeof buf, "\n[opponent]\nid = %d\ns = %g\nspeed_fraction = %g\noffset = %g\nlength = %g\nwidth = %g\n",
                  o.id, o.s, o.speed_fraction, o.offset, o.length, o.width);
    s += buf;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const fs::path dir = argc > 1 ? argv[1] : "data";
    fs::create_directories(dir);
    const auto solo = solo_lap_scenario();
    const auto merge = merge_scenario();
    write_track_csv((dir / "oval_track.csv").string(), solo.track);
    write_raceline_csv((dir / "oval_raceline.csv").string(), solo.raceline);
    write_track_csv((dir / "corner_track.csv").string(), merge.track);
    write_raceline_csv((dir / "corner_raceline.csv").string(), merge.raceline);
    write(dir / "vehicle.cfg", to_key_value(solo.vehicle));
    write(dir / "tires.cfg", to_key_value(solo.tires));
    write(dir / "controller.cfg", to_key_value(solo.controller));
    write(dir / "solo_lap.scn", scenario_text(solo, "oval_track.csv", "oval_raceline.csv"));
    write(dir / "merge.scn", scenario_text(merge, "corner_track.csv", "corner_raceline.csv"));
    write(dir / "draft.scn", scenario_text(draft_scenario(), "oval_track.csv", "oval_raceline.csv"));
    write(dir / "overtake.scn", scenario_text(overtake_scenario(), "oval_track.csv", "oval_raceline.csv"));
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "make_fixtures: %s\n", e.what());
    return 1;
  }
}
