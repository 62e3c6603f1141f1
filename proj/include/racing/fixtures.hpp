#pragma once

// Synthetic tracks used by the tests, the sample data and the CLI.

#include "racing/track_geometry.hpp"

namespace racing {

// Stadium oval driven counter-clockwise: two straights of `straight` metres
// joined by half circles of centerline radius `radius`. The first point sits
// at the start of the lower straight, heading +x.
Track oval_track(double straight, double radius, double half_width, double spacing = 5.0);

// Open track: a straight along +x, then a left-hand arc of `angle` radians,
// then an exit straight.
Track straight_then_corner_track(double straight, double radius, double angle, double exit, double half_width,
                                 double spacing = 5.0);

// Closed circle of centerline radius `radius` centred on the origin.
Track circle_track(double radius, double half_width, double spacing = 5.0);

// Open straight along +x starting at the origin.
Track straight_track(double length, double half_width, double spacing = 5.0);

}  // namespace racing
