#pragma once

// Shared scene fixtures for tests.

#include <array>

#include "threatgraph/config.hpp"
#include "threatgraph/geometry.hpp"
#include "threatgraph/scenario.hpp"

namespace fixture {

using namespace threatgraph;

/// 1280x720 camera looking at a 10 m x 10 m floor patch.
inline std::array<Point2, 4> camera_image() { return {{{340, 300}, {940, 300}, {1240, 700}, {40, 700}}}; }
inline std::array<Point2, 4> camera_floor() { return {{{0, 10}, {10, 10}, {10, 0}, {0, 0}}}; }

inline FloorCalibration camera() { return fit_transform(camera_image(), camera_floor()); }

inline StreamConfig stream(double fps = 25.0) {
  StreamConfig s;
  s.width = 1280;
  s.height = 720;
  s.fps = fps;
  s.stream_id = "synthetic";
  return s;
}

inline RunConfig run_config(double fps = 25.0) {
  RunConfig c;
  c.stream = stream(fps);
  return c;
}

inline ScriptedPerson person(PersonId id, std::vector<Waypoint> waypoints, MaskState mask = MaskState::masked) {
  ScriptedPerson p;
  p.id = id;
  p.waypoints = std::move(waypoints);
  p.mask = mask;
  return p;
}

}  // namespace fixture
