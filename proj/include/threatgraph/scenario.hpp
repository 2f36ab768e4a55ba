#pragma once

// Synthetic scenes: scripted floor-plane motion projected back into image
// space through the calibration, producing detection and ground-truth files.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "threatgraph/eval.hpp"
#include "threatgraph/geometry.hpp"
#include "threatgraph/ingest.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

struct Waypoint {
  FrameIndex frame = 0;
  Point2 position;  // floor meters
};

enum class MaskState { masked, unmasked, hidden };

struct MaskInterval {
  FrameIndex start = 0;  // inclusive
  FrameIndex end = 0;    // inclusive
  MaskState state = MaskState::masked;
};

struct ScriptedPerson {
  PersonId id = 0;
  double height_px = 150.0;
  double aspect = 0.4;
  /// Present from the first to the last waypoint frame; positions are
  /// linearly interpolated in between.
  std::vector<Waypoint> waypoints;
  MaskState mask = MaskState::masked;
  std::vector<MaskInterval> mask_intervals;  // override `mask` where they apply
};

struct ScriptedHandshake {
  PersonId a = 0;
  PersonId b = 0;
  FrameIndex start = 0;  // inclusive
  FrameIndex end = 0;    // inclusive
  double confidence = 0.95;
};

struct SyntheticScenario {
  FrameIndex frames = 0;
  std::vector<ScriptedPerson> persons;
  std::vector<ScriptedHandshake> handshakes;
  std::vector<PairKey> groups;
  bool emit_track_ids = false;
};

/// Throws InvalidArgument when waypoints are unsorted or intervals fall
/// outside [0, frames).
void validate(const SyntheticScenario& scenario);

/// Floor position of a person at `frame`, or nullopt when absent.
std::optional<Point2> scripted_position(const ScriptedPerson& person, FrameIndex frame);
MaskState scripted_mask(const ScriptedPerson& person, FrameIndex frame);

struct HandshakeTruth {
  FrameIndex frame = 0;
  PairKey pair{0, 0};
};

struct SyntheticOutput {
  std::vector<FrameBundle> detections;
  std::vector<GroundTruthRecord> ground_truth;  // persons and faces, scripted ids
  std::vector<PairKey> groups;
  std::vector<HandshakeTruth> handshakes;
};

/// Throws OutsideCalibratedRegion when a scripted floor position lies outside
/// the calibration quadrilateral or its box leaves the frame.
SyntheticOutput generate_scenario(const SyntheticScenario& scenario, const FloorCalibration& calib,
                                  const StreamConfig& stream);

/// JSON scenario description; see docs/file_formats.md.
SyntheticScenario parse_scenario(std::istream& in);
SyntheticScenario parse_scenario(const std::filesystem::path& path);

/// Writes detections.csv, ground_truth.csv, groups.csv and handshakes.csv.
void write_synthetic_output(const SyntheticOutput& output, const std::filesystem::path& dir);

/// True when `p` lies inside (or on) the polygon with vertices in order.
bool inside_quad(const std::array<Point2, 4>& quad, Point2 p, double tolerance = 1e-9);

}  // namespace threatgraph
