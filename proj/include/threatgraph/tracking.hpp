#pragma once

// Person identity association, gap interpolation, and binding of face and
// handshake boxes to person tracks.

#include <map>
#include <optional>
#include <vector>

#include "threatgraph/box.hpp"
#include "threatgraph/geometry.hpp"
#include "threatgraph/ingest.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

struct Track {
  PersonId id = 0;
  Kind kind = Kind::person;
  std::map<FrameIndex, Box> boxes;

  FrameIndex first_frame() const { return boxes.begin()->first; }
  FrameIndex last_frame() const { return boxes.rbegin()->first; }

  friend bool operator==(const Track&, const Track&) = default;
};

enum class IdMode { undecided, associate, passthrough };

struct TrackerState {
  std::map<PersonId, Track> live_tracks;
  PersonId next_id = 0;
  FrameIndex last_frame_processed = -1;
  IdMode mode = IdMode::undecided;
};

struct TrackerParams {
  double iou_gate = 0.3;
  /// Longest run of missing frames that still continues (and is later
  /// interpolated across) a track.
  int max_gap = 25;
};

/// Track id given to bundle.persons[detection_index].
struct Assignment {
  std::size_t detection_index = 0;
  PersonId track_id = 0;
};

struct AssociationResult {
  TrackerState state;
  std::vector<Assignment> assignments;  // one per person detection, in input order
  std::vector<Track> retired;           // tracks closed by this call
};

/// Feeds one frame to the tracker. Without track ids, detections are matched
/// greedily to live tracks by descending IoU (ties to the lower track id);
/// with ids on every person record the ids are taken as given.
/// Throws NonMonotonicFrame and MixedIdMode.
AssociationResult associate(TrackerState state, const FrameBundle& bundle, const TrackerParams& params);

/// Closes every live track (end of stream).
std::vector<Track> drain(TrackerState& state);

/// Fills internal gaps of at most max_gap missing frames by linear
/// interpolation of (u, v, r, h); the filled confidence is the smaller of the
/// two endpoint confidences.
Track interpolate_gaps(const Track& track, int max_gap);

/// Person boxes visible in one frame, keyed by track id.
using PersonBoxes = std::map<PersonId, Box>;

struct MaskConfidence {
  double c_mask = 0.0;
  double c_nomask = 0.0;

  friend bool operator==(const MaskConfidence&, const MaskConfidence&) = default;
};

struct FaceAssociation {
  /// Only persons that received a face appear; absent means "unknown".
  std::map<PersonId, MaskConfidence> masks;
  std::size_t dropped = 0;
};

/// Fraction of the face box area inside the person box that a face needs.
inline constexpr double kMinFaceContainment = 0.5;

FaceAssociation associate_faces(const PersonBoxes& persons, const std::vector<DetectionRecord>& faces);

struct PairEvent {
  FrameIndex frame = 0;
  PersonId person_a = 0;
  PersonId person_b = 0;
  double confidence = 0.0;

  friend bool operator==(const PairEvent&, const PairEvent&) = default;
};

struct HandshakeAssociation {
  std::vector<PairEvent> events;
  std::size_t fewer_than_two_persons = 0;
  std::size_t unprojectable = 0;
};

/// Binds each handshake box to the two persons it overlaps most; falls back
/// to the two persons standing nearest (on the floor) to the projection of
/// the handshake box's bottom-center.
HandshakeAssociation associate_handshakes(const PersonBoxes& persons, const std::vector<DetectionRecord>& handshakes,
                                          FrameIndex frame, const std::map<PersonId, FloorPoint>& floor_locations,
                                          const FloorCalibration& calib);

}  // namespace threatgraph
