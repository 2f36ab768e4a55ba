#include "threatgraph/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "threatgraph/errors.hpp"

namespace threatgraph {

namespace {

// Geometry-only ordering so that results do not depend on input order.
auto box_key(const Box& b) { return std::tie(b.u, b.v, b.r, b.h, b.conf); }

IdMode detect_mode(const FrameBundle& bundle) {
  std::size_t with_ids = 0;
  for (const auto& p : bundle.persons) with_ids += p.track_id.has_value();
  if (with_ids == 0) return bundle.persons.empty() ? IdMode::undecided : IdMode::associate;
  if (with_ids != bundle.persons.size())
    throw Error(Errc::MixedIdMode, "frame " + std::to_string(bundle.frame) + " mixes records with and without track ids");
  return IdMode::passthrough;
}

void retire_stale(TrackerState& state, FrameIndex frame, int max_gap, std::vector<Track>& retired) {
  for (auto it = state.live_tracks.begin(); it != state.live_tracks.end();) {
    if (frame - it->second.last_frame() - 1 > max_gap) {
      retired.push_back(std::move(it->second));
      it = state.live_tracks.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace

AssociationResult associate(TrackerState state, const FrameBundle& bundle, const TrackerParams& params) {
  if (bundle.frame <= state.last_frame_processed)
    throw Error(Errc::NonMonotonicFrame, "frame " + std::to_string(bundle.frame) + " after " +
                                             std::to_string(state.last_frame_processed));
  const IdMode frame_mode = detect_mode(bundle);
  if (frame_mode != IdMode::undecided) {
    if (state.mode != IdMode::undecided && state.mode != frame_mode)
      throw Error(Errc::MixedIdMode, "stream switches between tracked and untracked person records");
    state.mode = frame_mode;
  }

  AssociationResult result;
  retire_stale(state, bundle.frame, params.max_gap, result.retired);
  state.last_frame_processed = bundle.frame;
  const auto& persons = bundle.persons;
  result.assignments.resize(persons.size());

  auto open_track = [&](PersonId id, const Box& box) {
    Track t;
    t.id = id;
    t.kind = Kind::person;
    t.boxes.emplace(bundle.frame, box);
    state.live_tracks.emplace(id, std::move(t));
  };

  if (frame_mode == IdMode::passthrough) {
    std::set<PersonId> seen;
    for (std::size_t i = 0; i < persons.size(); ++i) {
      const PersonId id = *persons[i].track_id;
      if (!seen.insert(id).second)
        throw Error(Errc::InvalidArgument, "track id " + std::to_string(id) + " appears twice in frame " +
                                               std::to_string(bundle.frame));
      if (auto it = state.live_tracks.find(id); it != state.live_tracks.end())
        it->second.boxes.emplace(bundle.frame, persons[i].box());
      else
        open_track(id, persons[i].box());
      state.next_id = std::max(state.next_id, id + 1);
      result.assignments[i] = {i, id};
    }
    result.state = std::move(state);
    return result;
  }

  struct Candidate {
    double overlap;
    PersonId track;
    std::size_t det;
  };
  std::vector<Candidate> candidates;
  for (const auto& [id, track] : state.live_tracks) {
    const Box& last = track.boxes.rbegin()->second;
    for (std::size_t i = 0; i < persons.size(); ++i) {
      const double o = iou(last, persons[i].box());
      if (o > 0.0 && o >= params.iou_gate) candidates.push_back({o, id, i});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.track != b.track) return a.track < b.track;
    return box_key(persons[a.det].box()) < box_key(persons[b.det].box());
  });

  std::vector<bool> det_used(persons.size(), false);
  std::set<PersonId> track_used;
  for (const auto& c : candidates) {
    if (det_used[c.det] || track_used.count(c.track)) continue;
    det_used[c.det] = true;
    track_used.insert(c.track);
    state.live_tracks.at(c.track).boxes.emplace(bundle.frame, persons[c.det].box());
    result.assignments[c.det] = {c.det, c.track};
  }

  std::vector<std::size_t> unmatched;
  for (std::size_t i = 0; i < persons.size(); ++i)
    if (!det_used[i]) unmatched.push_back(i);
  std::stable_sort(unmatched.begin(), unmatched.end(), [&](std::size_t a, std::size_t b) {
    return box_key(persons[a].box()) < box_key(persons[b].box());
  });
  for (std::size_t i : unmatched) {
    const PersonId id = state.next_id++;
    open_track(id, persons[i].box());
    result.assignments[i] = {i, id};
  }
  result.state = std::move(state);
  return result;
}

std::vector<Track> drain(TrackerState& state) {
  std::vector<Track> out;
  out.reserve(state.live_tracks.size());
  for (auto& [id, track] : state.live_tracks) out.push_back(std::move(track));
  state.live_tracks.clear();
  return out;
}

Track interpolate_gaps(const Track& track, int max_gap) {
  Track out = track;
  if (track.boxes.size() < 2) return out;
  for (auto it = track.boxes.begin(), next = std::next(it); next != track.boxes.end(); ++it, ++next) {
    const FrameIndex t0 = it->first, t1 = next->first;
    const FrameIndex missing = t1 - t0 - 1;
    if (missing < 1 || missing > max_gap) continue;
    const Box& a = it->second;
    const Box& b = next->second;
    const double span = static_cast<double>(t1 - t0);
    for (FrameIndex t = t0 + 1; t < t1; ++t) {
      const double w = static_cast<double>(t - t0) / span;
      auto lerp = [w](double x, double y) { return x + w * (y - x); };
      out.boxes.emplace(t, Box{lerp(a.u, b.u), lerp(a.v, b.v), lerp(a.r, b.r), lerp(a.h, b.h), std::min(a.conf, b.conf)});
    }
  }
  return out;
}

FaceAssociation associate_faces(const PersonBoxes& persons, const std::vector<DetectionRecord>& faces) {
  struct Claim {
    double containment;
    double offset;
    std::size_t face;
  };
  FaceAssociation out;
  std::map<PersonId, Claim> best;
  auto better = [&](const Claim& a, const Claim& b) {
    if (a.containment != b.containment) return a.containment > b.containment;
    if (a.offset != b.offset) return a.offset < b.offset;
    return box_key(faces[a.face].box()) < box_key(faces[b.face].box());
  };

  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Box face = faces[f].box();
    std::optional<std::pair<PersonId, Claim>> choice;
    for (const auto& [id, person] : persons) {
      const double containment = intersection_area(face, person) / face.area();
      if (containment < kMinFaceContainment) continue;
      const bool upper_half = face.u >= person.left() && face.u <= person.right() && face.v >= person.top() &&
                              face.v <= person.v;
      if (!upper_half) continue;
      Claim claim{containment, std::abs(face.u - person.u), f};
      // Iteration is in ascending id order, so strict improvement keeps the lower id on ties.
      if (!choice || better(claim, choice->second)) choice = std::make_pair(id, claim);
    }
    if (!choice) {
      ++out.dropped;
      continue;
    }
    auto [it, inserted] = best.emplace(choice->first, choice->second);
    if (!inserted) {
      ++out.dropped;
      if (better(choice->second, it->second)) it->second = choice->second;
    }
  }
  for (const auto& [id, claim] : best) {
    const auto& rec = faces[claim.face];
    out.masks.emplace(id, MaskConfidence{rec.conf_a, rec.conf_b.value_or(0.0)});
  }
  return out;
}

HandshakeAssociation associate_handshakes(const PersonBoxes& persons, const std::vector<DetectionRecord>& handshakes,
                                          FrameIndex frame, const std::map<PersonId, FloorPoint>& floor_locations,
                                          const FloorCalibration& calib) {
  HandshakeAssociation out;
  for (const auto& hs : handshakes) {
    if (persons.size() < 2) {
      ++out.fewer_than_two_persons;
      continue;
    }
    const Box box = hs.box();
    std::vector<std::pair<double, PersonId>> ranked;
    for (const auto& [id, person] : persons) {
      const double area = intersection_area(box, person);
      if (area > 0.0) ranked.emplace_back(area, id);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    if (ranked.size() < 2) {
      Point2 anchor;
      try {
        anchor = calib.to_floor(standing_location(box));
      } catch (const Error&) {
        ++out.unprojectable;
        continue;
      }
      ranked.clear();
      for (const auto& [id, person] : persons) {
        const auto loc = floor_locations.find(id);
        if (loc == floor_locations.end()) continue;
        ranked.emplace_back(std::hypot(loc->second.x - anchor.x, loc->second.y - anchor.y), id);
      }
      std::sort(ranked.begin(), ranked.end());
      if (ranked.size() < 2) {
        ++out.fewer_than_two_persons;
        continue;
      }
    }
    const PersonId a = std::min(ranked[0].second, ranked[1].second);
    const PersonId b = std::max(ranked[0].second, ranked[1].second);
    out.events.push_back({frame, a, b, hs.conf_a});
  }
  return out;
}

}  // namespace threatgraph
