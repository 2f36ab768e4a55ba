#include "threatgraph/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>

#include <json.hpp>

#include "threatgraph/errors.hpp"

namespace threatgraph {

namespace {

std::string_view class_label(MaskState state) { return state == MaskState::masked ? "masked" : "unmasked"; }

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

bool inside_quad(const std::array<Point2, 4>& quad, Point2 p, double tolerance) {
  bool inside = false;
  for (std::size_t i = 0, j = 3; i < 4; j = i++) {
    const Point2 a = quad[i], b = quad[j];
    if (segment_distance(p, a, b) <= tolerance) return true;
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

void validate(const SyntheticScenario& s) {
  auto bad = [](const std::string& what) { return Error(Errc::InvalidArgument, what); };
  if (s.frames < 0) throw bad("scenario frame count must be >= 0");
  std::map<PersonId, const ScriptedPerson*> by_id;
  for (const auto& p : s.persons) {
    if (!by_id.emplace(p.id, &p).second) throw bad("duplicate person id " + std::to_string(p.id));
    if (p.waypoints.empty()) throw bad("person " + std::to_string(p.id) + " has no waypoints");
    if (!(p.height_px > 0.0) || !(p.aspect > 0.0)) throw bad("person box size must be positive");
    for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
      const auto f = p.waypoints[i].frame;
      if (f < 0 || f >= s.frames) throw bad("waypoint frame outside the scenario");
      if (i && f <= p.waypoints[i - 1].frame) throw bad("waypoints must have increasing frames");
    }
    for (const auto& m : p.mask_intervals)
      if (m.start < 0 || m.end >= s.frames || m.start > m.end) throw bad("mask interval outside the scenario");
  }
  for (const auto& h : s.handshakes) {
    if (h.a == h.b || !by_id.count(h.a) || !by_id.count(h.b)) throw bad("handshake must name two scripted persons");
    if (h.start < 0 || h.end >= s.frames || h.start > h.end) throw bad("handshake interval outside the scenario");
    if (!(h.confidence >= 0.0 && h.confidence <= 1.0)) throw bad("handshake confidence must lie in [0,1]");
  }
  for (const auto& g : s.groups)
    if (g.first() == g.second() || !by_id.count(g.first()) || !by_id.count(g.second()))
      throw bad("group must name two scripted persons");
}

std::optional<Point2> scripted_position(const ScriptedPerson& person, FrameIndex frame) {
  const auto& w = person.waypoints;
  if (w.empty() || frame < w.front().frame || frame > w.back().frame) return std::nullopt;
  auto next = std::lower_bound(w.begin(), w.end(), frame, [](const Waypoint& a, FrameIndex f) { return a.frame < f; });
  if (next->frame == frame) return next->position;
  const auto prev = std::prev(next);
  const double t = static_cast<double>(frame - prev->frame) / static_cast<double>(next->frame - prev->frame);
  return Point2{prev->position.x + t * (next->position.x - prev->position.x),
                prev->position.y + t * (next->position.y - prev->position.y)};
}

MaskState scripted_mask(const ScriptedPerson& person, FrameIndex frame) {
  MaskState state = person.mask;
  for (const auto& m : person.mask_intervals)
    if (frame >= m.start && frame <= m.end) state = m.state;
  return state;
}

SyntheticOutput generate_scenario(const SyntheticScenario& scenario, const FloorCalibration& calib,
                                  const StreamConfig& stream) {
  validate(scenario);
  validate(stream);
  SyntheticOutput out;
  out.groups = scenario.groups;
  std::vector<const ScriptedPerson*> persons;
  for (const auto& p : scenario.persons) persons.push_back(&p);
  std::sort(persons.begin(), persons.end(), [](auto* a, auto* b) { return a->id < b->id; });

  auto in_frame = [&](const Box& b) { return b.u >= 0.0 && b.u < stream.width && b.v >= 0.0 && b.v < stream.height; };

  for (FrameIndex t = 0; t < scenario.frames; ++t) {
    FrameBundle bundle;
    bundle.frame = t;
    std::map<PersonId, Box> boxes;
    for (const auto* p : persons) {
      const auto pos = scripted_position(*p, t);
      if (!pos) continue;
      if (!inside_quad(calib.floor_points(), *pos))
        throw Error(Errc::OutsideCalibratedRegion, "person " + std::to_string(p->id) + " leaves the calibrated floor at frame " + std::to_string(t));
      const Point2 foot = calib.to_image(*pos);
      const Box box{foot.x, foot.y - 0.5 * p->height_px, p->aspect, p->height_px, 0.9};
      if (!in_frame(box))
        throw Error(Errc::OutsideCalibratedRegion, "person " + std::to_string(p->id) + " box leaves the image at frame " + std::to_string(t));
      boxes.emplace(p->id, box);

      DetectionRecord person{t, Kind::person, box.u, box.v, box.r, box.h, box.conf, std::nullopt, std::nullopt};
      if (scenario.emit_track_ids) person.track_id = p->id;
      bundle.persons.push_back(person);
      DetectionRecord truth = person;
      truth.track_id = p->id;
      out.ground_truth.push_back({truth, "person"});

      const MaskState mask = scripted_mask(*p, t);
      if (mask == MaskState::hidden) continue;
      const bool masked = mask == MaskState::masked;
      DetectionRecord face{t, Kind::face, box.u, box.v - 0.3 * box.h, 0.8, 0.18 * box.h,
                           masked ? 0.9 : 0.1, masked ? 0.1 : 0.9, std::nullopt};
      bundle.faces.push_back(face);
      DetectionRecord face_truth = face;
      face_truth.track_id = p->id;
      out.ground_truth.push_back({face_truth, std::string(class_label(mask))});
    }
    for (const auto& h : scenario.handshakes) {
      if (t < h.start || t > h.end) continue;
      const auto a = boxes.find(h.a), b = boxes.find(h.b);
      if (a == boxes.end() || b == boxes.end()) continue;
      const Box& ba = a->second;
      const Box& bb = b->second;
      const double height = 0.1 * (ba.h + bb.h);
      const double width = std::max(std::abs(ba.u - bb.u), 0.25 * (ba.width() + bb.width()));
      bundle.handshakes.push_back(
          {t, Kind::handshake, 0.5 * (ba.u + bb.u), 0.5 * (ba.v + bb.v), width / height, height, h.confidence, std::nullopt, std::nullopt});
      out.handshakes.push_back({t, PairKey(h.a, h.b)});
    }
    if (!bundle.empty()) out.detections.push_back(std::move(bundle));
  }
  return out;
}

namespace {

MaskState parse_mask_state(const nlohmann::json& j) {
  const auto s = j.get<std::string>();
  if (s == "masked") return MaskState::masked;
  if (s == "unmasked") return MaskState::unmasked;
  if (s == "hidden") return MaskState::hidden;
  throw Error(Errc::InvalidArgument, "unknown mask state '" + s + "'");
}

}  // namespace

SyntheticScenario parse_scenario(std::istream& in) {
  SyntheticScenario s;
  try {
    const auto j = nlohmann::json::parse(in);
    s.frames = j.at("frames").get<FrameIndex>();
    s.emit_track_ids = j.value("emit_track_ids", false);
    for (const auto& jp : j.at("persons")) {
      ScriptedPerson p;
      p.id = jp.at("id").get<PersonId>();
      p.height_px = jp.value("height_px", p.height_px);
      p.aspect = jp.value("aspect", p.aspect);
      for (const auto& w : jp.at("waypoints"))
        p.waypoints.push_back({w.at(0).get<FrameIndex>(), {w.at(1).get<double>(), w.at(2).get<double>()}});
      if (jp.contains("mask")) p.mask = parse_mask_state(jp.at("mask"));
      if (jp.contains("mask_intervals"))
        for (const auto& m : jp.at("mask_intervals"))
          p.mask_intervals.push_back({m.at(0).get<FrameIndex>(), m.at(1).get<FrameIndex>(), parse_mask_state(m.at(2))});
      s.persons.push_back(std::move(p));
    }
    if (j.contains("handshakes"))
      for (const auto& jh : j.at("handshakes"))
        s.handshakes.push_back({jh.at("a").get<PersonId>(), jh.at("b").get<PersonId>(), jh.at("start").get<FrameIndex>(),
                                jh.at("end").get<FrameIndex>(), jh.value("confidence", 0.95)});
    if (j.contains("groups"))
      for (const auto& g : j.at("groups")) s.groups.emplace_back(g.at(0).get<PersonId>(), g.at(1).get<PersonId>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedLine, std::string("scenario: ") + e.what());
  }
  validate(s);
  return s;
}

SyntheticScenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open scenario file " + path.string());
  return parse_scenario(in);
}

void write_synthetic_output(const SyntheticOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error(Errc::IoFailure, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("detections.csv");
    serialize_detection_stream(output.detections, f);
  }
  {
    auto f = open("ground_truth.csv");
    f << kDetectionHeader << ",class\n";
    for (const auto& g : output.ground_truth) f << format_detection_line(g.record) << ',' << g.label << '\n';
  }
  {
    auto f = open("groups.csv");
    f << "person_a,person_b\n";
    for (const auto& g : output.groups) f << g.first() << ',' << g.second() << '\n';
  }
  {
    auto f = open("handshakes.csv");
    f << "frame,person_a,person_b\n";
    for (const auto& h : output.handshakes) f << h.frame << ',' << h.pair.first() << ',' << h.pair.second() << '\n';
  }
}

}  // namespace threatgraph
