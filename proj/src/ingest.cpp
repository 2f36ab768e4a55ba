#include "threatgraph/ingest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "threatgraph/csv.hpp"
#include "threatgraph/errors.hpp"

namespace threatgraph {

void validate(const StreamConfig& config) {
  if (config.width <= 0 || config.height <= 0)
    throw Error(Errc::InvalidArgument, "frame dimensions must be positive");
  if (!(config.fps > 0.0) || !std::isfinite(config.fps))
    throw Error(Errc::InvalidArgument, "fps must be positive");
}

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::person: return "person";
    case Kind::face: return "face";
    case Kind::handshake: return "handshake";
  }
  return "?";
}

std::optional<Kind> parse_kind(std::string_view token) {
  if (token == "person") return Kind::person;
  if (token == "face") return Kind::face;
  if (token == "handshake") return Kind::handshake;
  return std::nullopt;
}

namespace {

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate(const DetectionRecord& rec, const StreamConfig& config, std::optional<std::size_t> line) {
  auto malformed = [&](const std::string& what) { throw Error(Errc::MalformedLine, what, line); };
  if (rec.frame < 0) malformed("frame index must be >= 0");
  if (!(rec.u >= 0.0 && rec.u < config.width) || !(rec.v >= 0.0 && rec.v < config.height))
    throw Error(Errc::OutOfBounds, "box center outside the frame", line);
  if (!(rec.r > 0.0) || !std::isfinite(rec.r)) malformed("aspect ratio must be > 0");
  if (!(rec.h > 0.0) || !std::isfinite(rec.h)) malformed("height must be > 0");
  if (!unit_interval(rec.conf_a)) malformed("conf_a must lie in [0,1]");
  if (rec.kind == Kind::face) {
    if (!rec.conf_b) malformed("face records need conf_b (c_nomask)");
    if (!unit_interval(*rec.conf_b)) malformed("conf_b must lie in [0,1]");
  } else if (rec.conf_b) {
    malformed("conf_b is only allowed on face records");
  }
}

DetectionRecord parse_detection_line(std::string_view line, const StreamConfig& config, std::size_t line_no) {
  const auto fields = csv::split(line);
  auto malformed = [&](const std::string& what) -> Error { return Error(Errc::MalformedLine, what, line_no); };
  if (fields.size() != 9) throw malformed("expected 9 fields, got " + std::to_string(fields.size()));

  DetectionRecord rec;
  const auto frame = csv::parse_int(fields[0]);
  if (!frame) throw malformed("bad frame index");
  rec.frame = *frame;

  const auto kind = parse_kind(fields[1]);
  if (!kind) throw Error(Errc::BadKind, "unknown kind '" + std::string(fields[1]) + "'", line_no);
  rec.kind = *kind;

  double* numeric[] = {&rec.u, &rec.v, &rec.r, &rec.h, &rec.conf_a};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto value = csv::parse_double(fields[2 + i]);
    if (!value) throw malformed("bad numeric field " + std::to_string(3 + i));
    *numeric[i] = *value;
  }
  if (!fields[7].empty()) {
    const auto value = csv::parse_double(fields[7]);
    if (!value) throw malformed("bad conf_b");
    rec.conf_b = *value;
  }
  if (!fields[8].empty()) {
    const auto value = csv::parse_int(fields[8]);
    if (!value) throw malformed("bad track_id");
    rec.track_id = *value;
  }
  validate(rec, config, line_no);
  return rec;
}

std::vector<FrameBundle> parse_detection_stream(std::istream& in, const StreamConfig& config,
                                                const std::string& source) {
  validate(config);
  std::map<FrameIndex, FrameBundle> bundles;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::is_skippable(line)) continue;
    if (first_content) {
      first_content = false;
      if (csv::trim(csv::split(line).front()) == "frame") continue;
    }
    DetectionRecord rec;
    try {
      rec = parse_detection_line(line, config, line_no);
    } catch (const Error& e) {
      if (source.empty()) throw;
      throw Error(e.code(), e.what(), line_no, source);
    }
    auto& bundle = bundles[rec.frame];
    bundle.frame = rec.frame;
    switch (rec.kind) {
      case Kind::person: bundle.persons.push_back(rec); break;
      case Kind::face: bundle.faces.push_back(rec); break;
      case Kind::handshake: bundle.handshakes.push_back(rec); break;
    }
  }
  std::vector<FrameBundle> out;
  out.reserve(bundles.size());
  for (auto& [frame, bundle] : bundles) out.push_back(std::move(bundle));
  return out;
}

std::vector<FrameBundle> parse_detection_stream(const std::filesystem::path& path, const StreamConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open detection file " + path.string());
  return parse_detection_stream(in, config, path.string());
}

std::string format_detection_line(const DetectionRecord& rec) {
  std::string out = std::to_string(rec.frame);
  out += ',';
  out += to_string(rec.kind);
  for (double x : {rec.u, rec.v, rec.r, rec.h, rec.conf_a}) {
    out += ',';
    out += csv::format_double(x);
  }
  out += ',';
  if (rec.conf_b) out += csv::format_double(*rec.conf_b);
  out += ',';
  if (rec.track_id) out += std::to_string(*rec.track_id);
  return out;
}

void serialize_detection_stream(const std::vector<FrameBundle>& bundles, std::ostream& out) {
  out << kDetectionHeader << '\n';
  for (const auto& bundle : bundles) {
    for (const auto* list : {&bundle.persons, &bundle.faces, &bundle.handshakes})
      for (const auto& rec : *list) out << format_detection_line(rec) << '\n';
  }
}

bool has_collinear_triple(const std::array<Point2, 4>& p, double tolerance) {
  static constexpr int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : triples) {
    const Point2 a = p[t[0]], b = p[t[1]], c = p[t[2]];
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double acx = c.x - a.x, acy = c.y - a.y;
    const double norms = std::hypot(abx, aby) * std::hypot(acx, acy);
    if (norms == 0.0) return true;
    if (std::abs(abx * acy - aby * acx) / norms < tolerance) return true;
  }
  return false;
}

CalibrationPoints parse_calibration(std::istream& in, const std::string& source) {
  CalibrationPoints out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::is_skippable(line)) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 4) throw Error(Errc::MalformedLine, "expected img_x,img_y,floor_x,floor_y", line_no, source);
    double v[4];
    for (int i = 0; i < 4; ++i) {
      const auto value = csv::parse_double(fields[i]);
      if (!value) throw Error(Errc::MalformedLine, "bad number", line_no, source);
      v[i] = *value;
    }
    if (count < 4) {
      out.image[count] = {v[0], v[1]};
      out.floor[count] = {v[2], v[3]};
    }
    ++count;
  }
  if (count != 4)
    throw Error(Errc::WrongPointCount, "expected exactly 4 correspondences, got " + std::to_string(count),
                std::nullopt, source);
  if (has_collinear_triple(out.image))
    throw Error(Errc::DegenerateQuad, "three image points are collinear", std::nullopt, source);
  return out;
}

CalibrationPoints parse_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open calibration file " + path.string());
  return parse_calibration(in, path.string());
}

}  // namespace threatgraph
