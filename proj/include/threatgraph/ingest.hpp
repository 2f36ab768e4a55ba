#pragma once

// Detection stream and calibration file ingestion.
//
// Detection CSV columns: frame,kind,u,v,r,h,conf_a,conf_b,track_id
// A header line is optional; conf_b is present exactly for faces
// (c_mask, c_nomask) and track_id is optional for every kind.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threatgraph/box.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

struct StreamConfig {
  int width = 0;
  int height = 0;
  double fps = 0.0;
  std::string stream_id = "stream";
};

/// Throws Error(InvalidArgument) unless W, H and fps are positive.
void validate(const StreamConfig& config);

enum class Kind { person, face, handshake };

std::string_view to_string(Kind kind);
std::optional<Kind> parse_kind(std::string_view token);

struct DetectionRecord {
  FrameIndex frame = 0;
  Kind kind = Kind::person;
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
  double h = 0.0;
  double conf_a = 0.0;
  std::optional<double> conf_b;
  std::optional<PersonId> track_id;

  Box box() const noexcept { return Box{u, v, r, h, conf_a}; }

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

struct FrameBundle {
  FrameIndex frame = 0;
  std::vector<DetectionRecord> persons;
  std::vector<DetectionRecord> faces;
  std::vector<DetectionRecord> handshakes;

  bool empty() const noexcept { return persons.empty() && faces.empty() && handshakes.empty(); }

  friend bool operator==(const FrameBundle&, const FrameBundle&) = default;
};

/// Checks every DetectionRecord invariant. Throws Error(OutOfBounds) for
/// coordinates outside the frame and Error(MalformedLine) for the rest.
void validate(const DetectionRecord& record, const StreamConfig& config,
              std::optional<std::size_t> line = std::nullopt);

/// Parses one CSV line (not a header). Throws MalformedLine, BadKind or OutOfBounds.
DetectionRecord parse_detection_line(std::string_view line, const StreamConfig& config,
                                     std::size_t line_no);

std::vector<FrameBundle> parse_detection_stream(std::istream& in, const StreamConfig& config,
                                                const std::string& source = {});
std::vector<FrameBundle> parse_detection_stream(const std::filesystem::path& path,
                                                const StreamConfig& config);

/// Writes the header followed by one line per record, bundles in order.
void serialize_detection_stream(const std::vector<FrameBundle>& bundles, std::ostream& out);
std::string format_detection_line(const DetectionRecord& record);

inline constexpr std::string_view kDetectionHeader = "frame,kind,u,v,r,h,conf_a,conf_b,track_id";

struct CalibrationPoints {
  std::array<Point2, 4> image;
  std::array<Point2, 4> floor;  // meters
};

/// Tolerance on |cross(b - a, c - a)| / (|b - a| |c - a|) below which three
/// points count as collinear.
inline constexpr double kCollinearTolerance = 1e-9;

/// True if any three of the four points are collinear within `tolerance`.
bool has_collinear_triple(const std::array<Point2, 4>& points, double tolerance = kCollinearTolerance);

/// Four lines of `img_x,img_y,floor_x,floor_y`. Throws WrongPointCount,
/// DegenerateQuad or MalformedLine.
CalibrationPoints parse_calibration(std::istream& in, const std::string& source = {});
CalibrationPoints parse_calibration(const std::filesystem::path& path);

}  // namespace threatgraph
