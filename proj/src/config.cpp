#include "threatgraph/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include "threatgraph/csv.hpp"
#include "threatgraph/errors.hpp"

namespace threatgraph {

TrackerParams RunConfig::tracker_params() const {
  TrackerParams p;
  p.iou_gate = iou_gate;
  p.max_gap = max_gap ? *max_gap : std::max(0, static_cast<int>(std::lround(stream.fps)));
  return p;
}

int RunConfig::resolved_heatmap_stride() const {
  if (heatmap_stride > 0) return heatmap_stride;
  return std::max(1, static_cast<int>(std::lround(stream.fps)));
}

namespace {

double number(std::string_view key, std::string_view value) {
  const auto v = csv::parse_double(value);
  if (!v) throw Error(Errc::BadConfig, "'" + std::string(key) + "' needs a number, got '" + std::string(value) + "'");
  return *v;
}

int integer(std::string_view key, std::string_view value) {
  const auto v = csv::parse_int(value);
  if (!v) throw Error(Errc::BadConfig, "'" + std::string(key) + "' needs an integer, got '" + std::string(value) + "'");
  return static_cast<int>(*v);
}

template <typename T>
T enumerated(std::string_view key, std::string_view value, std::optional<T> parsed) {
  if (!parsed) throw Error(Errc::BadConfig, "bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
  return *parsed;
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  key = csv::trim(key);
  value = csv::trim(value);
  if (key == "W" || key == "width") c.stream.width = integer(key, value);
  else if (key == "H" || key == "height") c.stream.height = integer(key, value);
  else if (key == "fps") c.stream.fps = number(key, value);
  else if (key == "stream_id") c.stream.stream_id = std::string(value);
  else if (key == "iou_gate") c.iou_gate = number(key, value);
  else if (key == "max_gap") c.max_gap = integer(key, value);
  else if (key == "transform_mode") c.transform_mode = enumerated(key, value, parse_transform_mode(value));
  else if (key == "alpha") c.grouping.alpha = number(key, value);
  else if (key == "tau_seconds" || key == "tau") c.grouping.tau_seconds = number(key, value);
  else if (key == "naive_threshold_fraction") c.grouping.naive_threshold_fraction = number(key, value);
  else if (key == "naive_mode_max_people") c.grouping.naive_mode_max_people = integer(key, value);
  else if (key == "proximity_radius") c.grouping.proximity_radius = number(key, value);
  else if (key == "cluster_count") {
    if (value == "auto") c.grouping.cluster_count.reset();
    else c.grouping.cluster_count = integer(key, value);
  } else if (key == "epsilon_m") c.threat.epsilon_m = number(key, value);
  else if (key == "epsilon_g") c.threat.epsilon_g = number(key, value);
  else if (key == "proximity_threshold") c.threat.proximity_threshold = number(key, value);
  else if (key == "beta") c.threat.beta = number(key, value);
  else if (key == "unknown_mask_policy")
    c.threat.unknown_mask_policy = enumerated(key, value, parse_unknown_mask_policy(value));
  else if (key == "mask_aggregation") c.threat.mask_aggregation = enumerated(key, value, parse_mask_aggregation(value));
  else if (key == "ap_iou_threshold") c.ap_iou_threshold = number(key, value);
  else if (key == "majority_threshold") c.majority_threshold = number(key, value);
  else if (key == "heatmap_stride") c.heatmap_stride = integer(key, value);
  else if (key == "heatmap_max_distance") c.heatmap_max_distance = number(key, value);
  else throw Error(Errc::BadConfig, "unknown config key '" + std::string(key) + "'");
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw Error(Errc::BadConfig, "expected key=value, got '" + std::string(assignment) + "'");
  apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::is_skippable(line)) continue;
    try {
      apply_override(config, csv::trim(line));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no, source);
    }
  }
  return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open config file " + path.string());
  return parse_config(in, path.string());
}

void validate(const RunConfig& c) {
  try {
    validate(c.stream);
    validate(c.grouping);
    validate(c.threat);
  } catch (const Error& e) {
    throw Error(Errc::BadConfig, e.what());
  }
  if (!(c.iou_gate >= 0.0 && c.iou_gate <= 1.0)) throw Error(Errc::BadConfig, "iou_gate must lie in [0,1]");
  if (c.max_gap && *c.max_gap < 0) throw Error(Errc::BadConfig, "max_gap must be >= 0");
  if (!(c.ap_iou_threshold >= 0.0 && c.ap_iou_threshold <= 1.0))
    throw Error(Errc::BadConfig, "ap_iou_threshold must lie in [0,1]");
  if (!(c.majority_threshold >= 0.0 && c.majority_threshold <= 1.0))
    throw Error(Errc::BadConfig, "majority_threshold must lie in [0,1]");
  if (c.heatmap_stride < 0) throw Error(Errc::BadConfig, "heatmap_stride must be >= 0");
  if (!(c.heatmap_max_distance > 0.0)) throw Error(Errc::BadConfig, "heatmap_max_distance must be > 0");
}

}  // namespace threatgraph
