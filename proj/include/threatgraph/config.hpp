#pragma once

// Run configuration: `key=value` lines, '#' comments allowed.
//
//   W, H, fps, stream_id                      stream
//   iou_gate, max_gap                         tracking (max_gap defaults to fps)
//   transform_mode                            geometry: projective | paper_linear
//   alpha, tau_seconds, naive_threshold_fraction, naive_mode_max_people,
//   proximity_radius, cluster_count           grouping (cluster_count: auto | k)
//   epsilon_m, epsilon_g, proximity_threshold, beta,
//   unknown_mask_policy, mask_aggregation     threat
//   ap_iou_threshold, majority_threshold      eval
//   heatmap_stride, heatmap_max_distance      rendering

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "threatgraph/geometry.hpp"
#include "threatgraph/grouping.hpp"
#include "threatgraph/ingest.hpp"
#include "threatgraph/threat.hpp"
#include "threatgraph/tracking.hpp"

namespace threatgraph {

struct RunConfig {
  StreamConfig stream;
  double iou_gate = 0.3;
  std::optional<int> max_gap;  // nullopt = one second of frames
  TransformMode transform_mode = TransformMode::projective;
  GroupingConfig grouping;
  ThreatParams threat;
  double ap_iou_threshold = 0.5;
  double majority_threshold = 0.70;
  int heatmap_stride = 0;  // 0 = once per second
  double heatmap_max_distance = 10.0;

  TrackerParams tracker_params() const;
  int resolved_heatmap_stride() const;
};

/// Applies one setting. Throws Error(BadConfig) on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
/// Parses "key=value".
void apply_override(RunConfig& config, std::string_view assignment);

RunConfig parse_config(std::istream& in, const std::string& source = {});
RunConfig parse_config(const std::filesystem::path& path);

/// Throws Error(BadConfig) when any module's parameters are out of range.
void validate(const RunConfig& config);

}  // namespace threatgraph
