#pragma once

// Full stream processing: ingest -> track -> floor geometry -> grouping ->
// graph -> threat, plus the artifact writer used by the CLI.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "threatgraph/config.hpp"
#include "threatgraph/geometry.hpp"
#include "threatgraph/graph.hpp"
#include "threatgraph/ingest.hpp"
#include "threatgraph/threat.hpp"
#include "threatgraph/tracking.hpp"

namespace threatgraph {

struct PipelineSummary {
  std::size_t frames = 0;
  std::size_t tracks = 0;
  std::size_t interpolated_boxes = 0;
  std::size_t faces_dropped = 0;
  std::size_t handshakes_fewer_than_two_persons = 0;
  std::size_t handshakes_unprojectable = 0;
  std::size_t dangling_edges = 0;
  std::size_t persons_unlocated = 0;
  std::size_t confirmed_groups = 0;
};

struct PipelineResult {
  TemporalGraph graph;
  std::vector<ThreatReport> reports;
  std::vector<Track> tracks;  // after interpolation, ascending id
  PipelineSummary summary;
};

/// Runs every stage over an in-memory stream. Frames between the first and
/// last bundle are processed densely; absent bundles count as empty frames.
PipelineResult process_stream(const std::vector<FrameBundle>& bundles, const FloorCalibration& calib,
                              const RunConfig& config);

struct RunManifest {
  std::filesystem::path detections;
  std::filesystem::path calibration;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> ground_truth;
  std::filesystem::path out_dir;
  std::vector<std::string> overrides;  // key=value
};

/// Throws IoFailure naming the first referenced input file that is missing.
void check_inputs_exist(const RunManifest& manifest);

/// Loads config (file then overrides) and validates it.
RunConfig load_config(const RunManifest& manifest);

/// Runs the pipeline from files and writes into manifest.out_dir:
///   threat.csv, graph.tgraph, matrices/<kind>.csv, heatmaps/<kind>_<frame>.pgm,
///   summary.txt, and eval.txt when labels or ground truth are given.
PipelineResult run_pipeline(const RunManifest& manifest);

void write_summary(const PipelineSummary& summary, std::ostream& out);

}  // namespace threatgraph
