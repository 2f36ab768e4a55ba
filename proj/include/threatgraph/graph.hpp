#pragma once

// Per-frame interaction graph G(t) = (V(t), E(t)) and its file format.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "threatgraph/geometry.hpp"
#include "threatgraph/grouping.hpp"
#include "threatgraph/tracking.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

struct VertexAttributes {
  PersonId person_id = 0;
  FloorPoint location;
  std::optional<MaskConfidence> mask;  // nullopt = unknown
  std::optional<int> group_label;

  friend bool operator==(const VertexAttributes&, const VertexAttributes&) = default;
};

struct Edge {
  int present = 1;
  double confidence = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct FrameGraph {
  FrameIndex frame = 0;
  std::vector<VertexAttributes> vertices;  // ascending person_id
  std::map<PairKey, Edge> edges;

  const VertexAttributes* find(PersonId id) const;

  friend bool operator==(const FrameGraph&, const FrameGraph&) = default;
};

struct TemporalGraph {
  std::string stream_id;
  double fps = 0.0;
  std::map<FrameIndex, FrameGraph> frames;
  ConfirmedGroups confirmed_groups;

  /// Throws InvalidArgument unless frame is newer than every stored frame.
  void append(FrameGraph frame);

  friend bool operator==(const TemporalGraph&, const TemporalGraph&) = default;
};

struct FrameGraphBuild {
  FrameGraph graph;
  std::size_t dangling_edges = 0;
};

/// One vertex per person in `floor_points` (persons that could not be located
/// on the floor have no vertex). One edge per pair event; repeated events on
/// a pair keep the highest confidence. Events naming a person without a
/// vertex, or a self pair, are dropped and counted.
FrameGraphBuild build_frame_graph(FrameIndex frame, const std::map<PersonId, FloorPoint>& floor_points,
                                  const std::map<PersonId, MaskConfidence>& masks,
                                  const std::vector<PairEvent>& pair_events, const ClusterAssignment& clusters);

inline constexpr std::string_view kGraphSchema = "threatgraph-v1";

void serialize_graph(const TemporalGraph& graph, std::ostream& out);
void serialize_graph(const TemporalGraph& graph, const std::filesystem::path& path);
/// Throws SchemaMismatch on an unknown header or malformed record.
TemporalGraph deserialize_graph(std::istream& in);
TemporalGraph deserialize_graph(const std::filesystem::path& path);

}  // namespace threatgraph
