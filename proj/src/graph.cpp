#include "threatgraph/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "threatgraph/errors.hpp"

namespace threatgraph {

using ordered_json = nlohmann::ordered_json;

const VertexAttributes* FrameGraph::find(PersonId id) const {
  const auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                                   [](const VertexAttributes& v, PersonId key) { return v.person_id < key; });
  return it != vertices.end() && it->person_id == id ? &*it : nullptr;
}

void TemporalGraph::append(FrameGraph frame) {
  if (!frames.empty() && frame.frame <= frames.rbegin()->first)
    throw Error(Errc::InvalidArgument, "graph frames must be appended in increasing order");
  const FrameIndex key = frame.frame;
  frames.emplace_hint(frames.end(), key, std::move(frame));
}

FrameGraphBuild build_frame_graph(FrameIndex frame, const std::map<PersonId, FloorPoint>& floor_points,
                                  const std::map<PersonId, MaskConfidence>& masks,
                                  const std::vector<PairEvent>& pair_events, const ClusterAssignment& clusters) {
  FrameGraphBuild out;
  out.graph.frame = frame;
  for (const auto& [id, point] : floor_points) {
    VertexAttributes v;
    v.person_id = id;
    v.location = point;
    v.location.frame = frame;
    if (auto m = masks.find(id); m != masks.end()) v.mask = m->second;
    if (auto c = clusters.labels.find(id); c != clusters.labels.end()) v.group_label = c->second;
    out.graph.vertices.push_back(v);
  }
  for (const auto& event : pair_events) {
    if (event.person_a == event.person_b || !floor_points.count(event.person_a) ||
        !floor_points.count(event.person_b)) {
      ++out.dangling_edges;
      continue;
    }
    const PairKey key(event.person_a, event.person_b);
    auto [it, inserted] = out.graph.edges.try_emplace(key, Edge{1, event.confidence});
    if (!inserted) it->second.confidence = std::max(it->second.confidence, event.confidence);
  }
  return out;
}

namespace {

ordered_json frame_to_json(const FrameGraph& g) {
  ordered_json vertices = ordered_json::array();
  for (const auto& v : g.vertices) {
    ordered_json jv;
    jv["id"] = v.person_id;
    jv["x"] = v.location.x;
    jv["y"] = v.location.y;
    jv["mask"] = v.mask ? ordered_json::array({v.mask->c_mask, v.mask->c_nomask}) : ordered_json(nullptr);
    jv["group"] = v.group_label ? ordered_json(*v.group_label) : ordered_json(nullptr);
    vertices.push_back(std::move(jv));
  }
  ordered_json edges = ordered_json::array();
  for (const auto& [key, e] : g.edges) {
    ordered_json je;
    je["a"] = key.first();
    je["b"] = key.second();
    je["present"] = e.present;
    je["confidence"] = e.confidence;
    edges.push_back(std::move(je));
  }
  ordered_json j;
  j["frame"] = g.frame;
  j["vertices"] = std::move(vertices);
  j["edges"] = std::move(edges);
  return j;
}

double as_double(const ordered_json& j) {
  if (!j.is_number()) throw Error(Errc::SchemaMismatch, "expected a number");
  return j.get<double>();
}

std::int64_t as_int(const ordered_json& j) {
  if (!j.is_number_integer()) throw Error(Errc::SchemaMismatch, "expected an integer");
  return j.get<std::int64_t>();
}

FrameGraph frame_from_json(const ordered_json& j) {
  FrameGraph g;
  g.frame = as_int(j.at("frame"));
  for (const auto& jv : j.at("vertices")) {
    VertexAttributes v;
    v.person_id = as_int(jv.at("id"));
    v.location = {as_double(jv.at("x")), as_double(jv.at("y")), v.person_id, g.frame};
    const auto& mask = jv.at("mask");
    if (!mask.is_null()) {
      if (!mask.is_array() || mask.size() != 2) throw Error(Errc::SchemaMismatch, "mask must be [c_mask, c_nomask]");
      v.mask = MaskConfidence{as_double(mask[0]), as_double(mask[1])};
    }
    const auto& group = jv.at("group");
    if (!group.is_null()) v.group_label = static_cast<int>(as_int(group));
    if (!g.vertices.empty() && g.vertices.back().person_id >= v.person_id)
      throw Error(Errc::SchemaMismatch, "vertices must be sorted by id");
    g.vertices.push_back(v);
  }
  for (const auto& je : j.at("edges")) {
    const PersonId a = as_int(je.at("a")), b = as_int(je.at("b"));
    if (a >= b || !g.find(a) || !g.find(b)) throw Error(Errc::SchemaMismatch, "edge endpoints invalid");
    g.edges.emplace(PairKey(a, b), Edge{static_cast<int>(as_int(je.at("present"))), as_double(je.at("confidence"))});
  }
  return g;
}

}  // namespace

void serialize_graph(const TemporalGraph& graph, std::ostream& out) {
  ordered_json meta;
  meta["stream_id"] = graph.stream_id;
  meta["fps"] = graph.fps;
  ordered_json groups = ordered_json::array();
  for (const auto& [key, frame] : graph.confirmed_groups) groups.push_back(ordered_json::array({key.first(), key.second(), frame}));
  meta["confirmed_groups"] = std::move(groups);
  out << kGraphSchema << ' ' << meta.dump() << '\n';
  for (const auto& [t, frame] : graph.frames) out << frame_to_json(frame).dump() << '\n';
}

void serialize_graph(const TemporalGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoFailure, "cannot write graph file " + path.string());
  serialize_graph(graph, out);
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

TemporalGraph deserialize_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::SchemaMismatch, "missing header");
  const auto space = line.find(' ');
  if (line.substr(0, space) != kGraphSchema)
    throw Error(Errc::SchemaMismatch, "unsupported graph schema '" + line.substr(0, space) + "'", 1);
  TemporalGraph graph;
  std::size_t line_no = 1;
  try {
    const auto meta = ordered_json::parse(space == std::string::npos ? std::string("{}") : line.substr(space + 1));
    graph.stream_id = meta.at("stream_id").get<std::string>();
    graph.fps = as_double(meta.at("fps"));
    for (const auto& g : meta.at("confirmed_groups")) {
      if (!g.is_array() || g.size() != 3) throw Error(Errc::SchemaMismatch, "confirmed group must be [a, b, frame]");
      graph.confirmed_groups.emplace(PairKey(as_int(g[0]), as_int(g[1])), as_int(g[2]));
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      FrameGraph frame = frame_from_json(ordered_json::parse(line));
      if (!graph.frames.empty() && frame.frame <= graph.frames.rbegin()->first)
        throw Error(Errc::SchemaMismatch, "frames out of order");
      graph.frames.emplace(frame.frame, std::move(frame));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaMismatch, e.what(), line_no);
  } catch (const Error& e) {
    if (e.line()) throw;
    throw Error(e.code(), e.what(), line_no);
  }
  return graph;
}

TemporalGraph deserialize_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open graph file " + path.string());
  return deserialize_graph(in);
}

}  // namespace threatgraph
