#include "threatgraph/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "threatgraph/csv.hpp"
#include "threatgraph/errors.hpp"
#include "threatgraph/eval.hpp"
#include "threatgraph/grouping.hpp"
#include "threatgraph/heatmap.hpp"

namespace threatgraph {

PipelineResult process_stream(const std::vector<FrameBundle>& bundles, const FloorCalibration& calib,
                              const RunConfig& config) {
  PipelineResult result;
  result.graph.stream_id = config.stream.stream_id;
  result.graph.fps = config.stream.fps;
  if (bundles.empty()) return result;

  const TrackerParams tracker_params = config.tracker_params();
  TrackerState tracker;
  std::vector<Track> tracks;
  for (const auto& bundle : bundles) {
    auto step = associate(std::move(tracker), bundle, tracker_params);
    tracker = std::move(step.state);
    for (auto& t : step.retired) tracks.push_back(std::move(t));
  }
  for (auto& t : drain(tracker)) tracks.push_back(std::move(t));

  std::map<FrameIndex, PersonBoxes> persons_by_frame;
  for (auto& track : tracks) {
    const std::size_t observed = track.boxes.size();
    track = interpolate_gaps(track, tracker_params.max_gap);
    result.summary.interpolated_boxes += track.boxes.size() - observed;
    for (const auto& [frame, box] : track.boxes) persons_by_frame[frame].emplace(track.id, box);
  }
  std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) {
    return a.id != b.id ? a.id < b.id : a.first_frame() < b.first_frame();
  });
  result.summary.tracks = tracks.size();

  std::map<FrameIndex, const FrameBundle*> bundle_at;
  for (const auto& b : bundles) bundle_at.emplace(b.frame, &b);
  const FrameBundle empty_bundle;

  GroupState groups;
  const FrameIndex first = bundles.front().frame, last = bundles.back().frame;
  for (FrameIndex t = first; t <= last; ++t) {
    const auto bit = bundle_at.find(t);
    const FrameBundle& bundle = bit != bundle_at.end() ? *bit->second : empty_bundle;
    static const PersonBoxes no_persons;
    const auto pit = persons_by_frame.find(t);
    const PersonBoxes& persons = pit != persons_by_frame.end() ? pit->second : no_persons;

    std::map<PersonId, FloorPoint> located;
    for (const auto& [id, box] : persons) {
      try {
        located.emplace(id, project_to_floor(calib, standing_location(box), id, t));
      } catch (const Error& e) {
        if (e.code() != Errc::AtInfinity) throw;
        ++result.summary.persons_unlocated;
      }
    }
    std::vector<FloorPoint> points;
    for (const auto& [id, p] : located) points.push_back(p);

    const DistanceMatrix distances = distance_matrix(points);
    const AffinityMatrix affinity = affinity_from_distance(distances, config.grouping.alpha);
    const ClusterAssignment clusters = spectral_cluster(affinity, config.grouping.cluster_count, t);
    groups = update_groups(std::move(groups), clusters, distances, config.grouping, config.stream.fps);

    const FaceAssociation faces = associate_faces(persons, bundle.faces);
    result.summary.faces_dropped += faces.dropped;
    const HandshakeAssociation shakes = associate_handshakes(persons, bundle.handshakes, t, located, calib);
    result.summary.handshakes_fewer_than_two_persons += shakes.fewer_than_two_persons;
    result.summary.handshakes_unprojectable += shakes.unprojectable;

    FrameGraphBuild built = build_frame_graph(t, located, faces.masks, shakes.events, clusters);
    result.summary.dangling_edges += built.dangling_edges;
    result.graph.append(std::move(built.graph));
  }
  result.graph.confirmed_groups = groups.confirmed;
  result.summary.confirmed_groups = groups.confirmed.size();
  result.summary.frames = result.graph.frames.size();
  result.reports = threat_series(result.graph, config.threat);
  result.tracks = std::move(tracks);
  return result;
}

void check_inputs_exist(const RunManifest& manifest) {
  auto check = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::is_regular_file(p)) throw Error(Errc::IoFailure, std::string(what) + " file not found: " + p.string());
  };
  check(manifest.detections, "detections");
  check(manifest.calibration, "calibration");
  if (manifest.config) check(*manifest.config, "config");
  if (manifest.labels) check(*manifest.labels, "labels");
  if (manifest.ground_truth) check(*manifest.ground_truth, "ground truth");
}

RunConfig load_config(const RunManifest& manifest) {
  RunConfig config = manifest.config ? parse_config(*manifest.config) : RunConfig{};
  for (const auto& o : manifest.overrides) apply_override(config, o);
  validate(config);
  return config;
}

void write_summary(const PipelineSummary& s, std::ostream& out) {
  out << "frames=" << s.frames << '\n'
      << "tracks=" << s.tracks << '\n'
      << "interpolated_boxes=" << s.interpolated_boxes << '\n'
      << "faces_dropped=" << s.faces_dropped << '\n'
      << "handshakes_fewer_than_two_persons=" << s.handshakes_fewer_than_two_persons << '\n'
      << "handshakes_unprojectable=" << s.handshakes_unprojectable << '\n'
      << "dangling_edges=" << s.dangling_edges << '\n'
      << "persons_unlocated=" << s.persons_unlocated << '\n'
      << "confirmed_groups=" << s.confirmed_groups << '\n';
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  return out;
}

void write_heatmaps(const PipelineResult& result, const RunConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (result.reports.empty()) return;
  const int stride = config.resolved_heatmap_stride();
  const FrameIndex first = result.reports.front().frame;
  const double max_threat = 2.0 * config.threat.epsilon_m * config.threat.epsilon_g;
  struct Style {
    ActivityMatrix kind;
    ValueRange range;
    Shading shading;
  };
  const Style styles[] = {
      {ActivityMatrix::distance, {0.0, config.heatmap_max_distance}, Shading::inverted},
      {ActivityMatrix::group, {0.0, 1.0}, Shading::direct},
      {ActivityMatrix::interaction, {0.0, 1.0}, Shading::direct},
      {ActivityMatrix::threat, {0.0, max_threat}, Shading::direct},
  };
  for (const auto& report : result.reports) {
    if ((report.frame - first) % stride != 0 || report.n_people() == 0) continue;
    for (const auto& style : styles) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%06lld.pgm", std::string(to_string(style.kind)).c_str(),
                    static_cast<long long>(report.frame));
      render_heatmap(select(report, style.kind), style.range, dir / name, style.shading);
    }
  }
}

void write_eval(const RunManifest& manifest, const RunConfig& config, const std::vector<FrameBundle>& bundles,
                const PipelineResult& result, std::ostream& out) {
  if (manifest.labels) {
    const auto filtered = filter_by_majority(parse_labels(*manifest.labels), config.majority_threshold);
    write_eval_report(compare_directions(result.reports, filtered.kept, filtered.excluded), out);
  }
  if (manifest.ground_truth) {
    const auto truth = parse_ground_truth(*manifest.ground_truth, config.stream);
    std::vector<ScoredBox> dets, gts;
    std::vector<DetectionRecord> faces;
    for (const auto& b : bundles) {
      for (const auto& p : b.persons) dets.push_back({p.frame, p.box()});
      faces.insert(faces.end(), b.faces.begin(), b.faces.end());
    }
    for (const auto& g : truth)
      if (g.record.kind == Kind::person) gts.push_back({g.record.frame, g.record.box()});
    auto metric = [](const std::optional<double>& m) { return m ? csv::format_double(*m) : std::string("undefined"); };
    out << "ap_person=" << metric(compute_ap(dets, gts, config.ap_iou_threshold)) << '\n';
    const auto per_class = mask_average_precision(faces, truth, config.ap_iou_threshold);
    for (const auto& [label, ap] : per_class) out << "ap_" << label << '=' << metric(ap) << '\n';
    try {
      const MeanAp m = compute_map(per_class);
      out << "map_mask=" << csv::format_double(m.value) << '\n';
      for (const auto& u : m.undefined_classes) out << "warning=undefined AP for class " << u << '\n';
    } catch (const Error& e) {
      if (e.code() != Errc::NoDefinedClasses) throw;
      out << "map_mask=undefined\n";
    }
  }
}

}  // namespace

PipelineResult run_pipeline(const RunManifest& manifest) {
  check_inputs_exist(manifest);
  const RunConfig config = load_config(manifest);
  const CalibrationPoints points = parse_calibration(manifest.calibration);
  const FloorCalibration calib = fit_transform(points.image, points.floor, config.transform_mode);
  const auto bundles = parse_detection_stream(manifest.detections, config.stream);

  PipelineResult result = process_stream(bundles, calib, config);

  std::filesystem::create_directories(manifest.out_dir);
  {
    auto out = open_output(manifest.out_dir / "threat.csv");
    write_threat_csv(result.reports, out);
  }
  serialize_graph(result.graph, manifest.out_dir / "graph.tgraph");
  std::filesystem::create_directories(manifest.out_dir / "matrices");
  for (auto kind : {ActivityMatrix::distance, ActivityMatrix::group, ActivityMatrix::interaction, ActivityMatrix::threat}) {
    auto out = open_output(manifest.out_dir / "matrices" / (std::string(to_string(kind)) + ".csv"));
    write_matrix_blocks(result.reports, kind, out);
  }
  write_heatmaps(result, config, manifest.out_dir / "heatmaps");
  {
    auto out = open_output(manifest.out_dir / "summary.txt");
    write_summary(result.summary, out);
  }
  if (manifest.labels || manifest.ground_truth) {
    auto out = open_output(manifest.out_dir / "eval.txt");
    write_eval(manifest, config, bundles, result, out);
  }
  return result;
}

}  // namespace threatgraph
