#include "threatgraph/eval.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "threatgraph/csv.hpp"
#include "threatgraph/errors.hpp"

namespace threatgraph {

std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in, const StreamConfig& config,
                                                  const std::string& source) {
  validate(config);
  std::vector<GroundTruthRecord> out;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::is_skippable(line)) continue;
    const std::string_view view(line);
    const auto comma = view.rfind(',');
    if (first_content) {
      first_content = false;
      if (csv::split(view).front() == "frame") continue;
    }
    if (comma == std::string_view::npos) throw Error(Errc::MalformedLine, "missing class column", line_no, source);
    try {
      GroundTruthRecord rec;
      rec.record = parse_detection_line(view.substr(0, comma), config, line_no);
      rec.label = std::string(csv::trim(view.substr(comma + 1)));
      out.push_back(std::move(rec));
    } catch (const Error& e) {
      if (source.empty()) throw;
      throw Error(e.code(), e.what(), line_no, source);
    }
  }
  return out;
}

std::vector<GroundTruthRecord> parse_ground_truth(const std::filesystem::path& path, const StreamConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open ground-truth file " + path.string());
  return parse_ground_truth(in, config, path.string());
}

std::optional<double> compute_ap(std::vector<ScoredBox> detections, const std::vector<ScoredBox>& ground_truth,
                                 double iou_threshold) {
  if (ground_truth.empty()) return std::nullopt;
  std::stable_sort(detections.begin(), detections.end(), [](const ScoredBox& a, const ScoredBox& b) {
    if (a.box.conf != b.box.conf) return a.box.conf > b.box.conf;
    return std::tie(a.frame, a.box.u, a.box.v, a.box.r, a.box.h) < std::tie(b.frame, b.box.u, b.box.v, b.box.r, b.box.h);
  });

  std::map<FrameIndex, std::vector<std::size_t>> gt_by_frame;
  for (std::size_t g = 0; g < ground_truth.size(); ++g) gt_by_frame[ground_truth[g].frame].push_back(g);
  std::vector<bool> matched(ground_truth.size(), false);

  const double total_gt = static_cast<double>(ground_truth.size());
  std::vector<double> precision, recall;
  double tp = 0.0, fp = 0.0;
  for (const auto& det : detections) {
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    if (auto it = gt_by_frame.find(det.frame); it != gt_by_frame.end()) {
      for (std::size_t g : it->second) {
        if (matched[g]) continue;
        const double o = iou(det.box, ground_truth[g].box);
        if (o >= iou_threshold && o > 0.0 && (!best || o > best_iou)) {
          best = g;
          best_iou = o;
        }
      }
    }
    if (best) {
      matched[*best] = true;
      tp += 1.0;
    } else {
      fp += 1.0;
    }
    precision.push_back(tp / (tp + fp));
    recall.push_back(tp / total_gt);
  }

  // All-point interpolation: precision envelope from the right, integrated over recall steps.
  std::vector<double> mrec{0.0}, mpre{0.0};
  mrec.insert(mrec.end(), recall.begin(), recall.end());
  mpre.insert(mpre.end(), precision.begin(), precision.end());
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  double ap = 0.0;
  for (std::size_t i = 1; i < mrec.size(); ++i) ap += (mrec[i] - mrec[i - 1]) * mpre[i];
  return ap;
}

std::map<std::string, std::optional<double>> mask_average_precision(const std::vector<DetectionRecord>& faces,
                                                                    const std::vector<GroundTruthRecord>& ground_truth,
                                                                    double iou_threshold) {
  std::map<std::string, std::vector<ScoredBox>> dets, gts;
  dets["masked"];
  dets["unmasked"];
  for (const auto& f : faces) {
    if (f.kind != Kind::face) continue;
    const double c_nomask = f.conf_b.value_or(0.0);
    const bool masked = f.conf_a >= c_nomask;
    Box b = f.box();
    b.conf = masked ? f.conf_a : c_nomask;
    dets[masked ? "masked" : "unmasked"].push_back({f.frame, b});
  }
  for (const auto& g : ground_truth) {
    if (g.record.kind != Kind::face || g.label.empty()) continue;
    gts[g.label].push_back({g.record.frame, g.record.box()});
    dets[g.label];
  }
  std::map<std::string, std::optional<double>> out;
  for (auto& [label, list] : dets) out[label] = compute_ap(list, gts[label], iou_threshold);
  return out;
}

MeanAp compute_map(const std::map<std::string, std::optional<double>>& per_class) {
  MeanAp out;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [label, ap] : per_class) {
    if (ap) {
      sum += *ap;
      ++count;
    } else {
      out.undefined_classes.push_back(label);
    }
  }
  if (count == 0) throw Error(Errc::NoDefinedClasses, "no class has a defined AP");
  out.value = sum / static_cast<double>(count);
  return out;
}

std::vector<FramePairLabel> parse_labels(std::istream& in, const std::string& source) {
  std::vector<FramePairLabel> out;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::is_skippable(line)) continue;
    const auto fields = csv::split(line);
    if (first_content) {
      first_content = false;
      if (fields.front() == "t1") continue;
    }
    if (fields.size() != 4) throw Error(Errc::MalformedLine, "expected t1,t2,votes_increase,votes_decrease", line_no, source);
    std::int64_t v[4];
    for (int i = 0; i < 4; ++i) {
      const auto x = csv::parse_int(fields[static_cast<std::size_t>(i)]);
      if (!x) throw Error(Errc::MalformedLine, "bad integer", line_no, source);
      v[i] = *x;
    }
    if (v[2] < 0 || v[3] < 0 || v[2] + v[3] < 1)
      throw Error(Errc::MalformedLine, "votes must be non-negative with at least one vote", line_no, source);
    out.push_back({v[0], v[1], static_cast<long>(v[2]), static_cast<long>(v[3])});
  }
  return out;
}

std::vector<FramePairLabel> parse_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open label file " + path.string());
  return parse_labels(in, path.string());
}

MajorityFilter filter_by_majority(const std::vector<FramePairLabel>& labels, double threshold) {
  MajorityFilter out;
  for (const auto& l : labels) {
    const long total = l.votes_increase + l.votes_decrease;
    if (total < 1) throw Error(Errc::InvalidArgument, "frame pair without votes");
    const long top = std::max(l.votes_increase, l.votes_decrease);
    const double share = static_cast<double>(top) / static_cast<double>(total);
    if (l.votes_increase == l.votes_decrease || share < threshold - 1e-12) {
      ++out.excluded;
      continue;
    }
    out.kept.push_back({l, l.votes_increase > l.votes_decrease ? Direction::increase : Direction::decrease});
  }
  return out;
}

EvalReport compare_directions(const std::map<FrameIndex, double>& totals, const std::vector<LabeledPair>& kept,
                              std::size_t excluded_pairs) {
  EvalReport r;
  r.excluded_pairs = excluded_pairs;
  auto lookup = [&](FrameIndex t) {
    const auto it = totals.find(t);
    if (it == totals.end()) throw Error(Errc::MissingFrame, "frame " + std::to_string(t) + " not in threat series");
    return it->second;
  };
  for (const auto& pair : kept) {
    const double diff = lookup(pair.label.t2) - lookup(pair.label.t1);
    const bool positive_label = pair.direction == Direction::increase;
    if (diff == 0.0) {
      ++r.zero_diff;
      // Disagrees with whichever label was given.
      if (positive_label) ++r.fn; else ++r.fp;
      continue;
    }
    const bool predicted_increase = diff > 0.0;
    if (predicted_increase && positive_label) ++r.tp;
    else if (predicted_increase) ++r.fp;
    else if (positive_label) ++r.fn;
    else ++r.tn;
  }
  auto ratio = [](long num, long den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.accuracy = ratio(r.tp + r.tn, r.tp + r.tn + r.fp + r.fn);
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  return r;
}

EvalReport compare_directions(const std::vector<ThreatReport>& reports, const std::vector<LabeledPair>& kept,
                              std::size_t excluded_pairs) {
  std::map<FrameIndex, double> totals;
  for (const auto& r : reports) totals.emplace(r.frame, r.total);
  return compare_directions(totals, kept, excluded_pairs);
}

void write_eval_report(const EvalReport& r, std::ostream& out) {
  auto metric = [](const std::optional<double>& m) { return m ? csv::format_double(*m) : std::string("undefined"); };
  out << "tp=" << r.tp << '\n'
      << "fp=" << r.fp << '\n'
      << "tn=" << r.tn << '\n'
      << "fn=" << r.fn << '\n'
      << "zero_diff=" << r.zero_diff << '\n'
      << "excluded_pairs=" << r.excluded_pairs << '\n'
      << "accuracy=" << metric(r.accuracy) << '\n'
      << "precision=" << metric(r.precision) << '\n'
      << "recall=" << metric(r.recall) << '\n';
}

std::map<FrameIndex, double> read_threat_csv(std::istream& in) {
  std::map<FrameIndex, double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::is_skippable(line)) continue;
    const auto fields = csv::split(line);
    if (fields.front() == "frame") continue;
    if (fields.size() != 4) throw Error(Errc::MalformedLine, "expected frame,total_threat,n_people,n_edges", line_no);
    const auto frame = csv::parse_int(fields[0]);
    const auto total = csv::parse_double(fields[1]);
    if (!frame || !total) throw Error(Errc::MalformedLine, "bad threat row", line_no);
    out[*frame] = *total;
  }
  return out;
}

}  // namespace threatgraph
