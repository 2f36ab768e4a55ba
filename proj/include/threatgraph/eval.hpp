#pragma once

// Detection AP/mAP and threat-direction agreement with expert frame-pair labels.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "threatgraph/box.hpp"
#include "threatgraph/ingest.hpp"
#include "threatgraph/threat.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

struct ScoredBox {
  FrameIndex frame = 0;
  Box box;  // box.conf is the score
};

struct GroundTruthRecord {
  DetectionRecord record;
  std::string label;  // e.g. "masked" / "unmasked"; may be empty
};

/// Detection CSV with a trailing `class` column.
std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in, const StreamConfig& config,
                                                  const std::string& source = {});
std::vector<GroundTruthRecord> parse_ground_truth(const std::filesystem::path& path, const StreamConfig& config);

/// Area under the all-point interpolated precision/recall curve. Detections
/// are visited by descending score and matched to the highest-IoU unmatched
/// ground truth box of the same frame with IoU >= iou_threshold.
/// Returns nullopt when there is no ground truth (AP undefined).
std::optional<double> compute_ap(std::vector<ScoredBox> detections, const std::vector<ScoredBox>& ground_truth,
                                 double iou_threshold);

/// Per-class AP for face detections: a face predicts "masked" when
/// c_mask >= c_nomask (score c_mask), else "unmasked" (score c_nomask).
std::map<std::string, std::optional<double>> mask_average_precision(const std::vector<DetectionRecord>& faces,
                                                                    const std::vector<GroundTruthRecord>& ground_truth,
                                                                    double iou_threshold);

struct MeanAp {
  double value = 0.0;
  std::vector<std::string> undefined_classes;
};

/// Mean over classes with a defined AP. Throws NoDefinedClasses.
MeanAp compute_map(const std::map<std::string, std::optional<double>>& per_class);

struct FramePairLabel {
  FrameIndex t1 = 0;
  FrameIndex t2 = 0;
  long votes_increase = 0;
  long votes_decrease = 0;
};

/// CSV `t1,t2,votes_increase,votes_decrease`, header optional.
std::vector<FramePairLabel> parse_labels(std::istream& in, const std::string& source = {});
std::vector<FramePairLabel> parse_labels(const std::filesystem::path& path);

enum class Direction { increase, decrease };

struct LabeledPair {
  FramePairLabel label;
  Direction direction = Direction::increase;
};

struct MajorityFilter {
  std::vector<LabeledPair> kept;
  std::size_t excluded = 0;
};

/// Keeps a pair iff max(votes) / total >= threshold; exact vote ties are
/// always excluded because they carry no direction.
MajorityFilter filter_by_majority(const std::vector<FramePairLabel>& labels, double threshold = 0.70);

struct EvalReport {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long zero_diff = 0;
  std::size_t excluded_pairs = 0;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
};

/// Predicted direction is sign(T(t2) - T(t1)), "increase" is the positive
/// class, and a zero difference disagrees with either label (tallied in
/// zero_diff). Throws MissingFrame.
EvalReport compare_directions(const std::map<FrameIndex, double>& totals, const std::vector<LabeledPair>& kept,
                              std::size_t excluded_pairs = 0);
EvalReport compare_directions(const std::vector<ThreatReport>& reports, const std::vector<LabeledPair>& kept,
                              std::size_t excluded_pairs = 0);

/// key=value lines; undefined metrics are written as "undefined".
void write_eval_report(const EvalReport& report, std::ostream& out);

/// Reads the `frame,total_threat,n_people,n_edges` CSV into frame -> total.
std::map<FrameIndex, double> read_threat_csv(std::istream& in);

}  // namespace threatgraph
