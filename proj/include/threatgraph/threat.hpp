#pragma once

// Pairwise and per-frame transmission threat.
//
//   T_pair = (sum of primary p_i) * prod_j (eps_j - q_j)
//   T(t)   = sum over unordered vertex pairs of T_pair
//
// With P = {p_h, p_d}, Q = {q_m, q_g}, eps_m = 2 and eps_g = 1 this is
// (p_h + p_d)(2 - q_m)(1 - q_g).

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "threatgraph/graph.hpp"
#include "threatgraph/grouping.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

enum class UnknownMaskPolicy { worst_case, neutral };
enum class MaskAggregation { min, mean };

std::string_view to_string(UnknownMaskPolicy p);
std::optional<UnknownMaskPolicy> parse_unknown_mask_policy(std::string_view token);
std::string_view to_string(MaskAggregation a);
std::optional<MaskAggregation> parse_mask_aggregation(std::string_view token);

struct ThreatParams {
  double epsilon_m = 2.0;
  double epsilon_g = 1.0;
  double proximity_threshold = 1.0;  // d0, meters
  double beta = 1.0;                 // 1/m, decay of p_d beyond d0
  UnknownMaskPolicy unknown_mask_policy = UnknownMaskPolicy::worst_case;
  MaskAggregation mask_aggregation = MaskAggregation::min;
};

/// Throws InvalidArgument unless epsilons >= 1, d0 > 0 and beta >= 0.
void validate(const ThreatParams& params);

/// 1 within d0, exp(-beta (d - d0)) beyond.
double proximity_probability(double distance, const ThreatParams& params);

struct PairFeatures {
  double p_d = 0.0;
  double p_h = 0.0;
  double q_m = 0.0;
  double q_g = 0.0;
};

/// Requires both persons to be vertices of `graph`; throws InvalidArgument otherwise.
PairFeatures pair_features(const FrameGraph& graph, const ConfirmedGroups& groups, const ThreatParams& params,
                           PersonId i, PersonId j);

struct SecondaryTerm {
  double q = 0.0;
  double epsilon = 1.0;
};

/// Generic form: arbitrary primary probabilities and secondary (q, eps) terms.
double pair_threat(std::span<const double> primaries, std::span<const SecondaryTerm> secondaries);
double pair_threat(const PairFeatures& f, const ThreatParams& params);

struct ThreatReport {
  FrameIndex frame = 0;
  std::map<PairKey, double> pair_threat;
  double total = 0.0;
  std::size_t n_edges = 0;
  std::vector<PersonId> ids;
  Eigen::MatrixXd distance;     // meters
  Eigen::MatrixXd group;        // q_g
  Eigen::MatrixXd interaction;  // edge confidence >= 0.5
  Eigen::MatrixXd threat;

  std::size_t n_people() const noexcept { return ids.size(); }
};

ThreatReport frame_threat(const FrameGraph& graph, const ConfirmedGroups& groups, const ThreatParams& params);
std::vector<ThreatReport> threat_series(const TemporalGraph& graph, const ThreatParams& params);

inline constexpr std::string_view kThreatCsvHeader = "frame,total_threat,n_people,n_edges";

void write_threat_csv(const std::vector<ThreatReport>& reports, std::ostream& out);

enum class ActivityMatrix { distance, group, interaction, threat };
std::string_view to_string(ActivityMatrix m);

const Eigen::MatrixXd& select(const ThreatReport& report, ActivityMatrix which);

/// Per-frame CSV blocks:
///   # frame <t>
///   id,<id_0>,...,<id_n-1>
///   <id_0>,<row 0 values>
///   ...
/// followed by a blank line.
void write_matrix_blocks(const std::vector<ThreatReport>& reports, ActivityMatrix which, std::ostream& out);

struct MatrixBlock {
  FrameIndex frame = 0;
  std::vector<PersonId> ids;
  Eigen::MatrixXd values;
};

/// Inverse of write_matrix_blocks. Throws MalformedLine.
std::vector<MatrixBlock> read_matrix_blocks(std::istream& in);

}  // namespace threatgraph
