#pragma once

// Affinity, per-frame spectral clustering, and persistence-based social
// group confirmation.

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "threatgraph/geometry.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

struct GroupingConfig {
  double alpha = 0.25;            // 1/m
  double tau_seconds = 10.0;
  double naive_threshold_fraction = 0.20;
  int naive_mode_max_people = 6;
  double proximity_radius = 1.0;  // m
  std::optional<int> cluster_count;  // nullopt = eigengap
};

/// Throws Error(InvalidArgument) on non-positive alpha/tau/radius or a
/// fraction outside [0, 1].
void validate(const GroupingConfig& config);

struct AffinityMatrix {
  std::vector<PersonId> ids;
  Eigen::MatrixXd a;
};

AffinityMatrix affinity_from_distance(const DistanceMatrix& distances, double alpha);

struct ClusterAssignment {
  FrameIndex frame = 0;
  std::map<PersonId, int> labels;
  int cluster_count = 0;
};

inline constexpr int kMaxAutoClusters = 8;

/// Normalized-Laplacian spectral clustering with deterministic k-means.
/// Labels are contiguous from 0, numbered in order of first appearance in
/// `affinity.ids`.
ClusterAssignment spectral_cluster(const AffinityMatrix& affinity, std::optional<int> k = std::nullopt,
                                   FrameIndex frame = 0);

/// Eigengap choice of k over [1, min(n, kMaxAutoClusters)] from ascending
/// normalized-Laplacian eigenvalues.
int choose_cluster_count(const Eigen::VectorXd& ascending_eigenvalues);

/// Deterministic k-means: farthest-point seeding from row 0, ties to the lowest
/// index, at most 100 iterations, stops once no center moves more than 1e-9.
std::vector<int> deterministic_kmeans(const Eigen::MatrixXd& rows, int k);

/// Pair -> frame at which the pair was confirmed.
using ConfirmedGroups = std::map<PairKey, FrameIndex>;

struct GroupState {
  std::map<PairKey, long> run_lengths;
  ConfirmedGroups confirmed;
  std::map<PairKey, long> proximity_counts;
  std::map<PairKey, long> frames_observed;
  FrameIndex last_frame = -1;
};

/// Frames of consecutive co-membership that confirm a group: round(tau * fps).
long persistence_frames(const GroupingConfig& config, double fps);

/// Advances the group state by one frame. `distances` must list the same
/// persons as `assignment`. Throws OutOfOrderFrame.
GroupState update_groups(GroupState state, const ClusterAssignment& assignment, const DistanceMatrix& distances,
                         const GroupingConfig& config, double fps);

/// 1 if the pair is a confirmed group, else 0.
int group_indicator(const GroupState& state, PersonId i, PersonId j);
int group_indicator(const ConfirmedGroups& confirmed, PersonId i, PersonId j);

}  // namespace threatgraph
