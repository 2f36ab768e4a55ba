#include "threatgraph/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "threatgraph/errors.hpp"
#include "threatgraph/symmetric_eigen.hpp"

namespace threatgraph {

void validate(const GroupingConfig& c) {
  if (!(c.alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  if (!(c.tau_seconds > 0.0)) throw Error(Errc::InvalidArgument, "tau_seconds must be > 0");
  if (!(c.naive_threshold_fraction >= 0.0 && c.naive_threshold_fraction <= 1.0))
    throw Error(Errc::InvalidArgument, "naive_threshold_fraction must lie in [0,1]");
  if (c.naive_mode_max_people < 0) throw Error(Errc::InvalidArgument, "naive_mode_max_people must be >= 0");
  if (!(c.proximity_radius > 0.0)) throw Error(Errc::InvalidArgument, "proximity_radius must be > 0");
  if (c.cluster_count && *c.cluster_count < 1) throw Error(Errc::InvalidArgument, "cluster_count must be >= 1");
}

AffinityMatrix affinity_from_distance(const DistanceMatrix& distances, double alpha) {
  AffinityMatrix out{distances.ids, (-alpha * distances.d.array()).exp().matrix()};
  out.a.diagonal().setOnes();
  return out;
}

int choose_cluster_count(const Eigen::VectorXd& values) {
  const auto n = static_cast<int>(values.size());
  if (n <= 1) return n;
  const int k_max = std::min(n, kMaxAutoClusters);
  int best_k = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    // Affinities from distances form a positive definite kernel, so the
    // normalized Laplacian spectrum lies in [0, 1]; 1 closes the last gap.
    const double upper = k < n ? values(k) : 1.0;
    const double gap = upper - values(k - 1);
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  return best_k;
}

std::vector<int> deterministic_kmeans(const Eigen::MatrixXd& rows, int k) {
  const auto n = rows.rows();
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  if (n == 0 || k <= 1) return labels;

  std::vector<Eigen::Index> seeds{0};
  Eigen::VectorXd nearest = (rows.rowwise() - rows.row(0)).rowwise().squaredNorm();
  while (static_cast<int>(seeds.size()) < k) {
    Eigen::Index pick = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (nearest(i) > nearest(pick)) pick = i;
    seeds.push_back(pick);
    nearest = nearest.cwiseMin((rows.rowwise() - rows.row(pick)).rowwise().squaredNorm());
  }
  Eigen::MatrixXd centers(k, rows.cols());
  for (int c = 0; c < k; ++c) centers.row(c) = rows.row(seeds[static_cast<std::size_t>(c)]);

  for (int iter = 0; iter < 100; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (rows.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (rows.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = best;
    }
    Eigen::MatrixXd updated = centers;
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += rows.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) updated.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    const double moved = (updated - centers).rowwise().norm().maxCoeff();
    centers = updated;
    if (moved < 1e-9) break;
  }
  return labels;
}

ClusterAssignment spectral_cluster(const AffinityMatrix& affinity, std::optional<int> k, FrameIndex frame) {
  ClusterAssignment out;
  out.frame = frame;
  const auto n = static_cast<Eigen::Index>(affinity.ids.size());
  if (n == 0) return out;
  if (n == 1) {
    out.labels.emplace(affinity.ids.front(), 0);
    out.cluster_count = 1;
    return out;
  }

  const Eigen::VectorXd inv_sqrt_degree = affinity.a.rowwise().sum().array().rsqrt();
  const Eigen::MatrixXd laplacian = Eigen::MatrixXd::Identity(n, n) -
                                    inv_sqrt_degree.asDiagonal() * affinity.a * inv_sqrt_degree.asDiagonal();
  const SymmetricEigen eig = jacobi_eigen(laplacian);

  const int clusters = k ? std::clamp(*k, 1, static_cast<int>(n)) : choose_cluster_count(eig.values);
  Eigen::MatrixXd embedding = eig.vectors.leftCols(clusters);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  const std::vector<int> raw = deterministic_kmeans(embedding, clusters);

  std::map<int, int> relabel;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int raw_label = raw[static_cast<std::size_t>(i)];
    auto it = relabel.try_emplace(raw_label, static_cast<int>(relabel.size())).first;
    out.labels.emplace(affinity.ids[static_cast<std::size_t>(i)], it->second);
  }
  out.cluster_count = static_cast<int>(relabel.size());
  return out;
}

long persistence_frames(const GroupingConfig& config, double fps) {
  const double frames = std::round(config.tau_seconds * fps);
  if (frames >= static_cast<double>(std::numeric_limits<long>::max())) return std::numeric_limits<long>::max();
  return std::max(1L, static_cast<long>(frames));
}

GroupState update_groups(GroupState state, const ClusterAssignment& assignment, const DistanceMatrix& distances,
                         const GroupingConfig& config, double fps) {
  if (assignment.frame <= state.last_frame)
    throw Error(Errc::OutOfOrderFrame, "frame " + std::to_string(assignment.frame) + " after " +
                                           std::to_string(state.last_frame));
  state.last_frame = assignment.frame;
  const long window = persistence_frames(config, fps);
  const auto n = distances.ids.size();
  const bool naive = static_cast<long>(n) <= config.naive_mode_max_people;

  std::set<PairKey> visible;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const PersonId a = distances.ids[i], b = distances.ids[j];
      const PairKey key(a, b);
      visible.insert(key);
      const long observed = ++state.frames_observed[key];
      long& near = state.proximity_counts[key];
      if (distances.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= config.proximity_radius) ++near;

      const auto la = assignment.labels.find(a), lb = assignment.labels.find(b);
      const bool together = la != assignment.labels.end() && lb != assignment.labels.end() && la->second == lb->second;
      long& run = state.run_lengths[key];
      run = together ? run + 1 : 0;

      if (state.confirmed.count(key)) continue;
      const bool confirm =
          naive ? observed >= window &&
                      static_cast<double>(near) / static_cast<double>(observed) >= config.naive_threshold_fraction - 1e-12
                : run >= window;
      if (confirm) state.confirmed.emplace(key, assignment.frame);
    }
  }
  for (auto& [key, run] : state.run_lengths)
    if (!visible.count(key)) run = 0;
  return state;
}

int group_indicator(const ConfirmedGroups& confirmed, PersonId i, PersonId j) {
  if (i == j) return 0;
  return confirmed.count(PairKey(i, j)) ? 1 : 0;
}

int group_indicator(const GroupState& state, PersonId i, PersonId j) { return group_indicator(state.confirmed, i, j); }

}  // namespace threatgraph
