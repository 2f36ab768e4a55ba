#include "threatgraph/threat.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "threatgraph/csv.hpp"
#include "threatgraph/errors.hpp"

namespace threatgraph {

std::string_view to_string(UnknownMaskPolicy p) { return p == UnknownMaskPolicy::worst_case ? "worst_case" : "neutral"; }

std::optional<UnknownMaskPolicy> parse_unknown_mask_policy(std::string_view token) {
  if (token == "worst_case") return UnknownMaskPolicy::worst_case;
  if (token == "neutral") return UnknownMaskPolicy::neutral;
  return std::nullopt;
}

std::string_view to_string(MaskAggregation a) { return a == MaskAggregation::min ? "min" : "mean"; }

std::optional<MaskAggregation> parse_mask_aggregation(std::string_view token) {
  if (token == "min") return MaskAggregation::min;
  if (token == "mean") return MaskAggregation::mean;
  return std::nullopt;
}

void validate(const ThreatParams& p) {
  if (!(p.epsilon_m >= 1.0) || !(p.epsilon_g >= 1.0)) throw Error(Errc::InvalidArgument, "epsilon values must be >= 1");
  if (!(p.proximity_threshold > 0.0)) throw Error(Errc::InvalidArgument, "proximity_threshold must be > 0");
  if (!(p.beta >= 0.0)) throw Error(Errc::InvalidArgument, "beta must be >= 0");
}

double proximity_probability(double distance, const ThreatParams& params) {
  if (distance <= params.proximity_threshold) return 1.0;
  return std::exp(-params.beta * (distance - params.proximity_threshold));
}

namespace {

double mask_value(const VertexAttributes& v, const ThreatParams& params) {
  if (v.mask) return v.mask->c_mask;
  return params.unknown_mask_policy == UnknownMaskPolicy::worst_case ? 0.0 : 0.5;
}

}  // namespace

PairFeatures pair_features(const FrameGraph& graph, const ConfirmedGroups& groups, const ThreatParams& params,
                           PersonId i, PersonId j) {
  const VertexAttributes* a = graph.find(i);
  const VertexAttributes* b = graph.find(j);
  if (!a || !b) throw Error(Errc::InvalidArgument, "pair_features: person not in frame " + std::to_string(graph.frame));
  PairFeatures f;
  f.p_d = proximity_probability(std::hypot(a->location.x - b->location.x, a->location.y - b->location.y), params);
  if (i != j) {
    if (auto e = graph.edges.find(PairKey(i, j)); e != graph.edges.end() && e->second.present) f.p_h = e->second.confidence;
  }
  const double ma = mask_value(*a, params), mb = mask_value(*b, params);
  f.q_m = params.mask_aggregation == MaskAggregation::min ? std::min(ma, mb) : 0.5 * (ma + mb);
  f.q_g = group_indicator(groups, i, j);
  return f;
}

double pair_threat(std::span<const double> primaries, std::span<const SecondaryTerm> secondaries) {
  double sum = 0.0;
  for (double p : primaries) sum += p;
  double product = 1.0;
  for (const auto& s : secondaries) product *= s.epsilon - s.q;
  return sum * product;
}

double pair_threat(const PairFeatures& f, const ThreatParams& params) {
  const double primaries[] = {f.p_h, f.p_d};
  const SecondaryTerm secondaries[] = {{f.q_m, params.epsilon_m}, {f.q_g, params.epsilon_g}};
  return pair_threat(primaries, secondaries);
}

ThreatReport frame_threat(const FrameGraph& graph, const ConfirmedGroups& groups, const ThreatParams& params) {
  ThreatReport r;
  r.frame = graph.frame;
  const auto n = static_cast<Eigen::Index>(graph.vertices.size());
  for (const auto& v : graph.vertices) r.ids.push_back(v.person_id);
  r.distance = Eigen::MatrixXd::Zero(n, n);
  r.group = Eigen::MatrixXd::Zero(n, n);
  r.interaction = Eigen::MatrixXd::Zero(n, n);
  r.threat = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [key, edge] : graph.edges) r.n_edges += edge.present != 0;

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = graph.vertices[static_cast<std::size_t>(i)];
      const auto& b = graph.vertices[static_cast<std::size_t>(j)];
      const PairFeatures f = pair_features(graph, groups, params, a.person_id, b.person_id);
      const double t = pair_threat(f, params);
      const double dist = std::hypot(a.location.x - b.location.x, a.location.y - b.location.y);
      const double interacting = f.p_h >= 0.5 ? 1.0 : 0.0;
      r.distance(i, j) = r.distance(j, i) = dist;
      r.group(i, j) = r.group(j, i) = f.q_g;
      r.interaction(i, j) = r.interaction(j, i) = interacting;
      r.threat(i, j) = r.threat(j, i) = t;
      r.pair_threat.emplace(PairKey(a.person_id, b.person_id), t);
      r.total += t;
    }
  }
  return r;
}

std::vector<ThreatReport> threat_series(const TemporalGraph& graph, const ThreatParams& params) {
  std::vector<ThreatReport> out;
  out.reserve(graph.frames.size());
  for (const auto& [t, frame] : graph.frames) out.push_back(frame_threat(frame, graph.confirmed_groups, params));
  return out;
}

void write_threat_csv(const std::vector<ThreatReport>& reports, std::ostream& out) {
  out << kThreatCsvHeader << '\n';
  for (const auto& r : reports)
    out << r.frame << ',' << csv::format_double(r.total) << ',' << r.n_people() << ',' << r.n_edges << '\n';
}

std::string_view to_string(ActivityMatrix m) {
  switch (m) {
    case ActivityMatrix::distance: return "distance";
    case ActivityMatrix::group: return "group";
    case ActivityMatrix::interaction: return "interaction";
    case ActivityMatrix::threat: return "threat";
  }
  return "?";
}

const Eigen::MatrixXd& select(const ThreatReport& report, ActivityMatrix which) {
  switch (which) {
    case ActivityMatrix::distance: return report.distance;
    case ActivityMatrix::group: return report.group;
    case ActivityMatrix::interaction: return report.interaction;
    case ActivityMatrix::threat: return report.threat;
  }
  return report.threat;
}

void write_matrix_blocks(const std::vector<ThreatReport>& reports, ActivityMatrix which, std::ostream& out) {
  for (const auto& r : reports) {
    const auto& m = select(r, which);
    out << "# frame " << r.frame << '\n' << "id";
    for (PersonId id : r.ids) out << ',' << id;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << r.ids[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << csv::format_double(m(i, j));
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<MatrixBlock> read_matrix_blocks(std::istream& in) {
  std::vector<MatrixBlock> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) { return Error(Errc::MalformedLine, what, line_no); };
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = csv::trim(line);
    if (t.empty()) continue;
    if (t.rfind("# frame ", 0) != 0) throw fail("expected '# frame <t>'");
    MatrixBlock block;
    const auto frame = csv::parse_int(csv::trim(t.substr(8)));
    if (!frame) throw fail("bad frame index");
    block.frame = *frame;
    if (!std::getline(in, line)) throw fail("missing id header");
    ++line_no;
    const auto header = csv::split(line);
    if (header.empty() || header.front() != "id") throw fail("expected id header");
    for (std::size_t k = 1; k < header.size(); ++k) {
      const auto id = csv::parse_int(header[k]);
      if (!id) throw fail("bad id");
      block.ids.push_back(*id);
    }
    const auto n = static_cast<Eigen::Index>(block.ids.size());
    block.values = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw fail("truncated matrix");
      ++line_no;
      const auto row = csv::split(line);
      if (static_cast<Eigen::Index>(row.size()) != n + 1) throw fail("row width mismatch");
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto v = csv::parse_double(row[static_cast<std::size_t>(j + 1)]);
        if (!v) throw fail("bad matrix value");
        block.values(i, j) = *v;
      }
    }
    out.push_back(std::move(block));
  }
  return out;
}

}  // namespace threatgraph
