// threatgraph: run | eval | synth | render
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "threatgraph/config.hpp"
#include "threatgraph/errors.hpp"
#include "threatgraph/eval.hpp"
#include "threatgraph/heatmap.hpp"
#include "threatgraph/pipeline.hpp"
#include "threatgraph/scenario.hpp"
#include "threatgraph/threat.hpp"

namespace tg = threatgraph;
namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw tg::Error(tg::Errc::IoFailure, std::string(what) + " file not found: " + path.string());
}

int cmd_run(const tg::RunManifest& manifest) {
  const auto result = tg::run_pipeline(manifest);
  tg::write_summary(result.summary, std::cout);
  std::cout << "outputs=" << manifest.out_dir.string() << '\n';
  return 0;
}

struct EvalArgs {
  tg::RunManifest manifest;
  std::optional<fs::path> threat_csv;
  std::optional<fs::path> out;
};

int cmd_eval(const EvalArgs& args) {
  // Label scoring needs no stream geometry, so W/H/fps are only required
  // when detections are scored.
  tg::RunConfig config = args.manifest.config ? tg::parse_config(*args.manifest.config) : tg::RunConfig{};
  for (const auto& o : args.manifest.overrides) tg::apply_override(config, o);
  if (args.manifest.ground_truth) tg::validate(config);
  else if (!(config.majority_threshold >= 0.0 && config.majority_threshold <= 1.0))
    throw tg::Error(tg::Errc::BadConfig, "majority_threshold must lie in [0,1]");
  std::ofstream file;
  if (args.out) {
    file.open(*args.out);
    if (!file) throw tg::Error(tg::Errc::IoFailure, "cannot write " + args.out->string());
  }
  std::ostream& out = args.out ? file : std::cout;
  bool did_something = false;

  if (args.manifest.labels) {
    if (!args.threat_csv) throw tg::Error(tg::Errc::InvalidArgument, "--labels needs --threat <threat.csv>");
    std::ifstream in(*args.threat_csv);
    if (!in) throw tg::Error(tg::Errc::IoFailure, "cannot open " + args.threat_csv->string());
    const auto totals = tg::read_threat_csv(in);
    const auto filtered = tg::filter_by_majority(tg::parse_labels(*args.manifest.labels), config.majority_threshold);
    tg::write_eval_report(tg::compare_directions(totals, filtered.kept, filtered.excluded), out);
    did_something = true;
  }
  if (args.manifest.ground_truth) {
    if (args.manifest.detections.empty()) throw tg::Error(tg::Errc::InvalidArgument, "--ground-truth needs --detections");
    const auto bundles = tg::parse_detection_stream(args.manifest.detections, config.stream);
    const auto truth = tg::parse_ground_truth(*args.manifest.ground_truth, config.stream);
    std::vector<tg::ScoredBox> dets, gts;
    std::vector<tg::DetectionRecord> faces;
    for (const auto& b : bundles) {
      for (const auto& p : b.persons) dets.push_back({p.frame, p.box()});
      faces.insert(faces.end(), b.faces.begin(), b.faces.end());
    }
    for (const auto& g : truth)
      if (g.record.kind == tg::Kind::person) gts.push_back({g.record.frame, g.record.box()});
    auto metric = [](const std::optional<double>& m) { return m ? std::to_string(*m) : std::string("undefined"); };
    out << "ap_person=" << metric(tg::compute_ap(dets, gts, config.ap_iou_threshold)) << '\n';
    const auto per_class = tg::mask_average_precision(faces, truth, config.ap_iou_threshold);
    for (const auto& [label, ap] : per_class) out << "ap_" << label << '=' << metric(ap) << '\n';
    const auto mean = tg::compute_map(per_class);
    out << "map_mask=" << mean.value << '\n';
    for (const auto& u : mean.undefined_classes) std::cerr << "warning: AP undefined for class " << u << '\n';
    did_something = true;
  }
  if (!did_something) throw tg::Error(tg::Errc::InvalidArgument, "eval needs --labels/--threat or --detections/--ground-truth");
  return 0;
}

int cmd_synth(const tg::RunManifest& manifest, const fs::path& scenario_path) {
  require_file(scenario_path, "scenario");
  require_file(manifest.calibration, "calibration");
  const tg::RunConfig config = tg::load_config(manifest);
  const auto points = tg::parse_calibration(manifest.calibration);
  const auto calib = tg::fit_transform(points.image, points.floor, config.transform_mode);
  const auto scenario = tg::parse_scenario(scenario_path);
  const auto output = tg::generate_scenario(scenario, calib, config.stream);
  tg::write_synthetic_output(output, manifest.out_dir);
  std::cout << "frames=" << scenario.frames << "\nbundles=" << output.detections.size()
            << "\noutputs=" << manifest.out_dir.string() << '\n';
  return 0;
}

struct RenderArgs {
  fs::path matrix;
  long long frame = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool invert = false;
  fs::path out;
};

int cmd_render(const RenderArgs& args) {
  require_file(args.matrix, "matrix");
  std::ifstream in(args.matrix);
  const auto blocks = tg::read_matrix_blocks(in);
  for (const auto& block : blocks) {
    if (block.frame != args.frame) continue;
    tg::render_heatmap(block.values, {args.lo, args.hi}, args.out, args.invert ? tg::Shading::inverted : tg::Shading::direct);
    return 0;
  }
  throw tg::Error(tg::Errc::MissingFrame, "frame " + std::to_string(args.frame) + " not in " + args.matrix.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal interaction graphs and transmission threat from detection streams"};
  app.require_subcommand(1);

  tg::RunManifest run_manifest;
  std::string run_config, run_labels, run_truth;
  auto* run = app.add_subcommand("run", "process a detection stream into threat, graph and matrix outputs");
  run->add_option("--detections", run_manifest.detections, "detection CSV")->required();
  run->add_option("--calibration", run_manifest.calibration, "4-point calibration file")->required();
  run->add_option("--config", run_config, "key=value config file");
  run->add_option("--out", run_manifest.out_dir, "output directory")->required();
  run->add_option("--labels", run_labels, "frame-pair label CSV");
  run->add_option("--ground-truth", run_truth, "ground-truth detection CSV with class column");
  run->add_option("--set", run_manifest.overrides, "override a config key (key=value)");

  EvalArgs eval_args;
  std::string eval_config, eval_labels, eval_truth, eval_threat, eval_out, eval_detections;
  auto* eval = app.add_subcommand("eval", "score threat directions or detection AP");
  eval->add_option("--labels", eval_labels, "frame-pair label CSV");
  eval->add_option("--threat", eval_threat, "threat.csv from a previous run");
  eval->add_option("--detections", eval_detections, "detection CSV");
  eval->add_option("--ground-truth", eval_truth, "ground-truth CSV");
  eval->add_option("--config", eval_config, "key=value config file");
  eval->add_option("--set", eval_args.manifest.overrides, "override a config key (key=value)");
  eval->add_option("--out", eval_out, "write the report here instead of stdout");

  tg::RunManifest synth_manifest;
  std::string synth_config;
  fs::path scenario_path;
  auto* synth = app.add_subcommand("synth", "generate a synthetic detection stream from a scripted scene");
  synth->add_option("--scenario", scenario_path, "scenario JSON")->required();
  synth->add_option("--calibration", synth_manifest.calibration, "4-point calibration file")->required();
  synth->add_option("--config", synth_config, "key=value config file");
  synth->add_option("--out", synth_manifest.out_dir, "output directory")->required();
  synth->add_option("--set", synth_manifest.overrides, "override a config key (key=value)");

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "render one frame of an activity-matrix CSV as a PGM heatmap");
  render->add_option("--matrix", render_args.matrix, "matrix CSV from a run")->required();
  render->add_option("--frame", render_args.frame, "frame index")->required();
  render->add_option("--lo", render_args.lo, "value mapped to black");
  render->add_option("--hi", render_args.hi, "value mapped to white");
  render->add_flag("--invert", render_args.invert, "render low values bright (distance maps)");
  render->add_option("--out", render_args.out, "output .pgm path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto opt = [](const std::string& s) -> std::optional<fs::path> {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
  };

  try {
    if (*run) {
      run_manifest.config = opt(run_config);
      run_manifest.labels = opt(run_labels);
      run_manifest.ground_truth = opt(run_truth);
      return cmd_run(run_manifest);
    }
    if (*eval) {
      eval_args.manifest.config = opt(eval_config);
      eval_args.manifest.labels = opt(eval_labels);
      eval_args.manifest.ground_truth = opt(eval_truth);
      eval_args.manifest.detections = eval_detections;
      eval_args.threat_csv = opt(eval_threat);
      eval_args.out = opt(eval_out);
      return cmd_eval(eval_args);
    }
    if (*synth) {
      synth_manifest.config = opt(synth_config);
      return cmd_synth(synth_manifest, scenario_path);
    }
    if (*render) return cmd_render(render_args);
  } catch (const tg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
