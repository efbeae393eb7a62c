#include "faceseg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "faceseg/annotation_server.hpp"
#include "faceseg/augment.hpp"
#include "faceseg/evaluation.hpp"
#include "faceseg/png_io.hpp"

namespace faceseg::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AugmentArgs {
  std::string manifest;
  std::string out;
  double sigma = 0;
  std::vector<std::string> types{"sunglasses"};
  double theta = 5.0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool strict = false;
  std::size_t base_size = 0;
  double focal = 250;
  double sunglasses_scale = 1.0;
};

struct EvalArgs {
  std::string gt;
  std::string pred;
  std::string out;
  std::string tag = "run";
  double sigma = 0;
  bool include_absent = false;
};

struct StatsArgs {
  std::string manifest;
  std::string labels;
  std::string out;
  double theta = 5.0;
  double focal = 250;
};

struct SplitArgs {
  std::string manifest;
  std::string out;
  double val_fraction = 0.10;
  std::vector<std::string> constrain;
  std::uint64_t seed = 0;
};

struct SuperpixelArgs {
  std::string image;
  std::string manifest;
  std::string out;
  int k = 550;
  double compactness = 10.0;
  int iters = 10;
};

struct ServeArgs {
  std::string manifest;
  std::string out = "annotation_work";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui;
  int k = 550;
  double compactness = 10.0;
};

json echo_options(const CLI::App& sub) {
  json opts = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name == "--help" || name == "--config") continue;
    const auto key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    if (opt->get_expected_max() == 0) {
      opts[key] = opt->count() > 0;
    } else if (!opt->results().empty()) {
      opts[key] = opt->get_expected_max() > 1 ? json(opt->results()) : json(opt->results().back());
    } else {
      opts[key] = opt->get_default_str();
    }
  }
  return opts;
}

void write_run_config(const fs::path& out_dir, const CLI::App& sub) {
  fs::create_directories(out_dir);
  write_json_file(out_dir / "run_config.json", {{"subcommand", sub.get_name()}, {"options", echo_options(sub)}});
}

void write_text(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Manifest require_manifest(const std::string& path) {
  if (path.empty()) throw UsageError("--manifest is required");
  Manifest m = load_manifest(path);
  const ManifestSummary summary = validate_manifest(m);
  if (!summary.valid()) {
    std::string msg = "invalid manifest " + path + ":";
    for (const auto& v : summary.violations) msg += "\n  " + v;
    throw UsageError(msg);
  }
  return m;
}

std::set<std::string> png_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") names.insert(e.path().filename().string());
  }
  return names;
}

int cmd_augment(const AugmentArgs& a, const CLI::App& sub, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Manifest manifest = require_manifest(a.manifest);
  PlanRequest req;
  req.sigma = a.sigma;
  req.seed = a.seed;
  req.match.theta_deg = a.theta;
  req.camera.focal = a.focal;
  if (a.base_size > 0) req.base_size = a.base_size;
  for (const auto& t : a.types) req.types.push_back(asset_kind_from_string(t));
  if (req.types.empty()) throw UsageError("--types needs at least one occluder type");

  const fs::path out_dir = a.out;
  write_run_config(out_dir, sub);
  const AugmentationPlan plan = plan_augmentation(manifest, req);
  write_json_file(out_dir / "plan.json", plan_to_json(plan));

  AugmentOptions opts;
  opts.out_dir = out_dir;
  opts.workers = a.workers;
  opts.sunglasses_k = a.sunglasses_scale;
  const BatchResult result = augment_batch(plan, manifest, opts);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json report = report_to_json(result.report);
  report["wall_time_s"] = wall;
  write_json_file(out_dir / "report.json", report);

  out << "jobs: " << result.report.attempted << " attempted, " << result.report.succeeded << " succeeded, "
      << result.report.failures.size() << " failed\n";
  for (const auto& f : result.report.failures) {
    out << "  job " << f.job_index << " (" << f.face_id << " + " << f.asset_id << "): " << f.message << "\n";
  }
  return a.strict && !result.report.failures.empty() ? kExitJobFailure : kExitOk;
}

int cmd_eval(const EvalArgs& a, const CLI::App& sub, std::ostream& out) {
  const auto gt = png_names(a.gt);
  const auto pred = png_names(a.pred);
  for (const auto& n : gt) {
    if (!pred.count(n)) throw UsageError("missing prediction file: " + (fs::path(a.pred) / n).string());
  }
  for (const auto& n : pred) {
    if (!gt.count(n)) throw UsageError("prediction without ground truth: " + (fs::path(a.pred) / n).string());
  }
  if (gt.empty()) throw UsageError("no PNG label maps in " + a.gt);

  const fs::path out_dir = a.out;
  write_run_config(out_dir, sub);
  ConfusionMatrix conf;
  for (const auto& n : gt) {
    accumulate(conf, load_label_map(fs::path(a.gt) / n), load_label_map(fs::path(a.pred) / n));
  }
  const MetricsReport m =
      metrics(conf, a.include_absent ? AbsentClassPolicy::kIncludeAsZero : AbsentClassPolicy::kExclude);

  // Rows from earlier runs in the same directory are kept so gains accumulate.
  ReportTable table = metrics_table(m, a.tag, a.sigma);
  const fs::path csv_path = out_dir / "report.csv";
  if (fs::exists(csv_path)) {
    ReportTable prior = parse_report_csv(read_text(csv_path));
    if (prior.columns == table.columns) {
      std::vector<ReportRow> rows;
      for (auto& r : prior.rows) {
        if (!(r.tag == a.tag && r.sigma == a.sigma)) rows.push_back(std::move(r));
      }
      rows.push_back(table.rows.front());
      table.rows = std::move(rows);
    }
  }
  write_text(csv_path, emit_report(table, ReportFormat::kCsv));
  write_text(out_dir / "report.md", emit_report(table, ReportFormat::kMarkdown));
  out << "images: " << gt.size() << "  pixel acc " << format_fixed2(100 * m.pixel_acc) << "  mean acc "
      << format_fixed2(100 * m.mean_acc) << "  mean IU " << format_fixed2(100 * m.mean_iu) << "  f.w. IU "
      << format_fixed2(100 * m.fw_iu) << "\n";
  return kExitOk;
}

int cmd_stats(const StatsArgs& a, const CLI::App& sub, std::ostream& out) {
  std::vector<LabelMap> maps;
  std::optional<Manifest> manifest;
  if (!a.labels.empty()) {
    for (const auto& n : png_names(a.labels)) maps.push_back(load_label_map(fs::path(a.labels) / n));
  } else if (!a.manifest.empty()) {
    manifest = require_manifest(a.manifest);
    for (const auto& r : manifest->records) {
      if (r.label_path) maps.push_back(load_label_map(manifest->resolve(*r.label_path)));
    }
  } else {
    throw UsageError("stats needs --labels or --manifest");
  }
  if (maps.empty()) throw UsageError("no label maps found");

  const fs::path out_dir = a.out;
  write_run_config(out_dir, sub);
  write_text(out_dir / "stats.csv", class_stats_csv(class_stats(maps)));
  out << "label maps: " << maps.size() << "\n";

  if (manifest && std::any_of(manifest->assets.begin(), manifest->assets.end(),
                              [](const AssetRecord& r) { return r.kind == AssetKind::kHand; })) {
    Camera cam;
    cam.focal = a.focal;
    const auto matches = hand_matches(*manifest, PoseMatchConfig{a.theta}, cam);
    const auto hist = hand_usage_histogram(matches);
    std::ostringstream csv;
    csv << "hands_per_face,faces\n";
    for (const auto& [bin, faces] : hist) csv << bin << "," << faces << "\n";
    write_text(out_dir / "hand_usage.csv", csv.str());
    out << "pose-matched face/hand cases: " << total_cases(hist) << "\n";
  }
  return kExitOk;
}

int cmd_split(const SplitArgs& a, const CLI::App& sub, std::ostream& out) {
  const Manifest manifest = require_manifest(a.manifest);
  SplitSpec spec;
  spec.val_fraction = a.val_fraction;
  spec.seed = a.seed;
  for (const auto& c : a.constrain) {
    SplitConstraint sc;
    const auto eq = c.find('=');
    sc.tag = face_tag_from_string(c.substr(0, eq));
    if (eq != std::string::npos) {
      try {
        sc.count_to_val = std::stoul(c.substr(eq + 1));
      } catch (const std::exception&) {
        throw UsageError("bad --constrain count in '" + c + "'");
      }
    }
    spec.constraints.push_back(sc);
  }
  const Manifest split = make_split(manifest, spec);
  const fs::path out_dir = a.out;
  write_run_config(out_dir, sub);
  const json doc = split_to_json(split);
  write_json_file(out_dir / "split.json", doc);
  out << "train: " << doc.at("train_count").get<std::size_t>() << "  val: " << doc.at("val_count").get<std::size_t>()
      << "\n";
  return kExitOk;
}

int cmd_superpixel(const SuperpixelArgs& a, const CLI::App& sub, std::ostream& out) {
  std::vector<std::pair<std::string, fs::path>> inputs;
  if (!a.image.empty()) {
    inputs.emplace_back(fs::path(a.image).stem().string(), a.image);
  } else if (!a.manifest.empty()) {
    const Manifest m = require_manifest(a.manifest);
    for (const auto& r : m.records) inputs.emplace_back(r.id, m.resolve(r.image_path));
  } else {
    throw UsageError("superpixel needs --image or --manifest");
  }
  if (a.k <= 0 || a.iters < 0 || a.compactness <= 0) throw UsageError("--k, --compactness must be positive");
  const fs::path out_dir = a.out;
  write_run_config(out_dir, sub);
  const SLICParams params{a.k, a.compactness, a.iters};
  for (const auto& [stem, path] : inputs) {
    const SuperpixelMap map = slic(png::load_rgb(path), params);
    save_segments(out_dir / (stem + ".png"), map);
    Mask edges = boundaries(map);
    for (auto& v : edges.data()) v = v ? 255 : 0;
    png::write_bytes(out_dir / (stem + ".boundaries.png"), png::encode_gray8(edges));
    out << stem << ": " << map.segment_count << " segments\n";
  }
  return kExitOk;
}

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const ServeArgs& a, const CLI::App& sub, std::ostream& out) {
  Manifest manifest = require_manifest(a.manifest);
  ServerConfig cfg;
  cfg.host = a.host;
  cfg.port = a.port;
  cfg.workdir = a.out;
  cfg.slic.k = a.k;
  cfg.slic.compactness = a.compactness;
  if (!a.ui.empty()) cfg.ui_dir = fs::path(a.ui);
  write_run_config(cfg.workdir, sub);
  AnnotationServer server(std::move(manifest), cfg);
  const int port = server.bind();
  out << "listening on " << a.host << ":" << port << "\n";
  out << "ready" << std::endl;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Occluder augmentation, superpixel annotation and evaluation for face segmentation", "faceseg"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Plan and render occluder-augmented samples");
  augment->add_option("--manifest", aug.manifest, "Dataset manifest (JSON)")->required();
  augment->add_option("--out", aug.out, "Output directory")->required();
  augment->add_option("--sigma", aug.sigma, "Augmentation ratio")->check(CLI::NonNegativeNumber)->capture_default_str();
  augment->add_option("--types", aug.types, "Occluder types: sunglasses, mouth-mask, hand")
      ->delimiter(',')
      ->capture_default_str();
  augment->add_option("--theta", aug.theta, "Pose matching threshold in degrees")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment->add_option("--seed", aug.seed, "Global seed")->capture_default_str();
  augment->add_option("--workers", aug.workers, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  augment->add_flag("--strict", aug.strict, "Exit 1 when any job fails");
  augment->add_option("--base-size", aug.base_size, "Training set size N (default: manifest size)");
  augment->add_option("--focal", aug.focal, "Focal length in pixels for pose estimation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment->add_option("--sunglasses-scale", aug.sunglasses_scale, "Sunglasses size factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score predicted label maps against ground truth");
  eval->add_option("--gt", ev.gt, "Ground-truth label directory")->required();
  eval->add_option("--pred", ev.pred, "Prediction label directory")->required();
  eval->add_option("--out", ev.out, "Report directory")->required();
  eval->add_option("--tag", ev.tag, "Row tag")->capture_default_str();
  eval->add_option("--sigma", ev.sigma, "Augmentation ratio of the evaluated model")->capture_default_str();
  eval->add_flag("--include-absent", ev.include_absent, "Count classes absent from ground truth as zero");

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Per-class appearance frequency and area statistics");
  stats->add_option("--manifest", st.manifest, "Dataset manifest");
  stats->add_option("--labels", st.labels, "Directory of label maps (overrides --manifest)");
  stats->add_option("--out", st.out, "Output directory")->required();
  stats->add_option("--theta", st.theta, "Pose matching threshold in degrees")->capture_default_str();
  stats->add_option("--focal", st.focal, "Focal length in pixels")->capture_default_str();

  SplitArgs sp;
  auto* split = app.add_subcommand("split", "Train/validation split");
  split->add_option("--manifest", sp.manifest, "Dataset manifest")->required();
  split->add_option("--out", sp.out, "Output directory")->required();
  split->add_option("--val-fraction", sp.val_fraction, "Validation fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  split->add_option("--constrain", sp.constrain, "tag[=count] sent to validation (default half)");
  split->add_option("--seed", sp.seed, "Seed")->capture_default_str();

  SuperpixelArgs sx;
  auto* superpixel = app.add_subcommand("superpixel", "Compute SLIC superpixel maps");
  superpixel->add_option("--image", sx.image, "Single RGB image");
  superpixel->add_option("--manifest", sx.manifest, "All record images of a manifest");
  superpixel->add_option("--out", sx.out, "Output directory")->required();
  superpixel->add_option("--k", sx.k, "Target segment count")->capture_default_str();
  superpixel->add_option("--compactness", sx.compactness, "Colour/space trade-off")->capture_default_str();
  superpixel->add_option("--iters", sx.iters, "Maximum iterations")->capture_default_str();

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve->add_option("--manifest", sv.manifest, "Dataset manifest")->required();
  serve->add_option("--out", sv.out, "Work directory for sessions and superpixels")->capture_default_str();
  serve->add_option("--host", sv.host, "Bind address")->capture_default_str();
  serve->add_option("--port", sv.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--ui", sv.ui, "Static front-end directory");
  serve->add_option("--k", sv.k, "SLIC target segment count")->capture_default_str();
  serve->add_option("--compactness", sv.compactness, "SLIC compactness")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (augment->parsed()) return cmd_augment(aug, *augment, out);
    if (eval->parsed()) return cmd_eval(ev, *eval, out);
    if (stats->parsed()) return cmd_stats(st, *stats, out);
    if (split->parsed()) return cmd_split(sp, *split, out);
    if (superpixel->parsed()) return cmd_superpixel(sx, *superpixel, out);
    if (serve->parsed()) return cmd_serve(sv, *serve, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace faceseg::cli
