// SPDX-License-Identifier: MIT

#include <fusetrack/cli.h>

#include <fusetrack/config.h>
#include <fusetrack/metrics.h>
#include <fusetrack/synthetic_scene.h>
#include <fusetrack/tracker.h>
#include <fusetrack/trajectory_io.h>
#include <fusetrack/viewpoint_model.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <optional>

namespace fusetrack {

namespace {

namespace fs = std::filesystem;

std::string FramePath(const fs::path &dir, const char *prefix, int frame,
                      const char *extension) {
  char name[64];
  std::snprintf(name, sizeof name, "%s_%06d.%s", prefix, frame, extension);
  return (dir / name).string();
}

int CountFrames(const fs::path &dir) {
  if (dir.empty()) throw std::runtime_error("[io] frames_dir is not set");
  int n = 0;
  while (fs::exists(FramePath(dir, "color", n, "ppm"))) ++n;
  if (n == 0)
    throw std::runtime_error("no color_000000.ppm in " + dir.string());
  return n;
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot write " + path.string());
  stream << text;
  if (!stream) throw std::runtime_error("failed writing " + path.string());
}

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
};

RunConfig LoadRunConfig(const CommonOptions &options) {
  RunConfig config = LoadConfig(options.config_path);
  if (!options.output_dir.empty())
    config.output_dir = fs::absolute(options.output_dir).lexically_normal();
  if (options.seed) {
    config.seed = *options.seed;
    config.model.seed = *options.seed;
  }
  if (config.output_dir.empty())
    throw ConfigError("io", "output_dir", "missing output directory");
  fs::create_directories(config.output_dir);
  return config;
}

void WriteManifest(const RunConfig &config) {
  WriteText(config.output_dir / kManifestName, FormatConfig(config));
}

SparseViewpointModel ObtainModel(const RunConfig &config) {
  if (!config.model_path.empty()) return LoadModel(config.model_path);
  if (config.mesh_path.empty())
    throw ConfigError("model", "model", "neither model nor mesh is set");
  ModelConfig model_config = config.model;
  model_config.n_threads = ThreadsFromEnvironment();
  return GenerateModel(LoadMesh(config.mesh_path), model_config);
}

Trajectory RequireInitialPoses(const RunConfig &config) {
  if (config.initial_poses_path.empty())
    throw ConfigError("io", "initial_poses", "missing initial pose file");
  Trajectory poses = LoadTrajectory(config.initial_poses_path);
  if (poses.empty())
    throw std::runtime_error("initial pose file is empty: " +
                             config.initial_poses_path.string());
  return poses;
}

int GenerateModelCommand(const CommonOptions &options, std::ostream &out) {
  RunConfig config = LoadRunConfig(options);
  if (config.mesh_path.empty())
    throw ConfigError("model", "mesh", "missing mesh path");
  ModelConfig model_config = config.model;
  model_config.n_threads = ThreadsFromEnvironment();
  SparseViewpointModel model =
      GenerateModel(LoadMesh(config.mesh_path), model_config);
  config.model_path = config.output_dir / "model.bin";
  SaveModel(config.model_path, model);
  WriteManifest(config);
  out << "views=" << model.views.size() << '\n'
      << "model=" << config.model_path.string() << '\n';
  return 0;
}

int GenerateSceneCommand(const CommonOptions &options, std::ostream &out) {
  RunConfig config = LoadRunConfig(options);
  if (config.mesh_path.empty())
    throw ConfigError("model", "mesh", "missing mesh path");
  SyntheticScene scene{config.MakeSceneConfig(LoadMesh(config.mesh_path))};
  const fs::path &dir = config.output_dir;
  for (int frame = 0; frame < scene.n_frames(); ++frame) {
    SyntheticFrame rendered = scene.RenderFrame(frame);
    WritePpm(FramePath(dir, "color", frame, "ppm"), rendered.color);
    WriteDepthPgm(FramePath(dir, "depth", frame, "pgm"), rendered.depth);
  }
  config.frames_dir = dir;
  config.initial_poses_path = dir / "ground_truth.txt";
  SaveTrajectory(config.initial_poses_path, scene.ground_truth());
  WriteManifest(config);
  out << "frames=" << scene.n_frames() << '\n';
  return 0;
}

int TrackCommand(const CommonOptions &options, bool refine,
                 std::ostream &out) {
  RunConfig config = LoadRunConfig(options);
  if (refine) config.mode = TrackerMode::kRefinement;
  SparseViewpointModel model = ObtainModel(config);
  Trajectory initial = RequireInitialPoses(config);
  const int n_frames = CountFrames(config.frames_dir);
  Tracker tracker{model, config.tracker, config.color_camera,
                  config.depth_camera};

  Trajectory result;
  std::string timing =
      "frame,lines_ms,points_ms,derivatives_ms,histogram_ms,other_ms,"
      "total_ms,lines,points,lost\n";
  std::map<int, Pose> initial_by_frame;
  for (const auto &entry : initial) initial_by_frame[entry.frame_index] = entry.pose;
  int n_lost = 0;
  for (int frame = 0; frame < n_frames; ++frame) {
    ColorImage color = ReadPpm(FramePath(config.frames_dir, "color", frame, "ppm"));
    DepthImage depth =
        ReadDepthPgm(FramePath(config.frames_dir, "depth", frame, "pgm"));
    FrameReport report;
    if (config.mode == TrackerMode::kRefinement) {
      auto it = initial_by_frame.find(frame);
      if (it == initial_by_frame.end()) continue;
      report = tracker.RefinePose(color, depth, it->second);
    } else {
      if (frame == 0) {
        auto it = initial_by_frame.find(0);
        const Pose &start =
            it != initial_by_frame.end() ? it->second : initial.front().pose;
        tracker.Initialize(start, color, depth);
      }
      report = tracker.TrackFrame(color, depth);
    }
    result.push_back({frame, report.pose});
    n_lost += report.lost ? 1 : 0;
    const TimingBreakdown &t = report.timing;
    char row[256];
    std::snprintf(row, sizeof row, "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d,%d\n",
                  frame, 1e3 * t.lines, 1e3 * t.points, 1e3 * t.derivatives,
                  1e3 * t.histogram, 1e3 * t.other, 1e3 * t.Total(),
                  report.n_lines.empty() ? 0 : report.n_lines.back(),
                  report.n_points.empty() ? 0 : report.n_points.back(),
                  report.lost ? 1 : 0);
    timing += row;
  }
  config.trajectory_path =
      config.output_dir / (refine ? "refined.txt" : "trajectory.txt");
  SaveTrajectory(config.trajectory_path, result);
  WriteText(config.output_dir / "timing.csv", timing);
  WriteManifest(config);
  out << "frames=" << result.size() << '\n'
      << "lost=" << n_lost << '\n'
      << "trajectory=" << config.trajectory_path.string() << '\n';
  return 0;
}

struct EvaluateOptions {
  std::string estimate;
  std::string ground_truth;
  std::string mesh;
  std::string metric = "all";
  double threshold = 0.1;
  std::string csv;
  std::string config_path;
  std::string output_dir;
};

int EvaluateCommand(const EvaluateOptions &options, std::ostream &out) {
  std::optional<RunConfig> config;
  if (!options.config_path.empty()) config = LoadConfig(options.config_path);
  Trajectory estimate = LoadTrajectory(options.estimate);
  Trajectory ground_truth = LoadTrajectory(options.ground_truth);
  CheckTrajectoryPair(estimate, ground_truth);

  const std::string &metric = options.metric;
  const bool needs_mesh = metric == "add" || metric == "adds" ||
                          metric == "auc" || metric == "auc-opt" ||
                          metric == "all";
  std::optional<TriangleMesh> mesh;
  if (needs_mesh) {
    fs::path mesh_path = options.mesh;
    if (mesh_path.empty() && config) mesh_path = config->mesh_path;
    if (mesh_path.empty())
      throw std::runtime_error("metric '" + metric + "' needs --mesh");
    mesh = LoadMesh(mesh_path);
  }

  std::vector<double> add, adds;
  std::string csv = "frame,add,adds\n";
  if (mesh) {
    for (std::size_t i = 0; i < estimate.size(); ++i) {
      add.push_back(
          AddError(mesh->vertices, estimate[i].pose, ground_truth[i].pose));
      adds.push_back(
          AddsError(mesh->vertices, estimate[i].pose, ground_truth[i].pose));
      char row[128];
      std::snprintf(row, sizeof row, "%d,%.9g,%.9g\n", estimate[i].frame_index,
                    add.back(), adds.back());
      csv += row;
    }
  }
  auto mean = [](const std::vector<double> &values) {
    double sum = 0.0;
    for (double value : values) sum += value;
    return sum / double(values.size());
  };

  std::ostringstream report;
  report.precision(9);
  report << "frames=" << estimate.size() << '\n';
  if (metric == "add" || metric == "all") report << "add=" << mean(add) << '\n';
  if (metric == "adds" || metric == "all")
    report << "adds=" << mean(adds) << '\n';
  if (metric == "auc" || metric == "all") {
    report << "auc_add=" << AucScore(add, options.threshold) << '\n'
           << "auc_adds=" << AucScore(adds, options.threshold) << '\n';
  }
  if (metric == "auc-opt" || metric == "all")
    report << "auc_opt=" << OptAucScore(add, mesh->Diameter()) << '\n';
  if (metric == "rms" || metric == "all") {
    RmsReport rms = RmsErrors(estimate, ground_truth);
    const char *names[] = {"rms_x_mm", "rms_y_mm", "rms_z_mm",
                           "rms_roll_deg", "rms_pitch_deg", "rms_yaw_deg"};
    for (int k = 0; k < 6; ++k) report << names[k] << '=' << rms.values[k] << '\n';
    report << "rms_excluded=" << rms.n_excluded << '\n';
  }
  if (metric == "rbot" || metric == "all")
    report << "rbot_success=" << RbotSuccess(estimate, ground_truth) << '\n';
  const std::set<std::string> known{"add", "adds", "auc", "auc-opt",
                                    "rms", "rbot", "all"};
  if (!known.count(metric))
    throw std::runtime_error("unknown metric '" + metric + "'");

  out << report.str();
  if (!options.csv.empty()) {
    if (!mesh) throw std::runtime_error("--csv needs a distance metric");
    WriteText(options.csv, csv);
  }
  if (!options.output_dir.empty()) {
    fs::path dir = fs::absolute(options.output_dir);
    fs::create_directories(dir);
    WriteText(dir / "evaluation.txt", report.str());
    if (config) {
      config->output_dir = dir;
      config->trajectory_path = fs::absolute(options.estimate);
      WriteManifest(*config);
    }
  }
  return 0;
}

void DrawMarker(ColorImage &image, const Vec2 &center, Rgb color) {
  int cu = int(std::floor(center.x()));
  int cv = int(std::floor(center.y()));
  for (int dv = -1; dv <= 1; ++dv)
    for (int du = -1; du <= 1; ++du)
      if (image.Contains(cu + du, cv + dv)) image.set(cu + du, cv + dv, color);
}

int OverlayCommand(const CommonOptions &options, const std::string &trajectory,
                   std::ostream &out) {
  RunConfig config = LoadRunConfig(options);
  if (!trajectory.empty())
    config.trajectory_path = fs::absolute(trajectory).lexically_normal();
  if (config.trajectory_path.empty())
    throw ConfigError("io", "trajectory", "missing trajectory to draw");
  SparseViewpointModel model = ObtainModel(config);
  Trajectory poses = LoadTrajectory(config.trajectory_path);
  int n_written = 0;
  for (const auto &entry : poses) {
    auto path = FramePath(config.frames_dir, "color", entry.frame_index, "ppm");
    if (!fs::exists(path)) continue;
    ColorImage image = ReadPpm(path);
    const Viewpoint &view = model.ClosestView(entry.pose);
    for (const auto &point : view.contour_points) {
      Vec3 camera_point = entry.pose * point.point;
      if (camera_point.z() <= 0.0) continue;
      DrawMarker(image, Project(config.color_camera, camera_point),
                 {0, 255, 0});
    }
    WritePpm(FramePath(config.output_dir, "overlay", entry.frame_index, "ppm"),
             image);
    ++n_written;
  }
  WriteManifest(config);
  out << "overlays=" << n_written << '\n';
  return 0;
}

void AddCommonOptions(CLI::App &command, CommonOptions &options) {
  command.add_option("-c,--config", options.config_path, "INI config file")
      ->required();
  command.add_option("-o,--output-dir", options.output_dir,
                     "Output directory (overrides [io] output_dir)");
  command.add_option("--seed", options.seed, "Seed (overrides [io] seed)");
}

}  // namespace

int ThreadsFromEnvironment() {
  const char *value = std::getenv("ICG_THREADS");
  if (!value || !*value) return 1;
  char *end = nullptr;
  long threads = std::strtol(value, &end, 10);
  if (*end != '\0' || threads < 1) return 1;
  return int(std::min(threads, 256L));
}

int Dispatch(const std::vector<std::string> &args, std::ostream &out,
             std::ostream &err) {
  CLI::App app{"Object tracking with region and depth correspondences",
               "fusetrack"};
  app.require_subcommand(1);

  CommonOptions model_options, scene_options, track_options, refine_options,
      overlay_options;
  EvaluateOptions evaluate_options;
  std::string overlay_trajectory;

  auto *generate_model =
      app.add_subcommand("generate-model", "Build a sparse viewpoint model");
  AddCommonOptions(*generate_model, model_options);
  auto *generate_scene =
      app.add_subcommand("generate-scene", "Render a synthetic RGB-D sequence");
  AddCommonOptions(*generate_scene, scene_options);
  auto *track = app.add_subcommand("track", "Track an object through frames");
  AddCommonOptions(*track, track_options);
  auto *refine = app.add_subcommand("refine", "Refine per-frame initial poses");
  AddCommonOptions(*refine, refine_options);
  auto *overlay =
      app.add_subcommand("overlay", "Draw projected contour points on frames");
  AddCommonOptions(*overlay, overlay_options);
  overlay->add_option("--trajectory", overlay_trajectory,
                      "Trajectory to draw (overrides [io] trajectory)");

  auto *evaluate = app.add_subcommand("evaluate", "Compute pose error metrics");
  evaluate->add_option("--estimate", evaluate_options.estimate)->required();
  evaluate->add_option("--ground-truth", evaluate_options.ground_truth)
      ->required();
  evaluate->add_option("--mesh", evaluate_options.mesh);
  evaluate->add_option("--metric", evaluate_options.metric,
                       "add | adds | auc | auc-opt | rms | rbot | all");
  evaluate->add_option("--threshold", evaluate_options.threshold,
                       "AUC threshold in meters");
  evaluate->add_option("--csv", evaluate_options.csv, "Per-frame CSV output");
  evaluate->add_option("-c,--config", evaluate_options.config_path);
  evaluate->add_option("-o,--output-dir", evaluate_options.output_dir);

  std::vector<std::string> argv_storage{"fusetrack"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &arg : argv_storage) argv.push_back(arg.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError &error) {
    err << error.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (generate_model->parsed()) return GenerateModelCommand(model_options, out);
    if (generate_scene->parsed()) return GenerateSceneCommand(scene_options, out);
    if (track->parsed()) return TrackCommand(track_options, false, out);
    if (refine->parsed()) return TrackCommand(refine_options, true, out);
    if (evaluate->parsed()) return EvaluateCommand(evaluate_options, out);
    if (overlay->parsed())
      return OverlayCommand(overlay_options, overlay_trajectory, out);
  } catch (const std::exception &error) {
    err << "error: " << error.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace fusetrack
