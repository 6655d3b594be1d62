// SPDX-License-Identifier: MIT

#include <fusetrack/config.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace fusetrack {

namespace {

const std::set<std::string> kSections{"camera_color", "camera_depth", "tracker",
                                      "model",        "scene",        "io"};

std::string Trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r");
  return std::string{text.substr(begin, end - begin + 1)};
}

std::vector<std::string> SplitList(const std::string &value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream stream{value};
  while (std::getline(stream, item, ',')) items.push_back(Trim(item));
  return items;
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, error] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string{buffer, end};
}

template <typename T>
std::string FormatList(const std::vector<T> &values) {
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) text += ", ";
    if constexpr (std::is_floating_point_v<T>)
      text += FormatDouble(values[i]);
    else
      text += std::to_string(values[i]);
  }
  return text;
}

std::string FormatPose(const Pose &pose) {
  Mat4 matrix = pose.Matrix();
  std::vector<double> values;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) values.push_back(matrix(r, c));
  return FormatList(values);
}

std::string FormatRgb(const Rgb &color) {
  return FormatList(std::vector<int>{color[0], color[1], color[2]});
}

/// Key-value pairs of one section with consumption tracking so that
/// leftover (unknown) keys can be reported.
class Section {
 public:
  Section(std::string name, std::map<std::string, std::string> values)
      : name_{std::move(name)}, values_{std::move(values)} {}

  bool Has(const std::string &key) const { return values_.count(key) > 0; }

  double Double(const std::string &key, double fallback) {
    auto text = Take(key);
    return text ? ParseDouble(key, *text) : fallback;
  }
  double PositiveDouble(const std::string &key, double fallback) {
    double value = Double(key, fallback);
    if (!(value > 0.0)) throw ConfigError(name_, key, "must be positive");
    return value;
  }
  double NonNegativeDouble(const std::string &key, double fallback) {
    double value = Double(key, fallback);
    if (!(value >= 0.0)) throw ConfigError(name_, key, "must be >= 0");
    return value;
  }
  double RequiredDouble(const std::string &key) {
    if (!Has(key)) throw ConfigError(name_, key, "missing required key");
    return Double(key, 0.0);
  }
  long long Integer(const std::string &key, long long fallback) {
    auto text = Take(key);
    return text ? ParseInteger(key, *text) : fallback;
  }
  int PositiveInt(const std::string &key, int fallback) {
    long long value = Integer(key, fallback);
    if (value < 1 || value > 1'000'000'000)
      throw ConfigError(name_, key, "must be a positive integer");
    return int(value);
  }
  int NonNegativeInt(const std::string &key, int fallback) {
    long long value = Integer(key, fallback);
    if (value < 0 || value > 1'000'000'000)
      throw ConfigError(name_, key, "must be a non-negative integer");
    return int(value);
  }
  int RequiredPositiveInt(const std::string &key) {
    if (!Has(key)) throw ConfigError(name_, key, "missing required key");
    return PositiveInt(key, 1);
  }
  std::uint64_t Unsigned(const std::string &key, std::uint64_t fallback) {
    auto text = Take(key);
    if (!text) return fallback;
    std::uint64_t value;
    auto [end, error] =
        std::from_chars(text->data(), text->data() + text->size(), value);
    if (error != std::errc{} || end != text->data() + text->size())
      throw ConfigError(name_, key, "invalid unsigned integer '" + *text + "'");
    return value;
  }
  bool Bool(const std::string &key, bool fallback) {
    auto text = Take(key);
    if (!text) return fallback;
    if (*text == "true" || *text == "1") return true;
    if (*text == "false" || *text == "0") return false;
    throw ConfigError(name_, key, "expected true or false");
  }
  std::string String(const std::string &key, const std::string &fallback) {
    auto text = Take(key);
    return text ? *text : fallback;
  }
  std::vector<double> PositiveDoubles(const std::string &key,
                                      const std::vector<double> &fallback) {
    auto text = Take(key);
    if (!text) return fallback;
    std::vector<double> values;
    for (const auto &item : SplitList(*text)) {
      double value = ParseDouble(key, item);
      if (!(value > 0.0))
        throw ConfigError(name_, key, "entries must be positive");
      values.push_back(value);
    }
    if (values.empty()) throw ConfigError(name_, key, "list is empty");
    return values;
  }
  std::vector<int> PositiveInts(const std::string &key,
                                const std::vector<int> &fallback) {
    auto text = Take(key);
    if (!text) return fallback;
    std::vector<int> values;
    for (const auto &item : SplitList(*text)) {
      long long value = ParseInteger(key, item);
      if (value < 1 || value > 1'000'000)
        throw ConfigError(name_, key, "entries must be positive integers");
      values.push_back(int(value));
    }
    if (values.empty()) throw ConfigError(name_, key, "list is empty");
    return values;
  }
  std::vector<double> Doubles(const std::string &key, std::size_t count) {
    auto text = Take(key);
    std::vector<double> values;
    for (const auto &item : SplitList(*text))
      values.push_back(ParseDouble(key, item));
    if (values.size() != count)
      throw ConfigError(name_, key,
                        "expected " + std::to_string(count) + " values");
    return values;
  }
  Pose PoseValue(const std::string &key, const Pose &fallback) {
    if (!Has(key)) return fallback;
    auto values = Doubles(key, 16);
    Mat4 matrix;
    for (int i = 0; i < 16; ++i) matrix(i / 4, i % 4) = values[i];
    Pose pose = Pose::FromMatrix(matrix);
    if (!pose.IsValid(1e-6) || matrix(3, 0) != 0.0 || matrix(3, 1) != 0.0 ||
        matrix(3, 2) != 0.0 || matrix(3, 3) != 1.0)
      throw ConfigError(name_, key, "not a rigid transform");
    return pose;
  }
  Rgb Color(const std::string &key, const Rgb &fallback) {
    if (!Has(key)) return fallback;
    auto values = Doubles(key, 3);
    Rgb color;
    for (int i = 0; i < 3; ++i) {
      if (values[i] < 0.0 || values[i] > 255.0 ||
          values[i] != std::floor(values[i]))
        throw ConfigError(name_, key, "channels must be integers in [0, 255]");
      color[i] = std::uint8_t(values[i]);
    }
    return color;
  }

  void RejectUnknown() const {
    for (const auto &[key, value] : values_)
      if (!consumed_.count(key)) throw ConfigError(name_, key, "unknown key");
  }

 private:
  std::optional<std::string> Take(const std::string &key) {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  double ParseDouble(const std::string &key, const std::string &text) const {
    double value;
    auto [end, error] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (error != std::errc{} || end != text.data() + text.size() ||
        !std::isfinite(value))
      throw ConfigError(name_, key, "invalid number '" + text + "'");
    return value;
  }
  long long ParseInteger(const std::string &key,
                         const std::string &text) const {
    long long value;
    auto [end, error] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (error != std::errc{} || end != text.data() + text.size())
      throw ConfigError(name_, key, "invalid integer '" + text + "'");
    return value;
  }

  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

std::map<std::string, std::map<std::string, std::string>> ParseIni(
    std::string_view text) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  for (const auto &name : kSections) sections[name];
  std::istringstream stream{std::string{text}};
  std::string line;
  std::string current;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
    if (trimmed.front() == '[') {
      if (trimmed.back() != ']')
        throw ConfigError(trimmed, "", "malformed section header on line " +
                                           std::to_string(line_number));
      current = Trim(trimmed.substr(1, trimmed.size() - 2));
      if (!kSections.count(current))
        throw ConfigError(current, "", "unknown section");
      continue;
    }
    auto equals = trimmed.find('=');
    if (equals == std::string::npos)
      throw ConfigError(current, "", "expected key = value on line " +
                                         std::to_string(line_number));
    if (current.empty())
      throw ConfigError("", Trim(trimmed.substr(0, equals)),
                        "key outside of any section");
    std::string key = Trim(trimmed.substr(0, equals));
    std::string value = Trim(trimmed.substr(equals + 1));
    if (key.empty())
      throw ConfigError(current, "", "empty key on line " +
                                         std::to_string(line_number));
    if (sections[current].count(key))
      throw ConfigError(current, key, "duplicate key");
    sections[current][key] = value;
  }
  return sections;
}

std::filesystem::path ResolvePath(const std::string &value,
                                  const std::filesystem::path &base_dir) {
  if (value.empty()) return {};
  std::filesystem::path path{value};
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  return path.lexically_normal();
}

CameraIntrinsics ReadCamera(Section &section, const CameraIntrinsics *fallback) {
  CameraIntrinsics intrinsics;
  if (fallback) {
    intrinsics.fx = section.PositiveDouble("fx", fallback->fx);
    intrinsics.fy = section.PositiveDouble("fy", fallback->fy);
    intrinsics.px = section.Double("px", fallback->px);
    intrinsics.py = section.Double("py", fallback->py);
    intrinsics.width = section.PositiveInt("width", fallback->width);
    intrinsics.height = section.PositiveInt("height", fallback->height);
  } else {
    intrinsics.fx = section.RequiredDouble("fx");
    intrinsics.fy = section.RequiredDouble("fy");
    intrinsics.px = section.RequiredDouble("px");
    intrinsics.py = section.RequiredDouble("py");
    intrinsics.width = section.RequiredPositiveInt("width");
    intrinsics.height = section.RequiredPositiveInt("height");
  }
  return intrinsics;
}

void ReadSchedule(Section &section, const std::string &prefix,
                  IterationSchedule &schedule) {
  schedule.sigma_r = section.PositiveDoubles(prefix + "sigma_r", schedule.sigma_r);
  schedule.sigma_d = section.PositiveDoubles(prefix + "sigma_d", schedule.sigma_d);
  schedule.scale = section.PositiveInts(prefix + "scale", schedule.scale);
  schedule.radius_mm =
      section.PositiveDoubles(prefix + "radius_mm", schedule.radius_mm);
  schedule.n_correspondence_iterations = section.PositiveInt(
      prefix + "correspondence_iterations", schedule.n_correspondence_iterations);
  schedule.n_update_iterations =
      section.PositiveInt(prefix + "update_iterations", schedule.n_update_iterations);
}

void WriteSchedule(std::ostringstream &out, const std::string &prefix,
                   const IterationSchedule &schedule) {
  out << prefix << "sigma_r = " << FormatList(schedule.sigma_r) << '\n'
      << prefix << "sigma_d = " << FormatList(schedule.sigma_d) << '\n'
      << prefix << "scale = " << FormatList(schedule.scale) << '\n'
      << prefix << "radius_mm = " << FormatList(schedule.radius_mm) << '\n'
      << prefix << "correspondence_iterations = "
      << schedule.n_correspondence_iterations << '\n'
      << prefix << "update_iterations = " << schedule.n_update_iterations
      << '\n';
}

template <typename F>
void Checked(const std::string &section, F &&validate) {
  try {
    validate();
  } catch (const std::invalid_argument &error) {
    throw ConfigError(section, "", error.what());
  }
}

}  // namespace

SceneSettings::SceneSettings() {
  initial_pose.rotation =
      ExpRotation(Vec3{1.0, -1.0, 0.0}.normalized() * (30.0 * M_PI / 180.0));
  initial_pose.translation = {0.0, 0.0, 0.6};
}

SyntheticSceneConfig RunConfig::MakeSceneConfig(const TriangleMesh &mesh) const {
  SyntheticSceneConfig config;
  config.mesh = mesh;
  config.intrinsics = color_camera;
  config.initial_pose = scene.initial_pose;
  config.n_frames = scene.n_frames;
  config.translation_step = scene.translation_step;
  config.rotation_step = scene.rotation_step;
  config.max_offset = scene.max_offset;
  config.foreground = scene.foreground;
  config.background = scene.background;
  config.color_noise = scene.color_noise;
  config.depth_noise = scene.depth_noise;
  config.textured_background = scene.textured_background;
  config.texture_block_size = scene.texture_block_size;
  config.occluder = scene.occluder;
  config.seed = seed;
  return config;
}

RunConfig ParseConfig(std::string_view text,
                      const std::filesystem::path &base_dir) {
  auto ini = ParseIni(text);
  RunConfig config;

  Section color{"camera_color", ini["camera_color"]};
  config.color_camera = ReadCamera(color, nullptr);
  Checked("camera_color", [&] { config.color_camera.Validate(); });
  color.RejectUnknown();

  Section depth{"camera_depth", ini["camera_depth"]};
  config.depth_camera = ReadCamera(depth, &config.color_camera);
  config.tracker.depth_from_color =
      depth.PoseValue("depth_from_color", Pose::Identity());
  Checked("camera_depth", [&] { config.depth_camera.Validate(); });
  depth.RejectUnknown();

  Section tracker{"tracker", ini["tracker"]};
  TrackerConfig &t = config.tracker;
  ReadSchedule(tracker, "", t.schedule);
  ReadSchedule(tracker, "refine_", t.refinement_schedule);
  t.lambda_r = tracker.NonNegativeDouble("lambda_r", t.lambda_r);
  t.lambda_t = tracker.NonNegativeDouble("lambda_t", t.lambda_t);
  if (tracker.Has("lambda_r_axes")) {
    auto values = tracker.Doubles("lambda_r_axes", 3);
    for (double value : values)
      if (!(value >= 0.0))
        throw ConfigError("tracker", "lambda_r_axes", "must be >= 0");
    t.rotation_regularization = Vec3{values[0], values[1], values[2]};
  } else {
    tracker.String("lambda_r_axes", "");
  }
  t.refinement_lambda_t =
      tracker.NonNegativeDouble("refine_lambda_t", t.refinement_lambda_t);
  t.slope = tracker.PositiveDouble("slope", t.slope);
  t.amplitude = tracker.NonNegativeDouble("amplitude", t.amplitude);
  t.local_learning_rate =
      tracker.PositiveDouble("learning_rate", t.local_learning_rate);
  t.histogram_learning_rate = tracker.NonNegativeDouble(
      "histogram_learning_rate", t.histogram_learning_rate);
  t.n_histogram_pixels =
      tracker.PositiveInt("histogram_pixels", t.n_histogram_pixels);
  t.min_continuous_segments = tracker.NonNegativeDouble(
      "min_continuous_segments", t.min_continuous_segments);
  t.stride_mm = tracker.PositiveDouble("stride_mm", t.stride_mm);
  t.refinement_stride_mm =
      tracker.PositiveDouble("refine_stride_mm", t.refinement_stride_mm);
  t.occlusion.region_size =
      tracker.PositiveDouble("occlusion_region_m", t.occlusion.region_size);
  t.occlusion.n_samples_per_axis =
      tracker.PositiveInt("occlusion_samples", t.occlusion.n_samples_per_axis);
  t.occlusion.threshold =
      tracker.PositiveDouble("occlusion_threshold_m", t.occlusion.threshold);
  t.min_correspondences =
      tracker.NonNegativeInt("min_correspondences", t.min_correspondences);
  t.use_region = tracker.Bool("use_region", t.use_region);
  t.use_depth = tracker.Bool("use_depth", t.use_depth);
  t.handle_occlusions = tracker.Bool("handle_occlusions", t.handle_occlusions);
  t.regularize = tracker.Bool("regularize", t.regularize);
  std::string mode = tracker.String("mode", "tracking");
  if (mode == "tracking")
    config.mode = TrackerMode::kTracking;
  else if (mode == "refinement")
    config.mode = TrackerMode::kRefinement;
  else
    throw ConfigError("tracker", "mode", "expected tracking or refinement");
  Checked("tracker", [&] { t.Validate(); });
  tracker.RejectUnknown();

  Section model{"model", ini["model"]};
  ModelConfig &m = config.model;
  config.mesh_path = ResolvePath(model.String("mesh", ""), base_dir);
  config.model_path = ResolvePath(model.String("model", ""), base_dir);
  m.subdivision_level = model.NonNegativeInt("subdivision_level", m.subdivision_level);
  if (m.subdivision_level > 7)
    throw ConfigError("model", "subdivision_level", "must be <= 7");
  m.sphere_radius = model.PositiveDouble("sphere_radius_m", m.sphere_radius);
  m.n_contour_points = model.PositiveInt("contour_points", m.n_contour_points);
  m.n_surface_points = model.PositiveInt("surface_points", m.n_surface_points);
  m.render_width = model.PositiveInt("render_width", m.render_width);
  m.render_height = model.PositiveInt("render_height", m.render_height);
  m.image_fill = model.PositiveDouble("image_fill", m.image_fill);
  if (m.image_fill > 1.0)
    throw ConfigError("model", "image_fill", "must be <= 1");
  m.occlusion_region =
      model.PositiveDouble("occlusion_region_m", m.occlusion_region);
  m.max_free_length = model.PositiveDouble("max_free_length_m", m.max_free_length);
  model.RejectUnknown();

  Section scene{"scene", ini["scene"]};
  SceneSettings &s = config.scene;
  s.n_frames = scene.PositiveInt("frames", s.n_frames);
  s.initial_pose = scene.PoseValue("initial_pose", s.initial_pose);
  s.translation_step =
      scene.NonNegativeDouble("translation_step_m", s.translation_step);
  s.rotation_step = scene.NonNegativeDouble("rotation_step_deg", s.rotation_step);
  s.max_offset = scene.NonNegativeDouble("max_offset_m", s.max_offset);
  s.foreground = scene.Color("foreground", s.foreground);
  s.background = scene.Color("background", s.background);
  s.color_noise = scene.NonNegativeDouble("color_noise", s.color_noise);
  s.depth_noise = scene.NonNegativeDouble("depth_noise_m", s.depth_noise);
  s.textured_background =
      scene.Bool("textured_background", s.textured_background);
  s.texture_block_size =
      scene.PositiveInt("texture_block_size", s.texture_block_size);
  s.occluder.enabled = scene.Bool("occluder", s.occluder.enabled);
  s.occluder.coverage =
      scene.PositiveDouble("occluder_coverage", s.occluder.coverage);
  if (s.occluder.coverage > 1.0)
    throw ConfigError("scene", "occluder_coverage", "must be <= 1");
  s.occluder.gap = scene.PositiveDouble("occluder_gap_m", s.occluder.gap);
  s.occluder.start_frame =
      scene.NonNegativeInt("occluder_start", s.occluder.start_frame);
  s.occluder.end_frame =
      scene.NonNegativeInt("occluder_end", s.occluder.end_frame);
  if (s.occluder.end_frame < s.occluder.start_frame)
    throw ConfigError("scene", "occluder_end", "must be >= occluder_start");
  s.occluder.color = scene.Color("occluder_color", s.occluder.color);
  scene.RejectUnknown();

  Section io{"io", ini["io"]};
  config.frames_dir = ResolvePath(io.String("frames_dir", ""), base_dir);
  config.initial_poses_path =
      ResolvePath(io.String("initial_poses", ""), base_dir);
  config.trajectory_path = ResolvePath(io.String("trajectory", ""), base_dir);
  config.output_dir = ResolvePath(io.String("output_dir", ""), base_dir);
  config.seed = io.Unsigned("seed", config.seed);
  io.RejectUnknown();
  config.model.seed = config.seed;
  return config;
}

RunConfig LoadConfig(const std::filesystem::path &path) {
  std::ifstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot read config " + path.string());
  std::ostringstream contents;
  contents << stream.rdbuf();
  auto base_dir = std::filesystem::absolute(path).parent_path();
  return ParseConfig(contents.str(), base_dir);
}

std::string FormatConfig(const RunConfig &config) {
  std::ostringstream out;
  auto camera = [&](const CameraIntrinsics &c) {
    out << "fx = " << FormatDouble(c.fx) << '\n'
        << "fy = " << FormatDouble(c.fy) << '\n'
        << "px = " << FormatDouble(c.px) << '\n'
        << "py = " << FormatDouble(c.py) << '\n'
        << "width = " << c.width << '\n'
        << "height = " << c.height << '\n';
  };
  auto boolean = [](bool value) { return value ? "true" : "false"; };

  out << "[camera_color]\n";
  camera(config.color_camera);
  out << "\n[camera_depth]\n";
  camera(config.depth_camera);
  out << "depth_from_color = " << FormatPose(config.tracker.depth_from_color)
      << '\n';

  const TrackerConfig &t = config.tracker;
  out << "\n[tracker]\n"
      << "mode = "
      << (config.mode == TrackerMode::kTracking ? "tracking" : "refinement")
      << '\n';
  WriteSchedule(out, "", t.schedule);
  out << "lambda_r = " << FormatDouble(t.lambda_r) << '\n'
      << "lambda_t = " << FormatDouble(t.lambda_t) << '\n';
  if (t.rotation_regularization) {
    const Vec3 &axes = *t.rotation_regularization;
    out << "lambda_r_axes = "
        << FormatList(std::vector<double>{axes.x(), axes.y(), axes.z()})
        << '\n';
  }
  out << "slope = " << FormatDouble(t.slope) << '\n'
      << "amplitude = " << FormatDouble(t.amplitude) << '\n'
      << "learning_rate = " << FormatDouble(t.local_learning_rate) << '\n'
      << "histogram_learning_rate = " << FormatDouble(t.histogram_learning_rate)
      << '\n'
      << "histogram_pixels = " << t.n_histogram_pixels << '\n'
      << "min_continuous_segments = " << FormatDouble(t.min_continuous_segments)
      << '\n'
      << "stride_mm = " << FormatDouble(t.stride_mm) << '\n'
      << "occlusion_region_m = " << FormatDouble(t.occlusion.region_size) << '\n'
      << "occlusion_samples = " << t.occlusion.n_samples_per_axis << '\n'
      << "occlusion_threshold_m = " << FormatDouble(t.occlusion.threshold)
      << '\n'
      << "min_correspondences = " << t.min_correspondences << '\n'
      << "use_region = " << boolean(t.use_region) << '\n'
      << "use_depth = " << boolean(t.use_depth) << '\n'
      << "handle_occlusions = " << boolean(t.handle_occlusions) << '\n'
      << "regularize = " << boolean(t.regularize) << '\n';
  WriteSchedule(out, "refine_", t.refinement_schedule);
  out << "refine_lambda_t = " << FormatDouble(t.refinement_lambda_t) << '\n'
      << "refine_stride_mm = " << FormatDouble(t.refinement_stride_mm) << '\n';

  const ModelConfig &m = config.model;
  out << "\n[model]\n"
      << "mesh = " << config.mesh_path.string() << '\n'
      << "model = " << config.model_path.string() << '\n'
      << "subdivision_level = " << m.subdivision_level << '\n'
      << "sphere_radius_m = " << FormatDouble(m.sphere_radius) << '\n'
      << "contour_points = " << m.n_contour_points << '\n'
      << "surface_points = " << m.n_surface_points << '\n'
      << "render_width = " << m.render_width << '\n'
      << "render_height = " << m.render_height << '\n'
      << "image_fill = " << FormatDouble(m.image_fill) << '\n'
      << "occlusion_region_m = " << FormatDouble(m.occlusion_region) << '\n'
      << "max_free_length_m = " << FormatDouble(m.max_free_length) << '\n';

  const SceneSettings &s = config.scene;
  out << "\n[scene]\n"
      << "frames = " << s.n_frames << '\n'
      << "initial_pose = " << FormatPose(s.initial_pose) << '\n'
      << "translation_step_m = " << FormatDouble(s.translation_step) << '\n'
      << "rotation_step_deg = " << FormatDouble(s.rotation_step) << '\n'
      << "max_offset_m = " << FormatDouble(s.max_offset) << '\n'
      << "foreground = " << FormatRgb(s.foreground) << '\n'
      << "background = " << FormatRgb(s.background) << '\n'
      << "color_noise = " << FormatDouble(s.color_noise) << '\n'
      << "depth_noise_m = " << FormatDouble(s.depth_noise) << '\n'
      << "textured_background = " << boolean(s.textured_background) << '\n'
      << "texture_block_size = " << s.texture_block_size << '\n'
      << "occluder = " << boolean(s.occluder.enabled) << '\n'
      << "occluder_coverage = " << FormatDouble(s.occluder.coverage) << '\n'
      << "occluder_gap_m = " << FormatDouble(s.occluder.gap) << '\n'
      << "occluder_start = " << s.occluder.start_frame << '\n'
      << "occluder_end = " << s.occluder.end_frame << '\n'
      << "occluder_color = " << FormatRgb(s.occluder.color) << '\n';

  out << "\n[io]\n"
      << "frames_dir = " << config.frames_dir.string() << '\n'
      << "initial_poses = " << config.initial_poses_path.string() << '\n'
      << "trajectory = " << config.trajectory_path.string() << '\n'
      << "output_dir = " << config.output_dir.string() << '\n'
      << "seed = " << config.seed << '\n';
  return out.str();
}

}  // namespace fusetrack
