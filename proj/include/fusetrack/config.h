// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_CONFIG_H_
#define FUSETRACK_CONFIG_H_

#include <fusetrack/geometry.h>
#include <fusetrack/image.h>
#include <fusetrack/synthetic_scene.h>
#include <fusetrack/tracker.h>
#include <fusetrack/viewpoint_model.h>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fusetrack {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string &section, const std::string &key,
              const std::string &message)
      : std::runtime_error{"[" + section + "]" +
                           (key.empty() ? "" : " " + key) + ": " + message},
        section_{section},
        key_{key} {}
  const std::string &section() const { return section_; }
  const std::string &key() const { return key_; }

 private:
  std::string section_;
  std::string key_;
};

enum class TrackerMode { kTracking, kRefinement };

/// Synthetic scene settings without the mesh and camera, which come from
/// [model] and [camera_color].
struct SceneSettings {
  int n_frames = 300;
  Pose initial_pose;
  double translation_step = 0.005;
  double rotation_step = 3.0;
  double max_offset = 0.06;
  Rgb foreground{200, 60, 40};
  Rgb background{40, 90, 160};
  double color_noise = 8.0;
  double depth_noise = 0.002;
  bool textured_background = false;
  int texture_block_size = 16;
  OccluderConfig occluder;

  SceneSettings();
};

/// Fully resolved run configuration. Paths are absolute after loading.
struct RunConfig {
  CameraIntrinsics color_camera;
  CameraIntrinsics depth_camera;
  TrackerConfig tracker;
  TrackerMode mode = TrackerMode::kTracking;
  ModelConfig model;
  SceneSettings scene;
  std::filesystem::path mesh_path;
  std::filesystem::path model_path;
  std::filesystem::path frames_dir;
  std::filesystem::path initial_poses_path;
  std::filesystem::path trajectory_path;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;

  SyntheticSceneConfig MakeSceneConfig(const TriangleMesh &mesh) const;
};

// Parses the INI text. Sections: [camera_color] [camera_depth] [tracker]
// [model] [scene] [io]. Omitted keys take their defaults; unknown sections
// or keys, unparsable values and invalid parameters throw ConfigError.
// Relative paths are resolved against `base_dir`.
RunConfig ParseConfig(std::string_view text,
                      const std::filesystem::path &base_dir = {});

RunConfig LoadConfig(const std::filesystem::path &path);

// Writes every parameter; ParseConfig(FormatConfig(c)) reproduces c.
std::string FormatConfig(const RunConfig &config);

}  // namespace fusetrack

#endif  // FUSETRACK_CONFIG_H_
