// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_SYNTHETIC_SCENE_H_
#define FUSETRACK_SYNTHETIC_SCENE_H_

#include <fusetrack/geometry.h>
#include <fusetrack/image.h>
#include <fusetrack/mesh.h>
#include <fusetrack/metrics.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fusetrack {

/// Flat rectangle parallel to the image plane in front of the object. It
/// covers the left `coverage` fraction of the object's bounding box in the
/// image and sits `gap` meters in front of the object's nearest point.
struct OccluderConfig {
  bool enabled = false;
  double coverage = 0.4;
  double gap = 0.1;
  int start_frame = 100;
  int end_frame = 200;  // inclusive
  Rgb color{128, 128, 128};

  bool ActiveAt(int frame) const {
    return enabled && frame >= start_frame && frame <= end_frame;
  }
};

struct SyntheticSceneConfig {
  TriangleMesh mesh;
  CameraIntrinsics intrinsics;
  Pose initial_pose;  // C_T_M of frame 0
  int n_frames = 300;
  // Random walk: every frame translates by `translation_step` in a random
  // direction and rotates by `rotation_step` about a random axis through
  // the model origin. Steps that would leave a ball of `max_offset` around
  // the initial position are reversed.
  double translation_step = 0.005;   // meters
  double rotation_step = 3.0;        // degrees
  double max_offset = 0.06;          // meters
  Rgb foreground{200, 60, 40};
  Rgb background{40, 90, 160};
  double color_noise = 8.0;   // standard deviation, 8-bit intensity units
  double depth_noise = 0.002;  // standard deviation at 1 m, grows with depth
  // Replaces the flat background by random colored blocks.
  bool textured_background = false;
  int texture_block_size = 16;
  OccluderConfig occluder;
  std::uint64_t seed = 0;

  void Validate() const;
};

class SceneGenerationError : public std::runtime_error {
 public:
  SceneGenerationError(int frame, const std::string &message)
      : std::runtime_error("frame " + std::to_string(frame) + ": " + message),
        frame_{frame} {}
  int frame() const { return frame_; }

 private:
  int frame_;
};

struct SyntheticFrame {
  ColorImage color;
  DepthImage depth;
};

/// Ground truth is computed on construction; frames are rendered on demand
/// and depend only on the config and the frame index. Depth is quantized to
/// whole millimeters.
class SyntheticScene {
 public:
  // Throws SceneGenerationError if the object leaves the image.
  explicit SyntheticScene(SyntheticSceneConfig config);

  int n_frames() const { return config_.n_frames; }
  const Trajectory &ground_truth() const { return ground_truth_; }
  const SyntheticSceneConfig &config() const { return config_; }

  SyntheticFrame RenderFrame(int frame) const;

 private:
  SyntheticSceneConfig config_;
  Trajectory ground_truth_;
  ColorImage background_;
};

struct SyntheticSequence {
  std::vector<SyntheticFrame> frames;
  Trajectory ground_truth;
};

// Renders every frame of the scene in memory.
SyntheticSequence GenerateSequence(const SyntheticSceneConfig &config);

}  // namespace fusetrack

#endif  // FUSETRACK_SYNTHETIC_SCENE_H_
