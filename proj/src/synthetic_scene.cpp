// SPDX-License-Identifier: MIT

#include <fusetrack/synthetic_scene.h>

#include <fusetrack/random.h>
#include <fusetrack/render.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fusetrack {

namespace {

constexpr std::uint64_t kTrajectoryStream = 0;
constexpr std::uint64_t kTextureStream = 1;
constexpr std::uint64_t kFirstFrameStream = 16;
constexpr int kOccluderMargin = 10;  // pixels beyond the object's box

Vec3 RandomDirection(SplitMix64 &rng) {
  for (;;) {
    Vec3 v{rng.Gaussian(), rng.Gaussian(), rng.Gaussian()};
    double norm = v.norm();
    if (norm > 1e-9) return v / norm;
  }
}

std::uint8_t ClampToByte(double value) {
  return std::uint8_t(std::clamp(std::lround(value), 0L, 255L));
}

struct ImageBox {
  double min_u, max_u, min_v, max_v, min_z;
};

ImageBox ProjectedBox(const TriangleMesh &mesh, const Pose &pose,
                      const CameraIntrinsics &intrinsics) {
  ImageBox box{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity()};
  for (const auto &vertex : mesh.vertices) {
    Vec3 p = pose * vertex;
    box.min_z = std::min(box.min_z, p.z());
    if (p.z() <= 0.0) continue;
    Vec2 x = Project(intrinsics, p);
    box.min_u = std::min(box.min_u, x.x());
    box.max_u = std::max(box.max_u, x.x());
    box.min_v = std::min(box.min_v, x.y());
    box.max_v = std::max(box.max_v, x.y());
  }
  return box;
}

}  // namespace

void SyntheticSceneConfig::Validate() const {
  if (mesh.vertices.empty() || mesh.triangles.empty())
    throw std::invalid_argument("scene mesh is empty");
  intrinsics.Validate();
  if (!initial_pose.IsValid(1e-6))
    throw std::invalid_argument("initial pose is not a rigid transform");
  if (n_frames < 1) throw std::invalid_argument("n_frames must be >= 1");
  if (!(translation_step >= 0.0) || !(rotation_step >= 0.0) ||
      !(max_offset >= 0.0))
    throw std::invalid_argument("trajectory steps must be >= 0");
  if (!(color_noise >= 0.0) || !(depth_noise >= 0.0))
    throw std::invalid_argument("noise must be >= 0");
  if (texture_block_size < 1)
    throw std::invalid_argument("texture block size must be >= 1");
  if (occluder.enabled &&
      (!(occluder.coverage > 0.0 && occluder.coverage <= 1.0) ||
       !(occluder.gap > 0.0) || occluder.end_frame < occluder.start_frame))
    throw std::invalid_argument("invalid occluder");
}

SyntheticScene::SyntheticScene(SyntheticSceneConfig config)
    : config_{std::move(config)} {
  config_.Validate();
  const auto &intr = config_.intrinsics;

  SplitMix64 rng{DeriveSeed(config_.seed, kTrajectoryStream)};
  Pose pose = config_.initial_pose;
  const double rotation_step = config_.rotation_step * M_PI / 180.0;
  for (int frame = 0; frame < config_.n_frames; ++frame) {
    if (frame > 0) {
      Vec3 step = config_.translation_step * RandomDirection(rng);
      Vec3 axis = RandomDirection(rng);
      Vec3 offset = pose.translation + step - config_.initial_pose.translation;
      if (offset.norm() > config_.max_offset) step = -step;
      pose.translation += step;
      pose.rotation = Orthonormalize(ExpRotation(rotation_step * axis) *
                                     pose.rotation);
    }
    ImageBox box = ProjectedBox(config_.mesh, pose, intr);
    if (!(box.min_z > 0.0))
      throw SceneGenerationError(frame, "object crosses the camera plane");
    if (box.min_u < 0.0 || box.min_v < 0.0 || box.max_u >= intr.width ||
        box.max_v >= intr.height)
      throw SceneGenerationError(frame, "object leaves the camera frustum");
    if (config_.occluder.ActiveAt(frame) &&
        !(box.min_z - config_.occluder.gap > 0.0))
      throw SceneGenerationError(frame, "occluder behind the camera");
    ground_truth_.push_back({frame, pose});
  }

  background_ = ColorImage{intr.width, intr.height, config_.background};
  if (config_.textured_background) {
    SplitMix64 texture_rng{DeriveSeed(config_.seed, kTextureStream)};
    const int block = config_.texture_block_size;
    const int blocks_u = (intr.width + block - 1) / block;
    const int blocks_v = (intr.height + block - 1) / block;
    std::vector<Rgb> colors(std::size_t(blocks_u) * blocks_v);
    for (auto &color : colors)
      color = {std::uint8_t(texture_rng.Below(256)),
               std::uint8_t(texture_rng.Below(256)),
               std::uint8_t(texture_rng.Below(256))};
    for (int v = 0; v < intr.height; ++v)
      for (int u = 0; u < intr.width; ++u)
        background_.set(u, v,
                        colors[std::size_t(v / block) * blocks_u + u / block]);
  }
}

SyntheticFrame SyntheticScene::RenderFrame(int frame) const {
  if (frame < 0 || frame >= config_.n_frames)
    throw std::out_of_range("frame index out of range");
  const auto &intr = config_.intrinsics;
  const Pose &pose = ground_truth_[frame].pose;
  RenderResult render = RenderDepth(config_.mesh, pose, intr);

  SyntheticFrame result{background_, DepthImage{intr.width, intr.height}};
  for (int v = 0; v < intr.height; ++v)
    for (int u = 0; u < intr.width; ++u)
      if (render.mask.at(u, v)) {
        result.color.set(u, v, config_.foreground);
        result.depth.at(u, v) = render.depth.at(u, v);
      }

  if (config_.occluder.ActiveAt(frame)) {
    ImageBox box = ProjectedBox(config_.mesh, pose, intr);
    const double occluder_depth = box.min_z - config_.occluder.gap;
    const double right =
        box.min_u + config_.occluder.coverage * (box.max_u - box.min_u);
    const int u_begin = std::max(0, int(std::floor(box.min_u)) - kOccluderMargin);
    const int u_end = std::min(intr.width, int(std::floor(right)));
    const int v_begin = std::max(0, int(std::floor(box.min_v)) - kOccluderMargin);
    const int v_end =
        std::min(intr.height, int(std::floor(box.max_v)) + 1 + kOccluderMargin);
    for (int v = v_begin; v < v_end; ++v)
      for (int u = u_begin; u < u_end; ++u) {
        result.color.set(u, v, config_.occluder.color);
        result.depth.at(u, v) = float(occluder_depth);
      }
  }

  SplitMix64 rng{DeriveSeed(config_.seed, kFirstFrameStream + frame)};
  if (config_.color_noise > 0.0) {
    for (auto &channel : result.color.data)
      channel = ClampToByte(channel + config_.color_noise * rng.Gaussian());
  }
  for (auto &depth : result.depth.values) {
    if (!(depth > 0.0f)) continue;
    double noisy = depth;
    if (config_.depth_noise > 0.0)
      noisy += config_.depth_noise * depth * rng.Gaussian();
    depth = float(std::max(0.0, std::round(noisy * 1000.0)) / 1000.0);
  }
  return result;
}

SyntheticSequence GenerateSequence(const SyntheticSceneConfig &config) {
  SyntheticScene scene{config};
  SyntheticSequence sequence;
  sequence.ground_truth = scene.ground_truth();
  sequence.frames.reserve(scene.n_frames());
  for (int frame = 0; frame < scene.n_frames(); ++frame)
    sequence.frames.push_back(scene.RenderFrame(frame));
  return sequence;
}

}  // namespace fusetrack
