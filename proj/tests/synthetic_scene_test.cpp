// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <fusetrack/render.h>
#include <fusetrack/synthetic_scene.h>

#include <array>
#include <cmath>
#include <set>

using namespace fusetrack;

namespace {

SyntheticSceneConfig BaseConfig() {
  SyntheticSceneConfig config;
  config.mesh = MakeBox({0.1, 0.1, 0.1});
  config.intrinsics = {615, 615, 320, 240, 640, 480};
  config.initial_pose.rotation = ExpRotation({0.3, -0.4, 0.1});
  config.initial_pose.translation = {0, 0, 0.6};
  config.n_frames = 20;
  config.seed = 7;
  return config;
}

bool SameFrame(const SyntheticFrame &a, const SyntheticFrame &b) {
  return a.color.data == b.color.data && a.depth.values == b.depth.values;
}

}  // namespace

TEST_CASE("static noise-free scene repeats the same frame") {
  SyntheticSceneConfig config = BaseConfig();
  config.translation_step = 0.0;
  config.rotation_step = 0.0;
  config.color_noise = 0.0;
  config.depth_noise = 0.0;
  SyntheticScene scene(config);
  SyntheticFrame first = scene.RenderFrame(0);
  for (int k = 1; k < scene.n_frames(); ++k)
    REQUIRE(SameFrame(scene.RenderFrame(k), first));

  // Flat colors and millimeter depth on the rendered silhouette.
  RenderResult render =
      RenderDepth(config.mesh, config.initial_pose, config.intrinsics);
  for (int v = 0; v < 480; ++v)
    for (int u = 0; u < 640; ++u) {
      if (render.mask.at(u, v)) {
        REQUIRE(first.color.at(u, v) == config.foreground);
        float z = first.depth.at(u, v);
        REQUIRE(std::abs(z - render.depth.at(u, v)) <= 0.0005 + 1e-6);
        REQUIRE(std::abs(z * 1000 - std::round(z * 1000)) < 1e-3);
      } else {
        REQUIRE(first.color.at(u, v) == config.background);
        REQUIRE(first.depth.at(u, v) == 0.0f);
      }
    }
}

TEST_CASE("ground truth steps have the configured size") {
  SyntheticSceneConfig config = BaseConfig();
  config.n_frames = 100;
  config.translation_step = 0.005;
  config.rotation_step = 3.0;
  config.max_offset = 0.03;
  SyntheticScene scene(config);
  const Trajectory &truth = scene.ground_truth();
  REQUIRE(truth.size() == 100);
  for (std::size_t i = 1; i < truth.size(); ++i) {
    REQUIRE(truth[i].frame_index == int(i));
    const Pose &a = truth[i - 1].pose;
    const Pose &b = truth[i].pose;
    REQUIRE((b.translation - a.translation).norm() ==
            doctest::Approx(0.005).epsilon(1e-9));
    REQUIRE(RotationAngle(b.rotation * a.rotation.transpose()) * 180 / M_PI ==
            doctest::Approx(3.0).epsilon(1e-9));
    REQUIRE((b.translation - config.initial_pose.translation).norm() <=
            config.max_offset + 0.005 + 1e-12);
    REQUIRE(b.IsValid(1e-9));
  }

  SyntheticSceneConfig slide = BaseConfig();
  slide.rotation_step = 0.0;
  SyntheticScene sliding(slide);
  for (std::size_t i = 1; i < sliding.ground_truth().size(); ++i) {
    const Pose &a = sliding.ground_truth()[i - 1].pose;
    const Pose &b = sliding.ground_truth()[i].pose;
    REQUIRE((b.translation - a.translation).norm() ==
            doctest::Approx(0.005).epsilon(1e-12));
    REQUIRE((b.rotation - a.rotation).norm() < 1e-12);
  }
}

TEST_CASE("noise statistics") {
  SyntheticSceneConfig config = BaseConfig();
  config.initial_pose.rotation = Mat3::Identity();
  SyntheticSceneConfig clean = config;
  clean.color_noise = 0.0;
  clean.depth_noise = 0.0;
  SyntheticFrame noisy = SyntheticScene(config).RenderFrame(0);
  SyntheticFrame exact = SyntheticScene(clean).RenderFrame(0);
  RenderResult render =
      RenderDepth(config.mesh, config.initial_pose, config.intrinsics);

  double color_sum = 0.0, color_squares = 0.0;
  int n_color = 0;
  double depth_squares = 0.0;
  int n_depth = 0;
  for (int v = 0; v < 480; ++v)
    for (int u = 0; u < 640; ++u) {
      // Green channel stays far from the clamping limits.
      double dc = double(noisy.color.at(u, v)[1]) - exact.color.at(u, v)[1];
      color_sum += dc;
      color_squares += dc * dc;
      ++n_color;
      if (render.mask.at(u, v)) {
        double dz = (noisy.depth.at(u, v) - render.depth.at(u, v)) /
                    render.depth.at(u, v);
        depth_squares += dz * dz;
        ++n_depth;
      }
    }
  double color_std = std::sqrt(color_squares / n_color);
  CHECK(std::abs(color_sum / n_color) < 0.1);
  // Rounding to whole intensity levels adds 1/12 to the variance.
  CHECK(color_std == doctest::Approx(std::sqrt(64.0 + 1.0 / 12)).epsilon(0.02));
  // Relative depth noise plus millimeter quantization (0.5 m face).
  double quantization = 0.001 / std::sqrt(12.0) / 0.55;
  CHECK(std::sqrt(depth_squares / n_depth) ==
        doctest::Approx(std::hypot(0.002, quantization)).epsilon(0.05));
}

TEST_CASE("frames are deterministic and independent of render order") {
  SyntheticSceneConfig config = BaseConfig();
  config.textured_background = true;
  SyntheticScene a(config), b(config);
  SyntheticFrame last = a.RenderFrame(19);
  for (int k = 0; k < 20; ++k) REQUIRE(SameFrame(a.RenderFrame(k), b.RenderFrame(k)));
  CHECK(SameFrame(b.RenderFrame(19), last));
  config.seed = 8;
  SyntheticScene c(config);
  CHECK_FALSE(SameFrame(c.RenderFrame(0), a.RenderFrame(0)));

  SyntheticSequence sequence = GenerateSequence(BaseConfig());
  SyntheticScene reference(BaseConfig());
  REQUIRE(sequence.frames.size() == 20);
  for (int k = 0; k < 20; ++k) {
    REQUIRE(SameFrame(sequence.frames[k], reference.RenderFrame(k)));
    REQUIRE(sequence.ground_truth[k].pose.Matrix() ==
            reference.ground_truth()[k].pose.Matrix());
  }
  CHECK_THROWS_AS(reference.RenderFrame(20), std::out_of_range);
}

TEST_CASE("textured background uses random blocks") {
  SyntheticSceneConfig config = BaseConfig();
  config.textured_background = true;
  config.color_noise = 0.0;
  SyntheticFrame frame = SyntheticScene(config).RenderFrame(0);
  RenderResult render =
      RenderDepth(config.mesh, config.initial_pose, config.intrinsics);
  std::set<std::array<int, 3>> colors;
  for (int v = 0; v < 480; v += 16)
    for (int u = 0; u < 640; u += 16) {
      if (render.mask.at(u, v) || render.mask.at(u + 15, v + 15)) continue;
      Rgb c = frame.color.at(u, v);
      colors.insert({c[0], c[1], c[2]});
      // Uniform within a block.
      REQUIRE(frame.color.at(u + 15, v + 15) == c);
    }
  CHECK(colors.size() > 1000);
  config.seed = 8;
  CHECK_FALSE(SyntheticScene(config).RenderFrame(0).color.data == frame.color.data);
}

TEST_CASE("occluder hides part of the object") {
  SyntheticSceneConfig config = BaseConfig();
  config.n_frames = 12;
  config.occluder.enabled = true;
  config.occluder.start_frame = 5;
  config.occluder.end_frame = 8;
  config.depth_noise = 0.0;
  SyntheticSceneConfig plain = config;
  plain.occluder.enabled = false;
  SyntheticScene occluded(config), reference(plain);
  for (int k = 0; k < config.n_frames; ++k) {
    SyntheticFrame a = occluded.RenderFrame(k);
    SyntheticFrame b = reference.RenderFrame(k);
    if (!config.occluder.ActiveAt(k)) {
      REQUIRE(SameFrame(a, b));
      continue;
    }
    RenderResult render =
        RenderDepth(config.mesh, occluded.ground_truth()[k].pose,
                    config.intrinsics);
    int n_object = 0, n_changed = 0;
    float nearest = 1e9f;
    for (int v = 0; v < 480; ++v)
      for (int u = 0; u < 640; ++u) {
        if (!render.mask.at(u, v)) continue;
        ++n_object;
        nearest = std::min(nearest, render.depth.at(u, v));
        if (a.depth.at(u, v) != b.depth.at(u, v)) ++n_changed;
      }
    REQUIRE(n_changed >= 0.3 * n_object);
    REQUIRE(n_changed <= 0.6 * n_object);
    // Occluder is flat and in front of the object.
    for (int v = 0; v < 480; ++v)
      for (int u = 0; u < 640; ++u)
        if (render.mask.at(u, v) && a.depth.at(u, v) != b.depth.at(u, v))
          REQUIRE(a.depth.at(u, v) < nearest - 0.05);
  }
}

TEST_CASE("scene errors") {
  SyntheticSceneConfig config = BaseConfig();
  config.initial_pose.translation = {0.5, 0, 0.6};
  try {
    SyntheticScene scene(config);
    FAIL("expected a scene generation error");
  } catch (const SceneGenerationError &error) {
    CHECK(error.frame() == 0);
  }
  // Leaves the image part way through.
  config = BaseConfig();
  config.initial_pose.translation = {0.19, 0, 0.6};
  config.max_offset = 1.0;
  config.translation_step = 0.02;
  config.n_frames = 200;
  try {
    SyntheticScene scene(config);
    FAIL("expected a scene generation error");
  } catch (const SceneGenerationError &error) {
    CHECK(error.frame() > 0);
    CHECK(std::string(error.what()).find("frame") != std::string::npos);
  }

  config = BaseConfig();
  config.color_noise = -1.0;
  CHECK_THROWS_AS(SyntheticScene{config}, std::invalid_argument);
  config = BaseConfig();
  config.mesh = TriangleMesh{};
  CHECK_THROWS_AS(SyntheticScene{config}, std::invalid_argument);
  config = BaseConfig();
  config.occluder.enabled = true;
  config.occluder.coverage = 1.5;
  CHECK_THROWS_AS(SyntheticScene{config}, std::invalid_argument);
}
