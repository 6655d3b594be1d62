// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <fusetrack/config.h>

#include <filesystem>
#include <fstream>

using namespace fusetrack;

namespace {

const char *kCamera =
    "[camera_color]\n"
    "fx = 615\nfy = 615\npx = 320\npy = 240\nwidth = 640\nheight = 480\n";

std::string WithCamera(const std::string &rest) { return kCamera + rest; }

// Section and key named by the error for a config that must be rejected.
std::pair<std::string, std::string> Rejection(const std::string &text) {
  try {
    ParseConfig(text);
  } catch (const ConfigError &error) {
    return {error.section(), error.key()};
  }
  return {"<accepted>", ""};
}

}  // namespace

TEST_CASE("omitted tracker keys take the published defaults") {
  RunConfig config = ParseConfig(WithCamera("[tracker]\n"));
  CHECK(config.tracker.lambda_r == 1000.0);
  CHECK(config.tracker.lambda_t == 30000.0);
  CHECK(config.tracker.slope == 0.5);
  CHECK(config.tracker.amplitude == 0.43);
  CHECK(config.tracker.local_learning_rate == 1.3);
  CHECK(config.tracker.schedule.sigma_r == std::vector<double>{25, 15, 10});
  CHECK(config.tracker.schedule.sigma_d == std::vector<double>{50, 30, 20});
  CHECK(config.tracker.schedule.scale == std::vector<int>{7, 4, 2});
  CHECK(config.tracker.schedule.radius_mm == std::vector<double>{70, 50, 40});
  CHECK(config.mode == TrackerMode::kTracking);
  // Depth camera defaults to the color camera.
  CHECK(config.depth_camera.fx == 615.0);
  CHECK(config.depth_camera.width == 640);
  CHECK(config.tracker.depth_from_color.Matrix() == Mat4::Identity());
}

TEST_CASE("schedule lists reuse their last entry") {
  RunConfig config =
      ParseConfig(WithCamera("[tracker]\nsigma_r = 25,15,10\nscale = 5\n"));
  const IterationSchedule &schedule = config.tracker.schedule;
  REQUIRE(schedule.sigma_r.size() == 3);
  CHECK(schedule.At(3).sigma_r == 10.0);
  CHECK(schedule.At(0).scale == 5);
  CHECK(schedule.At(5).scale == 5);
  CHECK(schedule.At(0).radius == doctest::Approx(0.07));
}

TEST_CASE("invalid configs name the section and key") {
  using Where = std::pair<std::string, std::string>;
  CHECK(Rejection(WithCamera("[tracker]\nlambda_r = -1\n")) ==
        Where{"tracker", "lambda_r"});
  CHECK(Rejection(WithCamera("[tracker]\nlamda_r = 10\n")) ==
        Where{"tracker", "lamda_r"});
  CHECK(Rejection(WithCamera("[tracker]\nslope = abc\n")) ==
        Where{"tracker", "slope"});
  CHECK(Rejection(WithCamera("[tracker]\nsigma_r = 25,,10\n")) ==
        Where{"tracker", "sigma_r"});
  CHECK(Rejection(WithCamera("[tracker]\nsigma_d = 50,-30\n")) ==
        Where{"tracker", "sigma_d"});
  CHECK(Rejection(WithCamera("[tracker]\nmode = fast\n")) ==
        Where{"tracker", "mode"});
  CHECK(Rejection(WithCamera("[tracker]\nuse_depth = maybe\n")) ==
        Where{"tracker", "use_depth"});
  CHECK(Rejection(WithCamera("[tracker]\nslope = 1\nslope = 2\n")) ==
        Where{"tracker", "slope"});
  CHECK(Rejection("[camera_color]\nfx = 615\n").first == "camera_color");
  CHECK(Rejection(WithCamera("[cameras]\n")).first == "cameras");
  CHECK(Rejection(WithCamera("[model]\nsubdivision_level = 9\n")) ==
        Where{"model", "subdivision_level"});
  CHECK(Rejection(WithCamera("[scene]\nforeground = 300, 0, 0\n")) ==
        Where{"scene", "foreground"});
  CHECK(Rejection(WithCamera("[scene]\noccluder_start = 10\noccluder_end = 5\n")) ==
        Where{"scene", "occluder_end"});
  CHECK(Rejection(WithCamera("[camera_depth]\ndepth_from_color = "
                             "2,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1\n")) ==
        Where{"camera_depth", "depth_from_color"});
  CHECK(Rejection(WithCamera("[io]\nseed = -3\n")) == Where{"io", "seed"});

  try {
    ParseConfig(WithCamera("[tracker]\nlambda_t = -5\n"));
    FAIL("expected a config error");
  } catch (const ConfigError &error) {
    CHECK(std::string(error.what()).find("[tracker] lambda_t") !=
          std::string::npos);
  }
}

TEST_CASE("comments, whitespace and all sections") {
  std::string text = WithCamera(
      "# comment\n"
      "; another\n"
      "[camera_depth]\n"
      "  fx=580 \n"
      "depth_from_color = 1,0,0,0.05, 0,1,0,0, 0,0,1,0, 0,0,0,1\n"
      "[tracker]\n"
      "mode = refinement\n"
      "lambda_r_axes = 1000, 2000, 0\n"
      "use_region = false\n"
      "[model]\n"
      "subdivision_level = 2\n"
      "[scene]\n"
      "frames = 12\n"
      "textured_background = true\n"
      "occluder = 1\n"
      "[io]\n"
      "seed = 18446744073709551615\n");
  RunConfig config = ParseConfig(text);
  CHECK(config.depth_camera.fx == 580.0);
  CHECK(config.depth_camera.fy == 615.0);
  CHECK(config.tracker.depth_from_color.translation.x() == 0.05);
  CHECK(config.mode == TrackerMode::kRefinement);
  REQUIRE(config.tracker.rotation_regularization);
  CHECK(config.tracker.rotation_regularization->y() == 2000.0);
  CHECK_FALSE(config.tracker.use_region);
  CHECK(config.model.subdivision_level == 2);
  CHECK(config.scene.n_frames == 12);
  CHECK(config.scene.textured_background);
  CHECK(config.scene.occluder.enabled);
  CHECK(config.seed == 18446744073709551615ull);
  CHECK(config.model.seed == config.seed);
}

TEST_CASE("formatted config parses back to itself") {
  std::string text = WithCamera(
      "[tracker]\n"
      "sigma_r = 25, 15.5, 10\n"
      "lambda_t = 12345.678\n"
      "lambda_r_axes = 1, 2, 3\n"
      "refine_radius_mm = 300, 250, 100\n"
      "[scene]\n"
      "initial_pose = 0,-1,0,0.01, 1,0,0,0.02, 0,0,1,0.7, 0,0,0,1\n"
      "depth_noise_m = 0.0013\n"
      "[model]\nmesh = /tmp/cube.obj\n"
      "[io]\nseed = 99\noutput_dir = /tmp/out\n");
  RunConfig config = ParseConfig(text);
  std::string formatted = FormatConfig(config);
  RunConfig again = ParseConfig(formatted);
  CHECK(FormatConfig(again) == formatted);
  CHECK(again.tracker.lambda_t == 12345.678);
  CHECK(again.scene.depth_noise == 0.0013);
  CHECK(again.scene.initial_pose.Matrix() == config.scene.initial_pose.Matrix());
  CHECK(again.tracker.refinement_schedule.radius_mm ==
        std::vector<double>{300, 250, 100});
  CHECK(again.mesh_path == "/tmp/cube.obj");
  CHECK(again.seed == 99);

  // Defaults also survive a round trip.
  RunConfig defaults = ParseConfig(kCamera);
  CHECK(FormatConfig(ParseConfig(FormatConfig(defaults))) ==
        FormatConfig(defaults));
}

TEST_CASE("relative paths resolve against the config directory") {
  auto dir = std::filesystem::temp_directory_path() / "fusetrack_config_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "run.ini";
  {
    std::ofstream file{path};
    file << kCamera << "[model]\nmesh = ../meshes/cube.obj\n"
         << "[io]\noutput_dir = out\nframes_dir = /abs/frames\n";
  }
  RunConfig config = LoadConfig(path);
  CHECK(config.mesh_path ==
        (std::filesystem::absolute(dir).parent_path() / "meshes/cube.obj")
            .lexically_normal());
  CHECK(config.output_dir == std::filesystem::absolute(dir) / "out");
  CHECK(config.frames_dir == "/abs/frames");
  CHECK(config.model_path.empty());
  CHECK_THROWS(LoadConfig(dir / "missing.ini"));
}

TEST_CASE("scene settings map onto the generator config") {
  RunConfig config = ParseConfig(WithCamera(
      "[scene]\nframes = 7\nrotation_step_deg = 2\noccluder = true\n"
      "occluder_start = 2\noccluder_end = 4\n[io]\nseed = 5\n"));
  SyntheticSceneConfig scene = config.MakeSceneConfig(MakeBox({0.1, 0.1, 0.1}));
  CHECK(scene.n_frames == 7);
  CHECK(scene.rotation_step == 2.0);
  CHECK(scene.seed == 5);
  CHECK(scene.occluder.ActiveAt(3));
  CHECK_FALSE(scene.occluder.ActiveAt(5));
  CHECK(scene.intrinsics.width == 640);
  CHECK(scene.color_noise == 8.0);
  CHECK(scene.depth_noise == 0.002);
}
