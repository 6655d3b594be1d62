// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <fusetrack/mesh.h>
#include <fusetrack/random.h>
#include <fusetrack/render.h>
#include <fusetrack/viewpoint_model.h>

#include <cmath>
#include <filesystem>

using namespace fusetrack;

namespace {

ModelConfig SmallConfig(int level) {
  ModelConfig config;
  config.subdivision_level = level;
  config.n_contour_points = 100;
  config.n_surface_points = 100;
  config.seed = 3;
  return config;
}

const SparseViewpointModel &CubeModel() {
  static const SparseViewpointModel model =
      GenerateModel(MakeBox({0.1, 0.1, 0.1}), SmallConfig(2));
  return model;
}

// Distance from a continuous image position to the closest pixel center of a
// contour pixel (foreground with a background 4-neighbor).
double DistanceToContour(const SilhouetteMask &mask, const Vec2 &pixel) {
  double best = 1e9;
  int cu = int(std::floor(pixel.x())), cv = int(std::floor(pixel.y()));
  for (int v = cv - 4; v <= cv + 4; ++v)
    for (int u = cu - 4; u <= cu + 4; ++u) {
      if (!mask.Contains(u, v) || !mask.at(u, v)) continue;
      bool boundary = false;
      const int du[] = {1, -1, 0, 0};
      const int dv[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int nu = u + du[k], nv = v + dv[k];
        if (!mask.Contains(nu, nv) || !mask.at(nu, nv)) boundary = true;
      }
      if (boundary)
        best = std::min(best, (Vec2(u + 0.5, v + 0.5) - pixel).norm());
    }
  return best;
}

}  // namespace

TEST_CASE("geodesic grid sizes") {
  for (int level = 0; level <= 4; ++level) {
    auto grid = GeodesicGrid(level);
    CHECK(grid.size() == std::size_t(10 * std::pow(4, level) + 2));
  }
  CHECK(GeodesicGrid(0).size() == 12);
  CHECK(GeodesicGrid(4).size() == 2562);
  CHECK_THROWS_AS(GeodesicGrid(-1), std::invalid_argument);
}

TEST_CASE("geodesic grid vertices are distinct unit vectors") {
  auto grid = GeodesicGrid(4);
  double max_dot = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE(std::abs(grid[i].norm() - 1.0) < 1e-12);
    for (std::size_t j = i + 1; j < grid.size(); ++j)
      max_dot = std::max(max_dot, grid[i].dot(grid[j]));
  }
  CHECK(max_dot < 1.0 - 1e-9);
  CHECK(GeodesicGrid(3) == GeodesicGrid(3));
}

TEST_CASE("virtual camera looks at the model origin") {
  for (const Vec3 &direction : GeodesicGrid(1)) {
    Pose pose = VirtualCameraPose(direction, 0.8);
    REQUIRE(pose.IsValid());
    REQUIRE((pose * Vec3::Zero() - Vec3(0, 0, 0.8)).norm() < 1e-12);
    REQUIRE((pose * (0.8 * direction)).norm() < 1e-12);
  }
}

TEST_CASE("cube model views are populated and normalized") {
  const auto &model = CubeModel();
  REQUIRE(model.views.size() == 162);
  for (const auto &view : model.views) {
    REQUIRE(std::abs(view.orientation.norm() - 1.0) < 1e-12);
    REQUIRE(view.contour_points.size() == 100);
    REQUIRE(view.surface_points.size() == 100);
    for (const auto &p : view.contour_points) {
      REQUIRE(std::abs(p.normal.norm() - 1.0) < 1e-6);
      REQUIRE(p.foreground_free_length >= 0.0);
      REQUIRE(p.background_free_length >= 0.0);
      REQUIRE(p.foreground_free_length <= model.config.max_free_length);
      REQUIRE(p.background_free_length <= model.config.max_free_length);
    }
    for (const auto &p : view.surface_points) {
      REQUIRE(std::abs(p.normal.norm() - 1.0) < 1e-6);
      REQUIRE(p.occlusion_offset >= 0.0);
      // Visible from the generating camera.
      REQUIRE(p.normal.dot(view.orientation) < 0.0);
    }
  }
}

TEST_CASE("contour and surface points reproject onto their render") {
  const auto &model = CubeModel();
  TriangleMesh cube = MakeBox({0.1, 0.1, 0.1});
  const CameraIntrinsics intrinsics = model.RenderIntrinsics();
  for (std::size_t i = 0; i < model.views.size(); i += 7) {
    const auto &view = model.views[i];
    Pose pose = VirtualCameraPose(-view.orientation, model.config.sphere_radius);
    RenderResult render = RenderDepth(cube, pose, intrinsics);
    for (const auto &p : view.contour_points) {
      Vec2 pixel = Project(intrinsics, pose * p.point);
      REQUIRE(DistanceToContour(render.mask, pixel) <= 1.5);
    }
    for (const auto &p : view.surface_points) {
      Vec3 camera_point = pose * p.point;
      Vec2 pixel = Project(intrinsics, camera_point);
      int u = int(std::floor(pixel.x())), v = int(std::floor(pixel.y()));
      REQUIRE(render.mask.at(u, v));
      REQUIRE(std::abs(render.depth.at(u, v) - camera_point.z()) < 1e-3);
    }
  }
}

TEST_CASE("sphere contour normals are perpendicular to the view") {
  SparseViewpointModel model =
      GenerateModel(MakeSphere(0.05, 64, 32), SmallConfig(1));
  const double limit = std::sin(5.0 * M_PI / 180.0);
  for (const auto &view : model.views) {
    for (const auto &p : view.contour_points) {
      REQUIRE(std::abs(p.normal.dot(view.orientation)) < limit);
      // Outward: away from the sphere center.
      REQUIRE(p.normal.dot(p.point) > 0.0);
    }
  }
}

TEST_CASE("frontal box face has zero occlusion offset") {
  Vec3 direction = GeodesicGrid(0)[0];
  Mat3 rotation =
      Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), direction)
          .toRotationMatrix();
  TriangleMesh box = MakeBox({0.1, 0.1, 0.1});
  for (Vec3 &v : box.vertices) v = rotation * v;
  ModelConfig config = SmallConfig(0);
  config.n_surface_points = 400;
  SparseViewpointModel model = GenerateModel(box, config);
  const Viewpoint &view = model.views[0];
  REQUIRE((view.orientation + direction).norm() < 1e-12);
  int n_checked = 0;
  for (const auto &p : view.surface_points) {
    Vec3 local = rotation.transpose() * p.point;
    if (std::abs(local.z() - 0.05) > 1e-6) continue;
    if (std::abs(local.x()) > 0.035 || std::abs(local.y()) > 0.035) continue;
    ++n_checked;
    REQUIRE(p.occlusion_offset < 0.002);
  }
  CHECK(n_checked > 50);
}

TEST_CASE("generation is deterministic per seed") {
  TriangleMesh box = MakeBox({0.1, 0.06, 0.04});
  ModelConfig config = SmallConfig(1);
  std::string a = SerializeModel(GenerateModel(box, config));
  std::string b = SerializeModel(GenerateModel(box, config));
  CHECK(a == b);
  config.n_threads = 3;
  CHECK(SerializeModel(GenerateModel(box, config)) == a);
  config.seed = 4;
  CHECK(SerializeModel(GenerateModel(box, config)) != a);
}

TEST_CASE("generation errors") {
  TriangleMesh speck;
  speck.vertices = {{0.7, 0, 0}, {0.7 + 1e-7, 0, 0}, {0.7, 1e-7, 0}};
  speck.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(GenerateModel(speck, SmallConfig(0)), std::runtime_error);
  CHECK_THROWS_AS(GenerateModel(TriangleMesh{}, SmallConfig(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(GenerateModel(MakeBox({2, 2, 2}), SmallConfig(0)),
                  std::invalid_argument);
}

TEST_CASE("closest view") {
  const auto &model = CubeModel();
  auto grid = GeodesicGrid(2);
  for (std::size_t i = 0; i < grid.size(); i += 5) {
    Pose on_vertex = VirtualCameraPose(grid[i], 0.6);
    REQUIRE(model.ClosestViewIndex(on_vertex) == i);
    Pose opposite = VirtualCameraPose(-grid[i], 0.6);
    REQUIRE((model.ClosestView(opposite).orientation + model.views[i].orientation)
                .norm() < 1e-12);
  }
  SplitMix64 rng{9};
  for (int k = 0; k < 300; ++k) {
    Pose pose;
    Vec3 axis{rng.Gaussian(), rng.Gaussian(), rng.Gaussian()};
    pose.rotation = ExpRotation(rng.Uniform(0, M_PI) * axis.normalized());
    pose.translation = {rng.Uniform(-0.2, 0.2), rng.Uniform(-0.2, 0.2),
                        rng.Uniform(0.3, 1.0)};
    Vec3 direction = pose.rotation.transpose() * pose.translation;
    std::size_t best = 0;
    for (std::size_t i = 1; i < model.views.size(); ++i)
      if (model.views[i].orientation.dot(direction) >
          model.views[best].orientation.dot(direction))
        best = i;
    REQUIRE(model.ClosestViewIndex(pose) == best);
  }
}

TEST_CASE("model serialization") {
  const auto &model = CubeModel();
  std::string bytes = SerializeModel(model);
  SparseViewpointModel back = DeserializeModel(bytes);
  CHECK(SerializeModel(back) == bytes);
  CHECK(back.views.size() == model.views.size());
  CHECK(back.config.seed == model.config.seed);

  auto path = std::filesystem::temp_directory_path() / "fusetrack_model.bin";
  SaveModel(path, model);
  CHECK(SerializeModel(LoadModel(path)) == bytes);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS(DeserializeModel(bad));
  CHECK_THROWS(DeserializeModel(bytes.substr(0, bytes.size() / 2)));
  CHECK_THROWS(DeserializeModel(bytes + "x"));
}
