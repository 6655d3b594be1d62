// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <fusetrack/metrics.h>
#include <fusetrack/random.h>
#include <fusetrack/render.h>
#include <fusetrack/synthetic_scene.h>
#include <fusetrack/tracker.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

using namespace fusetrack;

namespace {

const CameraIntrinsics kIntrinsics{615, 615, 320, 240, 640, 480};

const TriangleMesh &Cube() {
  static const TriangleMesh cube = MakeBox({0.1, 0.1, 0.1});
  return cube;
}

const SparseViewpointModel &CubeModel() {
  static const SparseViewpointModel model = [] {
    ModelConfig config;
    config.subdivision_level = 3;
    return GenerateModel(Cube(), config);
  }();
  return model;
}

Pose InitialPose() {
  Pose pose;
  pose.rotation = ExpRotation(Vec3(1, -1, 0).normalized() * 30 * M_PI / 180);
  pose.translation = {0, 0, 0.6};
  return pose;
}

SyntheticSceneConfig CubeScene(int n_frames) {
  SyntheticSceneConfig config;
  config.mesh = Cube();
  config.intrinsics = kIntrinsics;
  config.initial_pose = InitialPose();
  config.n_frames = n_frames;
  config.seed = 1;
  return config;
}

// Frame 0 of the cube scene rendered at `pose`.
SyntheticFrame RenderAt(const Pose &pose, bool noise) {
  SyntheticSceneConfig config = CubeScene(1);
  config.initial_pose = pose;
  if (!noise) {
    config.color_noise = 0.0;
    config.depth_noise = 0.0;
  }
  return SyntheticScene(config).RenderFrame(0);
}

double Add(const Pose &estimate, const Pose &ground_truth) {
  return AddError(Cube().vertices, RelativePose(estimate, ground_truth));
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

Mat6 RandomNegativeRankOne(SplitMix64 &rng) {
  Vec6 v;
  for (int k = 0; k < 6; ++k) v[k] = rng.Gaussian();
  return -v * v.transpose();
}

}  // namespace

TEST_CASE("assemble sums contributions in order") {
  CHECK(Assemble({}).gradient.norm() == 0.0);
  CHECK(Assemble({}).hessian.norm() == 0.0);
  SplitMix64 rng{101};
  GradientHessian single;
  single.gradient = Vec6::Random();
  single.hessian = RandomNegativeRankOne(rng);
  GradientHessian same = Assemble(std::span(&single, 1));
  CHECK(same.gradient == single.gradient);
  CHECK(same.hessian == single.hessian);

  std::vector<GradientHessian> terms(100);
  GradientHessian oracle;
  for (auto &term : terms) {
    for (int k = 0; k < 6; ++k) term.gradient[k] = rng.Gaussian();
    term.hessian = RandomNegativeRankOne(rng);
    for (int k = 0; k < 6; ++k) oracle.gradient[k] += term.gradient[k];
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) oracle.hessian(a, b) += term.hessian(a, b);
  }
  GradientHessian sum = Assemble(terms);
  CHECK(sum.gradient == oracle.gradient);
  CHECK(sum.hessian == oracle.hessian);
  CHECK(sum.hessian == sum.hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Mat6> solver(sum.hessian);
  CHECK(solver.eigenvalues().maxCoeff() <= 1e-12 * sum.hessian.norm());
}

TEST_CASE("newton step") {
  GradientHessian zero;
  auto step = NewtonStep(zero, 1000.0, 30000.0);
  REQUIRE(step);
  CHECK(step->Vector().norm() == 0.0);

  GradientHessian pull;
  pull.gradient << 0, 0, 0, 30000.0 * 0.01, 0, 0;
  step = NewtonStep(pull, 1000.0, 30000.0);
  REQUIRE(step);
  CHECK((step->translation - Vec3(0.01, 0, 0)).norm() < 1e-15);
  CHECK(step->rotation.norm() == 0.0);

  // Oracle: (-H + diag(lambda)) theta = g.
  SplitMix64 rng{103};
  GradientHessian random;
  for (int i = 0; i < 20; ++i) random.hessian += RandomNegativeRankOne(rng);
  for (int k = 0; k < 6; ++k) random.gradient[k] = rng.Gaussian();
  Vec6 lambda;
  lambda << 1000, 1000, 1000, 30000, 30000, 30000;
  Vec6 expected = (Mat6(-random.hessian) + Mat6(lambda.asDiagonal()))
                      .fullPivLu()
                      .solve(random.gradient);
  step = NewtonStep(random, 1000.0, 30000.0);
  REQUIRE(step);
  CHECK((step->Vector() - expected).norm() <= 1e-12 * expected.norm());

  double previous = 1e300;
  for (double scale : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4}) {
    auto s = NewtonStep(random, 1000.0 * scale, 30000.0 * scale);
    REQUIRE(s);
    double norm = s->Vector().norm();
    REQUIRE(norm < previous);
    previous = norm;
  }

  auto clamped = NewtonStep(random, 1e12, 30000.0);
  REQUIRE(clamped);
  CHECK(clamped->rotation.norm() < 1e-10);

  // Per-axis rotational regularization only clamps the chosen axis.
  auto axis = NewtonStep(random, SymmetryConstraint(1e12, 1000.0, 2), 30000.0);
  REQUIRE(axis);
  CHECK(std::abs(axis->rotation.z()) < 1e-9);
  CHECK(std::abs(axis->rotation.x()) > 1e-6);

  GradientHessian broken;
  broken.gradient[0] = std::nan("");
  CHECK_FALSE(NewtonStep(broken, 1000.0, 30000.0));
}

TEST_CASE("symmetry constraint") {
  CHECK(SymmetryConstraint(70000.0, 1000.0) == Vec3::Constant(70000.0));
  CHECK(SymmetryConstraint(70000.0, 1000.0, 1) == Vec3(1000, 70000, 1000));
  CHECK_THROWS_AS(SymmetryConstraint(-1.0, 1000.0), std::invalid_argument);
}

TEST_CASE("schedules") {
  IterationSchedule tracking = IterationSchedule::Tracking();
  CHECK(tracking.n_correspondence_iterations == 4);
  CHECK(tracking.n_update_iterations == 2);
  ScheduleEntry first = tracking.At(0);
  CHECK(first.sigma_r == 25.0);
  CHECK(first.sigma_d == 50.0);
  CHECK(first.scale == 7);
  CHECK(first.radius == doctest::Approx(0.07));
  ScheduleEntry last = tracking.At(5);
  CHECK(last.sigma_r == 10.0);
  CHECK(last.scale == 2);
  CHECK(last.radius == doctest::Approx(0.04));

  IterationSchedule refinement = IterationSchedule::Refinement();
  CHECK(refinement.n_correspondence_iterations == 7);
  CHECK(refinement.At(0).radius == doctest::Approx(0.3));
  CHECK(refinement.At(1).radius == doctest::Approx(0.25));
  CHECK(refinement.At(6).radius == doctest::Approx(0.1));
  CHECK(refinement.At(0).sigma_d == 100.0);
  CHECK(refinement.At(6).sigma_d == 20.0);

  IterationSchedule bad = tracking;
  bad.scale.clear();
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
  bad = tracking;
  bad.sigma_r[1] = 0.0;
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);

  TrackerConfig config;
  CHECK(config.lambda_r == 1000.0);
  CHECK(config.lambda_t == 30000.0);
  CHECK(config.refinement_lambda_t == 100.0);
  CHECK_NOTHROW(config.Validate());
  config.lambda_t = -1.0;
  CHECK_THROWS_AS(config.Validate(), std::invalid_argument);
}

TEST_CASE("a frame rendered at the current pose is a fixed point") {
  Pose pose = InitialPose();
  SyntheticFrame frame = RenderAt(pose, false);
  // Exact depth rather than the millimeter-quantized scene depth.
  frame.depth = RenderDepth(Cube(), pose, kIntrinsics).depth;
  Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
  tracker.Initialize(pose, frame.color, frame.depth);
  FrameReport report = tracker.TrackFrame(frame.color, frame.depth);
  CHECK_FALSE(report.lost);
  CHECK((report.pose.translation - pose.translation).norm() < 1e-4);
  CHECK(RotationAngle(report.pose.rotation.transpose() * pose.rotation) < 1e-3);
  CHECK(report.n_lines.front() > 50);
  CHECK(report.n_points.front() > 100);
}

TEST_CASE("a 5 mm displacement is recovered in one frame") {
  Pose start = InitialPose();
  SplitMix64 rng{107};
  for (int trial = 0; trial < 5; ++trial) {
    Vec3 direction{rng.Gaussian(), rng.Gaussian(), rng.Gaussian()};
    Pose moved = Pose::Translation(0.005 * direction.normalized()) * start;
    SyntheticFrame first = RenderAt(start, true);
    SyntheticFrame second = RenderAt(moved, true);
    Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
    tracker.Initialize(start, first.color, first.depth);
    FrameReport report = tracker.TrackFrame(second.color, second.depth);
    REQUIRE(report.iteration_poses.size() == 4);
    CHECK(Add(report.pose, moved) < 0.001);
    CHECK(report.pose.IsValid());
  }
}

TEST_CASE("tracking converges within four correspondence iterations") {
  SyntheticScene scene(CubeScene(60));
  TrackerConfig config;
  config.schedule.n_correspondence_iterations = 6;
  Tracker tracker(CubeModel(), config, kIntrinsics, kIntrinsics);
  SyntheticFrame frame = scene.RenderFrame(0);
  tracker.Initialize(scene.ground_truth()[0].pose, frame.color, frame.depth);
  std::vector<double> after_four, after_six;
  for (int k = 0; k < scene.n_frames(); ++k) {
    frame = scene.RenderFrame(k);
    FrameReport report = tracker.TrackFrame(frame.color, frame.depth);
    const Pose &truth = scene.ground_truth()[k].pose;
    after_four.push_back(Add(report.iteration_poses[3], truth));
    after_six.push_back(Add(report.iteration_poses[5], truth));
  }
  double four = Median(after_four), six = Median(after_six);
  MESSAGE("median ADD after 4: ", four * 1000, " mm, after 6: ", six * 1000,
          " mm");
  CHECK(std::abs(four - six) <= 0.05 * six);
}

TEST_CASE("tracking is deterministic") {
  SyntheticScene scene(CubeScene(10));
  std::vector<Mat4> runs[2];
  for (auto &run : runs) {
    Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
    SyntheticFrame frame = scene.RenderFrame(0);
    tracker.Initialize(scene.ground_truth()[0].pose, frame.color, frame.depth);
    for (int k = 0; k < scene.n_frames(); ++k) {
      frame = scene.RenderFrame(k);
      run.push_back(tracker.TrackFrame(frame.color, frame.depth).pose.Matrix());
    }
  }
  CHECK(runs[0] == runs[1]);
}

TEST_CASE("tracking survives thousands of updates with a valid rotation") {
  SyntheticScene scene(CubeScene(40));
  Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
  SyntheticFrame frame = scene.RenderFrame(0);
  tracker.Initialize(scene.ground_truth()[0].pose, frame.color, frame.depth);
  for (int k = 0; k < scene.n_frames(); ++k) {
    frame = scene.RenderFrame(k);
    tracker.TrackFrame(frame.color, frame.depth);
    REQUIRE(tracker.pose().IsValid(1e-9));
  }
  CHECK(Add(tracker.pose(), scene.ground_truth().back().pose) < 0.01);
}

TEST_CASE("empty images raise the lost flag and keep the pose") {
  Pose pose = InitialPose();
  SyntheticFrame frame = RenderAt(pose, false);
  Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
  tracker.Initialize(pose, frame.color, frame.depth);
  ColorImage blank(640, 480, {0, 0, 0});
  DepthImage no_depth(640, 480);
  // A uniform image carries no contour evidence; with no depth the tracker
  // has nothing to hold on to.
  TrackerConfig region_off;
  region_off.use_region = false;
  Tracker depth_only(CubeModel(), region_off, kIntrinsics, kIntrinsics);
  depth_only.Initialize(pose, frame.color, frame.depth);
  FrameReport report = depth_only.TrackFrame(blank, no_depth);
  CHECK(report.lost);
  CHECK(report.pose.Matrix() == pose.Matrix());
}

TEST_CASE("update steps rarely increase the objective") {
  // The regularized objective at fixed correspondences, evaluated through
  // the public derivative functions.
  SyntheticScene scene(CubeScene(40));
  Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
  SyntheticFrame frame = scene.RenderFrame(0);
  tracker.Initialize(scene.ground_truth()[0].pose, frame.color, frame.depth);
  int n_improved = 0, n_frames = 0;
  for (int k = 1; k < scene.n_frames(); ++k) {
    frame = scene.RenderFrame(k);
    const Pose &truth = scene.ground_truth()[k].pose;
    double before = Add(tracker.pose(), truth);
    FrameReport report = tracker.TrackFrame(frame.color, frame.depth);
    double after_first = Add(report.iteration_poses.front(), truth);
    ++n_frames;
    if (after_first <= before + 1e-4) ++n_improved;
  }
  CHECK(n_improved >= 0.95 * n_frames);
}

TEST_CASE("refinement from a perfect start stays put") {
  Pose pose = InitialPose();
  SyntheticFrame frame = RenderAt(pose, true);
  Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
  FrameReport report = tracker.RefinePose(frame.color, frame.depth, pose);
  CHECK(report.iteration_poses.size() == 7);
  CHECK((report.pose.translation - pose.translation).norm() < 1e-3);
}

TEST_CASE("refinement from a 20 mm and 15 degree offset") {
  Pose truth = InitialPose();
  SyntheticFrame frame = RenderAt(truth, true);
  Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
  SplitMix64 rng{109};
  for (int trial = 0; trial < 5; ++trial) {
    Vec3 shift{rng.Gaussian(), rng.Gaussian(), rng.Gaussian()};
    Vec3 axis{rng.Gaussian(), rng.Gaussian(), rng.Gaussian()};
    Pose start = truth;
    start.translation += 0.02 * shift.normalized();
    start.rotation =
        ExpRotation(15 * M_PI / 180 * axis.normalized()) * truth.rotation;
    FrameReport report = tracker.RefinePose(frame.color, frame.depth, start);
    CHECK((report.pose.translation - truth.translation).norm() < 0.002);
    CHECK(RotationAngle(report.pose.rotation.transpose() * truth.rotation) <
          M_PI / 180);
  }
}

TEST_CASE("refinement from 250 mm along the camera axis") {
  Pose truth = InitialPose();
  SyntheticFrame frame = RenderAt(truth, true);
  Tracker tracker(CubeModel(), {}, kIntrinsics, kIntrinsics);
  Vec3 ray = truth.translation.normalized();
  for (double sign : {-1.0, 1.0}) {
    CAPTURE(sign);
    Pose start = truth;
    start.translation += sign * 0.25 * ray;
    FrameReport report = tracker.RefinePose(frame.color, frame.depth, start);
    CHECK(Add(report.pose, truth) < 0.005);
  }
}

TEST_CASE("symmetric cylinder does not spin about its axis") {
  TriangleMesh cylinder = MakeCylinder(0.04, 0.12, 64);
  ModelConfig model_config;
  model_config.subdivision_level = 2;
  SparseViewpointModel model = GenerateModel(cylinder, model_config);
  SyntheticSceneConfig config;
  config.mesh = cylinder;
  config.intrinsics = kIntrinsics;
  config.initial_pose.rotation = ExpRotation({1.2, 0.0, 0.0});
  config.initial_pose.translation = {0, 0, 0.6};
  config.n_frames = 100;
  config.translation_step = 0.002;
  config.rotation_step = 0.0;
  config.seed = 5;
  SyntheticScene scene(config);
  TrackerConfig tracker_config;
  tracker_config.rotation_regularization = SymmetryConstraint(70000.0, 1000.0);
  Tracker tracker(model, tracker_config, kIntrinsics, kIntrinsics);
  SyntheticFrame frame = scene.RenderFrame(0);
  tracker.Initialize(scene.ground_truth()[0].pose, frame.color, frame.depth);
  double worst = 0.0;
  for (int k = 0; k < scene.n_frames(); ++k) {
    frame = scene.RenderFrame(k);
    FrameReport report = tracker.TrackFrame(frame.color, frame.depth);
    Mat3 relative = scene.ground_truth()[k].pose.rotation.transpose() *
                    report.pose.rotation;
    worst = std::max(worst, RotationAngle(relative));
  }
  MESSAGE("largest rotation drift: ", worst * 180 / M_PI, " deg");
  CHECK(worst < M_PI / 180);
}
