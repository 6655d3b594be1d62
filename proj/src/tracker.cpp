// SPDX-License-Identifier: MIT

#include <fusetrack/tracker.h>

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

namespace fusetrack {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
const T &Clamped(const std::vector<T> &values, int index) {
  return values[std::min<std::size_t>(std::size_t(index), values.size() - 1)];
}

template <typename T>
void RequirePositive(const std::vector<T> &values, const char *name) {
  if (values.empty())
    throw std::invalid_argument(std::string{name} + " schedule is empty");
  for (T value : values)
    if (!(value > T(0)))
      throw std::invalid_argument(std::string{name} +
                                  " schedule entries must be positive");
}

}  // namespace

ScheduleEntry IterationSchedule::At(int iteration) const {
  return {Clamped(sigma_r, iteration), Clamped(sigma_d, iteration),
          Clamped(scale, iteration), 1e-3 * Clamped(radius_mm, iteration)};
}

void IterationSchedule::Validate() const {
  RequirePositive(sigma_r, "sigma_r");
  RequirePositive(sigma_d, "sigma_d");
  RequirePositive(scale, "scale");
  RequirePositive(radius_mm, "radius");
  if (n_correspondence_iterations < 1 || n_update_iterations < 1)
    throw std::invalid_argument("iteration counts must be >= 1");
}

IterationSchedule IterationSchedule::Refinement() {
  IterationSchedule schedule;
  schedule.sigma_d = {100.0, 50.0, 20.0};
  schedule.radius_mm = {300.0, 250.0, 100.0};
  schedule.n_correspondence_iterations = 7;
  return schedule;
}

void TrackerConfig::Validate() const {
  schedule.Validate();
  refinement_schedule.Validate();
  if (!(lambda_r >= 0.0) || !(lambda_t >= 0.0) ||
      !(refinement_lambda_t >= 0.0))
    throw std::invalid_argument("regularization parameters must be >= 0");
  if (rotation_regularization && !(rotation_regularization->minCoeff() >= 0.0))
    throw std::invalid_argument("rotation regularization must be >= 0");
  if (!(slope > 0.0)) throw std::invalid_argument("slope must be > 0");
  if (!(amplitude >= 0.0 && amplitude <= 0.5))
    throw std::invalid_argument("amplitude must be in [0, 0.5]");
  if (!(local_learning_rate > 0.0))
    throw std::invalid_argument("local learning rate must be > 0");
  if (!(histogram_learning_rate >= 0.0 && histogram_learning_rate <= 1.0))
    throw std::invalid_argument("histogram learning rate must be in [0, 1]");
  if (n_histogram_pixels < 1)
    throw std::invalid_argument("histogram pixels must be >= 1");
  if (!(stride_mm > 0.0) || !(refinement_stride_mm > 0.0))
    throw std::invalid_argument("stride must be > 0");
  if (!(occlusion.region_size > 0.0) || occlusion.n_samples_per_axis < 1 ||
      !(occlusion.threshold > 0.0))
    throw std::invalid_argument("occlusion parameters must be positive");
  if (min_correspondences < 0)
    throw std::invalid_argument("min correspondences must be >= 0");
  if (!depth_from_color.IsValid(1e-6))
    throw std::invalid_argument("depth_from_color is not a rigid transform");
}

Vec3 SymmetryConstraint(double lambda, double default_lambda, int axis) {
  if (!(lambda >= 0.0) || !(default_lambda >= 0.0))
    throw std::invalid_argument("regularization must be >= 0");
  if (axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
  if (axis < 0) return Vec3::Constant(lambda);
  Vec3 result = Vec3::Constant(default_lambda);
  result[axis] = lambda;
  return result;
}

GradientHessian Assemble(std::span<const GradientHessian> terms) {
  GradientHessian sum;
  for (const auto &term : terms) {
    sum.gradient += term.gradient;
    sum.hessian += term.hessian;
  }
  return sum;
}

std::optional<PoseVariation> NewtonStep(const GradientHessian &terms,
                                        const Vec3 &lambda_r,
                                        double lambda_t) {
  Mat6 system = -terms.hessian;
  system.diagonal().head<3>() += lambda_r;
  system.diagonal().tail<3>().array() += lambda_t;
  if (!system.allFinite() || !terms.gradient.allFinite()) return std::nullopt;
  Eigen::LDLT<Mat6> solver(system);
  if (solver.info() != Eigen::Success) return std::nullopt;
  Vec6 theta = solver.solve(terms.gradient);
  if (!theta.allFinite()) return std::nullopt;
  return PoseVariation::FromVector(theta);
}

Tracker::Tracker(const SparseViewpointModel &model, const TrackerConfig &config,
                 const CameraIntrinsics &color_intrinsics,
                 const CameraIntrinsics &depth_intrinsics)
    : model_{model},
      config_{config},
      color_intrinsics_{color_intrinsics},
      depth_intrinsics_{depth_intrinsics} {
  config_.Validate();
  color_intrinsics_.Validate();
  depth_intrinsics_.Validate();
  if (model_.views.empty())
    throw std::invalid_argument("viewpoint model has no views");
  step_table_ = MakeStepFunctionTable(config_.slope, config_.amplitude);
  occlusion_ = config_.occlusion;
}

void Tracker::Initialize(const Pose &camera_from_model, const ColorImage &color,
                         const DepthImage &depth) {
  pose_ = camera_from_model;
  histograms_.Reset();
  UpdateColorHistograms(color, depth, 1.0);
}

void Tracker::UpdateColorHistograms(const ColorImage &color,
                                    const DepthImage &depth,
                                    double learning_rate) {
  const Viewpoint &view = model_.ClosestView(pose_);
  const Pose depth_from_model = config_.depth_from_color * pose_;
  std::vector<HistogramLine> probes;
  probes.reserve(view.contour_points.size());
  for (const auto &contour_point : view.contour_points) {
    Vec3 point_camera = pose_ * contour_point.point;
    if (point_camera.z() <= 0.0) continue;
    Vec2 center = Project(color_intrinsics_, point_camera);
    if (!color.Contains(int(std::floor(center.x())),
                        int(std::floor(center.y()))))
      continue;
    auto normal = ProjectedNormal(pose_, color_intrinsics_, contour_point.point,
                                  contour_point.normal);
    if (!normal) continue;
    if (config_.handle_occlusions) {
      Vec3 point_depth = depth_from_model * contour_point.point;
      if (IsOccluded(depth, point_depth, 0.0, depth_intrinsics_,
                     occlusion_))
        continue;
    }
    probes.push_back({center, *normal, config_.n_histogram_pixels,
                      config_.n_histogram_pixels});
  }
  UpdateHistograms(histograms_, color, probes, learning_rate);
}

std::vector<CorrespondenceLine> Tracker::CollectLines(const Viewpoint &view,
                                                      const ColorImage &color,
                                                      const DepthImage &depth,
                                                      int scale) const {
  std::vector<CorrespondenceLine> lines;
  lines.reserve(view.contour_points.size());
  const Pose depth_from_model = config_.depth_from_color * pose_;
  const LineBuildOptions options{scale, config_.min_continuous_segments};
  for (const auto &contour_point : view.contour_points) {
    if (config_.handle_occlusions) {
      Vec3 point_depth = depth_from_model * contour_point.point;
      if (point_depth.z() <= 0.0 ||
          IsOccluded(depth, point_depth, 0.0, depth_intrinsics_,
                     occlusion_))
        continue;
    }
    auto line = BuildLine(contour_point, pose_, color_intrinsics_, color,
                          histograms_, step_table_, options);
    if (line) lines.push_back(std::move(*line));
  }
  return lines;
}

std::vector<CorrespondencePoint> Tracker::CollectPoints(
    const Viewpoint &view, const DepthImage &depth, double radius,
    double stride) const {
  std::vector<CorrespondencePoint> points;
  points.reserve(view.surface_points.size());
  const Pose depth_from_model = config_.depth_from_color * pose_;
  for (const auto &surface_point : view.surface_points) {
    if (config_.handle_occlusions) {
      Vec3 point_depth = depth_from_model * surface_point.point;
      if (point_depth.z() <= 0.0 ||
          IsOccluded(depth, point_depth, surface_point.occlusion_offset,
                     depth_intrinsics_, occlusion_))
        continue;
    }
    auto point = FindCorrespondence(depth, surface_point, depth_from_model,
                                    depth_intrinsics_, radius, stride);
    if (point) points.push_back(*point);
  }
  return points;
}

FrameReport Tracker::TrackFrame(const ColorImage &color,
                                const DepthImage &depth) {
  if (!histograms_.initialized())
    throw std::logic_error("tracker must be initialized before tracking");
  return Run(color, depth, false);
}

FrameReport Tracker::RefinePose(const ColorImage &color,
                                const DepthImage &depth,
                                const Pose &initial_pose) {
  pose_ = initial_pose;
  return Run(color, depth, true);
}

FrameReport Tracker::Run(const ColorImage &color, const DepthImage &depth,
                         bool refinement) {
  const auto frame_start = Clock::now();
  const IterationSchedule &schedule =
      refinement ? config_.refinement_schedule : config_.schedule;
  const double stride =
      1e-3 * (refinement ? config_.refinement_stride_mm : config_.stride_mm);
  Vec3 lambda_r = config_.rotation_regularization.value_or(
      Vec3::Constant(config_.lambda_r));
  double lambda_t = refinement ? config_.refinement_lambda_t : config_.lambda_t;
  if (!config_.regularize) {
    lambda_r.setZero();
    lambda_t = 0.0;
  }

  FrameReport report;
  for (int iteration = 0; iteration < schedule.n_correspondence_iterations;
       ++iteration) {
    const ScheduleEntry entry = schedule.At(iteration);
    // A refined pose may lie behind the object by up to the correspondence
    // radius, so nearer measurements only count as occluders beyond it.
    occlusion_ = config_.occlusion;
    if (refinement)
      occlusion_.threshold = std::max(occlusion_.threshold, entry.radius);
    if (refinement && config_.use_region) {
      auto start = Clock::now();
      histograms_.Reset();
      UpdateColorHistograms(color, depth, 1.0);
      report.timing.histogram += SecondsSince(start);
    }
    const Viewpoint &view = model_.ClosestView(pose_);

    Correspondences correspondences;
    if (config_.use_region) {
      auto start = Clock::now();
      correspondences.lines = CollectLines(view, color, depth, entry.scale);
      report.timing.lines += SecondsSince(start);
    }
    if (config_.use_depth) {
      auto start = Clock::now();
      correspondences.points =
          CollectPoints(view, depth, entry.radius, stride);
      report.timing.points += SecondsSince(start);
    }
    report.n_lines.push_back(int(correspondences.lines.size()));
    report.n_points.push_back(int(correspondences.points.size()));
    const int n_valid =
        int(correspondences.lines.size() + correspondences.points.size());
    if (n_valid == 0 || n_valid < config_.min_correspondences) {
      report.lost = true;
      report.iteration_poses.push_back(pose_);
      continue;
    }

    auto derivative_start = Clock::now();
    const RegionParameters region_parameters{entry.sigma_r, config_.slope,
                                             config_.local_learning_rate};
    for (int update = 0; update < schedule.n_update_iterations; ++update) {
      const RegionOptimization mode = update == 0 ? RegionOptimization::kGlobal
                                                  : RegionOptimization::kLocal;
      GradientHessian terms;
      for (const auto &line : correspondences.lines) {
        RegionContribution contribution = RegionGradientHessian(
            line, pose_, color_intrinsics_, mode, region_parameters);
        terms.gradient += contribution.terms.gradient;
        terms.hessian += contribution.terms.hessian;
      }
      const Pose depth_from_model = config_.depth_from_color * pose_;
      for (auto &point : correspondences.points) {
        UpdateMeasuredPoint(point, depth_from_model);
        GradientHessian point_terms =
            DepthGradientHessian(point, entry.sigma_d);
        terms.gradient += point_terms.gradient;
        terms.hessian += point_terms.hessian;
      }
      auto theta = NewtonStep(terms, lambda_r, lambda_t);
      if (!theta) {
        ++report.n_skipped_steps;
        continue;
      }
      pose_ = ExpUpdate(pose_, *theta);
    }
    report.timing.derivatives += SecondsSince(derivative_start);
    report.iteration_poses.push_back(pose_);
  }

  if (!refinement && config_.use_region && !report.lost) {
    auto start = Clock::now();
    UpdateColorHistograms(color, depth, config_.histogram_learning_rate);
    report.timing.histogram += SecondsSince(start);
  }
  occlusion_ = config_.occlusion;
  report.pose = pose_;
  const double total = SecondsSince(frame_start);
  report.timing.other =
      std::max(0.0, total - report.timing.lines - report.timing.points -
                        report.timing.derivatives - report.timing.histogram);
  return report;
}

}  // namespace fusetrack
