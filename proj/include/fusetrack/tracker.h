// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_TRACKER_H_
#define FUSETRACK_TRACKER_H_

#include <fusetrack/depth_modality.h>
#include <fusetrack/geometry.h>
#include <fusetrack/image.h>
#include <fusetrack/region_modality.h>
#include <fusetrack/viewpoint_model.h>

#include <optional>
#include <span>
#include <vector>

namespace fusetrack {

struct ScheduleEntry {
  double sigma_r;  // pixels
  double sigma_d;  // millimeters
  int scale;       // pixels per segment
  double radius;   // correspondence threshold r_t, meters
};

/// Per correspondence-iteration parameters. Iterations past the end of a
/// list reuse its last value.
struct IterationSchedule {
  std::vector<double> sigma_r{25.0, 15.0, 10.0};
  std::vector<double> sigma_d{50.0, 30.0, 20.0};
  std::vector<int> scale{7, 4, 2};
  std::vector<double> radius_mm{70.0, 50.0, 40.0};
  int n_correspondence_iterations = 4;
  int n_update_iterations = 2;

  ScheduleEntry At(int iteration) const;
  // Throws std::invalid_argument for empty lists or non-positive values.
  void Validate() const;

  static IterationSchedule Tracking() { return {}; }
  static IterationSchedule Refinement();
};

struct TrackerConfig {
  IterationSchedule schedule = IterationSchedule::Tracking();
  double lambda_r = 1000.0;
  double lambda_t = 30000.0;
  // Per-axis rotational regularization (model frame) replacing lambda_r.
  std::optional<Vec3> rotation_regularization;
  double slope = 0.5;                  // s_h
  double amplitude = 0.43;             // alpha_h
  double local_learning_rate = 1.3;    // alpha_s
  double histogram_learning_rate = 0.2;
  int n_histogram_pixels = 20;
  double min_continuous_segments = 3.0;
  double stride_mm = 5.0;
  OcclusionConfig occlusion;
  int min_correspondences = 10;
  Pose depth_from_color = Pose::Identity();

  bool use_region = true;
  bool use_depth = true;
  bool handle_occlusions = true;
  bool regularize = true;

  IterationSchedule refinement_schedule = IterationSchedule::Refinement();
  double refinement_lambda_t = 100.0;
  double refinement_stride_mm = 10.0;

  void Validate() const;
};

// Rotational regularizer for rotationally symmetric objects: `lambda` on
// `axis` (0, 1, 2 in the model frame) and `default_lambda` on the others,
// or `lambda` on all three axes if `axis` is negative.
Vec3 SymmetryConstraint(double lambda, double default_lambda, int axis = -1);

// Sum of per-correspondence terms in sequence order.
GradientHessian Assemble(std::span<const GradientHessian> terms);

// Solves (-H + diag(lambda_r, lambda_t)) theta = g. Returns nullopt if the
// system cannot be solved or the result is not finite.
std::optional<PoseVariation> NewtonStep(const GradientHessian &terms,
                                        const Vec3 &lambda_r, double lambda_t);
inline std::optional<PoseVariation> NewtonStep(const GradientHessian &terms,
                                               double lambda_r,
                                               double lambda_t) {
  return NewtonStep(terms, Vec3::Constant(lambda_r), lambda_t);
}

/// Wall time per phase, seconds.
struct TimingBreakdown {
  double lines = 0.0;
  double points = 0.0;
  double derivatives = 0.0;
  double histogram = 0.0;
  double other = 0.0;

  double Total() const {
    return lines + points + derivatives + histogram + other;
  }
};

struct FrameReport {
  Pose pose;
  // Pose after each correspondence iteration.
  std::vector<Pose> iteration_poses;
  // Valid correspondences per iteration.
  std::vector<int> n_lines;
  std::vector<int> n_points;
  int n_skipped_steps = 0;
  bool lost = false;
  TimingBreakdown timing;
};

/// Single-object tracker. Poses are color-camera poses C_T_M; the depth
/// camera follows through `depth_from_color`.
class Tracker {
 public:
  Tracker(const SparseViewpointModel &model, const TrackerConfig &config,
          const CameraIntrinsics &color_intrinsics,
          const CameraIntrinsics &depth_intrinsics);

  // Sets the pose and builds histograms from scratch at it.
  void Initialize(const Pose &camera_from_model, const ColorImage &color,
                  const DepthImage &depth);

  FrameReport TrackFrame(const ColorImage &color, const DepthImage &depth);

  // Refinement from an external initial pose with the refinement schedule;
  // histograms are rebuilt at every correspondence iteration.
  FrameReport RefinePose(const ColorImage &color, const DepthImage &depth,
                         const Pose &initial_pose);

  const Pose &pose() const { return pose_; }
  void set_pose(const Pose &pose) { pose_ = pose; }
  const ColorHistograms &histograms() const { return histograms_; }
  const TrackerConfig &config() const { return config_; }

  // Histogram update at the current pose with the given blend rate.
  void UpdateColorHistograms(const ColorImage &color, const DepthImage &depth,
                             double learning_rate);

 private:
  struct Correspondences {
    std::vector<CorrespondenceLine> lines;
    std::vector<CorrespondencePoint> points;
  };

  FrameReport Run(const ColorImage &color, const DepthImage &depth,
                  bool refinement);
  std::vector<CorrespondenceLine> CollectLines(const Viewpoint &view,
                                               const ColorImage &color,
                                               const DepthImage &depth,
                                               int scale) const;
  std::vector<CorrespondencePoint> CollectPoints(const Viewpoint &view,
                                                 const DepthImage &depth,
                                                 double radius,
                                                 double stride) const;

  const SparseViewpointModel &model_;
  TrackerConfig config_;
  CameraIntrinsics color_intrinsics_;
  CameraIntrinsics depth_intrinsics_;
  StepFunctionTable step_table_;
  ColorHistograms histograms_;
  OcclusionConfig occlusion_;
  Pose pose_;
};

}  // namespace fusetrack

#endif  // FUSETRACK_TRACKER_H_
