// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_DEPTH_MODALITY_H_
#define FUSETRACK_DEPTH_MODALITY_H_

#include <fusetrack/geometry.h>
#include <fusetrack/image.h>
#include <fusetrack/viewpoint_model.h>

#include <optional>

namespace fusetrack {

struct CorrespondencePoint {
  Vec3 model_point = Vec3::Zero();
  Vec3 model_normal = Vec3::UnitZ();
  // Measured point in the model frame at the pose used for the search.
  Vec3 measured_point = Vec3::Zero();
  // Same measurement in the depth-camera frame.
  Vec3 measured_point_depth_frame = Vec3::Zero();
  // Depth d_Z of the measurement in the depth-camera frame, meters.
  double depth = 0.0;
};

struct OcclusionConfig {
  double region_size = 0.02;  // side of the square sampling region, meters
  int n_samples_per_axis = 5;
  double threshold = 0.03;  // meters
};

// Projective search on a square grid around the projected surface point.
// Stride and radius are converted to whole pixels at the predicted depth;
// the candidate closest to the predicted point in 3D wins if it lies within
// `radius`. Distances in meters.
std::optional<CorrespondencePoint> FindCorrespondence(
    const DepthImage &depth_image, const SurfacePoint &surface_point,
    const Pose &depth_from_model, const CameraIntrinsics &intrinsics,
    double radius, double stride);

// Re-expresses the depth-frame measurement in the model frame of a new
// pose; d_Z is left unchanged.
void UpdateMeasuredPoint(CorrespondencePoint &point,
                         const Pose &depth_from_model);

// Signed point-to-plane distance N^T (X - P), meters.
inline double PointToPlaneResidual(const CorrespondencePoint &point) {
  return point.model_normal.dot(point.model_point - point.measured_point);
}

// Derivatives of ln p at theta = 0 with the linearized measurement
// transform. `sigma_d` is in millimeters per meter of depth.
GradientHessian DepthGradientHessian(const CorrespondencePoint &point,
                                     double sigma_d);

// True if the measured minimum depth around the projected point is closer
// than point depth - offset - threshold. Missing data never occludes.
bool IsOccluded(const DepthImage &depth_image, const Vec3 &point_depth_frame,
                double occlusion_offset, const CameraIntrinsics &intrinsics,
                const OcclusionConfig &config);

}  // namespace fusetrack

#endif  // FUSETRACK_DEPTH_MODALITY_H_
