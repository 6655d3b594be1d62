// SPDX-License-Identifier: MIT

#include <fusetrack/depth_modality.h>

#include <fusetrack/render.h>

#include <cmath>
#include <stdexcept>

namespace fusetrack {

std::optional<CorrespondencePoint> FindCorrespondence(
    const DepthImage &depth_image, const SurfacePoint &surface_point,
    const Pose &depth_from_model, const CameraIntrinsics &intrinsics,
    double radius, double stride) {
  if (!(radius > 0.0) || !(stride > 0.0))
    throw std::invalid_argument("correspondence radius and stride must be > 0");
  const Vec3 predicted = depth_from_model * surface_point.point;
  if (predicted.z() <= 0.0) return std::nullopt;
  const Vec2 projection = Project(intrinsics, predicted);
  const int center_u = int(std::floor(projection.x()));
  const int center_v = int(std::floor(projection.y()));
  if (!depth_image.Contains(center_u, center_v)) return std::nullopt;

  const int stride_u =
      std::max(1, int(std::lround(stride * intrinsics.fx / predicted.z())));
  const int stride_v =
      std::max(1, int(std::lround(stride * intrinsics.fy / predicted.z())));
  const int n_steps = int(radius / stride);

  const double inv_fx = 1.0 / intrinsics.fx;
  const double inv_fy = 1.0 / intrinsics.fy;
  std::optional<Vec3> best;
  double best_squared = radius * radius;
  for (int b = -n_steps; b <= n_steps; ++b) {
    const int v = center_v + b * stride_v;
    if (v < 0 || v >= depth_image.height) continue;
    const double ray_y = (v + 0.5 - intrinsics.py) * inv_fy;
    const float *row = &depth_image.values[std::size_t(v) * depth_image.width];
    for (int a = -n_steps; a <= n_steps; ++a) {
      const int u = center_u + a * stride_u;
      if (u < 0 || u >= depth_image.width) continue;
      const double depth = row[u];
      if (!(depth > 0.0)) continue;
      const double ray_x = (u + 0.5 - intrinsics.px) * inv_fx;
      const Vec3 candidate{ray_x * depth, ray_y * depth, depth};
      const double squared = (candidate - predicted).squaredNorm();
      if (squared < best_squared || (!best && squared == best_squared)) {
        best = candidate;
        best_squared = squared;
      }
    }
  }
  if (!best) return std::nullopt;

  CorrespondencePoint point;
  point.model_point = surface_point.point;
  point.model_normal = surface_point.normal;
  point.measured_point_depth_frame = *best;
  point.depth = best->z();
  UpdateMeasuredPoint(point, depth_from_model);
  return point;
}

void UpdateMeasuredPoint(CorrespondencePoint &point,
                         const Pose &depth_from_model) {
  point.measured_point = depth_from_model.rotation.transpose() *
                         (point.measured_point_depth_frame -
                          depth_from_model.translation);
}

GradientHessian DepthGradientHessian(const CorrespondencePoint &point,
                                     double sigma_d) {
  const double sigma = point.depth * sigma_d * 1e-3;
  const double inverse_variance = 1.0 / (sigma * sigma);
  Vec6 jacobian;
  jacobian << point.measured_point.cross(point.model_normal),
      point.model_normal;
  const double residual = PointToPlaneResidual(point);
  GradientHessian terms;
  terms.gradient = (-residual * inverse_variance) * jacobian;
  terms.hessian = -inverse_variance * jacobian * jacobian.transpose();
  return terms;
}

bool IsOccluded(const DepthImage &depth_image, const Vec3 &point_depth_frame,
                double occlusion_offset, const CameraIntrinsics &intrinsics,
                const OcclusionConfig &config) {
  if (point_depth_frame.z() <= 0.0) return false;
  const Vec2 projection = Project(intrinsics, point_depth_frame);
  auto minimum = MinimumDepthInRegion(depth_image, intrinsics, projection,
                                      point_depth_frame.z(), config.region_size,
                                      config.n_samples_per_axis);
  if (!minimum) return false;
  return point_depth_frame.z() - occlusion_offset - config.threshold >
         *minimum;
}

}  // namespace fusetrack
