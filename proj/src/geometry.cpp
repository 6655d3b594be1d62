// SPDX-License-Identifier: MIT

#include <fusetrack/geometry.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusetrack {

Pose Pose::FromMatrix(const Mat4 &matrix) {
  return Pose{matrix.topLeftCorner<3, 3>(), matrix.topRightCorner<3, 1>()};
}

Pose Pose::Translation(const Vec3 &translation) {
  return Pose{Mat3::Identity(), translation};
}

Mat4 Pose::Matrix() const {
  Mat4 matrix = Mat4::Identity();
  matrix.topLeftCorner<3, 3>() = rotation;
  matrix.topRightCorner<3, 1>() = translation;
  return matrix;
}

Pose Pose::Inverse() const {
  Mat3 rotation_t = rotation.transpose();
  return Pose{rotation_t, -(rotation_t * translation)};
}

bool Pose::IsValid(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  if (((rotation.transpose() * rotation) - Mat3::Identity())
          .cwiseAbs()
          .maxCoeff() > tolerance)
    return false;
  return std::abs(rotation.determinant() - 1.0) <= tolerance * 10.0;
}

PoseVariation PoseVariation::FromVector(const Vec6 &theta) {
  return PoseVariation{theta.head<3>(), theta.tail<3>()};
}

Vec6 PoseVariation::Vector() const {
  Vec6 theta;
  theta << rotation, translation;
  return theta;
}

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw std::invalid_argument("focal lengths must be positive");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("image size must be positive");
  if (!(px >= 0.0 && px < width && py >= 0.0 && py < height))
    throw std::invalid_argument("principal point outside the image");
}

Mat3 Skew(const Vec3 &v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Vec2 Project(const CameraIntrinsics &intrinsics, const Vec3 &point) {
  if (!(point.z() > 0.0))
    throw std::domain_error("cannot project a point with non-positive depth");
  return Vec2{point.x() / point.z() * intrinsics.fx + intrinsics.px,
              point.y() / point.z() * intrinsics.fy + intrinsics.py};
}

Vec3 ReconstructPoint(const CameraIntrinsics &intrinsics, const Vec2 &pixel,
                      double depth) {
  if (!(depth > 0.0))
    throw std::domain_error("cannot reconstruct a point with depth <= 0");
  return Vec3{(pixel.x() - intrinsics.px) / intrinsics.fx * depth,
              (pixel.y() - intrinsics.py) / intrinsics.fy * depth, depth};
}

Vec3 VariatePoint(const PoseVariation &theta, const Vec3 &point) {
  return point + theta.rotation.cross(point) + theta.translation;
}

Mat3 ExpRotation(const Vec3 &rotation_vector) {
  const double angle = rotation_vector.norm();
  const Mat3 k = Skew(rotation_vector);
  if (angle < 1e-8) return Mat3::Identity() + k + 0.5 * k * k;
  const double a = std::sin(angle) / angle;
  const double b = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 Orthonormalize(const Mat3 &rotation) {
  Eigen::JacobiSVD<Mat3> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 result = svd.matrixU() * svd.matrixV().transpose();
  if (result.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    result = u * svd.matrixV().transpose();
  }
  return result;
}

Pose ExpUpdate(const Pose &pose, const PoseVariation &theta) {
  Pose result{pose.rotation * ExpRotation(theta.rotation),
              pose.rotation * theta.translation + pose.translation};
  double drift = ((result.rotation.transpose() * result.rotation) -
                  Mat3::Identity())
                     .cwiseAbs()
                     .maxCoeff();
  if (drift > 1e-6) result.rotation = Orthonormalize(result.rotation);
  return result;
}

double RotationAngle(const Mat3 &rotation) {
  // atan2 form stays accurate near 0 and pi, unlike acos of the trace.
  Vec3 axis{rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0),
            rotation(1, 0) - rotation(0, 1)};
  double cos_angle = 0.5 * (rotation.trace() - 1.0);
  double sin_angle = 0.5 * axis.norm();
  return std::atan2(sin_angle, std::clamp(cos_angle, -1.0, 1.0));
}

}  // namespace fusetrack
