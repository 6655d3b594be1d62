// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_GEOMETRY_H_
#define FUSETRACK_GEOMETRY_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fusetrack {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat4 = Eigen::Matrix4d;

/// Rigid transform A_T_B mapping points written in frame B into frame A.
/// The rotation is kept as a 3x3 matrix because the derivatives consume it
/// directly.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose Identity() { return Pose{}; }
  static Pose FromMatrix(const Mat4 &matrix);
  static Pose Translation(const Vec3 &translation);

  Mat4 Matrix() const;
  Pose Inverse() const;

  Vec3 operator*(const Vec3 &point) const {
    return rotation * point + translation;
  }
  Pose operator*(const Pose &other) const {
    return Pose{rotation * other.rotation,
                rotation * other.translation + translation};
  }

  // Orthonormal with determinant +1 within tolerance.
  bool IsValid(double tolerance = 1e-9) const;
};

/// Small pose variation in the model frame: axis-angle rotation (radians)
/// followed by translation (meters).
struct PoseVariation {
  Vec3 rotation = Vec3::Zero();
  Vec3 translation = Vec3::Zero();

  static PoseVariation FromVector(const Vec6 &theta);
  Vec6 Vector() const;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double px = 0.0;
  double py = 0.0;
  int width = 0;
  int height = 0;

  // Throws std::invalid_argument if focal lengths or the principal point are
  // out of range.
  void Validate() const;
};

// First and second derivatives of a log-probability with respect to the
// pose variation (rotation first).
struct GradientHessian {
  Vec6 gradient = Vec6::Zero();
  Mat6 hessian = Mat6::Zero();
};

Mat3 Skew(const Vec3 &v);

// Pinhole projection into an undistorted image. Throws std::domain_error for
// points with Z <= 0.
Vec2 Project(const CameraIntrinsics &intrinsics, const Vec3 &point);

// Inverse of Project for a known depth. Throws std::domain_error for
// depth <= 0.
Vec3 ReconstructPoint(const CameraIntrinsics &intrinsics, const Vec2 &pixel,
                      double depth);

inline Vec3 TransformPoint(const Pose &pose, const Vec3 &point) {
  return pose * point;
}

// First-order variation (I + [theta_r]x) * point + theta_t.
Vec3 VariatePoint(const PoseVariation &theta, const Vec3 &point);

// Closed-form exponential of a rotation vector (Rodrigues), with a Taylor
// expansion below 1e-8 rad.
Mat3 ExpRotation(const Vec3 &rotation_vector);

// pose * [exp([theta_r]x), theta_t; 0, 1]. The result is re-orthonormalized
// when the rotation drifts by more than 1e-6.
Pose ExpUpdate(const Pose &pose, const PoseVariation &theta);

// Nearest rotation in the Frobenius sense (polar decomposition).
Mat3 Orthonormalize(const Mat3 &rotation);

// Rotation angle in radians, clamped for numerical safety.
double RotationAngle(const Mat3 &rotation);

}  // namespace fusetrack

#endif  // FUSETRACK_GEOMETRY_H_
