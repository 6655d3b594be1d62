// SPDX-License-Identifier: MIT

#include <fusetrack/metrics.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fusetrack {

namespace {

constexpr double kRadiansToDegrees = 180.0 / M_PI;

// Wraps an angle difference to (-180, 180] degrees.
double WrapDegrees(double angle) {
  double wrapped = std::remainder(angle, 360.0);
  if (wrapped <= -180.0) wrapped += 360.0;
  return wrapped;
}

}  // namespace

Pose RelativePose(const Pose &estimate, const Pose &ground_truth) {
  return estimate.Inverse() * ground_truth;
}

double AddError(std::span<const Vec3> vertices, const Pose &relative) {
  if (vertices.empty()) throw std::invalid_argument("no vertices");
  double sum = 0.0;
  for (const auto &vertex : vertices) sum += (vertex - relative * vertex).norm();
  return sum / double(vertices.size());
}

namespace {

double ClosestPointMean(std::span<const Vec3> vertices, const Pose &reference,
                        const Pose &moved) {
  if (vertices.empty()) throw std::invalid_argument("no vertices");
  std::vector<Vec3> transformed;
  transformed.reserve(vertices.size());
  for (const auto &vertex : vertices) transformed.push_back(moved * vertex);
  double sum = 0.0;
  for (const auto &vertex : vertices) {
    const Vec3 target = reference * vertex;
    double best = std::numeric_limits<double>::infinity();
    for (const auto &other : transformed)
      best = std::min(best, (target - other).squaredNorm());
    sum += std::sqrt(best);
  }
  return sum / double(vertices.size());
}

}  // namespace

double AddsError(std::span<const Vec3> vertices, const Pose &relative) {
  return ClosestPointMean(vertices, Pose::Identity(), relative);
}

double AddError(std::span<const Vec3> vertices, const Pose &estimate,
                const Pose &ground_truth) {
  if (vertices.empty()) throw std::invalid_argument("no vertices");
  double sum = 0.0;
  for (const auto &vertex : vertices)
    sum += (estimate * vertex - ground_truth * vertex).norm();
  return sum / double(vertices.size());
}

double AddsError(std::span<const Vec3> vertices, const Pose &estimate,
                 const Pose &ground_truth) {
  return ClosestPointMean(vertices, estimate, ground_truth);
}

double AucScore(std::span<const double> errors, double threshold) {
  if (errors.empty()) throw std::invalid_argument("AUC of empty error list");
  if (!(threshold > 0.0))
    throw std::invalid_argument("AUC threshold must be positive");
  double sum = 0.0;
  for (double error : errors) sum += std::max(1.0 - error / threshold, 0.0);
  return sum / double(errors.size());
}

double OptAucScore(std::span<const double> errors, double diameter) {
  return 20.0 * AucScore(errors, 0.2 * diameter);
}

Vec3 EulerZyx(const Mat3 &r) {
  double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double roll = std::atan2(r(2, 1), r(2, 2));
  double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

void CheckTrajectoryPair(const Trajectory &estimate,
                         const Trajectory &ground_truth) {
  if (estimate.empty()) throw std::invalid_argument("empty trajectory");
  if (estimate.size() != ground_truth.size())
    throw std::invalid_argument("trajectory lengths differ");
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    if (estimate[i].frame_index != ground_truth[i].frame_index)
      throw std::invalid_argument("frame indices differ at entry " +
                                  std::to_string(i));
    if (i > 0 && estimate[i].frame_index <= estimate[i - 1].frame_index)
      throw std::invalid_argument("frame indices must increase strictly");
  }
}

RmsReport RmsErrors(const Trajectory &estimate,
                    const Trajectory &ground_truth) {
  CheckTrajectoryPair(estimate, ground_truth);
  RmsReport report;
  std::array<double, 6> sums{};
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const Pose &est = estimate[i].pose;
    const Pose &gt = ground_truth[i].pose;
    Vec3 gt_angles = EulerZyx(gt.rotation) * kRadiansToDegrees;
    if (std::abs(gt_angles.y()) > 89.0) {
      ++report.n_excluded;
      continue;
    }
    Vec3 est_angles = EulerZyx(est.rotation) * kRadiansToDegrees;
    Vec3 dt = (est.translation - gt.translation) * 1000.0;
    for (int k = 0; k < 3; ++k) {
      sums[k] += dt[k] * dt[k];
      double da = WrapDegrees(est_angles[k] - gt_angles[k]);
      sums[3 + k] += da * da;
    }
    ++report.n_frames;
  }
  if (report.n_frames == 0) return report;
  for (int k = 0; k < 6; ++k)
    report.values[k] = std::sqrt(sums[k] / report.n_frames);
  return report;
}

double RbotSuccess(const Trajectory &estimate,
                   const Trajectory &ground_truth) {
  CheckTrajectoryPair(estimate, ground_truth);
  constexpr double kTranslationLimit = 0.05;
  constexpr double kRotationLimit = 5.0;
  constexpr double kTolerance = 1e-9;
  int n_success = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    Pose relative = RelativePose(estimate[i].pose, ground_truth[i].pose);
    double translation_error = relative.translation.norm();
    double cosine =
        std::clamp((relative.rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
    double rotation_error = std::acos(cosine) * kRadiansToDegrees;
    if (translation_error < kTranslationLimit - kTolerance &&
        rotation_error < kRotationLimit - kTolerance)
      ++n_success;
  }
  return double(n_success) / double(estimate.size());
}

}  // namespace fusetrack
