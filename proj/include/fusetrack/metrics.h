// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_METRICS_H_
#define FUSETRACK_METRICS_H_

#include <fusetrack/geometry.h>

#include <array>
#include <span>
#include <vector>

namespace fusetrack {

struct TrajectoryEntry {
  int frame_index = 0;
  Pose pose;
};
using Trajectory = std::vector<TrajectoryEntry>;

// Relative transform est^-1 * gt between estimated and ground-truth model
// poses.
Pose RelativePose(const Pose &estimate, const Pose &ground_truth);

// Mean vertex displacement under `relative`, meters.
double AddError(std::span<const Vec3> vertices, const Pose &relative);

// Mean distance from each vertex to the closest transformed vertex.
double AddsError(std::span<const Vec3> vertices, const Pose &relative);

// Same distances measured between the two posed copies of the model in the
// camera frame; exactly zero for identical poses.
double AddError(std::span<const Vec3> vertices, const Pose &estimate,
                const Pose &ground_truth);
double AddsError(std::span<const Vec3> vertices, const Pose &estimate,
                 const Pose &ground_truth);

// Mean of max(1 - e / threshold, 0). Throws on empty input or a
// non-positive threshold.
double AucScore(std::span<const double> errors, double threshold);

// AUC with threshold 0.2 * diameter, scaled to [0, 20].
double OptAucScore(std::span<const double> errors, double diameter);

struct RmsReport {
  // x, y, z in millimeters, roll, pitch, yaw in degrees.
  std::array<double, 6> values{};
  int n_frames = 0;
  int n_excluded = 0;  // ground truth within 1 degree of gimbal lock
};

// Intrinsic ZYX Euler angles (yaw about z, pitch about y, roll about x) in
// radians, returned as (roll, pitch, yaw).
Vec3 EulerZyx(const Mat3 &rotation);

// RMS of per-frame translation and wrapped Euler angle differences.
// Throws on empty or mismatched trajectories.
RmsReport RmsErrors(const Trajectory &estimate, const Trajectory &ground_truth);

// Fraction of frames with translation error < 5 cm and rotation error < 5
// degrees. Values within 1e-9 of a threshold count as reaching it.
double RbotSuccess(const Trajectory &estimate, const Trajectory &ground_truth);

// Verifies equal lengths and matching, strictly increasing frame indices.
void CheckTrajectoryPair(const Trajectory &estimate,
                         const Trajectory &ground_truth);

}  // namespace fusetrack

#endif  // FUSETRACK_METRICS_H_
