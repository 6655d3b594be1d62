// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_TRAJECTORY_IO_H_
#define FUSETRACK_TRAJECTORY_IO_H_

#include <fusetrack/metrics.h>

#include <filesystem>
#include <string>
#include <string_view>

namespace fusetrack {

// One line per frame: frame index followed by the 16 row-major entries of
// the 4x4 pose, printed with 17 significant digits.
std::string FormatTrajectory(const Trajectory &trajectory);

// Throws ParseError on malformed lines, invalid rotations or frame indices
// that do not increase strictly.
Trajectory ParseTrajectory(std::string_view text);

void SaveTrajectory(const std::filesystem::path &path,
                    const Trajectory &trajectory);
Trajectory LoadTrajectory(const std::filesystem::path &path);

}  // namespace fusetrack

#endif  // FUSETRACK_TRAJECTORY_IO_H_
