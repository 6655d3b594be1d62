// SPDX-License-Identifier: MIT

#include <fusetrack/trajectory_io.h>

#include <fusetrack/mesh.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fusetrack {

std::string FormatTrajectory(const Trajectory &trajectory) {
  std::string text;
  char buffer[32];
  for (const auto &entry : trajectory) {
    text += std::to_string(entry.frame_index);
    Mat4 matrix = entry.pose.Matrix();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        std::snprintf(buffer, sizeof buffer, " %.17g", matrix(r, c));
        text += buffer;
      }
    text += '\n';
  }
  return text;
}

Trajectory ParseTrajectory(std::string_view text) {
  Trajectory trajectory;
  std::istringstream stream{std::string{text}};
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t\r")] == '#') continue;
    std::istringstream fields{line};
    TrajectoryEntry entry;
    if (!(fields >> entry.frame_index))
      throw ParseError(line_number, "expected a frame index");
    Mat4 matrix;
    for (int i = 0; i < 16; ++i) {
      std::string token;
      if (!(fields >> token))
        throw ParseError(line_number, "expected 16 pose values");
      double value;
      auto [end, error] =
          std::from_chars(token.data(), token.data() + token.size(), value);
      if (error != std::errc{} || end != token.data() + token.size())
        throw ParseError(line_number, "invalid number '" + token + "'");
      matrix(i / 4, i % 4) = value;
    }
    std::string extra;
    if (fields >> extra) throw ParseError(line_number, "trailing values");
    entry.pose = Pose::FromMatrix(matrix);
    if (!entry.pose.IsValid(1e-6))
      throw ParseError(line_number, "pose is not a rigid transform");
    if (!trajectory.empty() &&
        entry.frame_index <= trajectory.back().frame_index)
      throw ParseError(line_number, "frame indices must increase strictly");
    trajectory.push_back(entry);
  }
  return trajectory;
}

void SaveTrajectory(const std::filesystem::path &path,
                    const Trajectory &trajectory) {
  std::ofstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot write " + path.string());
  stream << FormatTrajectory(trajectory);
  if (!stream) throw std::runtime_error("failed writing " + path.string());
}

Trajectory LoadTrajectory(const std::filesystem::path &path) {
  std::ifstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream contents;
  contents << stream.rdbuf();
  return ParseTrajectory(contents.str());
}

}  // namespace fusetrack
