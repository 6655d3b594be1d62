// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_IMAGE_H_
#define FUSETRACK_IMAGE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace fusetrack {

using Rgb = std::array<std::uint8_t, 3>;

struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major RGB

  ColorImage() = default;
  ColorImage(int width, int height, Rgb fill = {0, 0, 0});

  bool Contains(int u, int v) const {
    return u >= 0 && v >= 0 && u < width && v < height;
  }
  Rgb at(int u, int v) const {
    const std::uint8_t *p = &data[3 * (std::size_t(v) * width + u)];
    return {p[0], p[1], p[2]};
  }
  void set(int u, int v, Rgb color) {
    std::uint8_t *p = &data[3 * (std::size_t(v) * width + u)];
    p[0] = color[0];
    p[1] = color[1];
    p[2] = color[2];
  }
};

// Depth in meters, 0 marks a missing measurement.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DepthImage() = default;
  DepthImage(int width, int height, float fill = 0.0f)
      : width{width}, height{height} {
    values.assign(std::size_t(width) * height, fill);
  }

  bool Contains(int u, int v) const {
    return u >= 0 && v >= 0 && u < width && v < height;
  }
  float at(int u, int v) const { return values[std::size_t(v) * width + u]; }
  float &at(int u, int v) { return values[std::size_t(v) * width + u]; }
};

struct SilhouetteMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;  // 1 = foreground

  SilhouetteMask() = default;
  SilhouetteMask(int width, int height) : width{width}, height{height} {
    values.assign(std::size_t(width) * height, 0);
  }

  bool Contains(int u, int v) const {
    return u >= 0 && v >= 0 && u < width && v < height;
  }
  bool at(int u, int v) const {
    return values[std::size_t(v) * width + u] != 0;
  }
  void set(int u, int v, bool foreground) {
    values[std::size_t(v) * width + u] = foreground ? 1 : 0;
  }
  std::size_t CountForeground() const;
};

// Binary PPM (P6, 8 bit).
void WritePpm(const std::filesystem::path &path, const ColorImage &image);
ColorImage ReadPpm(const std::filesystem::path &path);

// 16-bit binary PGM with depth in millimeters (big-endian as per netpbm).
// Values are rounded to the nearest millimeter on write.
void WriteDepthPgm(const std::filesystem::path &path, const DepthImage &image);
DepthImage ReadDepthPgm(const std::filesystem::path &path);

// 8-bit PGM, 0 / 255.
void WriteMaskPgm(const std::filesystem::path &path,
                  const SilhouetteMask &mask);
SilhouetteMask ReadMaskPgm(const std::filesystem::path &path);

}  // namespace fusetrack

#endif  // FUSETRACK_IMAGE_H_
