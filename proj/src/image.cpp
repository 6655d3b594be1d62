// SPDX-License-Identifier: MIT

#include <fusetrack/image.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fusetrack {

namespace {

struct NetpbmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int max_value = 0;
};

void SkipWhitespaceAndComments(std::istream &stream) {
  while (true) {
    int c = stream.peek();
    if (c == '#') {
      std::string line;
      std::getline(stream, line);
    } else if (std::isspace(c)) {
      stream.get();
    } else {
      return;
    }
  }
}

NetpbmHeader ReadHeader(std::istream &stream,
                        const std::filesystem::path &path) {
  NetpbmHeader header;
  stream >> header.magic;
  SkipWhitespaceAndComments(stream);
  stream >> header.width;
  SkipWhitespaceAndComments(stream);
  stream >> header.height;
  SkipWhitespaceAndComments(stream);
  stream >> header.max_value;
  if (!stream || header.width <= 0 || header.height <= 0 ||
      header.max_value <= 0 || header.max_value > 65535)
    throw std::runtime_error("invalid netpbm header in " + path.string());
  stream.get();  // single whitespace before the raster
  return header;
}

std::ifstream OpenForReading(const std::filesystem::path &path) {
  std::ifstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot open " + path.string());
  return stream;
}

std::ofstream OpenForWriting(const std::filesystem::path &path) {
  std::ofstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot write " + path.string());
  return stream;
}

}  // namespace

ColorImage::ColorImage(int width, int height, Rgb fill)
    : width{width}, height{height} {
  data.resize(std::size_t(width) * height * 3);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i] = fill[0];
    data[i + 1] = fill[1];
    data[i + 2] = fill[2];
  }
}

std::size_t SilhouetteMask::CountForeground() const {
  return std::size_t(std::count(values.begin(), values.end(), 1));
}

void WritePpm(const std::filesystem::path &path, const ColorImage &image) {
  auto stream = OpenForWriting(path);
  stream << "P6\n" << image.width << " " << image.height << "\n255\n";
  stream.write(reinterpret_cast<const char *>(image.data.data()),
               std::streamsize(image.data.size()));
}

ColorImage ReadPpm(const std::filesystem::path &path) {
  auto stream = OpenForReading(path);
  NetpbmHeader header = ReadHeader(stream, path);
  if (header.magic != "P6" || header.max_value != 255)
    throw std::runtime_error("expected an 8-bit P6 image: " + path.string());
  ColorImage image{header.width, header.height};
  stream.read(reinterpret_cast<char *>(image.data.data()),
              std::streamsize(image.data.size()));
  if (!stream) throw std::runtime_error("truncated image: " + path.string());
  return image;
}

void WriteDepthPgm(const std::filesystem::path &path, const DepthImage &image) {
  auto stream = OpenForWriting(path);
  stream << "P5\n" << image.width << " " << image.height << "\n65535\n";
  std::vector<char> raster(image.values.size() * 2);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    double millimeters = std::round(double(image.values[i]) * 1000.0);
    auto value = std::uint16_t(std::clamp(millimeters, 0.0, 65535.0));
    raster[2 * i] = char(value >> 8);
    raster[2 * i + 1] = char(value & 0xff);
  }
  stream.write(raster.data(), std::streamsize(raster.size()));
}

DepthImage ReadDepthPgm(const std::filesystem::path &path) {
  auto stream = OpenForReading(path);
  NetpbmHeader header = ReadHeader(stream, path);
  if (header.magic != "P5" || header.max_value <= 255)
    throw std::runtime_error("expected a 16-bit P5 image: " + path.string());
  DepthImage image{header.width, header.height};
  std::vector<unsigned char> raster(image.values.size() * 2);
  stream.read(reinterpret_cast<char *>(raster.data()),
              std::streamsize(raster.size()));
  if (!stream) throw std::runtime_error("truncated image: " + path.string());
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    unsigned value = (unsigned(raster[2 * i]) << 8) | raster[2 * i + 1];
    image.values[i] = float(double(value) / 1000.0);
  }
  return image;
}

void WriteMaskPgm(const std::filesystem::path &path,
                  const SilhouetteMask &mask) {
  auto stream = OpenForWriting(path);
  stream << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<char> raster(mask.values.size());
  for (std::size_t i = 0; i < raster.size(); ++i)
    raster[i] = mask.values[i] ? char(255) : char(0);
  stream.write(raster.data(), std::streamsize(raster.size()));
}

SilhouetteMask ReadMaskPgm(const std::filesystem::path &path) {
  auto stream = OpenForReading(path);
  NetpbmHeader header = ReadHeader(stream, path);
  if (header.magic != "P5" || header.max_value != 255)
    throw std::runtime_error("expected an 8-bit P5 image: " + path.string());
  SilhouetteMask mask{header.width, header.height};
  std::vector<unsigned char> raster(mask.values.size());
  stream.read(reinterpret_cast<char *>(raster.data()),
              std::streamsize(raster.size()));
  if (!stream) throw std::runtime_error("truncated image: " + path.string());
  for (std::size_t i = 0; i < raster.size(); ++i)
    mask.values[i] = raster[i] > 127 ? 1 : 0;
  return mask;
}

}  // namespace fusetrack
