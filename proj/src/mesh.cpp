// SPDX-License-Identifier: MIT

#include <fusetrack/mesh.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fusetrack {

namespace {

constexpr double kMinTriangleArea = 1e-12;

std::vector<std::string_view> SplitTokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

double ParseDouble(std::string_view token, int line_number) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() ||
      !std::isfinite(value))
    throw ParseError(line_number,
                     "invalid number '" + std::string{token} + "'");
  return value;
}

int ParseIndex(std::string_view token, int n_vertices, int line_number) {
  std::string_view index_part = token.substr(0, token.find('/'));
  long value = 0;
  auto [ptr, ec] = std::from_chars(
      index_part.data(), index_part.data() + index_part.size(), value);
  if (ec != std::errc{} || ptr != index_part.data() + index_part.size())
    throw ParseError(line_number,
                     "invalid face index '" + std::string{token} + "'");
  if (value == 0)
    throw ParseError(line_number, "face index 0 is invalid (OBJ is 1-based)");
  long resolved = value > 0 ? value - 1 : n_vertices + value;
  if (resolved < 0 || resolved >= n_vertices)
    throw ParseError(line_number,
                     "face index " + std::to_string(value) + " out of range");
  return int(resolved);
}

}  // namespace

Vec3 TriangleMesh::TriangleNormal(std::size_t index) const {
  const auto &t = triangles[index];
  Vec3 n = (vertices[t[1]] - vertices[t[0]])
               .cross(vertices[t[2]] - vertices[t[0]]);
  double norm = n.norm();
  return norm > 0.0 ? Vec3{n / norm} : Vec3::UnitZ();
}

double TriangleMesh::TriangleArea(std::size_t index) const {
  const auto &t = triangles[index];
  return 0.5 * (vertices[t[1]] - vertices[t[0]])
                   .cross(vertices[t[2]] - vertices[t[0]])
                   .norm();
}

double TriangleMesh::BoundingRadius() const {
  double radius = 0.0;
  for (const auto &v : vertices) radius = std::max(radius, v.norm());
  return radius;
}

double TriangleMesh::Diameter() const {
  double diameter_squared = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      diameter_squared = std::max(diameter_squared,
                                  (vertices[i] - vertices[j]).squaredNorm());
  return std::sqrt(diameter_squared);
}

TriangleMesh ParseObj(std::string_view text) {
  TriangleMesh mesh;
  int line_number = 0;
  std::size_t position = 0;
  while (position <= text.size()) {
    std::size_t end = text.find('\n', position);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(position, end - position);
    position = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto comment = line.find('#'); comment != std::string_view::npos)
      line = line.substr(0, comment);
    auto tokens = SplitTokens(line);
    if (tokens.empty()) continue;

    if (tokens[0] == "v") {
      if (tokens.size() < 4)
        throw ParseError(line_number, "vertex record needs 3 coordinates");
      mesh.vertices.emplace_back(ParseDouble(tokens[1], line_number),
                                 ParseDouble(tokens[2], line_number),
                                 ParseDouble(tokens[3], line_number));
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4)
        throw ParseError(line_number, "face record needs at least 3 indices");
      std::vector<int> indices;
      for (std::size_t i = 1; i < tokens.size(); ++i)
        indices.push_back(
            ParseIndex(tokens[i], int(mesh.vertices.size()), line_number));
      for (std::size_t i = 1; i + 1 < indices.size(); ++i) {
        mesh.triangles.push_back({indices[0], indices[i], indices[i + 1]});
        if (mesh.TriangleArea(mesh.triangles.size() - 1) <= kMinTriangleArea)
          mesh.triangles.pop_back();
      }
    }
    if (end == text.size()) break;
  }
  if (mesh.vertices.empty())
    throw ParseError(line_number, "mesh contains no vertices");
  if (mesh.triangles.empty())
    throw ParseError(line_number, "mesh contains no non-degenerate faces");
  return mesh;
}

TriangleMesh LoadMesh(const std::filesystem::path &path) {
  std::ifstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot open mesh " + path.string());
  std::stringstream buffer;
  buffer << stream.rdbuf();
  return ParseObj(buffer.str());
}

std::string WriteObj(const TriangleMesh &mesh) {
  std::ostringstream out;
  out.precision(17);
  for (const auto &v : mesh.vertices)
    out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto &t : mesh.triangles)
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  return out.str();
}

TriangleMesh MakeBox(const Vec3 &size) {
  TriangleMesh mesh;
  Vec3 h = 0.5 * size;
  for (int i = 0; i < 8; ++i)
    mesh.vertices.emplace_back(i & 1 ? h.x() : -h.x(), i & 2 ? h.y() : -h.y(),
                               i & 4 ? h.z() : -h.z());
  // Counter-clockwise seen from outside.
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto &q : quads) {
    mesh.triangles.push_back({q[0], q[1], q[2]});
    mesh.triangles.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

TriangleMesh MakeSphere(double radius, int n_slices, int n_stacks) {
  TriangleMesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0, radius);
  for (int i = 1; i < n_stacks; ++i) {
    double polar = M_PI * double(i) / n_stacks;
    for (int j = 0; j < n_slices; ++j) {
      double azimuth = 2.0 * M_PI * double(j) / n_slices;
      mesh.vertices.emplace_back(radius * std::sin(polar) * std::cos(azimuth),
                                 radius * std::sin(polar) * std::sin(azimuth),
                                 radius * std::cos(polar));
    }
  }
  mesh.vertices.emplace_back(0.0, 0.0, -radius);
  const int south = int(mesh.vertices.size()) - 1;
  auto ring = [n_slices](int stack, int slice) {
    return 1 + (stack - 1) * n_slices + (slice % n_slices);
  };
  for (int j = 0; j < n_slices; ++j)
    mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i < n_stacks - 1; ++i) {
    for (int j = 0; j < n_slices; ++j) {
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (int j = 0; j < n_slices; ++j)
    mesh.triangles.push_back(
        {south, ring(n_stacks - 1, j + 1), ring(n_stacks - 1, j)});
  return mesh;
}

TriangleMesh MakeCylinder(double radius, double height, int n_slices) {
  TriangleMesh mesh;
  const double h = 0.5 * height;
  for (int j = 0; j < n_slices; ++j) {
    double azimuth = 2.0 * M_PI * double(j) / n_slices;
    double x = radius * std::cos(azimuth);
    double y = radius * std::sin(azimuth);
    mesh.vertices.emplace_back(x, y, -h);
    mesh.vertices.emplace_back(x, y, h);
  }
  const int bottom = int(mesh.vertices.size());
  mesh.vertices.emplace_back(0.0, 0.0, -h);
  const int top = bottom + 1;
  mesh.vertices.emplace_back(0.0, 0.0, h);
  for (int j = 0; j < n_slices; ++j) {
    int b0 = 2 * j;
    int t0 = 2 * j + 1;
    int b1 = 2 * ((j + 1) % n_slices);
    int t1 = b1 + 1;
    mesh.triangles.push_back({b0, b1, t1});
    mesh.triangles.push_back({b0, t1, t0});
    mesh.triangles.push_back({bottom, b1, b0});
    mesh.triangles.push_back({top, t0, t1});
  }
  return mesh;
}

}  // namespace fusetrack
