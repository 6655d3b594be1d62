// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_MESH_H_
#define FUSETRACK_MESH_H_

#include <fusetrack/geometry.h>

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fusetrack {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string &message)
      : std::runtime_error{"line " + std::to_string(line) + ": " + message},
        line_{line} {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Triangle mesh in the model frame, vertices in meters.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  // Unit normal from counter-clockwise winding.
  Vec3 TriangleNormal(std::size_t index) const;
  double TriangleArea(std::size_t index) const;
  // Largest distance from the model origin to any vertex.
  double BoundingRadius() const;
  // Largest distance between two vertices (brute force).
  double Diameter() const;
};

// Parses the OBJ subset: `v x y z`, `f i j k ...` with optional `/vt/vn`
// suffixes, negative (relative) indices and `#` comments. Polygons are fan
// triangulated. Other record types are ignored. Throws ParseError naming the
// offending line.
TriangleMesh ParseObj(std::string_view text);
TriangleMesh LoadMesh(const std::filesystem::path &path);
std::string WriteObj(const TriangleMesh &mesh);

// Axis-aligned box centered at the origin.
TriangleMesh MakeBox(const Vec3 &size);
// UV sphere with poles on the z axis.
TriangleMesh MakeSphere(double radius, int n_slices, int n_stacks);
// Closed cylinder around the z axis, centered at the origin.
TriangleMesh MakeCylinder(double radius, double height, int n_slices);

}  // namespace fusetrack

#endif  // FUSETRACK_MESH_H_
