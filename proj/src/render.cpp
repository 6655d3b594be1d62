// SPDX-License-Identifier: MIT

#include <fusetrack/render.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fusetrack {

namespace {

constexpr double kNearPlane = 1e-3;

struct ScreenVertex {
  double x;
  double y;
  double inv_z;
};

double EdgeFunction(const ScreenVertex &a, const ScreenVertex &b, double px,
                    double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Edges owned by a triangle when a pixel center lies exactly on them. For a
// positively oriented triangle in y-down image coordinates these are the top
// and left edges; for any edge exactly one of the two traversal directions
// qualifies.
bool IsTopLeft(const ScreenVertex &a, const ScreenVertex &b) {
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

bool Covers(double edge, bool top_left) {
  return edge > 0.0 || (edge == 0.0 && top_left);
}

// Sutherland-Hodgman against z >= kNearPlane.
int ClipNear(const Vec3 (&in)[3], Vec3 (&out)[4]) {
  int n_out = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 &current = in[i];
    const Vec3 &next = in[(i + 1) % 3];
    bool current_inside = current.z() >= kNearPlane;
    bool next_inside = next.z() >= kNearPlane;
    if (current_inside) out[n_out++] = current;
    if (current_inside != next_inside) {
      double t = (kNearPlane - current.z()) / (next.z() - current.z());
      out[n_out++] = current + t * (next - current);
    }
  }
  return n_out;
}

}  // namespace

RenderResult RenderDepth(const TriangleMesh &mesh, const Pose &camera_from_model,
                         const CameraIntrinsics &intrinsics) {
  const int width = intrinsics.width;
  const int height = intrinsics.height;
  RenderResult result{DepthImage{width, height}, SilhouetteMask{width, height},
                      std::vector<int>(std::size_t(width) * height, -1)};
  std::vector<double> z_buffer(std::size_t(width) * height,
                               std::numeric_limits<double>::infinity());

  std::vector<Vec3> camera_vertices;
  camera_vertices.reserve(mesh.vertices.size());
  for (const auto &v : mesh.vertices)
    camera_vertices.push_back(camera_from_model * v);

  auto to_screen = [&](const Vec3 &p) {
    return ScreenVertex{p.x() / p.z() * intrinsics.fx + intrinsics.px,
                        p.y() / p.z() * intrinsics.fy + intrinsics.py,
                        1.0 / p.z()};
  };

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto &tri = mesh.triangles[t];
    Vec3 in[3] = {camera_vertices[tri[0]], camera_vertices[tri[1]],
                  camera_vertices[tri[2]]};
    Vec3 clipped[4];
    int n_clipped = ClipNear(in, clipped);
    for (int k = 1; k + 1 < n_clipped; ++k) {
      ScreenVertex v0 = to_screen(clipped[0]);
      ScreenVertex v1 = to_screen(clipped[k]);
      ScreenVertex v2 = to_screen(clipped[k + 1]);
      double area = EdgeFunction(v0, v1, v2.x, v2.y);
      if (area == 0.0 || !std::isfinite(area)) continue;
      if (area < 0.0) {
        std::swap(v1, v2);
        area = -area;
      }
      const bool top_left_0 = IsTopLeft(v1, v2);
      const bool top_left_1 = IsTopLeft(v2, v0);
      const bool top_left_2 = IsTopLeft(v0, v1);

      double min_x = std::min({v0.x, v1.x, v2.x});
      double max_x = std::max({v0.x, v1.x, v2.x});
      double min_y = std::min({v0.y, v1.y, v2.y});
      double max_y = std::max({v0.y, v1.y, v2.y});
      int u_begin = std::max(0, int(std::floor(min_x - 0.5)));
      int u_end = std::min(width - 1, int(std::ceil(max_x - 0.5)));
      int v_begin = std::max(0, int(std::floor(min_y - 0.5)));
      int v_end = std::min(height - 1, int(std::ceil(max_y - 0.5)));

      for (int v = v_begin; v <= v_end; ++v) {
        double py = v + 0.5;
        for (int u = u_begin; u <= u_end; ++u) {
          double px = u + 0.5;
          double e0 = EdgeFunction(v1, v2, px, py);
          double e1 = EdgeFunction(v2, v0, px, py);
          double e2 = EdgeFunction(v0, v1, px, py);
          if (!Covers(e0, top_left_0) || !Covers(e1, top_left_1) ||
              !Covers(e2, top_left_2))
            continue;
          double inv_z = (e0 * v0.inv_z + e1 * v1.inv_z + e2 * v2.inv_z) / area;
          if (!(inv_z > 0.0)) continue;
          double z = 1.0 / inv_z;
          std::size_t index = std::size_t(v) * width + u;
          if (z < z_buffer[index]) {
            z_buffer[index] = z;
            result.triangle_ids[index] = int(t);
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < z_buffer.size(); ++i) {
    if (result.triangle_ids[i] >= 0) {
      result.depth.values[i] = float(z_buffer[i]);
      result.mask.values[i] = 1;
    }
  }
  return result;
}

std::optional<double> MinimumDepthInRegion(const DepthImage &image,
                                           const CameraIntrinsics &intrinsics,
                                           const Vec2 &pixel, double depth,
                                           double region_size,
                                           int n_samples_per_axis) {
  const double size_u = region_size * intrinsics.fx / depth;
  const double size_v = region_size * intrinsics.fy / depth;
  const double denominator = std::max(1, n_samples_per_axis - 1);
  std::optional<double> minimum;
  for (int j = 0; j < n_samples_per_axis; ++j) {
    double offset_v = n_samples_per_axis > 1 ? (j / denominator - 0.5) : 0.0;
    int v = int(std::floor(pixel.y() + offset_v * size_v));
    for (int i = 0; i < n_samples_per_axis; ++i) {
      double offset_u = n_samples_per_axis > 1 ? (i / denominator - 0.5) : 0.0;
      int u = int(std::floor(pixel.x() + offset_u * size_u));
      if (!image.Contains(u, v)) continue;
      double value = image.at(u, v);
      if (value <= 0.0) continue;
      if (!minimum || value < *minimum) minimum = value;
    }
  }
  return minimum;
}

}  // namespace fusetrack
