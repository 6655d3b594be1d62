// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_RENDER_H_
#define FUSETRACK_RENDER_H_

#include <fusetrack/geometry.h>
#include <fusetrack/image.h>
#include <fusetrack/mesh.h>

#include <optional>
#include <vector>

namespace fusetrack {

struct RenderResult {
  DepthImage depth;
  SilhouetteMask mask;
  // Index of the visible triangle per pixel, -1 for background.
  std::vector<int> triangle_ids;

  int TriangleAt(int u, int v) const {
    return triangle_ids[std::size_t(v) * depth.width + u];
  }
};

/// Deterministic z-buffer rasterizer. Pixel (u, v) has its center at
/// (u + 0.5, v + 0.5) in projection coordinates; shared edges follow the
/// top-left fill rule; both triangle orientations are rasterized. Depth is
/// interpolated perspective-correctly (linear in 1/Z) and triangles are
/// clipped against a near plane at 1 mm.
///
/// `camera_from_model` is C_T_M.
RenderResult RenderDepth(const TriangleMesh &mesh, const Pose &camera_from_model,
                         const CameraIntrinsics &intrinsics);

// Minimum valid depth over an n x n grid of samples spanning a square of
// `region_size` meters centered on `pixel`, with the metric size converted to
// pixels at `depth`. Zero-depth and out-of-image samples are skipped; returns
// nullopt if none is valid.
std::optional<double> MinimumDepthInRegion(const DepthImage &image,
                                           const CameraIntrinsics &intrinsics,
                                           const Vec2 &pixel, double depth,
                                           double region_size,
                                           int n_samples_per_axis = 5);

}  // namespace fusetrack

#endif  // FUSETRACK_RENDER_H_
