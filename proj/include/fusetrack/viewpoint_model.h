// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_VIEWPOINT_MODEL_H_
#define FUSETRACK_VIEWPOINT_MODEL_H_

#include <fusetrack/geometry.h>
#include <fusetrack/mesh.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fusetrack {

/// Point on the rendered silhouette contour. `normal` is the outward
/// silhouette normal lifted into 3D (perpendicular to the generating view
/// ray). The free lengths are the distances along -normal / +normal over
/// which foreground / background stay uninterrupted in the generating view.
struct ContourPoint {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();
  double foreground_free_length = 0.0;
  double background_free_length = 0.0;
};

/// Point on the visible surface with the outward triangle normal.
/// `occlusion_offset` is the point depth minus the minimum rendered depth
/// inside the occlusion region around it (>= 0).
struct SurfacePoint {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double occlusion_offset = 0.0;
};

struct Viewpoint {
  // Unit vector from the virtual camera to the model center (model frame).
  Vec3 orientation = Vec3::UnitZ();
  std::vector<ContourPoint> contour_points;
  std::vector<SurfacePoint> surface_points;
};

struct ModelConfig {
  int subdivision_level = 4;  // 2562 views
  double sphere_radius = 0.8;
  int n_contour_points = 200;
  int n_surface_points = 200;
  int render_width = 640;
  int render_height = 480;
  // Fraction of min(width, height) covered by the projected bounding sphere
  // diameter.
  double image_fill = 0.9;
  double occlusion_region = 0.02;
  double max_free_length = 0.1;
  std::uint64_t seed = 0;
  // Worker threads for generation; not part of the serialized model.
  int n_threads = 1;
};

struct SparseViewpointModel {
  ModelConfig config;
  double render_focal_length = 0.0;
  std::vector<Viewpoint> views;

  std::size_t ClosestViewIndex(const Pose &camera_from_model) const;
  const Viewpoint &ClosestView(const Pose &camera_from_model) const {
    return views[ClosestViewIndex(camera_from_model)];
  }
  CameraIntrinsics RenderIntrinsics() const;
};

// Icosahedron vertices subdivided `level` times and projected onto the unit
// sphere; 10 * 4^level + 2 vertices in a deterministic order.
std::vector<Vec3> GeodesicGrid(int level);

// C_T_M of a virtual camera on `radius * direction` looking at the model
// origin. The image "up" axis follows model z projected orthogonal to the
// view direction, model x near the poles.
Pose VirtualCameraPose(const Vec3 &direction, double radius);

// Renders the mesh from every grid vertex and samples contour / surface
// points. Throws std::runtime_error if the object is invisible in all views.
SparseViewpointModel GenerateModel(const TriangleMesh &mesh,
                                   const ModelConfig &config);

// Little-endian blob: magic "ICGM", u32 version, config, views.
std::string SerializeModel(const SparseViewpointModel &model);
SparseViewpointModel DeserializeModel(const std::string &bytes);
void SaveModel(const std::filesystem::path &path,
               const SparseViewpointModel &model);
SparseViewpointModel LoadModel(const std::filesystem::path &path);

}  // namespace fusetrack

#endif  // FUSETRACK_VIEWPOINT_MODEL_H_
