// SPDX-License-Identifier: MIT

#include <fusetrack/viewpoint_model.h>

#include <fusetrack/random.h>
#include <fusetrack/render.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace fusetrack {

namespace {

constexpr char kMagic[4] = {'I', 'C', 'G', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr int kNormalWindowRadius = 3;

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

struct PixelCandidate {
  int u;
  int v;
};

bool IsContourPixel(const SilhouetteMask &mask, int u, int v) {
  if (!mask.at(u, v)) return false;
  const int du[4] = {1, -1, 0, 0};
  const int dv[4] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    int nu = u + du[k];
    int nv = v + dv[k];
    if (!mask.Contains(nu, nv) || !mask.at(nu, nv)) return true;
  }
  return false;
}

// Outward 2D silhouette normal from the mask gradient over a disc.
std::optional<Vec2> ContourNormal2D(const SilhouetteMask &mask, int u, int v) {
  Vec2 sum = Vec2::Zero();
  const int r = kNormalWindowRadius;
  for (int dv = -r; dv <= r; ++dv) {
    for (int du = -r; du <= r; ++du) {
      if (du * du + dv * dv > r * r) continue;
      int nu = u + du;
      int nv = v + dv;
      if (mask.Contains(nu, nv) && mask.at(nu, nv)) sum -= Vec2(du, dv);
    }
  }
  double norm = sum.norm();
  if (norm < 1e-9) return std::nullopt;
  return Vec2{sum / norm};
}

bool MaskAt(const SilhouetteMask &mask, const Vec2 &position,
            bool outside_value) {
  int u = int(std::floor(position.x()));
  int v = int(std::floor(position.y()));
  if (!mask.Contains(u, v)) return outside_value;
  return mask.at(u, v);
}

// Free lengths in pixels along -normal (foreground) and +normal (background).
std::pair<double, double> FreeLengthsPixels(const SilhouetteMask &mask,
                                            const Vec2 &center,
                                            const Vec2 &normal,
                                            double max_length) {
  double foreground = max_length;
  for (int k = 1; k <= int(max_length); ++k) {
    if (!MaskAt(mask, center - double(k) * normal, false)) {
      foreground = k;
      break;
    }
  }
  double background = max_length;
  bool left_object = false;
  for (int k = 1; k <= int(max_length); ++k) {
    bool inside = MaskAt(mask, center + double(k) * normal, false);
    if (!inside) {
      left_object = true;
    } else if (left_object) {
      background = k;
      break;
    }
  }
  return {foreground, background};
}

std::vector<std::size_t> ShuffledOrder(std::size_t n, SplitMix64 &rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
  return order;
}

Viewpoint GenerateView(const TriangleMesh &mesh, const ModelConfig &config,
                       const CameraIntrinsics &intrinsics, const Vec3 &vertex,
                       std::size_t view_index) {
  Viewpoint view;
  view.orientation = -vertex.normalized();
  const Pose camera_from_model =
      VirtualCameraPose(vertex, config.sphere_radius);
  const Pose model_from_camera = camera_from_model.Inverse();
  const RenderResult render = RenderDepth(mesh, camera_from_model, intrinsics);

  std::vector<PixelCandidate> contour;
  std::vector<PixelCandidate> interior;
  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      if (!render.mask.at(u, v)) continue;
      if (IsContourPixel(render.mask, u, v))
        contour.push_back({u, v});
      else
        interior.push_back({u, v});
    }
  }
  if (contour.empty()) return view;
  if (interior.empty()) interior = contour;

  SplitMix64 rng{DeriveSeed(config.seed, view_index)};
  const double focal = intrinsics.fx;

  for (std::size_t index : ShuffledOrder(contour.size(), rng)) {
    if (int(view.contour_points.size()) >= config.n_contour_points) break;
    const auto [u, v] = contour[index];
    auto normal_2d = ContourNormal2D(render.mask, u, v);
    if (!normal_2d) continue;
    const double depth = render.depth.at(u, v);
    const Vec2 center{u + 0.5, v + 0.5};
    // Boundary pixel centers lie between 0 and n_bar pixels inside the
    // silhouette; move to the expected edge location.
    const double n_bar = normal_2d->cwiseAbs().maxCoeff();
    const Vec3 point_camera =
        ReconstructPoint(intrinsics, center + 0.5 * n_bar * *normal_2d, depth);
    const double max_length_px = config.max_free_length * focal / depth;
    auto [foreground_px, background_px] =
        FreeLengthsPixels(render.mask, center, *normal_2d, max_length_px);
    ContourPoint point;
    point.point = model_from_camera * point_camera;
    point.normal = model_from_camera.rotation *
                   Vec3{normal_2d->x(), normal_2d->y(), 0.0};
    point.foreground_free_length =
        std::min(config.max_free_length, foreground_px * depth / focal);
    point.background_free_length =
        std::min(config.max_free_length, background_px * depth / focal);
    view.contour_points.push_back(point);
  }

  for (std::size_t index : ShuffledOrder(interior.size(), rng)) {
    if (int(view.surface_points.size()) >= config.n_surface_points) break;
    const auto [u, v] = interior[index];
    const double depth = render.depth.at(u, v);
    const Vec2 center{u + 0.5, v + 0.5};
    const Vec3 point_camera = ReconstructPoint(intrinsics, center, depth);
    Vec3 normal_camera =
        camera_from_model.rotation *
        mesh.TriangleNormal(std::size_t(render.TriangleAt(u, v)));
    if (normal_camera.dot(point_camera) > 0.0) normal_camera = -normal_camera;
    SurfacePoint point;
    point.point = model_from_camera * point_camera;
    point.normal = model_from_camera.rotation * normal_camera;
    auto minimum = MinimumDepthInRegion(render.depth, intrinsics, center, depth,
                                        config.occlusion_region);
    point.occlusion_offset = minimum ? std::max(0.0, depth - *minimum) : 0.0;
    view.surface_points.push_back(point);
  }
  return view;
}

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    buffer_.append(bytes, sizeof(T));
  }
  void PutVec3(const Vec3 &v) {
    Put(v.x());
    Put(v.y());
    Put(v.z());
  }
  std::string Take() { return std::move(buffer_); }

 private:
  std::string buffer_;
};

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_{bytes} {}
  template <typename T>
  T Get() {
    if (position_ + sizeof(T) > bytes_.size())
      throw std::runtime_error("model file truncated");
    T value;
    std::memcpy(&value, bytes_.data() + position_, sizeof(T));
    position_ += sizeof(T);
    return value;
  }
  Vec3 GetVec3() {
    double x = Get<double>();
    double y = Get<double>();
    double z = Get<double>();
    return Vec3{x, y, z};
  }
  std::size_t position() const { return position_; }

 private:
  const std::string &bytes_;
  std::size_t position_ = 0;
};

}  // namespace

std::vector<Vec3> GeodesicGrid(int level) {
  if (level < 0) throw std::invalid_argument("subdivision level must be >= 0");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> vertices = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto &v : vertices) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int a, int b) {
      std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      vertices.push_back((vertices[a] + vertices[b]).normalized());
      int index = int(vertices.size()) - 1;
      midpoints.emplace(key, index);
      return index;
    };
    std::vector<std::array<int, 3>> next_faces;
    next_faces.reserve(faces.size() * 4);
    for (const auto &f : faces) {
      int ab = midpoint(f[0], f[1]);
      int bc = midpoint(f[1], f[2]);
      int ca = midpoint(f[2], f[0]);
      next_faces.push_back({f[0], ab, ca});
      next_faces.push_back({f[1], bc, ab});
      next_faces.push_back({f[2], ca, bc});
      next_faces.push_back({ab, bc, ca});
    }
    faces = std::move(next_faces);
  }
  return vertices;
}

Pose VirtualCameraPose(const Vec3 &direction, double radius) {
  const Vec3 position = radius * direction.normalized();
  const Vec3 z_axis = -direction.normalized();
  Vec3 up = Vec3::UnitZ();
  if (std::abs(up.dot(z_axis)) > 0.99) up = Vec3::UnitX();
  Vec3 y_axis = -(up - up.dot(z_axis) * z_axis).normalized();
  Vec3 x_axis = y_axis.cross(z_axis);
  Pose camera_from_model;
  camera_from_model.rotation.row(0) = x_axis.transpose();
  camera_from_model.rotation.row(1) = y_axis.transpose();
  camera_from_model.rotation.row(2) = z_axis.transpose();
  camera_from_model.translation = -(camera_from_model.rotation * position);
  return camera_from_model;
}

std::size_t SparseViewpointModel::ClosestViewIndex(
    const Pose &camera_from_model) const {
  if (views.empty()) throw std::logic_error("viewpoint model is empty");
  Vec3 direction =
      camera_from_model.rotation.transpose() * camera_from_model.translation;
  std::size_t best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < views.size(); ++i) {
    double dot = views[i].orientation.dot(direction);
    if (dot > best_dot) {
      best_dot = dot;
      best = i;
    }
  }
  return best;
}

CameraIntrinsics SparseViewpointModel::RenderIntrinsics() const {
  return CameraIntrinsics{render_focal_length,
                          render_focal_length,
                          0.5 * config.render_width,
                          0.5 * config.render_height,
                          config.render_width,
                          config.render_height};
}

SparseViewpointModel GenerateModel(const TriangleMesh &mesh,
                                   const ModelConfig &config) {
  if (mesh.vertices.empty() || mesh.triangles.empty())
    throw std::invalid_argument("cannot generate a model from an empty mesh");
  const double bounding_radius = mesh.BoundingRadius();
  if (!(bounding_radius < config.sphere_radius))
    throw std::invalid_argument(
        "object does not fit inside the virtual camera sphere");
  if (config.n_contour_points <= 0 || config.n_surface_points <= 0)
    throw std::invalid_argument("points per view must be positive");

  SparseViewpointModel model;
  model.config = config;
  const double r = config.sphere_radius;
  model.render_focal_length =
      0.5 * config.image_fill * std::min(config.render_width, config.render_height) *
      std::sqrt(r * r - bounding_radius * bounding_radius) / bounding_radius;
  const CameraIntrinsics intrinsics = model.RenderIntrinsics();
  intrinsics.Validate();

  const std::vector<Vec3> grid = GeodesicGrid(config.subdivision_level);
  model.views.resize(grid.size());
  const int n_threads = std::max(1, config.n_threads);
  auto worker = [&](int thread_index) {
    for (std::size_t i = std::size_t(thread_index); i < grid.size();
         i += std::size_t(n_threads))
      model.views[i] = GenerateView(mesh, config, intrinsics, grid[i], i);
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker, t);
    for (auto &thread : threads) thread.join();
  }

  bool any_visible = std::any_of(
      model.views.begin(), model.views.end(),
      [](const Viewpoint &view) { return !view.contour_points.empty(); });
  if (!any_visible)
    throw std::runtime_error("object is not visible from any virtual camera");
  return model;
}

std::string SerializeModel(const SparseViewpointModel &model) {
  Writer writer;
  for (char c : kMagic) writer.Put(c);
  writer.Put(kVersion);
  const ModelConfig &c = model.config;
  writer.Put(std::int32_t(c.subdivision_level));
  writer.Put(c.sphere_radius);
  writer.Put(std::int32_t(c.n_contour_points));
  writer.Put(std::int32_t(c.n_surface_points));
  writer.Put(std::int32_t(c.render_width));
  writer.Put(std::int32_t(c.render_height));
  writer.Put(c.image_fill);
  writer.Put(c.occlusion_region);
  writer.Put(c.max_free_length);
  writer.Put(std::uint64_t(c.seed));
  writer.Put(model.render_focal_length);
  writer.Put(std::uint32_t(model.views.size()));
  for (const auto &view : model.views) {
    writer.PutVec3(view.orientation);
    writer.Put(std::uint32_t(view.contour_points.size()));
    for (const auto &p : view.contour_points) {
      writer.PutVec3(p.point);
      writer.PutVec3(p.normal);
      writer.Put(p.foreground_free_length);
      writer.Put(p.background_free_length);
    }
    writer.Put(std::uint32_t(view.surface_points.size()));
    for (const auto &p : view.surface_points) {
      writer.PutVec3(p.point);
      writer.PutVec3(p.normal);
      writer.Put(p.occlusion_offset);
    }
  }
  return writer.Take();
}

SparseViewpointModel DeserializeModel(const std::string &bytes) {
  Reader reader{bytes};
  for (char c : kMagic)
    if (reader.Get<char>() != c)
      throw std::runtime_error("not a viewpoint model file (bad magic)");
  auto version = reader.Get<std::uint32_t>();
  if (version != kVersion)
    throw std::runtime_error("unsupported model version " +
                             std::to_string(version));
  SparseViewpointModel model;
  ModelConfig &c = model.config;
  c.subdivision_level = reader.Get<std::int32_t>();
  c.sphere_radius = reader.Get<double>();
  c.n_contour_points = reader.Get<std::int32_t>();
  c.n_surface_points = reader.Get<std::int32_t>();
  c.render_width = reader.Get<std::int32_t>();
  c.render_height = reader.Get<std::int32_t>();
  c.image_fill = reader.Get<double>();
  c.occlusion_region = reader.Get<double>();
  c.max_free_length = reader.Get<double>();
  c.seed = reader.Get<std::uint64_t>();
  model.render_focal_length = reader.Get<double>();
  auto n_views = reader.Get<std::uint32_t>();
  model.views.resize(n_views);
  for (auto &view : model.views) {
    view.orientation = reader.GetVec3();
    view.contour_points.resize(reader.Get<std::uint32_t>());
    for (auto &p : view.contour_points) {
      p.point = reader.GetVec3();
      p.normal = reader.GetVec3();
      p.foreground_free_length = reader.Get<double>();
      p.background_free_length = reader.Get<double>();
    }
    view.surface_points.resize(reader.Get<std::uint32_t>());
    for (auto &p : view.surface_points) {
      p.point = reader.GetVec3();
      p.normal = reader.GetVec3();
      p.occlusion_offset = reader.Get<double>();
    }
  }
  if (reader.position() != bytes.size())
    throw std::runtime_error("trailing bytes after model data");
  return model;
}

void SaveModel(const std::filesystem::path &path,
               const SparseViewpointModel &model) {
  std::ofstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot write " + path.string());
  std::string bytes = SerializeModel(model);
  stream.write(bytes.data(), std::streamsize(bytes.size()));
}

SparseViewpointModel LoadModel(const std::filesystem::path &path) {
  std::ifstream stream{path, std::ios::binary};
  if (!stream) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << stream.rdbuf();
  return DeserializeModel(buffer.str());
}

}  // namespace fusetrack
