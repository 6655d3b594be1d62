// SPDX-License-Identifier: MIT

#include <fusetrack/region_modality.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fusetrack {

namespace {

// Normalizes counts plus the bin floor into `target`. Returns false if the
// counts are empty.
bool NormalizedFrameHistogram(std::span<const double> counts,
                              std::array<double, kHistogramBins> &target) {
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) return false;
  double sum = total + kHistogramFloor * kHistogramBins;
  for (int i = 0; i < kHistogramBins; ++i)
    target[i] = (counts[i] + kHistogramFloor) / sum;
  return true;
}

void Blend(std::array<double, kHistogramBins> &histogram,
           const std::array<double, kHistogramBins> &frame, double rate) {
  double sum = 0.0;
  for (int i = 0; i < kHistogramBins; ++i) {
    histogram[i] = (1.0 - rate) * histogram[i] + rate * frame[i];
    sum += histogram[i];
  }
  for (auto &value : histogram) value /= sum;
}

}  // namespace

ColorHistograms::ColorHistograms() { Reset(); }

void ColorHistograms::Reset() {
  foreground_.fill(1.0 / kHistogramBins);
  background_.fill(1.0 / kHistogramBins);
  initialized_ = false;
  foreground_initialized_ = false;
  background_initialized_ = false;
}

void ColorHistograms::Update(std::span<const double> foreground_counts,
                             std::span<const double> background_counts,
                             double learning_rate) {
  if (foreground_counts.size() != std::size_t(kHistogramBins) ||
      background_counts.size() != std::size_t(kHistogramBins))
    throw std::invalid_argument("histogram counts need 4096 bins");
  std::array<double, kHistogramBins> frame;
  if (NormalizedFrameHistogram(foreground_counts, frame)) {
    Blend(foreground_, frame, foreground_initialized_ ? learning_rate : 1.0);
    foreground_initialized_ = true;
  }
  if (NormalizedFrameHistogram(background_counts, frame)) {
    Blend(background_, frame, background_initialized_ ? learning_rate : 1.0);
    background_initialized_ = true;
  }
  initialized_ = foreground_initialized_ && background_initialized_;
}

StepFunctionTable MakeStepFunctionTable(double slope, double amplitude) {
  if (!(slope > 0.0))
    throw std::invalid_argument("step function slope s_h must be positive");
  if (!(amplitude >= 0.0 && amplitude <= 0.5))
    throw std::invalid_argument("step function amplitude must be in [0, 0.5]");
  StepFunctionTable table;
  table.slope = slope;
  table.amplitude = amplitude;
  for (int m = 0; m < kFunctionLength; ++m) {
    double x = FunctionAbscissa(m);
    table.foreground[m] = 0.5 - amplitude * std::tanh(x / (2.0 * slope));
    table.background[m] = 1.0 - table.foreground[m];
  }
  return table;
}

std::optional<LineTrace> TraceLine(const Vec2 &center, const Vec2 &normal,
                                   int scale, int image_width,
                                   int image_height) {
  if (scale < 1) throw std::invalid_argument("line scale must be >= 1");
  const int length = kLineSegments * scale;
  const bool u_dominant = std::abs(normal.y()) < std::abs(normal.x());
  // Index coordinates: pixel i has its center at i.
  const double c_major = (u_dominant ? center.x() : center.y()) - 0.5;
  const double c_minor = (u_dominant ? center.y() : center.x()) - 0.5;
  const double n_major = u_dominant ? normal.x() : normal.y();
  const double n_minor = u_dominant ? normal.y() : normal.x();
  if (n_major == 0.0) return std::nullopt;

  // The border between the two central segments goes on the pixel border
  // nearest the center, where the contour transition of a sharp image lies.
  const double half_length = 0.5 * double(length - 1);
  const int first =
      int(std::floor(c_major)) + 1 - (kLineSegments + 1) / 2 * scale;
  const double midpoint = double(first) + half_length;
  const double minor_step = n_minor / n_major;

  LineTrace trace;
  trace.normal = normal;
  trace.normal_max = std::abs(n_major);
  trace.delta_r = (midpoint - c_major) / n_major;
  for (auto &segment : trace.segment_pixels) segment.reserve(scale);
  for (auto &segment : trace.segment_samples) segment.reserve(scale);

  for (int k = 0; k < length; ++k) {
    int major = first + k;
    double minor_position = c_minor + (double(major) - c_major) * minor_step;
    int minor = int(std::floor(minor_position + 0.5));
    int u = u_dominant ? major : minor;
    int v = u_dominant ? minor : major;
    if (u < 0 || v < 0 || u >= image_width || v >= image_height)
      return std::nullopt;
    int segment = n_major > 0.0 ? k / scale : kLineSegments - 1 - k / scale;
    Vec2 sample = u_dominant ? Vec2{major + 0.5, minor_position + 0.5}
                             : Vec2{minor_position + 0.5, major + 0.5};
    trace.segment_pixels[segment].push_back({u, v});
    trace.segment_samples[segment].push_back(sample);
  }
  return trace;
}

std::optional<Vec2> ProjectedNormal(const Pose &camera_from_model,
                                    const CameraIntrinsics &intrinsics,
                                    const Vec3 &model_point,
                                    const Vec3 &model_normal) {
  constexpr double kDisplacement = 1e-3;
  Vec3 a = camera_from_model * model_point;
  Vec3 b = camera_from_model * (model_point + kDisplacement * model_normal);
  if (a.z() <= 0.0 || b.z() <= 0.0) return std::nullopt;
  Vec2 difference = Project(intrinsics, b) - Project(intrinsics, a);
  double norm = difference.norm();
  if (norm < 1e-9) return std::nullopt;
  return Vec2{difference / norm};
}

SegmentPosteriors ComputeSegmentPosteriors(const LineTrace &trace,
                                           const ColorImage &image,
                                           const ColorHistograms &histograms) {
  SegmentPosteriors posteriors;
  for (int k = 0; k < kLineSegments; ++k) {
    double product_f = 1.0;
    double product_b = 1.0;
    for (const auto &[u, v] : trace.segment_pixels[k]) {
      Rgb color = image.at(u, v);
      double p_f = histograms.foreground(color);
      double p_b = histograms.background(color);
      double sum = p_f + p_b;
      if (sum > 0.0) {
        product_f *= p_f / sum;
        product_b *= p_b / sum;
      } else {
        product_f *= 0.5;
        product_b *= 0.5;
      }
    }
    double sum = product_f + product_b;
    if (sum > 0.0) {
      posteriors.foreground[k] = product_f / sum;
      posteriors.background[k] = product_b / sum;
    } else {
      posteriors.foreground[k] = 0.5;
      posteriors.background[k] = 0.5;
    }
  }
  return posteriors;
}

std::array<double, kDistributionLength> LineDistribution(
    const SegmentPosteriors &posteriors, const StepFunctionTable &table) {
  std::array<double, kDistributionLength> distribution;
  double sum = 0.0;
  // Entry i (d_s = i - 5.5) pairs segment i + m (r_s = i + m - 9) with the
  // step value at x = r_s - d_s = m - 3.5.
  for (int i = 0; i < kDistributionLength; ++i) {
    double value = 1.0;
    for (int m = 0; m < kFunctionLength; ++m) {
      value *= table.foreground[m] * posteriors.foreground[i + m] +
               table.background[m] * posteriors.background[i + m];
    }
    distribution[i] = value;
    sum += value;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    distribution.fill(1.0 / kDistributionLength);
    return distribution;
  }
  for (auto &value : distribution) value /= sum;
  return distribution;
}

DistributionMoments ComputeMoments(
    const std::array<double, kDistributionLength> &distribution) {
  double mean = 0.0;
  for (int i = 0; i < kDistributionLength; ++i)
    mean += DistributionDistance(i) * distribution[i];
  double variance = 0.0;
  for (int i = 0; i < kDistributionLength; ++i) {
    double d = DistributionDistance(i) - mean;
    variance += d * d * distribution[i];
  }
  return {mean, std::max(variance, kMinDistributionVariance)};
}

std::optional<CorrespondenceLine> BuildLine(const ContourPoint &contour_point,
                                            const Pose &camera_from_model,
                                            const CameraIntrinsics &intrinsics,
                                            const ColorImage &image,
                                            const ColorHistograms &histograms,
                                            const StepFunctionTable &table,
                                            const LineBuildOptions &options) {
  const Vec3 point_camera = camera_from_model * contour_point.point;
  if (point_camera.z() <= 0.0) return std::nullopt;

  const double free_length = std::min(contour_point.foreground_free_length,
                                      contour_point.background_free_length);
  const double continuous_segments =
      free_length * intrinsics.fx / (point_camera.z() * options.scale);
  if (continuous_segments < options.min_continuous_segments)
    return std::nullopt;

  const Vec2 center = Project(intrinsics, point_camera);
  if (!(center.x() >= 0.0 && center.y() >= 0.0 &&
        center.x() < intrinsics.width && center.y() < intrinsics.height))
    return std::nullopt;
  auto normal = ProjectedNormal(camera_from_model, intrinsics,
                                contour_point.point, contour_point.normal);
  if (!normal) return std::nullopt;
  auto trace = TraceLine(center, *normal, options.scale, image.width,
                         image.height);
  if (!trace) return std::nullopt;

  CorrespondenceLine line;
  line.center = center;
  line.normal = *normal;
  line.normal_max = trace->normal_max;
  line.delta_r = trace->delta_r;
  line.scale = options.scale;
  line.model_point = contour_point.point;
  line.model_normal = contour_point.normal;
  line.posteriors = ComputeSegmentPosteriors(*trace, image, histograms);
  line.distribution = LineDistribution(line.posteriors, table);
  DistributionMoments moments = ComputeMoments(line.distribution);
  line.mean = moments.mean;
  line.variance = moments.variance;
  return line;
}

double ScaledDistance(const CorrespondenceLine &line,
                      const PoseVariation &theta,
                      const Pose &camera_from_model,
                      const CameraIntrinsics &intrinsics) {
  Vec3 point_camera = camera_from_model * VariatePoint(theta, line.model_point);
  Vec2 projection = Project(intrinsics, point_camera);
  return (line.normal.dot(projection - line.center) - line.delta_r) *
         line.normal_max / line.scale;
}

RegionContribution RegionGradientHessian(const CorrespondenceLine &line,
                                         const Pose &camera_from_model,
                                         const CameraIntrinsics &intrinsics,
                                         RegionOptimization mode,
                                         const RegionParameters &parameters) {
  RegionContribution contribution;
  const Vec3 p = camera_from_model * line.model_point;
  if (p.z() <= 0.0) return contribution;
  const double x = p.x();
  const double y = p.y();
  const double z = p.z();
  const double scale_factor = line.normal_max / line.scale;
  const double fx_z = intrinsics.fx / z;
  const double fy_z = intrinsics.fy / z;
  const double u = x * fx_z + intrinsics.px;
  const double v = y * fy_z + intrinsics.py;
  const double distance =
      (line.normal.x() * (u - line.center.x()) +
       line.normal.y() * (v - line.center.y()) - line.delta_r) *
      scale_factor;

  double dloglikelihood;
  if (mode == RegionOptimization::kGlobal) {
    dloglikelihood = -(distance - line.mean) / line.variance;
  } else {
    int upper = int(std::floor(distance + 0.5 * (kDistributionLength + 1)));
    if (upper < 1 || upper > kDistributionLength - 1) {
      contribution.low_confidence = true;
      upper = std::clamp(upper, 1, kDistributionLength - 1);
    }
    dloglikelihood = parameters.learning_rate / line.variance *
                     (std::log(line.distribution[upper]) -
                      std::log(line.distribution[upper - 1]));
  }

  // d d_s / d X_c, then through X_c = R (X + theta_r x X + theta_t) + t.
  const Vec3 ddistance_dpoint{
      scale_factor * line.normal.x() * fx_z,
      scale_factor * line.normal.y() * fy_z,
      -scale_factor *
          (line.normal.x() * x * fx_z + line.normal.y() * y * fy_z) / z};
  const Vec3 ddistance_dtranslation =
      camera_from_model.rotation.transpose() * ddistance_dpoint;
  Vec6 jacobian;
  jacobian << line.model_point.cross(ddistance_dtranslation),
      ddistance_dtranslation;

  const double weight =
      parameters.slope * double(line.scale) * double(line.scale) /
      (parameters.sigma_r * parameters.sigma_r * line.normal_max *
       line.normal_max);
  contribution.terms.gradient = (weight * dloglikelihood) * jacobian;
  if (!contribution.low_confidence)
    contribution.terms.hessian =
        -(weight / line.variance) * jacobian * jacobian.transpose();
  return contribution;
}

void AccumulateLineColors(const HistogramLine &line, const ColorImage &image,
                          std::span<double> foreground_counts,
                          std::span<double> background_counts) {
  const double normal_max =
      std::max(std::abs(line.normal.x()), std::abs(line.normal.y()));
  if (!(normal_max > 0.0)) return;
  const Vec2 step = line.normal / normal_max;
  for (int k = 1; k <= line.n_foreground_pixels; ++k) {
    Vec2 position = line.center - double(k) * step;
    int u = int(std::floor(position.x()));
    int v = int(std::floor(position.y()));
    if (!image.Contains(u, v)) break;
    foreground_counts[ColorHistograms::Bin(image.at(u, v))] += 1.0;
  }
  for (int k = 1; k <= line.n_background_pixels; ++k) {
    Vec2 position = line.center + double(k) * step;
    int u = int(std::floor(position.x()));
    int v = int(std::floor(position.y()));
    if (!image.Contains(u, v)) break;
    background_counts[ColorHistograms::Bin(image.at(u, v))] += 1.0;
  }
}

void UpdateHistograms(ColorHistograms &histograms, const ColorImage &image,
                      std::span<const HistogramLine> lines,
                      double learning_rate) {
  std::vector<double> foreground_counts(kHistogramBins, 0.0);
  std::vector<double> background_counts(kHistogramBins, 0.0);
  for (const auto &line : lines)
    AccumulateLineColors(line, image, foreground_counts, background_counts);
  histograms.Update(foreground_counts, background_counts, learning_rate);
}

}  // namespace fusetrack
