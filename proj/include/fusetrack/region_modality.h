// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_REGION_MODALITY_H_
#define FUSETRACK_REGION_MODALITY_H_

#include <fusetrack/geometry.h>
#include <fusetrack/image.h>
#include <fusetrack/viewpoint_model.h>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace fusetrack {

inline constexpr int kFunctionLength = 8;       // step-function samples
inline constexpr int kDistributionLength = 12;  // discrete contour distances
inline constexpr int kLineSegments = kFunctionLength + kDistributionLength - 1;
inline constexpr int kHistogramBinsPerChannel = 16;
inline constexpr int kHistogramBins =
    kHistogramBinsPerChannel * kHistogramBinsPerChannel *
    kHistogramBinsPerChannel;
inline constexpr double kHistogramFloor = 1e-9;
inline constexpr double kMinDistributionVariance = 1e-3;

// Scale-space coordinate of distribution entry i: i - 5.5.
constexpr double DistributionDistance(int i) {
  return double(i) - 0.5 * (kDistributionLength - 1);
}
// Scale-space coordinate of the center of segment k: k - 9.
constexpr double SegmentCoordinate(int k) {
  return double(k) - 0.5 * (kLineSegments - 1);
}
// Step-function abscissa of table entry m: m - 3.5.
constexpr double FunctionAbscissa(int m) {
  return double(m) - 0.5 * (kFunctionLength - 1);
}

/// Foreground / background color likelihoods over 16x16x16 RGB bins (top four
/// bits per channel). Both histograms always sum to one.
class ColorHistograms {
 public:
  ColorHistograms();

  static int Bin(Rgb color) {
    return ((color[0] >> 4) << 8) | ((color[1] >> 4) << 4) | (color[2] >> 4);
  }

  double foreground(Rgb color) const { return foreground_[Bin(color)]; }
  double background(Rgb color) const { return background_[Bin(color)]; }
  const std::array<double, kHistogramBins> &foreground_bins() const {
    return foreground_;
  }
  const std::array<double, kHistogramBins> &background_bins() const {
    return background_;
  }
  bool initialized() const { return initialized_; }

  // Blends normalized frame histograms built from raw counts:
  // h <- (1 - rate) h + rate h_frame. The first update of a histogram uses
  // rate 1. A side without any samples keeps its previous values.
  void Update(std::span<const double> foreground_counts,
              std::span<const double> background_counts, double learning_rate);
  void Reset();

 private:
  std::array<double, kHistogramBins> foreground_;
  std::array<double, kHistogramBins> background_;
  bool initialized_ = false;
  bool foreground_initialized_ = false;
  bool background_initialized_ = false;
};

/// Tabulated smoothed step functions h_f(x) = 1/2 - a tanh(x / (2 s)),
/// h_b = 1 - h_f, at x in {-3.5, ..., 3.5}.
struct StepFunctionTable {
  double slope = 0.5;
  double amplitude = 0.43;
  std::array<double, kFunctionLength> foreground{};
  std::array<double, kFunctionLength> background{};
};

// Throws std::invalid_argument unless slope > 0 and amplitude in [0, 0.5].
StepFunctionTable MakeStepFunctionTable(double slope, double amplitude);

struct SegmentPosteriors {
  std::array<double, kLineSegments> foreground{};
  std::array<double, kLineSegments> background{};
};

struct CorrespondenceLine {
  Vec2 center = Vec2::Zero();
  Vec2 normal = Vec2::UnitX();  // unit, pointing from foreground to background
  double normal_max = 1.0;      // n_bar = max(|n_x|, |n_y|)
  double delta_r = 0.0;
  int scale = 1;
  Vec3 model_point = Vec3::Zero();
  Vec3 model_normal = Vec3::UnitX();
  SegmentPosteriors posteriors;
  std::array<double, kDistributionLength> distribution{};
  double mean = 0.0;
  double variance = 1.0;
};

/// Pixels visited by a correspondence line, grouped by segment in order of
/// increasing scale-space coordinate.
struct LineTrace {
  Vec2 normal;
  double normal_max;
  double delta_r;
  // (u, v) pixel indices for each segment, `scale` entries per segment.
  std::array<std::vector<std::array<int, 2>>, kLineSegments> segment_pixels;
  // Continuous sample positions matching segment_pixels.
  std::array<std::vector<Vec2>, kLineSegments> segment_samples;
};

// Pixel layout of a line with `scale` pixels per segment along the dominant
// axis. The two central segments meet at the pixel border nearest `center`,
// so the contour lies within half a pixel of r_s = +-0.5. Returns nullopt if
// any pixel falls outside the image.
std::optional<LineTrace> TraceLine(const Vec2 &center, const Vec2 &normal,
                                   int scale, int image_width,
                                   int image_height);

// 2D unit normal of the projected contour, from the projections of the
// point and the point displaced along its 3D normal.
std::optional<Vec2> ProjectedNormal(const Pose &camera_from_model,
                                    const CameraIntrinsics &intrinsics,
                                    const Vec3 &model_point,
                                    const Vec3 &model_normal);

// Segment posteriors p_sf, p_sb with the product over the segment's pixels.
SegmentPosteriors ComputeSegmentPosteriors(const LineTrace &trace,
                                           const ColorImage &image,
                                           const ColorHistograms &histograms);

// Discrete PDF over d_s in {-5.5, ..., 5.5}; uniform if all values vanish.
std::array<double, kDistributionLength> LineDistribution(
    const SegmentPosteriors &posteriors, const StepFunctionTable &table);

struct DistributionMoments {
  double mean;
  double variance;
};
// Variance is clamped to kMinDistributionVariance.
DistributionMoments ComputeMoments(
    const std::array<double, kDistributionLength> &distribution);

struct LineBuildOptions {
  int scale = 1;
  double min_continuous_segments = 3.0;
};

// Builds a correspondence line for a contour point at the current pose.
// Returns nullopt for points behind the camera, centers outside the image,
// lines crossing the image border and lines whose free lengths are shorter
// than `min_continuous_segments`.
std::optional<CorrespondenceLine> BuildLine(const ContourPoint &contour_point,
                                            const Pose &camera_from_model,
                                            const CameraIntrinsics &intrinsics,
                                            const ColorImage &image,
                                            const ColorHistograms &histograms,
                                            const StepFunctionTable &table,
                                            const LineBuildOptions &options);

// d_s(theta) = (n^T (pi(C_T_M T(theta) X) - c) - delta_r) n_bar / s.
// Throws std::domain_error if the variated point is behind the camera.
double ScaledDistance(const CorrespondenceLine &line,
                      const PoseVariation &theta,
                      const Pose &camera_from_model,
                      const CameraIntrinsics &intrinsics);

enum class RegionOptimization { kGlobal, kLocal };

struct RegionParameters {
  double sigma_r = 10.0;  // pixels
  double slope = 0.5;     // s_h
  double learning_rate = 1.3;  // alpha_s, local mode
};

struct RegionContribution {
  GradientHessian terms;
  // Local mode only: d_s outside the distribution window. The gradient uses
  // the clamped pair, the Hessian is left at zero.
  bool low_confidence = false;
};

// Gradient and Hessian of the scaled log-likelihood of one line at theta = 0.
RegionContribution RegionGradientHessian(const CorrespondenceLine &line,
                                         const Pose &camera_from_model,
                                         const CameraIntrinsics &intrinsics,
                                         RegionOptimization mode,
                                         const RegionParameters &parameters);

/// Probe used for histogram updates: pixels along -normal are foreground
/// samples, pixels along +normal background samples.
struct HistogramLine {
  Vec2 center = Vec2::Zero();
  Vec2 normal = Vec2::UnitX();
  int n_foreground_pixels = 20;
  int n_background_pixels = 20;
};

// Adds the colors of each probe to raw count arrays of size kHistogramBins.
// Sampling starts one pixel off the center and steps one pixel along the
// dominant axis of the normal; it stops at the image border.
void AccumulateLineColors(const HistogramLine &line, const ColorImage &image,
                          std::span<double> foreground_counts,
                          std::span<double> background_counts);

// Builds frame histograms from the probes and blends them into `histograms`.
void UpdateHistograms(ColorHistograms &histograms, const ColorImage &image,
                      std::span<const HistogramLine> lines,
                      double learning_rate);

}  // namespace fusetrack

#endif  // FUSETRACK_REGION_MODALITY_H_
