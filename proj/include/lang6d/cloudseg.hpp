#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lang6d/geometry.hpp"
#include "lang6d/scene.hpp"

namespace lang6d {

/// Pixel crop handed from stage 1 to stage 2.
struct CropSpec {
  CropMode mode = CropMode::kMask;
  std::vector<PixelIndex> pixels;
  int source_id = -1;
};

/// Gaussian perturbation applied per point, per axis (meters).
struct NoiseSpec {
  Vec3 mean = Vec3::Zero();
  Vec3 stddev = Vec3::Zero();
};

/// Per-side expansion ratios, each side moving outward by ratio times the
/// corresponding box dimension (left/right scale by width, top/bottom by
/// height), clamped to the image.
struct ExpandRatios {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  static ExpandRatios uniform(double r) { return {r, r, r, r}; }
};

BBox expand_bbox(const BBox& box, const ExpandRatios& ratios, ImageDims dims);

/// Morphological dilation with a disk structuring element of radius r.
Mask dilate_mask(const Mask& mask, int radius);

/// Independent per-point per-axis Gaussian noise; deterministic per seed.
PointCloud add_noise(const PointCloud& cloud, const NoiseSpec& noise,
                     std::uint64_t seed);

struct SegmentationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thresholds of the geometric segmentation pipeline. The defaults are the
/// noise-robust profile; the tighter presets mirror pipelines whose
/// thresholds were chosen on cleaner corpora.
struct SegmentationConfig {
  double plane_band_m = 0.008;       // |signed distance| treated as table
  int ransac_iterations = 500;
  double ransac_min_inlier_frac = 0.20;
  double plane_normal_max_tilt_deg = 25.0;  // vs. the vertical prior
  double plane_support_max_below = 0.02;    // fraction allowed under the plane
  double cluster_radius_m = 0.020;   // single-linkage distance
  int outlier_neighbors = 8;         // k for statistical outlier removal
  double outlier_stddev_mult = 2.0;  // keep below mean + mult * std
  double outlier_search_cap_m = 0.05;  // neighbor distances capped here
  double prior_ray_scale_m = 0.05;   // exp(-d / scale) cluster weighting
  int min_points = 10;

  static SegmentationConfig tuned_bbox();       // gross outliers only
  static SegmentationConfig tuned_bbox_mask();  // + silhouette strays
  static SegmentationConfig tuned_full() { return {}; }  // + noise
};

struct SegmentationResult {
  PointCloud object;                  // provenance kObject
  std::optional<TablePlane> plane;    // fitted when none was supplied
  int removed_plane = 0;
  int removed_cluster = 0;
  int removed_outlier = 0;
};

/// Table removal, euclidean clustering, prior-ray cluster selection and
/// statistical outlier removal. `prior_ray` is the unit-normalized viewing
/// ray through the crop centroid; `vertical_prior` is the approximate up
/// direction used to validate a RANSAC plane when none is supplied. Throws
/// SegmentationError when fewer than config.min_points survive a step.
SegmentationResult segment_object(const PointCloud& region,
                                  const Vec3& prior_ray,
                                  const std::optional<TablePlane>& plane,
                                  const Vec3& vertical_prior,
                                  const SegmentationConfig& config,
                                  std::uint64_t seed);

/// Unit ray through the mean pixel of a crop.
Vec3 crop_centroid_ray(std::span<const PixelIndex> pixels,
                       const CameraIntrinsics& k);

/// Seeded RANSAC plane fit; returns the plane (normal toward the vertical
/// prior) when one passes the tilt / support / inlier-fraction checks.
std::optional<TablePlane> fit_plane_ransac(std::span<const Vec3> points,
                                           const Vec3& vertical_prior,
                                           const SegmentationConfig& config,
                                           std::uint64_t seed);

}  // namespace lang6d
