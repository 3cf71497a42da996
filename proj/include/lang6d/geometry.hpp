#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace lang6d {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole camera model. Pixel (u, v) at depth z back-projects to
/// ((u - cx) * z / fx, (v - cy) * z / fy, z). Camera frame: +X right,
/// +Y down, +Z forward.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && cx > 0.0 && cx < width && cy > 0.0 &&
           cy < height && width > 0 && height > 0;
  }
};

/// Rigid transform: x_out = rotation * x_in + translation. Translation in
/// meters.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return Pose{}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

enum class CloudProvenance : uint8_t { kRegion, kObject };

/// Ordered set of camera-frame points in meters.
struct PointCloud {
  std::vector<Vec3> points;
  CloudProvenance provenance = CloudProvenance::kRegion;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Row-major H x W depth grid in meters. 0.0 marks invalid / no return.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // size == width * height

  static DepthMap zeros(int width, int height) {
    DepthMap d;
    d.width = width;
    d.height = height;
    d.values.assign(static_cast<std::size_t>(width) * height, 0.0f);
    return d;
  }

  float at(int u, int v) const {
    return values[static_cast<std::size_t>(v) * width + u];
  }
  float& at(int u, int v) {
    return values[static_cast<std::size_t>(v) * width + u];
  }
  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
};

/// Pixel indices are flattened row-major: index = v * width + u.
using PixelIndex = std::int32_t;

inline PixelIndex pixel_index(int u, int v, int width) {
  return static_cast<PixelIndex>(v) * width + u;
}
inline int pixel_u(PixelIndex idx, int width) { return idx % width; }
inline int pixel_v(PixelIndex idx, int width) { return idx / width; }

/// Back-projects the given pixels. Pixels with zero depth are skipped;
/// output order follows row-major pixel order of `pixels`. Throws
/// std::out_of_range if a pixel lies outside the image.
PointCloud backproject(const DepthMap& depth, const CameraIntrinsics& k,
                       std::span<const PixelIndex> pixels);

/// Projects a camera-frame point to continuous pixel coordinates. Throws
/// std::domain_error when the point is at or behind the camera (Z <= 0).
Eigen::Vector2d project(const Vec3& point, const CameraIntrinsics& k);

/// Composition a ∘ b: first apply b, then a.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& a);

/// Geodesic distance between two rotations, in degrees, in [0, 180].
double rotation_angle_deg(const Mat3& ra, const Mat3& rb);

/// Rotation about a unit axis by an angle in radians (Rodrigues).
Mat3 axis_angle(const Vec3& axis, double angle_rad);

/// True when R is orthonormal with det +1 within `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-9);

}  // namespace lang6d
