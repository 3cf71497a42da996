#include "lang6d/geometry.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lang6d {

PointCloud backproject(const DepthMap& depth, const CameraIntrinsics& k,
                       std::span<const PixelIndex> pixels) {
  PointCloud cloud;
  cloud.provenance = CloudProvenance::kRegion;
  cloud.points.reserve(pixels.size());
  for (PixelIndex idx : pixels) {
    const int u = pixel_u(idx, depth.width);
    const int v = pixel_v(idx, depth.width);
    if (idx < 0 || !depth.in_bounds(u, v)) {
      throw std::out_of_range("backproject: pixel (" + std::to_string(u) +
                              ", " + std::to_string(v) + ") out of bounds");
    }
    const double z = depth.at(u, v);
    if (z <= 0.0) continue;
    cloud.points.emplace_back((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z);
  }
  return cloud;
}

Eigen::Vector2d project(const Vec3& point, const CameraIntrinsics& k) {
  if (point.z() <= 0.0) {
    throw std::domain_error("project: point at or behind camera (Z <= 0)");
  }
  return {k.fx * point.x() / point.z() + k.cx,
          k.fy * point.y() / point.z() + k.cy};
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Pose invert(const Pose& a) {
  Pose out;
  out.rotation = a.rotation.transpose();
  out.translation = -(out.rotation * a.translation);
  return out;
}

double rotation_angle_deg(const Mat3& ra, const Mat3& rb) {
  const double tr = (ra * rb.transpose()).trace();
  const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

Mat3 axis_angle(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

bool is_rotation(const Mat3& r, double tol) {
  const Mat3 gram = r.transpose() * r;
  return (gram - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace lang6d
