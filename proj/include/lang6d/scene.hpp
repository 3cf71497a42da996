#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lang6d/geometry.hpp"
#include "lang6d/primitives.hpp"

namespace lang6d {

/// Plane n . x = offset with unit normal pointing up (camera side positive).
struct TablePlane {
  Vec3 normal = Vec3::UnitY();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

struct ObjectInstance {
  int id = 0;
  Category category = Category::kBottle;
  ColorLabel color = ColorLabel::kRed;
  Pose pose;            // canonical frame -> camera frame
  Vec3 size = Vec3::Zero();  // tight canonical extents (meters)
  ShapeParams shape;
};

/// Ground-truth world: camera, table and upright objects, fully determined
/// by (config, seed).
struct SceneSpec {
  std::uint64_t seed = 0;
  CameraIntrinsics intrinsics;
  TablePlane table;
  Vec3 table_center = Vec3::Zero();  // plane point on the optical axis
  Vec3 table_u = Vec3::UnitX();      // in-plane axes (orthonormal with normal)
  Vec3 table_v = Vec3::UnitZ();
  Eigen::Vector2d table_half_extent{0.3, 0.25};
  double depth_quantization_m = 0.001;
  std::vector<ObjectInstance> objects;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Uniform sampling ranges for the category primitives (meters).
struct ShapeRanges {
  Range bottle_radius{0.025, 0.040};
  Range bottle_height{0.16, 0.26};
  Range can_radius{0.028, 0.035};
  Range can_height{0.10, 0.135};
  Range bowl_top_radius{0.055, 0.085};
  Range bowl_bottom_ratio{0.50, 0.70};
  Range bowl_height{0.045, 0.075};
  Range mug_radius{0.034, 0.046};
  Range mug_height{0.080, 0.110};
  Range mug_handle_length{0.020, 0.030};
  Range mug_handle_width{0.014, 0.020};
  Range mug_handle_height_ratio{0.45, 0.60};
  Range laptop_width{0.16, 0.21};
  Range laptop_height{0.016, 0.028};
  Range laptop_depth{0.10, 0.125};
  Range camera_width{0.090, 0.120};
  Range camera_height{0.055, 0.075};
  Range camera_depth{0.050, 0.065};
};

struct SceneConfig {
  int object_count = 5;
  std::vector<Category> categories{kAllCategories.begin(),
                                   kAllCategories.end()};
  std::vector<ColorLabel> palette{kAllColors.begin(), kAllColors.end()};
  CameraIntrinsics intrinsics{280.0, 280.0, 160.0, 120.0, 320, 240};
  double camera_pitch_deg = 35.0;   // downward tilt from horizontal
  double table_distance_m = 0.75;   // along the optical axis
  Eigen::Vector2d table_half_extent{0.30, 0.26};
  double min_separation_m = 0.010;  // gap between footprint circles
  int max_placement_attempts = 1000;
  double depth_quantization_m = 0.001;  // 0 disables quantization
  ShapeRanges shape_ranges;
};

struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Boolean H x W mask, row-major.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  static Mask zeros(int width, int height) {
    return Mask{width, height,
                std::vector<uint8_t>(static_cast<std::size_t>(width) * height,
                                     0)};
  }
  bool at(int u, int v) const {
    return data[static_cast<std::size_t>(v) * width + u] != 0;
  }
  void set(int u, int v, bool on = true) {
    data[static_cast<std::size_t>(v) * width + u] = on ? 1 : 0;
  }
  int count() const;
};

struct ImageDims {
  int width = 0;
  int height = 0;
};

/// Axis-aligned pixel box; (x, y) is the top-left corner.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  double center_u() const { return x + w / 2.0; }
  double center_v() const { return y + h / 2.0; }
  int x2() const { return x + w; }
  int y2() const { return y + h; }
};

// Per-pixel color labels. 0 = background, 1 = table, 2 + color = object.
constexpr uint8_t kLabelBackground = 0;
constexpr uint8_t kLabelTable = 1;
inline uint8_t label_for(ColorLabel c) {
  return static_cast<uint8_t>(2 + static_cast<int>(c));
}

// Per-pixel owner ids in RenderedScene::owner.
constexpr int16_t kOwnerBackground = -1;
constexpr int16_t kOwnerTable = -2;

struct RgbdFrame {
  CameraIntrinsics intrinsics;
  std::vector<uint8_t> labels;  // row-major H x W color labels
  DepthMap depth;
};

struct RenderedScene {
  RgbdFrame frame;
  std::vector<int16_t> owner;  // row-major winner id per pixel

  struct ObjectView {
    int id = 0;
    Mask mask;
    BBox bbox;     // tight bound of the mask; zero area if mask empty
    int pixels = 0;
  };
  std::vector<ObjectView> objects;  // same order as SceneSpec::objects

  int16_t owner_at(int u, int v) const {
    return owner[static_cast<std::size_t>(v) * frame.intrinsics.width + u];
  }
};

enum class CropMode : uint8_t { kBBox, kMask };

/// Deterministic scene synthesis; throws PlacementError when rejection
/// sampling cannot place an object within max_placement_attempts.
SceneSpec generate_scene(const SceneConfig& config, std::uint64_t seed);

/// Per-pixel ray casting against the category primitives and the table
/// rectangle; nearest hit wins. Depth is quantized to
/// SceneSpec::depth_quantization_m when nonzero.
RenderedScene render(const SceneSpec& scene);

/// Ground-truth crop pixels for an object, row-major. kMask returns exactly
/// the mask pixels; kBBox returns every pixel inside the tight bbox. Throws
/// std::out_of_range for an unknown id.
std::vector<PixelIndex> gt_crop(const RenderedScene& rendered, int id,
                                CropMode mode);

/// Tight axis-aligned bound of a mask (zero box when empty).
BBox tight_bbox(const Mask& mask);

/// Circumscribed footprint radius of an object on the table plane.
double footprint_radius(const Vec3& size);

}  // namespace lang6d
