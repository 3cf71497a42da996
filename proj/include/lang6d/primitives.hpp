#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "lang6d/geometry.hpp"

namespace lang6d {

enum class Category : uint8_t { kBottle, kBowl, kCan, kMug, kLaptop, kCamera };
enum class ColorLabel : uint8_t { kRed, kGreen, kBlue, kYellow };

constexpr std::array<Category, 6> kAllCategories = {
    Category::kBottle, Category::kBowl, Category::kCan,
    Category::kMug,    Category::kLaptop, Category::kCamera};
constexpr std::array<ColorLabel, 4> kAllColors = {
    ColorLabel::kRed, ColorLabel::kGreen, ColorLabel::kBlue,
    ColorLabel::kYellow};

std::string to_string(Category c);
std::string to_string(ColorLabel c);
Category category_from_string(const std::string& s);
ColorLabel color_from_string(const std::string& s);

/// Whether the category's shape is invariant under rotation about its
/// canonical +Y axis, which makes yaw unobservable.
bool is_axially_symmetric(Category c);

/// Category-specific primitive parameters, all in meters. Only the fields
/// relevant to the category are used:
///   bottle, can : radius, height                      (solid cylinder)
///   bowl        : top_radius, bottom_radius, height   (solid frustum)
///   laptop, camera : box_x, box_y, box_z              (solid box)
///   mug         : radius, height, handle_* (cylinder plus a radial
///                 handle box protruding along canonical +X)
struct ShapeParams {
  double radius = 0.0;
  double height = 0.0;
  double top_radius = 0.0;
  double bottom_radius = 0.0;
  double box_x = 0.0;
  double box_y = 0.0;
  double box_z = 0.0;
  double handle_length = 0.0;
  double handle_width = 0.0;
  double handle_height = 0.0;
};

/// Tight bounding extents of the primitive in its canonical frame
/// (x: width, y: height, z: depth). The canonical frame is centered on this
/// tight box; for the mug this puts the body axis at x = -handle_length/2.
Vec3 tight_extents(Category c, const ShapeParams& p);

/// Offset of the mug body axis from the canonical origin along +X.
double mug_axis_offset_x(const ShapeParams& p);

/// Smallest ray parameter t > eps at which origin + t * dir enters the solid
/// primitive (canonical frame). Returns +infinity when the ray misses.
double ray_hit(Category c, const ShapeParams& p, const Vec3& origin,
               const Vec3& dir);

/// Unsigned distance from a canonical-frame point to the primitive surface.
double surface_distance(Category c, const ShapeParams& p, const Vec3& point);

/// Deterministic stratified sampling of the primitive surface with at least
/// `min_points` points; grids are laid out so sampled extents equal the tight
/// extents exactly.
PointCloud sample_surface(Category c, const ShapeParams& p,
                          int min_points = 2000);

}  // namespace lang6d
