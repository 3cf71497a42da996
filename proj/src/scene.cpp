#include "lang6d/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lang6d/rng.hpp"

namespace lang6d {

namespace {

constexpr double kDeg2Rad = std::numbers::pi / 180.0;

ShapeParams sample_shape(Category c, const ShapeRanges& r, SeededRng& rng) {
  auto draw = [&rng](const Range& range) {
    return rng.uniform(range.lo, range.hi);
  };
  ShapeParams p;
  switch (c) {
    case Category::kBottle:
      p.radius = draw(r.bottle_radius);
      p.height = draw(r.bottle_height);
      break;
    case Category::kCan:
      p.radius = draw(r.can_radius);
      p.height = draw(r.can_height);
      break;
    case Category::kBowl:
      p.top_radius = draw(r.bowl_top_radius);
      p.bottom_radius = p.top_radius * draw(r.bowl_bottom_ratio);
      p.height = draw(r.bowl_height);
      break;
    case Category::kMug:
      p.radius = draw(r.mug_radius);
      p.height = draw(r.mug_height);
      p.handle_length = draw(r.mug_handle_length);
      p.handle_width = draw(r.mug_handle_width);
      p.handle_height = p.height * draw(r.mug_handle_height_ratio);
      break;
    case Category::kLaptop:
      p.box_x = draw(r.laptop_width);
      p.box_y = draw(r.laptop_height);
      p.box_z = draw(r.laptop_depth);
      break;
    case Category::kCamera:
      p.box_x = draw(r.camera_width);
      p.box_y = draw(r.camera_height);
      p.box_z = draw(r.camera_depth);
      break;
  }
  return p;
}

Mat3 upright_rotation(const Vec3& up, const Vec3& in_plane_x,
                      const Vec3& in_plane_z, double yaw) {
  const Vec3 c0 = std::cos(yaw) * in_plane_x + std::sin(yaw) * in_plane_z;
  Mat3 r;
  r.col(0) = c0;
  r.col(1) = up;
  r.col(2) = c0.cross(up);
  return r;
}

}  // namespace

int Mask::count() const {
  return static_cast<int>(std::count(data.begin(), data.end(), uint8_t{1}));
}

BBox tight_bbox(const Mask& mask) {
  int min_u = mask.width, min_v = mask.height, max_u = -1, max_v = -1;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      if (!mask.at(u, v)) continue;
      min_u = std::min(min_u, u);
      max_u = std::max(max_u, u);
      min_v = std::min(min_v, v);
      max_v = std::max(max_v, v);
    }
  }
  if (max_u < 0) return BBox{};
  return BBox{min_u, min_v, max_u - min_u + 1, max_v - min_v + 1};
}

double footprint_radius(const Vec3& size) {
  return std::hypot(size.x(), size.z()) / 2.0;
}

SceneSpec generate_scene(const SceneConfig& config, std::uint64_t seed) {
  SceneSpec scene;
  scene.seed = seed;
  scene.intrinsics = config.intrinsics;
  scene.depth_quantization_m = config.depth_quantization_m;
  scene.table_half_extent = config.table_half_extent;

  const double pitch = config.camera_pitch_deg * kDeg2Rad;
  // Camera pitched down by `pitch`: world up in camera coordinates.
  const Vec3 up(0.0, -std::cos(pitch), -std::sin(pitch));
  scene.table.normal = up;
  scene.table_center = Vec3(0.0, 0.0, config.table_distance_m);
  scene.table.offset = up.dot(scene.table_center);
  scene.table_u = Vec3::UnitX();  // up.x() == 0, already in-plane
  scene.table_v = up.cross(scene.table_u).normalized();

  SeededRng rng(mix64(seed));
  struct Placed {
    double pu, pv, footprint;
  };
  std::vector<Placed> placed;

  for (int i = 0; i < config.object_count; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < config.max_placement_attempts; ++attempt) {
      const Category category =
          config.categories[rng.uniform_int(config.categories.size())];
      const ColorLabel color =
          config.palette[rng.uniform_int(config.palette.size())];
      const ShapeParams shape =
          sample_shape(category, config.shape_ranges, rng);
      const Vec3 size = tight_extents(category, shape);
      const double yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double foot = footprint_radius(size);
      const double span_u = config.table_half_extent.x() - foot;
      const double span_v = config.table_half_extent.y() - foot;
      if (span_u <= 0.0 || span_v <= 0.0) continue;
      const double pu = rng.uniform(-span_u, span_u);
      const double pv = rng.uniform(-span_v, span_v);

      bool overlaps = false;
      for (const Placed& other : placed) {
        const double gap = std::hypot(pu - other.pu, pv - other.pv) -
                           (foot + other.footprint);
        if (gap < config.min_separation_m) {
          overlaps = true;
          break;
        }
      }
      if (overlaps) continue;

      ObjectInstance obj;
      obj.id = i;
      obj.category = category;
      obj.color = color;
      obj.shape = shape;
      obj.size = size;
      const Vec3 surface = scene.table_center + pu * scene.table_u +
                           pv * scene.table_v;
      obj.pose.translation = surface + (size.y() / 2.0) * up;
      obj.pose.rotation = upright_rotation(up, scene.table_u, scene.table_v,
                                           yaw);
      // Plain boxes look identical under a 180 degree yaw flip; store the
      // representative whose +X faces the camera so estimates and ground
      // truth share one convention.
      if (!is_axially_symmetric(category) && category != Category::kMug) {
        const Vec3 toward_camera = -obj.pose.translation.normalized();
        if (obj.pose.rotation.col(0).dot(toward_camera) < 0.0) {
          obj.pose.rotation.col(0) *= -1.0;
          obj.pose.rotation.col(2) *= -1.0;
        }
      }
      scene.objects.push_back(std::move(obj));
      placed.push_back({pu, pv, foot});
      ok = true;
      break;
    }
    if (!ok) {
      throw PlacementError("generate_scene: could not place object " +
                           std::to_string(i) + " after " +
                           std::to_string(config.max_placement_attempts) +
                           " attempts");
    }
  }
  return scene;
}

RenderedScene render(const SceneSpec& scene) {
  const CameraIntrinsics& k = scene.intrinsics;
  RenderedScene out;
  out.frame.intrinsics = k;
  out.frame.depth = DepthMap::zeros(k.width, k.height);
  out.frame.labels.assign(static_cast<std::size_t>(k.width) * k.height,
                          kLabelBackground);
  out.owner.assign(static_cast<std::size_t>(k.width) * k.height,
                   kOwnerBackground);

  struct ObjectCache {
    Mat3 rot_inv;
    Vec3 origin_local;  // camera origin in canonical frame
    Vec3 center;
    double bound_radius;
  };
  std::vector<ObjectCache> cache(scene.objects.size());
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const ObjectInstance& obj = scene.objects[i];
    cache[i].rot_inv = obj.pose.rotation.transpose();
    cache[i].origin_local = -(cache[i].rot_inv * obj.pose.translation);
    cache[i].center = obj.pose.translation;
    cache[i].bound_radius = obj.size.norm() / 2.0 + 1e-6;
  }

  const double quant = scene.depth_quantization_m;
  const Vec3 n = scene.table.normal;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 dir((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      double best_t = std::numeric_limits<double>::infinity();
      int16_t best_owner = kOwnerBackground;

      const double denom = n.dot(dir);
      if (std::abs(denom) > 1e-12) {
        const double t = scene.table.offset / denom;
        if (t > 0.0) {
          const Vec3 hit = t * dir;
          const Vec3 rel = hit - scene.table_center;
          if (std::abs(rel.dot(scene.table_u)) <=
                  scene.table_half_extent.x() &&
              std::abs(rel.dot(scene.table_v)) <=
                  scene.table_half_extent.y()) {
            best_t = t;
            best_owner = kOwnerTable;
          }
        }
      }

      for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const ObjectCache& c = cache[i];
        // Cheap sphere reject before the exact primitive test.
        const double dir2 = dir.squaredNorm();
        const double proj = dir.dot(c.center) / dir2;
        const double miss2 = (c.center - proj * dir).squaredNorm();
        if (miss2 > c.bound_radius * c.bound_radius) continue;
        const Vec3 local_dir = c.rot_inv * dir;
        const double t = ray_hit(scene.objects[i].category,
                                 scene.objects[i].shape, c.origin_local,
                                 local_dir);
        if (t < best_t) {
          best_t = t;
          best_owner = static_cast<int16_t>(scene.objects[i].id);
        }
      }

      if (best_owner == kOwnerBackground) continue;
      double z = best_t;  // dir.z == 1, so the ray parameter is camera depth
      if (quant > 0.0) z = std::round(z / quant) * quant;
      const std::size_t idx = static_cast<std::size_t>(v) * k.width + u;
      out.frame.depth.values[idx] = static_cast<float>(z);
      out.owner[idx] = best_owner;
      if (best_owner == kOwnerTable) {
        out.frame.labels[idx] = kLabelTable;
      } else {
        out.frame.labels[idx] = label_for(scene.objects[best_owner].color);
      }
    }
  }

  out.objects.resize(scene.objects.size());
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    out.objects[i].id = scene.objects[i].id;
    out.objects[i].mask = Mask::zeros(k.width, k.height);
  }
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const int16_t owner = out.owner_at(u, v);
      if (owner >= 0) {
        out.objects[owner].mask.set(u, v);
        out.objects[owner].pixels += 1;
      }
    }
  }
  for (auto& view : out.objects) {
    view.bbox = tight_bbox(view.mask);
  }
  return out;
}

std::vector<PixelIndex> gt_crop(const RenderedScene& rendered, int id,
                                CropMode mode) {
  if (id < 0 || id >= static_cast<int>(rendered.objects.size())) {
    throw std::out_of_range("gt_crop: unknown object id " +
                            std::to_string(id));
  }
  const RenderedScene::ObjectView& view = rendered.objects[id];
  const int width = rendered.frame.intrinsics.width;
  std::vector<PixelIndex> pixels;
  if (mode == CropMode::kMask) {
    pixels.reserve(view.pixels);
    for (int v = 0; v < view.mask.height; ++v) {
      for (int u = 0; u < view.mask.width; ++u) {
        if (view.mask.at(u, v)) pixels.push_back(pixel_index(u, v, width));
      }
    }
  } else {
    pixels.reserve(static_cast<std::size_t>(view.bbox.w) * view.bbox.h);
    for (int v = view.bbox.y; v < view.bbox.y2(); ++v) {
      for (int u = view.bbox.x; u < view.bbox.x2(); ++u) {
        pixels.push_back(pixel_index(u, v, width));
      }
    }
  }
  return pixels;
}

}  // namespace lang6d
