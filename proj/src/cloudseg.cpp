#include "lang6d/cloudseg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "lang6d/rng.hpp"

namespace lang6d {

namespace {

// Spatial hash over a uniform grid, for radius queries on point clouds.
class PointGrid {
 public:
  PointGrid(std::span<const Vec3> points, double cell)
      : points_(points), cell_(cell) {
    buckets_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      buckets_[key_of(points[i])].push_back(static_cast<int>(i));
    }
  }

  template <typename Fn>
  void for_neighbors(const Vec3& p, double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    const int reach = static_cast<int>(std::ceil(radius / cell_));
    const auto [cx, cy, cz] = cell_of(p);
    for (int dx = -reach; dx <= reach; ++dx) {
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dz = -reach; dz <= reach; ++dz) {
          const auto it = buckets_.find(pack(cx + dx, cy + dy, cz + dz));
          if (it == buckets_.end()) continue;
          for (int idx : it->second) {
            if ((points_[idx] - p).squaredNorm() <= r2) fn(idx);
          }
        }
      }
    }
  }

 private:
  std::tuple<int, int, int> cell_of(const Vec3& p) const {
    return {static_cast<int>(std::floor(p.x() / cell_)),
            static_cast<int>(std::floor(p.y() / cell_)),
            static_cast<int>(std::floor(p.z() / cell_))};
  }
  static std::uint64_t pack(int x, int y, int z) {
    auto u = [](int v) {
      return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v) &
                                        0x1fffff);
    };
    return u(x) | (u(y) << 21) | (u(z) << 42);
  }
  std::uint64_t key_of(const Vec3& p) const {
    const auto [x, y, z] = cell_of(p);
    return pack(x, y, z);
  }

  std::span<const Vec3> points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double point_ray_distance(const Vec3& p, const Vec3& unit_ray) {
  return (p - p.dot(unit_ray) * unit_ray).norm();
}

}  // namespace

SegmentationConfig SegmentationConfig::tuned_bbox() {
  // Chosen on bbox-expanded crops of clean synthetic depth: a tight linkage
  // separates neighbors well and there are no silhouette strays to shave.
  SegmentationConfig c;
  c.cluster_radius_m = 0.006;
  c.outlier_stddev_mult = 0.0;  // disabled
  c.outlier_neighbors = 0;
  return c;
}

SegmentationConfig SegmentationConfig::tuned_bbox_mask() {
  // Adds statistical outlier removal for mask-silhouette strays, still
  // assuming clean (noise-free) synthetic depth.
  SegmentationConfig c;
  c.cluster_radius_m = 0.008;
  c.outlier_stddev_mult = 1.0;
  return c;
}

BBox expand_bbox(const BBox& box, const ExpandRatios& ratios, ImageDims dims) {
  const double w = box.w;
  const double h = box.h;
  int x1 = static_cast<int>(std::lround(box.x - ratios.left * w));
  int y1 = static_cast<int>(std::lround(box.y - ratios.top * h));
  int x2 = static_cast<int>(std::lround(box.x2() + ratios.right * w));
  int y2 = static_cast<int>(std::lround(box.y2() + ratios.bottom * h));
  x1 = std::clamp(x1, 0, dims.width);
  y1 = std::clamp(y1, 0, dims.height);
  x2 = std::clamp(x2, x1, dims.width);
  y2 = std::clamp(y2, y1, dims.height);
  return BBox{x1, y1, x2 - x1, y2 - y1};
}

Mask dilate_mask(const Mask& mask, int radius) {
  if (radius <= 0) return mask;
  std::vector<std::pair<int, int>> offsets;
  for (int dv = -radius; dv <= radius; ++dv) {
    for (int du = -radius; du <= radius; ++du) {
      if (du * du + dv * dv <= radius * radius) offsets.emplace_back(du, dv);
    }
  }
  Mask out = Mask::zeros(mask.width, mask.height);
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      if (!mask.at(u, v)) continue;
      for (const auto& [du, dv] : offsets) {
        const int uu = u + du;
        const int vv = v + dv;
        if (uu >= 0 && uu < mask.width && vv >= 0 && vv < mask.height) {
          out.set(uu, vv);
        }
      }
    }
  }
  return out;
}

PointCloud add_noise(const PointCloud& cloud, const NoiseSpec& noise,
                     std::uint64_t seed) {
  PointCloud out = cloud;
  SeededRng rng(mix64(seed ^ 0x6e015e00ULL));
  for (Vec3& p : out.points) {
    for (int axis = 0; axis < 3; ++axis) {
      p[axis] += rng.normal(noise.mean[axis], noise.stddev[axis]);
    }
  }
  return out;
}

Vec3 crop_centroid_ray(std::span<const PixelIndex> pixels,
                       const CameraIntrinsics& k) {
  double su = 0.0, sv = 0.0;
  for (PixelIndex idx : pixels) {
    su += pixel_u(idx, k.width);
    sv += pixel_v(idx, k.width);
  }
  const double n = std::max<double>(1.0, static_cast<double>(pixels.size()));
  const Vec3 ray((su / n - k.cx) / k.fx, (sv / n - k.cy) / k.fy, 1.0);
  return ray.normalized();
}

std::optional<TablePlane> fit_plane_ransac(std::span<const Vec3> points,
                                           const Vec3& vertical_prior,
                                           const SegmentationConfig& config,
                                           std::uint64_t seed) {
  if (points.size() < 3) return std::nullopt;
  SeededRng rng(mix64(seed ^ 0x9a45acULL));
  const double cos_max_tilt =
      std::cos(config.plane_normal_max_tilt_deg * std::numbers::pi / 180.0);
  const Vec3 up = vertical_prior.normalized();

  int best_inliers = 0;
  TablePlane best{};
  for (int it = 0; it < config.ransac_iterations; ++it) {
    const std::size_t n = points.size();
    const Vec3& a = points[rng.uniform_int(n)];
    const Vec3& b = points[rng.uniform_int(n)];
    const Vec3& c = points[rng.uniform_int(n)];
    Vec3 normal = (b - a).cross(c - a);
    const double len = normal.norm();
    if (len < 1e-12) continue;
    normal /= len;
    if (normal.dot(up) < 0.0) normal = -normal;
    if (normal.dot(up) < cos_max_tilt) continue;  // not table-like
    const double offset = normal.dot(a);

    int inliers = 0;
    int below = 0;
    for (const Vec3& p : points) {
      const double d = normal.dot(p) - offset;
      if (std::abs(d) < config.plane_band_m) {
        ++inliers;
      } else if (d < 0.0) {
        ++below;
      }
    }
    // A support plane keeps (almost) all remaining points above it.
    if (below > config.plane_support_max_below *
                    static_cast<double>(points.size())) {
      continue;
    }
    if (inliers > best_inliers) {
      best_inliers = inliers;
      best.normal = normal;
      best.offset = offset;
    }
  }
  if (best_inliers <
      config.ransac_min_inlier_frac * static_cast<double>(points.size())) {
    return std::nullopt;
  }
  return best;
}

SegmentationResult segment_object(const PointCloud& region,
                                  const Vec3& prior_ray,
                                  const std::optional<TablePlane>& plane,
                                  const Vec3& vertical_prior,
                                  const SegmentationConfig& config,
                                  std::uint64_t seed) {
  if (static_cast<int>(region.size()) < config.min_points) {
    throw SegmentationError("segment_object: region has fewer than " +
                            std::to_string(config.min_points) + " points");
  }
  SegmentationResult result;

  // 1. Table-plane removal.
  std::optional<TablePlane> table = plane;
  if (!table) {
    table = fit_plane_ransac(region.points, vertical_prior, config, seed);
    result.plane = table;
  }
  std::vector<Vec3> kept;
  kept.reserve(region.size());
  if (table) {
    for (const Vec3& p : region.points) {
      if (std::abs(table->signed_distance(p)) >= config.plane_band_m) {
        kept.push_back(p);
      }
    }
  } else {
    kept.assign(region.points.begin(), region.points.end());
  }
  result.removed_plane = static_cast<int>(region.size() - kept.size());
  if (static_cast<int>(kept.size()) < config.min_points) {
    throw SegmentationError(
        "segment_object: table removal left too few points");
  }

  // 2. Euclidean clustering (single linkage over the radius graph).
  const int n = static_cast<int>(kept.size());
  DisjointSet ds(n);
  {
    const PointGrid grid(kept, config.cluster_radius_m);
    for (int i = 0; i < n; ++i) {
      grid.for_neighbors(kept[i], config.cluster_radius_m,
                         [&](int j) { if (j > i) ds.unite(i, j); });
    }
  }
  std::unordered_map<int, std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters[ds.find(i)].push_back(i);
  std::vector<int> roots;
  roots.reserve(clusters.size());
  for (const auto& [root, members] : clusters) roots.push_back(root);
  std::sort(roots.begin(), roots.end());

  // 3. Cluster choice: size times closeness to the crop centroid ray.
  double best_weight = -1.0;
  int best_root = -1;
  for (int root : roots) {
    const std::vector<int>& members = clusters[root];
    Vec3 centroid = Vec3::Zero();
    for (int i : members) centroid += kept[i];
    centroid /= static_cast<double>(members.size());
    const double d = point_ray_distance(centroid, prior_ray);
    const double weight = static_cast<double>(members.size()) *
                          std::exp(-d / config.prior_ray_scale_m);
    if (weight > best_weight) {
      best_weight = weight;
      best_root = root;
    }
  }
  std::vector<Vec3> cluster;
  cluster.reserve(clusters[best_root].size());
  for (int i : clusters[best_root]) cluster.push_back(kept[i]);
  result.removed_cluster = static_cast<int>(kept.size() - cluster.size());
  if (static_cast<int>(cluster.size()) < config.min_points) {
    throw SegmentationError(
        "segment_object: selected cluster is too small");
  }

  // 4. Statistical outlier removal on the selected cluster. Neighbor
  // distances are capped at outlier_search_cap_m, which both bounds the
  // grid search and saturates the score of isolated points.
  std::vector<Vec3> object;
  if (config.outlier_neighbors > 0 && config.outlier_stddev_mult > 0.0) {
    const int m = static_cast<int>(cluster.size());
    const int k = config.outlier_neighbors;
    const double cap = config.outlier_search_cap_m;
    std::vector<double> mean_dist(m, cap);
    const PointGrid grid(cluster, cap / 2.0);
    std::vector<double> dists;
    for (int i = 0; i < m; ++i) {
      dists.clear();
      grid.for_neighbors(cluster[i], cap, [&](int j) {
        if (j != i) dists.push_back((cluster[j] - cluster[i]).norm());
      });
      if (dists.empty()) continue;
      const int take = std::min<int>(k, static_cast<int>(dists.size()));
      std::partial_sort(dists.begin(), dists.begin() + take, dists.end());
      double sum = 0.0;
      for (int t = 0; t < take; ++t) sum += dists[t];
      sum += cap * (k - take);  // missing neighbors count as capped
      mean_dist[i] = sum / k;
    }
    double mean = 0.0;
    for (double d : mean_dist) mean += d;
    mean /= m;
    double var = 0.0;
    for (double d : mean_dist) var += (d - mean) * (d - mean);
    const double stddev = std::sqrt(var / m);
    const double limit = mean + config.outlier_stddev_mult * stddev;
    object.reserve(cluster.size());
    for (int i = 0; i < m; ++i) {
      if (mean_dist[i] <= limit) object.push_back(cluster[i]);
    }
  } else {
    object = std::move(cluster);
  }
  result.removed_outlier =
      static_cast<int>(n - result.removed_cluster - object.size());
  if (static_cast<int>(object.size()) < config.min_points) {
    throw SegmentationError(
        "segment_object: outlier removal left too few points");
  }

  result.object.points = std::move(object);
  result.object.provenance = CloudProvenance::kObject;
  return result;
}

}  // namespace lang6d
