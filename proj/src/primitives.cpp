#include "lang6d/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lang6d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayEps = 1e-9;
// The mug handle box sinks this far into the body so the two parts overlap.
constexpr double kHandleOverlap = 0.005;

struct Interval {
  double lo = kInf;
  double hi = -kInf;
  bool empty() const { return lo > hi; }
};

// Entry/exit of a ray against the slab lo <= value <= hi along one axis.
Interval slab(double o, double d, double lo, double hi) {
  if (std::abs(d) < 1e-15) {
    if (o < lo || o > hi) return {};
    return {-kInf, kInf};
  }
  double t0 = (lo - o) / d;
  double t1 = (hi - o) / d;
  if (t0 > t1) std::swap(t0, t1);
  return {t0, t1};
}

Interval intersect(const Interval& a, const Interval& b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  return r;
}

double entry_of(const Interval& iv) {
  if (iv.empty() || iv.hi <= kRayEps) return kInf;
  return std::max(iv.lo, kRayEps);
}

// Solid cylinder: axis parallel to +Y through (x0, 0, z0).
double hit_cylinder(const Vec3& o, const Vec3& d, double x0, double z0,
                    double radius, double half_height) {
  const double ox = o.x() - x0;
  const double oz = o.z() - z0;
  const double a = d.x() * d.x() + d.z() * d.z();
  const double b = 2.0 * (ox * d.x() + oz * d.z());
  const double c = ox * ox + oz * oz - radius * radius;
  Interval radial;
  if (a < 1e-15) {
    if (c > 0.0) return kInf;
    radial = {-kInf, kInf};
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return kInf;
    const double s = std::sqrt(disc);
    radial = {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)};
  }
  return entry_of(intersect(radial, slab(o.y(), d.y(), -half_height,
                                         half_height)));
}

double hit_box(const Vec3& o, const Vec3& d, const Vec3& half) {
  Interval iv = slab(o.x(), d.x(), -half.x(), half.x());
  iv = intersect(iv, slab(o.y(), d.y(), -half.y(), half.y()));
  iv = intersect(iv, slab(o.z(), d.z(), -half.z(), half.z()));
  return entry_of(iv);
}

// Solid frustum, axis +Y through origin, radius linear from bottom_radius at
// y = -hh to top_radius at y = +hh. Convex, so the nearest boundary hit from
// an outside origin is the entry point.
double hit_frustum(const Vec3& o, const Vec3& d, double bottom_radius,
                   double top_radius, double half_height) {
  double best = kInf;
  const double slope = (top_radius - bottom_radius) / (2.0 * half_height);
  // Lateral surface: x^2 + z^2 = (c0 + c1 t)^2 with radius linear in y(t).
  const double c0 = bottom_radius + slope * (o.y() + half_height);
  const double c1 = slope * d.y();
  const double qa = d.x() * d.x() + d.z() * d.z() - c1 * c1;
  const double qb = 2.0 * (o.x() * d.x() + o.z() * d.z() - c0 * c1);
  const double qc = o.x() * o.x() + o.z() * o.z() - c0 * c0;
  auto consider_surface_root = [&](double t) {
    if (t <= kRayEps || t >= best) return;
    const double y = o.y() + t * d.y();
    if (y < -half_height - 1e-12 || y > half_height + 1e-12) return;
    if (c0 + c1 * t < 0.0) return;  // mirror cone beyond the apex
    best = t;
  };
  if (std::abs(qa) > 1e-15) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      consider_surface_root((-qb - s) / (2.0 * qa));
      consider_surface_root((-qb + s) / (2.0 * qa));
    }
  } else if (std::abs(qb) > 1e-15) {
    consider_surface_root(-qc / qb);
  }
  // Caps.
  auto consider_cap = [&](double y_cap, double r_cap) {
    if (std::abs(d.y()) < 1e-15) return;
    const double t = (y_cap - o.y()) / d.y();
    if (t <= kRayEps || t >= best) return;
    const double x = o.x() + t * d.x();
    const double z = o.z() + t * d.z();
    if (x * x + z * z <= r_cap * r_cap) best = t;
  };
  consider_cap(-half_height, bottom_radius);
  consider_cap(half_height, top_radius);
  return best;
}

double sd_cylinder(const Vec3& p, double x0, double z0, double radius,
                   double half_height) {
  const double dr = std::hypot(p.x() - x0, p.z() - z0) - radius;
  const double dy = std::abs(p.y()) - half_height;
  const double outside = std::hypot(std::max(dr, 0.0), std::max(dy, 0.0));
  return std::min(std::max(dr, dy), 0.0) + outside;
}

double sd_box(const Vec3& p, const Vec3& center, const Vec3& half) {
  const Vec3 q = (p - center).cwiseAbs() - half;
  const Vec3 qpos = q.cwiseMax(0.0);
  return qpos.norm() + std::min(q.maxCoeff(), 0.0);
}

double point_segment_distance(double px, double py, double ax, double ay,
                              double bx, double by) {
  const double abx = bx - ax, aby = by - ay;
  const double apx = px - ax, apy = py - ay;
  const double len2 = abx * abx + aby * aby;
  const double t =
      len2 > 0.0 ? std::clamp((apx * abx + apy * aby) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(apx - t * abx, apy - t * aby);
}

// Distance to the frustum boundary via its (radial, y) profile: bottom cap
// edge, top cap edge, slant segment. Exact for surfaces of revolution.
double sd_frustum(const Vec3& p, double bottom_radius, double top_radius,
                  double half_height) {
  const double rho = std::hypot(p.x(), p.z());
  const double y = p.y();
  double dist = point_segment_distance(rho, y, 0.0, -half_height,
                                       bottom_radius, -half_height);
  dist = std::min(dist, point_segment_distance(rho, y, 0.0, half_height,
                                               top_radius, half_height));
  dist = std::min(dist, point_segment_distance(rho, y, bottom_radius,
                                               -half_height, top_radius,
                                               half_height));
  const double r_at =
      bottom_radius +
      (top_radius - bottom_radius) * (y + half_height) / (2.0 * half_height);
  const bool inside = std::abs(y) <= half_height && rho <= r_at;
  return inside ? -dist : dist;
}

struct MugLayout {
  double axis_x;       // body axis x offset in canonical frame
  Vec3 handle_center;  // handle box center
  Vec3 handle_half;    // handle box half extents
};

MugLayout mug_layout(const ShapeParams& p) {
  MugLayout m;
  m.axis_x = -p.handle_length / 2.0;
  const double x_lo = m.axis_x + p.radius - kHandleOverlap;
  const double x_hi = m.axis_x + p.radius + p.handle_length;
  m.handle_center = Vec3((x_lo + x_hi) / 2.0, 0.0, 0.0);
  m.handle_half = Vec3((x_hi - x_lo) / 2.0, p.handle_height / 2.0,
                       p.handle_width / 2.0);
  return m;
}

int at_least(int n, int lo) { return std::max(n, lo); }

void sample_cylinder_surface(std::vector<Vec3>& out, double x0, double radius,
                             double height, int target) {
  const double side_area = 2.0 * std::numbers::pi * radius * height;
  const double cap_area = std::numbers::pi * radius * radius;
  const double total = side_area + 2.0 * cap_area;
  const int side_n = at_least(
      static_cast<int>(std::lround(target * side_area / total)), 64);
  // Angular count a multiple of 4 so sampled extents hit +-radius exactly.
  int na = at_least(static_cast<int>(std::lround(std::sqrt(
               side_n * 2.0 * std::numbers::pi * radius / height))), 8);
  na = (na + 3) / 4 * 4;
  const int ny = at_least(side_n / na, 2);
  for (int i = 0; i < na; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / na;
    const double cx = x0 + radius * std::cos(ang);
    const double cz = radius * std::sin(ang);
    for (int j = 0; j < ny; ++j) {
      const double y = -height / 2.0 + height * j / (ny - 1);
      out.emplace_back(cx, y, cz);
    }
  }
  // Caps as concentric rings, ring at full radius included.
  const int cap_n =
      at_least(static_cast<int>(std::lround(target * cap_area / total)), 32);
  const int rings = at_least(static_cast<int>(std::sqrt(cap_n / 3.0)), 2);
  for (int s = -1; s <= 1; s += 2) {
    const double y = s * height / 2.0;
    out.emplace_back(x0, y, 0.0);
    for (int ri = 1; ri <= rings; ++ri) {
      const double r = radius * ri / rings;
      int nring = at_least(static_cast<int>(std::lround(
                      2.0 * std::numbers::pi * r / (radius / rings))), 4);
      nring = (nring + 3) / 4 * 4;
      for (int i = 0; i < nring; ++i) {
        const double ang = 2.0 * std::numbers::pi * i / nring;
        out.emplace_back(x0 + r * std::cos(ang), y, r * std::sin(ang));
      }
    }
  }
}

void sample_box_surface(std::vector<Vec3>& out, const Vec3& center,
                        const Vec3& half, int target) {
  const Vec3 full = 2.0 * half;
  const double areas[3] = {full.y() * full.z(), full.x() * full.z(),
                           full.x() * full.y()};
  const double total = 2.0 * (areas[0] + areas[1] + areas[2]);
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    const int face_n = at_least(
        static_cast<int>(std::lround(target * areas[axis] / total)), 16);
    const double len1 = full[a1], len2 = full[a2];
    int n1 = at_least(static_cast<int>(std::lround(
                 std::sqrt(face_n * len1 / std::max(len2, 1e-9)))), 2);
    int n2 = at_least(face_n / n1, 2);
    for (int s = -1; s <= 1; s += 2) {
      for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
          Vec3 p;
          p[axis] = s * half[axis];
          p[a1] = -half[a1] + len1 * i / (n1 - 1);
          p[a2] = -half[a2] + len2 * j / (n2 - 1);
          out.push_back(center + p);
        }
      }
    }
  }
}

void sample_frustum_surface(std::vector<Vec3>& out, double bottom_radius,
                            double top_radius, double height, int target) {
  const double hh = height / 2.0;
  const double mean_r = (bottom_radius + top_radius) / 2.0;
  const double slant =
      std::hypot(top_radius - bottom_radius, height);
  const double side_area = 2.0 * std::numbers::pi * mean_r * slant;
  const double caps = std::numbers::pi * (bottom_radius * bottom_radius +
                                          top_radius * top_radius);
  const double total = side_area + caps;
  const int side_n =
      at_least(static_cast<int>(std::lround(target * side_area / total)), 64);
  int na = at_least(static_cast<int>(std::lround(std::sqrt(
               side_n * 2.0 * std::numbers::pi * mean_r / slant))), 8);
  na = (na + 3) / 4 * 4;
  const int ny = at_least(side_n / na, 2);
  for (int j = 0; j < ny; ++j) {
    const double y = -hh + height * j / (ny - 1);
    const double r = bottom_radius + (top_radius - bottom_radius) *
                                         (y + hh) / height;
    for (int i = 0; i < na; ++i) {
      const double ang = 2.0 * std::numbers::pi * i / na;
      out.emplace_back(r * std::cos(ang), y, r * std::sin(ang));
    }
  }
  auto sample_cap = [&](double y, double radius) {
    const int cap_n = at_least(
        static_cast<int>(std::lround(target * std::numbers::pi * radius *
                                     radius / total)), 16);
    const int rings = at_least(static_cast<int>(std::sqrt(cap_n / 3.0)), 2);
    out.emplace_back(0.0, y, 0.0);
    for (int ri = 1; ri <= rings; ++ri) {
      const double r = radius * ri / rings;
      int nring = at_least(static_cast<int>(std::lround(
                      2.0 * std::numbers::pi * r / (radius / rings))), 4);
      nring = (nring + 3) / 4 * 4;
      for (int i = 0; i < nring; ++i) {
        const double ang = 2.0 * std::numbers::pi * i / nring;
        out.emplace_back(r * std::cos(ang), y, r * std::sin(ang));
      }
    }
  };
  sample_cap(-hh, bottom_radius);
  sample_cap(hh, top_radius);
}

}  // namespace

std::string to_string(Category c) {
  switch (c) {
    case Category::kBottle: return "bottle";
    case Category::kBowl: return "bowl";
    case Category::kCan: return "can";
    case Category::kMug: return "mug";
    case Category::kLaptop: return "laptop";
    case Category::kCamera: return "camera";
  }
  return "unknown";
}

std::string to_string(ColorLabel c) {
  switch (c) {
    case ColorLabel::kRed: return "red";
    case ColorLabel::kGreen: return "green";
    case ColorLabel::kBlue: return "blue";
    case ColorLabel::kYellow: return "yellow";
  }
  return "unknown";
}

Category category_from_string(const std::string& s) {
  for (Category c : kAllCategories) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown category: " + s);
}

ColorLabel color_from_string(const std::string& s) {
  for (ColorLabel c : kAllColors) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown color: " + s);
}

bool is_axially_symmetric(Category c) {
  return c == Category::kBottle || c == Category::kBowl || c == Category::kCan;
}

Vec3 tight_extents(Category c, const ShapeParams& p) {
  switch (c) {
    case Category::kBottle:
    case Category::kCan:
      return {2.0 * p.radius, p.height, 2.0 * p.radius};
    case Category::kBowl:
      return {2.0 * p.top_radius, p.height, 2.0 * p.top_radius};
    case Category::kLaptop:
    case Category::kCamera:
      return {p.box_x, p.box_y, p.box_z};
    case Category::kMug:
      return {2.0 * p.radius + p.handle_length, p.height, 2.0 * p.radius};
  }
  return Vec3::Zero();
}

double mug_axis_offset_x(const ShapeParams& p) {
  return -p.handle_length / 2.0;
}

double ray_hit(Category c, const ShapeParams& p, const Vec3& o,
               const Vec3& d) {
  switch (c) {
    case Category::kBottle:
    case Category::kCan:
      return hit_cylinder(o, d, 0.0, 0.0, p.radius, p.height / 2.0);
    case Category::kBowl:
      return hit_frustum(o, d, p.bottom_radius, p.top_radius, p.height / 2.0);
    case Category::kLaptop:
    case Category::kCamera:
      return hit_box(o, d, Vec3(p.box_x / 2.0, p.box_y / 2.0, p.box_z / 2.0));
    case Category::kMug: {
      const MugLayout m = mug_layout(p);
      const double body =
          hit_cylinder(o, d, m.axis_x, 0.0, p.radius, p.height / 2.0);
      const Vec3 local = o - m.handle_center;
      const double handle = hit_box(local, d, m.handle_half);
      return std::min(body, handle);
    }
  }
  return kInf;
}

double surface_distance(Category c, const ShapeParams& p, const Vec3& point) {
  switch (c) {
    case Category::kBottle:
    case Category::kCan:
      return std::abs(sd_cylinder(point, 0.0, 0.0, p.radius, p.height / 2.0));
    case Category::kBowl:
      return std::abs(
          sd_frustum(point, p.bottom_radius, p.top_radius, p.height / 2.0));
    case Category::kLaptop:
    case Category::kCamera:
      return std::abs(sd_box(point, Vec3::Zero(),
                             Vec3(p.box_x / 2.0, p.box_y / 2.0, p.box_z / 2.0)));
    case Category::kMug: {
      const MugLayout m = mug_layout(p);
      const double body =
          sd_cylinder(point, m.axis_x, 0.0, p.radius, p.height / 2.0);
      const double handle = sd_box(point, m.handle_center, m.handle_half);
      return std::abs(std::min(body, handle));
    }
  }
  return kInf;
}

PointCloud sample_surface(Category c, const ShapeParams& p, int min_points) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(min_points) * 2);
  // Oversample, then verify the floor; grids round counts down in places.
  const int target = min_points * 3 / 2;
  switch (c) {
    case Category::kBottle:
    case Category::kCan:
      sample_cylinder_surface(pts, 0.0, p.radius, p.height, target);
      break;
    case Category::kBowl:
      sample_frustum_surface(pts, p.bottom_radius, p.top_radius, p.height,
                             target);
      break;
    case Category::kLaptop:
    case Category::kCamera:
      sample_box_surface(pts, Vec3::Zero(),
                         Vec3(p.box_x / 2.0, p.box_y / 2.0, p.box_z / 2.0),
                         target);
      break;
    case Category::kMug: {
      const MugLayout m = mug_layout(p);
      std::vector<Vec3> body;
      sample_cylinder_surface(body, m.axis_x, p.radius, p.height, target);
      std::vector<Vec3> handle;
      sample_box_surface(handle, m.handle_center, m.handle_half,
                         std::max(target / 6, 128));
      // Union surface: drop samples buried inside the other part.
      for (const Vec3& q : body) {
        if (sd_box(q, m.handle_center, m.handle_half) > 1e-9) pts.push_back(q);
      }
      for (const Vec3& q : handle) {
        if (sd_cylinder(q, m.axis_x, 0.0, p.radius, p.height / 2.0) > 1e-9) {
          pts.push_back(q);
        }
      }
      break;
    }
  }
  if (static_cast<int>(pts.size()) < min_points) {
    return sample_surface(c, p, min_points * 2);
  }
  PointCloud cloud;
  cloud.points = std::move(pts);
  cloud.provenance = CloudProvenance::kObject;
  return cloud;
}

}  // namespace lang6d
