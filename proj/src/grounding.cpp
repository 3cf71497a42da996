#include "lang6d/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lang6d/rng.hpp"

namespace lang6d {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::optional<ColorLabel> palette_color(const std::string& token) {
  for (ColorLabel c : kAllColors) {
    if (to_string(c) == token) return c;
  }
  return std::nullopt;
}

Candidate make_candidate(const RenderedScene& rendered, const SceneSpec& scene,
                         std::size_t index) {
  const auto& view = rendered.objects[index];
  Candidate cand;
  cand.id = view.id;
  cand.category = scene.objects[index].category;
  cand.bbox = view.bbox;
  cand.mask = view.mask;

  const CameraIntrinsics& k = rendered.frame.intrinsics;
  std::array<double, 4> counts{};
  double depth_sum = 0.0;
  int depth_count = 0;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      if (!view.mask.at(u, v)) continue;
      const uint8_t label =
          rendered.frame.labels[static_cast<std::size_t>(v) * k.width + u];
      if (label >= 2 && label < 2 + static_cast<int>(counts.size())) {
        counts[label - 2] += 1.0;
      }
      const double z = rendered.frame.depth.at(u, v);
      if (z > 0.0) {
        depth_sum += z;
        depth_count += 1;
      }
    }
  }
  double total = 0.0;
  for (double c : counts) total += c;
  if (total > 0.0) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      cand.color_histogram[i] = counts[i] / total;
    }
  }
  cand.mean_depth = depth_count > 0 ? depth_sum / depth_count : 0.0;
  return cand;
}

}  // namespace

LocFeature encode_loc(const BBox& bbox, ImageDims dims) {
  LocFeature f;
  f << static_cast<double>(bbox.x) / dims.width,
      static_cast<double>(bbox.y) / dims.height,
      static_cast<double>(bbox.x2()) / dims.width,
      static_cast<double>(bbox.y2()) / dims.height,
      static_cast<double>(bbox.w) * bbox.h / (static_cast<double>(dims.width) *
                                              dims.height);
  return f;
}

RelFeature encode_rel(const Candidate& cand, const Candidate& neighbor,
                      ImageDims dims) {
  RelFeature f;
  const double area =
      std::max(static_cast<double>(cand.bbox.w) * cand.bbox.h, 1.0);
  f << (neighbor.bbox.center_u() - cand.bbox.center_u()) / dims.width,
      (neighbor.bbox.center_v() - cand.bbox.center_v()) / dims.height,
      neighbor.mean_depth - cand.mean_depth,
      static_cast<double>(neighbor.bbox.w) * neighbor.bbox.h / area,
      neighbor.category == cand.category ? 1.0 : 0.0;
  return f;
}

double subject_score(const Candidate& cand, Category category,
                     std::span<const std::string> attributes) {
  if (cand.category != category) return 0.0;
  if (attributes.empty()) return 1.0;
  double sum = 0.0;
  for (const std::string& attr : attributes) {
    if (auto color = palette_color(attr)) {
      sum += cand.color_histogram[static_cast<int>(*color)];
    }
    // Unknown adjectives contribute 0 rather than rejecting the candidate.
  }
  return sum / static_cast<double>(attributes.size());
}

double subject_score(const Candidate& cand, const StructuredQuery& q) {
  return subject_score(cand, q.category, q.attributes);
}

DepthRange candidate_depth_range(std::span<const Candidate> cands) {
  DepthRange r{0.0, 0.0};
  bool first = true;
  for (const Candidate& c : cands) {
    if (first) {
      r.near = r.far = c.mean_depth;
      first = false;
    } else {
      r.near = std::min(r.near, c.mean_depth);
      r.far = std::max(r.far, c.mean_depth);
    }
  }
  return r;
}

double location_score(const Candidate& cand, const StructuredQuery& q,
                      ImageDims dims, DepthRange range) {
  if (q.location_terms.empty()) return 1.0;
  double score = 1.0;
  const double xc = cand.bbox.center_u();
  const double span = range.far - range.near;
  for (LocationTerm term : q.location_terms) {
    switch (term) {
      case LocationTerm::kLeft:
        score *= clamp01(1.0 - 2.0 * xc / dims.width);
        break;
      case LocationTerm::kRight:
        score *= clamp01(2.0 * xc / dims.width - 1.0);
        break;
      case LocationTerm::kFront:
        score *= span < 1e-9
                     ? 1.0
                     : clamp01((range.far - cand.mean_depth) / span);
        break;
      case LocationTerm::kBehindArea:
        score *= span < 1e-9
                     ? 1.0
                     : clamp01((cand.mean_depth - range.near) / span);
        break;
    }
  }
  return score;
}

double relation_score(const Candidate& cand,
                      std::span<const Candidate> all_candidates,
                      const StructuredQuery& q, ImageDims dims,
                      const GroundingConfig& config) {
  if (!q.relation.has_value()) return 0.0;
  const SpatialRelation& rel = *q.relation;
  double best = 0.0;
  for (const Candidate& anchor : all_candidates) {
    if (anchor.id == cand.id) continue;
    const double anchor_match =
        subject_score(anchor, rel.anchor.category, rel.anchor.attributes);
    if (anchor_match <= best) continue;  // compat <= 1, cannot beat best
    const RelFeature f = encode_rel(cand, anchor, dims);
    double compat = 0.0;
    switch (rel.type) {
      case RelationType::kLeftOf:
        compat = clamp01(f[0] / config.relation_ramp_frac);
        break;
      case RelationType::kRightOf:
        compat = clamp01(-f[0] / config.relation_ramp_frac);
        break;
      case RelationType::kBehind:
        compat = clamp01(-f[2] / config.depth_tau_m);
        break;
      case RelationType::kFrontOf:
        compat = clamp01(f[2] / config.depth_tau_m);
        break;
    }
    best = std::max(best, anchor_match * compat);
  }
  return best;
}

GroundingResult ground(std::span<const Candidate> cands,
                       const StructuredQuery& q, ImageDims dims,
                       const GroundingConfig& config) {
  if (cands.empty()) {
    throw std::invalid_argument("ground: empty candidate list");
  }
  GroundingResult result;
  const bool has_location = !q.location_terms.empty();
  const bool has_relation = q.relation.has_value();
  if (config.weight_override) {
    result.weight_subject = config.weight_override->subject;
    result.weight_location = config.weight_override->location;
    result.weight_relation = config.weight_override->relation;
  } else {
    result.weight_subject = 1.0;
    result.weight_location = has_location ? 1.0 : 0.0;
    result.weight_relation = has_relation ? 1.0 : 0.0;
  }
  const double weight_sum = result.weight_subject + result.weight_location +
                            result.weight_relation;
  const DepthRange range = candidate_depth_range(cands);

  result.ranked.reserve(cands.size());
  for (const Candidate& cand : cands) {
    CandidateScore s;
    s.id = cand.id;
    s.subject = subject_score(cand, q);
    s.location = location_score(cand, q, dims, range);
    s.relation = has_relation
                     ? relation_score(cand, cands, q, dims, config)
                     : 0.0;
    s.overall = (result.weight_subject * s.subject +
                 result.weight_location * s.location +
                 result.weight_relation * s.relation) /
                weight_sum;
    result.ranked.push_back(s);
  }
  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const CandidateScore& a, const CandidateScore& b) {
              if (a.overall != b.overall) return a.overall > b.overall;
              return a.id < b.id;
            });
  return result;
}

std::vector<Candidate> oracle_candidates(const RenderedScene& rendered,
                                         const SceneSpec& scene,
                                         int min_pixels) {
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < rendered.objects.size(); ++i) {
    if (rendered.objects[i].pixels < min_pixels) continue;
    cands.push_back(make_candidate(rendered, scene, i));
  }
  return cands;
}

std::vector<Candidate> noisy_candidates(const RenderedScene& rendered,
                                        const SceneSpec& scene,
                                        const NoisyDetectorConfig& config,
                                        std::uint64_t seed, int min_pixels) {
  std::vector<Candidate> cands = oracle_candidates(rendered, scene,
                                                   min_pixels);
  SeededRng rng(mix64(seed ^ 0xdededec0de000000ULL));
  const ImageDims dims{rendered.frame.intrinsics.width,
                       rendered.frame.intrinsics.height};
  for (Candidate& cand : cands) {
    const double ju = config.bbox_jitter_frac * cand.bbox.w;
    const double jv = config.bbox_jitter_frac * cand.bbox.h;
    int x1 = static_cast<int>(std::lround(cand.bbox.x +
                                          rng.uniform(-ju, ju)));
    int y1 = static_cast<int>(std::lround(cand.bbox.y +
                                          rng.uniform(-jv, jv)));
    int x2 = static_cast<int>(std::lround(cand.bbox.x2() +
                                          rng.uniform(-ju, ju)));
    int y2 = static_cast<int>(std::lround(cand.bbox.y2() +
                                          rng.uniform(-jv, jv)));
    x1 = std::clamp(x1, 0, dims.width - 2);
    y1 = std::clamp(y1, 0, dims.height - 2);
    x2 = std::clamp(x2, x1 + 1, dims.width);
    y2 = std::clamp(y2, y1 + 1, dims.height);
    cand.bbox = BBox{x1, y1, x2 - x1, y2 - y1};

    if (rng.uniform() < config.category_confusion) {
      const auto& cats = kAllCategories;
      Category wrong = cats[rng.uniform_int(cats.size())];
      while (wrong == cand.category) {
        wrong = cats[rng.uniform_int(cats.size())];
      }
      cand.category = wrong;
    }
  }
  return cands;
}

}  // namespace lang6d
