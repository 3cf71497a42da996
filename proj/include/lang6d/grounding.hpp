#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "lang6d/query.hpp"
#include "lang6d/scene.hpp"

namespace lang6d {

/// One detection proposal: box, mask, predicted category and the visual
/// evidence the language modules score against.
struct Candidate {
  int id = 0;
  Category category = Category::kBottle;
  BBox bbox;
  Mask mask;
  std::array<double, 4> color_histogram{};  // over the palette, sums to 1
  double mean_depth = 0.0;                  // meters over masked valid depth
};

/// Absolute box encoding: (x1/W, y1/H, x2/W, y2/H, area ratio).
using LocFeature = Eigen::Matrix<double, 5, 1>;
/// Neighbor encoding: (dx_center/W, dy_center/H, ddepth m, area ratio,
/// same-category flag), with deltas measured neighbor minus candidate.
using RelFeature = Eigen::Matrix<double, 5, 1>;

LocFeature encode_loc(const BBox& bbox, ImageDims dims);
RelFeature encode_rel(const Candidate& cand, const Candidate& neighbor,
                      ImageDims dims);

struct GroundingConfig {
  double relation_ramp_frac = 0.1;  // horizontal ramp width, fraction of W
  double depth_tau_m = 0.05;        // depth ramp width for behind / in-front
  // When set, replaces the presence-based module weights.
  struct Weights {
    double subject = 1.0;
    double location = 1.0;
    double relation = 1.0;
  };
  std::optional<Weights> weight_override;
};

struct CandidateScore {
  int id = 0;
  double overall = 0.0;
  double subject = 0.0;
  double location = 0.0;
  double relation = 0.0;
};

struct GroundingResult {
  std::vector<CandidateScore> ranked;  // descending overall, ties by id
  double weight_subject = 1.0;
  double weight_location = 0.0;
  double weight_relation = 0.0;

  int top_id() const { return ranked.front().id; }
};

/// Category gate first, then mean histogram mass of the requested attribute
/// colors. 1.0 when the query carries no attributes.
double subject_score(const Candidate& cand, Category category,
                     std::span<const std::string> attributes);
double subject_score(const Candidate& cand, const StructuredQuery& q);

/// Scene-level depth range used by the front / behind-area location ramps.
struct DepthRange {
  double near = 0.0;
  double far = 0.0;
};
DepthRange candidate_depth_range(std::span<const Candidate> cands);

double location_score(const Candidate& cand, const StructuredQuery& q,
                      ImageDims dims, DepthRange range);

/// Max over anchors of anchor-subject match times the pairwise spatial
/// compatibility ramp. Returns 0 when no other candidates exist.
double relation_score(const Candidate& cand,
                      std::span<const Candidate> all_candidates,
                      const StructuredQuery& q, ImageDims dims,
                      const GroundingConfig& config = {});

/// Weighted-sum scoring of every candidate with deterministic ranking.
/// Throws std::invalid_argument on an empty candidate list.
GroundingResult ground(std::span<const Candidate> cands,
                       const StructuredQuery& q, ImageDims dims,
                       const GroundingConfig& config = {});

/// Ground-truth detections: box, mask, category and color evidence straight
/// from the renderer. Objects with fewer than min_pixels mask pixels are
/// dropped.
std::vector<Candidate> oracle_candidates(const RenderedScene& rendered,
                                         const SceneSpec& scene,
                                         int min_pixels = 10);

struct NoisyDetectorConfig {
  double bbox_jitter_frac = 0.05;    // uniform +-frac of box size per edge
  double category_confusion = 0.05;  // probability of a wrong class label
};

/// Oracle detections degraded by bbox jitter and category confusion.
std::vector<Candidate> noisy_candidates(const RenderedScene& rendered,
                                        const SceneSpec& scene,
                                        const NoisyDetectorConfig& config,
                                        std::uint64_t seed,
                                        int min_pixels = 10);

}  // namespace lang6d
