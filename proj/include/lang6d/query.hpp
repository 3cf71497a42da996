#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lang6d/primitives.hpp"

namespace lang6d {

enum class RelationType : uint8_t { kLeftOf, kRightOf, kBehind, kFrontOf };
enum class LocationTerm : uint8_t { kLeft, kRight, kFront, kBehindArea };

std::string to_string(RelationType r);
std::string to_string(LocationTerm t);
RelationType relation_from_string(const std::string& s);
LocationTerm location_from_string(const std::string& s);

/// Anchor of a spatial relation. Kept as a flat struct so relations cannot
/// nest beyond depth 1.
struct AnchorQuery {
  Category category = Category::kBottle;
  std::vector<std::string> attributes;
  std::vector<LocationTerm> location_terms;

  bool operator==(const AnchorQuery&) const = default;
};

struct SpatialRelation {
  RelationType type = RelationType::kLeftOf;
  AnchorQuery anchor;

  bool operator==(const SpatialRelation&) const = default;
};

/// Parsed form of an instruction: target category, attribute tokens
/// (canonical color names, plus unknown adjectives kept verbatim), absolute
/// location terms, and an optional anchored spatial relation.
struct StructuredQuery {
  Category category = Category::kBottle;
  std::vector<std::string> attributes;
  std::vector<LocationTerm> location_terms;
  std::optional<SpatialRelation> relation;

  bool operator==(const StructuredQuery&) const = default;
};

}  // namespace lang6d
