#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lang6d/grounding.hpp"
#include "lang6d/query.hpp"
#include "lang6d/scene.hpp"

namespace lang6d {

struct Instruction {
  std::string text;
  std::optional<int> gt_target_id;  // set by the generator
};

/// Closed lexicon for instruction generation and parsing. The first entry of
/// every synonym list is the canonical surface form the generator emits.
struct Lexicon {
  std::map<Category, std::vector<std::string>> categories;
  std::map<ColorLabel, std::vector<std::string>> colors;
  std::map<RelationType, std::vector<std::string>> relations;
  std::map<LocationTerm, std::vector<std::string>> locations;

  struct Prefix {
    std::string pre;   // tokens before the object phrase
    std::string post;  // tokens after it ("to me" style templates)
  };
  std::vector<Prefix> prefixes;
  std::vector<std::string> articles;

  static Lexicon standard();
};

enum class DescriptionKind : uint8_t {
  kCategoryOnly,       // (a) unique category name
  kAttribute,          // (b) attribute + category
  kRelation,           // (c) relation + category
  kAttributeRelation,  // (d) attribute + relation + category
};

char to_char(DescriptionKind k);

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeneratedDescription {
  Instruction instruction;
  StructuredQuery query;  // exactly what the text encodes
};

/// Builds an instruction of the requested kind for `target_id`, guaranteed
/// unambiguous: the grounding module selects the target with a strictly
/// highest score over the oracle candidates. Throws GenerationError when no
/// such description of this kind exists.
GeneratedDescription generate_description(
    const SceneSpec& scene, const RenderedScene& rendered, int target_id,
    DescriptionKind kind, std::uint64_t seed, const Lexicon& lexicon,
    std::optional<int> forced_prefix = std::nullopt);

/// Renders a query as text using canonical surface forms.
std::string render_query_text(const StructuredQuery& q, const Lexicon& lexicon,
                              int prefix_index);

/// Pattern parser over the closed lexicon. Case and whitespace insensitive;
/// articles never affect the result; unknown adjectives are kept as
/// attribute tokens. Throws ParseError when no category token is found.
StructuredQuery parse(const std::string& text, const Lexicon& lexicon);

}  // namespace lang6d
