#include "lang6d/instruct.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "lang6d/rng.hpp"

namespace lang6d {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

using TokenSpan = std::span<const std::string>;

bool match_at(TokenSpan tokens, std::size_t pos,
              const std::vector<std::string>& phrase) {
  if (phrase.empty() || pos + phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i < phrase.size(); ++i) {
    if (tokens[pos + i] != phrase[i]) return false;
  }
  return true;
}

struct PhraseTable {
  // Tokenized phrases sorted longest-first so greedy matching prefers the
  // most specific surface form.
  struct Entry {
    std::vector<std::string> tokens;
    int tag;
  };
  std::vector<Entry> entries;

  template <typename Enum>
  void add(Enum tag, const std::vector<std::string>& phrases) {
    for (const std::string& p : phrases) {
      entries.push_back({tokenize(p), static_cast<int>(tag)});
    }
  }
  void sort() {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) {
                       return a.tokens.size() > b.tokens.size();
                     });
  }
  // Longest phrase matching at pos; returns (tag, length) or nullopt.
  std::optional<std::pair<int, std::size_t>> match(TokenSpan tokens,
                                                   std::size_t pos) const {
    for (const Entry& e : entries) {
      if (match_at(tokens, pos, e.tokens)) return {{e.tag, e.tokens.size()}};
    }
    return std::nullopt;
  }
};

struct CompiledLexicon {
  const Lexicon& lex;
  std::map<std::string, Category> category_of;
  std::map<std::string, ColorLabel> color_of;
  PhraseTable relations;
  PhraseTable locations;

  explicit CompiledLexicon(const Lexicon& lexicon) : lex(lexicon) {
    for (const auto& [cat, syns] : lexicon.categories) {
      for (const std::string& s : syns) category_of[s] = cat;
    }
    for (const auto& [color, syns] : lexicon.colors) {
      for (const std::string& s : syns) color_of[s] = color;
    }
    for (const auto& [rel, phrases] : lexicon.relations) {
      relations.add(rel, phrases);
    }
    relations.sort();
    for (const auto& [loc, phrases] : lexicon.locations) {
      locations.add(loc, phrases);
    }
    locations.sort();
  }

  bool is_article(const std::string& token) const {
    return std::find(lex.articles.begin(), lex.articles.end(), token) !=
           lex.articles.end();
  }
};

// Noun phrase: articles dropped, colors canonicalized, unknown adjectives
// kept verbatim, the last category token is the head noun.
struct NounPhrase {
  std::optional<Category> category;
  std::vector<std::string> attributes;
};

NounPhrase parse_noun_phrase(TokenSpan tokens, const CompiledLexicon& cl) {
  NounPhrase np;
  std::ptrdiff_t head = -1;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (cl.category_of.contains(tokens[i])) head = static_cast<std::ptrdiff_t>(i);
  }
  if (head < 0) return np;
  np.category = cl.category_of.at(tokens[head]);
  for (std::ptrdiff_t i = 0; i < head; ++i) {
    const std::string& tok = tokens[i];
    if (cl.is_article(tok)) continue;
    if (auto it = cl.color_of.find(tok); it != cl.color_of.end()) {
      np.attributes.push_back(to_string(it->second));
    } else {
      np.attributes.push_back(tok);
    }
  }
  return np;
}

// Trailing location phrases ("... on the left"), possibly several.
std::vector<LocationTerm> parse_location_suffix(TokenSpan tokens,
                                                const CompiledLexicon& cl,
                                                std::size_t pos) {
  std::vector<LocationTerm> terms;
  while (pos < tokens.size()) {
    if (cl.is_article(tokens[pos])) {
      ++pos;
      continue;
    }
    auto m = cl.locations.match(tokens, pos);
    if (!m) break;
    terms.push_back(static_cast<LocationTerm>(m->first));
    pos += m->second;
  }
  return terms;
}

}  // namespace

char to_char(DescriptionKind k) {
  switch (k) {
    case DescriptionKind::kCategoryOnly: return 'a';
    case DescriptionKind::kAttribute: return 'b';
    case DescriptionKind::kRelation: return 'c';
    case DescriptionKind::kAttributeRelation: return 'd';
  }
  return '?';
}

std::string to_string(RelationType r) {
  switch (r) {
    case RelationType::kLeftOf: return "left-of";
    case RelationType::kRightOf: return "right-of";
    case RelationType::kBehind: return "behind";
    case RelationType::kFrontOf: return "front-of";
  }
  return "unknown";
}

std::string to_string(LocationTerm t) {
  switch (t) {
    case LocationTerm::kLeft: return "left";
    case LocationTerm::kRight: return "right";
    case LocationTerm::kFront: return "front";
    case LocationTerm::kBehindArea: return "behind-area";
  }
  return "unknown";
}

RelationType relation_from_string(const std::string& s) {
  for (RelationType r : {RelationType::kLeftOf, RelationType::kRightOf,
                         RelationType::kBehind, RelationType::kFrontOf}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown relation: " + s);
}

LocationTerm location_from_string(const std::string& s) {
  for (LocationTerm t : {LocationTerm::kLeft, LocationTerm::kRight,
                         LocationTerm::kFront, LocationTerm::kBehindArea}) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument("unknown location term: " + s);
}

Lexicon Lexicon::standard() {
  Lexicon lex;
  lex.categories[Category::kBottle] = {"bottle", "flask"};
  lex.categories[Category::kBowl] = {"bowl", "dish"};
  lex.categories[Category::kCan] = {"can", "tin"};
  lex.categories[Category::kMug] = {"mug", "cup"};
  lex.categories[Category::kLaptop] = {"laptop", "notebook"};
  lex.categories[Category::kCamera] = {"camera"};
  lex.colors[ColorLabel::kRed] = {"red"};
  lex.colors[ColorLabel::kGreen] = {"green"};
  lex.colors[ColorLabel::kBlue] = {"blue"};
  lex.colors[ColorLabel::kYellow] = {"yellow"};
  lex.relations[RelationType::kLeftOf] = {"on the left of", "to the left of",
                                          "left of"};
  lex.relations[RelationType::kRightOf] = {"on the right of",
                                           "to the right of", "right of"};
  lex.relations[RelationType::kBehind] = {"behind", "at the back of"};
  lex.relations[RelationType::kFrontOf] = {"in front of"};
  lex.locations[LocationTerm::kLeft] = {"on the left", "at the left"};
  lex.locations[LocationTerm::kRight] = {"on the right", "at the right"};
  lex.locations[LocationTerm::kFront] = {"at the front", "in the front"};
  lex.locations[LocationTerm::kBehindArea] = {"at the back", "in the back"};
  lex.prefixes = {{"please give me a", ""}, {"hand", "to me"}, {"grasp", ""},
                  {"pick", "to me"},        {"pass me", ""},   {"give me", ""}};
  lex.articles = {"a", "an", "the"};
  return lex;
}

StructuredQuery parse(const std::string& text, const Lexicon& lexicon) {
  const CompiledLexicon cl(lexicon);
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) throw ParseError("parse: empty instruction");

  // Strip the longest matching prefix template (leading + trailing part).
  struct PrefixMatch {
    std::size_t pre_len = 0;
    std::size_t post_len = 0;
    std::size_t total = 0;
  };
  std::optional<PrefixMatch> best;
  for (const Lexicon::Prefix& prefix : lexicon.prefixes) {
    const auto pre = tokenize(prefix.pre);
    const auto post = tokenize(prefix.post);
    if (pre.size() + post.size() >= tokens.size()) continue;
    if (!match_at(tokens, 0, pre)) continue;
    if (!post.empty() &&
        !match_at(tokens, tokens.size() - post.size(), post)) {
      continue;
    }
    PrefixMatch m{pre.size(), post.size(), pre.size() + post.size()};
    if (!best || m.total > best->total) best = m;
  }
  if (best) {
    tokens.erase(tokens.end() - static_cast<std::ptrdiff_t>(best->post_len),
                 tokens.end());
    tokens.erase(tokens.begin(),
                 tokens.begin() + static_cast<std::ptrdiff_t>(best->pre_len));
  }

  const TokenSpan all(tokens);
  // Locate the relation boundary: the earliest relation phrase that leaves
  // at least one category token on its left.
  std::optional<std::size_t> first_cat;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (cl.category_of.contains(tokens[i])) {
      first_cat = i;
      break;
    }
  }
  if (!first_cat) {
    throw ParseError("parse: no category token in \"" + text + "\"");
  }

  std::optional<std::pair<std::size_t, std::pair<int, std::size_t>>> boundary;
  for (std::size_t i = *first_cat + 1; i < tokens.size(); ++i) {
    if (auto m = cl.relations.match(all, i)) {
      boundary = {{i, *m}};
      break;
    }
  }

  StructuredQuery query;
  if (boundary) {
    const auto [pos, match] = *boundary;
    const NounPhrase subject = parse_noun_phrase(all.subspan(0, pos), cl);
    const TokenSpan anchor_tokens = all.subspan(pos + match.second);
    const NounPhrase anchor = parse_noun_phrase(anchor_tokens, cl);
    if (!subject.category) {
      throw ParseError("parse: no category token before relation");
    }
    query.category = *subject.category;
    query.attributes = subject.attributes;
    if (anchor.category) {
      SpatialRelation rel;
      rel.type = static_cast<RelationType>(match.first);
      rel.anchor.category = *anchor.category;
      rel.anchor.attributes = anchor.attributes;
      query.relation = rel;
    }
    // An anchor without a category is out of grammar; the relation is
    // dropped and the subject parse stands.
    return query;
  }

  // No relation: optional trailing location phrases after the head noun.
  std::size_t head = *first_cat;
  for (std::size_t i = head + 1; i < tokens.size(); ++i) {
    if (cl.locations.match(all, i)) break;  // location suffix starts
    if (cl.category_of.contains(tokens[i])) head = i;
  }
  const NounPhrase subject = parse_noun_phrase(all.subspan(0, head + 1), cl);
  query.category = *subject.category;
  query.attributes = subject.attributes;
  query.location_terms = parse_location_suffix(all, cl, head + 1);
  return query;
}

std::string render_query_text(const StructuredQuery& q, const Lexicon& lexicon,
                              int prefix_index) {
  const Lexicon::Prefix& prefix =
      lexicon.prefixes[static_cast<std::size_t>(prefix_index) %
                       lexicon.prefixes.size()];
  auto canonical = [](const std::vector<std::string>& syns) {
    return syns.front();
  };
  std::ostringstream phrase;
  // "please give me a" already carries the article.
  const auto pre_tokens = tokenize(prefix.pre);
  const bool prefix_has_article =
      !pre_tokens.empty() && (pre_tokens.back() == "a" ||
                              pre_tokens.back() == "an" ||
                              pre_tokens.back() == "the");
  if (!prefix_has_article) phrase << "the ";
  for (const std::string& attr : q.attributes) phrase << attr << ' ';
  phrase << canonical(lexicon.categories.at(q.category));
  if (q.relation) {
    phrase << ' ' << canonical(lexicon.relations.at(q.relation->type))
           << " the ";
    for (const std::string& attr : q.relation->anchor.attributes) {
      phrase << attr << ' ';
    }
    phrase << canonical(lexicon.categories.at(q.relation->anchor.category));
  }
  for (LocationTerm term : q.location_terms) {
    phrase << ' ' << canonical(lexicon.locations.at(term));
  }

  std::string text = prefix.pre.empty() ? phrase.str()
                                        : prefix.pre + " " + phrase.str();
  if (!prefix.post.empty()) text += " " + prefix.post;
  text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text;
}

namespace {

bool is_unambiguous(std::span<const Candidate> cands, const StructuredQuery& q,
                    int target_id, ImageDims dims) {
  const GroundingResult res = ground(cands, q, dims);
  if (res.ranked.front().id != target_id) return false;
  return res.ranked.size() == 1 ||
         res.ranked[0].overall > res.ranked[1].overall + 1e-9;
}

}  // namespace

GeneratedDescription generate_description(const SceneSpec& scene,
                                          const RenderedScene& rendered,
                                          int target_id, DescriptionKind kind,
                                          std::uint64_t seed,
                                          const Lexicon& lexicon,
                                          std::optional<int> forced_prefix) {
  const std::vector<Candidate> cands = oracle_candidates(rendered, scene);
  const ImageDims dims{scene.intrinsics.width, scene.intrinsics.height};
  const Candidate* target = nullptr;
  for (const Candidate& c : cands) {
    if (c.id == target_id) target = &c;
  }
  if (target == nullptr) {
    throw GenerationError("generate_description: target " +
                          std::to_string(target_id) + " is not visible");
  }

  SeededRng rng(mix64(seed ^ 0x1a5616e5u));
  const int prefix_index =
      forced_prefix.value_or(static_cast<int>(
          rng.uniform_int(lexicon.prefixes.size())));
  const ColorLabel target_color = scene.objects[target_id].color;

  StructuredQuery query;
  query.category = target->category;
  const bool with_attribute = kind == DescriptionKind::kAttribute ||
                              kind == DescriptionKind::kAttributeRelation;
  if (with_attribute) query.attributes = {to_string(target_color)};

  const bool with_relation = kind == DescriptionKind::kRelation ||
                             kind == DescriptionKind::kAttributeRelation;
  if (with_relation) {
    // Enumerate (relation, anchor, anchor wording) options in seeded random
    // order and keep the first unambiguous one.
    struct Option {
      RelationType type;
      int anchor_index;
      bool attributed_anchor;
    };
    std::vector<Option> options;
    for (RelationType type :
         {RelationType::kLeftOf, RelationType::kRightOf, RelationType::kBehind,
          RelationType::kFrontOf}) {
      for (std::size_t j = 0; j < cands.size(); ++j) {
        if (cands[j].id == target_id) continue;
        options.push_back({type, static_cast<int>(j), false});
        options.push_back({type, static_cast<int>(j), true});
      }
    }
    for (std::size_t i = options.size(); i > 1; --i) {  // Fisher-Yates
      std::swap(options[i - 1], options[rng.uniform_int(i)]);
    }
    bool found = false;
    for (const Option& opt : options) {
      const Candidate& anchor = cands[opt.anchor_index];
      SpatialRelation rel;
      rel.type = opt.type;
      rel.anchor.category = anchor.category;
      if (opt.attributed_anchor) {
        rel.anchor.attributes = {
            to_string(scene.objects[anchor.id].color)};
      }
      query.relation = rel;
      if (is_unambiguous(cands, query, target_id, dims)) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw GenerationError(
          std::string("generate_description: no unambiguous kind-") +
          to_char(kind) + " description for target " +
          std::to_string(target_id));
    }
  } else if (!is_unambiguous(cands, query, target_id, dims)) {
    throw GenerationError(
        std::string("generate_description: kind-") + to_char(kind) +
        " description of target " + std::to_string(target_id) +
        " is ambiguous");
  }

  GeneratedDescription out;
  out.query = query;
  out.instruction.text = render_query_text(query, lexicon, prefix_index);
  out.instruction.gt_target_id = target_id;
  return out;
}

}  // namespace lang6d
