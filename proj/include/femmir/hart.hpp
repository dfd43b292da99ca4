#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "femmir/lexicon.hpp"
#include "femmir/property_model.hpp"

namespace femmir {

struct TaggedToken {
  std::string text;
  std::string tag;  // Penn tag; empty when untagged

  bool operator==(const TaggedToken&) const = default;
};

struct TaggedSentence {
  std::vector<TaggedToken> tokens;
  std::string raw;
};

struct ClothesMention {
  std::string name;
  std::vector<std::string> descriptions;

  bool operator==(const ClothesMention&) const = default;
};

struct AttributeResult {
  std::optional<std::string> gender;
  std::optional<std::string> race;
  std::optional<std::string> height;
  std::vector<ClothesMention> clothes;

  bool empty() const { return !gender && !race && !height && clothes.empty(); }
};

// ---------------------------------------------------------------------------
// Candidate sentences

enum class CandidateModel {
  kPattern,
  kEmbedding,
  kTaxonomy,
  kStackedEmbedding,
  kStackedTaxonomy,
  kExternal
};

/// Accepts re, embedding, taxonomy, stacked-re-embedding, stacked-re-taxonomy,
/// external. Throws UsageError otherwise.
CandidateModel parse_candidate_model(std::string_view name);
std::string_view to_string(CandidateModel model);
/// Threshold used when none is configured: 0.5 for word vectors, 0.9 for
/// the taxonomy, 0.85 for external sentence scores, 0 for the pattern model.
double default_threshold(CandidateModel model);

std::vector<std::string> default_key_phrases();

struct CandidateConfig {
  std::vector<std::string> key_phrases = default_key_phrases();
  CandidateModel model = CandidateModel::kStackedTaxonomy;
  std::optional<double> theta;

  double threshold() const { return theta ? *theta : default_threshold(model); }
};

/// Soft-scoring resources; any may be null when the model does not need it.
struct CandidateResources {
  const Taxonomy* taxonomy = nullptr;
  const EmbeddingStore* embeddings = nullptr;
  /// Externally computed score per sentence, in sentence order.
  const std::vector<double>* external_scores = nullptr;
};

enum class CandidateSource { kNone, kPattern, kSoft, kExternal };

struct CandidateSet {
  std::vector<std::size_t> sentences;  // ascending indices
  CandidateSource source = CandidateSource::kNone;

  bool empty() const { return sentences.empty(); }
};

/// Sentences containing a key-phrase followed by at least one character
/// other than a period (case-insensitive).
std::vector<std::size_t> extract_candidates_re(std::span<const std::string> sentences,
                                               std::span<const std::string> key_phrases);

enum class SoftScorer { kEmbedding, kTaxonomy };

/// Max over key-phrases and sentence tokens of the token similarity. Tokens
/// without a vector or concept score 0.
double sentence_similarity(std::string_view sentence, std::span<const std::string> key_phrases,
                           SoftScorer scorer, const CandidateResources& res);

/// Sentences whose similarity exceeds theta.
std::vector<std::size_t> extract_candidates_sim(std::span<const std::string> sentences,
                                                std::span<const std::string> key_phrases,
                                                SoftScorer scorer, double theta,
                                                const CandidateResources& res);

/// Pattern model first; the soft model only runs when the pattern model
/// finds nothing.
CandidateSet extract_candidates_stacked(std::span<const std::string> sentences,
                                        const CandidateConfig& cfg, const CandidateResources& res);

/// Dispatches on cfg.model. Throws UsageError when a needed resource is
/// missing and DataError when external scores do not match the sentences.
CandidateSet extract_candidates(std::span<const std::string> sentences, const CandidateConfig& cfg,
                                const CandidateResources& res);

// ---------------------------------------------------------------------------
// Attribute search

enum class HumanProperty { kGender, kRace, kHeight, kClothes };

/// Config-extensible value vocabularies for the finite-valued properties.
struct HartVocabulary {
  std::vector<std::string> gender;
  /// Race words that are never colors.
  std::vector<std::string> race;
  /// Race words that double as colors; they only count when followed by a
  /// word from `race_context` or from `gender`.
  std::vector<std::string> color_race;
  std::vector<std::string> race_context;

  static const HartVocabulary& defaults();
};

/// Finite-valued properties: every matched value in sentence order (surface
/// form). kClothes: the partial sentence from "wearing" onward, or nothing.
std::vector<std::string> re_prop_values(std::string_view sentence, HumanProperty prop,
                                        const HartVocabulary& vocab = HartVocabulary::defaults());

/// True when the token names a color concept (or "color" itself).
bool match_color(std::string_view token, const Taxonomy& t);

/// The name/description scan over one clothes span.
std::vector<ClothesMention> scan_clothes(std::span<const TaggedToken> tokens, const Taxonomy& t);

/// Token index where the clothes scan of a candidate sentence starts, or
/// nullopt when nothing is left to scan.
std::optional<std::size_t> clothes_span_start(const TaggedSentence& s,
                                              const HartVocabulary& vocab);

/// Finite-valued properties (first match wins) and the clothes scan over
/// every candidate sentence.
AttributeResult posi_har(std::span<const TaggedSentence> sentences, const Taxonomy& t,
                         const HartVocabulary& vocab = HartVocabulary::defaults());

/// One Person entity (gender, race, height, top-color, bottom-color) plus a
/// Clothes entity per mention, linked by `wearing`.
PropertyRecord attributes_to_record(const AttributeResult& attrs, const std::string& id,
                                    const Taxonomy& t);

// ---------------------------------------------------------------------------
// Text handling

/// Sentence boundaries at . ! ? followed by blank space, except after
/// common abbreviations such as "St." or "Mr.".
std::vector<std::string> split_sentences(std::string_view text);
std::vector<std::string> tokenize(std::string_view sentence);
/// Closed-class lexicon plus suffix rules; the default tag is NN.
TaggedSentence tag_sentence(std::string_view sentence);
/// `token<TAB>tag` lines, blank line between sentences.
std::vector<TaggedSentence> read_conll(std::istream& in, std::string_view source = "<stream>");
/// One score per non-comment line.
std::vector<double> read_sentence_scores(std::istream& in, std::string_view source = "<stream>");

struct HartOutput {
  CandidateSet candidates;
  AttributeResult attributes;
  PropertyRecord record;
};

/// Full extraction over one document. `tagged` may be empty, in which case
/// the sentences are tagged by tag_sentence; otherwise it must have one
/// entry per sentence.
HartOutput extract_document(std::span<const std::string> sentences,
                            std::span<const TaggedSentence> tagged, const CandidateConfig& cfg,
                            const CandidateResources& res, const std::string& id);

}  // namespace femmir
