#include "femmir/hart.hpp"

#include <algorithm>
#include <regex>

#include "femmir/errors.hpp"
#include "femmir/util.hpp"

namespace femmir {

namespace {

bool contains_word(const std::vector<std::string>& words, std::string_view w) {
  const std::string key = to_lower(w);
  return std::find(words.begin(), words.end(), key) != words.end();
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Tag classes used by the clothes scan.
bool is_noun(std::string_view tag) {
  return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS";
}
bool is_adjective(std::string_view tag) { return starts_with(tag, "JJ"); }
bool is_det_conj_prep(std::string_view tag) {
  return tag == "DT" || tag == "PDT" || tag == "WDT" || tag == "CC" || tag == "," ||
         tag == "IN" || tag == "TO";
}
bool is_verb_adverb(std::string_view tag) {
  return starts_with(tag, "VB") || starts_with(tag, "RB") || tag == "RP";
}
bool is_pronoun_or_untagged(std::string_view tag) {
  return tag.empty() || tag == "PRP" || tag == "PRP$";
}
// Leading tokens that never start a garment name.
bool drops_from_name(std::string_view tag) {
  return is_det_conj_prep(tag) || tag == "VB" || tag == "VBD" || tag == "VBG" || tag == "VBP" ||
         tag == "VBZ";
}

std::string last_word(const std::string& phrase) {
  const auto pos = phrase.find_last_of(' ');
  return pos == std::string::npos ? phrase : phrase.substr(pos + 1);
}

// Longest trailing word run of a garment name that the taxonomy knows:
// "buttoned up shirt" -> shirt, "tank top" -> tank-top.
std::optional<std::string> garment_concept(const std::string& name, const Taxonomy& t) {
  const auto words = split(name, ' ');
  for (std::size_t first = 0; first < words.size(); ++first) {
    std::string phrase;
    for (std::size_t k = first; k < words.size(); ++k) {
      if (!phrase.empty()) phrase += ' ';
      phrase += words[k];
    }
    if (auto c = t.lookup(phrase)) return c;
  }
  return std::nullopt;
}

std::vector<std::string> words_of(std::string_view sentence) {
  static const std::regex word(R"([A-Za-z]+(?:-[A-Za-z]+)*)");
  std::vector<std::string> out;
  const std::string s(sentence);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), word); it != std::sregex_iterator();
       ++it) {
    out.push_back(to_lower(it->str()));
  }
  return out;
}

std::string escape_regex(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

// Token positions of finite values, with the race context rule applied.
struct FiniteMatch {
  std::size_t index;
  HumanProperty prop;
};

std::vector<FiniteMatch> finite_matches(const std::vector<std::string>& words,
                                        const HartVocabulary& vocab) {
  std::vector<FiniteMatch> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (contains_word(vocab.gender, w)) {
      out.push_back({i, HumanProperty::kGender});
    } else if (contains_word(vocab.race, w)) {
      out.push_back({i, HumanProperty::kRace});
    } else if (contains_word(vocab.color_race, w) && i + 1 < words.size() &&
               (contains_word(vocab.gender, words[i + 1]) ||
                contains_word(vocab.race_context, words[i + 1]))) {
      out.push_back({i, HumanProperty::kRace});
    }
  }
  return out;
}

const std::regex& height_pattern() {
  static const std::regex re(
      R"((\d)\s*-?\s*(?:'|’|ft\b\.?|feet\b|foot\b)(?:\s*-?\s*(\d{1,2})\s*(?:''|"|”|in\b\.?|inches\b|inch\b)?)?)",
      std::regex::icase);
  return re;
}

}  // namespace

// ---------------------------------------------------------------------------

CandidateModel parse_candidate_model(std::string_view name) {
  const std::string key = to_lower(name);
  if (key == "re") return CandidateModel::kPattern;
  if (key == "embedding") return CandidateModel::kEmbedding;
  if (key == "taxonomy") return CandidateModel::kTaxonomy;
  if (key == "stacked-re-embedding") return CandidateModel::kStackedEmbedding;
  if (key == "stacked-re-taxonomy") return CandidateModel::kStackedTaxonomy;
  if (key == "external") return CandidateModel::kExternal;
  throw UsageError("unknown candidate model '" + std::string(name) + "'");
}

std::string_view to_string(CandidateModel model) {
  switch (model) {
    case CandidateModel::kPattern: return "re";
    case CandidateModel::kEmbedding: return "embedding";
    case CandidateModel::kTaxonomy: return "taxonomy";
    case CandidateModel::kStackedEmbedding: return "stacked-re-embedding";
    case CandidateModel::kStackedTaxonomy: return "stacked-re-taxonomy";
    case CandidateModel::kExternal: return "external";
  }
  return "re";
}

double default_threshold(CandidateModel model) {
  switch (model) {
    case CandidateModel::kEmbedding:
    case CandidateModel::kStackedEmbedding: return 0.5;
    case CandidateModel::kTaxonomy:
    case CandidateModel::kStackedTaxonomy: return 0.9;
    case CandidateModel::kExternal: return 0.85;
    case CandidateModel::kPattern: return 0.0;
  }
  return 0.0;
}

std::vector<std::string> default_key_phrases() { return {"clothes", "wear", "shirts", "pants"}; }

std::vector<std::size_t> extract_candidates_re(std::span<const std::string> sentences,
                                               std::span<const std::string> key_phrases) {
  std::vector<std::regex> patterns;
  for (const auto& q : key_phrases) {
    if (trim(q).empty()) continue;
    patterns.emplace_back(escape_regex(trim(q)) + "[^.]+", std::regex::icase);
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& p : patterns) {
      if (std::regex_search(sentences[i], p)) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

double sentence_similarity(std::string_view sentence, std::span<const std::string> key_phrases,
                           SoftScorer scorer, const CandidateResources& res) {
  if (scorer == SoftScorer::kTaxonomy && !res.taxonomy) {
    throw UsageError("taxonomy scorer needs a taxonomy");
  }
  if (scorer == SoftScorer::kEmbedding && !res.embeddings) {
    throw UsageError("embedding scorer needs word vectors");
  }
  const auto words = words_of(sentence);
  double best = 0.0;
  for (const auto& q : key_phrases) {
    if (scorer == SoftScorer::kTaxonomy) {
      for (const auto& w : words) {
        if (auto s = try_wpdist(q, w, *res.taxonomy)) best = std::max(best, *s);
      }
    } else {
      const auto qv = res.embeddings->phrase_vector(q);
      if (!qv) continue;
      for (const auto& w : words) {
        const auto wv = res.embeddings->find(w);
        if (!wv) continue;
        try {
          best = std::max(best, cosine_sim(*qv, *wv));
        } catch (const std::invalid_argument&) {
          // zero vector: no similarity
        }
      }
    }
  }
  return best;
}

std::vector<std::size_t> extract_candidates_sim(std::span<const std::string> sentences,
                                                std::span<const std::string> key_phrases,
                                                SoftScorer scorer, double theta,
                                                const CandidateResources& res) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentence_similarity(sentences[i], key_phrases, scorer, res) > theta) out.push_back(i);
  }
  return out;
}

CandidateSet extract_candidates_stacked(std::span<const std::string> sentences,
                                        const CandidateConfig& cfg,
                                        const CandidateResources& res) {
  CandidateSet out;
  out.sentences = extract_candidates_re(sentences, cfg.key_phrases);
  if (!out.sentences.empty()) {
    out.source = CandidateSource::kPattern;
    return out;
  }
  const auto scorer = cfg.model == CandidateModel::kStackedEmbedding ? SoftScorer::kEmbedding
                                                                     : SoftScorer::kTaxonomy;
  out.sentences = extract_candidates_sim(sentences, cfg.key_phrases, scorer, cfg.threshold(), res);
  out.source = out.sentences.empty() ? CandidateSource::kNone : CandidateSource::kSoft;
  return out;
}

CandidateSet extract_candidates(std::span<const std::string> sentences, const CandidateConfig& cfg,
                                const CandidateResources& res) {
  CandidateSet out;
  switch (cfg.model) {
    case CandidateModel::kPattern:
      out.sentences = extract_candidates_re(sentences, cfg.key_phrases);
      out.source = CandidateSource::kPattern;
      break;
    case CandidateModel::kEmbedding:
    case CandidateModel::kTaxonomy:
      out.sentences = extract_candidates_sim(
          sentences, cfg.key_phrases,
          cfg.model == CandidateModel::kEmbedding ? SoftScorer::kEmbedding : SoftScorer::kTaxonomy,
          cfg.threshold(), res);
      out.source = CandidateSource::kSoft;
      break;
    case CandidateModel::kStackedEmbedding:
    case CandidateModel::kStackedTaxonomy:
      return extract_candidates_stacked(sentences, cfg, res);
    case CandidateModel::kExternal: {
      if (!res.external_scores) throw UsageError("external model needs a sentence score file");
      const auto& scores = *res.external_scores;
      if (scores.size() != sentences.size()) {
        throw DataError("external scores: " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(sentences.size()) + " sentences");
      }
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > cfg.threshold()) out.sentences.push_back(i);
      }
      out.source = CandidateSource::kExternal;
      break;
    }
  }
  if (out.sentences.empty()) out.source = CandidateSource::kNone;
  return out;
}

// ---------------------------------------------------------------------------

const HartVocabulary& HartVocabulary::defaults() {
  static const HartVocabulary vocab{
      {"male", "female", "man", "woman", "boy", "girl", "non-binary", "nonbinary", "binary",
       "guy", "lady", "gentleman", "men", "women"},
      {"asian", "hispanic", "caucasian", "latino", "latina", "african-american", "african",
       "indian", "arab", "middle-eastern", "native-american"},
      {"white", "black", "brown"},
      {"person", "people", "individual", "ethnicity", "descent", "complexion", "skin"},
  };
  return vocab;
}

std::vector<std::string> re_prop_values(std::string_view sentence, HumanProperty prop,
                                        const HartVocabulary& vocab) {
  std::vector<std::string> out;
  const std::string s(sentence);
  if (prop == HumanProperty::kClothes) {
    static const std::regex wearing(R"(\bwearing\b)", std::regex::icase);
    std::smatch m;
    if (std::regex_search(s, m, wearing)) out.push_back(trim(s.substr(m.position(0))));
    return out;
  }
  if (prop == HumanProperty::kHeight) {
    for (auto it = std::sregex_iterator(s.begin(), s.end(), height_pattern());
         it != std::sregex_iterator(); ++it) {
      out.push_back(trim(it->str()));
    }
    return out;
  }
  // surface forms are kept; matching is case-insensitive
  static const std::regex word(R"([A-Za-z]+(?:-[A-Za-z]+)*)");
  std::vector<std::string> surface;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), word); it != std::sregex_iterator();
       ++it) {
    surface.push_back(it->str());
  }
  std::vector<std::string> folded;
  for (const auto& w : surface) folded.push_back(to_lower(w));
  for (const auto& m : finite_matches(folded, vocab)) {
    if (m.prop == prop) out.push_back(surface[m.index]);
  }
  return out;
}

bool match_color(std::string_view token, const Taxonomy& t) {
  const auto concept_name = t.lookup(token);
  return concept_name && t.contains("color") && t.is_a(*concept_name, "color");
}

std::vector<ClothesMention> scan_clothes(std::span<const TaggedToken> tokens, const Taxonomy& t) {
  std::vector<ClothesMention> result;
  std::vector<std::size_t> name_index;
  std::vector<std::string> descriptions;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& [word, tag] = tokens[i];
    // leading relation verbs ("had", "was wearing")
    if (i == 0 && tag == "VBD") continue;
    if (i == 1 && tag == "VBG" && tokens[0].tag == "VBD") continue;

    if (is_det_conj_prep(tag) || is_verb_adverb(tag)) {
      if (is_verb_adverb(tag) && i > 0 && is_pronoun_or_untagged(tokens[i - 1].tag)) break;
      name_index.push_back(i);
    } else if (is_adjective(tag)) {
      name_index.clear();
      descriptions.push_back(word);
    } else if (is_noun(tag)) {
      if (match_color(word, t)) {
        name_index.clear();
        descriptions.push_back(word);
        continue;
      }
      // contiguous run of name tokens ending right before this noun
      std::size_t first = i;
      for (auto it = name_index.rbegin(); it != name_index.rend() && *it + 1 == first; ++it) {
        first = *it;
      }
      while (first < i && drops_from_name(tokens[first].tag)) ++first;
      std::string name;
      for (std::size_t k = first; k <= i; ++k) {
        if (!name.empty()) name += ' ';
        name += tokens[k].text;
      }
      if (i > 0 && is_noun(tokens[i - 1].tag) && !result.empty() &&
          last_word(result.back().name) == tokens[i - 1].text) {
        result.back().name += ' ' + word;
        for (auto& d : descriptions) result.back().descriptions.push_back(std::move(d));
      } else {
        result.push_back({std::move(name), std::move(descriptions)});
      }
      name_index.clear();
      descriptions.clear();
    } else {
      break;
    }
  }
  return result;
}

std::optional<std::size_t> clothes_span_start(const TaggedSentence& s,
                                              const HartVocabulary& vocab) {
  const auto& tokens = s.tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (to_lower(tokens[i].text) == "wearing") return i;
  }
  // No "wearing": drop everything up to the last finite value, then start
  // at the first verb.
  std::vector<std::string> folded;
  for (const auto& tok : tokens) folded.push_back(to_lower(tok.text));
  std::size_t start = 0;
  for (const auto& m : finite_matches(folded, vocab)) start = std::max(start, m.index + 1);
  for (std::size_t i = start; i < tokens.size(); ++i) {
    if (starts_with(tokens[i].tag, "VB")) return i;
  }
  if (start < tokens.size()) return start;
  return std::nullopt;
}

AttributeResult posi_har(std::span<const TaggedSentence> sentences, const Taxonomy& t,
                         const HartVocabulary& vocab) {
  AttributeResult out;
  for (const auto& s : sentences) {
    std::string raw = s.raw;
    if (raw.empty()) {
      for (const auto& tok : s.tokens) raw += (raw.empty() ? "" : " ") + tok.text;
    }
    auto first = [&](HumanProperty p, std::optional<std::string>& slot) {
      if (slot) return;
      const auto values = re_prop_values(raw, p, vocab);
      if (!values.empty()) slot = values.front();
    };
    first(HumanProperty::kGender, out.gender);
    first(HumanProperty::kRace, out.race);
    first(HumanProperty::kHeight, out.height);

    const auto start = clothes_span_start(s, vocab);
    if (!start) continue;
    auto mentions =
        scan_clothes(std::span<const TaggedToken>(s.tokens).subspan(*start), t);
    for (auto& m : mentions) out.clothes.push_back(std::move(m));
  }
  return out;
}

PropertyRecord attributes_to_record(const AttributeResult& attrs, const std::string& id,
                                    const Taxonomy& t) {
  PropertyRecord r;
  r.id = id;
  r.modality = Modality::kText;
  Entity person;
  person.id = "p1";
  person.entity_type = "Person";
  person.primary = true;
  if (attrs.gender) person.attrs["gender"] = PropertyValue::scalar(to_lower(*attrs.gender));
  if (attrs.race) person.attrs["race"] = PropertyValue::scalar(to_lower(*attrs.race));
  if (attrs.height) person.attrs["height"] = PropertyValue::scalar(*attrs.height);

  auto garment_colors = [&](const ClothesMention& m) {
    std::vector<std::string> colors;
    for (const auto& d : m.descriptions) {
      if (match_color(d, t)) colors.push_back(to_lower(d));
    }
    return colors;
  };
  auto assign_color = [&](const char* prop, const char* ancestor) {
    if (!t.contains(ancestor)) return;
    for (const auto& m : attrs.clothes) {
      const auto concept_name = garment_concept(m.name, t);
      if (!concept_name || !t.is_a(*concept_name, ancestor)) continue;
      auto colors = garment_colors(m);
      if (colors.empty()) continue;
      person.attrs[prop] = colors.size() == 1 ? PropertyValue::scalar(colors.front())
                                              : PropertyValue::list(std::move(colors));
      return;
    }
  };
  assign_color("top-color", "upper-wear");
  assign_color("bottom-color", "lower-wear");
  r.entities.push_back(std::move(person));

  for (std::size_t k = 0; k < attrs.clothes.size(); ++k) {
    const auto& m = attrs.clothes[k];
    Entity c;
    c.id = "c" + std::to_string(k + 1);
    c.entity_type = "Clothes";
    c.attrs["type"] = PropertyValue::scalar(to_lower(m.name));
    std::vector<std::string> desc;
    for (const auto& d : m.descriptions) desc.push_back(to_lower(d));
    c.attrs["color"] = PropertyValue::list(std::move(desc));
    r.relations.push_back({"wearing", "p1", c.id, std::nullopt});
    r.entities.push_back(std::move(c));
  }
  return r;
}

HartOutput extract_document(std::span<const std::string> sentences,
                            std::span<const TaggedSentence> tagged, const CandidateConfig& cfg,
                            const CandidateResources& res, const std::string& id) {
  if (!tagged.empty() && tagged.size() != sentences.size()) {
    throw DataError("tagged input has " + std::to_string(tagged.size()) + " sentences, text has " +
                    std::to_string(sentences.size()));
  }
  if (!res.taxonomy) throw UsageError("attribute extraction needs a taxonomy");
  HartOutput out;
  out.candidates = extract_candidates(sentences, cfg, res);
  std::vector<TaggedSentence> chosen;
  for (std::size_t i : out.candidates.sentences) {
    if (tagged.empty()) {
      chosen.push_back(tag_sentence(sentences[i]));
    } else {
      chosen.push_back(tagged[i]);
      if (chosen.back().raw.empty()) chosen.back().raw = sentences[i];
    }
  }
  out.attributes = posi_har(chosen, *res.taxonomy);
  out.record = attributes_to_record(out.attributes, id, *res.taxonomy);
  return out;
}

}  // namespace femmir
