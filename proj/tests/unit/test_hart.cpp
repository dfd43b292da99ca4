#include <fstream>
#include <sstream>

#include "doctest.h"
#include "femmir/errors.hpp"
#include "femmir/hart.hpp"
#include "femmir/util.hpp"
#include "test_support.hpp"

using namespace femmir;

namespace {

struct Golden {
  std::string name;
  std::optional<std::string> gender;
  std::optional<std::string> race;
  std::vector<ClothesMention> clothes;
};

const std::vector<Golden>& goldens() {
  static const std::vector<Golden> g{
      {"e1", "male", "White", {{"shirt", {"blue"}}, {"jeans", {"black"}}}},
      {"e2", "female", "Asian", {{"buttoned up shirt", {}}, {"pants", {"gray"}}}},
      {"e5", std::nullopt, std::nullopt, {{"tank top", {"black"}}, {"jean shorts", {}}}},
      {"e9", "man", std::nullopt, {{"dockers", {"brown"}}, {"buttoned up shirt", {"red", "blue"}}}},
  };
  return g;
}

std::vector<TaggedSentence> load_tagged(const std::string& name) {
  std::ifstream in(test_data("hart/" + name + ".conll"));
  return read_conll(in, name);
}

HartOutput run_document(const std::string& name, bool use_tags) {
  const auto text = slurp(test_data("hart/" + name + ".txt"));
  const auto sentences = split_sentences(text);
  CandidateResources res;
  res.taxonomy = &bundled_taxonomy();
  std::vector<TaggedSentence> tagged;
  if (use_tags) tagged = load_tagged(name);
  return extract_document(sentences, tagged, CandidateConfig{}, res, name);
}

std::vector<TaggedToken> tags(std::initializer_list<std::pair<const char*, const char*>> list) {
  std::vector<TaggedToken> out;
  for (const auto& [w, t] : list) out.push_back({w, t});
  return out;
}

}  // namespace

TEST_CASE("golden documents with bundled tags") {
  for (const auto& g : goldens()) {
    CAPTURE(g.name);
    const auto out = run_document(g.name, true);
    CHECK_FALSE(out.candidates.empty());
    CHECK(out.attributes.gender == g.gender);
    CHECK(out.attributes.race == g.race);
    CHECK(out.attributes.clothes == g.clothes);
  }
}

TEST_CASE("golden documents with the fallback tagger") {
  for (const auto& g : goldens()) {
    CAPTURE(g.name);
    const auto out = run_document(g.name, false);
    CHECK(out.attributes.gender == g.gender);
    CHECK(out.attributes.race == g.race);
    CHECK(out.attributes.clothes == g.clothes);
  }
}

TEST_CASE("golden record layout") {
  const auto out = run_document("e1", true);
  const auto& r = out.record;
  CHECK(r.id == "e1");
  CHECK(r.modality == Modality::kText);
  const auto* p = r.find_entity("p1");
  REQUIRE(p);
  CHECK(p->entity_type == "Person");
  CHECK(p->attrs.at("gender") == PropertyValue::scalar("male"));
  CHECK(p->attrs.at("race") == PropertyValue::scalar("white"));
  CHECK(p->attrs.at("top-color") == PropertyValue::scalar("blue"));
  CHECK(p->attrs.at("bottom-color") == PropertyValue::scalar("black"));
  REQUIRE(r.entities.size() == 3);
  CHECK(r.entities[1].attrs.at("type") == PropertyValue::scalar("shirt"));
  CHECK(r.entities[2].attrs.at("color") == PropertyValue::list({"black"}));
  REQUIRE(r.relations.size() == 2);
  CHECK(r.relations[0].name == "wearing");
  CHECK(parse_record(serialize_record(r)) == r);
}

TEST_CASE("E5 is found through the taxonomy fallback") {
  const auto out = run_document("e5", true);
  CHECK(out.candidates.source == CandidateSource::kSoft);
  CHECK(run_document("e1", true).candidates.source == CandidateSource::kPattern);
}

TEST_CASE("pattern candidates") {
  const std::vector<std::string> s{"He ran fast.", "He was wearing a red hat."};
  const std::vector<std::string> wear{"wear"};
  CHECK(extract_candidates_re(s, wear) == std::vector<std::size_t>{1});
  CHECK(extract_candidates_re(std::vector<std::string>{}, wear).empty());
  const std::vector<std::string> tail{"Nothing else to wear"};
  CHECK(extract_candidates_re(tail, wear).empty());
  const std::vector<std::string> dotted{"I like to wear. Yes"};
  CHECK(extract_candidates_re(dotted, wear).empty());
  const std::vector<std::string> special{"a+b (x) c"};
  CHECK(extract_candidates_re(special, std::vector<std::string>{"a+b"}) ==
        std::vector<std::size_t>{0});
  CHECK(extract_candidates_re(s, std::vector<std::string>{"WEAR"}) == std::vector<std::size_t>{1});
}

TEST_CASE("soft candidates and thresholds") {
  const auto& t = bundled_taxonomy();
  const auto emb = EmbeddingStore::load(test_data("embeddings.txt"));
  CandidateResources res;
  res.taxonomy = &t;
  res.embeddings = &emb;
  const std::vector<std::string> doc{"Her garments were torn.", "The weather was cold.",
                                     "A bag was left."};
  const std::vector<std::string> clothes{"clothes"};

  CHECK(default_threshold(CandidateModel::kEmbedding) == 0.5);
  CHECK(default_threshold(CandidateModel::kTaxonomy) == 0.9);
  CHECK(default_threshold(CandidateModel::kStackedTaxonomy) == 0.9);
  CHECK(default_threshold(CandidateModel::kStackedEmbedding) == 0.5);
  CHECK(default_threshold(CandidateModel::kExternal) == 0.85);

  CHECK(extract_candidates_sim(doc, clothes, SoftScorer::kTaxonomy, 0.9, res) ==
        std::vector<std::size_t>{0});
  CHECK(extract_candidates_sim(doc, clothes, SoftScorer::kEmbedding, 0.5, res) ==
        std::vector<std::size_t>{0});
  const std::vector<std::string> literal{"Torn clothes lay nearby."};
  CHECK(sentence_similarity(literal[0], clothes, SoftScorer::kTaxonomy, res) == 1.0);

  // raising the threshold never adds sentences
  for (auto scorer : {SoftScorer::kTaxonomy, SoftScorer::kEmbedding}) {
    std::size_t previous = doc.size() + 1;
    for (double theta = 0.0; theta <= 1.0; theta += 0.05) {
      const auto got = extract_candidates_sim(doc, clothes, scorer, theta, res);
      CHECK(got.size() <= previous);
      previous = got.size();
    }
  }

  const std::vector<double> scores{0.9, 0.2, 0.86};
  res.external_scores = &scores;
  CandidateConfig ext;
  ext.model = CandidateModel::kExternal;
  const auto external = extract_candidates(doc, ext, res);
  CHECK(external.sentences == std::vector<std::size_t>{0, 2});
  CHECK(external.source == CandidateSource::kExternal);
  const std::vector<double> short_scores{0.9};
  res.external_scores = &short_scores;
  CHECK_THROWS_AS(extract_candidates(doc, ext, res), DataError);
}

TEST_CASE("stacked candidates") {
  const auto& t = bundled_taxonomy();
  CandidateResources res;
  res.taxonomy = &t;
  CandidateConfig cfg;
  cfg.key_phrases = {"clothes", "wear"};
  const std::vector<std::string> hit{"He was wearing a hat.", "His garments were torn."};
  const auto a = extract_candidates_stacked(hit, cfg, res);
  CHECK(a.source == CandidateSource::kPattern);
  CHECK(a.sentences == extract_candidates_re(hit, cfg.key_phrases));

  const std::vector<std::string> soft{"The day was long.", "His garments were torn."};
  const auto b = extract_candidates_stacked(soft, cfg, res);
  CHECK(b.source == CandidateSource::kSoft);
  CHECK(b.sentences == std::vector<std::size_t>{1});

  const std::vector<std::string> none{"The day was long.", "Nobody saw anything."};
  const auto c = extract_candidates_stacked(none, cfg, res);
  CHECK(c.empty());
  CHECK(c.source == CandidateSource::kNone);

  CHECK(parse_candidate_model("stacked-re-taxonomy") == CandidateModel::kStackedTaxonomy);
  CHECK(to_string(CandidateModel::kEmbedding) == "embedding");
  CHECK_THROWS_AS(parse_candidate_model("nli"), UsageError);
}

TEST_CASE("finite-value patterns") {
  const std::string e1 =
      "Person was a White male with medium build, wearing blue shirt and black jeans.";
  CHECK(re_prop_values(e1, HumanProperty::kGender) == std::vector<std::string>{"male"});
  CHECK(re_prop_values(e1, HumanProperty::kRace) == std::vector<std::string>{"White"});
  CHECK(re_prop_values(e1, HumanProperty::kClothes) ==
        std::vector<std::string>{"wearing blue shirt and black jeans."});
  CHECK(re_prop_values("She had a black tank top with jean shorts.", HumanProperty::kClothes)
            .empty());
  CHECK(re_prop_values("He wore a white shirt.", HumanProperty::kRace).empty());
  CHECK(re_prop_values("A black male ran.", HumanProperty::kRace) ==
        std::vector<std::string>{"black"});
  CHECK(re_prop_values("He is 5'10\" tall.", HumanProperty::kHeight).size() == 1);
  CHECK(re_prop_values("about 6 feet 2 inches", HumanProperty::kHeight).size() == 1);
}

TEST_CASE("color matching") {
  const auto& t = bundled_taxonomy();
  CHECK(match_color("grey", t));
  CHECK(match_color("Navy", t));
  CHECK(match_color("color", t));
  CHECK_FALSE(match_color("jean", t));
  CHECK_FALSE(match_color("zzz", t));
}

TEST_CASE("clothes scan hand cases") {
  const auto& t = bundled_taxonomy();
  const auto e5 = tags({{"black", "JJ"},
                        {"tank", "NN"},
                        {"top", "NN"},
                        {"with", "IN"},
                        {"jean", "NN"},
                        {"shorts", "NNS"}});
  CHECK(scan_clothes(e5, t) ==
        std::vector<ClothesMention>{{"tank top", {"black"}}, {"jean shorts", {}}});
  const auto e9 = tags({{"red", "JJ"},
                        {"and", "CC"},
                        {"blue", "JJ"},
                        {"buttoned", "VBN"},
                        {"up", "RP"},
                        {"shirt", "NN"}});
  CHECK(scan_clothes(e9, t) ==
        std::vector<ClothesMention>{{"buttoned up shirt", {"red", "blue"}}});
  // a pronoun followed by a verb ends the scan
  const auto stop = tags({{"hat", "NN"}, {"and", "CC"}, {"he", "PRP"}, {"ran", "VBD"},
                          {"shoes", "NNS"}});
  CHECK(scan_clothes(stop, t) == std::vector<ClothesMention>{{"hat", {}}});
}

TEST_CASE("clothes names come from the sentence, in order, on any tag sequence") {
  const auto& t = bundled_taxonomy();
  const std::vector<std::string> tagset{"NN", "NNS", "NNP", "JJ", "DT", "CC", "IN", ",",
                                        "VB", "VBD", "VBG", "VBN", "RB", "RP", "PRP", "CD",
                                        "",   "."};
  const std::vector<std::string> words{"red", "shirt", "up", "and", "a", "jeans", "he",
                                       "blue", "tank", "top", "with", "buttoned"};
  Rng rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<TaggedToken> tokens;
    for (std::size_t i = 1 + rng.index(10); i > 0; --i) {
      tokens.push_back({words[rng.index(words.size())], tagset[rng.index(tagset.size())]});
    }
    for (const auto& m : scan_clothes(tokens, t)) {
      const auto parts = split(m.name, ' ');
      REQUIRE_FALSE(parts.empty());
      std::size_t pos = 0;
      for (const auto& p : parts) {
        while (pos < tokens.size() && tokens[pos].text != p) ++pos;
        CHECK(pos < tokens.size());
        ++pos;
      }
    }
  }
}

TEST_CASE("sentence splitting and tagging") {
  const auto s = split_sentences(
      "The man was seen in Vernon St. and left. Mr. J. Smith called! Then nothing");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "The man was seen in Vernon St. and left.");
  CHECK(s[1] == "Mr. J. Smith called!");
  CHECK(s[2] == "Then nothing");
  CHECK(tokenize("a red, blue shirt.") ==
        std::vector<std::string>{"a", "red", ",", "blue", "shirt", "."});
  const auto tagged = tag_sentence("She was wearing blue jeans.");
  REQUIRE(tagged.tokens.size() == 6);
  CHECK(tagged.tokens[0].tag == "PRP");
  CHECK(tagged.tokens[2].tag == "VBG");
  CHECK(tagged.tokens[3].tag == "JJ");
  CHECK(tagged.tokens[4].tag == "NNS");
}

TEST_CASE("tagged input parsing") {
  std::istringstream ok("# text = A b.\nA\tDT\nb\tNN\n.\t.\n\nc\n");
  const auto s = read_conll(ok);
  REQUIRE(s.size() == 2);
  CHECK(s[0].raw == "A b.");
  CHECK(s[0].tokens.size() == 3);
  CHECK(s[1].tokens[0].tag.empty());
  std::istringstream bad("a\tb\tc\n");
  CHECK_THROWS_AS(read_conll(bad), DataError);
  std::istringstream scores("0.5\n0.25\n");
  CHECK(read_sentence_scores(scores) == std::vector<double>{0.5, 0.25});
  std::istringstream bad_scores("0.5\nx\n");
  CHECK_THROWS_AS(read_sentence_scores(bad_scores), DataError);
}

TEST_CASE("document-level checks") {
  CandidateResources res;
  const std::vector<std::string> one{"He was wearing a hat."};
  CHECK_THROWS(extract_document(one, {}, CandidateConfig{}, res, "d"));
  res.taxonomy = &bundled_taxonomy();
  const auto tagged = load_tagged("e1");
  const std::vector<std::string> two{"He was wearing a hat.", "Another one."};
  CHECK_THROWS_AS(extract_document(two, tagged, CandidateConfig{}, res, "d"), DataError);
  const std::vector<std::string> nothing{"Nobody saw anything."};
  const auto out = extract_document(nothing, {}, CandidateConfig{}, res, "d");
  CHECK(out.candidates.empty());
  CHECK(out.attributes.empty());
}
