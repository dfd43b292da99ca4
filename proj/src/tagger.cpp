// Sentence splitting, tokenization, the fallback tagger, and the tagged /
// scored input readers used by the attribute extractor.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "femmir/errors.hpp"
#include "femmir/hart.hpp"
#include "femmir/util.hpp"

namespace femmir {

namespace {

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> words{
      "st", "mr", "mrs", "ms", "dr", "jr", "sr", "ave", "rd", "blvd", "no", "vs", "etc",
      "lt", "sgt", "mt", "ft", "approx", "apt", "co", "inc", "e.g", "i.e"};
  return words;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

// Word immediately before position `end` (exclusive), lower-cased.
std::string word_before(std::string_view text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && (is_word_char(text[begin - 1]) || text[begin - 1] == '.')) --begin;
  return to_lower(text.substr(begin, end - begin));
}

const std::unordered_map<std::string, std::string>& closed_class() {
  static const std::unordered_map<std::string, std::string> tags = [] {
    std::unordered_map<std::string, std::string> m;
    auto add = [&](std::initializer_list<const char*> words, const char* tag) {
      for (const char* w : words) m.emplace(w, tag);
    };
    add({"a", "an", "the", "this", "that", "these", "those", "some", "any", "each", "every",
         "no", "another"},
        "DT");
    add({"all", "both", "half"}, "PDT");
    add({"and", "or", "but", "nor"}, "CC");
    add({"with", "in", "on", "at", "of", "from", "by", "for", "under", "over", "near", "into",
         "onto", "across", "through", "about", "around", "behind", "beside", "between", "during",
         "without", "like", "as", "after", "before", "until", "inside", "outside", "while"},
        "IN");
    add({"to"}, "TO");
    add({"i", "you", "he", "she", "it", "we", "they", "him", "her", "them", "me", "us",
         "himself", "herself", "themselves"},
        "PRP");
    add({"his", "their", "its", "my", "your", "our"}, "PRP$");
    add({"was", "were", "had", "did", "wore", "saw", "said", "went", "ran", "got", "left",
         "came", "carried", "seemed", "appeared"},
        "VBD");
    add({"is", "has", "does", "wears", "seems"}, "VBZ");
    add({"are", "am", "have", "do", "wear"}, "VBP");
    add({"be"}, "VB");
    add({"been", "seen", "worn", "described", "dressed", "last-seen", "written", "reported"},
        "VBN");
    add({"not", "very", "also", "last", "then", "still", "just", "never", "recently",
         "slightly", "fast", "possibly", "probably", "approximately"},
        "RB");
    add({"up", "down", "out", "off"}, "RP");
    add({"will", "would", "can", "could", "should", "may", "might", "must"}, "MD");
    add({"who", "what"}, "WP");
    add({"which"}, "WDT");
    // colors and common descriptive adjectives
    add({"red", "blue", "green", "yellow", "black", "white", "grey", "gray", "brown", "pink",
         "purple", "orange", "navy", "tan", "beige", "maroon", "teal", "olive", "khaki",
         "burgundy", "golden", "silver", "violet", "cream", "dark", "light", "medium", "tall",
         "long", "large", "small", "big", "old", "young", "thin", "heavy", "slim", "missing",
         "striped", "plaid", "asian", "hispanic", "caucasian", "latino", "latina"},
        "JJ");
    return m;
  }();
  return tags;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string guess_tag(const std::string& token, bool sentence_initial) {
  const unsigned char first = static_cast<unsigned char>(token.front());
  if (!std::isalnum(first) && first < 0x80) {
    if (token == "." || token == "!" || token == "?") return ".";
    if (token == "," || token == ":" || token == ";") return token;
    if (token == "\"" || token == "'") return "``";
    return "SYM";
  }
  if (first >= 0x80) return "SYM";
  const std::string lower = to_lower(token);
  if (auto it = closed_class().find(lower); it != closed_class().end()) return it->second;
  if (all_digits(lower)) return "CD";
  if (lower.back() == '.') return "NNP";  // abbreviation such as "St."
  if (!sentence_initial && std::isupper(first)) return "NNP";
  if (ends_with(lower, "ing")) return "VBG";
  if (ends_with(lower, "ed")) return "VBD";
  if (ends_with(lower, "ly")) return "RB";
  if (ends_with(lower, "ous") || ends_with(lower, "ful") || ends_with(lower, "ive") ||
      ends_with(lower, "able")) {
    return "JJ";
  }
  if (ends_with(lower, "s") && !ends_with(lower, "ss") && !ends_with(lower, "us")) return "NNS";
  return "NN";
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_end = i + 1 == text.size();
    if (!at_end && !std::isspace(static_cast<unsigned char>(text[i + 1]))) continue;
    if (c == '.') {
      const std::string prev = word_before(text, i);
      if (abbreviations().count(prev)) continue;
      // single-letter initial such as "J."
      if (prev.size() == 1 && std::isalpha(static_cast<unsigned char>(prev[0]))) continue;
    }
    const std::string s = trim(text.substr(begin, i + 1 - begin));
    if (!s.empty()) out.push_back(s);
    begin = i + 1;
  }
  const std::string rest = trim(text.substr(std::min(begin, text.size())));
  if (!rest.empty()) out.push_back(rest);
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(sentence[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (is_word_char(c)) {
      std::size_t j = i;
      while (j < n) {
        if (is_word_char(sentence[j])) {
          ++j;
        } else if ((sentence[j] == '-' || sentence[j] == '\'') && j + 1 < n &&
                   is_word_char(sentence[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      std::string word(sentence.substr(i, j - i));
      if (j < n && sentence[j] == '.' && abbreviations().count(to_lower(word))) {
        word += '.';
        ++j;
      }
      out.push_back(std::move(word));
      i = j;
      continue;
    }
    if (c >= 0x80) {  // keep a UTF-8 sequence together
      std::size_t j = i + 1;
      while (j < n && (static_cast<unsigned char>(sentence[j]) & 0xC0) == 0x80) ++j;
      out.emplace_back(sentence.substr(i, j - i));
      i = j;
      continue;
    }
    out.emplace_back(1, static_cast<char>(c));
    ++i;
  }
  return out;
}

TaggedSentence tag_sentence(std::string_view sentence) {
  TaggedSentence s;
  s.raw = trim(sentence);
  const auto tokens = tokenize(sentence);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    s.tokens.push_back({tokens[i], guess_tag(tokens[i], i == 0)});
  }
  // "-ed" after a determiner, adjective or conjunction modifies a noun: "a buttoned up shirt"
  for (std::size_t i = 1; i < s.tokens.size(); ++i) {
    auto& tok = s.tokens[i];
    const auto& prev = s.tokens[i - 1].tag;
    if (tok.tag == "VBD" && !closed_class().count(to_lower(tok.text)) &&
        (prev == "DT" || prev == "PRP$" || prev == "CC" || prev.rfind("JJ", 0) == 0)) {
      tok.tag = "VBN";
    }
  }
  return s;
}

std::vector<TaggedSentence> read_conll(std::istream& in, std::string_view source) {
  std::vector<TaggedSentence> out;
  TaggedSentence cur;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (cur.tokens.empty()) {
      cur = {};
      return;
    }
    if (cur.raw.empty()) {
      for (const auto& t : cur.tokens) cur.raw += (cur.raw.empty() ? "" : " ") + t.text;
    }
    out.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.rfind("# text = ", 0) == 0) {
      cur.raw = trim(line.substr(9));
      continue;
    }
    if (line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() > 2) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) +
                      ": expected 'token<TAB>tag'");
    }
    const std::string token = trim(cols[0]);
    if (token.empty()) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": empty token");
    }
    cur.tokens.push_back({token, cols.size() == 2 ? trim(cols[1]) : std::string()});
  }
  flush();
  return out;
}

std::vector<double> read_sentence_scores(std::istream& in, std::string_view source) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    double v = 0.0;
    std::string extra;
    if (!(ls >> v) || (ls >> extra) || !std::isfinite(v)) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": bad score '" + t +
                      "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace femmir
