#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace femmir {

/// Single-rooted hypernym tree. Depth of the root is 1.
class Taxonomy {
 public:
  Taxonomy() = default;

  /// Builds from (child, parent) pairs. Throws DataError on a cycle, a
  /// duplicate child, or anything but exactly one root.
  static Taxonomy from_edges(const std::vector<std::pair<std::string, std::string>>& edges);
  /// `child<TAB>parent` per line; `#` comments and blank lines are skipped.
  static Taxonomy parse(std::istream& in, std::string_view source = "<stream>");
  static Taxonomy load(const std::filesystem::path& path);

  bool empty() const { return depth_.empty(); }
  std::size_t size() const { return depth_.size(); }
  const std::string& root() const { return root_; }

  bool contains(std::string_view concept_name) const;
  /// Maps a surface token to a concept: case-folded, blanks joined with `-`,
  /// then a plural `-s`/`-es` strip is tried.
  std::optional<std::string> lookup(std::string_view token) const;

  int depth(std::string_view concept_name) const;
  std::optional<std::string> parent(std::string_view concept_name) const;
  /// Deepest concept that is an ancestor (or self) of both.
  std::string lcs(std::string_view a, std::string_view b) const;
  /// True when `ancestor` is `concept_name` itself or one of its hypernyms.
  bool is_a(std::string_view concept_name, std::string_view ancestor) const;

  std::vector<std::string> concepts() const;

 private:
  const std::string& checked(std::string_view concept_name) const;

  std::unordered_map<std::string, std::string> parent_;
  std::unordered_map<std::string, int> depth_;
  std::string root_;
};

/// Wu-Palmer similarity 2*depth(lcs) / (depth(a) + depth(b)), in (0, 1].
/// Throws std::out_of_range when either concept is unknown.
double wpdist(std::string_view a, std::string_view b, const Taxonomy& t);
/// Same, resolving surface tokens through Taxonomy::lookup; nullopt when
/// either token has no concept.
std::optional<double> try_wpdist(std::string_view a, std::string_view b, const Taxonomy& t);

/// Word vectors in the textual word2vec format.
class EmbeddingStore {
 public:
  static EmbeddingStore parse(std::istream& in, std::string_view source = "<stream>");
  static EmbeddingStore load(const std::filesystem::path& path);

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  /// Case-folded lookup; nullopt when absent.
  std::optional<std::span<const double>> find(std::string_view token) const;
  /// Mean of the vectors of the phrase's known tokens; nullopt if none known.
  std::optional<std::vector<double>> phrase_vector(std::string_view phrase) const;

 private:
  int dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// u.v / (|u| |v|). Throws std::invalid_argument on unequal dimensions or a
/// zero-norm input.
double cosine_sim(std::span<const double> u, std::span<const double> v);

}  // namespace femmir
