#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "femmir/ced.hpp"
#include "femmir/harg.hpp"
#include "femmir/lexicon.hpp"
#include "femmir/property_model.hpp"
#include "femmir/scorer.hpp"

namespace femmir {

/// Records plus their graphs, built once and read-only afterwards.
class CorpusIndex {
 public:
  CorpusIndex() = default;
  /// Throws DataError on a duplicate record id.
  explicit CorpusIndex(std::vector<PropertyRecord> records);

  void add(PropertyRecord record);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<PropertyRecord>& records() const { return records_; }
  const PropertyRecord& record(std::size_t i) const { return records_[i]; }
  const Harg& harg(std::size_t i) const { return hargs_[i]; }
  const EplGraph& epl(std::size_t i) const { return epls_[i]; }
  std::optional<std::size_t> find(const std::string& id) const;
  /// Record positions of one modality, in insertion order.
  const std::vector<std::size_t>& with_modality(Modality m) const;

 private:
  std::vector<PropertyRecord> records_;
  std::vector<Harg> hargs_;
  std::vector<EplGraph> epls_;
  std::map<std::string, std::size_t> by_id_;
  std::map<Modality, std::vector<std::size_t>> by_modality_;
};

CorpusIndex index_corpus(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Queries

enum class QueryMode { kExact, kLearned };

QueryMode parse_query_mode(std::string_view name);  // throws UsageError

struct RankedEntry {
  std::string id;
  Modality modality = Modality::kText;
  double sim = 0.0;
  std::optional<double> ced;  // exact mode only
};

struct RankedResult {
  std::string query_id;
  std::vector<RankedEntry> entries;  // sim descending, ties by ascending id
};

struct QueryOptions {
  QueryMode mode = QueryMode::kExact;
  /// Empty means every modality.
  std::vector<Modality> targets;
  unsigned threads = 1;
  const ScorerModel* model = nullptr;  // required in learned mode
  /// Keep only the best k entries (0 keeps all).
  std::size_t top_k = 0;
};

/// Parses "all" or a comma-separated modality list.
std::vector<Modality> parse_targets(std::string_view text);
std::string targets_name(const std::vector<Modality>& targets);

/// Wraps a property map into a one-entity record (query-by-properties).
PropertyRecord record_from_properties(const PropertyMap& props,
                                      const std::string& entity_type = "Person",
                                      const std::string& id = "query");

/// Ranks every record of the target modalities against the query. Throws
/// InfeasibleError for an empty query and UsageError when learned mode has
/// no model.
RankedResult query(const CorpusIndex& idx, const PropertyRecord& q, const QueryOptions& opts,
                   const CostConfig& cfg, const Taxonomy& t);

/// Orders entries by sim descending, then id ascending.
void sort_ranking(std::vector<RankedEntry>& entries);

// ---------------------------------------------------------------------------
// Weak labels

struct LabelOptions {
  /// Candidates labelled per query (0 labels every ordered pair).
  std::size_t sample = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// CED labels for ordered record pairs, sorted by (query id, cand id).
std::vector<CedLabel> generate_weak_labels(const CorpusIndex& idx, const CostConfig& cfg,
                                           const Taxonomy& t, const LabelOptions& opts = {});

bool relevant(const CedLabel& label, const CostConfig& cfg);

void write_labels_csv(std::ostream& out, const std::vector<CedLabel>& labels);
/// Reads back query_id, cand_id, ced, nced, sim (assignments are not stored).
std::vector<CedLabel> read_labels_csv(std::istream& in, std::string_view source = "<stream>");

void write_ranking_csv(std::ostream& out, const RankedResult& r);
RankedResult read_ranking_csv(std::istream& in, std::string_view source = "<stream>");

// ---------------------------------------------------------------------------
// Evaluation

/// Mean of precision@k over relevant hits. The denominator is the number of
/// relevant entries retrieved, or |relevant| when `strict`. nullopt when
/// `relevant` is empty.
std::optional<double> average_precision(const RankedResult& ranked,
                                        const std::set<std::string>& relevant,
                                        bool strict = false);

/// (recall, precision) after each rank position.
std::vector<std::pair<double, double>> pr_curve(const RankedResult& ranked,
                                                const std::set<std::string>& relevant);

struct MapSummary {
  std::string query_modality;
  std::string target_modality;
  double map = 0.0;
  std::size_t queries = 0;
  std::size_t skipped = 0;  // queries without relevant records
};

/// Spearman rank correlation with average ranks for ties; 0 when either
/// side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n = 100;
  std::map<Modality, double> mix{{Modality::kText, 1.0 / 3},
                                 {Modality::kImage, 1.0 / 3},
                                 {Modality::kVideo, 1.0 / 3}};
  /// Add Clothes entities linked to the person by `wearing`.
  bool clothes = false;
  /// Groups of three records with identical content; nullopt picks n / 20.
  std::optional<std::size_t> clusters;
};

/// Largest-remainder split of n over the mix weights (ties go to the
/// earlier modality).
std::map<Modality, std::size_t> modality_quotas(std::size_t n,
                                                const std::map<Modality, double>& mix);

/// Parses "text:0.3,image:0.4,video:0.3".
std::map<Modality, double> parse_mix(std::string_view text);

std::vector<PropertyRecord> synth_corpus(const SynthConfig& cfg);

}  // namespace femmir
