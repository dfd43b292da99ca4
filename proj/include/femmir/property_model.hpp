#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace femmir {

/// Categorical value of one property: a single token or an ordered token list.
/// A scalar without a token, or an empty list, is the NULL value.
class PropertyValue {
 public:
  enum class Kind { kScalar, kList };

  PropertyValue() = default;

  static PropertyValue scalar(std::string_view token);
  static PropertyValue list(std::vector<std::string> tokens);
  static PropertyValue null_scalar() { return {}; }

  Kind kind() const { return kind_; }
  bool is_list() const { return kind_ == Kind::kList; }
  bool is_null() const { return tokens_.empty(); }

  /// Scalar token; empty string for NULL.
  const std::string& text() const;
  /// All tokens in order (one for a non-null scalar).
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const PropertyValue&) const = default;

 private:
  Kind kind_ = Kind::kScalar;
  std::vector<std::string> tokens_;
};

using PropertyMap = std::map<std::string, PropertyValue>;

enum class Modality { kText, kImage, kVideo };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view s);  // throws DataError
inline constexpr Modality kAllModalities[] = {Modality::kText, Modality::kImage,
                                              Modality::kVideo};

struct Entity {
  std::string id;
  std::string entity_type;
  bool primary = false;
  PropertyMap attrs;

  bool operator==(const Entity&) const = default;
};

struct Relation {
  std::string name;
  std::string subject;
  std::string object;
  std::optional<std::string> role;

  /// Edge label used in the graph: `name` or `name:role`.
  std::string label() const { return role ? name + ":" + *role : name; }

  bool operator==(const Relation&) const = default;
};

struct PropertyRecord {
  std::string id;
  Modality modality = Modality::kText;
  PropertyMap metadata;
  std::vector<Entity> entities;
  std::vector<Relation> relations;

  const Entity* find_entity(std::string_view entity_id) const;
  bool empty() const { return metadata.empty() && entities.empty(); }

  bool operator==(const PropertyRecord&) const = default;
};

/// Lower-case, trim, and map `_` and blanks to `-`, so that `TOP_COLOR`,
/// `Top Color` and `top-color` name the same property.
std::string normalize_property_name(std::string_view name);

PropertyRecord parse_record(std::string_view json_text);
PropertyRecord record_from_json(const nlohmann::json& j);
nlohmann::ordered_json record_to_json(const PropertyRecord& r);
/// Compact single-line JSON, stable key order.
std::string serialize_record(const PropertyRecord& r);

/// JSON Lines corpus. Blank lines are skipped; errors carry the line number.
std::vector<PropertyRecord> read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<PropertyRecord>& records);

enum class MunkresVariant { kAdjacency, kCumulative };

std::string_view to_string(MunkresVariant v);

/// Parameters of the content edit distance. Properties absent from the
/// rcost/icost maps cost 1.0.
struct CostConfig {
  std::map<std::string, double> rcost;
  std::map<std::string, double> icost;
  std::map<std::string, int> ordcmp;
  MunkresVariant munkres_variant = MunkresVariant::kAdjacency;
  double edge_icost = 1.0;
  bool exact_edge_match_zero = true;
  double relevance_ced_threshold = 3.0;
  bool include_metadata = true;

  double replacement_cost(std::string_view property) const;
  double insertion_cost(std::string_view property) const;
  bool ordered(std::string_view property) const;

  bool operator==(const CostConfig&) const = default;
};

CostConfig validate_cost_config(const nlohmann::json& raw);
nlohmann::ordered_json cost_config_to_json(const CostConfig& cfg);
CostConfig load_cost_config(const std::filesystem::path& path);

/// rcost(top-color)=1, rcost(bottom-color)=2, rcost(gender)=3: the person
/// search penalties used throughout the evaluation protocol.
CostConfig person_search_costs();

}  // namespace femmir
