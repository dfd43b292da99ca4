#include "femmir/property_model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "femmir/errors.hpp"
#include "femmir/util.hpp"

namespace femmir {

using nlohmann::json;
using nlohmann::ordered_json;

PropertyValue PropertyValue::scalar(std::string_view token) {
  PropertyValue v;
  auto t = trim(token);
  if (!t.empty()) v.tokens_.push_back(std::move(t));
  return v;
}

PropertyValue PropertyValue::list(std::vector<std::string> tokens) {
  PropertyValue v;
  v.kind_ = Kind::kList;
  for (auto& t : tokens) {
    auto trimmed = trim(t);
    if (!trimmed.empty()) v.tokens_.push_back(std::move(trimmed));
  }
  return v;
}

const std::string& PropertyValue::text() const {
  static const std::string kEmpty;
  return tokens_.empty() ? kEmpty : tokens_.front();
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kText: return "text";
    case Modality::kImage: return "image";
    case Modality::kVideo: return "video";
  }
  return "text";
}

Modality parse_modality(std::string_view s) {
  auto l = to_lower(trim(s));
  if (l == "text") return Modality::kText;
  if (l == "image") return Modality::kImage;
  if (l == "video") return Modality::kVideo;
  throw DataError("unknown modality '" + std::string(s) + "'");
}

std::string_view to_string(MunkresVariant v) {
  return v == MunkresVariant::kCumulative ? "cumulative" : "adjacency";
}

const Entity* PropertyRecord::find_entity(std::string_view entity_id) const {
  for (const auto& e : entities) {
    if (e.id == entity_id) return &e;
  }
  return nullptr;
}

std::string normalize_property_name(std::string_view name) {
  std::string out = to_lower(trim(name));
  for (auto& c : out) {
    if (c == '_' || c == ' ' || c == '\t') c = '-';
  }
  return out;
}

namespace {

struct Path {
  const std::string& record_id;
  std::string where;

  [[noreturn]] void fail(const std::string& what) const {
    std::string id = record_id.empty() ? "<unknown>" : record_id;
    throw DataError("record " + id + ": " + where + ": " + what);
  }
  Path at(const std::string& sub) const {
    return {record_id, where.empty() ? sub : where + "." + sub};
  }
  Path at(std::size_t index) const {
    return {record_id, where + "[" + std::to_string(index) + "]"};
  }
};

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const Path& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) path.at(it.key()).fail("unknown field");
  }
}

std::string require_string(const json& obj, const char* key, const Path& path) {
  auto it = obj.find(key);
  if (it == obj.end()) path.at(key).fail("missing required field");
  if (!it->is_string()) path.at(key).fail("expected string");
  auto s = trim(it->get<std::string>());
  if (s.empty()) path.at(key).fail("must be non-empty");
  return s;
}

PropertyValue value_from_json(const json& v, const Path& path) {
  if (v.is_null()) return PropertyValue::null_scalar();
  if (v.is_string()) return PropertyValue::scalar(v.get<std::string>());
  if (v.is_number() || v.is_boolean()) return PropertyValue::scalar(v.dump());
  if (v.is_array()) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) path.at(i).fail("list values must be strings");
      tokens.push_back(v[i].get<std::string>());
    }
    return PropertyValue::list(std::move(tokens));
  }
  path.fail("expected string, list of strings, or null");
}

PropertyMap properties_from_json(const json& obj, const Path& path) {
  PropertyMap out;
  if (obj.is_null()) return out;
  if (!obj.is_object()) path.fail("expected object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    auto name = normalize_property_name(it.key());
    if (name.empty()) path.fail("empty property name");
    if (out.count(name)) path.at(it.key()).fail("duplicate property after normalization");
    out.emplace(name, value_from_json(it.value(), path.at(it.key())));
  }
  return out;
}

ordered_json value_to_json(const PropertyValue& v) {
  if (v.is_list()) return ordered_json(v.tokens());
  return v.is_null() ? ordered_json(nullptr) : ordered_json(v.text());
}

ordered_json properties_to_json(const PropertyMap& props) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : props) out[k] = value_to_json(v);
  return out;
}

}  // namespace

PropertyRecord record_from_json(const json& j) {
  static const std::string kNoId;
  if (!j.is_object()) throw DataError("record: expected a JSON object");
  PropertyRecord r;
  {
    Path root{kNoId, ""};
    r.id = require_string(j, "id", root);
  }
  Path root{r.id, ""};
  reject_unknown(j, {"id", "modality", "metadata", "entities", "relations"}, root);
  r.modality = Modality::kText;
  if (auto it = j.find("modality"); it != j.end()) {
    if (!it->is_string()) root.at("modality").fail("expected string");
    try {
      r.modality = parse_modality(it->get<std::string>());
    } catch (const DataError& e) {
      root.at("modality").fail(e.what());
    }
  } else {
    root.at("modality").fail("missing required field");
  }
  if (auto it = j.find("metadata"); it != j.end()) {
    r.metadata = properties_from_json(*it, root.at("metadata"));
  }

  std::set<std::string> ids;
  if (auto it = j.find("entities"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) root.at("entities").fail("expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& ej = (*it)[i];
      auto p = root.at("entities").at(i);
      if (!ej.is_object()) p.fail("expected object");
      reject_unknown(ej, {"id", "entity_type", "primary", "attrs"}, p);
      Entity e;
      e.id = require_string(ej, "id", p);
      e.entity_type = require_string(ej, "entity_type", p);
      if (auto pr = ej.find("primary"); pr != ej.end()) {
        if (!pr->is_boolean()) p.at("primary").fail("expected boolean");
        e.primary = pr->get<bool>();
      }
      if (auto at = ej.find("attrs"); at != ej.end()) {
        e.attrs = properties_from_json(*at, p.at("attrs"));
      }
      if (!ids.insert(e.id).second) p.at("id").fail("duplicate entity id '" + e.id + "'");
      r.entities.push_back(std::move(e));
    }
  }

  if (auto it = j.find("relations"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) root.at("relations").fail("expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& rj = (*it)[i];
      auto p = root.at("relations").at(i);
      if (!rj.is_object()) p.fail("expected object");
      reject_unknown(rj, {"name", "subject", "object", "role"}, p);
      Relation rel;
      rel.name = require_string(rj, "name", p);
      rel.subject = require_string(rj, "subject", p);
      rel.object = require_string(rj, "object", p);
      if (auto ro = rj.find("role"); ro != rj.end() && !ro->is_null()) {
        if (!ro->is_string()) p.at("role").fail("expected string");
        rel.role = trim(ro->get<std::string>());
      }
      if (!ids.count(rel.subject)) {
        p.at("subject").fail("dangling relation endpoint '" + rel.subject + "'");
      }
      if (!ids.count(rel.object)) {
        p.at("object").fail("dangling relation endpoint '" + rel.object + "'");
      }
      if (rel.subject == rel.object) p.fail("relation subject equals object");
      r.relations.push_back(std::move(rel));
    }
  }
  return r;
}

PropertyRecord parse_record(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  return record_from_json(j);
}

ordered_json record_to_json(const PropertyRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["modality"] = std::string(to_string(r.modality));
  j["metadata"] = properties_to_json(r.metadata);
  j["entities"] = ordered_json::array();
  for (const auto& e : r.entities) {
    ordered_json ej;
    ej["id"] = e.id;
    ej["entity_type"] = e.entity_type;
    ej["primary"] = e.primary;
    ej["attrs"] = properties_to_json(e.attrs);
    j["entities"].push_back(std::move(ej));
  }
  j["relations"] = ordered_json::array();
  for (const auto& rel : r.relations) {
    ordered_json rj;
    rj["name"] = rel.name;
    rj["subject"] = rel.subject;
    rj["object"] = rel.object;
    if (rel.role) rj["role"] = *rel.role;
    j["relations"].push_back(std::move(rj));
  }
  return j;
}

std::string serialize_record(const PropertyRecord& r) { return record_to_json(r).dump(); }

std::vector<PropertyRecord> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus '" + path.string() + "'");
  std::vector<PropertyRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_corpus(std::ostream& out, const std::vector<PropertyRecord>& records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

// ---------------------------------------------------------------------------
// CostConfig

double CostConfig::replacement_cost(std::string_view property) const {
  auto it = rcost.find(std::string(property));
  return it == rcost.end() ? 1.0 : it->second;
}

double CostConfig::insertion_cost(std::string_view property) const {
  auto it = icost.find(std::string(property));
  return it == icost.end() ? 1.0 : it->second;
}

bool CostConfig::ordered(std::string_view property) const {
  auto it = ordcmp.find(std::string(property));
  return it != ordcmp.end() && it->second == 1;
}

namespace {

double require_cost(const json& v, const std::string& where) {
  if (!v.is_number()) throw DataError("cost config: " + where + ": expected number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw DataError("cost config: " + where + ": cost must be finite");
  if (d < 0) throw DataError("cost config: " + where + ": negative cost");
  return d;
}

std::map<std::string, double> cost_map(const json& raw, const char* key) {
  std::map<std::string, double> out;
  auto it = raw.find(key);
  if (it == raw.end() || it->is_null()) return out;
  if (!it->is_object()) throw DataError(std::string("cost config: ") + key + ": expected object");
  for (auto e = it->begin(); e != it->end(); ++e) {
    out[normalize_property_name(e.key())] =
        require_cost(e.value(), std::string(key) + "." + e.key());
  }
  return out;
}

bool require_bool(const json& v, const char* key) {
  if (!v.is_boolean()) throw DataError(std::string("cost config: ") + key + ": expected boolean");
  return v.get<bool>();
}

}  // namespace

CostConfig validate_cost_config(const json& raw) {
  if (raw.is_null()) return {};
  if (!raw.is_object()) throw DataError("cost config: expected a JSON object");
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    static const std::set<std::string> kKnown = {
        "rcost",      "icost",      "ordcmp", "munkres_variant", "edge_icost",
        "exact_edge_match_zero", "relevance_ced_threshold", "include_metadata"};
    if (!kKnown.count(it.key())) throw DataError("cost config: unknown field '" + it.key() + "'");
  }
  CostConfig cfg;
  cfg.rcost = cost_map(raw, "rcost");
  cfg.icost = cost_map(raw, "icost");
  if (auto it = raw.find("ordcmp"); it != raw.end() && !it->is_null()) {
    if (!it->is_object()) throw DataError("cost config: ordcmp: expected object");
    for (auto e = it->begin(); e != it->end(); ++e) {
      const auto& v = e.value();
      bool ok = v.is_number_integer() || v.is_boolean() ||
                (v.is_number() && (v.get<double>() == 0.0 || v.get<double>() == 1.0));
      int flag = -1;
      if (v.is_boolean()) {
        flag = v.get<bool>() ? 1 : 0;
      } else if (ok) {
        double d = v.get<double>();
        flag = d == 0.0 ? 0 : d == 1.0 ? 1 : -1;
      }
      if (flag < 0) {
        throw DataError("cost config: ordcmp." + e.key() + ": value must be 0 or 1");
      }
      cfg.ordcmp[normalize_property_name(e.key())] = flag;
    }
  }
  if (auto it = raw.find("munkres_variant"); it != raw.end()) {
    if (!it->is_string()) throw DataError("cost config: munkres_variant: expected string");
    auto v = to_lower(it->get<std::string>());
    if (v == "adjacency") {
      cfg.munkres_variant = MunkresVariant::kAdjacency;
    } else if (v == "cumulative") {
      cfg.munkres_variant = MunkresVariant::kCumulative;
    } else {
      throw DataError("cost config: munkres_variant: expected 'adjacency' or 'cumulative'");
    }
  }
  if (auto it = raw.find("edge_icost"); it != raw.end()) {
    cfg.edge_icost = require_cost(*it, "edge_icost");
  }
  if (auto it = raw.find("exact_edge_match_zero"); it != raw.end()) {
    cfg.exact_edge_match_zero = require_bool(*it, "exact_edge_match_zero");
  }
  if (auto it = raw.find("include_metadata"); it != raw.end()) {
    cfg.include_metadata = require_bool(*it, "include_metadata");
  }
  if (auto it = raw.find("relevance_ced_threshold"); it != raw.end()) {
    if (!it->is_number() || !std::isfinite(it->get<double>())) {
      throw DataError("cost config: relevance_ced_threshold: expected finite number");
    }
    cfg.relevance_ced_threshold = it->get<double>();
  }
  return cfg;
}

ordered_json cost_config_to_json(const CostConfig& cfg) {
  ordered_json j;
  j["rcost"] = ordered_json::object();
  for (const auto& [k, v] : cfg.rcost) j["rcost"][k] = v;
  j["icost"] = ordered_json::object();
  for (const auto& [k, v] : cfg.icost) j["icost"][k] = v;
  j["ordcmp"] = ordered_json::object();
  for (const auto& [k, v] : cfg.ordcmp) j["ordcmp"][k] = v;
  j["munkres_variant"] = std::string(to_string(cfg.munkres_variant));
  j["edge_icost"] = cfg.edge_icost;
  j["exact_edge_match_zero"] = cfg.exact_edge_match_zero;
  j["relevance_ced_threshold"] = cfg.relevance_ced_threshold;
  j["include_metadata"] = cfg.include_metadata;
  return j;
}

CostConfig load_cost_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open cost config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json raw;
  try {
    raw = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw DataError("cost config '" + path.string() + "': malformed JSON: " + e.what());
  }
  return validate_cost_config(raw);
}

CostConfig person_search_costs() {
  CostConfig cfg;
  cfg.rcost = {{"top-color", 1.0}, {"bottom-color", 2.0}, {"gender", 3.0}};
  return cfg;
}

}  // namespace femmir
