#include "femmir/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "femmir/errors.hpp"
#include "femmir/util.hpp"

namespace femmir {

namespace {

double parse_double(const std::string& field, std::string_view source, std::size_t line) {
  const std::string t = to_lower(trim(field));
  if (t == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": bad number '" + field +
                    "'");
  }
}

const std::vector<std::size_t> kNoRecords;

}  // namespace

// ---------------------------------------------------------------------------

CorpusIndex::CorpusIndex(std::vector<PropertyRecord> records) {
  for (auto& r : records) add(std::move(r));
}

void CorpusIndex::add(PropertyRecord record) {
  if (by_id_.count(record.id)) throw DataError("duplicate record id '" + record.id + "'");
  const std::size_t pos = records_.size();
  by_id_.emplace(record.id, pos);
  by_modality_[record.modality].push_back(pos);
  hargs_.push_back(construct_harg(record));
  epls_.push_back(discover_eplv(hargs_.back()));
  records_.push_back(std::move(record));
}

std::optional<std::size_t> CorpusIndex::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& CorpusIndex::with_modality(Modality m) const {
  auto it = by_modality_.find(m);
  return it == by_modality_.end() ? kNoRecords : it->second;
}

CorpusIndex index_corpus(const std::filesystem::path& path) {
  return CorpusIndex(read_corpus(path));
}

// ---------------------------------------------------------------------------

QueryMode parse_query_mode(std::string_view name) {
  const std::string key = to_lower(name);
  if (key == "exact") return QueryMode::kExact;
  if (key == "learned") return QueryMode::kLearned;
  throw UsageError("unknown query mode '" + std::string(name) + "' (exact or learned)");
}

std::vector<Modality> parse_targets(std::string_view text) {
  const std::string key = to_lower(trim(text));
  if (key.empty() || key == "all") return {};
  std::vector<Modality> out;
  for (const auto& part : split(key, ',')) {
    Modality m;
    try {
      m = parse_modality(trim(part));
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  if (out.size() == std::size(kAllModalities)) return {};
  return out;
}

std::string targets_name(const std::vector<Modality>& targets) {
  if (targets.empty()) return "all";
  std::string out;
  for (auto m : targets) {
    if (!out.empty()) out += '+';
    out += to_string(m);
  }
  return out;
}

PropertyRecord record_from_properties(const PropertyMap& props, const std::string& entity_type,
                                      const std::string& id) {
  PropertyRecord r;
  r.id = id;
  r.modality = Modality::kText;
  Entity e;
  e.id = "e1";
  e.entity_type = entity_type;
  e.primary = true;
  for (const auto& [name, value] : props) e.attrs[normalize_property_name(name)] = value;
  r.entities.push_back(std::move(e));
  return r;
}

void sort_ranking(std::vector<RankedEntry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.id < b.id;
  });
}

RankedResult query(const CorpusIndex& idx, const PropertyRecord& q, const QueryOptions& opts,
                   const CostConfig& cfg, const Taxonomy& t) {
  if (q.metadata.empty() && q.entities.empty()) {
    throw InfeasibleError("empty query: no properties and no entities");
  }
  if (opts.mode == QueryMode::kLearned && !opts.model) {
    throw UsageError("learned mode needs a scorer model");
  }

  std::vector<std::size_t> pool;
  if (opts.targets.empty()) {
    pool.resize(idx.size());
    std::iota(pool.begin(), pool.end(), 0);
  } else {
    for (auto m : opts.targets) {
      const auto& ids = idx.with_modality(m);
      pool.insert(pool.end(), ids.begin(), ids.end());
    }
  }

  const Harg qh = construct_harg(q);
  const EplGraph qg = discover_eplv(qh);
  std::optional<ScorerGraph> q_scorer;
  if (opts.mode == QueryMode::kLearned) q_scorer = prepare_graph(qh, opts.model->dims.hash_dim);

  RankedResult out;
  out.query_id = q.id;
  out.entries.resize(pool.size());
  parallel_for(pool.size(), opts.threads, [&](std::size_t k) {
    const std::size_t i = pool[k];
    auto& entry = out.entries[k];
    entry.id = idx.record(i).id;
    entry.modality = idx.record(i).modality;
    if (opts.mode == QueryMode::kExact) {
      const auto label = ced(qg, idx.epl(i), cfg, t);
      entry.sim = label.sim;
      entry.ced = label.ced;
    } else {
      entry.sim = predict_similarity(
          *q_scorer, prepare_graph(idx.harg(i), opts.model->dims.hash_dim), *opts.model);
    }
  });
  sort_ranking(out.entries);
  if (opts.top_k > 0 && out.entries.size() > opts.top_k) out.entries.resize(opts.top_k);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CedLabel> generate_weak_labels(const CorpusIndex& idx, const CostConfig& cfg,
                                           const Taxonomy& t, const LabelOptions& opts) {
  const std::size_t n = idx.size();
  // candidate lists are drawn up front so that the thread count cannot
  // change which pairs are labelled
  std::vector<std::vector<std::size_t>> candidates(n);
  Rng rng(opts.seed);
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = candidates[i];
    c.resize(n);
    std::iota(c.begin(), c.end(), 0);
    if (opts.sample > 0 && opts.sample < n) {
      rng.shuffle(c);
      c.resize(opts.sample);
      std::sort(c.begin(), c.end());
    }
  }
  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + candidates[i].size();

  std::vector<CedLabel> labels(offsets[n]);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    for (std::size_t k = 0; k < candidates[i].size(); ++k) {
      auto label = ced(idx.epl(i), idx.epl(candidates[i][k]), cfg, t);
      label.query_id = idx.record(i).id;
      label.cand_id = idx.record(candidates[i][k]).id;
      labels[offsets[i] + k] = std::move(label);
    }
  });
  std::stable_sort(labels.begin(), labels.end(), [](const CedLabel& a, const CedLabel& b) {
    return std::tie(a.query_id, a.cand_id) < std::tie(b.query_id, b.cand_id);
  });
  return labels;
}

bool relevant(const CedLabel& label, const CostConfig& cfg) {
  return label.feasible && label.ced < cfg.relevance_ced_threshold;
}

void write_labels_csv(std::ostream& out, const std::vector<CedLabel>& labels) {
  out << "query_id,cand_id,ced,nced,sim\n";
  for (const auto& l : labels) {
    out << l.query_id << ',' << l.cand_id << ',' << format_fixed(l.ced) << ','
        << format_fixed(l.nced) << ',' << format_fixed(l.sim) << '\n';
  }
}

std::vector<CedLabel> read_labels_csv(std::istream& in, std::string_view source) {
  std::vector<CedLabel> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (lineno == 1 && !cols.empty() && trim(cols[0]) == "query_id") continue;
    if (cols.size() != 5) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) +
                      ": expected 5 columns query_id,cand_id,ced,nced,sim");
    }
    CedLabel l;
    l.query_id = trim(cols[0]);
    l.cand_id = trim(cols[1]);
    l.ced = parse_double(cols[2], source, lineno);
    l.nced = parse_double(cols[3], source, lineno);
    l.sim = parse_double(cols[4], source, lineno);
    l.feasible = std::isfinite(l.ced);
    if (l.sim < 0.0 || l.sim > 1.0) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) +
                      ": similarity outside [0, 1]");
    }
    out.push_back(std::move(l));
  }
  return out;
}

void write_ranking_csv(std::ostream& out, const RankedResult& r) {
  const bool with_ced =
      std::any_of(r.entries.begin(), r.entries.end(), [](const auto& e) { return e.ced; });
  out << "rank,id,modality,sim" << (with_ced ? ",ced" : "") << '\n';
  for (std::size_t k = 0; k < r.entries.size(); ++k) {
    const auto& e = r.entries[k];
    out << k + 1 << ',' << e.id << ',' << to_string(e.modality) << ',' << format_fixed(e.sim);
    if (with_ced) out << ',' << (e.ced ? format_fixed(*e.ced) : std::string());
    out << '\n';
  }
}

RankedResult read_ranking_csv(std::istream& in, std::string_view source) {
  RankedResult r;
  std::string line;
  std::size_t lineno = 0;
  bool with_ced = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (lineno == 1) {
      if (cols.size() < 4 || trim(cols[0]) != "rank") {
        throw DataError(std::string(source) + ":1: expected header rank,id,modality,sim[,ced]");
      }
      with_ced = cols.size() == 5;
      continue;
    }
    if (cols.size() != (with_ced ? 5u : 4u)) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) +
                      ": wrong number of columns");
    }
    RankedEntry e;
    e.id = trim(cols[1]);
    try {
      e.modality = parse_modality(trim(cols[2]));
    } catch (const DataError& err) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": " + err.what());
    }
    e.sim = parse_double(cols[3], source, lineno);
    if (with_ced && !trim(cols[4]).empty()) e.ced = parse_double(cols[4], source, lineno);
    r.entries.push_back(std::move(e));
  }
  return r;
}

// ---------------------------------------------------------------------------

std::optional<double> average_precision(const RankedResult& ranked,
                                        const std::set<std::string>& relevant, bool strict) {
  if (relevant.empty()) return std::nullopt;
  double total = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranked.entries.size(); ++k) {
    if (!relevant.count(ranked.entries[k].id)) continue;
    ++hits;
    total += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  const std::size_t denom = strict ? relevant.size() : hits;
  return denom == 0 ? 0.0 : total / static_cast<double>(denom);
}

std::vector<std::pair<double, double>> pr_curve(const RankedResult& ranked,
                                                const std::set<std::string>& relevant) {
  std::vector<std::pair<double, double>> out;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranked.entries.size(); ++k) {
    if (relevant.count(ranked.entries[k].id)) ++hits;
    const double recall =
        relevant.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(relevant.size());
    out.emplace_back(recall, static_cast<double>(hits) / static_cast<double>(k + 1));
  }
  return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return v[x] < v[y]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

// ---------------------------------------------------------------------------

std::map<Modality, std::size_t> modality_quotas(std::size_t n,
                                                const std::map<Modality, double>& mix) {
  double total = 0.0;
  for (const auto& [m, w] : mix) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("modality weights must be >= 0");
    total += w;
  }
  if (total <= 0.0) throw UsageError("modality mix has no positive weight");
  std::map<Modality, std::size_t> out;
  std::vector<std::pair<double, Modality>> remainders;
  std::size_t assigned = 0;
  for (const auto& [m, w] : mix) {
    const double exact = static_cast<double>(n) * w / total;
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    out[m] = whole;
    assigned += whole;
    remainders.emplace_back(exact - static_cast<double>(whole), m);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) {
    ++out[remainders[k % remainders.size()].second];
  }
  return out;
}

std::map<Modality, double> parse_mix(std::string_view text) {
  std::map<Modality, double> out;
  for (const auto& part : split(text, ',')) {
    const auto kv = split(part, ':');
    if (kv.size() != 2) throw UsageError("bad modality mix entry '" + part + "'");
    Modality m;
    try {
      m = parse_modality(trim(kv[0]));
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    double w = 0.0;
    try {
      w = std::stod(trim(kv[1]));
    } catch (const std::exception&) {
      throw UsageError("bad modality weight '" + kv[1] + "'");
    }
    if (!std::isfinite(w) || w < 0.0) throw UsageError("modality weight must be >= 0");
    out[m] = w;
  }
  if (out.empty()) throw UsageError("empty modality mix");
  double total = 0.0;
  for (const auto& [m, w] : out) total += w;
  if (total <= 0.0) throw UsageError("modality weights sum to zero");
  return out;
}

std::vector<PropertyRecord> synth_corpus(const SynthConfig& cfg) {
  if (cfg.n == 0) throw UsageError("synthetic corpus needs n >= 1");
  static const std::vector<std::string> kGenders{"male", "female"};
  static const std::vector<std::string> kRaces{"white", "black", "asian", "hispanic"};
  static const std::vector<std::string> kColors{"red",   "blue",  "black",  "white",
                                                "grey",  "green", "yellow", "brown"};
  static const std::vector<std::string> kTops{"shirt", "t-shirt", "jacket", "coat", "sweater"};
  static const std::vector<std::string> kBottoms{"jeans", "pants", "shorts", "skirt"};

  Rng rng(cfg.seed);
  auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
    return v[rng.index(v.size())];
  };

  std::vector<Modality> modalities;
  for (const auto& [m, count] : modality_quotas(cfg.n, cfg.mix)) {
    modalities.insert(modalities.end(), count, m);
  }
  rng.shuffle(modalities);

  const int width = std::max<int>(4, static_cast<int>(std::to_string(cfg.n).size()));
  std::vector<PropertyRecord> out;
  out.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    PropertyRecord r;
    std::ostringstream id;
    id << 'S' << std::setw(width) << std::setfill('0') << i + 1;
    r.id = id.str();
    r.modality = modalities[i];
    Entity p;
    p.id = "p1";
    p.entity_type = "Person";
    p.primary = true;
    p.attrs["gender"] = PropertyValue::scalar(pick(kGenders));
    p.attrs["race"] = PropertyValue::scalar(pick(kRaces));
    const std::string top = pick(kColors);
    const std::string bottom = pick(kColors);
    p.attrs["top-color"] = PropertyValue::scalar(top);
    p.attrs["bottom-color"] = PropertyValue::scalar(bottom);
    r.entities.push_back(std::move(p));
    if (cfg.clothes) {
      Entity upper{"c1", "Clothes", false, {}};
      upper.attrs["type"] = PropertyValue::scalar(pick(kTops));
      upper.attrs["color"] = PropertyValue::list({top});
      r.entities.push_back(std::move(upper));
      r.relations.push_back({"wearing", "p1", "c1", std::nullopt});
      if (rng.uniform() < 0.5) {
        Entity lower{"c2", "Clothes", false, {}};
        lower.attrs["type"] = PropertyValue::scalar(pick(kBottoms));
        lower.attrs["color"] = PropertyValue::list({bottom});
        r.entities.push_back(std::move(lower));
        r.relations.push_back({"wearing", "p1", "c2", std::nullopt});
      }
    }
    out.push_back(std::move(r));
  }

  // planted clusters: three records sharing the same content
  const std::size_t clusters = std::min(cfg.clusters.value_or(cfg.n / 20), cfg.n / 3);
  std::vector<std::size_t> order(cfg.n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (std::size_t c = 0; c < clusters; ++c) {
    const auto& source = out[order[3 * c]];
    for (std::size_t k = 1; k < 3; ++k) {
      auto& copy = out[order[3 * c + k]];
      copy.entities = source.entities;
      copy.relations = source.relations;
      copy.metadata = source.metadata;
    }
  }
  return out;
}

}  // namespace femmir
