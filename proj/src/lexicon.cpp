#include "femmir/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "femmir/errors.hpp"
#include "femmir/util.hpp"

namespace femmir {

Taxonomy Taxonomy::from_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
  Taxonomy t;
  for (const auto& [child, parent] : edges) {
    if (!t.parent_.emplace(child, parent).second) {
      throw DataError("taxonomy: duplicate child '" + child + "'");
    }
  }

  // cycle check: follow parent links from every child
  std::unordered_map<std::string, int> state;  // 1 = on stack, 2 = done
  for (const auto& [start, unused] : t.parent_) {
    std::vector<std::string> chain;
    std::string cur = start;
    while (true) {
      auto st = state[cur];
      if (st == 2) break;
      if (st == 1) throw DataError("taxonomy: cycle through '" + cur + "'");
      state[cur] = 1;
      chain.push_back(cur);
      auto it = t.parent_.find(cur);
      if (it == t.parent_.end()) break;
      cur = it->second;
    }
    for (auto& c : chain) state[c] = 2;
  }

  std::set<std::string> roots;
  for (const auto& [child, parent] : t.parent_) {
    if (!t.parent_.count(parent)) roots.insert(parent);
  }
  if (roots.size() != 1) {
    std::string list;
    for (const auto& r : roots) list += (list.empty() ? "" : ", ") + r;
    throw DataError("taxonomy: multiple roots (" + (list.empty() ? std::string("none") : list) +
                    ")");
  }
  t.root_ = *roots.begin();
  t.depth_[t.root_] = 1;

  for (const auto& [start, unused] : t.parent_) {
    std::vector<std::string> chain;
    std::string cur = start;
    while (!t.depth_.count(cur)) {
      chain.push_back(cur);
      cur = t.parent_.at(cur);
    }
    int d = t.depth_.at(cur);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) t.depth_[*it] = ++d;
  }
  return t;
}

Taxonomy Taxonomy::parse(std::istream& in, std::string_view source) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string::npos) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) +
                      ": expected child<TAB>parent");
    }
    auto child = to_lower(trim(t.substr(0, tab)));
    auto parent = to_lower(trim(t.substr(tab + 1)));
    if (child.empty() || parent.empty()) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": empty concept");
    }
    edges.emplace_back(std::move(child), std::move(parent));
  }
  try {
    return from_edges(edges);
  } catch (const DataError& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open taxonomy '" + path.string() + "'");
  return parse(in, path.string());
}

bool Taxonomy::contains(std::string_view c) const { return depth_.count(std::string(c)) > 0; }

std::optional<std::string> Taxonomy::lookup(std::string_view token) const {
  std::string key = to_lower(trim(token));
  for (auto& c : key) {
    if (c == ' ' || c == '_') c = '-';
  }
  if (key.empty()) return std::nullopt;
  if (contains(key)) return key;
  auto ends_with = [&](std::string_view suffix) {
    return key.size() > suffix.size() + 2 &&
           key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("es")) {
    auto stem = key.substr(0, key.size() - 2);
    if (contains(stem)) return stem;
  }
  if (ends_with("s")) {
    auto stem = key.substr(0, key.size() - 1);
    if (contains(stem)) return stem;
  }
  return std::nullopt;
}

const std::string& Taxonomy::checked(std::string_view c) const {
  auto it = depth_.find(std::string(c));
  if (it == depth_.end()) throw std::out_of_range("unknown concept '" + std::string(c) + "'");
  return it->first;
}

int Taxonomy::depth(std::string_view c) const { return depth_.at(checked(c)); }

std::optional<std::string> Taxonomy::parent(std::string_view c) const {
  auto it = parent_.find(checked(c));
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

std::string Taxonomy::lcs(std::string_view a, std::string_view b) const {
  std::string x = checked(a), y = checked(b);
  int dx = depth_.at(x), dy = depth_.at(y);
  while (dx > dy) {
    x = parent_.at(x);
    --dx;
  }
  while (dy > dx) {
    y = parent_.at(y);
    --dy;
  }
  while (x != y) {
    x = parent_.at(x);
    y = parent_.at(y);
  }
  return x;
}

bool Taxonomy::is_a(std::string_view c, std::string_view ancestor) const {
  if (!contains(c) || !contains(ancestor)) return false;
  std::string cur(c);
  while (true) {
    if (cur == ancestor) return true;
    auto it = parent_.find(cur);
    if (it == parent_.end()) return false;
    cur = it->second;
  }
}

std::vector<std::string> Taxonomy::concepts() const {
  std::vector<std::string> out;
  out.reserve(depth_.size());
  for (const auto& [c, d] : depth_) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

double wpdist(std::string_view a, std::string_view b, const Taxonomy& t) {
  const int da = t.depth(a);
  const int db = t.depth(b);
  const int dl = t.depth(t.lcs(a, b));
  return 2.0 * dl / static_cast<double>(da + db);
}

std::optional<double> try_wpdist(std::string_view a, std::string_view b, const Taxonomy& t) {
  auto ca = t.lookup(a);
  auto cb = t.lookup(b);
  if (!ca || !cb) return std::nullopt;
  return wpdist(*ca, *cb, t);
}

// ---------------------------------------------------------------------------

EmbeddingStore EmbeddingStore::parse(std::istream& in, std::string_view source) {
  auto fail = [&](std::size_t line, const std::string& what) -> DataError {
    return DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
  };
  EmbeddingStore store;
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing '<count> <dim>' header");
  std::size_t count = 0;
  {
    std::istringstream hs(line);
    long long c = -1, d = -1;
    if (!(hs >> c >> d) || c < 0 || d <= 0) throw fail(1, "bad '<count> <dim>' header");
    count = static_cast<std::size_t>(c);
    store.dim_ = static_cast<int>(d);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::vector<double> v;
    std::string field;
    while (ls >> field) {
      double x = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw fail(lineno, "non-numeric component '" + field + "'");
      }
      v.push_back(x);
    }
    if (static_cast<int>(v.size()) != store.dim_) {
      throw fail(lineno, "ragged row: expected " + std::to_string(store.dim_) +
                             " components, got " + std::to_string(v.size()));
    }
    store.vectors_[to_lower(token)] = std::move(v);
  }
  if (store.vectors_.size() != count) {
    throw fail(lineno, "header declares " + std::to_string(count) + " vectors, found " +
                           std::to_string(store.vectors_.size()));
  }
  return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings '" + path.string() + "'");
  return parse(in, path.string());
}

std::optional<std::span<const double>> EmbeddingStore::find(std::string_view token) const {
  auto it = vectors_.find(to_lower(trim(token)));
  if (it == vectors_.end()) return std::nullopt;
  return std::span<const double>(it->second);
}

std::optional<std::vector<double>> EmbeddingStore::phrase_vector(std::string_view phrase) const {
  std::istringstream is{std::string(phrase)};
  std::string token;
  std::vector<double> sum(static_cast<std::size_t>(dim_), 0.0);
  int found = 0;
  while (is >> token) {
    auto v = find(token);
    if (!v) continue;
    for (int i = 0; i < dim_; ++i) sum[i] += (*v)[i];
    ++found;
  }
  if (found == 0) return std::nullopt;
  for (auto& x : sum) x /= found;
  return sum;
}

double cosine_sim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine_sim: dimension mismatch");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) throw std::invalid_argument("cosine_sim: zero-norm vector");
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace femmir
