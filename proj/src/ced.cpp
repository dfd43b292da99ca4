#include "femmir/ced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "femmir/util.hpp"

namespace femmir {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> folded(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(to_lower(t));
  return out;
}

bool counts_props(const EplVertex& u, const CostConfig& cfg) {
  return cfg.include_metadata || u.parent.has_value();
}
}  // namespace

double list_edit_distance(std::span<const std::string> query,
                          std::span<const std::string> candidate, double rcost, double icost) {
  const std::size_t n = query.size(), m = candidate.size();
  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = prev[0] + icost;
    for (std::size_t j = 1; j <= m; ++j) {
      const double sub = prev[j - 1] + (query[i - 1] == candidate[j - 1] ? 0.0 : rcost);
      const double ins = prev[j] + icost;
      const double drop = cur[j - 1];
      cur[j] = std::min({sub, ins, drop});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double hash_compare(std::span<const std::string> query, std::span<const std::string> candidate,
                    double rcost) {
  std::unordered_map<std::string, int> available;
  for (const auto& t : candidate) ++available[t];
  double cost = 0.0;
  for (const auto& t : query) {
    auto it = available.find(t);
    if (it != available.end() && it->second > 0) {
      --it->second;
    } else {
      cost += rcost;
    }
  }
  return cost;
}

double edge_label_cost(const std::string& a, const std::string& b, const CostConfig& cfg,
                       const Taxonomy& t) {
  if (a == b && cfg.exact_edge_match_zero) return 0.0;
  if (auto w = try_wpdist(a, b, t)) return 1.0 / *w;
  return a == b ? 0.0 : cfg.edge_icost;
}

double edge_set_cost(std::span<const std::string> query, std::span<const std::string> candidate,
                     const CostConfig& cfg, const Taxonomy& t) {
  if (query.empty()) return 0.0;
  const int n = static_cast<int>(query.size());
  const int m = static_cast<int>(candidate.size());
  const int cols = std::max(n, m);
  std::vector<double> cells(static_cast<std::size_t>(n) * cols);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cols; ++j) {
      cells[static_cast<std::size_t>(i) * cols + j] =
          j < m ? edge_label_cost(query[i], candidate[j], cfg, t) : cfg.edge_icost;
    }
  }
  return solve_assignment(n, cols, cells).total;
}

double eplv_cost(const EplVertex& u, const EplVertex& v, const CostConfig& cfg,
                 const Taxonomy& t) {
  if (u.entity_type != v.entity_type) return kInf;
  double cost = 0.0;
  if (counts_props(u, cfg)) {
    for (const auto& [name, uval] : u.props) {
      if (uval.is_null()) continue;  // nothing asked for
      auto it = v.props.find(name);
      if (it == v.props.end() || it->second.is_null()) {
        cost += cfg.insertion_cost(name);
        continue;
      }
      const auto& vval = it->second;
      if (!uval.is_list() && !vval.is_list()) {
        if (to_lower(uval.text()) != to_lower(vval.text())) cost += cfg.replacement_cost(name);
        continue;
      }
      const auto q = folded(uval.tokens());
      const auto c = folded(vval.tokens());
      cost += cfg.ordered(name)
                  ? list_edit_distance(q, c, cfg.replacement_cost(name), cfg.insertion_cost(name))
                  : hash_compare(q, c, cfg.replacement_cost(name));
    }
  }
  return cost + edge_set_cost(u.adjacent_edge_labels, v.adjacent_edge_labels, cfg, t);
}

double insertion_cost(const EplVertex& u, const CostConfig& cfg) {
  double cost = 0.0;
  if (counts_props(u, cfg)) {
    for (const auto& [name, value] : u.props) {
      if (!value.is_null()) cost += cfg.insertion_cost(name);
    }
  }
  return cost + cfg.edge_icost * static_cast<double>(u.adjacent_edge_labels.size());
}

CostMatrix build_cost_matrix(const EplGraph& query, const EplGraph& candidate,
                             const CostConfig& cfg, const Taxonomy& t) {
  CostMatrix c;
  const int n = static_cast<int>(query.size());
  const int m = static_cast<int>(candidate.size());
  c.rows = n;
  c.cols = std::max(n, m);
  c.cells.assign(static_cast<std::size_t>(c.rows) * c.cols, 0.0);
  for (int i = 0; i < n; ++i) c.row_map.push_back(query.vertices[i].id);
  for (int j = 0; j < c.cols; ++j) c.col_map.push_back(j < m ? candidate.vertices[j].id : -1);
  for (int i = 0; i < n; ++i) {
    const auto& u = query.vertices[i];
    const double insert = n > m ? insertion_cost(u, cfg) : 0.0;
    for (int j = 0; j < c.cols; ++j) {
      c.at(i, j) = j < m ? eplv_cost(u, candidate.vertices[j], cfg, t) : insert;
    }
  }
  return c;
}

CostMatrix apply_cumulative(CostMatrix cmat, const EplGraph& query, const EplGraph& candidate) {
  std::unordered_map<int, int> row_of, col_of;
  for (int i = 0; i < cmat.rows; ++i) row_of[cmat.row_map[i]] = i;
  for (int j = 0; j < cmat.cols; ++j) {
    if (!cmat.synthetic(j)) col_of[cmat.col_map[j]] = j;
  }
  auto non_root_parent = [](const EplGraph& g, int vertex) -> int {
    const auto& v = g.vertices[vertex];
    if (!v.parent || *v.parent == g.root) return -1;
    return *v.parent;
  };

  std::vector<int> order(cmat.rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return query.vertices[cmat.row_map[a]].level < query.vertices[cmat.row_map[b]].level;
  });

  for (int i : order) {
    const int pu = non_root_parent(query, cmat.row_map[i]);
    if (pu < 0) continue;
    const int pi = row_of.at(pu);
    for (int j = 0; j < cmat.cols; ++j) {
      double parent_cost = 0.0;
      if (cmat.synthetic(j)) {
        parent_cost = cmat.at(pi, j);
      } else {
        const int pv = non_root_parent(candidate, cmat.col_map[j]);
        if (pv < 0) continue;
        parent_cost = cmat.at(pi, col_of.at(pv));
      }
      cmat.at(i, j) += parent_cost;
    }
  }
  return cmat;
}

Assignment munkres_assign(const CostMatrix& cmat) {
  return solve_assignment(cmat.rows, cmat.cols, cmat.cells);
}

CedLabel ced(const EplGraph& query, const EplGraph& candidate, const CostConfig& cfg,
             const Taxonomy& t) {
  CedLabel label;
  label.query_id = query.sample_id;
  label.cand_id = candidate.sample_id;

  auto cmat = build_cost_matrix(query, candidate, cfg, t);
  if (cfg.munkres_variant == MunkresVariant::kCumulative) {
    cmat = apply_cumulative(std::move(cmat), query, candidate);
  }
  const auto result = munkres_assign(cmat);
  for (int i = 0; i < cmat.rows; ++i) {
    label.assignment.emplace_back(cmat.row_map[i], cmat.col_map[result.row_to_col[i]]);
  }
  label.feasible = result.feasible;
  if (!result.feasible) {
    label.ced = label.nced = kInf;
    label.sim = 0.0;
    return label;
  }
  label.ced = result.total;
  const double mean_size = (static_cast<double>(query.size()) + candidate.size()) / 2.0;
  label.nced = label.ced / mean_size;
  label.sim = std::exp(-label.nced);
  return label;
}

}  // namespace femmir
