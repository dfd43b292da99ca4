#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "femmir/harg.hpp"
#include "femmir/lexicon.hpp"
#include "femmir/munkres.hpp"
#include "femmir/property_model.hpp"

namespace femmir {

/// Query-directed Levenshtein distance over tokens: substituting a query
/// token costs `rcost`, a query token missing from the candidate costs
/// `icost`, surplus candidate tokens are free.
double list_edit_distance(std::span<const std::string> query,
                          std::span<const std::string> candidate, double rcost, double icost);

/// Unordered comparison: `rcost` for every query token that the candidate
/// multiset does not cover.
double hash_compare(std::span<const std::string> query, std::span<const std::string> candidate,
                    double rcost);

/// Cost of replacing edge label `a` by `b`: 0 for identical labels (when
/// exact_edge_match_zero), else 1/wpdist on the taxonomy, falling back to
/// 0/edge_icost when a label has no concept.
double edge_label_cost(const std::string& a, const std::string& b, const CostConfig& cfg,
                       const Taxonomy& t);

/// Cheapest assignment of the query vertex's adjacent edge labels onto the
/// candidate's; unmatched query labels cost edge_icost.
double edge_set_cost(std::span<const std::string> query, std::span<const std::string> candidate,
                     const CostConfig& cfg, const Taxonomy& t);

/// Cost of aligning query vertex u to candidate vertex v; +inf when the
/// entity types differ.
double eplv_cost(const EplVertex& u, const EplVertex& v, const CostConfig& cfg,
                 const Taxonomy& t);

/// Cost of u when no candidate vertex is left for it.
double insertion_cost(const EplVertex& u, const CostConfig& cfg);

struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> cells;
  /// EPL vertex id for each row / column; -1 marks a padding column.
  std::vector<int> row_map;
  std::vector<int> col_map;

  double& at(int i, int j) { return cells[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return cells[static_cast<std::size_t>(i) * cols + j]; }
  bool synthetic(int j) const { return col_map[j] < 0; }
};

/// n x max(n, m) matrix; when the candidate has fewer vertices the extra
/// columns price inserting the whole query vertex.
CostMatrix build_cost_matrix(const EplGraph& query, const EplGraph& candidate,
                             const CostConfig& cfg, const Taxonomy& t);

/// Adds to every cell the (already accumulated) cost of aligning the two
/// vertices' parents, walking query rows from the shallowest level down.
/// Parents that are the ROOT vertex contribute nothing.
CostMatrix apply_cumulative(CostMatrix cmat, const EplGraph& query, const EplGraph& candidate);

Assignment munkres_assign(const CostMatrix& cmat);

struct CedLabel {
  std::string query_id;
  std::string cand_id;
  double ced = 0.0;
  double nced = 0.0;
  double sim = 1.0;
  /// (query EPL vertex, candidate EPL vertex or -1 for an insertion)
  std::vector<std::pair<int, int>> assignment;
  bool feasible = true;
};

/// Content edit distance of the query sample against a candidate sample.
/// Infeasible pairs get ced = nced = +inf and sim = 0.
CedLabel ced(const EplGraph& query, const EplGraph& candidate, const CostConfig& cfg,
             const Taxonomy& t);

}  // namespace femmir
