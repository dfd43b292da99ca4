#pragma once

#include <optional>
#include <string>
#include <vector>

#include "femmir/property_model.hpp"

namespace femmir {

inline constexpr const char* kRootLabel = "ROOT";
inline constexpr const char* kNullLabel = "NULL";
inline constexpr const char* kHasEntityLabel = "hasEntity";

enum class NodeKind { kRoot, kEntity, kValue, kNull };

struct HargNode {
  int id = 0;
  int level = 0;
  std::string label;
  bool is_leaf = false;
  NodeKind kind = NodeKind::kValue;
  /// Tree parent (-1 for ROOT). Entity nodes point at ROOT or at the entity
  /// that pulled them one level down through a relation.
  int parent = -1;
  /// Source entity id for entity nodes.
  std::string entity_id;
};

enum class EdgeKind { kMetadata, kHasEntity, kProperty, kRelation };

struct HargEdge {
  int from = 0;
  int to = 0;
  std::string label;
  EdgeKind kind = EdgeKind::kProperty;
  /// Leaf edges only: the value came from a list-valued property.
  bool list_value = false;
};

/// Hierarchical attributed relational graph of one sample.
struct Harg {
  std::string sample_id;
  std::vector<HargNode> nodes;
  std::vector<HargEdge> edges;

  const HargNode& root() const { return nodes.front(); }
  std::size_t entity_count() const;
};

/// Entity-with-property-in-leaf vertex: an entity (or ROOT) bundled with the
/// values on its leaf children.
struct EplVertex {
  int id = 0;
  std::string entity_type;
  int level = 0;
  PropertyMap props;
  std::optional<int> parent;
  std::vector<std::string> adjacent_edge_labels;
  /// HARG node this vertex condenses.
  int node = 0;
};

struct EplGraph {
  std::string sample_id;
  std::vector<EplVertex> vertices;
  int root = 0;

  std::size_t size() const { return vertices.size(); }
};

Harg construct_harg(const PropertyRecord& record);
EplGraph discover_eplv(const Harg& g);

/// Deterministic dump used for golden files: {"sample_id", "nodes", "edges"}.
nlohmann::ordered_json harg_to_json(const Harg& g);
std::string harg_to_dot(const Harg& g);

}  // namespace femmir
