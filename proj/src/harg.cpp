#include "femmir/harg.hpp"

#include <deque>
#include <map>
#include <sstream>

namespace femmir {

std::size_t Harg::entity_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes) n += node.kind == NodeKind::kEntity;
  return n;
}

namespace {

struct Builder {
  Harg g;

  int add_node(int level, std::string label, NodeKind kind, int parent) {
    HargNode n;
    n.id = static_cast<int>(g.nodes.size());
    n.level = level;
    n.label = std::move(label);
    n.kind = kind;
    n.is_leaf = kind == NodeKind::kValue || kind == NodeKind::kNull;
    n.parent = parent;
    g.nodes.push_back(std::move(n));
    return g.nodes.back().id;
  }

  void add_edge(int from, int to, std::string label, EdgeKind kind, bool list_value = false) {
    g.edges.push_back({from, to, std::move(label), kind, list_value});
  }

  // One leaf per token; a NULL leaf for an empty value.
  void add_value_leaves(int owner, const std::string& edge_label, const PropertyValue& v,
                        EdgeKind kind) {
    const int level = g.nodes[owner].level + 1;
    if (v.is_null()) {
      int leaf = add_node(level, kNullLabel, NodeKind::kNull, owner);
      add_edge(owner, leaf, edge_label, kind, v.is_list());
      return;
    }
    for (const auto& token : v.tokens()) {
      int leaf = add_node(level, token, NodeKind::kValue, owner);
      add_edge(owner, leaf, edge_label, kind, v.is_list());
    }
  }
};

struct Placement {
  int level = 0;
  int parent = -1;  // entity index, -1 = ROOT
  bool placed = false;
};

// Primary entities sit at level 1. Everything else is placed by a
// breadth-first walk over relations from the primaries, one level below the
// entity that reaches it first. Entities no relation connects to a primary
// are hung off ROOT so every node stays reachable.
std::vector<Placement> place_entities(const PropertyRecord& r) {
  const std::size_t n = r.entities.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[r.entities[i].id] = i;

  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& rel : r.relations) {
    auto s = index.at(rel.subject);
    auto o = index.at(rel.object);
    adj[s].push_back(o);
    adj[o].push_back(s);
  }

  std::vector<Placement> out(n);
  std::deque<std::size_t> queue;
  auto seed = [&](std::size_t i) {
    out[i] = {1, -1, true};
    queue.push_back(i);
  };
  auto drain = [&] {
    while (!queue.empty()) {
      auto cur = queue.front();
      queue.pop_front();
      for (auto next : adj[cur]) {
        if (out[next].placed) continue;
        out[next] = {out[cur].level + 1, static_cast<int>(cur), true};
        queue.push_back(next);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (r.entities[i].primary) seed(i);
  }
  drain();
  for (std::size_t i = 0; i < n; ++i) {
    if (!out[i].placed) {
      seed(i);
      drain();
    }
  }
  return out;
}

}  // namespace

Harg construct_harg(const PropertyRecord& record) {
  Builder b;
  b.g.sample_id = record.id;
  const int root = b.add_node(0, kRootLabel, NodeKind::kRoot, -1);

  for (const auto& [name, value] : record.metadata) {
    b.add_value_leaves(root, "metadata:" + name, value, EdgeKind::kMetadata);
  }

  auto placement = place_entities(record);
  std::vector<int> entity_node(record.entities.size());
  for (std::size_t i = 0; i < record.entities.size(); ++i) {
    entity_node[i] = b.add_node(placement[i].level, record.entities[i].entity_type,
                                NodeKind::kEntity, -1);
    b.g.nodes[entity_node[i]].entity_id = record.entities[i].id;
  }
  for (std::size_t i = 0; i < record.entities.size(); ++i) {
    const auto& p = placement[i];
    auto& node = b.g.nodes[entity_node[i]];
    node.parent = p.parent < 0 ? root : entity_node[p.parent];
    if (p.parent < 0) b.add_edge(root, entity_node[i], kHasEntityLabel, EdgeKind::kHasEntity);
  }
  for (std::size_t i = 0; i < record.entities.size(); ++i) {
    for (const auto& [name, value] : record.entities[i].attrs) {
      b.add_value_leaves(entity_node[i], name, value, EdgeKind::kProperty);
    }
  }

  std::map<std::string, int> node_of;
  for (std::size_t i = 0; i < record.entities.size(); ++i) {
    node_of[record.entities[i].id] = entity_node[i];
  }
  for (const auto& rel : record.relations) {
    int from = node_of.at(rel.subject);
    int to = node_of.at(rel.object);
    // Hierarchy edges point downwards; a relation whose subject sits deeper
    // than its object is stored from the shallower end.
    if (b.g.nodes[from].level > b.g.nodes[to].level) std::swap(from, to);
    b.add_edge(from, to, rel.label(), EdgeKind::kRelation);
  }
  return std::move(b.g);
}

EplGraph discover_eplv(const Harg& g) {
  EplGraph out;
  out.sample_id = g.sample_id;

  std::vector<int> epl_of(g.nodes.size(), -1);
  for (const auto& node : g.nodes) {
    if (node.kind != NodeKind::kRoot && node.kind != NodeKind::kEntity) continue;
    EplVertex v;
    v.id = static_cast<int>(out.vertices.size());
    v.entity_type = node.label;
    v.level = node.level;
    v.node = node.id;
    epl_of[node.id] = v.id;
    out.vertices.push_back(std::move(v));
  }
  out.root = epl_of[0];

  for (auto& v : out.vertices) {
    const auto& node = g.nodes[v.node];
    if (node.parent >= 0) v.parent = epl_of[node.parent];
  }

  // Leaf values grouped by property; relation labels collected per vertex.
  std::vector<std::map<std::string, std::pair<bool, std::vector<std::string>>>> values(
      out.vertices.size());
  std::vector<std::vector<std::string>> other_labels(out.vertices.size());
  std::vector<std::string> incoming(out.vertices.size());
  std::vector<bool> has_incoming(out.vertices.size(), false);

  for (const auto& e : g.edges) {
    const auto& to = g.nodes[e.to];
    if (to.is_leaf) {
      int owner = epl_of[e.from];
      std::string prop = e.kind == EdgeKind::kMetadata ? e.label.substr(9) : e.label;
      auto& slot = values[owner][prop];
      slot.first = e.list_value;
      if (to.kind == NodeKind::kValue) slot.second.push_back(to.label);
      continue;
    }
    int from_v = epl_of[e.from];
    int to_v = epl_of[e.to];
    if (to.parent == e.from && !has_incoming[to_v]) {
      incoming[to_v] = e.label;
      has_incoming[to_v] = true;
      if (e.kind == EdgeKind::kRelation) other_labels[from_v].push_back(e.label);
      continue;
    }
    // relation edge that is not the tree edge into `to`
    other_labels[from_v].push_back(e.label);
    other_labels[to_v].push_back(e.label);
  }

  for (auto& v : out.vertices) {
    for (auto& [prop, slot] : values[v.id]) {
      v.props[prop] = slot.first ? PropertyValue::list(slot.second)
                                 : (slot.second.empty() ? PropertyValue::null_scalar()
                                                        : PropertyValue::scalar(slot.second[0]));
    }
    if (has_incoming[v.id]) v.adjacent_edge_labels.push_back(incoming[v.id]);
    for (auto& l : other_labels[v.id]) v.adjacent_edge_labels.push_back(l);
  }
  return out;
}

nlohmann::ordered_json harg_to_json(const Harg& g) {
  nlohmann::ordered_json j;
  j["sample_id"] = g.sample_id;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) {
    nlohmann::ordered_json nj;
    nj["id"] = n.id;
    nj["level"] = n.level;
    nj["label"] = n.label;
    nj["leaf"] = n.is_leaf;
    j["nodes"].push_back(std::move(nj));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    nlohmann::ordered_json ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["label"] = e.label;
    j["edges"].push_back(std::move(ej));
  }
  return j;
}

std::string harg_to_dot(const Harg& g) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << "digraph " << quote(g.sample_id) << " {\n";
  for (const auto& n : g.nodes) {
    os << "  n" << n.id << " [label=" << quote(n.label)
       << (n.is_leaf ? ", shape=box" : ", shape=ellipse") << "];\n";
  }
  for (const auto& e : g.edges) {
    os << "  n" << e.from << " -> n" << e.to << " [label=" << quote(e.label) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace femmir
