#include <algorithm>
#include <set>

#include "doctest.h"
#include "femmir/harg.hpp"
#include "femmir/retrieval.hpp"
#include "test_support.hpp"

using namespace femmir;

namespace {

PropertyRecord figure_r1() {
  return parse_record(R"({"id":"R1","modality":"text","metadata":{},
    "entities":[
      {"id":"p1","entity_type":"Person","primary":true,"attrs":{"gender":"male","race":"white"}},
      {"id":"c1","entity_type":"Clothes","primary":false,"attrs":{"type":"shirt","color":"blue"}}],
    "relations":[{"name":"wear","subject":"p1","object":"c1"}]})");
}

const HargNode* entity_node(const Harg& g, const std::string& entity_id) {
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::kEntity && n.entity_id == entity_id) return &n;
  }
  return nullptr;
}

void check_structure(const Harg& g) {
  int roots = 0;
  for (const auto& n : g.nodes) roots += n.level == 0 && n.label == kRootLabel;
  CHECK(roots == 1);
  CHECK(g.nodes.front().kind == NodeKind::kRoot);
  for (const auto& e : g.edges) {
    const int diff = g.nodes[e.to].level - g.nodes[e.from].level;
    CHECK((diff == 0 || diff == 1));
    if (diff == 0) {
      CHECK(e.kind == EdgeKind::kRelation);
      CHECK(g.nodes[e.from].kind == NodeKind::kEntity);
      CHECK(g.nodes[e.to].kind == NodeKind::kEntity);
    }
  }
  // every node reachable from ROOT over edges
  std::set<int> seen{0};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : g.edges) {
      if (seen.count(e.from) && !seen.count(e.to)) {
        seen.insert(e.to);
        grew = true;
      }
    }
  }
  CHECK(seen.size() == g.nodes.size());
  for (const auto& n : g.nodes) {
    if (n.is_leaf) CHECK((n.kind == NodeKind::kValue || n.kind == NodeKind::kNull));
  }
}

}  // namespace

TEST_CASE("metadata-only record gives ROOT and one leaf") {
  const auto r = parse_record(R"({"id":"M","modality":"image","metadata":{"time":"t1"}})");
  const auto g = construct_harg(r);
  REQUIRE(g.nodes.size() == 2);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].label == "metadata:time");
  CHECK(g.nodes[1].label == "t1");
  CHECK(g.nodes[1].level == 1);
  CHECK(g.nodes[1].is_leaf);
}

TEST_CASE("empty record gives a ROOT-only graph") {
  const auto g = construct_harg(parse_record(R"({"id":"E","modality":"text"})"));
  CHECK(g.nodes.size() == 1);
  CHECK(g.edges.empty());
  const auto epl = discover_eplv(g);
  REQUIRE(epl.size() == 1);
  CHECK(epl.vertices[0].props.empty());
  CHECK(epl.vertices[0].entity_type == kRootLabel);
}

TEST_CASE("figure R1 places clothes one level below the person") {
  const auto g = construct_harg(figure_r1());
  check_structure(g);
  const auto* p = entity_node(g, "p1");
  const auto* c = entity_node(g, "c1");
  REQUIRE(p);
  REQUIRE(c);
  CHECK(p->level == 1);
  CHECK(c->level == 2);
  const auto wear = std::find_if(g.edges.begin(), g.edges.end(),
                                 [](const HargEdge& e) { return e.label == "wear"; });
  REQUIRE(wear != g.edges.end());
  CHECK(wear->from == p->id);
  CHECK(wear->to == c->id);
  int value_leaves = 0;
  for (const auto& n : g.nodes) value_leaves += n.kind == NodeKind::kValue;
  CHECK(value_leaves == 4);

  const auto epl = discover_eplv(g);
  REQUIRE(epl.size() == 3);
  CHECK(epl.vertices[0].entity_type == kRootLabel);
  CHECK(epl.vertices[1].entity_type == "Person");
  CHECK(epl.vertices[1].props.size() == 2);
  CHECK(epl.vertices[1].props.count("gender") == 1);
  CHECK(epl.vertices[1].props.count("race") == 1);
  CHECK(epl.vertices[2].entity_type == "Clothes");
  CHECK(epl.vertices[2].props.at("type") == PropertyValue::scalar("shirt"));
  CHECK(epl.vertices[2].props.at("color") == PropertyValue::scalar("blue"));
  CHECK(epl.vertices[2].parent == 1);
  CHECK(epl.vertices[1].parent == 0);
  CHECK(epl.vertices[2].adjacent_edge_labels == std::vector<std::string>{"wear"});
  CHECK(epl.vertices[1].adjacent_edge_labels ==
        std::vector<std::string>{kHasEntityLabel, "wear"});
}

TEST_CASE("declared-but-empty values become NULL leaves") {
  const auto r = parse_record(R"({"id":"R2","modality":"video",
    "entities":[
      {"id":"p1","entity_type":"Person","primary":true,"attrs":{"gender":"male"}},
      {"id":"c1","entity_type":"Clothes","attrs":{"type":"","color":"red"}},
      {"id":"m1","entity_type":"Motor-Vehicle","attrs":{"make":""}},
      {"id":"c2","entity_type":"Clothes","attrs":{"type":[]}}],
    "relations":[{"name":"wear","subject":"p1","object":"c1"},
                 {"name":"riding","subject":"p1","object":"m1"},
                 {"name":"wear","subject":"p1","object":"c2"}]})");
  const auto g = construct_harg(r);
  check_structure(g);
  int nulls = 0;
  for (const auto& n : g.nodes) nulls += n.kind == NodeKind::kNull && n.label == kNullLabel;
  CHECK(nulls == 3);
  const auto epl = discover_eplv(g);
  CHECK(epl.vertices[2].props.at("type").is_null());
}

TEST_CASE("relations between primaries stay on one level") {
  const auto r = parse_record(R"({"id":"P","modality":"image",
    "entities":[{"id":"a","entity_type":"Person","primary":true,"attrs":{}},
                {"id":"b","entity_type":"Person","primary":true,"attrs":{}}],
    "relations":[{"name":"talking-to","subject":"a","object":"b"}]})");
  const auto g = construct_harg(r);
  check_structure(g);
  CHECK(entity_node(g, "a")->level == 1);
  CHECK(entity_node(g, "b")->level == 1);
  const auto epl = discover_eplv(g);
  REQUIRE(epl.size() == 3);
  CHECK(epl.vertices[1].props.empty());
  CHECK(epl.vertices[2].adjacent_edge_labels ==
        std::vector<std::string>{kHasEntityLabel, "talking-to"});
}

TEST_CASE("unconnected secondary entity hangs off ROOT") {
  const auto r = parse_record(R"({"id":"O","modality":"image",
    "entities":[{"id":"v","entity_type":"Vehicle","primary":false,"attrs":{"color":"red"}}]})");
  const auto g = construct_harg(r);
  check_structure(g);
  CHECK(entity_node(g, "v")->level == 1);
}

TEST_CASE("graph invariants over synthetic records") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n = 30;
    cfg.clothes = true;
    for (const auto& r : synth_corpus(cfg)) {
      const auto g = construct_harg(r);
      check_structure(g);
      const auto epl = discover_eplv(g);
      CHECK(epl.size() == 1 + g.entity_count());
      CHECK(harg_to_json(construct_harg(r)) == harg_to_json(g));
      for (const auto& v : epl.vertices) {
        if (v.id == epl.root) continue;
        REQUIRE(v.parent.has_value());
        CHECK(epl.vertices[*v.parent].level == v.level - 1);
      }
    }
  }
}

TEST_CASE("node ids follow the canonical order") {
  const auto r = parse_record(R"({"id":"C","modality":"text","metadata":{"time":"t","location":"l"},
    "entities":[{"id":"p","entity_type":"Person","primary":true,"attrs":{"race":"asian","gender":"male"}}]})");
  const auto g = construct_harg(r);
  REQUIRE(g.nodes.size() == 6);
  CHECK(g.nodes[1].label == "l");
  CHECK(g.nodes[2].label == "t");
  CHECK(g.nodes[3].label == "Person");
  CHECK(g.nodes[4].label == "male");
  CHECK(g.nodes[5].label == "asian");
  CHECK(harg_to_dot(g).find("digraph") != std::string::npos);
}
