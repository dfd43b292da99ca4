#include <cmath>

#include "doctest.h"
#include "femmir/ced.hpp"
#include "femmir/harg.hpp"
#include "femmir/munkres.hpp"
#include "femmir/retrieval.hpp"
#include "femmir/util.hpp"
#include "test_support.hpp"

using namespace femmir;

namespace {

EplGraph epl_of(const PropertyRecord& r) { return discover_eplv(construct_harg(r)); }

std::vector<double> random_matrix(Rng& rng, int rows, int cols, double inf_rate) {
  std::vector<double> cells(static_cast<std::size_t>(rows) * cols);
  for (auto& c : cells) {
    c = rng.uniform() < inf_rate ? oracle::kInf : static_cast<double>(rng.index(20));
  }
  return cells;
}

EplVertex vertex(const std::string& type, std::map<std::string, std::string> props,
                 std::vector<std::string> labels) {
  EplVertex v;
  v.entity_type = type;
  v.level = 1;
  for (const auto& [k, val] : props) v.props[k] = PropertyValue::scalar(val);
  v.adjacent_edge_labels = std::move(labels);
  return v;
}

}  // namespace

TEST_CASE("assignment matches exhaustive search") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + static_cast<int>(rng.index(6));
    const int cols = rows + static_cast<int>(rng.index(7 - rows + 1));
    const auto cells = random_matrix(rng, rows, cols, trial % 3 == 0 ? 0.3 : 0.0);
    const auto a = solve_assignment(rows, cols, cells);
    const double best = oracle::brute_force_assignment(rows, cols, cells);
    CHECK(a.feasible == std::isfinite(best));
    if (std::isfinite(best)) {
      CHECK(a.total == best);
      double sum = 0.0;
      std::set<int> used;
      for (int i = 0; i < rows; ++i) {
        sum += cells[static_cast<std::size_t>(i) * cols + a.row_to_col[i]];
        used.insert(a.row_to_col[i]);
      }
      CHECK(sum == a.total);
      CHECK(used.size() == static_cast<std::size_t>(rows));
    }
  }
}

TEST_CASE("assignment edge cases") {
  const std::vector<double> one{0.0};
  CHECK(solve_assignment(1, 1, one).total == 0.0);
  const std::vector<double> all_inf{oracle::kInf, oracle::kInf};
  CHECK_FALSE(solve_assignment(1, 2, all_inf).feasible);
  const std::vector<double> toy{7, 6, 6, 3};
  const auto a = solve_assignment(2, 2, toy);
  CHECK(a.total == oracle::brute_force_assignment(2, 2, toy));
  CHECK(a.total == 10.0);
  CHECK(solve_assignment(0, 0, std::vector<double>{}).total == 0.0);
  CHECK_THROWS(solve_assignment(2, 1, std::vector<double>{1, 2}));
}

TEST_CASE("ordered list distance") {
  using V = std::vector<std::string>;
  CHECK(list_edit_distance(V{"a", "b"}, V{"a", "b"}, 1, 1) == 0.0);
  CHECK(list_edit_distance(V{"blue", "shirt"}, V{"red", "shirt"}, 1, 1) == 1.0);
  CHECK(list_edit_distance(V{"a", "b", "c"}, V{"b", "c"}, 1, 1) == 1.0);
  Rng rng(17);
  const V alphabet{"a", "b", "c"};
  for (int trial = 0; trial < 400; ++trial) {
    V q, c;
    for (std::size_t i = rng.index(5); i > 0; --i) q.push_back(alphabet[rng.index(3)]);
    for (std::size_t i = rng.index(5); i > 0; --i) c.push_back(alphabet[rng.index(3)]);
    const double r = 0.5 + static_cast<double>(rng.index(4));
    const double ins = 0.5 + static_cast<double>(rng.index(4));
    CHECK(list_edit_distance(q, c, r, ins) ==
          doctest::Approx(oracle::brute_force_list_distance(q, c, r, ins)));
  }
}

TEST_CASE("unordered list comparison") {
  using V = std::vector<std::string>;
  CHECK(hash_compare(V{"shirt", "jeans"}, V{"jeans", "shirt"}, 1) == 0.0);
  CHECK(hash_compare(V{"shirt", "jeans"}, V{"shirt"}, 1) == 1.0);
  CHECK(hash_compare(V{"a", "a", "b"}, V{"a", "b"}, 2) == 2.0);
  Rng rng(23);
  const V alphabet{"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    V q, c;
    for (std::size_t i = rng.index(6); i > 0; --i) q.push_back(alphabet[rng.index(4)]);
    for (std::size_t i = rng.index(6); i > 0; --i) c.push_back(alphabet[rng.index(4)]);
    CHECK(hash_compare(q, c, 1.5) == oracle::multiset_difference(q, c, 1.5));
  }
}

TEST_CASE("vertex costs") {
  const auto& t = bundled_taxonomy();
  const auto cfg = person_search_costs();
  const auto p = vertex("Person", {{"gender", "male"}}, {"hasEntity"});
  CHECK(eplv_cost(p, p, cfg, t) == 0.0);
  const auto c = vertex("Clothes", {{"type", "shirt"}}, {"wear"});
  CHECK(std::isinf(eplv_cost(p, c, cfg, t)));

  const auto u = vertex("Color", {}, {"upper-wear-color"});
  const auto v = vertex("Color", {}, {"shirt-color"});
  CHECK(edge_label_cost("upper-wear-color", "shirt-color", cfg, t) == doctest::Approx(1.5));
  CHECK(eplv_cost(u, v, cfg, t) == doctest::Approx(1.5));
  CHECK(edge_label_cost("wear", "wear", cfg, t) == 0.0);
  CostConfig literal = cfg;
  literal.exact_edge_match_zero = false;
  CHECK(edge_label_cost("wear", "wear", literal, t) == 1.0);
  // labels outside the taxonomy
  CHECK(edge_label_cost("zzz", "yyy", cfg, t) == cfg.edge_icost);
  CHECK(edge_set_cost(std::vector<std::string>{"wear"}, std::vector<std::string>{}, cfg, t) ==
        cfg.edge_icost);
}

TEST_CASE("missing and extra properties") {
  const auto& t = bundled_taxonomy();
  CostConfig cfg;
  cfg.icost["race"] = 4.0;
  cfg.rcost["gender"] = 3.0;
  const auto q = vertex("Person", {{"gender", "male"}, {"race", "asian"}}, {"hasEntity"});
  const auto c = vertex("Person", {{"gender", "male"}, {"height", "tall"}}, {"hasEntity"});
  CHECK(eplv_cost(q, c, cfg, t) == 4.0);
  // surplus candidate content is free
  CHECK(eplv_cost(c, vertex("Person", {{"gender", "male"}, {"height", "tall"}, {"race", "x"}},
                            {"hasEntity"}),
                  cfg, t) == 0.0);
  // inserting a vertex inserts its properties and its incoming edge
  CHECK(insertion_cost(q, cfg) == 1.0 + 4.0 + cfg.edge_icost);
}

TEST_CASE("cost matrix shape") {
  const auto& t = bundled_taxonomy();
  const auto cfg = person_search_costs();
  SynthConfig sc;
  sc.clothes = true;
  sc.n = 20;
  for (const auto& r : synth_corpus(sc)) {
    const auto g = epl_of(r);
    const auto m = build_cost_matrix(g, g, cfg, t);
    REQUIRE(m.rows == static_cast<int>(g.size()));
    REQUIRE(m.cols == static_cast<int>(g.size()));
    for (int i = 0; i < m.rows; ++i) CHECK(m.at(i, i) == 0.0);
  }
  const auto three = parse_record(R"({"id":"a","modality":"text","entities":[
    {"id":"p","entity_type":"Person","primary":true,"attrs":{"gender":"male"}},
    {"id":"q","entity_type":"Person","primary":true,"attrs":{"gender":"female"}}]})");
  const auto two = oracle::person("b", {{"gender", "male"}});
  const auto m = build_cost_matrix(epl_of(three), epl_of(two), cfg, t);
  CHECK(m.rows == 3);
  CHECK(m.cols == 3);
  CHECK(m.synthetic(2));
  CHECK_FALSE(m.synthetic(1));
}

TEST_CASE("cumulative adjustment") {
  CostMatrix zero;
  zero.rows = zero.cols = 2;
  zero.cells = {0, 0, 0, 0};
  zero.row_map = {0, 1};
  zero.col_map = {0, 1};
  EplGraph g;
  g.vertices.resize(2);
  g.vertices[0].id = 0;
  g.vertices[1].id = 1;
  g.vertices[1].parent = 0;
  g.vertices[1].level = 1;
  const auto same = apply_cumulative(zero, g, g);
  CHECK(same.cells == zero.cells);

  CostMatrix flat = zero;
  flat.cells = {0, 4, 5, 2};
  CHECK(apply_cumulative(flat, g, g).cells == flat.cells);
}

TEST_CASE("ced identity and hand-traced mismatches") {
  const auto& t = bundled_taxonomy();
  const auto cfg = person_search_costs();
  const auto q = epl_of(oracle::person("q", {{"gender", "male"}, {"top-color", "blue"},
                                             {"bottom-color", "black"}}));
  const auto self = ced(q, q, cfg, t);
  CHECK(self.ced == 0.0);
  CHECK(self.nced == 0.0);
  CHECK(self.sim == 1.0);

  const auto top = ced(q,
                       epl_of(oracle::person("c", {{"gender", "male"}, {"top-color", "red"},
                                                   {"bottom-color", "black"}})),
                       cfg, t);
  CHECK(top.ced == 1.0);
  CHECK(q.size() == 2);
  CHECK(top.nced == 0.5);
  CHECK(top.sim == doctest::Approx(0.6065306597).epsilon(1e-9));

  const auto gender = ced(q,
                          epl_of(oracle::person("c", {{"gender", "female"}, {"top-color", "blue"},
                                                      {"bottom-color", "black"}})),
                          cfg, t);
  CHECK(gender.ced == 3.0);
  CHECK_FALSE(relevant(gender, cfg));
  CHECK(relevant(top, cfg));
}

TEST_CASE("ced is query-directed") {
  const auto& t = bundled_taxonomy();
  const auto cfg = person_search_costs();
  const auto small = epl_of(oracle::person("a", {{"gender", "male"}}));
  const auto large = epl_of(oracle::person("b", {{"gender", "male"}, {"race", "asian"}}));
  CHECK(ced(small, large, cfg, t).ced == 0.0);
  CHECK(ced(large, small, cfg, t).ced == 1.0);
}

TEST_CASE("infeasible pair") {
  const auto& t = bundled_taxonomy();
  const auto q = epl_of(oracle::person("a", {{"gender", "male"}}));
  auto other = oracle::person("b", {{"gender", "male"}});
  other.entities[0].entity_type = "Vehicle";
  const auto label = ced(q, epl_of(other), CostConfig{}, t);
  CHECK_FALSE(label.feasible);
  CHECK(std::isinf(label.ced));
  CHECK(label.sim == 0.0);
  // with an extra candidate vertex nothing changes: types still never match
  auto wider = other;
  wider.entities.push_back(other.entities[0]);
  wider.entities.back().id = "v2";
  CHECK_FALSE(ced(q, epl_of(wider), CostConfig{}, t).feasible);
  // a smaller candidate leaves a padding column the Person row can take
  const auto root_only = epl_of(parse_record(R"({"id":"e","modality":"text"})"));
  const auto padded = ced(q, root_only, CostConfig{}, t);
  CHECK(padded.feasible);
  CHECK(padded.ced == 1.0 + 1.0);
}

TEST_CASE("adding a mismatched property raises ced by its rcost") {
  const auto& t = bundled_taxonomy();
  CostConfig cfg = person_search_costs();
  cfg.rcost["race"] = 2.5;
  Rng rng(3);
  const std::vector<std::string> colors{"red", "blue", "green", "black"};
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, std::string> qa{{"gender", "male"},
                                          {"top-color", colors[rng.index(4)]}};
    std::map<std::string, std::string> ca{{"gender", "male"},
                                          {"top-color", colors[rng.index(4)]}};
    const double before =
        ced(epl_of(oracle::person("q", qa)), epl_of(oracle::person("c", ca)), cfg, t).ced;
    qa["race"] = "asian";
    ca["race"] = "white";
    const double after =
        ced(epl_of(oracle::person("q", qa)), epl_of(oracle::person("c", ca)), cfg, t).ced;
    CHECK(after - before == doctest::Approx(2.5));
  }
}

TEST_CASE("metadata participates unless excluded") {
  const auto& t = bundled_taxonomy();
  auto a = oracle::person("a", {{"gender", "male"}});
  auto b = a;
  a.metadata["location"] = PropertyValue::scalar("north");
  b.metadata["location"] = PropertyValue::scalar("south");
  CostConfig cfg;
  CHECK(ced(epl_of(a), epl_of(b), cfg, t).ced == 1.0);
  cfg.include_metadata = false;
  CHECK(ced(epl_of(a), epl_of(b), cfg, t).ced == 0.0);
}
