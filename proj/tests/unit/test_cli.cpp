#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "femmir/cli.hpp"
#include "femmir/retrieval.hpp"
#include "test_support.hpp"

using namespace femmir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result femir(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("synth then label gives n squared rows") {
  const auto dir = scratch_dir("cli_label");
  const auto corpus = (dir / "c.jsonl").string();
  const auto labels = (dir / "labels.csv").string();
  REQUIRE(femir({"synth", "--seed", "1", "-n", "50", "--out", corpus}).code == kExitOk);
  CHECK(read_corpus(corpus).size() == 50);
  const auto r = femir({"label", "--corpus", corpus, "--config",
                        test_data("cost_person.json").string(), "--out", labels});
  CHECK(r.code == kExitOk);
  CHECK(line_count(slurp(labels)) == 1 + 50 * 50);
}

TEST_CASE("query, eval and index") {
  const auto dir = scratch_dir("cli_query");
  const auto corpus = (dir / "c.jsonl").string();
  REQUIRE(femir({"synth", "--seed", "2", "-n", "30", "--out", corpus}).code == kExitOk);
  const auto records = read_corpus(corpus);
  {
    std::ofstream q(dir / "q.json");
    q << serialize_record(records[3]);
  }
  const auto r = femir({"query", "--corpus", corpus, "--example", (dir / "q.json").string(),
                        "--mode", "exact", "--target", "all"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("rank,id,modality,sim,ced\n", 0) == 0);
  CHECK(line_count(r.out) == 31);

  const auto p = femir({"query", "--corpus", corpus, "--props",
                        "gender=male,top-color=blue,bottom-color=black", "--target", "text",
                        "--top", "3"});
  CHECK(p.code == kExitOk);
  CHECK(line_count(p.out) == 4);

  {
    std::ofstream qs(dir / "queries.jsonl");
    write_corpus(qs, {records[0], records[1], records[2]});
  }
  const auto rankings = (dir / "rankings").string();
  CHECK(femir({"query", "--corpus", corpus, "--queries", (dir / "queries.jsonl").string(),
               "--out-dir", rankings, "--config", test_data("cost_person.json").string()})
            .code == kExitOk);
  CHECK(std::filesystem::exists(dir / "rankings" / (records[0].id + "__all.csv")));

  const auto map_file = (dir / "map.json").string();
  const auto e = femir({"eval", "--rankings", rankings, "--relevance", "ced", "--threshold", "3",
                        "--corpus", corpus, "--config", test_data("cost_person.json").string(),
                        "--pr-dir", (dir / "pr").string(), "--out", map_file});
  CHECK(e.code == kExitOk);
  const auto summary = nlohmann::json::parse(slurp(map_file));
  double total = 0;
  for (const auto& row : summary["results"]) {
    CHECK(row["map"].get<double>() == 1.0);
    total += row["queries"].get<double>();
  }
  CHECK(total == 3);

  // without a corpus the ced column decides relevance
  const auto bare = femir({"eval", "--rankings", rankings, "--relevance", "ced", "--threshold",
                           "3", "--out", map_file});
  CHECK(bare.code == kExitOk);
  CHECK(nlohmann::json::parse(slurp(map_file))["results"][0]["query_modality"] == "unknown");

  const auto idx = femir({"index", "--corpus", corpus, "--graphs", (dir / "g.jsonl").string()});
  CHECK(idx.code == kExitOk);
  CHECK(nlohmann::json::parse(idx.out)["records"] == 30);
}

TEST_CASE("train then learned query") {
  const auto dir = scratch_dir("cli_train");
  const auto corpus = (dir / "c.jsonl").string();
  const auto labels = (dir / "l.csv").string();
  const auto model = (dir / "m.json").string();
  REQUIRE(femir({"synth", "--seed", "3", "-n", "20", "--out", corpus}).code == kExitOk);
  REQUIRE(femir({"label", "--corpus", corpus, "--sample", "5", "--out", labels}).code == kExitOk);
  const auto t = femir({"train", "--corpus", corpus, "--labels", labels, "--epochs", "3",
                        "--holdout", "0.25", "--report", (dir / "r.json").string(), "--out",
                        model});
  CHECK(t.code == kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir / "r.json"));
  CHECK(report.contains("holdout_spearman"));
  const auto q = femir({"query", "--corpus", corpus, "--props", "gender=female", "--mode",
                        "learned", "--model", model});
  CHECK(q.code == kExitOk);
  CHECK(line_count(q.out) == 21);
}

TEST_CASE("hart command") {
  const auto r = femir({"hart", "--input", test_data("hart/e1.txt").string(), "--tagged",
                        test_data("hart/e1.conll").string(), "--model", "stacked-re-taxonomy",
                        "--theta", "0.9"});
  CHECK(r.code == kExitOk);
  const auto rec = parse_record(r.out);
  CHECK(rec.id == "e1");
  CHECK(rec.entities.size() == 3);

  const auto dir = scratch_dir("cli_hart");
  {
    std::ofstream(dir / "none.txt") << "Nobody saw anything.";
  }
  CHECK(femir({"hart", "--input", (dir / "none.txt").string()}).code == kExitEmpty);
  CHECK(femir({"hart", "--input", (dir / "none.txt").string(), "--model", "nli"}).code ==
        kExitUsage);
  CHECK(femir({"hart", "--input", test_data("hart/e1.txt").string(), "--model", "embedding",
               "--embeddings", test_data("embeddings.txt").string()})
            .code == kExitOk);
}

TEST_CASE("exit codes") {
  CHECK(femir({}).code == kExitUsage);
  CHECK(femir({"bogus"}).code == kExitUsage);
  CHECK(femir({"--help"}).code == kExitOk);
  CHECK(femir({"synth", "-n", "0"}).code == kExitUsage);
  CHECK(femir({"label", "--corpus", "/nonexistent.jsonl"}).code == kExitData);

  const auto dir = scratch_dir("cli_codes");
  const auto corpus = (dir / "c.jsonl").string();
  REQUIRE(femir({"synth", "-n", "5", "--out", corpus}).code == kExitOk);
  CHECK(femir({"query", "--corpus", corpus}).code == kExitUsage);
  CHECK(femir({"query", "--corpus", corpus, "--props", "gender"}).code == kExitUsage);
  CHECK(femir({"query", "--corpus", corpus, "--props", "gender=male", "--mode", "learned"}).code ==
        kExitUsage);
  {
    std::ofstream(dir / "empty.json") << R"({"id":"q","modality":"text"})";
  }
  const auto empty = femir({"query", "--corpus", corpus, "--example", (dir / "empty.json").string()});
  CHECK(empty.code == kExitEmpty);
  CHECK_FALSE(empty.err.empty());
  {
    std::ofstream(dir / "bad.jsonl") << "{\"id\":1}\n";
  }
  const auto bad = femir({"index", "--corpus", (dir / "bad.jsonl").string()});
  CHECK(bad.code == kExitData);
  CHECK(bad.out.empty());
  {
    std::ofstream(dir / "neg.json") << R"({"rcost":{"gender":-1}})";
  }
  CHECK(femir({"label", "--corpus", corpus, "--config", (dir / "neg.json").string()}).code ==
        kExitData);
}

TEST_CASE("thread count does not change output") {
  const auto dir = scratch_dir("cli_threads");
  const auto corpus = (dir / "c.jsonl").string();
  REQUIRE(femir({"synth", "-n", "40", "--seed", "5", "--out", corpus}).code == kExitOk);
  const auto one = femir({"label", "--corpus", corpus, "--threads", "1"});
  const auto many = femir({"label", "--corpus", corpus, "--threads", "4"});
  CHECK(one.out == many.out);
}
