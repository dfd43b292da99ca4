#include "femmir/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "femmir/errors.hpp"
#include "femmir/hart.hpp"
#include "femmir/retrieval.hpp"
#include "femmir/util.hpp"

#ifndef FEMMIR_DEFAULT_DATA_DIR
#define FEMMIR_DEFAULT_DATA_DIR "data"
#endif

namespace femmir {

namespace fs = std::filesystem;

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("FEMMIR_DATA"); env && *env) return env;
  return FEMMIR_DEFAULT_DATA_DIR;
}

namespace {

// Options shared by several subcommands.
struct Common {
  std::string config;
  std::string taxonomy;
  std::string embeddings;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string variant;
  double threshold = -1.0;
  bool exclude_metadata = false;
  std::string out;

  unsigned thread_count() const { return threads == 0 ? default_thread_count() : threads; }

  CostConfig costs() const {
    CostConfig cfg;
    if (!config.empty()) cfg = load_cost_config(config);
    if (!variant.empty()) {
      const std::string v = to_lower(variant);
      if (v == "adjacency") {
        cfg.munkres_variant = MunkresVariant::kAdjacency;
      } else if (v == "cumulative") {
        cfg.munkres_variant = MunkresVariant::kCumulative;
      } else {
        throw UsageError("--variant must be adjacency or cumulative");
      }
    }
    if (threshold >= 0.0) cfg.relevance_ced_threshold = threshold;
    if (exclude_metadata) cfg.include_metadata = false;
    return cfg;
  }

  Taxonomy load_taxonomy() const {
    return Taxonomy::load(taxonomy.empty() ? data_dir() / "taxonomy.tsv" : fs::path(taxonomy));
  }

  EmbeddingStore load_embeddings() const {
    return EmbeddingStore::load(embeddings.empty() ? data_dir() / "embeddings.txt"
                                                   : fs::path(embeddings));
  }
};

void add_config_options(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Cost configuration JSON (flags override it)");
  app->add_option("--taxonomy", c.taxonomy, "Taxonomy TSV (child<TAB>parent)");
  app->add_option("--variant", c.variant, "Assignment variant: adjacency or cumulative");
  app->add_flag("--exclude-metadata", c.exclude_metadata,
                "Leave record metadata out of the distance");
}

void add_run_options(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for every random choice");
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

// Writes through --out when given, else to the command's output stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_ && !*file_) throw DataError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PropertyMap parse_props(const std::string& text) {
  PropertyMap props;
  for (const auto& part : split(text, ',')) {
    if (trim(part).empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("--props expects name=value pairs");
    const std::string name = normalize_property_name(part.substr(0, eq));
    const auto values = split(part.substr(eq + 1), '|');
    if (values.size() > 1) {
      std::vector<std::string> tokens;
      for (const auto& v : values) tokens.push_back(trim(v));
      props[name] = PropertyValue::list(std::move(tokens));
    } else {
      props[name] = PropertyValue::scalar(trim(values[0]));
    }
  }
  if (props.empty()) throw UsageError("--props is empty");
  return props;
}

std::string ranking_file_name(const std::string& query_id, const std::string& target) {
  return query_id + "__" + target + ".csv";
}

// ---------------------------------------------------------------------------

int cmd_synth(const Common& c, std::size_t n, const std::string& mix, bool clothes,
              int clusters, std::ostream& out) {
  SynthConfig cfg;
  cfg.seed = c.seed;
  cfg.n = n;
  if (!mix.empty()) cfg.mix = parse_mix(mix);
  cfg.clothes = clothes;
  if (clusters >= 0) cfg.clusters = static_cast<std::size_t>(clusters);
  Sink sink(c.out, out);
  write_corpus(sink.get(), synth_corpus(cfg));
  sink.close();
  return kExitOk;
}

int cmd_index(const Common& c, const std::string& corpus, const std::string& graphs,
              std::ostream& out) {
  const CorpusIndex idx = index_corpus(corpus);
  nlohmann::ordered_json summary;
  summary["records"] = idx.size();
  nlohmann::ordered_json by_modality = nlohmann::ordered_json::object();
  std::size_t vertices = 0, nodes = 0;
  for (auto m : kAllModalities) by_modality[std::string(to_string(m))] = idx.with_modality(m).size();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    vertices += idx.epl(i).size();
    nodes += idx.harg(i).nodes.size();
  }
  summary["modalities"] = by_modality;
  summary["harg_nodes"] = nodes;
  summary["epl_vertices"] = vertices;
  if (!graphs.empty()) {
    std::ofstream g(graphs, std::ios::binary);
    if (!g) throw DataError("cannot write '" + graphs + "'");
    for (std::size_t i = 0; i < idx.size(); ++i) g << harg_to_json(idx.harg(i)).dump() << '\n';
  }
  Sink sink(c.out, out);
  sink.get() << summary.dump(2) << '\n';
  sink.close();
  return kExitOk;
}

int cmd_label(const Common& c, const std::string& corpus, std::size_t sample, std::ostream& out) {
  const CorpusIndex idx = index_corpus(corpus);
  const auto cfg = c.costs();
  const auto tax = c.load_taxonomy();
  LabelOptions opts;
  opts.sample = sample;
  opts.seed = c.seed;
  opts.threads = c.thread_count();
  const auto labels = generate_weak_labels(idx, cfg, tax, opts);
  Sink sink(c.out, out);
  write_labels_csv(sink.get(), labels);
  sink.close();
  return labels.empty() ? kExitEmpty : kExitOk;
}

struct TrainArgs {
  std::string corpus;
  std::string labels;
  std::string report;
  int epochs = 100;
  double lr = 0.01;
  int batch = 32;
  double holdout = 0.0;
};

int cmd_train(const Common& c, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  if (a.holdout < 0.0 || a.holdout >= 1.0) throw UsageError("--holdout must lie in [0, 1)");
  const CorpusIndex idx = index_corpus(a.corpus);
  std::ifstream lin(a.labels);
  if (!lin) throw DataError("cannot open '" + a.labels + "'");
  const auto labels = read_labels_csv(lin, a.labels);

  ScorerDims dims;
  std::vector<ScorerGraph> graphs;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    graphs.push_back(prepare_graph(idx.harg(i), dims.hash_dim));
  }

  // held-out queries are picked by seed from the sorted query ids
  std::set<std::string> query_ids;
  for (const auto& l : labels) query_ids.insert(l.query_id);
  std::vector<std::string> shuffled(query_ids.begin(), query_ids.end());
  Rng rng(c.seed);
  rng.shuffle(shuffled);
  const auto n_holdout = static_cast<std::size_t>(a.holdout * static_cast<double>(shuffled.size()));
  const std::set<std::string> held(shuffled.begin(), shuffled.begin() + n_holdout);

  std::vector<TrainingPair> train_pairs, test_pairs;
  for (const auto& l : labels) {
    const auto qi = idx.find(l.query_id);
    const auto ci = idx.find(l.cand_id);
    if (!qi || !ci) {
      throw DataError("label " + l.query_id + "," + l.cand_id + " names a record not in corpus");
    }
    (held.count(l.query_id) ? test_pairs : train_pairs).push_back({*qi, *ci, l.sim});
  }
  if (train_pairs.empty()) {
    err << "train: no training pairs\n";
    return kExitEmpty;
  }

  TrainConfig tc;
  tc.learning_rate = a.lr;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch;
  tc.seed = c.seed;
  if (!(tc.learning_rate > 0.0)) throw UsageError("--lr must be > 0");
  TrainReport report;
  const ScorerModel model = train(graphs, train_pairs, tc, dims, &report);

  nlohmann::ordered_json summary;
  summary["train_pairs"] = train_pairs.size();
  summary["initial_mse"] = report.initial_loss;
  summary["final_mse"] = report.final_loss;
  if (!test_pairs.empty()) {
    std::vector<double> predicted, target;
    for (const auto& p : test_pairs) {
      predicted.push_back(predict_similarity(graphs[p.query], graphs[p.candidate], model));
      target.push_back(p.sim);
    }
    summary["holdout_pairs"] = test_pairs.size();
    summary["holdout_mse"] = mean_loss(graphs, test_pairs, model);
    summary["holdout_spearman"] = spearman(predicted, target);
  }
  if (!a.report.empty()) {
    std::ofstream r(a.report, std::ios::binary);
    if (!r) throw DataError("cannot write '" + a.report + "'");
    r << summary.dump(2) << '\n';
  }
  err << "train: mse " << format_fixed(report.initial_loss) << " -> "
      << format_fixed(report.final_loss) << '\n';
  Sink sink(c.out, out);
  sink.get() << model_to_json(model).dump(1) << '\n';
  sink.close();
  return kExitOk;
}

struct QueryArgs {
  std::string corpus;
  std::string example;
  std::string props;
  std::string entity_type = "Person";
  std::string queries;
  std::string out_dir;
  std::string mode = "exact";
  std::string model;
  std::string target = "all";
  std::size_t top = 0;
};

int cmd_query(const Common& c, const QueryArgs& a, std::ostream& out, std::ostream& err) {
  const int sources = !a.example.empty() + !a.props.empty() + !a.queries.empty();
  if (sources != 1) throw UsageError("give exactly one of --example, --props, --queries");
  if (!a.queries.empty() && a.out_dir.empty()) throw UsageError("--queries needs --out-dir");

  const CorpusIndex idx = index_corpus(a.corpus);
  const auto cfg = c.costs();
  const auto tax = c.load_taxonomy();
  QueryOptions opts;
  opts.mode = parse_query_mode(a.mode);
  opts.targets = parse_targets(a.target);
  opts.threads = c.thread_count();
  opts.top_k = a.top;
  std::optional<ScorerModel> model;
  if (opts.mode == QueryMode::kLearned) {
    if (a.model.empty()) throw UsageError("--mode learned needs --model");
    model = load_model(a.model);
    opts.model = &*model;
  }

  std::vector<PropertyRecord> queries;
  if (!a.example.empty()) {
    queries.push_back(parse_record(read_file(a.example)));
  } else if (!a.props.empty()) {
    queries.push_back(record_from_properties(parse_props(a.props), a.entity_type));
  } else {
    queries = read_corpus(a.queries);
  }

  bool any_empty = false;
  if (!a.out_dir.empty()) fs::create_directories(a.out_dir);
  for (const auto& q : queries) {
    const auto ranked = query(idx, q, opts, cfg, tax);
    if (ranked.entries.empty()) {
      any_empty = true;
      err << "query " << q.id << ": no records in target '" << targets_name(opts.targets) << "'\n";
    }
    if (!a.out_dir.empty()) {
      const fs::path path = fs::path(a.out_dir) / ranking_file_name(q.id, targets_name(opts.targets));
      Sink sink(path.string(), out);
      write_ranking_csv(sink.get(), ranked);
      sink.close();
    } else {
      Sink sink(c.out, out);
      write_ranking_csv(sink.get(), ranked);
      sink.close();
    }
  }
  return any_empty ? kExitEmpty : kExitOk;
}

struct EvalArgs {
  std::string rankings;
  std::string relevance = "ced";
  std::string corpus;
  std::string queries;
  std::string pr_dir;
  bool strict = false;
};

int cmd_eval(const Common& c, const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (to_lower(a.relevance) != "ced") throw UsageError("--relevance supports only 'ced'");
  const auto cfg = c.costs();
  std::optional<CorpusIndex> idx;
  if (!a.corpus.empty()) idx = index_corpus(a.corpus);
  std::map<std::string, PropertyRecord> query_records;
  if (!a.queries.empty()) {
    for (auto& r : read_corpus(a.queries)) query_records.emplace(r.id, std::move(r));
  }
  std::optional<Taxonomy> tax;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.rankings)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    err << "eval: no ranking files in '" << a.rankings << "'\n";
    return kExitEmpty;
  }
  if (!a.pr_dir.empty()) fs::create_directories(a.pr_dir);

  struct Cell {
    double sum = 0.0;
    std::size_t queries = 0;
    std::size_t skipped = 0;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;
  for (const auto& file : files) {
    const std::string stem = file.stem().string();
    const auto sep = stem.rfind("__");
    if (sep == std::string::npos) {
      throw DataError(file.string() + ": file name must be <query id>__<target>.csv");
    }
    const std::string query_id = stem.substr(0, sep);
    const auto targets = parse_targets(stem.substr(sep + 2));
    std::ifstream in(file);
    auto ranked = read_ranking_csv(in, file.string());
    ranked.query_id = query_id;

    const PropertyRecord* q = nullptr;
    if (auto it = query_records.find(query_id); it != query_records.end()) {
      q = &it->second;
    } else if (idx) {
      if (auto pos = idx->find(query_id)) q = &idx->record(*pos);
    }
    const bool can_resolve = idx || !query_records.empty();
    if (!q && can_resolve) {
      throw DataError(file.string() + ": query '" + query_id + "' not found");
    }

    // relevance: CED below the threshold, computed over the whole target set
    // when the corpus is available, else read from the ranking's ced column
    std::set<std::string> rel;
    if (idx && q) {
      if (!tax) tax = c.load_taxonomy();
      const auto qg = discover_eplv(construct_harg(*q));
      for (std::size_t i = 0; i < idx->size(); ++i) {
        const auto& r = idx->record(i);
        if (!targets.empty() &&
            std::find(targets.begin(), targets.end(), r.modality) == targets.end()) {
          continue;
        }
        if (relevant(ced(qg, idx->epl(i), cfg, *tax), cfg)) rel.insert(r.id);
      }
    } else {
      for (const auto& e : ranked.entries) {
        if (!e.ced) throw DataError(file.string() + ": no ced column; pass --corpus");
        if (*e.ced < cfg.relevance_ced_threshold) rel.insert(e.id);
      }
    }

    // without query records the query modality is unknown
    const std::string query_modality = q ? std::string(to_string(q->modality)) : "unknown";
    auto& cell = cells[{query_modality, targets_name(targets)}];
    const auto ap = average_precision(ranked, rel, a.strict);
    if (!ap) {
      ++cell.skipped;
    } else {
      cell.sum += *ap;
      ++cell.queries;
    }
    if (!a.pr_dir.empty()) {
      std::ofstream pr(fs::path(a.pr_dir) / (stem + ".pr.csv"), std::ios::binary);
      pr << "rank,recall,precision\n";
      const auto curve = pr_curve(ranked, rel);
      for (std::size_t k = 0; k < curve.size(); ++k) {
        pr << k + 1 << ',' << format_fixed(curve[k].first) << ','
           << format_fixed(curve[k].second) << '\n';
      }
    }
  }

  nlohmann::ordered_json summary;
  summary["threshold"] = cfg.relevance_ced_threshold;
  summary["strict"] = a.strict;
  summary["results"] = nlohmann::ordered_json::array();
  bool any = false;
  for (const auto& [key, cell] : cells) {
    nlohmann::ordered_json row;
    row["query_modality"] = key.first;
    row["target_modality"] = key.second;
    if (cell.queries > 0) {
      row["map"] = std::stod(format_fixed(cell.sum / static_cast<double>(cell.queries)));
      any = true;
    } else {
      row["map"] = nullptr;
    }
    row["queries"] = cell.queries;
    row["skipped"] = cell.skipped;
    summary["results"].push_back(std::move(row));
  }
  Sink sink(c.out, out);
  sink.get() << summary.dump(2) << '\n';
  sink.close();
  return any ? kExitOk : kExitEmpty;
}

struct HartArgs {
  std::string input;
  std::string tagged;
  std::string model = "stacked-re-taxonomy";
  double theta = -1.0;
  std::string key_phrases;
  std::string scores;
  std::string id;
  std::string details;
};

int cmd_hart(const Common& c, const HartArgs& a, std::ostream& out, std::ostream& err) {
  if (a.input.empty() && a.tagged.empty()) throw UsageError("hart needs --input or --tagged");
  CandidateConfig cfg;
  cfg.model = parse_candidate_model(a.model);
  if (a.theta >= 0.0) cfg.theta = a.theta;
  if (!a.key_phrases.empty()) {
    cfg.key_phrases.clear();
    for (const auto& q : split(a.key_phrases, ',')) {
      if (!trim(q).empty()) cfg.key_phrases.push_back(trim(q));
    }
  }

  std::vector<TaggedSentence> tagged;
  if (!a.tagged.empty()) {
    std::ifstream in(a.tagged);
    if (!in) throw DataError("cannot open '" + a.tagged + "'");
    tagged = read_conll(in, a.tagged);
  }
  std::vector<std::string> sentences;
  if (!a.input.empty()) {
    sentences = split_sentences(read_file(a.input));
  } else {
    for (const auto& s : tagged) sentences.push_back(s.raw);
  }

  const Taxonomy tax = c.load_taxonomy();
  std::optional<EmbeddingStore> emb;
  std::vector<double> scores;
  CandidateResources res;
  res.taxonomy = &tax;
  if (cfg.model == CandidateModel::kEmbedding || cfg.model == CandidateModel::kStackedEmbedding) {
    emb = c.load_embeddings();
    res.embeddings = &*emb;
  }
  if (cfg.model == CandidateModel::kExternal) {
    if (a.scores.empty()) throw UsageError("--model external needs --scores");
    std::ifstream in(a.scores);
    if (!in) throw DataError("cannot open '" + a.scores + "'");
    scores = read_sentence_scores(in, a.scores);
    res.external_scores = &scores;
  }

  std::string id = a.id;
  if (id.empty()) id = fs::path(a.input.empty() ? a.tagged : a.input).stem().string();
  const auto result = extract_document(sentences, tagged, cfg, res, id);

  if (!a.details.empty()) {
    nlohmann::ordered_json d;
    d["id"] = id;
    d["model"] = to_string(cfg.model);
    d["theta"] = cfg.threshold();
    d["candidates"] = result.candidates.sentences;
    const auto& attrs = result.attributes;
    d["gender"] = attrs.gender ? nlohmann::ordered_json(*attrs.gender) : nullptr;
    d["race"] = attrs.race ? nlohmann::ordered_json(*attrs.race) : nullptr;
    d["height"] = attrs.height ? nlohmann::ordered_json(*attrs.height) : nullptr;
    d["clothes"] = nlohmann::ordered_json::array();
    for (const auto& m : attrs.clothes) {
      d["clothes"].push_back({{"name", m.name}, {"descriptions", m.descriptions}});
    }
    std::ofstream dout(a.details, std::ios::binary);
    if (!dout) throw DataError("cannot write '" + a.details + "'");
    dout << d.dump(2) << '\n';
  }
  if (result.candidates.empty()) {
    err << "hart: no candidate sentences\n";
    return kExitEmpty;
  }
  Sink sink(c.out, out);
  sink.get() << serialize_record(result.record) << '\n';
  sink.close();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-by-example retrieval over property graphs", "femir"};
  app.require_subcommand(1);
  Common c;

  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic corpus");
  std::size_t synth_n = 100;
  std::string synth_mix;
  bool synth_clothes = false;
  int synth_clusters = -1;
  synth->add_option("-n", synth_n, "Number of records")->check(CLI::PositiveNumber);
  synth->add_option("--mix", synth_mix, "Modality weights, e.g. text:0.3,image:0.4,video:0.3");
  synth->add_flag("--clothes", synth_clothes, "Add Clothes entities");
  synth->add_option("--clusters", synth_clusters, "Planted identical triples (default n/20)");
  synth->add_option("--out", c.out, "Output JSONL");
  add_run_options(synth, c);

  auto* index = app.add_subcommand("index", "Parse a corpus and report its graphs");
  std::string index_corpus_path, index_graphs;
  index->add_option("--corpus", index_corpus_path, "Corpus JSONL")->required();
  index->add_option("--graphs", index_graphs, "Write one graph JSON per line here");
  index->add_option("--out", c.out, "Summary JSON");

  auto* label = app.add_subcommand("label", "Weak labels for record pairs");
  std::string label_corpus;
  std::size_t label_sample = 0;
  label->add_option("--corpus", label_corpus, "Corpus JSONL")->required();
  label->add_option("--sample", label_sample, "Candidates per query (0 = all)");
  label->add_option("--out", c.out, "Labels CSV");
  add_config_options(label, c);
  add_run_options(label, c);

  auto* train_cmd = app.add_subcommand("train", "Fit the learned scorer to weak labels");
  TrainArgs ta;
  train_cmd->add_option("--corpus", ta.corpus, "Corpus JSONL")->required();
  train_cmd->add_option("--labels", ta.labels, "Labels CSV")->required();
  train_cmd->add_option("--epochs", ta.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--lr", ta.lr, "Learning rate");
  train_cmd->add_option("--batch", ta.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--holdout", ta.holdout, "Fraction of query ids held out");
  train_cmd->add_option("--report", ta.report, "Training summary JSON");
  train_cmd->add_option("--out", c.out, "Model JSON");
  add_run_options(train_cmd, c);

  auto* query_cmd = app.add_subcommand("query", "Rank the corpus against a query");
  QueryArgs qa;
  query_cmd->add_option("--corpus", qa.corpus, "Corpus JSONL")->required();
  query_cmd->add_option("--example", qa.example, "Query record JSON");
  query_cmd->add_option("--props", qa.props, "Query properties, e.g. gender=male,top-color=blue");
  query_cmd->add_option("--entity-type", qa.entity_type, "Entity type for --props");
  query_cmd->add_option("--queries", qa.queries, "Batch of query records (JSONL)");
  query_cmd->add_option("--out-dir", qa.out_dir, "One ranking CSV per query");
  query_cmd->add_option("--mode", qa.mode, "exact or learned");
  query_cmd->add_option("--model", qa.model, "Scorer model JSON (learned mode)");
  query_cmd->add_option("--target", qa.target, "all, or a comma-separated modality list");
  query_cmd->add_option("--top", qa.top, "Keep only the best k results");
  query_cmd->add_option("--out", c.out, "Ranking CSV");
  add_config_options(query_cmd, c);
  add_run_options(query_cmd, c);

  auto* eval = app.add_subcommand("eval", "Mean average precision of ranking files");
  EvalArgs ea;
  eval->add_option("--rankings", ea.rankings, "Directory of <query>__<target>.csv files")
      ->required();
  eval->add_option("--relevance", ea.relevance, "Relevance rule (ced)");
  eval->add_option("--threshold", c.threshold, "Relevant when CED is below this");
  eval->add_option("--corpus", ea.corpus, "Corpus JSONL");
  eval->add_option("--queries", ea.queries, "Query records JSONL");
  eval->add_option("--pr-dir", ea.pr_dir, "Write precision-recall CSVs here");
  eval->add_flag("--strict-map", ea.strict, "Divide by all relevant records");
  eval->add_option("--out", c.out, "Summary JSON");
  add_config_options(eval, c);

  auto* hart = app.add_subcommand("hart", "Extract person attributes from text");
  HartArgs ha;
  hart->add_option("--input", ha.input, "Plain-text document");
  hart->add_option("--tagged", ha.tagged, "Tagged sentences, token<TAB>tag per line");
  hart->add_option("--model", ha.model,
                   "re, embedding, taxonomy, stacked-re-embedding, stacked-re-taxonomy, external");
  hart->add_option("--theta", ha.theta, "Candidate threshold (model default when omitted)");
  hart->add_option("--key-phrases", ha.key_phrases, "Comma-separated key-phrases");
  hart->add_option("--scores", ha.scores, "Per-sentence scores for --model external");
  hart->add_option("--embeddings", c.embeddings, "Word vectors (text format)");
  hart->add_option("--taxonomy", c.taxonomy, "Taxonomy TSV");
  hart->add_option("--id", ha.id, "Record id (default: file stem)");
  hart->add_option("--details", ha.details, "Write the extracted attributes as JSON");
  hart->add_option("--out", c.out, "Record JSONL");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "femir: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(c, synth_n, synth_mix, synth_clothes, synth_clusters, out);
    if (index->parsed()) return cmd_index(c, index_corpus_path, index_graphs, out);
    if (label->parsed()) return cmd_label(c, label_corpus, label_sample, out);
    if (train_cmd->parsed()) return cmd_train(c, ta, out, err);
    if (query_cmd->parsed()) return cmd_query(c, qa, out, err);
    if (eval->parsed()) return cmd_eval(c, ea, out, err);
    if (hart->parsed()) return cmd_hart(c, ha, out, err);
  } catch (const UsageError& e) {
    err << "femir: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "femir: " << e.what() << '\n';
    return kExitEmpty;
  } catch (const DataError& e) {
    err << "femir: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "femir: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "femir: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace femmir
