#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <set>
#include <sstream>

#include "femmir/ced.hpp"
#include "femmir/cli.hpp"
#include "femmir/errors.hpp"
#include "femmir/hart.hpp"
#include "femmir/retrieval.hpp"

namespace py = pybind11;
using namespace femmir;

namespace {

CostConfig costs_from(const std::string& config_json) {
  if (config_json.empty()) return {};
  return validate_cost_config(nlohmann::json::parse(config_json));
}

std::vector<PropertyRecord> records_from(const std::vector<std::string>& lines) {
  std::vector<PropertyRecord> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(parse_record(l));
  return out;
}

py::dict label_dict(const CedLabel& l) {
  py::dict d;
  d["query_id"] = l.query_id;
  d["cand_id"] = l.cand_id;
  d["ced"] = l.ced;
  d["nced"] = l.nced;
  d["sim"] = l.sim;
  d["feasible"] = l.feasible;
  d["assignment"] = l.assignment;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Content edit distance retrieval and text attribute extraction.";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  py::class_<Taxonomy>(m, "Taxonomy")
      .def_static("load", &Taxonomy::load, py::arg("path"))
      .def_static(
          "from_edges",
          [](const std::vector<std::pair<std::string, std::string>>& edges) {
            return Taxonomy::from_edges(edges);
          },
          py::arg("edges"))
      .def("__len__", &Taxonomy::size)
      .def("__contains__", &Taxonomy::contains)
      .def_property_readonly("root", &Taxonomy::root)
      .def("lookup", &Taxonomy::lookup)
      .def("depth", &Taxonomy::depth)
      .def("lcs", &Taxonomy::lcs)
      .def("is_a", &Taxonomy::is_a)
      .def("concepts", &Taxonomy::concepts);

  m.def("wpdist", [](const std::string& a, const std::string& b, const Taxonomy& t) {
    return wpdist(a, b, t);
  });
  m.def("list_edit_distance",
        [](const std::vector<std::string>& q, const std::vector<std::string>& c, double rcost,
           double icost) { return list_edit_distance(q, c, rcost, icost); },
        py::arg("query"), py::arg("candidate"), py::arg("rcost") = 1.0, py::arg("icost") = 1.0);
  m.def("hash_compare",
        [](const std::vector<std::string>& q, const std::vector<std::string>& c, double rcost) {
          return hash_compare(q, c, rcost);
        },
        py::arg("query"), py::arg("candidate"), py::arg("rcost") = 1.0);
  m.def(
      "solve_assignment",
      [](const std::vector<std::vector<double>>& matrix) {
        const int rows = static_cast<int>(matrix.size());
        const int cols = rows ? static_cast<int>(matrix[0].size()) : 0;
        std::vector<double> cells;
        for (const auto& row : matrix) {
          if (static_cast<int>(row.size()) != cols) throw DataError("ragged cost matrix");
          cells.insert(cells.end(), row.begin(), row.end());
        }
        const auto a = solve_assignment(rows, cols, cells);
        return py::make_tuple(a.row_to_col, a.total, a.feasible);
      },
      py::arg("matrix"), "Minimum-cost assignment of every row to a distinct column.");

  m.def("normalize_record",
        [](const std::string& json_text) { return serialize_record(parse_record(json_text)); },
        py::arg("record_json"));
  m.def(
      "harg_json",
      [](const std::string& json_text) {
        return harg_to_json(construct_harg(parse_record(json_text))).dump();
      },
      py::arg("record_json"));

  m.def(
      "ced",
      [](const std::string& query_json, const std::string& cand_json,
         const std::string& config_json, const Taxonomy& t) {
        const auto cfg = costs_from(config_json);
        const auto q = discover_eplv(construct_harg(parse_record(query_json)));
        const auto c = discover_eplv(construct_harg(parse_record(cand_json)));
        return label_dict(ced(q, c, cfg, t));
      },
      py::arg("query_json"), py::arg("cand_json"), py::arg("config_json"), py::arg("taxonomy"));

  m.def(
      "synth_corpus",
      [](std::uint64_t seed, std::size_t n, bool clothes) {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.n = n;
        cfg.clothes = clothes;
        std::vector<std::string> out;
        for (const auto& r : synth_corpus(cfg)) out.push_back(serialize_record(r));
        return out;
      },
      py::arg("seed") = 1, py::arg("n") = 100, py::arg("clothes") = false);

  m.def(
      "weak_labels",
      [](const std::vector<std::string>& records, const std::string& config_json,
         const Taxonomy& t, std::size_t sample, std::uint64_t seed, unsigned threads) {
        const CorpusIndex idx(records_from(records));
        std::vector<CedLabel> labels;
        {
          py::gil_scoped_release release;
          labels = generate_weak_labels(idx, costs_from(config_json), t, {sample, seed, threads});
        }
        py::list out;
        for (const auto& l : labels) out.append(label_dict(l));
        return out;
      },
      py::arg("records"), py::arg("config_json"), py::arg("taxonomy"), py::arg("sample") = 0,
      py::arg("seed") = 1, py::arg("threads") = 1);

  m.def(
      "query",
      [](const std::vector<std::string>& records, const std::string& query_json,
         const std::string& config_json, const Taxonomy& t, const std::string& target) {
        const CorpusIndex idx(records_from(records));
        QueryOptions opts;
        opts.targets = parse_targets(target);
        const auto ranked = query(idx, parse_record(query_json), opts, costs_from(config_json), t);
        py::list out;
        for (const auto& e : ranked.entries) {
          out.append(py::make_tuple(e.id, std::string(to_string(e.modality)), e.sim,
                                    e.ced ? py::cast(*e.ced) : py::none()));
        }
        return out;
      },
      py::arg("records"), py::arg("query_json"), py::arg("config_json"), py::arg("taxonomy"),
      py::arg("target") = "all");

  m.def(
      "average_precision",
      [](const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
         bool strict) {
        RankedResult r;
        for (const auto& id : ranking) r.entries.push_back({id, Modality::kText, 0.0, {}});
        return average_precision(r, relevant, strict);
      },
      py::arg("ranking"), py::arg("relevant"), py::arg("strict") = false);

  m.def(
      "extract_attributes",
      [](const std::string& text, const Taxonomy& t, const std::string& model,
         std::optional<double> theta) {
        CandidateConfig cfg;
        cfg.model = parse_candidate_model(model);
        cfg.theta = theta;
        CandidateResources res;
        res.taxonomy = &t;
        const auto sentences = split_sentences(text);
        const auto out = extract_document(sentences, {}, cfg, res, "doc");
        py::dict d;
        d["candidates"] = out.candidates.sentences;
        d["gender"] = out.attributes.gender;
        d["race"] = out.attributes.race;
        d["height"] = out.attributes.height;
        py::list clothes;
        for (const auto& c : out.attributes.clothes) {
          clothes.append(py::make_tuple(c.name, c.descriptions));
        }
        d["clothes"] = clothes;
        d["record"] = serialize_record(out.record);
        return d;
      },
      py::arg("text"), py::arg("taxonomy"), py::arg("model") = "stacked-re-taxonomy",
      py::arg("theta") = py::none());

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one femir subcommand; returns (exit code, stdout, stderr).");

  m.def("default_data_dir", &data_dir);
}
