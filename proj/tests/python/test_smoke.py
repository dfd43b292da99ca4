import json
import math
import os

import pytest

import femmir

DATA = femmir.data_dir()


def person(rid, **attrs):
    attrs = {k.replace("_", "-"): v for k, v in attrs.items()}
    return {"id": rid, "modality": "text", "metadata": {},
            "entities": [{"id": "p1", "entity_type": "Person", "primary": True, "attrs": attrs}],
            "relations": []}


def penalties():
    return json.loads((DATA / "cost_person.json").read_text())


def test_taxonomy():
    t = femmir.default_taxonomy()
    assert len(t) > 150
    assert t.root == "entity"
    assert "garment" in t
    assert femmir.wpdist("red", "red", t) == 1.0
    assert femmir.wpdist("upper-wear-color", "shirt-color", t) == pytest.approx(2 / 3)
    mini = femmir.Taxonomy.from_edges([("color", "entity"), ("red", "color"), ("blue", "color")])
    assert mini.depth("red") == 3
    assert femmir.wpdist("red", "blue", mini) == pytest.approx(2 / 3)


def test_list_comparisons():
    assert femmir.list_edit_distance(["a", "b", "c"], ["b", "c"]) == 1.0
    assert femmir.hash_compare(["a", "a", "b"], ["a", "b"], 2.0) == 2.0


def test_assignment():
    cols, total, feasible = femmir.solve_assignment([[4, 1, 3], [2, 0, 5], [3, 2, 2]])
    assert feasible and total == 5.0
    assert sorted(cols) == [0, 1, 2]
    _, _, feasible = femmir.solve_assignment([[math.inf]])
    assert not feasible


def test_ced_hand_trace():
    q = person("q", gender="male", top_color="blue", bottom_color="black")
    top = person("c", gender="male", top_color="red", bottom_color="black")
    label = femmir.ced(q, top, penalties())
    assert label["ced"] == 1.0
    assert label["sim"] == pytest.approx(math.exp(-0.5), abs=1e-12)
    assert femmir.ced(q, q, penalties())["sim"] == 1.0


def test_records_and_graphs():
    rec = person("r", GENDER="male")
    norm = femmir.normalize_record(rec)
    assert "gender" in norm["entities"][0]["attrs"]
    g = femmir.harg(rec)
    assert g["nodes"][0]["label"] == "ROOT"
    with pytest.raises(ValueError):
        femmir.normalize_record({"id": "x", "modality": "audio"})


def test_query_and_labels():
    corpus = femmir.synth_corpus(seed=4, n=30)
    assert corpus == femmir.synth_corpus(seed=4, n=30)
    ranked = femmir.query(corpus, corpus[0], penalties())
    assert ranked[0][2] == 1.0
    assert len(ranked) == 30
    text_only = femmir.query(corpus, corpus[0], penalties(), target="text")
    assert all(m == "text" for _, m, _, _ in text_only)
    labels = femmir.weak_labels(corpus, penalties(), sample=5, threads=2)
    assert len(labels) == 150
    with pytest.raises(RuntimeError):
        femmir.query(corpus, {"id": "e", "modality": "text"})


def test_average_precision():
    assert femmir.average_precision(["a", "n", "b"], {"a", "b"}) == pytest.approx(0.8333333333)
    assert femmir.average_precision(["n"], set()) is None


def test_text_attributes():
    out = femmir.extract_attributes((DATA / "hart" / "e1.txt").read_text())
    assert out["gender"] == "male"
    assert out["race"] == "White"
    assert out["clothes"] == [("shirt", ["blue"]), ("jeans", ["black"])]
    assert out["record"]["entities"][0]["attrs"]["top-color"] == "blue"


def test_cli(tmp_path):
    corpus = tmp_path / "c.jsonl"
    code, _, _ = femmir.run_cli(["synth", "-n", "10", "--out", str(corpus)])
    assert code == 0
    assert len(corpus.read_text().splitlines()) == 10
    code, out, _ = femmir.run_cli(["label", "--corpus", str(corpus)])
    assert code == 0
    assert len(out.splitlines()) == 101
    code, _, err = femmir.run_cli(["label", "--corpus", str(tmp_path / "missing.jsonl")])
    assert code == 2 and err
    assert femmir.run_cli(["nonsense"])[0] == 1


def test_data_dir_env():
    assert os.environ.get("FEMMIR_DATA")
    assert (DATA / "taxonomy.tsv").is_file()
