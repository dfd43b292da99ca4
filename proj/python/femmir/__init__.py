"""Python access to the femmir retrieval engine.

Records are plain dicts in the corpus JSON layout; they are passed to the
C++ core as JSON text.
"""

import json
import os
import pathlib

_PACKAGE_DATA = pathlib.Path(__file__).with_name("data")
if "FEMMIR_DATA" not in os.environ and _PACKAGE_DATA.is_dir():
    os.environ["FEMMIR_DATA"] = str(_PACKAGE_DATA)

from . import _core  # noqa: E402
from ._core import (  # noqa: E402,F401
    DataError,
    InfeasibleError,
    Taxonomy,
    UsageError,
    hash_compare,
    list_edit_distance,
    run_cli,
    solve_assignment,
    wpdist,
)

__all__ = [
    "DataError", "InfeasibleError", "Taxonomy", "UsageError", "average_precision",
    "ced", "data_dir", "default_taxonomy", "extract_attributes", "hash_compare",
    "harg", "list_edit_distance", "normalize_record", "query", "run_cli",
    "solve_assignment", "synth_corpus", "weak_labels", "wpdist",
]


def data_dir() -> pathlib.Path:
    return pathlib.Path(_core.default_data_dir())


def default_taxonomy() -> Taxonomy:
    return Taxonomy.load(data_dir() / "taxonomy.tsv")


def _dump(obj) -> str:
    return obj if isinstance(obj, str) else json.dumps(obj)


def _config(config) -> str:
    return "" if config is None else _dump(config)


def normalize_record(record) -> dict:
    return json.loads(_core.normalize_record(_dump(record)))


def harg(record) -> dict:
    return json.loads(_core.harg_json(_dump(record)))


def ced(query, candidate, config=None, taxonomy=None) -> dict:
    return _core.ced(_dump(query), _dump(candidate), _config(config),
                     taxonomy or default_taxonomy())


def synth_corpus(seed=1, n=100, clothes=False) -> list:
    return [json.loads(r) for r in _core.synth_corpus(seed, n, clothes)]


def weak_labels(records, config=None, taxonomy=None, sample=0, seed=1, threads=1) -> list:
    return _core.weak_labels([_dump(r) for r in records], _config(config),
                             taxonomy or default_taxonomy(), sample, seed, threads)


def query(records, example, config=None, taxonomy=None, target="all") -> list:
    return _core.query([_dump(r) for r in records], _dump(example), _config(config),
                       taxonomy or default_taxonomy(), target)


def average_precision(ranking, relevant, strict=False):
    return _core.average_precision(list(ranking), set(relevant), strict)


def extract_attributes(text, taxonomy=None, model="stacked-re-taxonomy", theta=None) -> dict:
    out = _core.extract_attributes(text, taxonomy or default_taxonomy(), model, theta)
    out["record"] = json.loads(out["record"])
    return out
