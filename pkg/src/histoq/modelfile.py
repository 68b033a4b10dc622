"""JSON model files for ``histoq classify``.

See docs/model-file.md for the schema.  Every error message names the
offending field with a JSON-path-like location; syntax errors report line
and column.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hilbert import (
    Hamiltonian,
    HilbertError,
    HistorySet,
    Projector,
    ProjectiveDecomposition,
    StateVector,
    Tolerances,
    chain_class_operator,
    full_chain_set,
    make_projector,
)


class ModelFileError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass(frozen=True, eq=False)
class Model:
    name: str
    state: StateVector
    hamiltonian: Hamiltonian
    histories: HistorySet
    tolerances: Tolerances | None


def _complex(v, where):
    if isinstance(v, bool):
        raise ModelFileError(where, "expected a number or [re, im] pair")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise ModelFileError(where, "expected a number or [re, im] pair")


def _vector(v, dim, where):
    if not isinstance(v, list):
        raise ModelFileError(where, "expected a list of complex entries")
    if dim is not None and len(v) != dim:
        raise ModelFileError(where, f"expected {dim} entries, got {len(v)}")
    return np.array([_complex(x, f"{where}[{i}]") for i, x in enumerate(v)])


def _matrix(m, dim, where):
    if not isinstance(m, list) or len(m) != dim:
        raise ModelFileError(where, f"expected a {dim}x{dim} matrix")
    return np.array([_vector(row, dim, f"{where}[{i}]") for i, row in enumerate(m)])


def _require(doc, key, where):
    if key not in doc:
        raise ModelFileError(where, f"missing required field {key!r}")
    return doc[key]


def _decomposition(spec, dim, where):
    if not isinstance(spec, dict):
        raise ModelFileError(where, "expected an object")
    name = _require(spec, "name", where)
    time = _require(spec, "time", where)
    if not isinstance(time, (int, float)) or isinstance(time, bool) or not math.isfinite(time):
        raise ModelFileError(f"{where}.time", "expected a finite number")
    entries = _require(spec, "projectors", where)
    if not isinstance(entries, list) or not entries:
        raise ModelFileError(f"{where}.projectors", "expected a non-empty list")
    labels = spec.get("labels") or [str(i) for i in range(len(entries))]
    if len(labels) != len(entries):
        raise ModelFileError(f"{where}.labels", f"{len(labels)} labels for {len(entries)} projectors")
    mats, complement = [], None
    for i, e in enumerate(entries):
        w = f"{where}.projectors[{i}]"
        if e == "complement":
            if complement is not None:
                raise ModelFileError(w, "only one complement entry allowed")
            complement = i
            mats.append(None)
            continue
        if not isinstance(e, dict) or "basis" not in e:
            raise ModelFileError(w, "expected {\"basis\": [...]} or \"complement\"")
        basis = e["basis"]
        if not isinstance(basis, list):
            raise ModelFileError(f"{w}.basis", "expected a list of vectors")
        vecs = [_vector(v, dim, f"{w}.basis[{j}]") for j, v in enumerate(basis)]
        try:
            mats.append(make_projector(vecs, dim).matrix)
        except HilbertError as exc:
            raise ModelFileError(f"{w}.basis", str(exc)) from None
    if complement is not None:
        mats[complement] = np.eye(dim) - sum(m for m in mats if m is not None)
    try:
        dec = ProjectiveDecomposition(tuple(Projector(m) for m in mats), tuple(labels))
    except HilbertError as exc:
        raise ModelFileError(where, str(exc)) from None
    return str(name), float(time), dec


def parse_model(doc) -> Model:
    if not isinstance(doc, dict):
        raise ModelFileError("", "top level must be an object")
    dim = _require(doc, "dimension", "")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ModelFileError("dimension", "expected a positive integer")
    raw = _vector(_require(doc, "state", ""), dim, "state")
    try:
        state = StateVector.normalized(raw) if doc.get("normalize", False) else StateVector(raw)
    except HilbertError as exc:
        raise ModelFileError("state", str(exc)) from None
    if "hamiltonian" in doc and doc["hamiltonian"] is not None:
        try:
            h = Hamiltonian(_matrix(doc["hamiltonian"], dim, "hamiltonian"))
        except HilbertError as exc:
            raise ModelFileError("hamiltonian", str(exc)) from None
    else:
        h = Hamiltonian.zero(dim)

    decs = _require(doc, "decompositions", "")
    if not isinstance(decs, list) or not decs:
        raise ModelFileError("decompositions", "expected a non-empty list")
    parsed = [_decomposition(d, dim, f"decompositions[{i}]") for i, d in enumerate(decs)]
    by_name = {}
    for i, (name, t, dec) in enumerate(parsed):
        if name in by_name:
            raise ModelFileError(f"decompositions[{i}].name", f"duplicate name {name!r}")
        by_name[name] = (t, dec)

    hist = doc.get("histories", "full")
    try:
        if hist == "full":
            ordered = sorted(parsed, key=lambda p: p[1])
            histories = full_chain_set([(dec, t) for _, t, dec in ordered], h)
        elif isinstance(hist, list):
            histories = _explicit_histories(hist, by_name, h)
        else:
            raise ModelFileError("histories", "expected \"full\" or a list of chains")
    except HilbertError as exc:
        raise ModelFileError("histories", str(exc)) from None

    tol = None
    if "tolerances" in doc:
        t = doc["tolerances"]
        if not isinstance(t, dict) or set(t) - {"md", "rlp", "lp"}:
            raise ModelFileError("tolerances", "expected an object with keys md, rlp, lp")
        tol = Tolerances(**{k: float(v) for k, v in t.items()})
    return Model(str(doc.get("name", "")), state, h, histories, tol)


def _explicit_histories(hist, by_name, h):
    members, labels = [], []
    for i, item in enumerate(hist):
        w = f"histories[{i}]"
        if not isinstance(item, dict):
            raise ModelFileError(w, "expected an object with a chain")
        chain = _require(item, "chain", w)
        if not isinstance(chain, list) or not chain:
            raise ModelFileError(f"{w}.chain", "expected a non-empty list of [name, label] pairs")
        steps = []
        for j, step in enumerate(chain):
            ws = f"{w}.chain[{j}]"
            if not (isinstance(step, list) and len(step) == 2):
                raise ModelFileError(ws, "expected [decomposition name, alternative label]")
            name, alt = step
            if name not in by_name:
                raise ModelFileError(ws, f"unknown decomposition {name!r}")
            t, dec = by_name[name]
            if alt not in dec.labels:
                raise ModelFileError(ws, f"{name!r} has no alternative {alt!r}")
            steps.append((dec, dec.labels.index(alt), t))
        steps.sort(key=lambda s: s[2])
        c = chain_class_operator(steps, h)
        members.append(c)
        labels.append(item.get("label", c.label))
    return HistorySet(tuple(members), tuple(labels))


def load_model(path) -> Model:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_model(doc)


def fixture_path(name: str) -> Path:
    """Path of a model file shipped with the package."""
    return Path(__file__).with_name("fixtures") / name
