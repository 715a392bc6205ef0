"""JSON model documents and clause files.

A model document is a JSON object with a ``kind`` and ``M`` plus a payload::

    {"kind": "point", "M": 2, "probs": [0.9, 0.1]}
    {"kind": "interval", "M": 2, "lower": [0.85, 0.05], "upper": [0.95, 0.15]}
    {"kind": "ds", "M": 2, "masses": [{"subset": [1], "mass": 0.85}, ...]}

Likelihood files use ``{"kind": "likelihoods", "M": 2, "lower": [[...]],
"upper": [[...]]}`` or ``"values"`` for exact likelihoods.  A file may also
hold a JSON list of documents.  Every document accepts an optional ``label``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    EPS,
    IntervalDistribution,
    LikelihoodMatrix,
    MassFunction,
    PointDistribution,
    outcomes_of,
    require_valid_interval,
)
from .errors import CredalError, ParseError
from .sat import SatInstance

MODEL_KINDS = ("point", "interval", "ds")


@dataclass(frozen=True)
class ModelDocument:
    """A parsed model together with its optional label."""

    kind: str
    model: object
    label: str | None = None

    @property
    def M(self) -> int:
        return self.model.M


def _kind_of(model) -> str:
    if isinstance(model, PointDistribution):
        return "point"
    if isinstance(model, IntervalDistribution):
        return "interval"
    if isinstance(model, MassFunction):
        return "ds"
    if isinstance(model, LikelihoodMatrix):
        return "likelihoods"
    raise TypeError(f"cannot serialise {type(model).__name__}")


def _floats(values) -> list:
    return np.asarray(values, dtype=float).tolist()


def model_to_dict(model, label: str | None = None) -> dict:
    """Serialise a model; subsets become sorted 1-based outcome lists."""
    kind = _kind_of(model)
    doc: dict = {"kind": kind, "M": int(model.M)}
    if label is not None:
        doc["label"] = label
    if kind == "point":
        doc["probs"] = _floats(model.probs)
    elif kind == "ds":
        doc["masses"] = [{"subset": list(outcomes_of(k)), "mass": float(v)} for k, v in model.masses.items()]
    else:
        doc["lower"] = _floats(model.lower)
        doc["upper"] = _floats(model.upper)
    return doc


def _require(doc: dict, key: str):
    if key not in doc:
        raise ParseError(f"{doc.get('kind', 'model')} document is missing {key!r}")
    return doc[key]


def model_from_dict(doc: dict, eps: float = EPS):
    """Build and validate the model described by ``doc``."""
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object")
    kind = _require(doc, "kind")
    M = _require(doc, "M")
    if not isinstance(M, int) or isinstance(M, bool):
        raise ParseError(f"M must be an integer, got {M!r}")
    if kind == "point":
        model = PointDistribution(_require(doc, "probs"), eps)
    elif kind == "interval":
        model = require_valid_interval(IntervalDistribution(_require(doc, "lower"), _require(doc, "upper")), eps)
    elif kind == "ds":
        items = []
        for entry in _require(doc, "masses"):
            if not isinstance(entry, dict) or "subset" not in entry or "mass" not in entry:
                raise ParseError("each ds mass entry needs 'subset' and 'mass'")
            items.append((tuple(entry["subset"]), entry["mass"]))
        model = MassFunction.from_subsets(items, M, eps)
    elif kind == "likelihoods":
        if "values" in doc:
            model = LikelihoodMatrix.from_points(doc["values"])
        else:
            model = LikelihoodMatrix(_require(doc, "lower"), _require(doc, "upper"))
    else:
        raise ParseError(f"unknown kind {kind!r}")
    if model.M != M:
        raise ParseError(f"document says M={M} but its payload has {model.M} outcomes")
    return model


def parse_documents(text: str, path=None, eps: float = EPS) -> list[ModelDocument]:
    """Parse one document or a list of documents from JSON text."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno) from exc
    items = raw if isinstance(raw, list) else [raw]
    if not items:
        raise ParseError("file holds no documents", path)
    docs = []
    for k, item in enumerate(items):
        try:
            model = model_from_dict(item, eps)
        except CredalError as exc:
            where = f"document {k + 1}: " if len(items) > 1 else ""
            raise ParseError(where + str(exc), path) from exc
        docs.append(ModelDocument(item["kind"], model, item.get("label")))
    return docs


def load_documents(path, eps: float = EPS) -> list[ModelDocument]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(exc.strerror or str(exc), path) from exc
    return parse_documents(text, path, eps)


def load_models(paths, kind: str | None = None, eps: float = EPS) -> list:
    """Load every document from ``paths`` and check they share ``kind`` and ``M``."""
    out = []
    for path in paths:
        for doc in load_documents(path, eps):
            if kind is not None and doc.kind != kind:
                raise ParseError(f"expected a {kind} document, found {doc.kind}", path)
            if out and doc.M != out[0].M:
                raise ParseError(f"M={doc.M} does not match M={out[0].M} of earlier inputs", path)
            out.append(doc.model)
    return out


def dumps_model(model, label: str | None = None, extra: dict | None = None) -> str:
    """Deterministic JSON text for a model document."""
    doc = model_to_dict(model, label)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# clause files


def parse_clauses(text: str, path=None) -> SatInstance:
    """Parse DIMACS-style clauses.

    ``c`` lines are comments, an optional ``p cnf n m`` header fixes the
    counts, and each clause is a list of signed literals ended by ``0``.  A
    clause may span lines; a lone ``0`` is the empty clause.
    """
    n_declared = m_declared = None
    clauses: list[list[int]] = []
    current: list[int] = []
    last_line = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split()
        if not tokens or tokens[0] in ("c", "%"):
            continue
        if tokens[0] == "p":
            if len(tokens) != 4 or tokens[1] != "cnf" or clauses or current:
                raise ParseError("header must be 'p cnf <vars> <clauses>' before any clause", path, lineno)
            try:
                n_declared, m_declared = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise ParseError("header counts must be integers", path, lineno) from None
            continue
        for tok in tokens:
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", path, lineno) from None
            if lit == 0:
                if len({abs(v) for v in current}) != len(current):
                    raise ParseError("a variable may appear at most once per clause", path, lineno)
                clauses.append(current)
                current = []
            else:
                current.append(lit)
        last_line = lineno
    if current:
        raise ParseError("last clause is not terminated by 0", path, last_line)
    if not clauses:
        raise ParseError("no clauses found", path)
    n_used = max((abs(v) for c in clauses for v in c), default=1)
    n = n_declared if n_declared is not None else n_used
    if n_used > n:
        raise ParseError(f"literal uses variable {n_used} but header declares {n}", path)
    if m_declared is not None and m_declared != len(clauses):
        raise ParseError(f"header declares {m_declared} clauses, found {len(clauses)}", path)
    try:
        return SatInstance.from_literals(n, clauses)
    except CredalError as exc:
        raise ParseError(str(exc), path) from exc


def load_clauses(path) -> SatInstance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(exc.strerror or str(exc), path) from exc
    return parse_clauses(text, path)


def format_clauses(s: SatInstance) -> str:
    lines = [f"p cnf {s.n} {s.m}"]
    lines += [" ".join(str(v) for v in lits + [0]) for lits in s.literals()]
    return "\n".join(lines) + "\n"
