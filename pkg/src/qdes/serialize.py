"""JSON interchange format for every automaton kind.

One document per automaton, kind-discriminated, with complex numbers
encoded as [re, im] pairs.  Saving always emits the canonical form:
sorted keys, two-space indentation, floats printed with 17 significant
digits (which round-trips doubles exactly), numeric leaf lists inlined.
Loading validates the reconstructed automaton and refuses documents
whose invariants fail.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .blm import Rblm
from .linalg import Projector
from .models import Dfa, MmQfa, MoQfa, Qfac, validate

KINDS = ("dfa", "mo-qfa", "mm-qfa", "qfac", "rblm")


class SerializationError(ValueError):
    """Malformed document: missing or ill-typed fields."""


class ValidationFailedError(ValueError):
    """The document parsed but the automaton violates its invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def _fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        raise SerializationError(f"non-finite number {x!r} has no canonical form")
    if x == 0.0:
        return "0"  # normalize away negative zero
    return format(x, ".17g")


def _numeric_depth(v, depth=0):
    """Depth of a nested list whose leaves are all numbers; None otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return None
    if isinstance(v, (int, float, np.integer, np.floating)):
        return depth
    if isinstance(v, (list, tuple)):
        worst = depth
        for item in v:
            d = _numeric_depth(item, depth + 1)
            if d is None:
                return None
            worst = max(worst, d)
        return worst
    return None


def _emit(v: Any, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, float, np.integer, np.floating)):
        return _fmt_number(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        parts = [f"{inner}{json.dumps(str(k))}: {_emit(v[k], indent + 1)}" for k in sorted(v)]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        depth = _numeric_depth(v)
        if depth is not None and depth <= 2:
            return "[" + ", ".join(_emit(item, 0) for item in v) + "]"
        parts = [f"{inner}{_emit(item, indent + 1)}" for item in v]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    raise SerializationError(f"cannot serialize value of type {type(v).__name__}")


def canonical_json(doc: Any) -> str:
    """Deterministic JSON text for a document (trailing newline included)."""
    return _emit(doc, 0) + "\n"


def _cvec(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _cmat(m: np.ndarray) -> list:
    return [_cvec(row) for row in np.asarray(m, dtype=complex)]


def _parse_cvec(data, where: str) -> np.ndarray:
    try:
        return np.array([complex(re, im) for re, im in data], dtype=complex)
    except (TypeError, ValueError) as e:
        raise SerializationError(f"{where}: expected a list of [re, im] pairs ({e})")


def _parse_cmat(data, where: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise SerializationError(f"{where}: expected a non-empty list of rows")
    return np.array([_parse_cvec(row, where) for row in data], dtype=complex)


def to_document(automaton) -> dict:
    """Kind-discriminated plain-JSON representation of an automaton."""
    if isinstance(automaton, Dfa):
        d = automaton
        trans: dict[str, dict[str, str]] = {q: {} for q in d.states}
        for (q, a), nxt in d.transitions.items():
            trans[q][a] = nxt
        return {
            "kind": "dfa",
            "alphabet": list(d.alphabet),
            "states": list(d.states),
            "initial": d.initial,
            "accepting": sorted(d.accepting),
            "transitions": trans,
        }
    if isinstance(automaton, MoQfa):
        m = automaton
        return {
            "kind": "mo-qfa",
            "alphabet": list(m.alphabet),
            "dim": m.dim,
            "initial": _cvec(m.initial),
            "unitaries": {a: _cmat(u) for a, u in m.unitaries.items()},
            "accepting": list(m.accepting.indices),
            "rejecting": list(m.rejecting.indices),
        }
    if isinstance(automaton, MmQfa):
        m = automaton
        return {
            "kind": "mm-qfa",
            "alphabet": list(m.alphabet),
            "dim": m.dim,
            "initial": _cvec(m.initial),
            "unitaries": {a: _cmat(u) for a, u in m.unitaries.items()},
            "accepting": list(m.accepting.indices),
            "rejecting": list(m.rejecting.indices),
            "going": list(m.going.indices),
        }
    if isinstance(automaton, Qfac):
        m = automaton
        trans: dict[str, dict[str, str]] = {s: {} for s in m.classical_states}
        for (s, a), nxt in m.transitions.items():
            trans[s][a] = nxt
        unis: dict[str, dict[str, list]] = {s: {} for s in m.classical_states}
        for (s, a), u in m.unitaries.items():
            unis[s][a] = _cmat(u)
        return {
            "kind": "qfac",
            "alphabet": list(m.alphabet),
            "classical_states": list(m.classical_states),
            "initial_classical": m.initial_classical,
            "dim": m.dim,
            "initial_quantum": _cvec(m.initial_quantum),
            "transitions": trans,
            "unitaries": unis,
            "accepting": {s: list(p.indices) for s, p in m.accepting.items()},
        }
    if isinstance(automaton, Rblm):
        b = automaton
        return {
            "kind": "rblm",
            "alphabet": list(b.alphabet),
            "n": b.n,
            "pi": _cvec(b.pi),
            "matrices": {a: _cmat(mat) for a, mat in b.matrices.items()},
            "eta": _cvec(b.eta),
            "real_valued": bool(b.real_valued),
        }
    raise SerializationError(f"cannot serialize objects of type {type(automaton).__name__}")


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise SerializationError(f"{where}: missing field {key!r}")
    return doc[key]


def from_document(doc: dict):
    """Reconstruct an automaton from its document (no validation here)."""
    if not isinstance(doc, dict):
        raise SerializationError("document must be a JSON object")
    kind = _need(doc, "kind", "document")
    if kind == "dfa":
        states = tuple(_need(doc, "states", "dfa"))
        transitions = {}
        for q, row in _need(doc, "transitions", "dfa").items():
            for a, nxt in row.items():
                transitions[(q, a)] = nxt
        return Dfa(
            states=states,
            alphabet=tuple(_need(doc, "alphabet", "dfa")),
            transitions=transitions,
            initial=_need(doc, "initial", "dfa"),
            accepting=frozenset(_need(doc, "accepting", "dfa")),
        )
    if kind == "mo-qfa":
        dim = int(_need(doc, "dim", "mo-qfa"))
        return MoQfa(
            alphabet=tuple(_need(doc, "alphabet", "mo-qfa")),
            unitaries={
                a: _parse_cmat(u, f"unitary {a}") for a, u in _need(doc, "unitaries", "mo-qfa").items()
            },
            initial=_parse_cvec(_need(doc, "initial", "mo-qfa"), "initial"),
            accepting=Projector(frozenset(_need(doc, "accepting", "mo-qfa")), dim),
            rejecting=Projector(frozenset(_need(doc, "rejecting", "mo-qfa")), dim),
        )
    if kind == "mm-qfa":
        dim = int(_need(doc, "dim", "mm-qfa"))
        return MmQfa(
            alphabet=tuple(_need(doc, "alphabet", "mm-qfa")),
            unitaries={
                a: _parse_cmat(u, f"unitary {a}") for a, u in _need(doc, "unitaries", "mm-qfa").items()
            },
            initial=_parse_cvec(_need(doc, "initial", "mm-qfa"), "initial"),
            accepting=Projector(frozenset(_need(doc, "accepting", "mm-qfa")), dim),
            rejecting=Projector(frozenset(_need(doc, "rejecting", "mm-qfa")), dim),
            going=Projector(frozenset(_need(doc, "going", "mm-qfa")), dim),
        )
    if kind == "qfac":
        dim = int(_need(doc, "dim", "qfac"))
        transitions = {}
        for s, row in _need(doc, "transitions", "qfac").items():
            for a, nxt in row.items():
                transitions[(s, a)] = nxt
        unitaries = {}
        for s, row in _need(doc, "unitaries", "qfac").items():
            for a, u in row.items():
                unitaries[(s, a)] = _parse_cmat(u, f"unitary ({s},{a})")
        return Qfac(
            classical_states=tuple(_need(doc, "classical_states", "qfac")),
            alphabet=tuple(_need(doc, "alphabet", "qfac")),
            initial_classical=_need(doc, "initial_classical", "qfac"),
            initial_quantum=_parse_cvec(_need(doc, "initial_quantum", "qfac"), "initial_quantum"),
            transitions=transitions,
            unitaries=unitaries,
            accepting={
                s: Projector(frozenset(idx), dim)
                for s, idx in _need(doc, "accepting", "qfac").items()
            },
        )
    if kind == "rblm":
        return Rblm(
            alphabet=tuple(_need(doc, "alphabet", "rblm")),
            pi=_parse_cvec(_need(doc, "pi", "rblm"), "pi"),
            matrices={
                a: _parse_cmat(m, f"matrix {a}") for a, m in _need(doc, "matrices", "rblm").items()
            },
            eta=_parse_cvec(_need(doc, "eta", "rblm"), "eta"),
            real_valued=bool(doc.get("real_valued", True)),
        )
    raise SerializationError(f"unknown kind {kind!r}; expected one of {KINDS}")


def dumps(automaton) -> str:
    return canonical_json(to_document(automaton))


def loads(text: str, check: bool = True):
    doc = json.loads(text)
    automaton = from_document(doc)
    if check and not isinstance(automaton, Rblm):
        problems = validate(automaton)
        if problems:
            raise ValidationFailedError(problems)
    return automaton


def save(automaton, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(automaton))


def load(path, check: bool = True):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), check=check)


def parse_word(text: str, alphabet) -> tuple[str, ...]:
    """Parse a word from CLI text.

    Comma-separated when a comma is present; otherwise one symbol per
    character, which requires every alphabet symbol to be a single
    character.  The empty string is the empty word.
    """
    if text == "":
        return ()
    if "," in text:
        return tuple(part for part in text.split(",") if part != "")
    if any(len(a) != 1 for a in alphabet):
        raise ValueError("alphabet has multi-character symbols; separate the word with commas")
    return tuple(text)
