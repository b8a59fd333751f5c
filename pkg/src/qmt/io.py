"""Theory files: parsing, validation and canonical emission.

A theory file is JSON::

    {"histories": ["a", "b", "c"],
     "amplitudes": {"re": ["1", "1", "-1"], "im": ["0", "0", "0"]},
     "mode": "exact"}

or with ``"decoherence": {"re": [[...]], "im": [[...]]}`` instead of
amplitudes.  Numbers are rational strings ("p/q", integers, finite
decimals).  Optional keys: ``observable`` and ``experiment`` (lists of
partitions, each a list of label lists), ``cap`` and ``tolerance``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from . import generators
from .errors import AxiomError, CapExceeded, InputError, ParseError, UnknownExample
from .grainings import Partition, PosetTag, build_poset, designate_upper
from .measure import DEFAULT_EPS, MODES, HistoriesTheory, from_amplitudes, max_histories, new_theory

KEYS = {"histories", "decoherence", "amplitudes", "mode", "observable", "experiment", "cap", "tolerance"}
EXAMPLES = ("coin", "three-path", "single", "random")


def _num_str(x, mode: str) -> str:
    if mode == "float":
        return repr(float(x))
    return str(Fraction(x))


@dataclass
class TheoryFile:
    histories: list[str]
    mode: str = "exact"
    decoherence: dict | None = None
    amplitudes: dict | None = None
    observable: list | None = None
    experiment: list | None = None
    cap: int | None = None
    tolerance: float | None = None
    source: str | None = field(default=None, compare=False)

    @cached_property
    def theory(self) -> HistoriesTheory:
        eps = DEFAULT_EPS if self.tolerance is None else self.tolerance
        cap = self.cap if self.cap is not None else max_histories()
        if len(self.histories) > cap:
            raise CapExceeded(f"{len(self.histories)} histories exceeds the cap of {cap}",
                              n=len(self.histories), cap=cap)
        try:
            if self.amplitudes is not None:
                return from_amplitudes(self.histories, self.amplitudes["re"],
                                       self.amplitudes.get("im"), mode=self.mode, eps=eps, cap=cap)
            return new_theory(self.histories, self.decoherence["re"], self.decoherence.get("im"),
                              mode=self.mode, eps=eps, cap=cap)
        except CapExceeded:
            raise
        except InputError as exc:
            raise AxiomError(str(exc), axiom=type(exc).__name__, **exc.payload) from exc

    def designated(self, tag: str, poset=None) -> PosetTag | None:
        raw = self.observable if tag == "O" else self.experiment
        if raw is None:
            return None
        parts = [Partition.from_labels(self.histories, blocks) for blocks in raw]
        poset = build_poset(self.theory) if poset is None else poset
        return designate_upper(poset, parts, tag)

    def to_dict(self) -> dict:
        out = {"histories": list(self.histories), "mode": self.mode}
        for key in ("decoherence", "amplitudes"):
            block = getattr(self, key)
            if block is not None:
                out[key] = block
        for key in ("observable", "experiment", "cap", "tolerance"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def fingerprint(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()


def _schema(msg, field_name):
    return ParseError(msg, kind="Schema", field=field_name)


def _numbers(values, mode, field_name):
    out = []
    for x in values:
        if isinstance(x, bool) or not isinstance(x, (int, float, str)):
            raise _schema(f"{field_name}: {x!r} is not a number", field_name)
        if isinstance(x, float) and mode == "exact":
            raise _schema(f"{field_name}: write {x!r} as a rational string in exact mode", field_name)
        try:
            value = Fraction(x.strip()) if isinstance(x, str) else x
        except (ValueError, ZeroDivisionError):
            raise _schema(f"{field_name}: {x!r} is not a rational number", field_name) from None
        out.append(_num_str(value, mode))
    return out


def _matrix(raw, n, mode, field_name):
    if not isinstance(raw, list) or len(raw) != n or any(not isinstance(r, list) or len(r) != n for r in raw):
        raise _schema(f"{field_name} must be a {n}x{n} list of lists", field_name)
    return [_numbers(row, mode, field_name) for row in raw]


def _partitions(raw, labels, field_name):
    if not isinstance(raw, list):
        raise _schema(f"{field_name} must be a list of partitions", field_name)
    out = []
    for p in raw:
        if not isinstance(p, list) or not all(isinstance(b, list) for b in p):
            raise _schema(f"{field_name}: each partition is a list of label lists", field_name)
        part = Partition.from_labels(labels, p)
        out.append(part.to_labels(labels))
    return out


def from_dict(data, source: str | None = None) -> TheoryFile:
    if not isinstance(data, dict):
        raise _schema("top level must be an object", "$")
    unknown = set(data) - KEYS
    if unknown:
        raise _schema(f"unknown keys {sorted(unknown)}", sorted(unknown)[0])
    labels = data.get("histories")
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels) or not labels:
        raise _schema("histories must be a nonempty list of strings", "histories")
    mode = data.get("mode", "exact")
    if mode not in MODES:
        raise _schema(f"mode must be one of {MODES}", "mode")
    n = len(labels)
    has_d, has_a = "decoherence" in data, "amplitudes" in data
    if has_d == has_a:
        raise _schema("give exactly one of decoherence or amplitudes", "decoherence")
    tf = TheoryFile(histories=list(labels), mode=mode, source=source)
    if has_d:
        raw = data["decoherence"]
        if not isinstance(raw, dict) or "re" not in raw:
            raise _schema("decoherence needs a re matrix", "decoherence.re")
        re = _matrix(raw["re"], n, mode, "decoherence.re")
        if "im" in raw:
            im = _matrix(raw["im"], n, mode, "decoherence.im")
        else:
            im = [[_num_str(0, mode)] * n for _ in range(n)]
        tf.decoherence = {"re": re, "im": im}
    else:
        raw = data["amplitudes"]
        if not isinstance(raw, dict) or "re" not in raw:
            raise _schema("amplitudes needs a re vector", "amplitudes.re")
        for key in ("re", "im"):
            if key in raw and (not isinstance(raw[key], list) or len(raw[key]) != n):
                raise _schema(f"amplitudes.{key} must have {n} entries", f"amplitudes.{key}")
        re = _numbers(raw["re"], mode, "amplitudes.re")
        im = _numbers(raw["im"], mode, "amplitudes.im") if "im" in raw else [_num_str(0, mode)] * n
        tf.amplitudes = {"re": re, "im": im}
    if "cap" in data:
        if not isinstance(data["cap"], int) or isinstance(data["cap"], bool) or data["cap"] < 1:
            raise _schema("cap must be a positive integer", "cap")
        tf.cap = data["cap"]
    if "tolerance" in data:
        if not isinstance(data["tolerance"], (int, float)) or data["tolerance"] < 0:
            raise _schema("tolerance must be a nonnegative number", "tolerance")
        tf.tolerance = float(data["tolerance"])
    for key in ("observable", "experiment"):
        if key in data:
            setattr(tf, key, _partitions(data[key], labels, key))
    return tf


def parse_text(text: str, source: str | None = None) -> TheoryFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", kind="Syntax",
                         line=exc.lineno, column=exc.colno) from None
    tf = from_dict(data, source)
    tf.theory  # noqa: B018 - validates the measure axioms now
    for tag in ("O", "E"):
        tf.designated(tag)
    return tf


def parse(path) -> TheoryFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", kind="Syntax") from None
    return parse_text(text, str(path))


def theory_file(theory: HistoriesTheory) -> TheoryFile:
    """Canonical file for an in-memory theory (decoherence-matrix form)."""
    mode = theory.mode
    return TheoryFile(
        histories=list(theory.labels),
        mode=mode,
        decoherence={
            "re": [[_num_str(x, mode) for x in row] for row in theory.re],
            "im": [[_num_str(x, mode) for x in row] for row in theory.im],
        },
    )


def example(name: str, seed: int = 0, n: int = 4) -> TheoryFile:
    if name == "coin":
        tf = theory_file(generators.coin())
    elif name == "three-path":
        tf = TheoryFile(histories=["a", "b", "c"], amplitudes={"re": ["1", "1", "-1"], "im": ["0", "0", "0"]})
    elif name == "single":
        tf = TheoryFile(histories=["a"], amplitudes={"re": ["1"], "im": ["0"]})
    elif name == "random":
        vr, vi = generators.random_amplitudes(seed, n)
        tf = TheoryFile(histories=generators.labels_for(n),
                        amplitudes={"re": [str(x) for x in vr], "im": [str(x) for x in vi]})
    else:
        raise UnknownExample(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    tf.theory  # noqa: B018
    return tf
