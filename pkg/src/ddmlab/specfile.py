"""Problem-spec file: one self-describing JSON document per batch.

Rationals are decimal-free "p/q" strings (or plain integers).  Measures are
tagged records that may reference other named measures.  Window sets use
the textual literal syntax ``full``, ``empty``, ``cyl(j,[a,b,...])`` and
``union(...)``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import measures, symbolic
from .covers import TruncationConfig
from .errors import RejectedInputError

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise RejectedInputError(f"cannot parse rational from {text!r}")
    m = _RATIONAL.match(text)
    if not m:
        raise RejectedInputError(f"cannot parse rational from {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise RejectedInputError("zero denominator")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def decimal_string(x: Fraction, digits: int) -> str:
    """Display-only fixed-point rendering, truncated toward zero."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    scaled = x.numerator * 10 ** digits // x.denominator
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0')}" if digits else f"{sign}{whole}"


# -- set literals --------------------------------------------------------


def parse_set(text: str, n: int) -> symbolic.WindowSet:
    parser = _SetParser(text, n)
    result = parser.expression()
    parser.expect_end()
    return result


class _SetParser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.pos = 0
        self.n = n

    def error(self, message: str):
        raise RejectedInputError(f"{message} at {self.pos} in {self.text!r}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, token: str):
        self.skip()
        if not self.text.startswith(token, self.pos):
            self.error(f"expected {token!r}")
        self.pos += len(token)

    def expect_end(self):
        self.skip()
        if self.pos != len(self.text):
            self.error("trailing input")

    def peek_word(self) -> str:
        self.skip()
        m = re.match(r"[a-z_]+", self.text[self.pos :])
        return m.group(0) if m else ""

    def integer(self) -> int:
        self.skip()
        m = re.match(r"-?\d+", self.text[self.pos :])
        if not m:
            self.error("expected an integer")
        self.pos += len(m.group(0))
        return int(m.group(0))

    def expression(self) -> symbolic.WindowSet:
        word = self.peek_word()
        if word == "full":
            self.expect("full")
            return symbolic.WindowSet.full_space(self.n)
        if word == "empty":
            self.expect("empty")
            return symbolic.WindowSet.empty(self.n)
        if word == "cyl":
            return self.cylinder()
        if word == "union":
            self.expect("union")
            self.expect("(")
            parts = [self.expression()]
            while True:
                self.skip()
                if self.text.startswith(",", self.pos):
                    self.pos += 1
                    parts.append(self.expression())
                else:
                    break
            self.expect(")")
            return symbolic.union_all(self.n, parts)
        self.error("expected full, empty, cyl or union")

    def cylinder(self) -> symbolic.WindowSet:
        self.expect("cyl")
        self.expect("(")
        start = self.integer()
        self.expect(",")
        self.expect("[")
        word = [self.integer()]
        while True:
            self.skip()
            if self.text.startswith(",", self.pos):
                self.pos += 1
                word.append(self.integer())
            else:
                break
        self.expect("]")
        self.expect(")")
        return symbolic.WindowSet.cylinder(self.n, start, word)


# -- measures ------------------------------------------------------------


def parse_measure(record, named: dict, n: int) -> measures.CylinderMeasure:
    if isinstance(record, str):
        if record not in named:
            raise RejectedInputError(f"unknown measure name {record!r}")
        return named[record]
    if not isinstance(record, dict) or "kind" not in record:
        raise RejectedInputError(f"measure record needs a kind: {record!r}")
    kind = record["kind"]
    if kind == "markov":
        pi = tuple(parse_rational(x) for x in record["pi"])
        a = tuple(tuple(parse_rational(x) for x in row) for row in record["A"])
        return measures.MarkovMeasure(pi, a)
    if kind == "stationary_markov":
        a = tuple(tuple(parse_rational(x) for x in row) for row in record["A"])
        return measures.stationary_markov(a)
    if kind == "dirac":
        exceptions = tuple(
            (int(j), int(s)) for j, s in record.get("exceptions", {}).items()
        )
        return measures.DiracMeasure(n, tuple(record["period"]), exceptions)
    if kind == "bernoulli":
        return measures.BernoulliMeasure(tuple(parse_rational(x) for x in record["p"]))
    if kind == "cesaro":
        base = parse_measure(record["base"], named, n)
        return measures.cesaro(base, int(record["n"]))
    if kind == "convex":
        weights = tuple(parse_rational(x) for x in record["weights"])
        parts = tuple(parse_measure(p, named, n) for p in record["parts"])
        return measures.ConvexMeasure(weights, parts)
    if kind == "signed_diff":
        return measures.SignedDiffMeasure(
            parse_measure(record["psi"], named, n),
            parse_rational(record["c"]),
            parse_measure(record["phi"], named, n),
        )
    raise RejectedInputError(f"unknown measure kind {kind!r}")


def parse_config(record: dict) -> TruncationConfig:
    return TruncationConfig(
        depth=int(record.get("depth", 1)),
        width=int(record.get("width", 0)),
        base_shift=int(record.get("base_shift", 0)),
        window_lo=record.get("window_lo"),
        window_hi=record.get("window_hi"),
    )


@dataclass
class ProblemSpec:
    alphabet: symbolic.Alphabet
    measures: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    configs: dict = field(default_factory=dict)
    commands: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.alphabet.size

    def measure(self, name: str) -> measures.CylinderMeasure:
        if name not in self.measures:
            raise RejectedInputError(f"unknown measure name {name!r}")
        return self.measures[name]

    def window_set(self, name: str) -> symbolic.WindowSet:
        if name in self.sets:
            return self.sets[name]
        # allow inline literals wherever a set name is expected
        return parse_set(name, self.n)

    def config(self, name) -> TruncationConfig:
        if isinstance(name, dict):
            return parse_config(name)
        if name not in self.configs:
            raise RejectedInputError(f"unknown config name {name!r}")
        return self.configs[name]


def load_spec(path: str) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return parse_spec(raw)


def parse_spec(raw: dict) -> ProblemSpec:
    alphabet = symbolic.Alphabet(int(raw.get("alphabet", 2)))
    n = alphabet.size
    named: dict = {}
    pending = dict(raw.get("measures", {}))
    # named measures may reference each other; resolve until stable
    progress = True
    while pending and progress:
        progress = False
        for name in list(pending):
            try:
                named[name] = parse_measure(pending[name], named, n)
            except RejectedInputError:
                continue
            del pending[name]
            progress = True
    if pending:
        raise RejectedInputError(f"unresolvable measure references: {sorted(pending)}")
    sets = {name: parse_set(text, n) for name, text in raw.get("sets", {}).items()}
    configs = {name: parse_config(rec) for name, rec in raw.get("configs", {}).items()}
    return ProblemSpec(alphabet, named, sets, configs, dict(raw.get("commands", {})))


def witness_payload(cover) -> dict:
    entries = [
        {"m": m, "set": a.literal()}
        for m, a in cover.entries
    ]
    payload = {"base_shift": cover.base_shift, "entries": entries}
    if cover.cost_base is not None:
        payload["cost_base"] = cover.cost_base
    return payload
