# wallopt/fuzzy_engine.py - Mamdani inference and the four parameter/operator rule systems

import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

LOW, MEDIUM, HIGH = "L", "M", "H"
ANY = "Any"
LOW_OR_MEDIUM = "L or M"

UNIVERSE_POINTS = 201


@dataclass(frozen=True)
class MembershipTriple:
    low: float
    medium: float
    high: float

    def degree(self, term: str) -> float:
        if term == LOW:
            return self.low
        if term == MEDIUM:
            return self.medium
        if term == HIGH:
            return self.high
        if term == ANY:
            return 1.0
        if term == LOW_OR_MEDIUM:
            return max(self.low, self.medium)
        raise ValueError(f"Unknown linguistic term '{term}'")


def fuzzify(x: float) -> MembershipTriple:
    """Triangular Low/Medium/High memberships peaked at 0, 0.5 and 1"""
    x = min(max(float(x), 0.0), 1.0)
    if x <= 0.5:
        low = 1.0 - 2.0 * x
        return MembershipTriple(low, 1.0 - low, 0.0)
    high = 2.0 * x - 1.0
    return MembershipTriple(0.0, 1.0 - high, high)


@dataclass(frozen=True)
class OutputVariable:
    name: str
    low: float
    high: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)

    def universe(self) -> np.ndarray:
        return np.linspace(self.low, self.high, UNIVERSE_POINTS)

    def membership(self, term: str) -> np.ndarray:
        """Output set for a term, same triangular shapes scaled onto [low, high]"""
        u = (self.universe() - self.low) / (self.high - self.low)
        if term == LOW:
            return np.clip(1.0 - 2.0 * u, 0.0, 1.0)
        if term == MEDIUM:
            return np.clip(1.0 - np.abs(2.0 * u - 1.0), 0.0, 1.0)
        if term == HIGH:
            return np.clip(2.0 * u - 1.0, 0.0, 1.0)
        raise ValueError(f"Output term must be L, M or H, got '{term}'")


@dataclass(frozen=True)
class FuzzyRule:
    antecedent: Tuple[str, ...]
    consequent: Tuple[str, ...]


class RuleTable:
    """An immutable Mamdani rule base with min conjunction, max aggregation and centroid output"""

    def __init__(self, name: str, inputs: Sequence[str], outputs: Sequence[OutputVariable],
                 rules: Sequence[FuzzyRule]):
        self.name = name
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.rules = tuple(rules)

        for number, rule in enumerate(self.rules, start=1):
            if len(rule.antecedent) != len(self.inputs) or len(rule.consequent) != len(self.outputs):
                raise ValueError(f"{name} rule {number} does not match the table arity")

        self._universes = [out.universe() for out in self.outputs]
        # rules x universe membership stack per output
        self._consequent_sets = [
            np.vstack([out.membership(rule.consequent[j]) for rule in self.rules])
            for j, out in enumerate(self.outputs)
        ]

    def __len__(self) -> int:
        return len(self.rules)

    def firing_strengths(self, values: Sequence[float]) -> np.ndarray:
        if len(values) != len(self.inputs):
            raise ValueError(f"{self.name} expects {len(self.inputs)} inputs, got {len(values)}")
        memberships = [fuzzify(v) for v in values]
        strengths = np.empty(len(self.rules))
        for k, rule in enumerate(self.rules):
            strengths[k] = min(m.degree(term) for term, m in zip(rule.antecedent, memberships))
        return strengths

    def infer(self, values: Sequence[float]) -> Dict[str, float]:
        strengths = self.firing_strengths(values)
        result = {}
        for out, universe, sets in zip(self.outputs, self._universes, self._consequent_sets):
            aggregated = np.max(np.minimum(strengths[:, None], sets), axis=0)
            area = aggregated.sum()
            if area <= 0:
                result[out.name] = out.midpoint
            else:
                result[out.name] = float(np.dot(universe, aggregated) / area)
        return result


def infer(table: RuleTable, values: Sequence[float]) -> Dict[str, float]:
    return table.infer(values)


# ------------------------- Rule data ------------------------- #

GLVA_ROWS = (
    ("L", "L", "L", "L", "L or M", "L", "L", "L", "L"),
    ("L", "L", "L", "H", "L or M", "L", "L", "L", "H"),
    ("L", "L", "H", "L", "L or M", "L", "L", "H", "L"),
    ("L", "L", "H", "H", "L or M", "L", "L", "H", "H"),
    ("L", "H", "L", "L", "L or M", "L", "H", "L", "L"),
    ("L", "H", "L", "H", "L or M", "L", "H", "L", "H"),
    ("L", "H", "H", "L", "L or M", "L", "H", "H", "L"),
    ("L", "H", "H", "H", "L or M", "L", "H", "H", "H"),
    ("H", "L", "L", "L", "L or M", "H", "L", "L", "L"),
    ("H", "L", "L", "H", "L or M", "H", "L", "L", "H"),
    ("H", "L", "H", "L", "L or M", "H", "L", "H", "L"),
    ("H", "L", "H", "H", "L or M", "H", "L", "H", "H"),
    ("H", "H", "L", "L", "L or M", "H", "H", "L", "L"),
    ("H", "H", "L", "H", "L or M", "H", "H", "L", "H"),
    ("H", "H", "H", "L", "L or M", "H", "H", "H", "L"),
    ("H", "H", "H", "H", "L or M", "H", "H", "H", "H"),
    ("M", "M", "M", "M", "L or M", "M", "M", "M", "M"),
    ("Any", "Any", "Any", "Any", "H", "L", "H", "L", "H"),
)

UDVD_ROWS = (
    ("L", "L", "L", "L", "L or M", "L", "L", "L"),
    ("L", "L", "L", "H", "L or M", "L", "L", "L"),
    ("L", "L", "H", "L", "L or M", "L", "H", "L"),
    ("L", "L", "H", "H", "L or M", "L", "H", "L"),
    ("L", "H", "L", "L", "L or M", "L", "L", "L"),
    ("L", "H", "L", "H", "L or M", "L", "L", "L"),
    ("L", "H", "H", "L", "L or M", "L", "H", "L"),
    ("L", "H", "H", "H", "L or M", "L", "H", "L"),
    ("H", "L", "L", "L", "L or M", "H", "L", "L"),
    ("H", "L", "L", "H", "L or M", "H", "L", "L"),
    ("H", "L", "H", "L", "L or M", "H", "H", "L"),
    ("H", "L", "H", "H", "L or M", "H", "H", "L"),
    ("H", "H", "L", "L", "L or M", "H", "L", "L"),
    ("H", "H", "L", "H", "L or M", "H", "L", "L"),
    ("H", "H", "H", "L", "L or M", "H", "H", "L"),
    ("H", "H", "H", "H", "L or M", "H", "H", "H"),
    ("M", "M", "M", "M", "L or M", "M", "M", "M"),
    ("Any", "Any", "Any", "Any", "H", "L", "L", "L"),
)

EDELS_ROWS = (
    ("L", "L", "L", "L", "L or M", "H", "H", "L", "H", "H", "L"),
    ("L", "L", "L", "H", "L or M", "H", "H", "L", "L", "H", "L"),
    ("L", "L", "H", "L", "L or M", "H", "H", "L", "H", "L", "L"),
    ("L", "L", "H", "H", "L or M", "H", "H", "L", "H", "L", "H"),
    ("L", "H", "L", "L", "L or M", "L", "H", "H", "H", "H", "L"),
    ("L", "H", "L", "H", "L or M", "L", "H", "H", "L", "H", "H"),
    ("L", "H", "H", "L", "L or M", "L", "H", "H", "H", "L", "L"),
    ("L", "H", "H", "H", "L or M", "L", "H", "H", "H", "L", "H"),
    ("H", "L", "L", "L", "L or M", "H", "L", "L", "H", "H", "L"),
    ("H", "L", "L", "H", "L or M", "H", "L", "L", "L", "H", "H"),
    ("H", "L", "H", "L", "L or M", "L", "H", "H", "L", "H", "H"),
    ("H", "L", "H", "H", "L or M", "H", "L", "L", "H", "L", "H"),
    ("H", "H", "L", "L", "L or M", "H", "L", "H", "H", "H", "L"),
    ("H", "H", "L", "H", "L or M", "H", "L", "H", "L", "H", "H"),
    ("H", "H", "H", "L", "L or M", "H", "L", "H", "H", "L", "L"),
    ("H", "H", "H", "H", "L or M", "H", "L", "H", "H", "L", "H"),
    ("M", "M", "M", "M", "L or M", "M", "M", "M", "M", "M", "M"),
    ("Any", "Any", "Any", "Any", "H", "L", "H", "L", "L", "H", "L"),
)

# NIT, stagnation, three prior probabilities -> three next probabilities.
# Empty cells repeat the value of the row above.
SELECTION_ROWS = (
    ("L", "L", "L", "L", "L", "L", "L", "L"),
    ("", "", "L", "L", "H", "L", "L", "H"),
    ("", "", "L", "H", "L", "L", "H", "L"),
    ("", "", "L", "H", "H", "L", "H", "H"),
    ("", "", "H", "L", "L", "H", "L", "L"),
    ("", "", "H", "L", "H", "H", "L", "H"),
    ("", "", "H", "H", "L", "H", "H", "L"),
    ("", "", "H", "H", "H", "H", "H", "H"),
    ("", "H", "L", "L", "L", "H", "H", "H"),
    ("", "", "L", "L", "H", "H", "H", "L"),
    ("", "", "L", "H", "L", "H", "L", "H"),
    ("", "", "L", "H", "H", "H", "L", "L"),
    ("", "", "H", "L", "L", "L", "H", "H"),
    ("", "", "H", "L", "H", "L", "H", "L"),
    ("", "", "H", "H", "L", "L", "L", "H"),
    ("", "", "H", "H", "H", "L", "L", "L"),
    ("M", "M", "M", "M", "M", "M", "M", "M"),
    ("H", "L", "L", "L", "L", "H", "H", "H"),
    ("", "", "L", "L", "H", "H", "H", "L"),
    ("", "", "L", "H", "L", "H", "L", "H"),
    ("", "", "L", "H", "H", "H", "L", "L"),
    ("", "", "H", "L", "L", "L", "H", "H"),
    ("", "", "H", "L", "H", "L", "H", "L"),
    ("", "", "H", "H", "L", "L", "L", "H"),
    ("", "", "H", "H", "H", "L", "L", "L"),
    ("", "H", "L", "L", "L", "L", "L", "L"),
    ("", "", "L", "L", "H", "L", "L", "H"),
    ("", "", "L", "H", "L", "L", "H", "L"),
    ("", "", "L", "H", "H", "L", "H", "H"),
    ("", "", "H", "L", "L", "H", "L", "L"),
    ("", "", "H", "L", "H", "H", "L", "H"),
    ("", "", "H", "H", "L", "H", "H", "L"),
    ("", "", "H", "H", "H", "H", "H", "H"),
)


def fill_down(rows: Sequence[Tuple[str, ...]]) -> Tuple[Tuple[str, ...], ...]:
    filled = []
    previous = None
    for row in rows:
        if previous is None:
            current = tuple(row)
        else:
            current = tuple(cell if cell else prev for cell, prev in zip(row, previous))
        filled.append(current)
        previous = current
    return tuple(filled)


def _build(name: str, inputs: Sequence[str], outputs: Sequence[OutputVariable], rows) -> RuleTable:
    n = len(inputs)
    rules = [FuzzyRule(tuple(row[:n]), tuple(row[n:])) for row in rows]
    return RuleTable(name, inputs, outputs, rules)


GLVA_TABLE = _build(
    "glva",
    ("NRP1", "NRP2", "NRP3", "NRP4", "NIT"),
    (OutputVariable("beta1", 0.0, 2.0), OutputVariable("c1", 0.0, 2.0),
     OutputVariable("beta2", 0.0, 2.0), OutputVariable("c2", 0.0, 2.0)),
    GLVA_ROWS,
)

UDVD_TABLE = _build(
    "udvd",
    ("NRP1", "NRP2", "NRP3", "NRP4", "NIT"),
    (OutputVariable("w1", 0.0, 1.0), OutputVariable("w2", 0.0, 1.0), OutputVariable("w3", 0.0, 1.0)),
    UDVD_ROWS,
)

EDELS_TABLE = _build(
    "edels",
    ("NRP5", "NRP6", "NRP7", "NRP8", "NIT"),
    tuple(OutputVariable(f"F{k}", 0.0, 2.0) for k in range(1, 7)),
    EDELS_ROWS,
)

SELECTION_TABLE = _build(
    "selection",
    ("NIT", "stagnation", "prior_glva", "prior_udvd", "prior_edels"),
    (OutputVariable("glva", 0.0, 1.0), OutputVariable("udvd", 0.0, 1.0), OutputVariable("edels", 0.0, 1.0)),
    fill_down(SELECTION_ROWS),
)

RULE_TABLES = {t.name: t for t in (GLVA_TABLE, UDVD_TABLE, EDELS_TABLE, SELECTION_TABLE)}


# ------------------------- Adapters ------------------------- #

def adapt_glva(nrp1: float, nrp2: float, nrp3: float, nrp4: float, nit: float) -> Tuple[float, float, float, float]:
    """(beta1, c1, beta2, c2) for the global-learning velocity update"""
    out = GLVA_TABLE.infer((nrp1, nrp2, nrp3, nrp4, nit))
    return out["beta1"], out["c1"], out["beta2"], out["c2"]


def adapt_udvd(nrp1: float, nrp2: float, nrp3: float, nrp4: float, nit: float) -> Tuple[float, float, float]:
    out = UDVD_TABLE.infer((nrp1, nrp2, nrp3, nrp4, nit))
    return out["w1"], out["w2"], out["w3"]


def adapt_edels(nrp5: float, nrp6: float, nrp7: float, nrp8: float, nit: float) -> Tuple[float, ...]:
    out = EDELS_TABLE.infer((nrp5, nrp6, nrp7, nrp8, nit))
    return tuple(out[f"F{k}"] for k in range(1, 7))


def select_operators(nit: float, stagnation: float, priors: Sequence[float]) -> Tuple[float, float, float]:
    """Next-window probabilities (glva, udvd, edels)"""
    out = SELECTION_TABLE.infer((nit, stagnation, *priors))
    return out["glva"], out["udvd"], out["edels"]
