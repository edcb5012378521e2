"""
Sampling and Agreement Statistics
=================================
Cochran sample sizing with finite-population correction, seeded stratified
draws, Cohen's kappa, and per-label scoring of predicted against gold labels.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ConfigError,
    DegenerateMarginals,
    DomainError,
    EmptyInput,
    IdMismatch,
    InsufficientPopulation,
)
from .models import LABELS, NO_SMELL, LabelPair, SamplePlan, Stratum
from .corpus import read_jsonl

MODE_RAW = "raw"
MODE_TABLE_COMPAT = "table-compat"
MODES = (MODE_RAW, MODE_TABLE_COMPAT)

DEFAULT_Z = 2.58
DEFAULT_P = 0.5
DEFAULT_E = 0.05


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def initial_sample_size(z: float, p: float, E: float) -> float:
    """n0 = z^2 p (1 - p) / E^2"""
    if z <= 0:
        raise DomainError(f"z must be positive, got {z}")
    if not 0 < p < 1:
        raise DomainError(f"p must lie strictly between 0 and 1, got {p}")
    if E <= 0:
        raise DomainError(f"E must be positive, got {E}")
    return z * z * p * (1 - p) / (E * E)


def cochran_plan(strata: Sequence[Tuple[str, int]], z: float = DEFAULT_Z, p: float = DEFAULT_P,
                 E: float = DEFAULT_E, mode: str = MODE_RAW) -> SamplePlan:
    """
    Per-stratum sample sizes with finite-population correction.

    In table-compat mode the initial size is truncated to an integer before
    the correction, matching tables that print n0 as a whole number.

    Raises:
        DomainError: z, p or E out of range, a population below 1, or unknown mode
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode '{mode}' (expected one of {', '.join(MODES)})")
    n0 = initial_sample_size(z, p, E)
    if mode == MODE_TABLE_COMPAT:
        n0 = float(math.floor(n0))

    rows = []
    for name, population in strata:
        if int(population) != population or population < 1:
            raise DomainError(f"stratum '{name}': population must be an integer >= 1, got {population}")
        population = int(population)
        corrected = n0 / (1 + (n0 - 1) / population)
        rounded = min(population, max(1, round_half_up(corrected)))
        rows.append(Stratum(name, population, n0, corrected, rounded))
    return SamplePlan(tuple(rows), z, p, E, mode)


def draw_stratified(items: Mapping[str, Sequence[str]], plan: SamplePlan,
                    seed: int = 0) -> Dict[str, List[str]]:
    """
    Uniform draw without replacement per stratum.

    Each stratum gets its own generator seeded from (seed, stratum position),
    and items are sorted first, so the draw depends only on the seed and the
    item ids.

    Raises:
        InsufficientPopulation: a stratum has fewer items than its planned size
    """
    sample = {}
    for position, stratum in enumerate(plan.strata):
        pool = sorted(items.get(stratum.name, ()))
        if len(pool) < stratum.n_rounded:
            raise InsufficientPopulation(stratum.name, len(pool), stratum.n_rounded)
        rng = np.random.default_rng([int(seed), position])
        picks = rng.choice(len(pool), size=stratum.n_rounded, replace=False)
        sample[stratum.name] = sorted(pool[i] for i in picks)
    return sample


# =============================================================================
# Agreement
# =============================================================================

def confusion_matrix(pairs: Sequence[LabelPair],
                     labels: Optional[Sequence[str]] = None) -> Tuple[np.ndarray, List[str]]:
    """Rows are label_a, columns label_b."""
    if labels is None:
        labels = sorted({p.label_a for p in pairs} | {p.label_b for p in pairs})
    index = {label: i for i, label in enumerate(labels)}
    matrix = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for pair in pairs:
        matrix[index[pair.label_a], index[pair.label_b]] += 1
    return matrix, list(labels)


def kappa_from_matrix(matrix: np.ndarray) -> float:
    total = matrix.sum()
    if total == 0:
        raise EmptyInput("kappa needs at least one labelled pair")
    p_o = np.trace(matrix) / total
    p_e = float(np.dot(matrix.sum(axis=1), matrix.sum(axis=0))) / float(total * total)
    if math.isclose(p_e, 1.0):
        if math.isclose(p_o, 1.0):
            return 1.0
        raise DegenerateMarginals(f"chance agreement is 1 but observed agreement is {p_o:.6f}")
    return float((p_o - p_e) / (1 - p_e))


def cohen_kappa(pairs: Sequence[LabelPair]) -> float:
    """
    Chance-corrected agreement (p_o - p_e) / (1 - p_e).

    Raises:
        EmptyInput: no pairs
        DegenerateMarginals: chance agreement is 1 without perfect agreement
    """
    if not pairs:
        raise EmptyInput("kappa needs at least one labelled pair")
    matrix, _ = confusion_matrix(pairs)
    return kappa_from_matrix(matrix)


@dataclass
class LabelScore:
    label: str
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f1": round(self.f1, 6),
            "support": self.support,
        }


@dataclass
class ScoreReport:
    per_label: List[LabelScore]
    matrix: List[List[int]]
    labels: List[str]
    kappa: float
    n_functions: int
    macro: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_functions": self.n_functions,
            "kappa": round(self.kappa, 6),
            "macro": {k: round(v, 6) for k, v in self.macro.items()},
            "per_label": [s.to_dict() for s in self.per_label],
            "labels": self.labels,
            "confusion_matrix": self.matrix,
        }


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def score_against_gold(predicted: Mapping[str, str], gold: Mapping[str, str],
                       strict: bool = True) -> ScoreReport:
    """
    Per-label precision/recall/F1, confusion matrix and kappa over gold function ids.

    Gold functions without a prediction count as NoSmell. With strict=False,
    predictions outside the gold id set are ignored (gold covers a sample). Rows of the matrix
    are gold labels, columns predictions, in rule order then NoSmell.

    Raises:
        IdMismatch: a prediction names a function absent from the gold labels
        EmptyInput: no gold labels
    """
    if not gold:
        raise EmptyInput("gold label set is empty")
    unknown = set(predicted) - set(gold)
    if unknown and strict:
        raise IdMismatch(unknown)
    predicted = {fid: label for fid, label in predicted.items() if fid in gold}
    for label in list(gold.values()) + list(predicted.values()):
        if label not in LABELS:
            raise ConfigError(f"unknown label '{label}'")

    pairs = [LabelPair(fid, gold[fid], predicted.get(fid, NO_SMELL)) for fid in sorted(gold)]
    matrix, labels = confusion_matrix(pairs, LABELS)

    present = [label for i, label in enumerate(labels) if matrix[i, :].sum() or matrix[:, i].sum()]
    scores = []
    for label in present:
        i = labels.index(label)
        tp = int(matrix[i, i])
        precision = _ratio(tp, int(matrix[:, i].sum()))
        recall = _ratio(tp, int(matrix[i, :].sum()))
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        scores.append(LabelScore(label, precision, recall, f1, int(matrix[i, :].sum())))

    macro = {
        "precision": float(np.mean([s.precision for s in scores])),
        "recall": float(np.mean([s.recall for s in scores])),
        "f1": float(np.mean([s.f1 for s in scores])),
    }
    return ScoreReport(
        per_label=scores,
        matrix=matrix.tolist(),
        labels=labels,
        kappa=kappa_from_matrix(matrix),
        n_functions=len(pairs),
        macro=macro,
    )


def load_labels(path) -> Dict[str, str]:
    """NDJSON `{function_id, label}` rows; later rows overwrite earlier ones."""
    labels = {}
    for row in read_jsonl(path):
        try:
            labels[row["function_id"]] = row["label"]
        except KeyError as exc:
            raise ConfigError(f"{path}: label row missing {exc}") from exc
    return labels
