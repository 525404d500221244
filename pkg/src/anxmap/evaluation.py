"""Recall/accuracy evaluation, threshold sweeps, and threshold selection.

Reported metrics are per-class recall and overall accuracy; model
selection maximizes the product of anxiety recall and accuracy over a
threshold grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .classifier import (
    ClassifierModel,
    ClassLabel,
    classify_map,
    label_index,
    score_ratio,
)
from .tokenizer import Token


class EmptyTestSet(ValueError):
    """Evaluation requested on an empty test set."""


class EmptySweep(ValueError):
    """Threshold selection requested on an empty sweep."""


#: Default sweep grid: 0.5 to 5.0 in steps of 0.5.
DEFAULT_SWEEP_GRID: tuple[float, ...] = tuple(float(Fraction(i, 2)) for i in range(1, 11))


@dataclass(frozen=True, slots=True)
class EvalReport:
    """Confusion matrix and the derived metrics.

    ``confusion[gold][predicted]`` uses the package class indexing
    (0 NonAnxiety, 1 Anxiety). ``vacuous`` names gold classes absent from
    the test set, whose recall is reported as 1.0 by convention.
    """

    confusion: tuple[tuple[int, int], tuple[int, int]]
    recall_anxiety: float
    recall_non_anxiety: float
    accuracy: float
    product: float
    vacuous: frozenset[ClassLabel] = frozenset()

    def as_dict(self) -> dict:
        return {
            "confusion": [list(row) for row in self.confusion],
            "recall_anxiety": self.recall_anxiety,
            "recall_non_anxiety": self.recall_non_anxiety,
            "accuracy": self.accuracy,
            "product": self.product,
            "vacuous": sorted(label.value for label in self.vacuous),
        }


@dataclass(frozen=True, slots=True)
class SweepPoint:
    threshold: float
    report: EvalReport


def report_from_confusion(confusion: tuple[tuple[int, int], tuple[int, int]]) -> EvalReport:
    """Derive all metrics from a gold x predicted confusion matrix."""
    gold_non = confusion[0][0] + confusion[0][1]
    gold_anx = confusion[1][0] + confusion[1][1]
    total = gold_non + gold_anx
    if total == 0:
        raise EmptyTestSet("empty confusion matrix")
    vacuous = set()
    if gold_anx > 0:
        recall_anx = confusion[1][1] / gold_anx
    else:
        recall_anx = 1.0
        vacuous.add(ClassLabel.ANXIETY)
    if gold_non > 0:
        recall_non = confusion[0][0] / gold_non
    else:
        recall_non = 1.0
        vacuous.add(ClassLabel.NON_ANXIETY)
    accuracy = (confusion[0][0] + confusion[1][1]) / total
    return EvalReport(
        confusion=confusion,
        recall_anxiety=recall_anx,
        recall_non_anxiety=recall_non,
        accuracy=accuracy,
        product=recall_anx * accuracy,
        vacuous=frozenset(vacuous),
    )


def evaluate(
    model: ClassifierModel,
    test: Sequence[tuple[Sequence[Token], ClassLabel]],
    method: str = "ml",
    threshold: float | None = None,
    smoothing: bool | None = None,
) -> EvalReport:
    """Classify every test item and report recall/accuracy metrics.

    ``method`` is ``"ml"`` (ratio rule at ``threshold``, defaulting to the
    model's configured one) or ``"map"`` (prior-weighted scoring).
    """
    if len(test) == 0:
        raise EmptyTestSet("test set has no documents")
    if method not in ("ml", "map"):
        raise ValueError(f"method must be 'ml' or 'map', got {method!r}")
    if threshold is None:
        threshold = model.config.threshold
    matrix = [[0, 0], [0, 0]]
    for seq, gold in test:
        if method == "ml":
            result = score_ratio(model, seq, smoothing).result_at(threshold)
        else:
            result = classify_map(model, seq, smoothing)
        matrix[label_index(gold)][label_index(result.label)] += 1
    return report_from_confusion((tuple(matrix[0]), tuple(matrix[1])))


def sweep(
    model: ClassifierModel,
    test: Sequence[tuple[Sequence[Token], ClassLabel]],
    thresholds: Iterable[float] = DEFAULT_SWEEP_GRID,
    smoothing: bool | None = None,
) -> list[SweepPoint]:
    """Evaluate the ratio rule at every threshold with one scoring pass.

    Per-item ratio scores are threshold-independent, so they are computed
    once and reused; each point equals ``evaluate`` at that threshold.
    """
    grid = list(thresholds)
    if not grid:
        raise ValueError("thresholds must be non-empty")
    if any(not (t > 0) for t in grid):
        raise ValueError("thresholds must all be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("thresholds must be strictly ascending")
    if len(test) == 0:
        raise EmptyTestSet("test set has no documents")

    scored = [(score_ratio(model, seq, smoothing), label_index(gold)) for seq, gold in test]
    points = []
    for t in grid:
        matrix = [[0, 0], [0, 0]]
        for score, gold_i in scored:
            matrix[gold_i][1 if score.anxious_at(t) else 0] += 1
        points.append(SweepPoint(threshold=t, report=report_from_confusion((tuple(matrix[0]), tuple(matrix[1])))))
    return points


def select_threshold(points: Sequence[SweepPoint]) -> tuple[float, float]:
    """Pick the threshold with the largest recall(Anxiety) x accuracy product.

    Ties go to the smallest threshold.
    """
    if not points:
        raise EmptySweep("no sweep points")
    best = None
    for point in sorted(points, key=lambda p: p.threshold):
        if best is None or point.report.product > best.report.product:
            best = point
    return best.threshold, best.report.product


def sweep_table(points: Sequence[SweepPoint]) -> str:
    """Flat tab-separated table (one row per threshold) for plotting."""
    lines = ["threshold\trecall_anxiety\trecall_non_anxiety\taccuracy\tproduct"]
    for p in points:
        r = p.report
        lines.append(
            f"{p.threshold!r}\t{r.recall_anxiety:.6f}\t{r.recall_non_anxiety:.6f}"
            f"\t{r.accuracy:.6f}\t{r.product:.6f}"
        )
    return "\n".join(lines)


def parse_grid(spec: str) -> list[float]:
    """Parse a ``start:stop:step`` grid spec into an ascending threshold list.

    Stepping is done in exact arithmetic so decimal grids land exactly on
    their endpoints (0.5:5.0:0.5 includes 5.0).
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"grid values must be decimal numbers: {spec!r}") from None
    if start <= 0 or step <= 0 or stop < start:
        raise ValueError(f"grid requires 0 < start <= stop and step > 0: {spec!r}")
    values = []
    current = start
    while current <= stop:
        values.append(float(current))
        current += step
    return values
