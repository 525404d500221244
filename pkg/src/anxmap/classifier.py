"""Binary anxiety classifier over token frequency dictionaries.

Builds per-class frequency tables from labeled token sequences and scores
sequences two ways: a likelihood-ratio rule with a configurable decision
threshold, and prior-weighted (MAP) scoring. Products of per-token
probabilities are accumulated in log space; zero factors become -inf
rather than underflowing.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .jsonfmt import canon_dumps
from .tokenizer import SIGNIFICANT_POS, Token

NEG_INF = float("-inf")

MODEL_VERSION = "1"


class ClassLabel(enum.Enum):
    NON_ANXIETY = "NonAnxiety"
    ANXIETY = "Anxiety"


#: Fixed class indexing used by every counts pair in this package:
#: index 0 is NonAnxiety, index 1 is Anxiety.
CLASS_ORDER: tuple[ClassLabel, ClassLabel] = (ClassLabel.NON_ANXIETY, ClassLabel.ANXIETY)

_CLASS_INDEX = {ClassLabel.NON_ANXIETY: 0, ClassLabel.ANXIETY: 1}


def label_index(label: ClassLabel) -> int:
    return _CLASS_INDEX[label]


def label_from_index(index: int) -> ClassLabel:
    return CLASS_ORDER[index]


class EmptyCorpus(ValueError):
    """Training corpus contained no documents."""


class ZeroDenominator(ValueError):
    """A word likelihood was requested for a class with no probability mass."""


class NoPrior(ValueError):
    """MAP scoring requested on a model with zero documents in both classes."""


class ModelFormatError(ValueError):
    """Base class for model file problems."""


class VersionMismatch(ModelFormatError):
    """Model file carries an unsupported format version."""


class CorruptModel(ModelFormatError):
    """Model file is unreadable or internally inconsistent."""


@dataclass(frozen=True, slots=True)
class ClassifierConfig:
    """Decision configuration stored alongside a trained model."""

    smoothing: bool = True
    threshold: float = 2.5
    pos_filter: frozenset[str] = SIGNIFICANT_POS

    def __post_init__(self):
        if not (self.threshold > 0):
            raise ValueError(f"threshold must be positive, got {self.threshold!r}")
        object.__setattr__(self, "pos_filter", frozenset(self.pos_filter))


@dataclass(frozen=True)
class ClassifierModel:
    """Per-class token frequency tables plus totals and configuration.

    ``freq`` maps each vocabulary token to its (NonAnxiety, Anxiety) counts;
    only tokens seen in at least one class are present, so
    ``vocab_size == len(freq)``. ``total_tokens`` are the per-class column
    totals and ``doc_count`` the number of training documents per class.
    Instances are immutable after training/loading and safe to share across
    threads.
    """

    freq: Mapping[Token, tuple[int, int]]
    total_tokens: tuple[int, int]
    doc_count: tuple[int, int]
    vocab_size: int
    config: ClassifierConfig = field(default_factory=ClassifierConfig)


@dataclass(frozen=True, slots=True)
class ClassificationResult:
    """Outcome of classifying one token sequence.

    ``log_lik`` holds the per-class log-likelihoods (natural log, may be
    -inf), indexed by :data:`CLASS_ORDER`. When both are finite,
    ``ratio == exp(log_lik[1] - log_lik[0])``. ``degenerate`` flags the
    case where both classes assigned zero likelihood.
    """

    log_lik: tuple[float, float]
    ratio: float
    label: ClassLabel
    method: str
    degenerate: bool = False


def train(
    corpus: Iterable[tuple[Sequence[Token], ClassLabel]],
    config: ClassifierConfig | None = None,
) -> ClassifierModel:
    """Build frequency dictionaries from labeled, already-filtered sequences.

    Counts reflect token multiplicity within a document. The corpus may be
    empty for one class but not overall (:class:`EmptyCorpus`).
    """
    if config is None:
        config = ClassifierConfig()
    freq: dict[Token, list[int]] = {}
    totals = [0, 0]
    docs = [0, 0]
    for seq, label in corpus:
        i = label_index(label)
        docs[i] += 1
        for tok in seq:
            counts = freq.get(tok)
            if counts is None:
                counts = freq[tok] = [0, 0]
            counts[i] += 1
            totals[i] += 1
    if docs[0] + docs[1] == 0:
        raise EmptyCorpus("training corpus has no documents")
    finalized = {tok: (c[0], c[1]) for tok, c in freq.items()}
    return ClassifierModel(
        freq=finalized,
        total_tokens=(totals[0], totals[1]),
        doc_count=(docs[0], docs[1]),
        vocab_size=len(finalized),
        config=config,
    )


def word_likelihood(
    model: ClassifierModel, token: Token, label: ClassLabel, smoothing: bool | None = None
) -> float:
    """P(token | class): raw relative frequency, or the add-one estimate.

    Unsmoothed: count/total, 0 for tokens unseen in the class. Smoothed:
    (count+1)/(total+vocabulary size). Raises :class:`ZeroDenominator`
    when the denominator has no mass.
    """
    if smoothing is None:
        smoothing = model.config.smoothing
    i = label_index(label)
    count = model.freq.get(token, (0, 0))[i]
    if smoothing:
        denom = model.total_tokens[i] + model.vocab_size
        if denom == 0:
            raise ZeroDenominator(f"empty model: no tokens and no vocabulary for {label.value}")
        return (count + 1) / denom
    if model.total_tokens[i] == 0:
        raise ZeroDenominator(f"no {label.value} tokens and smoothing is off")
    return count / model.total_tokens[i]


def sequence_log_likelihood(
    model: ClassifierModel, seq: Sequence[Token], label: ClassLabel, smoothing: bool | None = None
) -> float:
    """Sum of log word likelihoods over the in-vocabulary tokens of ``seq``.

    Out-of-vocabulary tokens are skipped entirely (they would affect both
    classes symmetrically and leave the ratio undefined otherwise). An
    empty effective sequence yields 0.0, the log of the empty product; any
    zero factor yields -inf.
    """
    if smoothing is None:
        smoothing = model.config.smoothing
    return _effective_log_likelihood(model, _effective_tokens(model, seq), label_index(label), smoothing)


def classify_ratio(
    model: ClassifierModel,
    seq: Sequence[Token],
    threshold: float | None = None,
    smoothing: bool | None = None,
) -> ClassificationResult:
    """Label a sequence Anxiety iff its likelihood ratio strictly exceeds the threshold."""
    return score_ratio(model, seq, smoothing).result_at(
        model.config.threshold if threshold is None else threshold
    )


def score_ratio(
    model: ClassifierModel, seq: Sequence[Token], smoothing: bool | None = None
) -> "RatioScore":
    """Compute the threshold-independent part of a ratio classification.

    Threshold sweeps reuse one :class:`RatioScore` per item so an N-threshold
    sweep costs a single scoring pass; ``result_at`` is exactly what
    :func:`classify_ratio` returns for the same inputs.
    """
    if smoothing is None:
        smoothing = model.config.smoothing
    eff = _effective_tokens(model, seq)
    log_lik = (
        _effective_log_likelihood(model, eff, 0, smoothing),
        _effective_log_likelihood(model, eff, 1, smoothing),
    )
    degenerate = log_lik[0] == NEG_INF and log_lik[1] == NEG_INF
    if log_lik[1] == NEG_INF:
        ratio = 0.0
    elif log_lik[0] == NEG_INF:
        ratio = math.inf
    else:
        ratio = _exp(log_lik[1] - log_lik[0])
    return RatioScore(_model=model, _effective=eff, _smoothing=smoothing, log_lik=log_lik, ratio=ratio, degenerate=degenerate)


@dataclass(frozen=True, slots=True)
class RatioScore:
    """Likelihoods and ratio for one sequence, reusable across thresholds."""

    _model: ClassifierModel
    _effective: tuple[Token, ...]
    _smoothing: bool
    log_lik: tuple[float, float]
    ratio: float
    degenerate: bool

    def anxious_at(self, threshold: float) -> bool:
        """Apply the strict ratio > threshold rule.

        Float rounding can land exp(llr) on the wrong side when the exact
        ratio equals the threshold, so near-tie margins are settled in
        exact rational arithmetic; the strict inequality then holds
        verbatim.
        """
        if not (threshold > 0):
            raise ValueError(f"threshold must be positive, got {threshold!r}")
        ll_non, ll_anx = self.log_lik
        if ll_anx == NEG_INF:
            return False
        if ll_non == NEG_INF:
            return True
        llr = ll_anx - ll_non
        log_t = math.log(threshold)
        if abs(llr - log_t) < 1e-9 * (1.0 + abs(ll_non) + abs(ll_anx) + abs(log_t)):
            p_non = _exact_likelihood(self._model, self._effective, 0, self._smoothing)
            p_anx = _exact_likelihood(self._model, self._effective, 1, self._smoothing)
            return p_anx > Fraction(threshold) * p_non
        return self.ratio > threshold

    def result_at(self, threshold: float) -> ClassificationResult:
        label = ClassLabel.ANXIETY if self.anxious_at(threshold) else ClassLabel.NON_ANXIETY
        return ClassificationResult(
            log_lik=self.log_lik,
            ratio=self.ratio,
            label=label,
            method="ML-ratio",
            degenerate=self.degenerate,
        )


def classify_map(
    model: ClassifierModel, seq: Sequence[Token], smoothing: bool | None = None
) -> ClassificationResult:
    """Label by the larger of prior x likelihood; ties go to NonAnxiety.

    Priors come from training document counts. ``log_lik`` and ``ratio``
    in the result stay pure likelihood quantities; the prior enters only
    the decision.
    """
    if smoothing is None:
        smoothing = model.config.smoothing
    total_docs = model.doc_count[0] + model.doc_count[1]
    if total_docs == 0:
        raise NoPrior("both document counts are zero")
    eff = _effective_tokens(model, seq)
    log_lik = (
        _effective_log_likelihood(model, eff, 0, smoothing),
        _effective_log_likelihood(model, eff, 1, smoothing),
    )
    scores = tuple(
        NEG_INF if model.doc_count[i] == 0 else math.log(model.doc_count[i] / total_docs) + log_lik[i]
        for i in (0, 1)
    )
    if scores[1] == NEG_INF:
        anxious = False
    elif scores[0] == NEG_INF:
        anxious = True
    elif abs(scores[1] - scores[0]) < 1e-9 * (1.0 + abs(scores[0]) + abs(scores[1])):
        # same near-tie rule as the ratio path: exact arithmetic decides
        post_non = Fraction(model.doc_count[0], total_docs) * _exact_likelihood(model, eff, 0, smoothing)
        post_anx = Fraction(model.doc_count[1], total_docs) * _exact_likelihood(model, eff, 1, smoothing)
        anxious = post_anx > post_non
    else:
        anxious = scores[1] > scores[0]
    if log_lik[1] == NEG_INF:
        ratio = 0.0
    elif log_lik[0] == NEG_INF:
        ratio = math.inf
    else:
        ratio = _exp(log_lik[1] - log_lik[0])
    return ClassificationResult(
        log_lik=log_lik,
        ratio=ratio,
        label=ClassLabel.ANXIETY if anxious else ClassLabel.NON_ANXIETY,
        method="MAP",
        degenerate=log_lik[0] == NEG_INF and log_lik[1] == NEG_INF,
    )


def save_model(model: ClassifierModel) -> bytes:
    """Serialize to the versioned model file format (deterministic bytes).

    Vocabulary is sorted by (surface, pos) so identical models always
    produce identical files.
    """
    vocab = [
        {"surface": tok.surface, "pos": tok.pos, "counts": [c[0], c[1]]}
        for tok, c in sorted(model.freq.items(), key=lambda kv: (kv[0].surface, kv[0].pos))
    ]
    doc = {
        "version": MODEL_VERSION,
        "classes": [label.value for label in CLASS_ORDER],
        "vocab": vocab,
        "total_tokens": list(model.total_tokens),
        "doc_count": list(model.doc_count),
        "config": {
            "smoothing": model.config.smoothing,
            "threshold": model.config.threshold,
            "pos_filter": sorted(model.config.pos_filter),
        },
    }
    return (canon_dumps(doc) + "\n").encode("utf-8")


def load_model(data: bytes) -> ClassifierModel:
    """Parse and validate a model file; inverse of :func:`save_model`."""
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"unparseable model file: {exc}") from None
    if not isinstance(obj, dict):
        raise CorruptModel("model file must be a JSON object")
    version = obj.get("version")
    if version != MODEL_VERSION:
        raise VersionMismatch(f"unsupported model version {version!r} (expected {MODEL_VERSION!r})")
    if obj.get("classes") != [label.value for label in CLASS_ORDER]:
        raise CorruptModel(f"unexpected class list: {obj.get('classes')!r}")

    freq: dict[Token, tuple[int, int]] = {}
    sums = [0, 0]
    for entry in _expect(obj, "vocab", list):
        if not isinstance(entry, dict):
            raise CorruptModel("vocab entries must be objects")
        try:
            tok = Token(entry["surface"], entry["pos"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptModel(f"bad vocab token: {exc}") from None
        counts = entry.get("counts")
        if not _is_count_pair(counts):
            raise CorruptModel(f"bad counts for {tok.surface}/{tok.pos}: {counts!r}")
        if counts[0] + counts[1] == 0:
            raise CorruptModel(f"zero-count vocab entry {tok.surface}/{tok.pos}")
        if tok in freq:
            raise CorruptModel(f"duplicate vocab entry {tok.surface}/{tok.pos}")
        freq[tok] = (counts[0], counts[1])
        sums[0] += counts[0]
        sums[1] += counts[1]

    total_tokens = _expect(obj, "total_tokens", list)
    if not _is_count_pair(total_tokens) or list(total_tokens) != sums:
        raise CorruptModel(f"total_tokens {total_tokens!r} do not match vocabulary sums {sums}")
    doc_count = _expect(obj, "doc_count", list)
    if not _is_count_pair(doc_count):
        raise CorruptModel(f"bad doc_count: {doc_count!r}")

    cfg = _expect(obj, "config", dict)
    smoothing = cfg.get("smoothing")
    if not isinstance(smoothing, bool):
        raise CorruptModel(f"bad config smoothing: {smoothing!r}")
    threshold = cfg.get("threshold")
    if isinstance(threshold, bool) or not isinstance(threshold, (int, float)):
        raise CorruptModel(f"bad config threshold: {threshold!r}")
    pos_filter = cfg.get("pos_filter")
    if not isinstance(pos_filter, list) or not all(isinstance(p, str) for p in pos_filter):
        raise CorruptModel(f"bad config pos_filter: {pos_filter!r}")
    try:
        config = ClassifierConfig(
            smoothing=smoothing, threshold=float(threshold), pos_filter=frozenset(pos_filter)
        )
    except ValueError as exc:
        raise CorruptModel(f"bad config: {exc}") from None

    return ClassifierModel(
        freq=freq,
        total_tokens=(total_tokens[0], total_tokens[1]),
        doc_count=(doc_count[0], doc_count[1]),
        vocab_size=len(freq),
        config=config,
    )


def _expect(obj: dict, key: str, types) -> object:
    value = obj.get(key)
    if not isinstance(value, types):
        raise CorruptModel(f"missing or mistyped field {key!r}")
    return value


def _is_count_pair(value) -> bool:
    return (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(c, int) and not isinstance(c, bool) and c >= 0 for c in value)
    )


def _effective_tokens(model: ClassifierModel, seq: Sequence[Token]) -> tuple[Token, ...]:
    return tuple(tok for tok in seq if tok in model.freq)


def _effective_log_likelihood(
    model: ClassifierModel, effective: tuple[Token, ...], i: int, smoothing: bool
) -> float:
    if not effective:
        return 0.0
    if smoothing:
        denom = model.total_tokens[i] + model.vocab_size
        total = 0.0
        for tok in effective:
            total += math.log((model.freq[tok][i] + 1) / denom)
        return total
    if model.total_tokens[i] == 0:
        # a class with no training tokens assigns zero likelihood to any seen token
        return NEG_INF
    total = 0.0
    for tok in effective:
        count = model.freq[tok][i]
        if count == 0:
            return NEG_INF
        total += math.log(count / model.total_tokens[i])
    return total


def _exact_likelihood(
    model: ClassifierModel, effective: tuple[Token, ...], i: int, smoothing: bool
) -> Fraction:
    p = Fraction(1)
    for tok in effective:
        if smoothing:
            p *= Fraction(model.freq[tok][i] + 1, model.total_tokens[i] + model.vocab_size)
        else:
            if model.total_tokens[i] == 0:
                return Fraction(0)
            p *= Fraction(model.freq[tok][i], model.total_tokens[i])
    return p


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf
