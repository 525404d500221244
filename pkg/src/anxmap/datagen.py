"""Seeded synthetic corpora for tests, demos, and the hidden `gen` command.

The original tagged tweet collection is not redistributable, so every
fixture here is generated: the six-word toy corpus matching the worked
frequency-table example, small random corpora for oracle checks, a 10:1
class-imbalanced corpus, and geotagged record streams for the store.
All generators take an explicit random.Random so identical seeds give
identical corpora.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .classifier import ClassifierConfig, ClassifierModel, ClassLabel, train
from .corpus import Record, serialize_record
from .tokenizer import Token

_POS_CYCLE = ("NNG", "VV", "VA", "MM", "MAG")

#: The worked-example vocabulary with its per-class counts
#: (NonAnxiety, Anxiety); column totals are 1000 and 100.
TABLE_VOCAB: tuple[tuple[Token, tuple[int, int]], ...] = (
    (Token("w_A", "NNG"), (200, 30)),
    (Token("w_B", "VV"), (100, 10)),
    (Token("w_C", "VA"), (200, 0)),
    (Token("w_D", "NNG"), (100, 20)),
    (Token("w_E", "VV"), (0, 30)),
    (Token("w_F", "MAG"), (400, 10)),
)


def table_corpus() -> list[tuple[list[Token], ClassLabel]]:
    """The toy corpus: one single-token document per counted occurrence.

    Training on it reproduces the example frequency dictionaries exactly,
    with document counts (1000, 100) usable as priors.
    """
    docs = []
    for token, counts in TABLE_VOCAB:
        for label, count in zip((ClassLabel.NON_ANXIETY, ClassLabel.ANXIETY), counts):
            docs.extend(([token], label) for _ in range(count))
    return docs


def table_model(smoothing: bool = True, threshold: float = 2.5) -> ClassifierModel:
    return train(table_corpus(), ClassifierConfig(smoothing=smoothing, threshold=threshold))


def small_corpus(rng: random.Random) -> tuple[list[tuple[list[Token], ClassLabel]], list[Token]]:
    """A tiny random corpus: vocab <= 6, <= 20 docs, doc length <= 5.

    Returns (documents, vocabulary). Occasionally both-class or
    single-class, so degenerate paths get exercised too.
    """
    vocab = [Token(f"w{i}", rng.choice(_POS_CYCLE)) for i in range(rng.randint(1, 6))]
    force_label = rng.choice((None, None, None, None, ClassLabel.NON_ANXIETY, ClassLabel.ANXIETY))
    docs = []
    for _ in range(rng.randint(1, 20)):
        label = force_label if force_label is not None else rng.choice(tuple(ClassLabel))
        docs.append(([rng.choice(vocab) for _ in range(rng.randint(0, 5))], label))
    return docs, vocab


def random_sequences(rng: random.Random, vocab: Sequence[Token], n: int) -> list[list[Token]]:
    """Test sequences over a vocabulary, with occasional unseen tokens."""
    out = []
    for _ in range(n):
        seq = []
        for _ in range(rng.randint(0, 5)):
            if vocab and rng.random() < 0.9:
                seq.append(rng.choice(vocab))
            else:
                seq.append(Token(f"oov{rng.randint(0, 3)}", "NNG"))
        out.append(seq)
    return out


def imbalanced_corpus(
    rng: random.Random,
    n_docs: int,
    anxious_frac: float = 0.1,
    vocab_size: int = 30,
    doc_len: tuple[int, int] = (4, 9),
    sharpness: float = 3.0,
) -> list[tuple[list[Token], ClassLabel]]:
    """Class-imbalanced documents with weakly informative word distributions.

    Both classes draw from the same vocabulary under opposed geometric-ish
    weights; ``sharpness`` controls how much the classes separate. With the
    default ~10% anxious share, prior-weighted scoring needs strong
    evidence to ever predict Anxiety while the plain ratio rule does not.
    """
    vocab = [Token(f"v{i:02d}", _POS_CYCLE[i % len(_POS_CYCLE)]) for i in range(vocab_size)]
    ramp = [i / (vocab_size - 1) for i in range(vocab_size)]
    weights_anx = [1.0 + sharpness * r for r in ramp]
    weights_non = [1.0 + sharpness * (1.0 - r) for r in ramp]
    docs = []
    for _ in range(n_docs):
        anxious = rng.random() < anxious_frac
        weights = weights_anx if anxious else weights_non
        length = rng.randint(*doc_len)
        seq = rng.choices(vocab, weights=weights, k=length)
        docs.append((seq, ClassLabel.ANXIETY if anxious else ClassLabel.NON_ANXIETY))
    return docs


KOREA_BOX = ((33.0, 39.0), (124.5, 131.0))
NEGATIVE_BOX = ((-4.0, 4.0), (-6.0, 2.0))

_EPOCH = datetime(2017, 1, 1, tzinfo=timezone.utc)


def geo_records(
    rng: random.Random,
    n: int,
    id_prefix: str = "m",
    vocab_size: int = 12,
    time_span_s: int = 3600,
    unlabeled_frac: float = 0.25,
    anxious_frac: float = 0.35,
    sharpness: float = 4.0,
) -> list[Record]:
    """Geotagged, timestamped records over a small mixed-POS vocabulary.

    Token choice correlates with an underlying mood so trained models
    produce mixed predictions (unlabeled records still carry the signal).
    A narrow time span forces same-second collisions (ordering tie-breaks
    must be exercised); a slice of records lands in a box with negative
    coordinates so cell flooring is tested below zero. Insignificant-POS
    tokens are mixed in to exercise the filter.
    """
    sig_vocab = [Token(f"g{i:02d}", _POS_CYCLE[i % len(_POS_CYCLE)]) for i in range(vocab_size)]
    noise_vocab = [Token("josa", "JKS"), Token("eomi", "EC"), Token("punct", "SF")]
    ramp = [i / (vocab_size - 1) for i in range(vocab_size)]
    weights_anx = [1.0 + sharpness * r for r in ramp]
    weights_non = [1.0 + sharpness * (1.0 - r) for r in ramp]
    records = []
    for i in range(n):
        box = NEGATIVE_BOX if rng.random() < 0.2 else KOREA_BOX
        lat = rng.uniform(*box[0])
        lon = rng.uniform(*box[1])
        ts = _EPOCH + timedelta(seconds=rng.randint(0, time_span_s - 1))
        anxious_mood = rng.random() < anxious_frac
        weights = weights_anx if anxious_mood else weights_non
        tokens = []
        for _ in range(rng.randint(1, 7)):
            if rng.random() < 0.2:
                tokens.append(rng.choice(noise_vocab))
            else:
                tokens.append(rng.choices(sig_vocab, weights=weights, k=1)[0])
        label = None if rng.random() < unlabeled_frac else (
            ClassLabel.ANXIETY if anxious_mood else ClassLabel.NON_ANXIETY
        )
        records.append(
            Record(
                id=f"{id_prefix}{i:06d}",
                text=" ".join(t.surface for t in tokens),
                tokens=tuple(tokens),
                label=label,
                lat=lat,
                lon=lon,
                ts=ts,
            )
        )
    return records


def geo_model(rng: random.Random, smoothing: bool = True, threshold: float = 2.5) -> ClassifierModel:
    """A model over the geo vocabulary so generated streams classify non-trivially."""
    docs = [
        ([t for t in rec.tokens if t.pos in _POS_CYCLE], rec.label)
        for rec in geo_records(rng, 400, id_prefix="train")
        if rec.label is not None
    ]
    return train(docs, ClassifierConfig(smoothing=smoothing, threshold=threshold))


def labeled_records(
    docs: Iterable[tuple[Sequence[Token], ClassLabel]],
    rng: random.Random,
    id_prefix: str = "d",
) -> list[Record]:
    """Wrap plain labeled documents as corpus records (coords/ts synthesized)."""
    records = []
    for i, (tokens, label) in enumerate(docs):
        lat = rng.uniform(*KOREA_BOX[0])
        lon = rng.uniform(*KOREA_BOX[1])
        records.append(
            Record(
                id=f"{id_prefix}{i:06d}",
                text=" ".join(t.surface for t in tokens),
                tokens=tuple(tokens),
                label=label,
                lat=lat,
                lon=lon,
                ts=_EPOCH + timedelta(seconds=i),
            )
        )
    return records


def write_corpus(path: str | Path, records: Iterable[Record]) -> int:
    """Write records as corpus lines; returns the record count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(serialize_record(rec) + "\n")
            count += 1
    return count
