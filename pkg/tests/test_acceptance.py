"""Acceptance criteria, one test per criterion.

Each test pins its numeric tolerance and asserts its runtime budget;
the terminal summary prints one PASS/FAIL line per criterion.
"""

import json
import math
import random
import signal
import socket
import subprocess
import sys
import time
import urllib.parse
import urllib.request
from datetime import timedelta
from fractions import Fraction
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings, strategies as st

from anxmap.classifier import (
    ClassifierConfig,
    ClassifierModel,
    ClassLabel,
    classify_map,
    classify_ratio,
    load_model,
    save_model,
    sequence_log_likelihood,
    train,
)
from anxmap.corpus import Record, parse_record, parse_ts, serialize_record
from anxmap.datagen import (
    geo_model,
    geo_records,
    imbalanced_corpus,
    random_sequences,
    small_corpus,
    table_model,
)
from anxmap.evaluation import DEFAULT_SWEEP_GRID, evaluate, select_threshold, sweep
from anxmap.geostore import GeoStore, TimeRange
from anxmap.service import create_app
from anxmap.tokenizer import Token, parse_tagged_text, serialize_tagged

import oracle

pytestmark = pytest.mark.acceptance

ANX, NON = ClassLabel.ANXIETY, ClassLabel.NON_ANXIETY
W_A, W_B, W_C = Token("w_A", "NNG"), Token("w_B", "VV"), Token("w_C", "VA")
W_D, W_E, W_F = Token("w_D", "NNG"), Token("w_E", "VV"), Token("w_F", "MAG")

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

REL = 1e-12


def relerr(got, want):
    return abs(got - want) / max(abs(want), 1e-300)


def test_criterion_1_worked_example_fidelity():
    """Unsmoothed sequence probabilities and threshold-1 labels."""
    started = time.monotonic()
    model = table_model(smoothing=False, threshold=1.0)

    cases = [
        ([W_A, W_B, W_D], ANX, 0.006),
        ([W_A, W_B, W_D], NON, 0.002),
        ([W_B, W_D, W_F], ANX, 0.002),
        ([W_B, W_D, W_F], NON, 0.004),
    ]
    for seq, label, expected in cases:
        prob = math.exp(sequence_log_likelihood(model, seq, label, smoothing=False))
        assert relerr(prob, expected) <= REL, (seq, label, prob, expected)

    assert classify_ratio(model, [W_A, W_B, W_D], threshold=1.0, smoothing=False).label is ANX
    assert classify_ratio(model, [W_B, W_D, W_F], threshold=1.0, smoothing=False).label is NON

    assert time.monotonic() - started < 1.0


def test_criterion_2_smoothing_fidelity():
    """Smoothed probabilities equal the exact rationals 961/106^3, 40401/1006^3."""
    started = time.monotonic()
    model = table_model(smoothing=True, threshold=2.5)
    seq = [W_A, W_C, W_E]
    exact_anx = Fraction(961, 106**3)
    exact_non = Fraction(40401, 1006**3)

    # the independent rational oracle lands on the same two rationals, exactly
    from anxmap.datagen import table_corpus

    freq, totals, _ = oracle.count_corpus(table_corpus())
    assert oracle.exact_seq_prob(freq, totals, 6, seq, 1, smoothing=True) == exact_anx
    assert oracle.exact_seq_prob(freq, totals, 6, seq, 0, smoothing=True) == exact_non

    prob_anx = math.exp(sequence_log_likelihood(model, seq, ANX, smoothing=True))
    prob_non = math.exp(sequence_log_likelihood(model, seq, NON, smoothing=True))
    assert relerr(prob_anx, float(exact_anx)) <= REL
    assert relerr(prob_non, float(exact_non)) <= REL

    # printed precision: within one unit of the last printed decimal
    assert abs(prob_anx - 0.000806) < 1e-6
    assert abs(prob_non - 0.000039) < 1e-6

    assert classify_ratio(model, seq, threshold=1.0, smoothing=True).label is ANX
    assert classify_ratio(model, seq, threshold=2.5, smoothing=True).label is ANX

    assert time.monotonic() - started < 1.0


def test_criterion_3_oracle_equivalence():
    """Log-space labels match exact-rational brute force on 1,000 corpora."""
    started = time.monotonic()
    rng = random.Random(31337)
    corpora = 0
    checks = 0
    mismatches = 0
    while corpora < 1000:
        docs, vocab = small_corpus(rng)
        corpora += 1
        model = train(docs)
        freq, totals, doc_counts = oracle.count_corpus(docs)
        smoothing = rng.random() < 0.5
        threshold = rng.choice([1.0, 2.5, 0.5, 1.5, rng.uniform(0.25, 5.0)])
        for seq in random_sequences(rng, vocab, 4):
            got = classify_ratio(model, seq, threshold=threshold, smoothing=smoothing).label
            want = oracle.exact_ratio_label(freq, totals, model.vocab_size, seq, threshold, smoothing)
            mismatches += got is not want
            got_map = classify_map(model, seq, smoothing=smoothing).label
            want_map = oracle.exact_map_label(freq, totals, doc_counts, model.vocab_size, seq, smoothing)
            mismatches += got_map is not want_map
            checks += 2
    assert corpora >= 1000 and checks >= 8000
    assert mismatches == 0, f"{mismatches}/{checks} label mismatches"
    assert time.monotonic() - started < 30.0


def test_criterion_4_imbalance_ordering_and_interior_peak():
    """The reported-ordering substitute on a seeded 10:1 corpus, plus sweep selection."""
    started = time.monotonic()
    rng = random.Random(42)
    docs = imbalanced_corpus(rng, 6000)
    train_docs, test_docs = docs[:5000], docs[5000:]
    assert len(test_docs) == 1000
    model = train(train_docs, ClassifierConfig(smoothing=True, threshold=1.0))

    ml = evaluate(model, test_docs, method="ml", threshold=1.0)
    mp = evaluate(model, test_docs, method="map")
    assert mp.recall_anxiety < ml.recall_anxiety, (mp.recall_anxiety, ml.recall_anxiety)
    assert mp.accuracy > ml.accuracy, (mp.accuracy, ml.accuracy)

    # sweep selection equals a from-scratch exact-arithmetic argmax, interior to the grid
    grid = list(DEFAULT_SWEEP_GRID)
    selected, product = select_threshold(sweep(model, test_docs, grid))

    freq, totals, _ = oracle.count_corpus(train_docs)
    exact_pairs = [
        (
            oracle.exact_seq_prob(freq, totals, model.vocab_size, seq, 0, True),
            oracle.exact_seq_prob(freq, totals, model.vocab_size, seq, 1, True),
            gold,
        )
        for seq, gold in test_docs
    ]
    best = None
    for t in grid:
        t_frac = Fraction(t)
        tp = fn = tn = fp = 0
        for p_non, p_anx, gold in exact_pairs:
            anxious = p_anx > t_frac * p_non if p_non > 0 else p_anx > 0
            if gold is ANX:
                tp, fn = tp + anxious, fn + (not anxious)
            else:
                fp, tn = fp + anxious, tn + (not anxious)
        prod = Fraction(tp, tp + fn) * Fraction(tp + tn, len(exact_pairs))
        if best is None or prod > best[1]:
            best = (t, prod)

    assert selected == best[0]
    assert relerr(product, float(best[1])) <= 1e-9
    assert grid[0] < selected < grid[-1], f"peak {selected} not interior"

    assert time.monotonic() - started < 60.0


def test_criterion_5_sweep_monotonicity():
    """recall(Anxiety) never increases across ascending thresholds: 100 corpora."""
    started = time.monotonic()
    rng = random.Random(777)
    violations = 0
    for _ in range(100):
        docs, vocab = small_corpus(rng)
        model = train(docs)
        test = [
            ([rng.choice(vocab) for _ in range(rng.randint(0, 5))], rng.choice((ANX, NON)))
            for _ in range(rng.randint(1, 40))
        ]
        points = sweep(model, test, DEFAULT_SWEEP_GRID)
        recalls = [p.report.recall_anxiety for p in points]
        violations += sum(1 for a, b in zip(recalls, recalls[1:]) if b > a)
    assert violations == 0
    assert time.monotonic() - started < 30.0


def _scan_tables(model):
    return {t: list(c) for t, c in model.freq.items()}, list(model.total_tokens), list(model.doc_count)


def test_criterion_6_geostore_oracle():
    """50 seeded 1,000-record stores: API responses equal plain scans."""
    started = time.monotonic()
    model = geo_model(random.Random(1000))
    freq, totals, doc_counts = _scan_tables(model)
    base_from = parse_ts("2017-01-01T00:00:00Z")

    for store_i in range(50):
        records = geo_records(random.Random(5000 + store_i), 1000)
        store = GeoStore(model)
        report = store.ingest_lines(serialize_record(r) for r in records)
        assert report.accepted == 1000
        scans = [
            oracle.scan_record(r, freq, totals, doc_counts, model.vocab_size,
                               model.config.threshold, model.config.smoothing)
            for r in records
        ]
        client = TestClient(create_app(store, model))

        # half-open boundary: end the second window exactly on a record timestamp
        boundary = records[store_i % len(records)].ts
        windows = [
            ("2017-01-01T00:00:00Z", "2017-01-01T01:00:00Z"),
            ("2017-01-01T00:00:00Z", boundary.strftime("%Y-%m-%dT%H:%M:%SZ")),
        ]
        if boundary == base_from:
            windows[1] = ("2017-01-01T00:00:00Z", "2017-01-01T00:30:00Z")

        province_payload = None
        for w_from, w_to in windows:
            t0, t1 = parse_ts(w_from), parse_ts(w_to)
            for zoom in ("province", "county"):
                resp = client.get("/api/regions", params={"from": w_from, "to": w_to, "zoom": zoom})
                got = resp.json()
                assert got == oracle.scan_aggregate(scans, t0, t1, zoom), (store_i, zoom, w_from, w_to)
                if zoom == "province" and (w_from, w_to) == windows[0]:
                    province_payload = got

        # county totals partition province totals
        county = client.get("/api/regions", params={"from": windows[0][0], "to": windows[0][1], "zoom": "county"}).json()
        sums = {}
        for agg in county:
            key = (agg["cell"]["row"] // 5, agg["cell"]["col"] // 5)
            sums[key] = sums.get(key, 0) + agg["total"]
        assert sums == {(a["cell"]["row"], a["cell"]["col"]): a["total"] for a in province_payload}

        # tweets: busiest cell, with filter and pagination
        busiest = max(province_payload, key=lambda a: a["total"])["cell"]
        t0, t1 = parse_ts(windows[0][0]), parse_ts(windows[0][1])
        for q, offset, limit in (("", 0, 500), ("g01", 0, 500), ("g01 g02", 0, 500), ("", 5, 7)):
            params = {"row": busiest["row"], "col": busiest["col"], "zoom": "province",
                      "from": windows[0][0], "to": windows[0][1], "offset": offset, "limit": limit}
            if q:
                params["q"] = q
            got = client.get("/api/tweets", params=params).json()
            want_ids, want_total = oracle.scan_tweets(
                scans, busiest["row"], busiest["col"], "province", t0, t1, q.split(), offset, limit
            )
            assert [m["id"] for m in got["messages"]] == want_ids, (store_i, q, offset)
            assert got["total"] == want_total

        # word clouds: busiest cell and store-wide
        got = client.get("/api/wordcloud", params={"row": busiest["row"], "col": busiest["col"],
                                                   "zoom": "province", "from": windows[0][0],
                                                   "to": windows[0][1], "k": 10}).json()
        assert got["items"] == oracle.scan_wordcloud(
            scans, (busiest["row"], busiest["col"], "province"), t0, t1, 10
        )
        got = client.get("/api/wordcloud", params={"from": windows[0][0], "to": windows[0][1], "k": 6}).json()
        assert got["items"] == oracle.scan_wordcloud(scans, None, t0, t1, 6)

    assert time.monotonic() - started < 60.0


_surface = st.text(
    alphabet=st.characters(min_codepoint=33, max_codepoint=0x2FFF, blacklist_categories=("Zs", "Zl", "Zp", "Cc", "Cs")),
    min_size=1,
    max_size=6,
).filter(lambda s: not any(ch.isspace() for ch in s))
_slashy_surface = st.one_of(_surface, _surface.map(lambda s: f"a/{s}"), st.just("\\"), st.just("a\\/b"))
_token = st.builds(Token, _slashy_surface, st.sampled_from(["NNG", "VV", "VA", "MM", "MAG", "JKS"]))
_counts = st.tuples(st.integers(0, 30), st.integers(0, 30)).filter(lambda c: sum(c) > 0)


class TestCriterion7RoundTrips:
    @settings(max_examples=120, deadline=None)
    @given(st.dictionaries(_token, _counts, max_size=10), st.integers(0, 99), st.integers(0, 99),
           st.booleans(), st.floats(min_value=0.01, max_value=50, allow_nan=False))
    def test_model_save_load_identity(self, freq, dn, da, smoothing, threshold):
        model = ClassifierModel(
            freq=freq,
            total_tokens=(sum(c[0] for c in freq.values()), sum(c[1] for c in freq.values())),
            doc_count=(max(dn, 1), da),
            vocab_size=len(freq),
            config=ClassifierConfig(smoothing=smoothing, threshold=threshold),
        )
        assert load_model(save_model(model)) == model

    @settings(max_examples=120, deadline=None)
    @given(st.lists(_token, max_size=8))
    def test_tagged_line_escaping_roundtrip(self, tokens):
        assert parse_tagged_text(serialize_tagged(tokens)) == tokens

    @settings(max_examples=120, deadline=None)
    @given(
        st.lists(_token, max_size=6).map(tuple),
        st.sampled_from([None, NON, ANX]),
        st.floats(min_value=-90, max_value=90, allow_nan=False),
        st.floats(min_value=-180, max_value=180, allow_nan=False),
        st.integers(0, 2**31 - 1),
    )
    def test_corpus_line_roundtrip(self, tokens, label, lat, lon, epoch):
        from datetime import datetime, timezone

        rec = Record(
            id="x1", text="τ/κ", tokens=tokens, label=label, lat=lat, lon=lon,
            ts=datetime.fromtimestamp(epoch, tz=timezone.utc),
        )
        assert parse_record(serialize_record(rec)) == rec

    def test_duplicate_ingest_idempotent(self):
        model = geo_model(random.Random(1000))
        rng = random.Random(12)
        records = geo_records(rng, 60)
        store = GeoStore(model)
        assert store.ingest_lines(serialize_record(r) for r in records).accepted == 60
        full_range = TimeRange(records[0].ts - timedelta(days=1), records[0].ts + timedelta(days=1))
        before = store.aggregate(full_range, "county")
        dupes = rng.sample(records, 20)
        report = store.ingest_lines(serialize_record(r) for r in dupes)
        assert report.accepted == 0
        assert report.rejected == {"DuplicateId": 20}
        assert store.aggregate(full_range, "county") == before


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def _http(method, url, body=None, timeout=5):
    request = urllib.request.Request(url, method=method)
    data = None
    if body is not None:
        data = json.dumps(body).encode("utf-8")
        request.add_header("Content-Type", "application/json")
    with urllib.request.urlopen(request, data, timeout=timeout) as resp:
        return resp.read()


def test_criterion_8_end_to_end_golden_replay(tmp_path):
    """CLI train -> ingest -> serve; replayed queries byte-match the goldens."""
    started = time.monotonic()
    queries = json.loads((GOLDEN_DIR / "queries.json").read_text())
    corpus = GOLDEN_DIR / "corpus.ndjson"
    model_path = tmp_path / "model.json"
    store_dir = tmp_path / "store"

    env_cmd = [sys.executable, "-m", "anxmap"]
    subprocess.run(env_cmd + ["train", "--corpus", str(corpus), "--out", str(model_path)],
                   check=True, capture_output=True)
    subprocess.run(env_cmd + ["ingest", "--model", str(model_path), "--corpus", str(corpus),
                              "--store", str(store_dir)], check=True, capture_output=True)

    port = _free_port()
    proc = subprocess.Popen(
        env_cmd + ["serve", "--store", str(store_dir), "--model", str(model_path),
                   "--bind", f"127.0.0.1:{port}"],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
    )
    try:
        deadline = time.monotonic() + 15
        while True:
            try:
                _http("GET", f"http://127.0.0.1:{port}/api/meta")
                break
            except OSError:
                if time.monotonic() > deadline:
                    raise TimeoutError("server did not come up")
                time.sleep(0.1)

        for query in queries:
            golden = (GOLDEN_DIR / f"{query['name']}.golden.json").read_bytes()
            if query["method"] == "GET":
                url = f"http://127.0.0.1:{port}{query['path']}?{urllib.parse.urlencode(query['params'])}"
                body = _http("GET", url)
            else:
                body = _http("POST", f"http://127.0.0.1:{port}{query['path']}", body=query["body"])
            assert body == golden, f"response for {query['name']} deviates from golden bytes"
    finally:
        proc.send_signal(signal.SIGINT)
        assert proc.wait(timeout=10) == 0

    assert time.monotonic() - started < 30.0
