"""Operator command line: train, eval, sweep, classify, ingest, serve.

Exit codes: 0 success, 1 runtime failure (IO, empty corpus, corrupt
model, port in use), 2 usage error (bad flags or flag values).
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import classifier, corpus, datagen, evaluation
from .classifier import ClassifierConfig, ClassLabel
from .geostore import GeoStore
from .tokenizer import SIGNIFICANT_POS, MalformedToken, fallback_tokenize, filter_significant, parse_tagged_text

_RUNTIME_ERRORS = (
    OSError,
    classifier.EmptyCorpus,
    classifier.ModelFormatError,
    corpus.UnreadableSource,
    evaluation.EmptyTestSet,
    evaluation.EmptySweep,
)


def run() -> None:
    sys.exit(main())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except _RUNTIME_ERRORS as exc:
        print(f"anxmap: error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anxmap",
        description="Train, evaluate, and serve the anxiety classifier over geotagged messages.",
    )
    sub = parser.add_subparsers(
        dest="command",
        required=True,
        metavar="{train,eval,sweep,classify,ingest,serve}",
    )

    p = sub.add_parser("train", help="train a model from a labeled corpus")
    p.add_argument("--corpus", required=True, help="labeled corpus file (one JSON record per line)")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--no-smoothing", action="store_true", help="disable add-one smoothing")
    p.add_argument("--threshold", type=float, default=2.5, help="decision threshold stored in the model (default 2.5)")
    p.add_argument("--pos-filter", default=",".join(sorted(SIGNIFICANT_POS)),
                   help="comma-separated significant POS tags")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a labeled test corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--method", choices=("ml", "map"), default="ml")
    p.add_argument("--threshold", type=float, default=None, help="override the model's threshold")
    p.add_argument("--smoothing", choices=("on", "off"), default=None, help="override the model's smoothing")
    p.add_argument("--json", action="store_true", help="emit the report as structured JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="evaluate across a threshold grid and select the best")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--grid", default="0.5:5.0:0.5", help="start:stop:step (default 0.5:5.0:0.5)")
    p.add_argument("--smoothing", choices=("on", "off"), default=None)
    p.add_argument("--json", action="store_true", help="emit points and selection as structured JSON")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("classify", help="classify one text or tagged token string")
    p.add_argument("--model", required=True)
    p.add_argument("--text", default=None, help="raw text (whitespace fallback tokenization)")
    p.add_argument("--tokens", default=None, help="tagged tokens, e.g. 'a/NNG b/VV'")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--smoothing", choices=("on", "off"), default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("ingest", help="classify and index a corpus into a store directory")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--store", required=True, help="store directory (created if missing)")
    p.set_defaults(func=cmd_ingest)

    # flags win over ANXMAP_* environment variables
    env = os.environ
    p = sub.add_parser("serve", help="serve the query API (and optionally the dashboard)")
    p.add_argument("--store", required="ANXMAP_STORE" not in env, default=env.get("ANXMAP_STORE"))
    p.add_argument("--model", required="ANXMAP_MODEL" not in env, default=env.get("ANXMAP_MODEL"))
    p.add_argument("--bind", default=env.get("ANXMAP_BIND", "127.0.0.1:8080"),
                   help="host:port (default 127.0.0.1:8080)")
    p.add_argument("--ui-dir", default=env.get("ANXMAP_UI_DIR"),
                   help="directory of dashboard static assets")
    p.add_argument("--cors-origin", default=env.get("ANXMAP_CORS_ORIGIN"),
                   help="value for Access-Control-Allow-Origin")
    p.set_defaults(func=cmd_serve)

    # internal: seeded corpus generation for tests and demos
    p = sub.add_parser("gen")
    p.add_argument("--profile", choices=("table", "small", "imbalanced", "geo"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--records", type=int, default=1000, help="record count (geo/imbalanced)")
    p.add_argument("--anxious-frac", type=float, default=0.1)
    p.set_defaults(func=cmd_gen)

    return parser


def _load_model(path: str) -> classifier.ClassifierModel:
    return classifier.load_model(Path(path).read_bytes())


def _smoothing_flag(value: str | None) -> bool | None:
    return None if value is None else value == "on"


def _format_skipped(skipped: dict[str, int]) -> str:
    return " ".join(f"{reason}={count}" for reason, count in sorted(skipped.items()))


def cmd_train(args, parser) -> int:
    pos_filter = frozenset(tag.strip() for tag in args.pos_filter.split(",") if tag.strip())
    if not pos_filter:
        parser.error("--pos-filter must name at least one tag")
    if not args.threshold > 0:
        parser.error("--threshold must be positive")
    config = ClassifierConfig(
        smoothing=not args.no_smoothing, threshold=args.threshold, pos_filter=pos_filter
    )
    docs, skipped = corpus.load_labeled(args.corpus, config.pos_filter)
    model = classifier.train(docs, config)
    Path(args.out).write_bytes(classifier.save_model(model))
    print(f"trained model: {args.out}")
    print(f"documents: NonAnxiety={model.doc_count[0]} Anxiety={model.doc_count[1]}")
    print(f"tokens: NonAnxiety={model.total_tokens[0]} Anxiety={model.total_tokens[1]}")
    print(f"vocabulary: {model.vocab_size}")
    print(
        f"config: smoothing={'on' if config.smoothing else 'off'}"
        f" threshold={config.threshold:g} pos_filter={','.join(sorted(config.pos_filter))}"
    )
    if skipped:
        print(f"skipped: {_format_skipped(skipped)}")
    return 0


def _print_report(report: evaluation.EvalReport, heading: str) -> None:
    c = report.confusion
    print(heading)
    print(f"confusion: tn={c[0][0]} fp={c[0][1]} fn={c[1][0]} tp={c[1][1]}")
    print(f"recall_anxiety      {report.recall_anxiety:.4f}")
    print(f"recall_non_anxiety  {report.recall_non_anxiety:.4f}")
    print(f"accuracy            {report.accuracy:.4f}")
    print(f"product             {report.product:.4f}")
    if report.vacuous:
        absent = ",".join(sorted(label.value for label in report.vacuous))
        print(f"note: recall reported as 1.0 for gold classes absent from the test set: {absent}")


def cmd_eval(args, parser) -> int:
    if args.threshold is not None and not args.threshold > 0:
        parser.error("--threshold must be positive")
    model = _load_model(args.model)
    test, skipped = corpus.load_labeled(args.test, model.config.pos_filter)
    report = evaluation.evaluate(
        model, test, method=args.method, threshold=args.threshold,
        smoothing=_smoothing_flag(args.smoothing),
    )
    threshold = args.threshold if args.threshold is not None else model.config.threshold
    if args.json:
        from .jsonfmt import canon_dumps

        print(canon_dumps({
            "method": "MAP" if args.method == "map" else "ML-ratio",
            "threshold": threshold,
            "report": report.as_dict(),
        }))
        return 0
    method = "MAP" if args.method == "map" else f"ML-ratio threshold={threshold:g}"
    _print_report(report, f"method: {method}")
    if skipped:
        print(f"skipped: {_format_skipped(skipped)}")
    return 0


def cmd_sweep(args, parser) -> int:
    try:
        grid = evaluation.parse_grid(args.grid)
    except ValueError as exc:
        parser.error(str(exc))
    model = _load_model(args.model)
    test, skipped = corpus.load_labeled(args.test, model.config.pos_filter)
    points = evaluation.sweep(model, test, grid, smoothing=_smoothing_flag(args.smoothing))
    threshold, product = evaluation.select_threshold(points)
    if args.json:
        from .jsonfmt import canon_dumps

        print(canon_dumps({
            "points": [{"threshold": p.threshold, "report": p.report.as_dict()} for p in points],
            "selected": {"threshold": threshold, "product": product},
        }))
        return 0
    print(evaluation.sweep_table(points))
    print(f"selected: threshold={threshold!r} product={product:.4f}")
    if skipped:
        print(f"skipped: {_format_skipped(skipped)}")
    return 0


def cmd_classify(args, parser) -> int:
    if (args.text is None) == (args.tokens is None):
        parser.error("provide exactly one of --text or --tokens")
    if args.threshold is not None and not args.threshold > 0:
        parser.error("--threshold must be positive")
    if args.tokens is not None:
        try:
            tokens = parse_tagged_text(args.tokens)
        except MalformedToken as exc:
            parser.error(f"--tokens: {exc}")
    else:
        tokens = fallback_tokenize(args.text)
    model = _load_model(args.model)
    filtered = filter_significant(tokens, model.config.pos_filter)
    result = classifier.classify_ratio(
        model, filtered, threshold=args.threshold, smoothing=_smoothing_flag(args.smoothing)
    )
    threshold = args.threshold if args.threshold is not None else model.config.threshold
    print(
        f"label={result.label.value} ratio={result.ratio:.6g} threshold={threshold:g}"
        f" method={result.method} degenerate={str(result.degenerate).lower()}"
    )
    return 0


def cmd_ingest(args, parser) -> int:
    model = _load_model(args.model)
    store = GeoStore.open(args.store, model)
    report = store.ingest_file(args.corpus)
    print(f"accepted: {report.accepted}")
    reasons = _format_skipped(dict(report.rejected)) if report.rejected else "none"
    print(f"rejected: {report.total_rejected} ({reasons})")
    print(f"store: {args.store} (total {store.snapshot().record_count} records)")
    return 0


def cmd_serve(args, parser) -> int:
    host, _, port_str = args.bind.rpartition(":")
    if not host or not port_str.isdigit():
        parser.error(f"--bind must be host:port, got {args.bind!r}")
    if args.ui_dir is not None and not Path(args.ui_dir).is_dir():
        print(f"anxmap: error: --ui-dir {args.ui_dir!r} is not a directory", file=sys.stderr)
        return 1
    model = _load_model(args.model)
    store = GeoStore.open(args.store, model)

    import uvicorn

    from .service import create_app

    app = create_app(store, model, cors_origin=args.cors_origin, ui_dir=args.ui_dir)
    print(f"serving {store.snapshot().record_count} records on http://{host}:{port_str}")
    try:
        uvicorn.run(app, host=host, port=int(port_str), log_level="info")
    except SystemExit as exc:  # uvicorn startup failure (e.g. port in use)
        return 1 if exc.code else 0
    except OSError as exc:
        print(f"anxmap: error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_gen(args, parser) -> int:
    rng = random.Random(args.seed)
    if args.profile == "table":
        records = datagen.labeled_records(datagen.table_corpus(), rng, id_prefix="t")
    elif args.profile == "small":
        docs, _ = datagen.small_corpus(rng)
        records = datagen.labeled_records(docs, rng, id_prefix="s")
    elif args.profile == "imbalanced":
        docs = datagen.imbalanced_corpus(rng, args.records, anxious_frac=args.anxious_frac)
        records = datagen.labeled_records(docs, rng, id_prefix="i")
    else:
        records = datagen.geo_records(rng, args.records)
    count = datagen.write_corpus(args.out, records)
    print(f"wrote {count} records to {args.out} (profile={args.profile} seed={args.seed})")
    return 0
