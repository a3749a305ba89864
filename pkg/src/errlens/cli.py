"""Command-line entry points: ingest, discover, report, serve."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from errlens.cache import Workspace
from errlens.rules import DiscoveryConfig, discover


def _cmd_ingest(args) -> int:
    ws = Workspace(args.out)
    t0 = time.monotonic()
    store, features, projection = ws.ingest(
        args.input,
        min_df=args.min_df,
        projection_method=args.projection,
        seed=args.seed,
        tsne_iters=args.tsne_iters,
        perplexity=args.perplexity,
    )
    dt = time.monotonic() - t0
    print(f"ingested {store.n_test} test / {store.n_train} train documents in {dt:.1f}s")
    print(f"classes: {', '.join(store.classes)}")
    print(f"baseline error rate: {store.baseline_error_rate:.4f}")
    print(f"vocabulary: {len(features.vocabulary)} token features (min_df={features.min_df})")
    print(f"high-level features: {', '.join(f.name for f in features.high_level) or 'none'}")
    if projection is not None:
        extra = f" (final KL {projection.final_kl:.4f})" if projection.final_kl is not None else ""
        print(f"projection: {projection.method}{extra}")
    else:
        print("projection: unavailable (no embeddings or coordinates ingested)")
    print(f"workspace written to {ws.root}")
    return 0


def _cmd_discover(args) -> int:
    ws = Workspace(args.data)
    store = ws.load_store()
    features = ws.load_features()
    config = DiscoveryConfig(
        max_conditions=args.max_conditions,
        min_support_fraction=args.min_support,
        min_error_rate="auto" if args.min_error_rate == "auto" else float(args.min_error_rate),
        n_trees=args.trees,
        max_depth=args.depth,
        candidate_cap=args.cap,
        bootstrap_B=args.bootstrap,
        alpha=args.alpha,
        rng_seed=args.seed,
        use_forest_filter=not args.no_forest_filter,
        redundancy_pruning=not args.no_redundancy_pruning,
    )
    t0 = time.monotonic()
    ruleset = discover(store, features.vocabulary, features.matrix, features.high_level, config)
    dt = time.monotonic() - t0
    ws.save_ruleset(ruleset)
    print(f"discovered {len(ruleset.rules)} rules in {dt:.1f}s (seed={config.rng_seed})")
    print(f"baseline error rate: {ruleset.baseline_error_rate:.4f}")
    for rule in ruleset.rules[:10]:
        m = rule.metrics
        print(
            f"  {m.error_rate:.3f}  n={m.support_count:<5d} p={m.p_value:.2e}  {rule.render()}"
        )
    print(f"report written to {ws.root / 'rules.tsv'}")
    return 0


def _cmd_report(args) -> int:
    from errlens.analysis import RuleEvaluator
    from errlens.report import render_html, render_text

    ws = Workspace(args.data)
    store = ws.load_store()
    features = ws.load_features()
    ruleset = ws.load_ruleset()
    if ruleset is None:
        print("no rule set in workspace; run `errlens discover` first", file=sys.stderr)
        return 1
    evaluator = RuleEvaluator(store, features, config=ruleset.config)
    text = render_html(evaluator, ruleset) if args.format == "html" else render_text(evaluator, ruleset)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from errlens.service import create_app, load_engine

    engine = load_engine(args.data)
    app = create_app(engine, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="errlens",
        description="Discover and analyze error-prone subpopulations of a text classifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a JSONL corpus and build the cached workspace")
    p.add_argument("--input", required=True, help="line-delimited corpus file")
    p.add_argument("--out", required=True, help="workspace directory to create")
    p.add_argument("--min-df", type=int, default=None, help="vocabulary document-frequency floor")
    p.add_argument(
        "--projection",
        choices=["auto", "tsne", "pca", "ingested", "skip"],
        default="auto",
        help="how to compute 2D coordinates (default: ingested if present, else t-SNE)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tsne-iters", type=int, default=1000)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("discover", help="mine error-prone subpopulation rules")
    p.add_argument("--data", required=True, help="workspace directory from ingest")
    p.add_argument("--max-conditions", type=int, default=2)
    p.add_argument("--min-support", type=float, default=0.05)
    p.add_argument("--min-error-rate", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--cap", type=int, default=500)
    p.add_argument("--bootstrap", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--no-forest-filter", action="store_true")
    p.add_argument("--no-redundancy-pruning", action="store_true")
    p.set_defaults(fn=_cmd_discover)

    p = sub.add_parser("report", help="render the discovered rules")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=["text", "html"], default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("serve", help="serve the HTTP API (and optionally the UI)")
    p.add_argument("--data", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", default=None, help="directory of built UI assets to serve at /")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
