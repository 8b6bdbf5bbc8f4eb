"""Command-line interface.

Subcommands:
  gen     sample a synthetic dataset to CSV
  oracle  exact joint-frequency table of a subcube, as JSON
  run     build one model and answer AllQuery for the given subcubes
  eval    full experiment: sweep thresholds, score against the oracle,
          emit a JSON report plus plot-ready CSVs

Coordinates and column indices are 1-based on the command line and converted
internally. Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import datagen
from .core import HHParams, make_subcube
from .errors import ConfigError, ExperimentError, SubcubeHHError
from .harness import (
    ExperimentConfig,
    build_model,
    run_experiment,
    run_freq_experiment,
)
from .oracle import exact_table
from .stream_io import open_dataset


def _parse_subcube(spec: str) -> list[int]:
    try:
        indices = [int(tok) for tok in spec.replace("-", ",").split(",") if tok]
    except ValueError:
        raise ConfigError(f"cannot parse subcube {spec!r}") from None
    if any(ix < 1 for ix in indices):
        raise ConfigError(f"subcube coordinates are 1-based, got {spec!r}")
    return [ix - 1 for ix in indices]


def _parse_class_col(value: int | None) -> int | None:
    if value is None:
        return None
    if value < 1:
        raise ConfigError(f"--class-col is 1-based, got {value}")
    return value - 1


def _add_dataset_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--data", required=True, help="input CSV/TSV path")
    sp.add_argument("--delimiter", default=",", help="field delimiter (default ',')")
    sp.add_argument("--header", action="store_true", help="skip a header row")
    sp.add_argument(
        "--class-col", type=int, default=None, help="1-based class column index"
    )


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="subcubehh",
        description="Subcube heavy-hitter queries over categorical data streams.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a synthetic dataset to CSV")
    gen.add_argument("--profile", default="paper-synthetic", choices=["paper-synthetic", "custom"])
    gen.add_argument("--m", type=int, required=True, help="number of rows")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--model-seed", type=int, default=None, help="defaults to --seed")
    gen.add_argument("--skew", type=float, default=None)
    gen.add_argument("--d", type=int, default=None, help="feature count (custom profile)")
    gen.add_argument("--cardinalities", default=None, help="comma list (custom profile)")
    gen.add_argument("--ell", type=int, default=None, help="class count (custom profile)")
    gen.add_argument(
        "--fix-class",
        default=None,
        help="emit features only, conditioned on this class value ('top' = most frequent)",
    )
    gen.add_argument("-o", "--out", required=True, help="output CSV path")

    orc = sub.add_parser("oracle", help="exact frequency table of a subcube (JSON)")
    _add_dataset_args(orc)
    orc.add_argument(
        "--subcube", required=True, action="append",
        help="1-based feature coordinates, e.g. 1,2,3 (repeatable)",
    )
    orc.add_argument("--out", default=None, help="write JSON here instead of stdout")

    run = sub.add_parser("run", help="build one model and answer AllQuery")
    _add_dataset_args(run)
    run.add_argument(
        "--algo", required=True, choices=["sampling", "indep2p", "nb2p", "cms-heuristic"]
    )
    run.add_argument("--gamma", type=float, required=True)
    run.add_argument("--gamma-star", type=float, default=None, help="decision threshold")
    run.add_argument("--memory-frac", type=float, default=None)
    run.add_argument("--sample-size", type=int, default=None)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--subcube", required=True, action="append")
    run.add_argument("--out", default=None, help="write JSON here instead of stdout")

    ev = sub.add_parser("eval", help="full experiment with oracle scoring")
    _add_dataset_args(ev)
    ev.add_argument("--algo", required=True, action="append", dest="algos")
    ev.add_argument("--gamma", type=float, required=True)
    ev.add_argument(
        "--gamma-star-sweep", default=None,
        help="comma list of thresholds; default 12 log-spaced in [gamma/4, 2*gamma]",
    )
    ev.add_argument("--memory-frac", type=float, default=None)
    ev.add_argument(
        "--memory-fracs", default=None, help="comma list for --task freq (default 0.001,0.005,0.01)"
    )
    ev.add_argument("--sample-size", type=int, default=None)
    ev.add_argument("--seeds", default="0", help="comma list of seeds")
    ev.add_argument("--subcube", required=True, action="append")
    ev.add_argument("--task", default="detect", choices=["detect", "freq"])
    ev.add_argument("--top-k", type=int, default=10)
    ev.add_argument("--cache-dir", default=None, help="oracle table cache directory")
    ev.add_argument("--out", required=True, help="output path prefix")
    return ap


def _cmd_gen(args) -> int:
    model_seed = args.seed if args.model_seed is None else args.model_seed
    if args.profile == "paper-synthetic":
        skew = datagen.PAPER_PROFILE_SKEW if args.skew is None else args.skew
        gen = datagen.paper_profile(model_seed, skew)
    else:
        if args.d is None or args.cardinalities is None or args.ell is None:
            raise ConfigError("custom profile needs --d, --cardinalities and --ell")
        cards = [int(tok) for tok in args.cardinalities.split(",") if tok]
        skew = 1.0 if args.skew is None else args.skew
        gen = datagen.make_random_nb(args.d, cards, args.ell, skew, model_seed)
    fix_class = None
    if args.fix_class is not None:
        fix_class = gen.most_frequent_class() if args.fix_class == "top" else int(args.fix_class)
    datagen.sample_to_csv(gen, args.m, args.seed, args.out, fix_class)
    cols = gen.d if fix_class is not None else gen.d + 1
    sys.stdout.write(f"wrote {args.m} rows x {cols} columns to {args.out}\n")
    return 0


def _open(args, cache_items: bool = True):
    return open_dataset(
        args.data,
        delimiter=args.delimiter,
        has_header=args.header,
        class_col=_parse_class_col(args.class_col),
        cache_items=cache_items,
    )


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_oracle(args) -> int:
    h = _open(args)
    h.replay(lambda _i, _c: None)
    tables = []
    for spec in args.subcube:
        t = make_subcube(_parse_subcube(spec), h.d)
        truth = exact_table(h, t)
        rows = sorted(
            truth.counts.items(), key=lambda e: (-e[1], e[0])
        )
        tables.append(
            {
                "subcube": [c + 1 for c in t.coords],
                "m": truth.m,
                "table": [
                    {
                        "v": [h.decode(c, x) for c, x in zip(t.coords, v)],
                        "f": cnt / truth.m,
                    }
                    for v, cnt in rows
                ],
            }
        )
    _emit(tables[0] if len(tables) == 1 else {"tables": tables}, args.out)
    return 0


def _cmd_run(args) -> int:
    h = _open(args)
    h.replay(lambda _i, _c: None)
    subcubes = [make_subcube(_parse_subcube(s), h.d) for s in args.subcube]
    p = HHParams(args.gamma)
    threshold = p.gamma_star if args.gamma_star is None else args.gamma_star
    cfg = ExperimentConfig(
        dataset=args.data,
        algos=[args.algo],
        subcubes=subcubes,
        gamma=args.gamma,
        seeds=[args.seed],
        memory_frac=args.memory_frac,
        sample_size=args.sample_size,
        class_col=_parse_class_col(args.class_col),
        delimiter=args.delimiter,
        has_header=args.header,
    )
    _model, scorer = build_model(args.algo, h, p, args.seed, cfg)
    results = []
    for t in subcubes:
        scored = scorer(t, threshold)
        answers = [
            {
                "v": [h.decode(c, x) for c, x in zip(t.coords, v)],
                "product": score,
                "verdict": "YES",
            }
            for v, score in sorted(scored.items(), key=lambda e: (-e[1], e[0]))
        ]
        results.append({"subcube": [c + 1 for c in t.coords], "answers": answers})
    _emit(
        {
            "algo": args.algo,
            "gamma": args.gamma,
            "gamma_star": threshold,
            "seed": args.seed,
            "results": results,
        },
        args.out,
    )
    return 0


def _cmd_eval(args) -> int:
    probe = _open(args, cache_items=False)
    d = probe.d
    subcubes = [make_subcube(_parse_subcube(s), d) for s in args.subcube]
    sweep = None
    if args.gamma_star_sweep is not None:
        sweep = [float(tok) for tok in args.gamma_star_sweep.split(",") if tok]
    fracs = None
    if args.memory_fracs is not None:
        fracs = [float(tok) for tok in args.memory_fracs.split(",") if tok]
    cfg = ExperimentConfig(
        dataset=args.data,
        algos=args.algos,
        subcubes=subcubes,
        gamma=args.gamma,
        seeds=[int(tok) for tok in args.seeds.split(",") if tok],
        gamma_stars=sweep,
        memory_frac=args.memory_frac,
        memory_fracs=fracs,
        sample_size=args.sample_size,
        class_col=_parse_class_col(args.class_col),
        delimiter=args.delimiter,
        has_header=args.header,
        cache_dir=args.cache_dir,
        top_k=args.top_k,
    )
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    try:
        if args.task == "detect":
            report = run_experiment(cfg)
        else:
            report = run_freq_experiment(cfg)
    except ExperimentError as exc:
        if exc.partial is not None:
            partial_path = prefix.parent / (prefix.stem + ".partial.json")
            partial_path.write_text(
                json.dumps(exc.partial.to_json_dict(), sort_keys=True, indent=2) + "\n"
            )
            sys.stderr.write(f"partial results flushed to {partial_path}\n")
        raise
    json_path = prefix.with_suffix(".json")
    json_path.write_text(
        json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"
    )
    written = [str(json_path)]
    if report.rows:
        csv_path = prefix.with_suffix(".csv")
        csv_path.write_text(report.to_csv())
        written.append(str(csv_path))
    if report.freq_rows:
        freq_path = prefix.parent / (prefix.stem + "_freq.csv")
        freq_path.write_text(report.freq_csv())
        written.append(str(freq_path))
    for path in written:
        sys.stdout.write(f"wrote {path}\n")
    for algo in sorted(report.auc):
        sys.stdout.write(f"auc {algo} {report.auc[algo]!r}\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports bad flags itself
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "eval":
            return _cmd_eval(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except (SubcubeHHError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
