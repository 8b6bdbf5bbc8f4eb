"""Experiment orchestration: build models under a memory budget, sweep the
decision threshold, and score every reported set against the exact oracle.

Memory is accounted in value-code slots relative to the dataset size m*d:
the sampling model costs d slots per kept item, and sketch-based models cost
d times their per-coordinate cell count (Count-Min cells are width*depth;
Misra-Gries cells are its counter budget, which also bounds the second-pass
exact counters). Oracle tables are cached on disk keyed by the dataset's
content hash, since brute force is the slow part of every experiment.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import HHParams, JointValue, Subcube, make_subcube
from .errors import ConfigError, ExperimentError, NoClassColumnError, SubcubeHHError
from .heuristic import heuristic_all_query_scored, heuristic_build
from .independence import indep_all_query_scored, indep_pass1, indep_pass2
from .metrics import compute_detection_metrics, compute_error_metrics, roc_auc
from .naivebayes import nb_all_query_scored, nb_pass1, nb_pass2
from .oracle import GroundTruth, exact_table
from .sampling import build_sample, sample_all_query_scored, sample_frequencies
from .stream_io import DatasetHandle, open_dataset

ALGORITHMS = ("sampling", "indep2p", "nb2p", "cms-heuristic")
CMS_DEPTH = 4


@dataclass
class ExperimentConfig:
    dataset: str | Path
    algos: list[str]
    subcubes: list[Subcube]
    gamma: float
    seeds: list[int]
    gamma_stars: list[float] | None = None  # default: 12 log-spaced in [gamma/4, 2*gamma]
    memory_frac: float | None = None
    memory_fracs: list[float] | None = None  # frequency-estimation sweep
    sample_size: int | None = None
    class_col: int | None = None  # 0-based file column
    delimiter: str = ","
    has_header: bool = False
    cache_dir: str | Path | None = None
    top_k: int = 10

    def __post_init__(self) -> None:
        for algo in self.algos:
            if algo not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {algo!r}; pick from {ALGORITHMS}")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if not self.subcubes:
            raise ConfigError("at least one subcube is required")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.gamma_stars is None:
            self.gamma_stars = default_gamma_star_sweep(self.gamma)
        if self.memory_fracs is None:
            self.memory_fracs = [0.001, 0.005, 0.01]


def default_gamma_star_sweep(gamma: float, points: int = 12) -> list[float]:
    """12 log-spaced decision thresholds covering [gamma/4, 2*gamma]."""
    return [float(x) for x in np.geomspace(gamma / 4.0, 2.0 * gamma, points)]


@dataclass
class DetectionRow:
    algo: str
    subcube: Subcube
    gamma_star: float
    seed: int
    tp: int
    fp: int
    reported: int


@dataclass
class FreqRow:
    algo: str
    subcube: Subcube
    memory_frac: float
    seed: int
    mse: float
    mae: float
    mape: float


@dataclass
class MetricsReport:
    config: dict
    rows: list[DetectionRow] = field(default_factory=list)
    freq_rows: list[FreqRow] = field(default_factory=list)
    roc: dict[str, list[dict]] = field(default_factory=dict)
    auc: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "rows": [
                {
                    "algo": r.algo,
                    "subcube": _subcube_label(r.subcube),
                    "gamma_star": r.gamma_star,
                    "seed": r.seed,
                    "tp": r.tp,
                    "fp": r.fp,
                    "reported": r.reported,
                }
                for r in self.rows
            ],
            "freq_rows": [
                {
                    "algo": r.algo,
                    "subcube": _subcube_label(r.subcube),
                    "memory_frac": r.memory_frac,
                    "seed": r.seed,
                    "mse": r.mse,
                    "mae": r.mae,
                    "mape": r.mape,
                }
                for r in self.freq_rows
            ],
            "roc": self.roc,
            "auc": self.auc,
        }

    def to_csv(self) -> str:
        lines = ["algo,subcube,gamma_star,seed,tp,fp,reported"]
        for r in self.rows:
            lines.append(
                f"{r.algo},{_subcube_label(r.subcube)},{r.gamma_star!r},"
                f"{r.seed},{r.tp},{r.fp},{r.reported}"
            )
        return "\n".join(lines) + "\n"

    def freq_csv(self) -> str:
        lines = ["algo,subcube,memory_frac,seed,mse,mae,mape"]
        for r in self.freq_rows:
            lines.append(
                f"{r.algo},{_subcube_label(r.subcube)},{r.memory_frac!r},"
                f"{r.seed},{r.mse!r},{r.mae!r},{r.mape!r}"
            )
        return "\n".join(lines) + "\n"


def _subcube_label(t: Subcube) -> str:
    """1-based user-facing label, e.g. coordinates (0,2) -> "1-3"."""
    return "-".join(str(c + 1) for c in t.coords)


# ---------------------------------------------------------------------------
# Oracle cache
# ---------------------------------------------------------------------------


def _dataset_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:24]


def cached_exact_table(
    h: DatasetHandle,
    t: Subcube,
    cache_dir: str | Path | None,
    digest: str | None,
) -> GroundTruth:
    """exact_table with a JSON disk cache keyed by dataset content hash."""
    if cache_dir is None or digest is None:
        return exact_table(h, t)
    key = f"{digest}-c{'_'.join(str(c) for c in t.coords)}.json"
    cache_path = Path(cache_dir) / key
    if cache_path.exists():
        with open(cache_path) as fh:
            blob = json.load(fh)
        counts = {tuple(v): c for v, c in zip(blob["v"], blob["c"])}
        return GroundTruth(t, blob["m"], counts)
    truth = exact_table(h, t)
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    items = sorted(truth.counts.items())
    tmp = cache_path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump(
            {"m": truth.m, "v": [list(v) for v, _ in items], "c": [c for _, c in items]},
            fh,
            separators=(",", ":"),
        )
    tmp.replace(cache_path)
    return truth


# ---------------------------------------------------------------------------
# Model building under a slot budget
# ---------------------------------------------------------------------------


def slot_budget(memory_frac: float, m: int, d: int) -> int:
    return int(memory_frac * m * d)


def build_model(algo: str, h: DatasetHandle, p: HHParams, seed: int, cfg: ExperimentConfig):
    """Build one model under the config's memory budget; returns
    (model, scorer) where scorer(t, threshold) -> {joint value: score}."""
    budget = None
    if cfg.memory_frac is not None:
        budget = slot_budget(cfg.memory_frac, h.m, h.d)
    model, scorer = _build_model_slots(algo, h, p, seed, budget, cfg.sample_size)
    if budget is not None and cfg.sample_size is None:
        used = accounted_memory_slots(algo, model, h.d)
        if used > budget:
            raise ConfigError(
                f"{algo} model uses {used} slots, over the budget of {budget}"
            )
    return model, scorer


def _build_model_slots(
    algo: str,
    h: DatasetHandle,
    p: HHParams,
    seed: int,
    budget: int | None,
    sample_size: int | None = None,
):
    if algo == "sampling":
        if sample_size is not None:
            capacity = sample_size
        elif budget is not None:
            capacity = budget // h.d
        else:
            capacity = required_default_sample_size(h, p)
        model = build_sample(h, capacity, seed, p)
        return model, lambda t, th: sample_all_query_scored(model, t, th)
    if algo == "indep2p":
        counter_budget = None if budget is None else budget // h.d
        cands = indep_pass1(h, p, counter_budget)
        model = indep_pass2(h, cands, p)
        return model, lambda t, th: indep_all_query_scored(model, t, th)
    if algo == "nb2p":
        if h.class_col is None:
            raise NoClassColumnError("algorithm nb2p needs --class-col")
        counter_budget = None if budget is None else budget // h.d
        priors, cands = nb_pass1(h, p, counter_budget)
        model = nb_pass2(h, priors, cands, p)
        return model, lambda t, th: nb_all_query_scored(model, t, th)
    if algo == "cms-heuristic":
        slots = budget if budget is not None else h.d * CMS_DEPTH * 1024
        model = heuristic_build(h, slots, p, seed, CMS_DEPTH)
        return model, lambda t, th: heuristic_all_query_scored(model, t, th)
    raise ConfigError(f"unknown algorithm {algo!r}")


def required_default_sample_size(h: DatasetHandle, p: HHParams) -> int:
    """Default capacity when neither a budget nor a size is given: the
    guaranteed size for subcubes up to 3 dimensions on this dataset."""
    from .sampling import required_sample_size

    n_max = max(h.cardinalities) if h.cardinalities else 1
    return required_sample_size(p, h.d, min(3, h.d), max(n_max, 1))


def accounted_memory_slots(algo: str, model, d: int) -> int:
    """Memory in value-code slots under the experiment's accounting rules."""
    if algo == "sampling":
        return d * model.m_prime
    if algo == "cms-heuristic":
        return d * model.cms[0].width * model.cms[0].depth
    if algo in ("indep2p", "nb2p"):
        return d * max(
            (sk_budget for sk_budget in _model_counter_budgets(model)), default=0
        )
    raise ConfigError(f"unknown algorithm {algo!r}")


def _model_counter_budgets(model):
    # Candidate tables are bounded by the pass-1 counter budget per coordinate.
    for table in model.tables:
        yield len(table)


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------


def open_config_dataset(cfg: ExperimentConfig) -> tuple[DatasetHandle, str | None]:
    path = Path(cfg.dataset)
    h = open_dataset(
        path,
        delimiter=cfg.delimiter,
        has_header=cfg.has_header,
        class_col=cfg.class_col,
        cache_items=True,
    )
    h.replay(lambda _i, _c: None)  # freeze dictionaries and m
    digest = _dataset_digest(path) if cfg.cache_dir is not None else None
    for t in cfg.subcubes:
        make_subcube(t.coords, h.d)  # validates against d
    return h, digest


def run_experiment(cfg: ExperimentConfig) -> MetricsReport:
    """The detection protocol: per (algorithm, seed) build one model under
    the memory budget, enumerate each subcube once at the smallest threshold
    in the sweep, then rethreshold the scored answers for every gamma_star.

    A failure partway through raises ExperimentError carrying the rows
    finished so far, so callers can flush partial results.
    """
    h, digest = open_config_dataset(cfg)
    p = HHParams(cfg.gamma)
    truths = {
        t.coords: cached_exact_table(h, t, cfg.cache_dir, digest) for t in cfg.subcubes
    }
    sweep = sorted(cfg.gamma_stars, reverse=True)
    theta_min = min(sweep)
    report = MetricsReport(config=_config_dict(cfg, h))
    try:
        for algo in cfg.algos:
            per_gs_tp: dict[float, list[int]] = {gs: [] for gs in sweep}
            per_gs_fp: dict[float, list[int]] = {gs: [] for gs in sweep}
            for seed in cfg.seeds:
                _model, scorer = build_model(algo, h, p, seed, cfg)
                scored = {t.coords: scorer(t, theta_min) for t in cfg.subcubes}
                for gs in sweep:
                    tp_total = fp_total = 0
                    for t in cfg.subcubes:
                        reported = {v for v, s in scored[t.coords].items() if s >= gs}
                        tp, fp = compute_detection_metrics(
                            reported, truths[t.coords], cfg.gamma
                        )
                        report.rows.append(
                            DetectionRow(algo, t, gs, seed, tp, fp, len(reported))
                        )
                        tp_total += tp
                        fp_total += fp
                    per_gs_tp[gs].append(tp_total)
                    per_gs_fp[gs].append(fp_total)
            n_seeds = len(cfg.seeds)
            report.roc[algo] = [
                {
                    "gamma_star": gs,
                    "tp_mean": sum(per_gs_tp[gs]) / n_seeds,
                    "fp_mean": sum(per_gs_fp[gs]) / n_seeds,
                }
                for gs in sweep
            ]
    except ConfigError:
        raise
    except SubcubeHHError as exc:
        raise ExperimentError(str(exc), partial=report) from exc
    fp_max = max(
        (pt["fp_mean"] for pts in report.roc.values() for pt in pts), default=0.0
    )
    for algo, pts in report.roc.items():
        report.auc[algo] = roc_auc([(pt["fp_mean"], pt["tp_mean"]) for pt in pts], fp_max)
    return report


def run_freq_experiment(cfg: ExperimentConfig) -> MetricsReport:
    """The frequency-estimation protocol: for each memory fraction, estimate
    the frequencies of the top-k true heavy values with the one-pass models
    and report MSE / MAE / MAPE."""
    h, digest = open_config_dataset(cfg)
    p = HHParams(cfg.gamma)
    truths = {
        t.coords: cached_exact_table(h, t, cfg.cache_dir, digest) for t in cfg.subcubes
    }
    algos = [a for a in cfg.algos if a in ("sampling", "cms-heuristic")]
    report = MetricsReport(config=_config_dict(cfg, h))
    for frac in cfg.memory_fracs:
        budget = slot_budget(frac, h.m, h.d)
        for algo in algos:
            for seed in cfg.seeds:
                model, _scorer = _build_model_slots(algo, h, p, seed, budget)
                for t in cfg.subcubes:
                    truth = truths[t.coords]
                    top = truth.top_values(cfg.top_k)
                    estimates = _estimate_map(algo, model, t, top)
                    mse, mae, mape = compute_error_metrics(estimates, truth, cfg.top_k)
                    report.freq_rows.append(
                        FreqRow(algo, t, frac, seed, mse, mae, mape)
                    )
    return report


def _estimate_map(algo: str, model, t: Subcube, values: list[JointValue]):
    if algo == "sampling":
        freqs = sample_frequencies(model, t)
        return {v: freqs.get(v, 0.0) for v in values}
    if algo == "cms-heuristic":
        out = {}
        for v in values:
            prod = 1.0
            for coord, x in zip(t.coords, v):
                prod *= model.estimate(coord, x)
            out[v] = prod
        return out
    raise ConfigError(f"no frequency estimator for algorithm {algo!r}")


def _config_dict(cfg: ExperimentConfig, h: DatasetHandle) -> dict:
    return {
        "dataset": str(cfg.dataset),
        "m": h.m,
        "d": h.d,
        "algos": list(cfg.algos),
        "subcubes": [_subcube_label(t) for t in cfg.subcubes],
        "gamma": cfg.gamma,
        "gamma_stars": list(cfg.gamma_stars),
        "memory_frac": cfg.memory_frac,
        "memory_fracs": list(cfg.memory_fracs),
        "sample_size": cfg.sample_size,
        "seeds": list(cfg.seeds),
        "class_col": None if cfg.class_col is None else cfg.class_col + 1,
        "top_k": cfg.top_k,
    }
