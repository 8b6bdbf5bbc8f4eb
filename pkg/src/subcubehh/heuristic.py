"""One-pass Count-Min baseline: product test over estimated marginals.

No second pass and no guarantee. Per-coordinate marginals come from Count-Min
point queries (always overestimates), and a query multiplies them exactly as
the two-pass product test does. Misra-Gries summaries are kept alongside the
sketches so AllQuery has candidate values to enumerate; Count-Min alone
cannot list values.

Because every estimated marginal dominates the exact one, the YES set at a
fixed threshold is a superset of the YES set the exact-marginal product test
would report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import HHParams, JointValue, Subcube, Verdict
from .errors import BudgetTooSmallError, CapExceededError, ConfigError
from .sketches import CountMin, MisraGries, hash_pair
from .stream_io import DatasetHandle

DEFAULT_DEPTH = 4
DEFAULT_ALLQUERY_CAP = 10**6


@dataclass
class HeuristicModel:
    m: int
    params: HHParams
    cms: list[CountMin]
    mg: list[MisraGries]
    seed: int

    @property
    def d(self) -> int:
        return len(self.cms)

    def estimate(self, coord: int, x: int) -> float:
        """Estimated frequency ratio of x on coordinate coord; >= the true ratio."""
        if self.m == 0:
            return 0.0
        return self.cms[coord].point_query(x) / self.m

    def candidate_entries(self, coord: int, threshold: float) -> list[tuple[int, float]]:
        """Tracked values whose estimated ratio reaches the threshold, sorted
        by estimate descending (ties by value code)."""
        est = [(x, self.estimate(coord, x)) for x in self.mg[coord].tracked()]
        keep = [(x, f) for x, f in est if f >= threshold]
        keep.sort(key=lambda e: (-e[1], e[0]))
        return keep


def heuristic_build(
    h: DatasetHandle,
    memory_slots: int,
    p: HHParams,
    seed: int = 0,
    depth: int = DEFAULT_DEPTH,
    mg_budget: int | None = None,
) -> HeuristicModel:
    """One pass: a Count-Min sketch per coordinate sized from the slot budget
    (width = memory_slots / (d * depth)), plus a Misra-Gries candidate list
    per coordinate with budget ceil(8/lam) unless overridden."""
    width = memory_slots // (h.d * depth)
    if width < 1:
        raise BudgetTooSmallError(
            f"{memory_slots} slots over {h.d} coordinates x depth {depth} leaves width 0"
        )
    budget = math.ceil(8.0 / p.lam) if mg_budget is None else mg_budget
    cms = [CountMin(width, depth, hash_pair(i, seed)) for i in range(h.d)]
    mg = [MisraGries(budget) for _ in range(h.d)]
    value_counts: list[dict[int, int]] = [{} for _ in range(h.d)]

    def visit(item: tuple[int, ...], _cls: int | None) -> None:
        for sk, vc, x in zip(mg, value_counts, item):
            sk.update(x)
            vc[x] = vc.get(x, 0) + 1

    summary = h.replay(visit)
    # Count-Min state only depends on the multiset per coordinate, so feed it
    # the tallied counts instead of one update per item.
    for sk, vc in zip(cms, value_counts):
        for x, c in vc.items():
            sk.update(x, c)
    return HeuristicModel(m=summary.m, params=p, cms=cms, mg=mg, seed=seed)


def heuristic_query(
    mod: HeuristicModel, t: Subcube, v: JointValue, threshold: float | None = None
) -> Verdict:
    """YES iff the product of estimated marginals reaches the threshold
    (default gamma_star). No candidate membership is required: Count-Min
    answers point queries for any value."""
    th = mod.params.gamma_star if threshold is None else threshold
    if len(v) != t.k:
        raise ConfigError(f"joint value of length {len(v)} for a {t.k}-dim subcube")
    prod = 1.0
    for coord, x in zip(t.coords, v):
        prod *= mod.estimate(coord, x)
    return Verdict.YES if prod >= th else Verdict.NO


def heuristic_all_query_scored(
    mod: HeuristicModel,
    t: Subcube,
    threshold: float | None = None,
    cap: int = DEFAULT_ALLQUERY_CAP,
) -> dict[JointValue, float]:
    """Candidate combinations whose estimated-marginal product reaches the
    threshold, grown level by level as in the two-pass AllQuery. Aborts with
    CapExceededError if the intermediate levels grow past `cap` entries."""
    th = mod.params.gamma_star if threshold is None else threshold
    entries = [((x,), f) for x, f in mod.candidate_entries(t.coords[0], th)]
    total = len(entries)
    if total > cap:
        raise CapExceededError(f"level 1 holds {total} entries (cap {cap})")
    for coord in t.coords[1:]:
        ext = mod.candidate_entries(coord, th)
        nxt: list[tuple[JointValue, float]] = []
        for prefix, prod in entries:
            for x, f in ext:
                q = prod * f
                if q < th:
                    break  # ext sorted by estimate descending
                nxt.append((prefix + (x,), q))
                total += 1
                if total > cap:
                    raise CapExceededError(
                        f"intermediate levels exceed {cap} entries"
                    )
        entries = nxt
    return dict(entries)


def heuristic_all_query(
    mod: HeuristicModel,
    t: Subcube,
    threshold: float | None = None,
    cap: int = DEFAULT_ALLQUERY_CAP,
) -> set[JointValue]:
    return set(heuristic_all_query_scored(mod, t, threshold, cap))
