"""Two-pass subcube heavy hitters under a class-conditional factorization.

The dataset carries one designated class column with ell observed values.
Pass 1 computes exact class priors and per-coordinate Misra-Gries candidate
sets; pass 2 recounts each candidate exactly, both in total and jointly with
every class value. A query scores v as

    q(v) = sum_z prior(z) * prod_i cond_i(v_i | z)

over the stored exact conditionals and answers YES when every v_i is a
stored heavy candidate and q(v) reaches the threshold (default gamma/2).

Stored counts satisfy sum_z prior(z) * cond_i(x|z) == marginal_i(x) exactly
as rationals, which is why pruning on marginals is sound: dropping a
coordinate from the score can only increase it, so every prefix of an
answer scores at least the threshold. AllQuery exploits that by extending
prefixes one coordinate at a time, carrying the per-class product vector of
each surviving prefix so an extension costs O(ell).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .core import HHParams, JointValue, Subcube, Verdict
from .errors import ConfigError, NoClassColumnError
from .independence import (
    CandidateSets,
    _check_model_assumption_budget,
    candidate_cutoff,
    default_counter_budget,
)
from .sketches import MisraGries
from .stream_io import DatasetHandle

MAX_CLASS_VALUES = 1024


@dataclass(frozen=True)
class ClassPriors:
    """Exact class-value counts from pass 1."""

    counts: tuple[int, ...]
    m: int

    @property
    def ell(self) -> int:
        return len(self.counts)

    def prior(self, z: int) -> float:
        return self.counts[z] / self.m


class NBPartialLevel(NamedTuple):
    """One AllQuery level: (prefix, per-class product vector, score)."""

    level: int
    entries: list[tuple[JointValue, tuple[float, ...], float]]


def nb_pass1(
    h: DatasetHandle, p: HHParams, counter_budget: int | None = None
) -> tuple[ClassPriors, CandidateSets]:
    """Exact class priors plus per-coordinate candidate sets, in one pass."""
    _check_model_assumption_budget(p)
    if h.class_col is None:
        raise NoClassColumnError("nb_pass1 needs a dataset with a class column")
    budget = default_counter_budget(p) if counter_budget is None else counter_budget
    sketches = [MisraGries(budget) for _ in range(h.d)]
    class_counts: dict[int, int] = {}

    def visit(item: tuple[int, ...], cls: int | None) -> None:
        class_counts[cls] = class_counts.get(cls, 0) + 1
        for sk, x in zip(sketches, item):
            sk.update(x)

    summary = h.replay(visit)
    ell = len(class_counts)
    if ell > MAX_CLASS_VALUES:
        raise ConfigError(
            f"{ell} distinct class values (> {MAX_CLASS_VALUES}); "
            "the class column is expected to be low-cardinality"
        )
    priors = ClassPriors(tuple(class_counts.get(z, 0) for z in range(ell)), summary.m)
    cutoff = candidate_cutoff(p.lam, budget) * summary.m - 1e-9
    sets = tuple(
        frozenset(x for x, c in sk.counters.items() if c >= cutoff) for sk in sketches
    )
    return priors, CandidateSets(sets)


@dataclass
class NBModel:
    """Frozen two-pass state: exact totals and per-class counts per candidate."""

    m: int
    params: HHParams
    priors: ClassPriors
    tables: list[list[tuple[int, int]]]  # per coordinate: [(value, total count)] desc
    index: list[dict[int, int]]  # per coordinate: value -> total count
    class_counts_by_value: list[dict[int, list[int]]]  # value -> count per class
    conditionals: list[dict[int, tuple[float, ...]]]  # value -> cond(x|z) per class

    @property
    def ell(self) -> int:
        return self.priors.ell

    def marginal(self, coord: int, x: int) -> float | None:
        c = self.index[coord].get(x)
        return None if c is None else c / self.m

    def conditional(self, coord: int, x: int, z: int) -> float:
        vec = self.conditionals[coord].get(x)
        if vec is None:
            raise ConfigError(f"value {x} on coordinate {coord} is not a stored candidate")
        return vec[z]

    def heavy_entries(self, coord: int, threshold: float) -> list[tuple[int, float]]:
        """Candidates with exact marginal ratio >= threshold, most frequent first."""
        m = self.m
        out = []
        for x, c in self.tables[coord]:
            f = c / m
            if f < threshold:
                break
            out.append((x, f))
        return out

    def s_i(self, coord: int) -> list[tuple[int, float]]:
        return self.heavy_entries(coord, self.params.lam)


def nb_pass2(
    h: DatasetHandle, priors: ClassPriors, cands: CandidateSets, p: HHParams
) -> NBModel:
    """Second pass: exact (value, class) joint counts for every candidate."""
    if h.class_col is None:
        raise NoClassColumnError("nb_pass2 needs a dataset with a class column")
    if cands.d != h.d:
        raise ConfigError(f"candidate sets cover {cands.d} coordinates, dataset has {h.d}")
    ell = priors.ell
    by_value: list[dict[int, list[int]]] = [
        {x: [0] * ell for x in sorted(s)} for s in cands.sets
    ]

    def visit(item: tuple[int, ...], cls: int | None) -> None:
        for bv, x in zip(by_value, item):
            row = bv.get(x)
            if row is not None:
                row[cls] += 1

    summary = h.replay(visit)
    if summary.m != priors.m:
        raise ConfigError("pass-2 stream length differs from pass-1 priors")
    index = [{x: sum(row) for x, row in bv.items()} for bv in by_value]
    tables = [sorted(ix.items(), key=lambda e: (-e[1], e[0])) for ix in index]
    conditionals = [
        {
            x: tuple(row[z] / priors.counts[z] for z in range(ell))
            for x, row in bv.items()
        }
        for bv in by_value
    ]
    return NBModel(
        m=summary.m,
        params=p,
        priors=priors,
        tables=tables,
        index=index,
        class_counts_by_value=by_value,
        conditionals=conditionals,
    )


def nb_score(
    mod: NBModel, t: Subcube, v: JointValue, threshold: float | None = None
) -> float | None:
    """The class-mixture score of v, or None when some v_i is not a heavy
    candidate at the threshold (default lam)."""
    th = mod.params.lam if threshold is None else threshold
    if len(v) != t.k:
        raise ConfigError(f"joint value of length {len(v)} for a {t.k}-dim subcube")
    vecs = []
    for coord, x in zip(t.coords, v):
        f = mod.marginal(coord, x)
        if f is None or f < th:
            return None
        vecs.append(mod.conditionals[coord][x])
    priors = mod.priors
    q = 0.0
    for z in range(mod.ell):
        prod = 1.0
        for vec in vecs:
            prod *= vec[z]
        q += priors.prior(z) * prod
    return q


def nb_query(
    mod: NBModel, t: Subcube, v: JointValue, threshold: float | None = None
) -> Verdict:
    th = mod.params.lam if threshold is None else threshold
    q = nb_score(mod, t, v, threshold)
    return Verdict.YES if q is not None and q >= th else Verdict.NO


def nb_all_query_levels(
    mod: NBModel, t: Subcube, threshold: float | None = None
) -> list[NBPartialLevel]:
    th = mod.params.lam if threshold is None else threshold
    ell = mod.ell
    prior = [mod.priors.prior(z) for z in range(ell)]

    def score(vec: tuple[float, ...]) -> float:
        q = 0.0
        for z in range(ell):
            q += prior[z] * vec[z]
        return q

    entries: list[tuple[JointValue, tuple[float, ...], float]] = []
    first_cond = mod.conditionals[t.coords[0]]
    for x, _f in mod.heavy_entries(t.coords[0], th):
        vec = first_cond[x]
        q = score(vec)
        if q >= th:
            entries.append(((x,), vec, q))
    levels = [NBPartialLevel(1, entries)]
    for j, coord in enumerate(t.coords[1:], start=2):
        ext = mod.heavy_entries(coord, th)
        cond = mod.conditionals[coord]
        nxt: list[tuple[JointValue, tuple[float, ...], float]] = []
        for prefix, vec, _q in levels[-1].entries:
            for x, _f in ext:
                xvec = cond[x]
                new_vec = tuple(a * b for a, b in zip(vec, xvec))
                q = score(new_vec)
                if q >= th:
                    nxt.append((prefix + (x,), new_vec, q))
        levels.append(NBPartialLevel(j, nxt))
    return levels


def nb_all_query_scored(
    mod: NBModel, t: Subcube, threshold: float | None = None
) -> dict[JointValue, float]:
    return {v: q for v, _vec, q in nb_all_query_levels(mod, t, threshold)[-1].entries}


def nb_all_query(
    mod: NBModel, t: Subcube, threshold: float | None = None
) -> set[JointValue]:
    return set(nb_all_query_scored(mod, t, threshold))
