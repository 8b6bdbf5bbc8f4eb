"""Exact brute-force frequency tables and model-error diagnostics.

Everything here counts with integers and only converts to floating point at
the API boundary, so summation identities can be asserted exactly. The
oracle is the reference every approximate algorithm is scored against; it is
meant to be slow and right.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .core import HHParams, JointValue, Subcube
from .errors import NoClassColumnError, SupportTooLargeError
from .stream_io import DatasetHandle

DEFAULT_SUPPORT_CAP = 10**7


class TruthLabel(Enum):
    MUST_YES = "MUST_YES"
    MUST_NO = "MUST_NO"
    EITHER = "EITHER"


@dataclass(frozen=True)
class GroundTruth:
    """Exact joint-value counts for one subcube over one dataset."""

    subcube: Subcube
    m: int
    counts: dict[JointValue, int]

    def freq(self, v: JointValue) -> float:
        return self.counts.get(v, 0) / self.m

    def freq_exact(self, v: JointValue) -> Fraction:
        return Fraction(self.counts.get(v, 0), self.m)

    def table(self) -> dict[JointValue, float]:
        return {v: c / self.m for v, c in self.counts.items()}

    def heavy_set(self, gamma: float) -> set[JointValue]:
        """Joint values with exact frequency ratio >= gamma."""
        threshold = gamma * self.m
        return {v for v, c in self.counts.items() if c >= threshold}

    def top_values(self, k: int) -> list[JointValue]:
        """The k most frequent joint values; count ties broken by value."""
        return sorted(self.counts, key=lambda v: (-self.counts[v], v))[:k]


def exact_table(h: DatasetHandle, t: Subcube) -> GroundTruth:
    """Count every joint value of `t` by a full pass over the dataset."""
    counts: dict[JointValue, int] = {}
    coords = t.coords

    def visit(item: tuple[int, ...], _cls: int | None) -> None:
        v = tuple(item[c] for c in coords)
        counts[v] = counts.get(v, 0) + 1

    summary = h.replay(visit)
    return GroundTruth(t, summary.m, counts)


def truth_label(f: float, p: HHParams) -> TruthLabel:
    """Which answers are acceptable for a value with exact frequency ratio f."""
    if f >= p.gamma:
        return TruthLabel.MUST_YES
    if f < p.gamma / 4.0:
        return TruthLabel.MUST_NO
    return TruthLabel.EITHER


def _marginal_counts(h: DatasetHandle, t: Subcube) -> list[dict[int, int]]:
    per_coord: list[dict[int, int]] = [{} for _ in t.coords]
    coords = t.coords

    def visit(item: tuple[int, ...], _cls: int | None) -> None:
        for slot, c in enumerate(coords):
            x = item[c]
            d = per_coord[slot]
            d[x] = d.get(x, 0) + 1

    h.replay(visit)
    return per_coord


def _check_support(sizes: list[int], cap: int) -> None:
    cells = 1
    for s in sizes:
        cells *= s
        if cells > cap:
            raise SupportTooLargeError(
                f"support product exceeds cap {cap} (at least {cells} cells)"
            )


def empirical_alpha_independence(
    h: DatasetHandle, t: Subcube, support_cap: int = DEFAULT_SUPPORT_CAP
) -> float:
    """Worst deviation of the joint table from the product of its marginals.

    Enumerates the cartesian product of the observed per-coordinate supports;
    joint values never observed count with frequency 0 (their deviation is
    the marginal product itself).
    """
    truth = exact_table(h, t)
    marginals = _marginal_counts(h, t)
    supports = [sorted(mc) for mc in marginals]
    _check_support([len(s) for s in supports], support_cap)
    m = truth.m
    marg_f = [{x: c / m for x, c in mc.items()} for mc in marginals]
    worst = 0.0
    for v in itertools.product(*supports):
        prod = 1.0
        for slot, x in enumerate(v):
            prod *= marg_f[slot][x]
        dev = abs(truth.counts.get(v, 0) / m - prod)
        if dev > worst:
            worst = dev
    return worst


def empirical_alpha_nb(
    h: DatasetHandle, t: Subcube, support_cap: int = DEFAULT_SUPPORT_CAP
) -> float:
    """Worst deviation of the joint table from the class-factorized mixture.

    Uses the handle's designated class column: the reference score of a joint
    value v is sum_z prior(z) * prod_i cond_i(v_i | z), with empirical priors
    and conditionals.
    """
    if h.class_col is None:
        raise NoClassColumnError("empirical_alpha_nb needs a class column")
    truth = exact_table(h, t)
    coords = t.coords
    class_counts: dict[int, int] = {}
    joint_class: list[dict[tuple[int, int], int]] = [{} for _ in coords]

    def visit(item: tuple[int, ...], cls: int | None) -> None:
        class_counts[cls] = class_counts.get(cls, 0) + 1
        for slot, c in enumerate(coords):
            key = (item[c], cls)
            d = joint_class[slot]
            d[key] = d.get(key, 0) + 1

    h.replay(visit)
    m = truth.m
    classes = sorted(class_counts)
    priors = [class_counts[z] / m for z in classes]
    supports = [sorted({x for (x, _z) in jc}) for jc in joint_class]
    _check_support([len(s) for s in supports], support_cap)
    cond = [
        {(x, z): jc.get((x, z), 0) / class_counts[z] for x in supports[slot] for z in classes}
        for slot, jc in enumerate(joint_class)
    ]
    worst = 0.0
    for v in itertools.product(*supports):
        q = 0.0
        for zi, z in enumerate(classes):
            prod = priors[zi]
            for slot, x in enumerate(v):
                prod *= cond[slot][(x, z)]
            q += prod
        dev = abs(truth.counts.get(v, 0) / m - q)
        if dev > worst:
            worst = dev
    return worst


def project_counts(truth: GroundTruth, positions: list[int]) -> dict[JointValue, int]:
    """Marginalize a ground-truth table onto a subset of its positions."""
    out: dict[JointValue, int] = {}
    for v, c in truth.counts.items():
        key = tuple(v[p] for p in positions)
        out[key] = out.get(key, 0) + c
    return out
