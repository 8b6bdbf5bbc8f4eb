"""One-pass uniform-sampling answerer for subcube heavy-hitter queries.

Build a reservoir of m' items in a single pass; answer Query(T, v) YES when
the sample frequency of v on T reaches the decision threshold (default
gamma/2), and AllQuery(T) by grouping the sampled projections. With m' from
required_sample_size, the sample frequency of every joint value of every
k-subcube lands within max(gamma, f)/4 of its true ratio with probability at
least 0.9, which makes all mandatory verdicts correct at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import HHParams, Item, JointValue, Subcube, Verdict
from .errors import ConfigError
from .sketches import Reservoir
from .stream_io import DatasetHandle


@dataclass
class SampleModel:
    """Frozen reservoir contents plus query parameters."""

    samples: list[Item]
    m_prime: int  # effective sample size: len(samples)
    capacity: int
    params: HHParams
    seed: int


def required_sample_size(p: HHParams, d: int, k: int, n_max: int) -> int:
    """Smallest sample size with per-value tail mass <= 1/(10 * d^k * n_max^k).

    Computed in log space as ceil(48/gamma * ln(10 * d^k * n_max^k)), so the
    d^k * n_max^k union-bound factor never overflows.
    """
    if k < 1 or d < 1 or n_max < 1:
        raise ConfigError("d, k, n_max must all be >= 1")
    if k > d:
        raise ConfigError(f"subcube dimension k={k} exceeds d={d}")
    log_union = math.log(10.0) + k * math.log(d) + k * math.log(n_max)
    return math.ceil(48.0 / p.gamma * log_union)


def build_sample(h: DatasetHandle, capacity: int, seed: int, p: HHParams) -> SampleModel:
    """One full pass; keeps min(m, capacity) items uniformly without replacement."""
    res = Reservoir(capacity, seed)
    h.replay(lambda item, _cls: res.update(item))
    return SampleModel(
        samples=res.samples, m_prime=len(res.samples), capacity=capacity, params=p, seed=seed
    )


def sample_frequencies(mod: SampleModel, t: Subcube) -> dict[JointValue, float]:
    """Sample frequency of every joint value appearing in the sample."""
    if mod.m_prime == 0:
        return {}
    counts: dict[JointValue, int] = {}
    coords = t.coords
    for item in mod.samples:
        v = tuple(item[c] for c in coords)
        counts[v] = counts.get(v, 0) + 1
    m_prime = mod.m_prime
    return {v: c / m_prime for v, c in counts.items()}


def sample_query(
    mod: SampleModel, t: Subcube, v: JointValue, threshold: float | None = None
) -> Verdict:
    """YES iff the sample frequency of v on t is >= threshold (default gamma_star)."""
    th = mod.params.gamma_star if threshold is None else threshold
    if len(v) != t.k:
        raise ConfigError(f"joint value of length {len(v)} for a {t.k}-dim subcube")
    if mod.m_prime == 0:
        return Verdict.NO  # empty sample: degenerate but total
    coords = t.coords
    count = 0
    for item in mod.samples:
        if all(item[c] == x for c, x in zip(coords, v)):
            count += 1
    return Verdict.YES if count / mod.m_prime >= th else Verdict.NO


def sample_all_query_scored(
    mod: SampleModel, t: Subcube, threshold: float | None = None
) -> dict[JointValue, float]:
    """Joint values at or above the threshold, with their sample frequencies."""
    th = mod.params.gamma_star if threshold is None else threshold
    return {v: f for v, f in sample_frequencies(mod, t).items() if f >= th}


def sample_all_query(
    mod: SampleModel, t: Subcube, threshold: float | None = None
) -> set[JointValue]:
    return set(sample_all_query_scored(mod, t, threshold))
