"""Domain types shared by every algorithm: items, subcubes, thresholds, verdicts.

Items are plain tuples of dense non-negative integer codes, one code per
coordinate, produced by the dataset dictionary encoder. A subcube names the
ordered coordinates a query targets; projecting an item onto it yields the
joint value those coordinates carry.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import (
    ConfigError,
    DimensionMismatchError,
    DuplicateIndexError,
    EmptySubcubeError,
    IndexOutOfRangeError,
)

# A stream record: one code per coordinate.
Item = tuple[int, ...]
# Codes of an item restricted to a subcube's coordinates, in subcube order.
JointValue = tuple[int, ...]


class Verdict(Enum):
    YES = "YES"
    NO = "NO"


@dataclass(frozen=True)
class Subcube:
    """An ordered set of distinct coordinate indices in [0, d)."""

    coords: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def make_subcube(indices: Sequence[int], d: int) -> Subcube:
    """Validate `indices` against dimensionality `d` and build a Subcube.

    Indices must be nonempty, distinct, and all in [0, d).
    """
    if len(indices) == 0:
        raise EmptySubcubeError("subcube needs at least one coordinate")
    seen: set[int] = set()
    for ix in indices:
        if not 0 <= ix < d:
            raise IndexOutOfRangeError(f"coordinate {ix} outside [0, {d})")
        if ix in seen:
            raise DuplicateIndexError(f"coordinate {ix} repeated")
        seen.add(ix)
    return Subcube(tuple(int(ix) for ix in indices))


def project(item: Sequence[int], t: Subcube) -> JointValue:
    """Restrict `item` to the coordinates of `t`, in `t`'s order."""
    try:
        return tuple(item[c] for c in t.coords)
    except IndexError:
        raise DimensionMismatchError(
            f"item of length {len(item)} cannot be projected onto coordinates {t.coords}"
        ) from None


@dataclass(frozen=True)
class HHParams:
    """Heavy-hitter thresholds.

    gamma is the reporting threshold: values with frequency ratio >= gamma
    must be reported, values below gamma/4 must not be, and the gap in
    between may go either way. lam (= gamma/2, always) is the internal
    decision threshold of the model-based algorithms. gamma_star is the
    decision threshold actually applied when answering; it defaults to
    gamma/2 and must stay inside (gamma/4, gamma]. Experiment sweeps that
    step outside that window pass an explicit threshold to the query
    functions instead of building new params.

    alpha_budget is the assumed bound on the model error of the factorized
    frequency approximations; the model-based passes refuse to run when it
    exceeds gamma/10.
    """

    gamma: float
    gamma_star: float | None = None
    alpha_budget: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.gamma_star is None:
            object.__setattr__(self, "gamma_star", self.gamma / 2.0)
        if not self.gamma / 4.0 < self.gamma_star <= self.gamma:
            raise ConfigError(
                f"gamma_star {self.gamma_star} outside (gamma/4, gamma] for gamma {self.gamma}"
            )
        if self.alpha_budget is None:
            object.__setattr__(self, "alpha_budget", self.gamma / 10.0)
        if not 0.0 <= self.alpha_budget <= 1.0:
            raise ConfigError(f"alpha_budget must be in [0, 1], got {self.alpha_budget}")

    @property
    def lam(self) -> float:
        """Internal decision threshold, exactly gamma/2."""
        return self.gamma / 2.0
