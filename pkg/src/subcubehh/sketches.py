"""One-dimensional stream summaries: reservoir sample, Misra-Gries, Count-Min.

All three are deterministic given (seed, stream order). Randomness comes from
a counter-based splitmix64 hash rather than a stateful RNG, so a summary can
be snapshotted and resumed mid-stream without loss.

Guarantees maintained here:

- Reservoir: after n updates each item seen so far is retained with
  probability capacity/n, uniformly without replacement (Algorithm R).
- MisraGries with budget c: for every value x,
  true_count(x) - processed/c <= estimate(x) <= true_count(x).
- CountMin: point_query(x) >= true_count(x) always; each row overshoots by
  more than 2*processed/width with probability at most 1/2, so the min over
  depth rows fails that bound with probability about 2^-depth.
"""

from __future__ import annotations

import struct
from typing import Sequence

from .errors import ConfigError, SubcubeHHError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

SNAPSHOT_MAGIC = b"SHH1"

_KIND_MISRA_GRIES = 1
_KIND_COUNT_MIN = 2
_KIND_RESERVOIR = 3


def splitmix64(x: int) -> int:
    """Finalizer of the splitmix64 generator; a strong 64-bit mixer."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def hash_pair(x: int, seed: int) -> int:
    """64-bit hash of (x, seed), independent-looking across seeds."""
    return splitmix64(splitmix64(seed) ^ (x & _MASK64))


class Reservoir:
    """Uniform sample without replacement of fixed capacity (Algorithm R).

    One hash draw per item past capacity. The draw for the i-th item is a
    pure function of (seed, i), which keeps runs reproducible and snapshots
    resumable.
    """

    __slots__ = ("capacity", "seed", "samples", "seen")

    def __init__(self, capacity: int, seed: int = 0):
        if capacity < 0:
            raise ConfigError(f"capacity must be >= 0, got {capacity}")
        self.capacity = capacity
        self.seed = seed
        self.samples: list[tuple[int, ...]] = []
        self.seen = 0

    def update(self, item: Sequence[int]) -> None:
        self.seen += 1
        if len(self.samples) < self.capacity:
            self.samples.append(tuple(item))
        elif self.capacity > 0:
            j = hash_pair(self.seen, self.seed) % self.seen
            if j < self.capacity:
                self.samples[j] = tuple(item)


class MisraGries:
    """Deterministic frequent-items summary with at most `counter_budget` counters.

    update(x): increment x's counter if tracked; start it at 1 if a slot is
    free; otherwise decrement every counter and drop the ones that hit zero.
    """

    __slots__ = ("counter_budget", "counters", "processed")

    def __init__(self, counter_budget: int):
        if counter_budget < 0:
            raise ConfigError(f"counter_budget must be >= 0, got {counter_budget}")
        self.counter_budget = counter_budget
        self.counters: dict[int, int] = {}
        self.processed = 0

    def update(self, x: int) -> None:
        self.processed += 1
        counters = self.counters
        if x in counters:
            counters[x] += 1
        elif len(counters) < self.counter_budget:
            counters[x] = 1
        else:
            dead = []
            for key in counters:
                counters[key] -= 1
                if counters[key] == 0:
                    dead.append(key)
            for key in dead:
                del counters[key]

    def estimate(self, x: int) -> int:
        return self.counters.get(x, 0)

    def tracked(self) -> list[int]:
        """Currently tracked values, in first-tracked order."""
        return list(self.counters)


class CountMin:
    """Count-Min sketch: depth x width counters, one-sided overestimates.

    Each row hashes with its own seed derived from the sketch seed; a point
    query returns the minimum counter across rows.
    """

    __slots__ = ("width", "depth", "seed", "row_seeds", "table", "processed")

    def __init__(self, width: int, depth: int = 4, seed: int = 0):
        if width < 1:
            raise ConfigError(f"width must be >= 1, got {width}")
        if depth < 1:
            raise ConfigError(f"depth must be >= 1, got {depth}")
        self.width = width
        self.depth = depth
        self.seed = seed
        self.row_seeds = [hash_pair(r + 1, seed) for r in range(depth)]
        self.table = [[0] * width for _ in range(depth)]
        self.processed = 0

    def update(self, x: int, count: int = 1) -> None:
        if count < 0:
            raise ConfigError(f"count must be >= 0, got {count}")
        self.processed += count
        width = self.width
        for row, rs in zip(self.table, self.row_seeds):
            row[hash_pair(x, rs) % width] += count

    def point_query(self, x: int) -> int:
        width = self.width
        return min(row[hash_pair(x, rs) % width] for row, rs in zip(self.table, self.row_seeds))


# ---------------------------------------------------------------------------
# Versioned binary snapshots (magic "SHH1", little-endian integers).
# ---------------------------------------------------------------------------


def sketch_to_bytes(sk: MisraGries | CountMin | Reservoir) -> bytes:
    out = [SNAPSHOT_MAGIC]
    if isinstance(sk, MisraGries):
        out.append(struct.pack("<B", _KIND_MISRA_GRIES))
        out.append(struct.pack("<QQI", sk.counter_budget, sk.processed, len(sk.counters)))
        for value, count in sk.counters.items():
            out.append(struct.pack("<QQ", value, count))
    elif isinstance(sk, CountMin):
        out.append(struct.pack("<B", _KIND_COUNT_MIN))
        out.append(struct.pack("<IIQQ", sk.width, sk.depth, sk.seed & _MASK64, sk.processed))
        for row in sk.table:
            out.append(struct.pack(f"<{sk.width}Q", *row))
    elif isinstance(sk, Reservoir):
        out.append(struct.pack("<B", _KIND_RESERVOIR))
        d = len(sk.samples[0]) if sk.samples else 0
        out.append(
            struct.pack("<QQQII", sk.capacity, sk.seen, sk.seed & _MASK64, d, len(sk.samples))
        )
        for item in sk.samples:
            out.append(struct.pack(f"<{d}Q", *item))
    else:
        raise ConfigError(f"cannot snapshot object of type {type(sk).__name__}")
    return b"".join(out)


def sketch_from_bytes(data: bytes) -> MisraGries | CountMin | Reservoir:
    if data[:4] != SNAPSHOT_MAGIC:
        raise SubcubeHHError("bad snapshot: magic bytes missing")
    (kind,) = struct.unpack_from("<B", data, 4)
    off = 5
    if kind == _KIND_MISRA_GRIES:
        budget, processed, n = struct.unpack_from("<QQI", data, off)
        off += struct.calcsize("<QQI")
        sk = MisraGries(budget)
        sk.processed = processed
        for _ in range(n):
            value, count = struct.unpack_from("<QQ", data, off)
            off += 16
            sk.counters[value] = count
        return sk
    if kind == _KIND_COUNT_MIN:
        width, depth, seed, processed = struct.unpack_from("<IIQQ", data, off)
        off += struct.calcsize("<IIQQ")
        sk = CountMin(width, depth, seed)
        sk.processed = processed
        for r in range(depth):
            sk.table[r] = list(struct.unpack_from(f"<{width}Q", data, off))
            off += 8 * width
        return sk
    if kind == _KIND_RESERVOIR:
        capacity, seen, seed, d, n = struct.unpack_from("<QQQII", data, off)
        off += struct.calcsize("<QQQII")
        sk = Reservoir(capacity, seed)
        sk.seen = seen
        for _ in range(n):
            sk.samples.append(struct.unpack_from(f"<{d}Q", data, off))
            off += 8 * d
        return sk
    raise SubcubeHHError(f"bad snapshot: unknown sketch kind {kind}")


def save_sketch(sk: MisraGries | CountMin | Reservoir, path) -> None:
    with open(path, "wb") as fh:
        fh.write(sketch_to_bytes(sk))


def load_sketch(path) -> MisraGries | CountMin | Reservoir:
    with open(path, "rb") as fh:
        return sketch_from_bytes(fh.read())
