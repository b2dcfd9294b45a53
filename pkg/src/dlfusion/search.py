"""Reduced exhaustive search over (fusion partition, per-block MP).

The candidate space follows the reduced formulation: non-final block sizes
are multiples of block_multiple (default 4), the final block may be any
remainder size, and MP comes from a fixed candidate list. Total latency is
the exact sum of independent per-block latencies, so for each partition the
best assignment is found block by block; this visits the same candidate set
as full enumeration and lands on the same tie-broken winner (fewest blocks,
then lexicographically smallest MP vector), just without materializing the
cross product.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator

from .config import CostModelConfig
from .costmodel import block_cost
from .errors import DomainError, SpaceTooLargeError
from .fusion import ORACLE_LABEL
from .ir import NetworkIR
from .schedule import FusionBlock, Schedule, make_block

DEFAULT_MP_CHOICES = (1, 2, 4, 8, 12, 16, 24, 32)


@dataclass(frozen=True)
class SearchSpaceSpec:
    mp_choices: tuple[int, ...] = DEFAULT_MP_CHOICES
    block_multiple: int = 4
    max_candidates: int = 10**7

    def __post_init__(self) -> None:
        if not self.mp_choices or any(m < 1 for m in self.mp_choices):
            raise DomainError("mp_choices must be a non-empty list of positive ints")
        if len(set(self.mp_choices)) != len(self.mp_choices):
            raise DomainError("mp_choices must not repeat")
        if self.block_multiple < 1:
            raise DomainError(f"block_multiple must be >= 1, got {self.block_multiple}")
        if self.max_candidates < 1:
            raise DomainError("max_candidates must be >= 1")


def enumerate_partitions(num_layers: int, block_multiple: int) -> Iterator[list[tuple[int, int]]]:
    """Yield partitions as lists of (start, stop) half-open layer ranges.

    All blocks except the last have sizes that are multiples of
    block_multiple; the last takes whatever remains. At each position the
    close-out-now choice comes first, giving a deterministic order that
    starts with the single-block partition.
    """
    if num_layers < 1:
        raise DomainError(f"need at least one layer, got {num_layers}")

    def rec(start: int) -> Iterator[list[tuple[int, int]]]:
        yield [(start, num_layers)]
        size = block_multiple
        while start + size < num_layers:
            head = (start, start + size)
            for tail in rec(start + size):
                yield [head] + tail
            size += block_multiple

    return rec(0)


def candidate_count(num_layers: int, spec: SearchSpaceSpec) -> int:
    """Exact number of (partition, MP assignment) candidates, as an integer."""
    m = len(spec.mp_choices)
    step = spec.block_multiple
    # f[r] = candidates for a suffix of r layers
    f = [0] * (num_layers + 1)
    for r in range(1, num_layers + 1):
        total = m  # close out with a single final block
        size = step
        while size <= r - 1:
            total += m * f[r - size]
            size += step
        f[r] = total
    return f[num_layers]


@dataclass(frozen=True)
class SearchResult:
    best: Schedule
    best_latency_ms: float
    candidates: int
    partitions: int
    wall_time_s: float = field(compare=False)


def brute_force(net: NetworkIR, cfg: CostModelConfig,
                spec: SearchSpaceSpec | None = None) -> SearchResult:
    """Exhaustive minimum over the reduced candidate space.

    Raises SpaceTooLargeError if the implied candidate count exceeds
    spec.max_candidates. Deterministic: ties resolve to fewer blocks, then
    the lexicographically smallest MP vector.
    """
    if spec is None:
        spec = SearchSpaceSpec()
    n = len(net)
    implied = candidate_count(n, spec)
    if implied > spec.max_candidates:
        raise SpaceTooLargeError(
            f"{implied} candidates exceed the cap of {spec.max_candidates}; "
            "raise --max-candidates or coarsen the space")
    start_time = time.perf_counter()
    mp_order = sorted(spec.mp_choices)

    cache: dict[tuple[int, int, int], float] = {}

    def block_latency(lo: int, hi: int, mp: int) -> float:
        key = (lo, hi, mp)
        if key not in cache:
            layers = list(net.layers[lo:hi])
            cache[key] = block_cost(layers, mp, fused=True, cfg=cfg).latency_ms
        return cache[key]

    best_key: tuple[float, int, tuple[int, ...]] | None = None
    best_partition: list[tuple[int, int]] | None = None
    num_partitions = 0
    for partition in enumerate_partitions(n, spec.block_multiple):
        num_partitions += 1
        total = 0.0
        mps = []
        for lo, hi in partition:
            # ascending mp order makes the strict < keep the smallest tie
            best_mp, best_lat = None, None
            for mp in mp_order:
                lat = block_latency(lo, hi, mp)
                if best_lat is None or lat < best_lat:
                    best_mp, best_lat = mp, lat
            total += best_lat
            mps.append(best_mp)
        key = (total, len(partition), tuple(mps))
        if best_key is None or key < best_key:
            best_key, best_partition = key, partition

    blocks = tuple(
        make_block(list(net.layers[lo:hi]), mp)
        for (lo, hi), mp in zip(best_partition, best_key[2]))
    best = Schedule(network=net.name, strategy=ORACLE_LABEL, blocks=blocks)
    return SearchResult(
        best=best,
        best_latency_ms=best_key[0],
        candidates=implied,
        partitions=num_partitions,
        wall_time_s=time.perf_counter() - start_time,
    )
