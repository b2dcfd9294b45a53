"""Latency model for fused blocks on the multicore accelerator.

A block executes its member layers back to back at one model-parallelism
degree. Parallelism over a fused block is a spatial split of the final
output into a near-square tile grid; each tile recomputes the halo regions
its upstream layers need, which is where fusion's redundancy comes from.
Compute time follows a saturating per-core efficiency curve and memory time
a pure bandwidth term; the block takes the max of the two.
"""
from __future__ import annotations

from dataclasses import dataclass

from .config import CostModelConfig
from .errors import NonPowerOfTwoError
from .ir import ConvParams, Layer, LayerKind, NetworkIR
from .opcount import GIGA, OpCount, layer_ops, tensor_bytes
from .schedule import Schedule, block_layers, check_coverage


def tile_grid(mp: int, h: int, w: int) -> tuple[int, int]:
    """Split mp cores into a (rows, cols) grid over an h x w image.

    The factor pair is the most balanced one (for mp = 2^k that is
    2^ceil(k/2) x 2^floor(k/2)), and the longer image dimension receives
    the larger factor; ties go to rows.
    """
    if mp < 1:
        raise NonPowerOfTwoError(f"mp must be >= 1, got {mp}")
    small = 1
    for d in range(1, int(mp**0.5) + 1):
        if mp % d == 0:
            small = d
    large = mp // small
    return (large, small) if h >= w else (small, large)


def _split(extent: int, parts: int) -> list[tuple[int, int]]:
    """Partition [0, extent) into `parts` contiguous half-open intervals whose
    sizes differ by at most one. Intervals may be empty when parts > extent."""
    return [(i * extent // parts, (i + 1) * extent // parts) for i in range(parts)]


def _backmap(runs: list[tuple[int, int]], k: int, stride: int, padding: int,
             extent: int) -> list[tuple[int, int]]:
    """Input runs a conv must read to produce the given output runs, clipped
    to [0, extent) and kept as a sorted disjoint list.

    When stride <= kernel the footprints of adjacent outputs touch, so a run
    maps to a run; a coarser stride leaves gaps, which are preserved exactly
    rather than hulled over.
    """
    raw: list[tuple[int, int]] = []
    for lo, hi in runs:
        if stride <= k:
            raw.append((lo * stride - padding, (hi - 1) * stride - padding + k))
        else:
            raw.extend((r * stride - padding, r * stride - padding + k)
                       for r in range(lo, hi))
    merged: list[tuple[int, int]] = []
    for lo, hi in raw:  # raw is sorted because the map is monotone
        lo, hi = max(0, lo), min(extent, hi)
        if lo >= hi:
            continue
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _run_length(runs: list[tuple[int, int]]) -> int:
    return sum(hi - lo for lo, hi in runs)


@dataclass(frozen=True)
class RedundancyReport:
    """Per-layer recomputation factors for one fused block at one MP."""

    per_layer: tuple[tuple[int, float], ...]  # (layer id or position, factor >= 1)
    computed_elements: tuple[int, ...]  # sum over tiles of required elements
    base_elements: tuple[int, ...]      # unfused h_out * w_out per layer
    effective_ops: OpCount

    @property
    def factors(self) -> tuple[float, ...]:
        return tuple(f for _, f in self.per_layer)


def halo_redundancy(convs: list[ConvParams], mp: int) -> RedundancyReport:
    """Exact halo analysis for a chain of convolutions split mp ways.

    The final layer's output is tiled on tile_grid(mp, ...); every tile's
    required region is propagated backward through each conv's kernel/stride/
    padding with clipping to that layer's own output bounds. Rows and columns
    propagate independently as run lists, so stride gaps count exactly; see
    _backmap. Attached layers are transparent to this chain. A fused block
    never computes fewer
    elements than the unfused net would, so per-layer factors are clamped
    to >= 1 (boundary slack from stride reconstruction is not credited).
    """
    if not convs:
        return RedundancyReport((), (), (), OpCount(0))
    base = [p.h_out * p.w_out for p in convs]
    per_element = [2 * p.k_h * p.k_w * p.c_in * p.c_out for p in convs]
    n = len(convs)
    if mp == 1:
        computed = list(base)
    else:
        last = convs[-1]
        rows, cols = tile_grid(mp, last.h_out, last.w_out)
        row_iv = _split(last.h_out, rows)
        col_iv = _split(last.w_out, cols)
        computed = [0] * n
        for r0, r1 in row_iv:
            for c0, c1 in col_iv:
                rs = [(r0, r1)] if r1 > r0 else []
                cs = [(c0, c1)] if c1 > c0 else []
                computed[-1] += max(0, r1 - r0) * max(0, c1 - c0)
                for i in range(n - 2, -1, -1):
                    down = convs[i + 1]
                    rs = _backmap(rs, down.k_h, down.stride, down.padding, convs[i].h_out)
                    cs = _backmap(cs, down.k_w, down.stride, down.padding, convs[i].w_out)
                    computed[i] += _run_length(rs) * _run_length(cs)
        computed = [max(c, b) for c, b in zip(computed, base)]
    per_layer = tuple((i, c / b) for i, (c, b) in enumerate(zip(computed, base)))
    effective = sum(pe * c for pe, c in zip(per_element, computed))
    return RedundancyReport(per_layer, tuple(computed), tuple(base), OpCount(effective))


def single_core_efficiency(per_core_gops: float, cfg: CostModelConfig) -> float:
    """Fraction of one core's peak achieved at a given per-core workload.
    Ramps as (x / critical)^gamma and saturates at 1.0 at the critical point."""
    if per_core_gops <= 0:
        return 0.0
    ratio = per_core_gops / cfg.opcount_critical_gops
    return min(1.0, ratio**cfg.gamma)


def channel_efficiency(c_out: int, mp: int, cfg: CostModelConfig) -> float:
    """Penalty for slicing output channels thinner than the hardware's
    preferred partition granularity."""
    return min(1.0, (c_out / mp) / cfg.min_channel_partition)


def _base_elements(layer: Layer) -> int:
    """Output elements the layer computes when run standalone."""
    if layer.kind is LayerKind.CONV:
        return layer.conv.h_out * layer.conv.w_out
    return layer.fc.m * layer.fc.n


def _io_bytes(layer: Layer, bpe: int) -> tuple[int, int, int]:
    """(input, weight, output) bytes for a compute layer."""
    if layer.kind is LayerKind.CONV:
        p = layer.conv
        return (p.c_in * p.h_in * p.w_in * bpe,
                p.c_in * p.c_out * p.k_h * p.k_w * bpe,
                p.c_out * p.h_out * p.w_out * bpe)
    p = layer.fc
    return (p.m * p.k * bpe, p.k * p.n * bpe, p.m * p.n * bpe)


def block_memory_bytes(layers: list[Layer], fused: bool, cfg: CostModelConfig) -> int:
    """DRAM traffic for the block. Fused blocks stream intermediates on chip:
    first input + all weights + last output. Unfused layers each round-trip."""
    members = [l for l in layers if l.is_compute]
    if not members:
        return 0
    if not fused:
        return sum(tensor_bytes(l, cfg.bytes_per_element) for l in layers)
    bpe = cfg.bytes_per_element
    first_in, _, _ = _io_bytes(members[0], bpe)
    _, _, last_out = _io_bytes(members[-1], bpe)
    weights = sum(_io_bytes(l, bpe)[1] for l in members)
    return first_in + weights + last_out


@dataclass(frozen=True)
class CostBreakdown:
    compute_ms: float
    memory_ms: float
    latency_ms: float
    efficiency: float
    effective_ops: OpCount
    memory_bytes: int
    mp: int
    per_core_gops: float
    redundancy: RedundancyReport  # keyed by real layer ids; FC members at 1.0


def block_cost(layers: list[Layer], mp: int, fused: bool,
               cfg: CostModelConfig) -> CostBreakdown:
    """Latency of one block at one MP.

    Halo recomputation applies only when the block is fused and split
    (mp > 1); an unfused layer is modeled as a channel split with no
    redundancy. Channel granularity penalizes either way.
    """
    if mp < 1 or mp > cfg.num_cores:
        raise NonPowerOfTwoError(f"mp must be in [1, {cfg.num_cores}], got {mp}")
    members = [l for l in layers if l.is_compute]
    mem_bytes = block_memory_bytes(layers, fused, cfg)
    memory_ms = mem_bytes / (cfg.bandwidth_gbs * 1e9) * 1000.0

    ops = [layer_ops(l).ops for l in members]
    total_ops = sum(ops)
    if total_ops == 0:
        empty = RedundancyReport((), (), (), OpCount(0))
        return CostBreakdown(0.0, memory_ms, memory_ms, 1.0, OpCount(0),
                             mem_bytes, mp, 0.0, empty)

    factors = {id(l): 1.0 for l in members}
    computed = {id(l): _base_elements(l) for l in members}
    effective = total_ops
    if fused and mp > 1:
        conv_members = [l for l in members if l.kind is LayerKind.CONV]
        if conv_members:
            report = halo_redundancy([l.conv for l in conv_members], mp)
            effective = report.effective_ops.ops + sum(
                layer_ops(l).ops for l in members if l.kind is LayerKind.FC)
            for l, (_, f), c in zip(conv_members, report.per_layer,
                                    report.computed_elements):
                factors[id(l)] = f
                computed[id(l)] = c

    effective_gops = effective / GIGA
    per_core_gops = effective_gops / mp
    core_eff = single_core_efficiency(per_core_gops, cfg)
    chan_eff = sum(o * channel_efficiency(l.c_out, mp, cfg)
                   for o, l in zip(ops, members)) / total_ops
    efficiency = core_eff * chan_eff
    compute_ms = effective_gops / (mp * cfg.peak_gflops_per_core * efficiency) * 1000.0
    redundancy = RedundancyReport(
        per_layer=tuple((l.id, factors[id(l)]) for l in members),
        computed_elements=tuple(computed[id(l)] for l in members),
        base_elements=tuple(_base_elements(l) for l in members),
        effective_ops=OpCount(effective),
    )
    return CostBreakdown(
        compute_ms=compute_ms,
        memory_ms=memory_ms,
        latency_ms=max(compute_ms, memory_ms),
        efficiency=efficiency,
        effective_ops=OpCount(effective),
        memory_bytes=mem_bytes,
        mp=mp,
        per_core_gops=per_core_gops,
        redundancy=redundancy,
    )


@dataclass(frozen=True)
class SchedulePrediction:
    total_latency_ms: float
    fps: float
    blocks: tuple[CostBreakdown, ...]


def predict_schedule(net: NetworkIR, schedule: Schedule,
                     cfg: CostModelConfig) -> SchedulePrediction:
    """Total latency of a schedule: the exact sum of its block latencies.
    Single-layer blocks cost the same fused or not, so every block is
    evaluated through the fused path."""
    check_coverage(net, schedule)
    breakdowns = tuple(
        block_cost(block_layers(net, b), b.mp, fused=True, cfg=cfg)
        for b in schedule.blocks)
    total = sum(b.latency_ms for b in breakdowns)
    fps = 1000.0 / total if total > 0 else float("inf")
    return SchedulePrediction(total_latency_ms=total, fps=fps, blocks=breakdowns)
