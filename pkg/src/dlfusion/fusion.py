"""Greedy joint selection of fusion partition and per-block parallelism.

One left-to-right pass: each compute layer casts an MP vote and adds its op
count to the open block; once the accumulated ops per voted core reach the
fusion threshold, the block closes with MP = 2^floor(log2(mean vote)) and
accumulation restarts. Attached layers never vote: leading ones attach to
the next block, and a trailing attached-only remainder joins the block
before it.
"""
from __future__ import annotations

import math
from typing import Callable

from .config import CostModelConfig
from .errors import (
    DomainError,
    InvalidStrategyError,
    NoComputeLayerError,
    NonPowerOfTwoError,
)
from .ir import Layer, NetworkIR
from .mpselect import optimal_mp
from .opcount import layer_ops
from .schedule import FusionBlock, Schedule, make_block

STRATEGY_LABELS = {
    1: "non-optimization",
    2: "fixed-mp",
    3: "dynamic-mp",
    4: "all-fusion-max-mp",
    5: "fusion-fixed-mp",
    6: "dlfusion",
}
ORACLE_LABEL = "brute-force"


def _block_mp(vote_sum: float, vote_count: int, num_cores: int) -> tuple[int, float]:
    avg = vote_sum / vote_count
    mp = 2 ** math.floor(math.log2(avg))
    return max(1, min(mp, num_cores)), avg


def joint_opt(net: NetworkIR, cfg: CostModelConfig,
              threshold_gops: float | None = None) -> Schedule:
    """Partition the net into fusion blocks and pick each block's MP.

    The close condition is sum_ops / mean(votes) >= threshold, i.e. the
    block's per-core workload at its voted parallelism has reached the
    threshold. Defaults to cfg.fusion_threshold_gops, falling back to
    cfg.opcount_critical_gops when that is unset.
    """
    if threshold_gops is None:
        threshold_gops = cfg.effective_fusion_threshold
    if threshold_gops <= 0:
        raise DomainError(f"threshold must be positive, got {threshold_gops}")
    if not any(l.is_compute for l in net.layers):
        raise NoComputeLayerError(f"network '{net.name}' has no compute layer to fuse")

    blocks: list[FusionBlock] = []
    pending: list[Layer] = []
    sum_gops = 0.0
    vote_sum = 0.0
    vote_count = 0
    for layer in net.layers:
        pending.append(layer)
        if layer.is_compute:
            vote_sum += optimal_mp(layer, cfg).mp
            vote_count += 1
            sum_gops += layer_ops(layer).gops
        if vote_count and sum_gops / (vote_sum / vote_count) >= threshold_gops:
            mp, avg = _block_mp(vote_sum, vote_count, cfg.num_cores)
            blocks.append(make_block(pending, mp, avg_mp=avg))
            pending, sum_gops, vote_sum, vote_count = [], 0.0, 0.0, 0
    if pending:
        if vote_count:
            mp, avg = _block_mp(vote_sum, vote_count, cfg.num_cores)
            blocks.append(make_block(pending, mp, avg_mp=avg))
        else:
            # trailing attached-only remainder: merge into the last block
            last = blocks.pop()
            merged = [net.layers[i] for i in last.layer_ids] + pending
            blocks.append(make_block(merged, last.mp, avg_mp=last.avg_mp))
    return Schedule(network=net.name, strategy=STRATEGY_LABELS[6], blocks=tuple(blocks))


def _per_layer_blocks(net: NetworkIR, mp_for: Callable[[Layer], int]) -> list[FusionBlock]:
    return [make_block([l], mp_for(l)) for l in net.layers]


def strategy_schedule(net: NetworkIR, strategy: int, cfg: CostModelConfig,
                      fixed_mp: int = 4,
                      threshold_gops: float | None = None) -> Schedule:
    """Build the schedule for one of the six comparison strategies.

    1 unfused, every layer single-core (the baseline); 2 unfused at one fixed
    MP; 3 unfused with per-layer voted MP; 4 the whole net as one block at
    max MP; 5 greedy fusion partition with one fixed MP; 6 the full joint
    pass. Attached layers run as free single-layer blocks in 1-3.
    """
    if strategy in (2, 5):
        if fixed_mp < 1 or fixed_mp > cfg.num_cores or (fixed_mp & (fixed_mp - 1)):
            raise NonPowerOfTwoError(
                f"fixed mp must be a power of two in [1, {cfg.num_cores}], got {fixed_mp}")
    if strategy == 1:
        blocks = _per_layer_blocks(net, lambda l: 1)
    elif strategy == 2:
        blocks = _per_layer_blocks(net, lambda l: fixed_mp)
    elif strategy == 3:
        blocks = _per_layer_blocks(
            net, lambda l: optimal_mp(l, cfg).mp if l.is_compute else 1)
    elif strategy == 4:
        blocks = [make_block(list(net.layers), cfg.num_cores)]
    elif strategy == 5:
        base = joint_opt(net, cfg, threshold_gops)
        blocks = [FusionBlock(b.layer_ids, fixed_mp, b.sum_op_gops, float(fixed_mp))
                  for b in base.blocks]
    elif strategy == 6:
        return joint_opt(net, cfg, threshold_gops)
    else:
        raise InvalidStrategyError(f"strategy must be 1..6, got {strategy}")
    return Schedule(network=net.name, strategy=STRATEGY_LABELS[strategy],
                    blocks=tuple(blocks))
