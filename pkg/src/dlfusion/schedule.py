"""Fusion schedules: an ordered partition of a net's layers into blocks,
each with one model-parallelism degree, plus their JSON round-trip."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .errors import CoverageError, SchemaError
from .ir import Layer, NetworkIR
from .opcount import layer_ops


@dataclass(frozen=True)
class FusionBlock:
    """A contiguous run of layer ids executed as one fused unit at one MP."""

    layer_ids: tuple[int, ...]
    mp: int
    sum_op_gops: float
    avg_mp: float  # pre-rounding mean of the member layers' MP votes

    def __post_init__(self) -> None:
        if not self.layer_ids:
            raise CoverageError("a fusion block cannot be empty")
        if self.mp < 1:
            raise CoverageError(f"block mp must be >= 1, got {self.mp}")


@dataclass(frozen=True)
class Schedule:
    network: str
    strategy: str
    blocks: tuple[FusionBlock, ...]


def make_block(layers: list[Layer], mp: int, avg_mp: float | None = None) -> FusionBlock:
    gops = sum(layer_ops(l).ops for l in layers) / 1e9
    return FusionBlock(
        layer_ids=tuple(l.id for l in layers),
        mp=mp,
        sum_op_gops=gops,
        avg_mp=float(mp) if avg_mp is None else avg_mp,
    )


def check_coverage(net: NetworkIR, schedule: Schedule) -> None:
    """Blocks must partition layer ids 0..n-1 contiguously and in order."""
    expected = 0
    for i, block in enumerate(schedule.blocks):
        for layer_id in block.layer_ids:
            if layer_id != expected:
                raise CoverageError(
                    f"block {i}: expected layer {expected}, found {layer_id} "
                    "(blocks must cover the net in order with no gaps or overlaps)")
            expected += 1
    if expected != len(net):
        raise CoverageError(f"schedule covers {expected} of {len(net)} layers")


def block_layers(net: NetworkIR, block: FusionBlock) -> list[Layer]:
    return [net.layers[i] for i in block.layer_ids]


def serialize_schedule(schedule: Schedule) -> str:
    doc = {
        "network": schedule.network,
        "strategy": schedule.strategy,
        "blocks": [
            {"layers": list(b.layer_ids), "mp": b.mp, "sum_op_gops": b.sum_op_gops}
            for b in schedule.blocks
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_schedule(source: Union[str, bytes, Path, dict]) -> Schedule:
    if isinstance(source, Path):
        doc = json.loads(source.read_text())
    elif isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    extra = set(doc) - {"network", "strategy", "blocks"}
    if extra:
        raise SchemaError(f"unknown top-level keys {sorted(extra)}")
    if not isinstance(doc.get("network"), str) or not isinstance(doc.get("strategy"), str):
        raise SchemaError("'network' and 'strategy' must be strings")
    blocks_raw = doc.get("blocks")
    if not isinstance(blocks_raw, list) or not blocks_raw:
        raise SchemaError("'blocks' must be a non-empty list")
    blocks = []
    for i, b in enumerate(blocks_raw):
        if not isinstance(b, dict):
            raise SchemaError(f"blocks[{i}] must be an object")
        extra = set(b) - {"layers", "mp", "sum_op_gops"}
        if extra:
            raise SchemaError(f"blocks[{i}]: unknown keys {sorted(extra)}")
        layers = b.get("layers")
        if (not isinstance(layers, list) or not layers
                or any(not isinstance(x, int) or isinstance(x, bool) for x in layers)):
            raise SchemaError(f"blocks[{i}]: 'layers' must be a non-empty list of ints")
        mp = b.get("mp")
        if not isinstance(mp, int) or isinstance(mp, bool) or mp < 1:
            raise SchemaError(f"blocks[{i}]: 'mp' must be a positive integer")
        gops = b.get("sum_op_gops")
        if not isinstance(gops, (int, float)) or isinstance(gops, bool):
            raise SchemaError(f"blocks[{i}]: 'sum_op_gops' must be a number")
        blocks.append(FusionBlock(layer_ids=tuple(layers), mp=mp,
                                  sum_op_gops=float(gops), avg_mp=float(mp)))
    return Schedule(network=doc["network"], strategy=doc["strategy"], blocks=tuple(blocks))
