"""Synthetic single-layer sweeps standing in for on-device microbenchmarks.

The sweep crosses channel counts, spatial sizes, and kernel sizes into
square stride-1 convs (c_in == c_out, same padding). Profiles label each
layer with the power-of-two core count the cost model predicts fastest;
curves additionally report achieved GFLOPS across an explicit MP list.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from .config import CostModelConfig
from .costmodel import block_cost
from .errors import DomainError, EmptySweepError
from .ir import ConvParams, Layer, LayerKind
from .mpselect import ProfileRecord
from .opcount import conv_ops


@dataclass(frozen=True)
class SweepSpec:
    channel_range: tuple[int, ...] = (32, 64, 128)
    spatial_range: tuple[int, ...] = (14, 28, 56, 112, 224)
    kernel_range: tuple[int, ...] = (1, 3, 5)
    mp_values: tuple[int, ...] = (1, 2, 4, 8, 16, 32)

    def __post_init__(self) -> None:
        for name in ("channel_range", "spatial_range", "kernel_range", "mp_values"):
            vals = getattr(self, name)
            if not vals or any(v < 1 for v in vals):
                raise DomainError(f"{name} must be a non-empty list of positive ints")

    @property
    def size(self) -> int:
        """Cartesian product size before filtering."""
        return (len(self.channel_range) * len(self.spatial_range)
                * len(self.kernel_range))


def generate_sweep(spec: SweepSpec) -> list[ConvParams]:
    """Cartesian sweep of square stride-1 convs, sorted by (channels,
    spatial, kernel); combinations whose kernel exceeds the feature map
    are dropped."""
    convs = []
    combos = itertools.product(sorted(set(spec.channel_range)),
                               sorted(set(spec.spatial_range)),
                               sorted(set(spec.kernel_range)))
    for c, s, k in combos:
        if k > s:
            continue
        convs.append(ConvParams(c_in=c, c_out=c, h_out=s, w_out=s, k_h=k, k_w=k,
                                stride=1, padding=(k - 1) // 2))
    if not convs:
        raise EmptySweepError("sweep is empty after filtering invalid combinations")
    return convs


def _as_layer(conv: ConvParams) -> Layer:
    return Layer(id=0, kind=LayerKind.CONV, conv=conv)


def _power_of_two_mps(cfg: CostModelConfig) -> list[int]:
    mps = []
    mp = 1
    while mp <= cfg.num_cores:
        mps.append(mp)
        mp *= 2
    return mps


def best_mp_for_layer(conv: ConvParams, cfg: CostModelConfig) -> int:
    """argmin over power-of-two MP of single-layer latency; ties take the
    smaller MP."""
    layer = _as_layer(conv)
    best, best_lat = None, None
    for mp in _power_of_two_mps(cfg):
        lat = block_cost([layer], mp, fused=False, cfg=cfg).latency_ms
        if best_lat is None or lat < best_lat:
            best, best_lat = mp, lat
    return best


def synthesize_profiles(convs: Sequence[ConvParams],
                        cfg: CostModelConfig) -> list[ProfileRecord]:
    return [
        ProfileRecord(c_out=c.c_out, op_gops=conv_ops(c).gops,
                      best_mp=float(best_mp_for_layer(c, cfg)))
        for c in convs
    ]


CURVES_HEADER = ["c_out", "h_out", "k", "mp", "gflops"]


def sweep_curves(convs: Sequence[ConvParams], cfg: CostModelConfig,
                 mp_values: Sequence[int]) -> list[tuple[int, int, int, int, float]]:
    """(c_out, h_out, k, mp, achieved GFLOPS) rows, in sweep x mp order."""
    rows = []
    for conv in convs:
        layer = _as_layer(conv)
        gops = conv_ops(conv).gops
        for mp in mp_values:
            lat_ms = block_cost([layer], mp, fused=False, cfg=cfg).latency_ms
            gflops = gops / (lat_ms / 1000.0)
            rows.append((conv.c_out, conv.h_out, conv.k_h, mp, gflops))
    return rows


def write_curves(rows: Sequence[tuple], path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVES_HEADER)
        for row in rows:
            writer.writerow([*row[:4], repr(row[4])])
