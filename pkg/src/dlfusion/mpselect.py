"""Per-layer model-parallelism votes and the calibration that fits them.

A layer's vote comes from a two-feature score in log space:

    score = alpha * log2(c_out) + beta * log2(ops)

mapped affinely to log2(mp) and rounded onto the power-of-two lattice,
clamped by the core count and by the channel-partition granularity.
Calibration recovers (alpha, beta, scale, bias) from measured or
synthesized (c_out, ops, best_mp) profiles.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .config import CostModelConfig
from .errors import (
    DegenerateDataError,
    DomainError,
    InsufficientDataError,
    NotComputeLayerError,
    SchemaError,
)
from .ir import Layer
from .opcount import layer_ops


@dataclass(frozen=True)
class MpScore:
    score: float
    layer_id: int


@dataclass(frozen=True)
class MpChoice:
    mp: int
    score: MpScore

    @property
    def layer_id(self) -> int:
        return self.score.layer_id


def mp_score(layer: Layer, cfg: CostModelConfig) -> MpScore:
    """alpha * log2(channels) + beta * log2(elementary ops)."""
    if not layer.is_compute:
        raise NotComputeLayerError(f"layer {layer.id} ({layer.kind.value}) casts no MP vote")
    ops = layer_ops(layer).ops
    if ops <= 0:
        raise DomainError(f"layer {layer.id} has zero ops")
    value = cfg.alpha * math.log2(layer.c_out) + cfg.beta * math.log2(ops)
    return MpScore(score=value, layer_id=layer.id)


def channel_mp_cap(c_out: int, cfg: CostModelConfig) -> int:
    """Largest power-of-two MP that keeps >= min_channel_partition channels
    per core."""
    return 2 ** max(0, math.floor(math.log2(max(1, c_out // cfg.min_channel_partition))))


def score_to_mp(score: MpScore, layer: Layer, cfg: CostModelConfig) -> MpChoice:
    """Affine map to log2(mp), round half to even, clamp to [1, num_cores]
    and to the channel constraint."""
    raw = cfg.mp_map_scale * score.score + cfg.mp_map_bias
    exponent = round(raw)
    mp = 2 ** max(0, exponent)
    mp = min(mp, cfg.num_cores, channel_mp_cap(layer.c_out, cfg))
    return MpChoice(mp=max(1, mp), score=score)


def optimal_mp(layer: Layer, cfg: CostModelConfig) -> MpChoice:
    return score_to_mp(mp_score(layer, cfg), layer, cfg)


@dataclass(frozen=True)
class ProfileRecord:
    """One calibration point: a layer's channels, op count in GOPs, and the
    core count that measured (or synthesized) fastest."""

    c_out: int
    op_gops: float
    best_mp: float


@dataclass(frozen=True)
class CalibrationResult:
    alpha: float
    beta: float
    mp_map_scale: float
    mp_map_bias: float
    method: str
    residual: float  # rms of log2(best_mp) residuals


def _feature_matrix(records: Sequence[ProfileRecord]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([[math.log2(r.c_out), math.log2(r.op_gops * 1e9)] for r in records])
    y = np.array([math.log2(r.best_mp) for r in records])
    return x, y


def calibrate(records: Iterable[ProfileRecord], method: str = "least-squares",
              l1_norm: float = 0.975) -> CalibrationResult:
    """Fit (alpha, beta) and the affine log2(mp) map from profile records.

    least-squares regresses log2(best_mp) on the two log features and
    L1-normalizes the slopes to l1_norm; pca takes the first
    principal-component loadings of the standardized feature matrix instead.
    Either way the affine (scale, bias) is then fit by 1-D regression of
    log2(best_mp) on the resulting score, so the output composes directly
    with mp_score/score_to_mp. Records are sorted before fitting so the
    result is order-independent.
    """
    recs = sorted(records, key=lambda r: (r.c_out, r.op_gops, r.best_mp))
    if len(recs) < 3:
        raise InsufficientDataError(f"need at least 3 records, got {len(recs)}")
    for r in recs:
        if r.c_out < 1 or r.op_gops <= 0 or r.best_mp <= 0:
            raise DomainError(f"bad profile record {r}")
    x, y = _feature_matrix(recs)
    centered = x - x.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-12) < 2:
        raise DegenerateDataError("profile features are collinear or constant")

    if method == "least-squares":
        design = np.column_stack([x, np.ones(len(recs))])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        slopes = coef[:2]
        # lstsq leaves ~1e-17 noise where the true slopes are zero
        if abs(slopes).sum() <= 1e-12:
            raise DegenerateDataError("zero slopes; best_mp does not vary with features")
        loadings = slopes * (l1_norm / abs(slopes).sum())
    elif method == "pca":
        std = centered.std(axis=0)
        if (std == 0).any():
            raise DegenerateDataError("a profile feature is constant")
        zs = centered / std
        cov = zs.T @ zs / len(recs)
        eigvals, eigvecs = np.linalg.eigh(cov)
        pc = eigvecs[:, np.argmax(eigvals)]
        if pc.sum() < 0:
            pc = -pc
        loadings = pc * (l1_norm / abs(pc).sum())
    else:
        raise DomainError(f"unknown calibration method {method!r}")

    alpha, beta = float(loadings[0]), float(loadings[1])
    score = x @ loadings
    if score.std() == 0:
        raise DegenerateDataError("calibration scores are constant")
    design1 = np.column_stack([score, np.ones(len(recs))])
    (scale, bias), *_ = np.linalg.lstsq(design1, y, rcond=None)
    resid = y - (scale * score + bias)
    return CalibrationResult(
        alpha=alpha, beta=beta,
        mp_map_scale=float(scale), mp_map_bias=float(bias),
        method=method,
        residual=float(np.sqrt((resid**2).mean())),
    )


PROFILE_HEADER = ["c_out", "op_gops", "best_mp"]


def write_profiles(records: Sequence[ProfileRecord], path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_HEADER)
        for r in records:
            mp = int(r.best_mp) if float(r.best_mp).is_integer() else r.best_mp
            writer.writerow([r.c_out, repr(r.op_gops), mp])


def read_profiles(path: Union[str, Path]) -> list[ProfileRecord]:
    reader = csv.reader(io.StringIO(Path(path).read_text()))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty profiles CSV")
    if [h.strip() for h in header] != PROFILE_HEADER:
        raise SchemaError(f"profiles CSV must start with header {','.join(PROFILE_HEADER)}")
    records = []
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise SchemaError(f"profiles CSV line {row_num}: expected 3 fields, got {len(row)}")
        try:
            records.append(ProfileRecord(c_out=int(row[0]), op_gops=float(row[1]),
                                         best_mp=float(row[2])))
        except ValueError as exc:
            raise SchemaError(f"profiles CSV line {row_num}: {exc}")
    return records
