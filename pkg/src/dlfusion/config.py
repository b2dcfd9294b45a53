"""Accelerator cost-model configuration.

Defaults describe a 32-core inference accelerator: 2 TFLOPS FP16 per core
(64 TFLOPS total), 102.4 GB/s of shared memory bandwidth, 2-byte elements.
Per-core efficiency ramps as (per_core_gops / opcount_critical_gops) ** gamma
up to 1.0; channel partitions thinner than min_channel_partition are also
penalized. alpha/beta/mp_map_* parameterize the model-parallelism vote score.
fusion_threshold_gops is the per-core op-count target at which the greedy
fusion pass closes a block; when unset it tracks opcount_critical_gops.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Union

from .errors import ConfigError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CostModelConfig:
    num_cores: int = 32
    peak_gflops_per_core: float = 2000.0
    bandwidth_gbs: float = 102.4
    bytes_per_element: int = 2
    opcount_critical_gops: float = 10.0 ** 1.25
    min_channel_partition: int = 4
    alpha: float = 0.316
    beta: float = 0.659
    mp_map_scale: float = 0.25
    mp_map_bias: float = -1.95
    # sub-linear knee keeps extra cores attractive only while channel
    # partitions stay wide enough
    gamma: float = 0.95
    fusion_threshold_gops: Optional[float] = None
    calib_l1_norm: float = 0.975

    def __post_init__(self) -> None:
        if not _is_power_of_two(self.num_cores) or self.num_cores > 1024:
            raise ConfigError(f"num_cores must be a power of two <= 1024, got {self.num_cores}")
        for name in ("peak_gflops_per_core", "bandwidth_gbs", "opcount_critical_gops",
                     "gamma", "calib_l1_norm"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.fusion_threshold_gops is not None and self.fusion_threshold_gops <= 0:
            raise ConfigError(
                f"fusion_threshold_gops must be positive, got {self.fusion_threshold_gops}")
        if self.bytes_per_element < 1:
            raise ConfigError(f"bytes_per_element must be >= 1, got {self.bytes_per_element}")
        if self.min_channel_partition < 1:
            raise ConfigError(f"min_channel_partition must be >= 1, got {self.min_channel_partition}")

    @property
    def effective_fusion_threshold(self) -> float:
        if self.fusion_threshold_gops is not None:
            return self.fusion_threshold_gops
        return self.opcount_critical_gops

    def with_overrides(self, **kwargs) -> "CostModelConfig":
        """Copy with the given fields replaced; None values are ignored."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        bad = set(updates) - {f.name for f in fields(self)}
        if bad:
            raise ConfigError(f"unknown config fields {sorted(bad)}")
        return replace(self, **updates) if updates else self

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def load_config(source: Union[str, Path, dict, None]) -> CostModelConfig:
    """Build a config from a JSON file/dict; every field is optional and
    missing ones take the defaults above. Unknown keys are rejected."""
    if source is None:
        return CostModelConfig()
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    known = {f.name for f in fields(CostModelConfig)}
    bad = set(doc) - known
    if bad:
        raise ConfigError(f"unknown config fields {sorted(bad)}")
    try:
        return CostModelConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc))
