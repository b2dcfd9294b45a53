"""Exact operation counts, tensor footprints, and the schedule search-space size.

All counts are exact Python integers (arbitrary precision, so overflow cannot
occur for any realistic net); GOPs views divide by 1e9 only at the edge.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, NotComputeLayerError
from .ir import ConvParams, FcParams, Layer, LayerKind, NetworkIR

GIGA = 10**9


@dataclass(frozen=True)
class OpCount:
    """An exact elementary-operation count (one multiply and one add each
    count as an op)."""

    ops: int

    @property
    def gops(self) -> float:
        return self.ops / GIGA

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(self.ops + other.ops)


def conv_ops(p: ConvParams) -> OpCount:
    """2 * h_out * w_out * k_h * k_w * c_in * c_out elementary ops."""
    return OpCount(2 * p.h_out * p.w_out * p.k_h * p.k_w * p.c_in * p.c_out)


def fc_ops(p: FcParams) -> OpCount:
    """2 * m * k * n elementary ops for an (m x k) @ (k x n) product."""
    return OpCount(2 * p.m * p.k * p.n)


def layer_ops(layer: Layer) -> OpCount:
    """Ops for a single layer; attached layers contribute zero."""
    if layer.kind is LayerKind.CONV:
        return conv_ops(layer.conv)
    if layer.kind is LayerKind.FC:
        return fc_ops(layer.fc)
    return OpCount(0)


def network_ops(net: NetworkIR) -> OpCount:
    total = 0
    for layer in net.layers:
        total += layer_ops(layer).ops
    return OpCount(total)


def tensor_bytes(layer: Layer, bytes_per_element: int = 2) -> int:
    """Total bytes moved for one unfused layer: input + output + weights.

    Conv input spatial size is reconstructed from the output size and stride/
    padding. Attached layers are treated as free (0 bytes): they run in place
    on a neighboring compute layer's output.
    """
    if layer.kind is LayerKind.CONV:
        p = layer.conv
        elements = (p.c_in * p.h_in * p.w_in
                    + p.c_out * p.h_out * p.w_out
                    + p.c_in * p.c_out * p.k_h * p.k_w)
        return elements * bytes_per_element
    if layer.kind is LayerKind.FC:
        p = layer.fc
        return (p.m * p.k + p.k * p.n + p.m * p.n) * bytes_per_element
    return 0


def intensity(layer: Layer, bytes_per_element: int = 2) -> float:
    """Operation intensity: ops per byte of tensor traffic."""
    if not layer.is_compute:
        raise NotComputeLayerError(f"layer {layer.id} ({layer.kind.value}) has no intensity")
    ops = layer_ops(layer).ops
    if ops == 0:
        raise DomainError(f"layer {layer.id} has zero ops")
    return ops / tensor_bytes(layer, bytes_per_element)


def search_space(num_layers: int, num_cores: int = 32) -> int:
    """Exact size of the joint (fusion partition x per-block MP) space.

    Counts every way to split n layers into i+1 contiguous blocks
    (i = 1 .. n-1 cut points) with an independent per-block core count
    chosen from num_cores options:

        sum_{i=1}^{n-1} num_cores^(i+1) * C(n-1, i)

    which telescopes to num_cores * ((num_cores+1)^(n-1) - 1). Both forms
    are exact integers; the summation form is what is evaluated here.
    """
    if num_layers < 1:
        raise DomainError(f"need at least one layer, got {num_layers}")
    if num_cores < 1:
        raise DomainError(f"need at least one core, got {num_cores}")
    total = 0
    binom = 1  # C(n-1, i), updated incrementally
    power = num_cores  # num_cores^(i+1) starting at i=0
    n = num_layers
    for i in range(1, n):
        binom = binom * (n - i) // i
        power *= num_cores
        total += power * binom
    return total


def search_space_closed_form(num_layers: int, num_cores: int = 32) -> int:
    """32 * (33^(n-1) - 1) for the default core count; used as a cross-check."""
    if num_layers < 1:
        raise DomainError(f"need at least one layer, got {num_layers}")
    return num_cores * ((num_cores + 1) ** (num_layers - 1) - 1)


def format_scientific(value: int, digits: int = 3) -> str:
    """Render a (possibly huge) exact integer as d.dde+XX without going
    through float, which would overflow above ~1.8e308."""
    from decimal import ROUND_HALF_UP, Decimal

    if value < 0:
        raise DomainError("negative counts cannot occur")
    d = Decimal(value)
    if d == 0:
        return "0." + "0" * (digits - 1) + "e+0"
    exponent = d.adjusted()
    mantissa = d.scaleb(-exponent)  # exact shift into [1, 10)
    quantum = Decimal(1).scaleb(1 - digits)
    q = mantissa.quantize(quantum, rounding=ROUND_HALF_UP)
    if q >= 10:
        q = (q / 10).quantize(quantum)
        exponent += 1
    return f"{q}e+{exponent}"
