"""In-memory network representation and its JSON serialization.

A network is an ordered list of layers. Conv and FC layers carry shapes and
are the only layers that contribute operations; relu/batchnorm/pool/add are
"attached" layers that ride along with a neighboring compute layer and cost
nothing on their own.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Union

from .errors import EmptyNetworkError, SchemaError, ValidationError


class LayerKind(str, Enum):
    CONV = "conv"
    FC = "fc"
    RELU = "relu"
    BATCHNORM = "batchnorm"
    POOL = "pool"
    ADD = "add"

    @property
    def is_compute(self) -> bool:
        return self in (LayerKind.CONV, LayerKind.FC)


# Layer kinds that attach to a neighboring compute layer.
ATTACHED_KINDS = frozenset(k for k in LayerKind if not k.is_compute)


@dataclass(frozen=True)
class ConvParams:
    """Shape of one convolution. Spatial sizes are the *output* feature map;
    the input size is reconstructed as (h_out - 1) * stride + k_h - 2 * padding."""

    c_in: int
    c_out: int
    h_out: int
    w_out: int
    k_h: int
    k_w: int
    stride: int = 1
    padding: int = 0

    @property
    def h_in(self) -> int:
        return (self.h_out - 1) * self.stride + self.k_h - 2 * self.padding

    @property
    def w_in(self) -> int:
        return (self.w_out - 1) * self.stride + self.k_w - 2 * self.padding


@dataclass(frozen=True)
class FcParams:
    """Dense layer computing an (m x k) @ (k x n) product."""

    m: int
    k: int
    n: int


@dataclass(frozen=True)
class Layer:
    id: int
    kind: LayerKind
    conv: Union[ConvParams, None] = None
    fc: Union[FcParams, None] = None

    @property
    def is_compute(self) -> bool:
        return self.kind.is_compute

    @property
    def c_out(self) -> int:
        """Output channel count used for MP scoring; n for FC layers."""
        if self.kind is LayerKind.CONV:
            return self.conv.c_out
        if self.kind is LayerKind.FC:
            return self.fc.n
        raise AttributeError(f"layer {self.id} ({self.kind.value}) has no channels")


@dataclass(frozen=True)
class NetworkIR:
    name: str
    layers: tuple[Layer, ...]

    def __iter__(self) -> Iterator[Layer]:
        return iter(self.layers)

    def __len__(self) -> int:
        return len(self.layers)


_CONV_KEYS = {"c_in", "c_out", "h_out", "w_out", "k_h", "k_w"}
_CONV_OPT_KEYS = {"stride", "padding"}
_FC_KEYS = {"m", "k", "n"}
_KIND_VALUES = {k.value for k in LayerKind}


def _require_int(obj: dict, key: str, where: str) -> int:
    val = obj.get(key)
    # bool is an int subclass; reject it explicitly
    if not isinstance(val, int) or isinstance(val, bool):
        raise SchemaError(f"{where}: key '{key}' must be an integer, got {val!r}")
    return val


def _parse_layer(obj: object, index: int) -> Layer:
    where = f"layers[{index}]"
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
    if "id" not in obj or "type" not in obj:
        raise SchemaError(f"{where}: 'id' and 'type' are required")
    layer_id = _require_int(obj, "id", where)
    kind_raw = obj["type"]
    if kind_raw not in _KIND_VALUES:
        raise SchemaError(f"{where}: unknown layer type {kind_raw!r}")
    kind = LayerKind(kind_raw)

    present = set(obj) - {"id", "type"}
    if kind is LayerKind.CONV:
        missing = _CONV_KEYS - present
        if missing:
            raise SchemaError(f"{where}: conv layer missing keys {sorted(missing)}")
        extra = present - _CONV_KEYS - _CONV_OPT_KEYS
        if extra:
            raise SchemaError(f"{where}: unknown keys {sorted(extra)}")
        k_h = _require_int(obj, "k_h", where)
        conv = ConvParams(
            c_in=_require_int(obj, "c_in", where),
            c_out=_require_int(obj, "c_out", where),
            h_out=_require_int(obj, "h_out", where),
            w_out=_require_int(obj, "w_out", where),
            k_h=k_h,
            k_w=_require_int(obj, "k_w", where),
            stride=_require_int(obj, "stride", where) if "stride" in obj else 1,
            padding=_require_int(obj, "padding", where) if "padding" in obj else (k_h - 1) // 2,
        )
        return Layer(id=layer_id, kind=kind, conv=conv)
    if kind is LayerKind.FC:
        missing = _FC_KEYS - present
        if missing:
            raise SchemaError(f"{where}: fc layer missing keys {sorted(missing)}")
        extra = present - _FC_KEYS
        if extra:
            raise SchemaError(f"{where}: unknown keys {sorted(extra)}")
        fc = FcParams(m=_require_int(obj, "m", where), k=_require_int(obj, "k", where),
                      n=_require_int(obj, "n", where))
        return Layer(id=layer_id, kind=kind, fc=fc)
    # attached layer: no shape keys allowed
    if present:
        raise SchemaError(f"{where}: unknown keys {sorted(present)} for {kind.value} layer")
    return Layer(id=layer_id, kind=kind)


def validate_network(net: NetworkIR) -> list[str]:
    """Return a list of invariant violations; empty means the net is valid."""
    problems: list[str] = []
    for i, layer in enumerate(net.layers):
        if layer.id != i:
            problems.append(f"layer ids must be consecutive from 0; position {i} has id {layer.id}")
        if layer.kind is LayerKind.CONV:
            p = layer.conv
            for field in ("c_in", "c_out", "h_out", "w_out", "k_h", "k_w"):
                if getattr(p, field) < 1:
                    problems.append(f"layer {layer.id}: {field} must be >= 1, got {getattr(p, field)}")
            if p.stride < 1:
                problems.append(f"layer {layer.id}: stride must be >= 1, got {p.stride}")
            if p.padding < 0:
                problems.append(f"layer {layer.id}: padding must be >= 0, got {p.padding}")
            if p.stride >= 1 and p.padding >= 0 and min(p.h_in, p.w_in) < 1:
                problems.append(f"layer {layer.id}: reconstructed input size is not positive")
        elif layer.kind is LayerKind.FC:
            for field in ("m", "k", "n"):
                if getattr(layer.fc, field) < 1:
                    problems.append(f"layer {layer.id}: {field} must be >= 1, got {getattr(layer.fc, field)}")
    if not any(l.is_compute for l in net.layers):
        problems.append("network has no compute (conv/fc) layer")
    return problems


def parse_network(source: Union[str, bytes, Path, dict]) -> NetworkIR:
    """Parse and validate a network document.

    Accepts a JSON string/bytes, a path to a JSON file, or an already-decoded dict.
    Raises SchemaError / ValidationError / EmptyNetworkError accordingly.
    """
    if isinstance(source, Path):
        source = source.read_text()
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    extra = set(doc) - {"name", "layers"}
    if extra:
        raise SchemaError(f"unknown top-level keys {sorted(extra)}")
    name = doc.get("name")
    if not isinstance(name, str):
        raise SchemaError("'name' must be a string")
    layers_raw = doc.get("layers")
    if not isinstance(layers_raw, list):
        raise SchemaError("'layers' must be a list")
    if not layers_raw:
        raise EmptyNetworkError(f"network '{name}' has no layers")

    layers = tuple(_parse_layer(obj, i) for i, obj in enumerate(layers_raw))
    net = NetworkIR(name=name, layers=layers)
    problems = validate_network(net)
    if problems:
        if len(problems) == 1 and problems[0].startswith("network has no compute"):
            raise EmptyNetworkError(f"network '{name}': {problems[0]}")
        raise ValidationError(f"network '{name}': " + "; ".join(problems))
    return net


def serialize_network(net: NetworkIR) -> str:
    """Inverse of parse_network; field values round-trip losslessly."""
    layers = []
    for layer in net.layers:
        obj: dict = {"id": layer.id, "type": layer.kind.value}
        if layer.kind is LayerKind.CONV:
            p = layer.conv
            obj.update(c_in=p.c_in, c_out=p.c_out, h_out=p.h_out, w_out=p.w_out,
                       k_h=p.k_h, k_w=p.k_w, stride=p.stride, padding=p.padding)
        elif layer.kind is LayerKind.FC:
            obj.update(m=layer.fc.m, k=layer.fc.k, n=layer.fc.n)
        layers.append(obj)
    return json.dumps({"name": net.name, "layers": layers}, indent=2) + "\n"


def compute_layers(net: NetworkIR) -> list[Layer]:
    """The conv/fc layers of the net, in order."""
    return [l for l in net.layers if l.is_compute]


def load_fixture(name: str) -> NetworkIR:
    """Load one of the bundled example networks (resnet18, resnet50, vgg19,
    alexnet, mobilenet)."""
    path = Path(__file__).parent / "fixtures" / f"{name}.json"
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture named {name!r}")
    return parse_network(path)


FIXTURE_NAMES = ("resnet18", "resnet50", "vgg19", "alexnet", "mobilenet")
