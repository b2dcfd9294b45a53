"""Renders a schedule into a compilable C++ session targeting the stub SDK.

Templates are plain text. `{{name}}` substitutes a value; a repeat section

    {{#items}}
    ...body...
    {{/items}}

(markers alone on their lines) renders its body once per item with the
item's fields overlaid on the outer context. No conditionals, no escaping,
no general template language: output is deterministic and auditable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .config import CostModelConfig
from .errors import ExistsError, IoError, TemplateError
from .ir import Layer, LayerKind, NetworkIR
from .schedule import Schedule, block_layers, check_coverage

_SECTION_RE = re.compile(
    r"[ \t]*\{\{#(\w+)\}\}[ \t]*\n(.*?)[ \t]*\{\{/\1\}\}[ \t]*\n", re.S)
_VAR_RE = re.compile(r"\{\{(\w+)\}\}")


def render_template(text: str, context: dict) -> str:
    """Substitute placeholders and expand repeat sections.

    Raises TemplateError when the template names a placeholder or section
    the context does not provide.
    """
    def expand_section(match: re.Match) -> str:
        name, body = match.group(1), match.group(2)
        items = context.get(name)
        if items is None:
            raise TemplateError(f"missing template section: {name}")
        return "".join(render_template(body, {**context, **item}) for item in items)

    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in context:
            raise TemplateError(f"missing template placeholder: {name}")
        return str(context[name])

    return _VAR_RE.sub(substitute, _SECTION_RE.sub(expand_section, text))


def _load_template(name: str) -> str:
    return (resources.files(__package__) / "templates" / name).read_text()


def _op_create(layer: Layer) -> str:
    """C++ expression constructing the stub op for one layer."""
    if layer.kind is LayerKind.CONV:
        p = layer.conv
        return (f"dlf_create_conv_op({p.c_in}, {p.c_out}, {p.h_out}, {p.w_out}, "
                f"{p.k_h}, {p.k_w}, {p.stride}, {p.padding})")
    if layer.kind is LayerKind.FC:
        p = layer.fc
        return f"dlf_create_fc_op({p.m}, {p.k}, {p.n})"
    return f'dlf_create_activation_op("{layer.kind.value}")'


def _input_elements(net: NetworkIR) -> int:
    for layer in net.layers:
        if layer.kind is LayerKind.CONV:
            p = layer.conv
            return p.c_in * p.h_in * p.w_in
        if layer.kind is LayerKind.FC:
            return layer.fc.m * layer.fc.k
    return 1


def _cpp_number(value: Union[int, float]) -> str:
    # repr() of a float is the shortest string that parses back to the
    # same double, in C++ as well as in Python
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


@dataclass(frozen=True)
class GeneratedProject:
    """Rendered sources, as (relative path, text) pairs."""

    source_files: tuple[tuple[str, str], ...]
    entry_point: str = "main.cpp"

    def file(self, name: str) -> str:
        for path, text in self.source_files:
            if path == name:
                return text
        raise KeyError(name)


def render(net: NetworkIR, schedule: Schedule,
           cfg: Optional[CostModelConfig] = None,
           sdk_root: str = "../sdk-stub") -> GeneratedProject:
    """Render the schedule into C++ sources.

    One fusion container per block: member ops are created and added in
    network order, model parallelism is set to the block's MP, and the
    compiled container joins the session. The config header embeds the
    cost-model parameters so the stub reports the same latencies as
    predict_schedule.
    """
    cfg = cfg or CostModelConfig()
    check_coverage(net, schedule)

    blocks_ctx = []
    for index, block in enumerate(schedule.blocks):
        members = block_layers(net, block)
        blocks_ctx.append({
            "block_index": index,
            "layer_list": ",".join(str(i) for i in block.layer_ids),
            "mp": block.mp,
            "ops": [{"op_create": _op_create(l), "layer_id": l.id} for l in members],
        })

    context = {
        "net_name": net.name,
        "strategy": schedule.strategy,
        "block_count": len(schedule.blocks),
        "input_elements": _input_elements(net),
        "blocks": blocks_ctx,
        "sdk_root": sdk_root,
        "num_cores": cfg.num_cores,
        "peak_gflops_per_core": _cpp_number(cfg.peak_gflops_per_core),
        "bandwidth_gbs": _cpp_number(cfg.bandwidth_gbs),
        "bytes_per_element": cfg.bytes_per_element,
        "min_channel_partition": cfg.min_channel_partition,
        "opcount_critical_gops": _cpp_number(cfg.opcount_critical_gops),
        "gamma": _cpp_number(cfg.gamma),
    }
    files = tuple(
        (out_name, render_template(_load_template(tmpl_name), context))
        for out_name, tmpl_name in (
            ("main.cpp", "main.cpp.tmpl"),
            ("dlf_generated_config.h", "config.h.tmpl"),
            ("build.sh", "build.sh.tmpl"),
        )
    )
    return GeneratedProject(source_files=files)


def emit(project: GeneratedProject, out_dir: Union[str, Path],
         force: bool = False) -> None:
    """Write the rendered files under out_dir.

    Refuses to touch a non-empty directory unless force is set; the build
    script is marked executable.
    """
    out = Path(out_dir)
    try:
        if out.exists() and any(out.iterdir()) and not force:
            raise ExistsError(f"{out} is not empty (use --force to overwrite)")
        out.mkdir(parents=True, exist_ok=True)
        for rel_path, text in project.source_files:
            target = out / rel_path
            target.write_text(text)
            if rel_path.endswith(".sh"):
                target.chmod(0o755)
    except OSError as exc:
        raise IoError(f"writing to {out} failed: {exc}") from exc


_OP_LINE_RE = re.compile(r"dlf_fusion_add_op\(fusion, .*\)\);\s*// layer (\d+)$")
_MP_LINE_RE = re.compile(r"dlf_fusion_set_model_parallelism\(fusion, (\d+)\)")


def parse_generated(source: str) -> list[tuple[tuple[int, ...], int]]:
    """Recover the (layer ids, mp) mapping from generated main.cpp text.

    Used to assert structural fidelity: the result must equal the schedule
    the source was rendered from.
    """
    mapping: list[tuple[tuple[int, ...], int]] = []
    pending: list[int] = []
    for line in source.splitlines():
        op = _OP_LINE_RE.search(line)
        if op:
            pending.append(int(op.group(1)))
            continue
        mp = _MP_LINE_RE.search(line)
        if mp:
            mapping.append((tuple(pending), int(mp.group(1))))
            pending = []
    return mapping
