"""Template engine and C++ project generation."""
import os
import re
import stat

import pytest

from dlfusion.codegen import (
    GeneratedProject,
    emit,
    parse_generated,
    render,
    render_template,
)
from dlfusion.config import CostModelConfig
from dlfusion.errors import CoverageError, ExistsError, TemplateError
from dlfusion.fusion import joint_opt, strategy_schedule
from dlfusion.ir import load_fixture
from dlfusion.schedule import Schedule, make_block

from conftest import attached_layer, conv_layer, fc_layer, make_net


def test_render_template_variables():
    assert render_template("x = {{x}};", {"x": 5}) == "x = 5;"
    assert render_template("{{a}}-{{a}}", {"a": "q"}) == "q-q"
    with pytest.raises(TemplateError, match="placeholder: y"):
        render_template("{{y}}", {"x": 1})


def test_render_template_sections():
    text = "start\n{{#items}}\n- {{name}} in {{scope}}\n{{/items}}\nend\n"
    out = render_template(text, {"scope": "outer",
                                 "items": [{"name": "a"}, {"name": "b"}]})
    assert out == "start\n- a in outer\n- b in outer\nend\n"
    assert render_template(text, {"scope": "o", "items": []}) == "start\nend\n"
    with pytest.raises(TemplateError, match="section: items"):
        render_template(text, {"scope": "o"})


def test_render_template_nested_sections():
    text = "{{#outer}}\n[{{tag}}\n{{#inner}}\n  {{v}}\n{{/inner}}\n]\n{{/outer}}\n"
    out = render_template(text, {"outer": [
        {"tag": "t1", "inner": [{"v": 1}, {"v": 2}]},
        {"tag": "t2", "inner": []},
    ]})
    assert out == "[t1\n  1\n  2\n]\n[t2\n]\n"


def _demo():
    net = make_net([conv_layer(0, 3, 16, 14, 3), attached_layer(1),
                    conv_layer(2, 16, 32, 14, 3), fc_layer(3, 1, 6272, 10)],
                   name="demo")
    sched = Schedule("demo", "dlfusion", (
        make_block(list(net.layers[:3]), 4), make_block([net.layers[3]], 1)))
    return net, sched


def test_render_produces_three_files():
    net, sched = _demo()
    project = render(net, sched)
    assert [name for name, _ in project.source_files] \
        == ["main.cpp", "dlf_generated_config.h", "build.sh"]
    assert project.entry_point == "main.cpp"
    with pytest.raises(KeyError):
        project.file("other.cpp")


def test_render_is_deterministic():
    net, sched = _demo()
    assert render(net, sched) == render(net, sched)


def test_generated_main_structure():
    net, sched = _demo()
    main = render(net, sched).file("main.cpp")
    assert 'dlf_create_conv_op(3, 16, 14, 14, 3, 3, 1, 1)' in main
    assert 'dlf_create_activation_op("relu")' in main
    assert 'dlf_create_fc_op(1, 6272, 10)' in main
    assert "dlf_fusion_set_model_parallelism(fusion, 4)" in main
    assert "dlf_fusion_set_model_parallelism(fusion, 1)" in main
    assert "session for demo" in main
    assert "Schedule: dlfusion, 2 block(s)" in main
    assert "total latency_ms" in main


def test_parse_generated_recovers_schedule():
    net, sched = _demo()
    main = render(net, sched).file("main.cpp")
    assert parse_generated(main) == [((0, 1, 2), 4), ((3,), 1)]


@pytest.mark.parametrize("fixture", ["alexnet", "vgg19", "resnet18"])
def test_structural_fidelity_on_fixtures(fixture, cfg):
    net = load_fixture(fixture)
    for strategy in (1, 4, 6):
        sched = strategy_schedule(net, strategy, cfg)
        main = render(net, sched, cfg).file("main.cpp")
        assert parse_generated(main) \
            == [(b.layer_ids, b.mp) for b in sched.blocks]


def test_config_header_embeds_model(cfg):
    net, sched = _demo()
    header = render(net, sched, cfg).file("dlf_generated_config.h")
    assert "DlfCostConfig" in header
    for token in ("32", "2000.0", "102.4", "0.95"):
        assert token in header
    # initializer field order must match the struct declaration
    order = ["num_cores", "peak_gflops_per_core", "bandwidth_gbs",
             "bytes_per_element", "min_channel_partition",
             "opcount_critical_gops", "gamma"]
    positions = [header.index(f"/* {name}") for name in order]
    assert positions == sorted(positions)


def test_build_script_points_at_sdk():
    net, sched = _demo()
    assert "../sdk-stub" in render(net, sched).file("build.sh")
    custom = render(net, sched, sdk_root="/opt/dlfsdk").file("build.sh")
    assert "/opt/dlfsdk" in custom
    assert "DLFSDK_HOME" in custom


def test_render_rejects_partial_schedules(cfg):
    net, _ = _demo()
    bad = Schedule("demo", "x", (make_block([net.layers[0]], 1),))
    with pytest.raises(CoverageError):
        render(net, bad, cfg)


def test_render_honours_config_values():
    net, sched = _demo()
    tuned = CostModelConfig(bandwidth_gbs=204.8, gamma=1.0)
    header = render(net, sched, tuned).file("dlf_generated_config.h")
    assert "204.8" in header
    assert re.search(r"/\* gamma\s*\*/ 1\.0,", header)


def test_emit_writes_and_protects(tmp_path):
    net, sched = _demo()
    project = render(net, sched)
    out = tmp_path / "gen"
    emit(project, out)
    assert (out / "main.cpp").read_text() == project.file("main.cpp")
    mode = os.stat(out / "build.sh").st_mode
    assert mode & stat.S_IXUSR
    with pytest.raises(ExistsError):
        emit(project, out)
    emit(project, out, force=True)  # explicit overwrite allowed
    emit(GeneratedProject(source_files=(("a.txt", "hi\n"),)), tmp_path / "empty2")
    assert (tmp_path / "empty2" / "a.txt").read_text() == "hi\n"
