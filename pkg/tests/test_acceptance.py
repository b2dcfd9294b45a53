"""End-to-end acceptance checks.

Each test prints a single [ACCEPT] line so a full run doubles as a
checklist. Numeric tolerances live next to the assertions; expected
values were computed independently of the library under test.
"""
import random
import subprocess
import sys
import time
from fractions import Fraction

from dlfusion.costmodel import block_cost, halo_redundancy, predict_schedule
from dlfusion.fusion import joint_opt, strategy_schedule
from dlfusion.ir import (
    ConvParams,
    LayerKind,
    compute_layers,
    load_fixture,
    serialize_network,
)
from dlfusion.mpselect import calibrate
from dlfusion.opcount import format_scientific, layer_ops, search_space
from dlfusion.search import SearchSpaceSpec, brute_force

from conftest import random_conv_chain, random_net
from oracles import greedy_partition, pixel_mask_redundancy, planted_profiles

FIXTURES = ("alexnet", "resnet18", "vgg19", "mobilenet")


def report(capsys, name, ok, detail=""):
    with capsys.disabled():
        tail = f"  ({detail})" if detail else ""
        print(f"[ACCEPT] {name}: {'PASS' if ok else 'FAIL'}{tail}")
    assert ok, detail


def test_accept_schedule_count_identity(capsys):
    start = time.perf_counter()
    count = search_space(50)
    shown = format_scientific(count)
    elapsed = time.perf_counter() - start
    closed_form = 32 * (33 ** 49 - 1)
    ok = shown == "8.17e+75" and count == closed_form and elapsed < 1.0
    report(capsys, "schedule-count-identity", ok,
           f"{shown}, {elapsed * 1000:.2f} ms")


def test_accept_conv_op_totals(capsys):
    published_gops = {"resnet18": 3.38, "vgg19": 36.34, "alexnet": 1.22}
    worst = 0.0
    for name, expected in published_gops.items():
        net = load_fixture(name)
        total = sum(layer_ops(l).ops for l in net.layers
                    if l.kind is LayerKind.CONV)
        worst = max(worst, abs(total / 1e9 - expected) / expected)
    report(capsys, "conv-op-totals", worst <= 0.15,
           f"worst deviation {worst * 100:.1f}%")


def test_accept_halo_matches_per_pixel_count(capsys):
    rng = random.Random(2024)
    start = time.perf_counter()
    checked = 0
    ok = True
    while checked < 210:
        chain = random_conv_chain(rng, max_layers=4, max_dim=16)
        for mp in (1, 2, 4):
            rep = halo_redundancy(chain, mp)
            got = list(zip(rep.computed_elements, rep.base_elements))
            if got != pixel_mask_redundancy(chain, mp):
                ok = False
            checked += 1
    elapsed = time.perf_counter() - start
    ok = ok and checked >= 200 and elapsed < 30.0
    report(capsys, "halo-vs-pixel-count", ok,
           f"{checked} blocks, {elapsed:.2f} s")


def test_accept_halo_worked_example(capsys):
    conv = ConvParams(c_in=64, c_out=64, h_out=28, w_out=28, k_h=3, k_w=3,
                      stride=1, padding=1)
    rep = halo_redundancy([conv, conv], 4)
    factor = Fraction(rep.computed_elements[0], rep.base_elements[0])
    report(capsys, "halo-worked-example", factor == Fraction(900, 784),
           f"first-layer factor {factor}")


def test_accept_greedy_partitioner_matches_reference(capsys, cfg):
    rng = random.Random(77)
    ok = True
    for _ in range(100):
        net = random_net(rng)
        got = [(b.layer_ids, b.mp) for b in joint_opt(net, cfg).blocks]
        want = [(ids, mp) for ids, mp, _ in greedy_partition(net, cfg)]
        if got != want:
            ok = False
            break
    report(capsys, "greedy-partitioner-reference", ok, "100 networks")


def test_accept_calibration_recovers_plant(capsys):
    records = planted_profiles(alpha=0.316, beta=0.659,
                               scale=0.25, bias=-1.95)
    fit = calibrate(records, method="least-squares")
    err = max(abs(fit.alpha - 0.316), abs(fit.beta - 0.659))
    report(capsys, "calibration-recovery", err < 1e-6,
           f"max coefficient error {err:.2e}")


def test_accept_strategy_six_dominates(capsys, cfg):
    spec = SearchSpaceSpec()
    ok = True
    details = []
    for name in FIXTURES:
        net = load_fixture(name)
        s1 = predict_schedule(net, strategy_schedule(net, 1, cfg), cfg)
        s6 = predict_schedule(net, strategy_schedule(net, 6, cfg), cfg)
        result = brute_force(net, cfg, spec)
        gap = ((s6.total_latency_ms - result.best_latency_ms)
               / result.best_latency_ms)
        details.append(f"{name} gap {gap * 100:.2f}%")
        if s6.total_latency_ms > s1.total_latency_ms or gap > 0.15:
            ok = False
        if name == "resnet18" and result.wall_time_s >= 60.0:
            ok = False
            details.append(f"resnet18 oracle {result.wall_time_s:.1f} s")
    report(capsys, "strategy-six-dominates", ok, ", ".join(details))


def test_accept_interior_parallelism_optimum(capsys, cfg):
    found = None
    for name in FIXTURES:
        for layer in compute_layers(load_fixture(name)):
            best_mp = min(
                (1, 2, 4, 8, 16, 32),
                key=lambda mp: block_cost([layer], mp, fused=False,
                                          cfg=cfg).latency_ms)
            if 1 < best_mp < 32:
                found = (name, layer.id, best_mp)
                break
        if found:
            break
    report(capsys, "interior-parallelism-optimum", found is not None,
           f"{found[0]} layer {found[1]} best mp {found[2]}" if found else "")


def test_accept_deterministic_cli_output(capsys, tmp_path):
    net_path = tmp_path / "alexnet.json"
    net_path.write_text(serialize_network(load_fixture("alexnet")))
    sched_path = tmp_path / "sched.json"

    def run(*args):
        proc = subprocess.run([sys.executable, "-m", "dlfusion.cli", *args],
                              capture_output=True)
        assert proc.returncode == 0, proc.stderr
        return proc.stdout

    ok = True
    first = run("optimize", str(net_path), "-o", str(sched_path))
    sched_bytes = sched_path.read_bytes()
    for args in (("optimize", str(net_path), "-o", str(sched_path)),
                 ("oracle", str(net_path)),
                 ("simulate", str(net_path), "--schedule", str(sched_path))):
        a = run(*args)
        b = run(*args)
        if a != b:
            ok = False
    ok = ok and run("optimize", str(net_path),
                    "-o", str(sched_path)) == first
    ok = ok and sched_path.read_bytes() == sched_bytes
    report(capsys, "deterministic-cli-output", ok)
