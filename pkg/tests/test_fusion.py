"""Greedy fusion/MP pass and the six comparison strategies."""
import math
import random

import pytest

from dlfusion.config import CostModelConfig
from dlfusion.errors import (
    DomainError,
    InvalidStrategyError,
    NoComputeLayerError,
    NonPowerOfTwoError,
)
from dlfusion.fusion import ORACLE_LABEL, STRATEGY_LABELS, joint_opt, strategy_schedule
from dlfusion.ir import LayerKind, NetworkIR
from dlfusion.mpselect import optimal_mp
from dlfusion.schedule import check_coverage

from conftest import attached_layer, conv_layer, fc_layer, make_net, random_net
from oracles import greedy_partition


def test_labels_are_stable():
    assert STRATEGY_LABELS == {1: "non-optimization", 2: "fixed-mp",
                               3: "dynamic-mp", 4: "all-fusion-max-mp",
                               5: "fusion-fixed-mp", 6: "dlfusion"}
    assert ORACLE_LABEL == "brute-force"


def test_worked_example_equal_votes():
    # sixteen identical 0.426-GOPs layers all voting mp 4: at threshold 1.0
    # the accumulated 4.259/4 first reaches 1.0 after the tenth layer
    cfg = CostModelConfig(mp_map_scale=0.0, mp_map_bias=2.0)
    net = make_net([conv_layer(i, 128, 128, 38, 3) for i in range(16)])
    assert optimal_mp(net.layers[0], cfg).mp == 4
    sched = joint_opt(net, cfg, threshold_gops=1.0)
    assert [b.layer_ids for b in sched.blocks] == [tuple(range(10)),
                                                   tuple(range(10, 16))]
    assert [b.mp for b in sched.blocks] == [4, 4]
    assert sched.strategy == "dlfusion"


def test_threshold_defaults_to_saturation_point(cfg):
    net = make_net([conv_layer(i, 64, 64, 56, 3) for i in range(8)])
    assert joint_opt(net, cfg) == joint_opt(
        net, cfg, threshold_gops=cfg.opcount_critical_gops)
    explicit = CostModelConfig(fusion_threshold_gops=0.25)
    assert joint_opt(net, explicit) == joint_opt(net, cfg, threshold_gops=0.25)


def test_leading_attached_layers_join_next_block(cfg):
    net = make_net([attached_layer(0, LayerKind.POOL), attached_layer(1),
                    conv_layer(2, 64, 64, 56, 3)])
    sched = joint_opt(net, cfg, threshold_gops=1e-6)
    assert sched.blocks[0].layer_ids == (0, 1, 2)


def test_trailing_attached_layers_merge_backward(cfg):
    net = make_net([conv_layer(0, 64, 64, 56, 3), attached_layer(1),
                    attached_layer(2, LayerKind.ADD)])
    sched = joint_opt(net, cfg, threshold_gops=1e-6)
    # the conv closes its block immediately; the tail cannot stand alone
    assert len(sched.blocks) == 1
    assert sched.blocks[0].layer_ids == (0, 1, 2)


def test_one_block_when_threshold_never_met(cfg):
    net = make_net([conv_layer(i, 8, 8, 7, 1) for i in range(5)])
    sched = joint_opt(net, cfg, threshold_gops=1e9)
    assert len(sched.blocks) == 1
    assert sched.blocks[0].layer_ids == tuple(range(5))


def test_joint_opt_rejects_bad_inputs(cfg):
    net = make_net([conv_layer(0, 8, 8, 7, 1)])
    with pytest.raises(DomainError):
        joint_opt(net, cfg, threshold_gops=0.0)
    no_compute = NetworkIR(name="acts", layers=(attached_layer(0),))
    with pytest.raises(NoComputeLayerError):
        joint_opt(no_compute, cfg)


def test_matches_hand_loop_on_random_nets(cfg):
    rng = random.Random(97)
    for i in range(60):
        net = random_net(rng, name=f"n{i}")
        threshold = rng.choice((None, 0.05, 0.5, 5.0))
        sched = joint_opt(net, cfg, threshold_gops=threshold)
        expected = greedy_partition(net, cfg, threshold)
        got = [(b.layer_ids, b.mp, b.avg_mp) for b in sched.blocks]
        assert got == expected, net
        check_coverage(net, sched)


def test_block_mp_floors_mean_vote(cfg):
    rng = random.Random(11)
    for i in range(30):
        net = random_net(rng, name=f"m{i}")
        for block in joint_opt(net, cfg).blocks:
            assert block.mp == 2 ** math.floor(math.log2(block.avg_mp))
            assert 1 <= block.mp <= cfg.num_cores
            assert block.mp & (block.mp - 1) == 0


def test_strategy_1_per_layer_single_core(cfg):
    net = make_net([conv_layer(0, 8, 16, 14, 3), attached_layer(1),
                    fc_layer(2, 1, 64, 10)])
    sched = strategy_schedule(net, 1, cfg)
    assert sched.strategy == "non-optimization"
    assert len(sched.blocks) == 3
    assert all(b.mp == 1 and len(b.layer_ids) == 1 for b in sched.blocks)


def test_strategy_2_fixed_mp(cfg):
    net = make_net([conv_layer(0, 32, 32, 14, 3), conv_layer(1, 32, 32, 14, 3)])
    sched = strategy_schedule(net, 2, cfg, fixed_mp=8)
    assert all(b.mp == 8 for b in sched.blocks)
    assert len(sched.blocks) == 2
    for bad in (0, 3, 6, 64):
        with pytest.raises(NonPowerOfTwoError):
            strategy_schedule(net, 2, cfg, fixed_mp=bad)


def test_strategy_3_votes_per_layer(cfg):
    net = make_net([conv_layer(0, 64, 64, 112, 3), attached_layer(1),
                    conv_layer(2, 128, 128, 56, 3)])
    sched = strategy_schedule(net, 3, cfg)
    assert [b.mp for b in sched.blocks] == [8, 1, 16]


def test_strategy_4_one_block_all_cores(cfg):
    net = make_net([conv_layer(i, 16, 16, 14, 3) for i in range(6)])
    sched = strategy_schedule(net, 4, cfg)
    assert len(sched.blocks) == 1
    assert sched.blocks[0].mp == cfg.num_cores
    assert sched.blocks[0].layer_ids == tuple(range(6))


def test_strategy_5_reuses_partition_with_fixed_mp(cfg):
    net = make_net([conv_layer(i, 64, 64, 56, 3) for i in range(12)])
    base = joint_opt(net, cfg)
    sched = strategy_schedule(net, 5, cfg, fixed_mp=2)
    assert [b.layer_ids for b in sched.blocks] == [b.layer_ids for b in base.blocks]
    assert all(b.mp == 2 and b.avg_mp == 2.0 for b in sched.blocks)


def test_strategy_6_is_joint_opt(cfg):
    net = make_net([conv_layer(i, 64, 64, 56, 3) for i in range(9)])
    assert strategy_schedule(net, 6, cfg) == joint_opt(net, cfg)


def test_unknown_strategy_rejected(cfg):
    net = make_net([conv_layer(0, 8, 8, 7, 1)])
    for bad in (0, 7, -1):
        with pytest.raises(InvalidStrategyError):
            strategy_schedule(net, bad, cfg)


def test_all_strategies_cover_the_net(cfg):
    rng = random.Random(23)
    for i in range(10):
        net = random_net(rng, name=f"c{i}")
        for strategy in range(1, 7):
            sched = strategy_schedule(net, strategy, cfg)
            check_coverage(net, sched)
            assert sched.network == net.name
            assert sched.strategy == STRATEGY_LABELS[strategy]
