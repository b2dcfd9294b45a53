"""Shared builders for tests: layers, nets, and randomized generators."""
from __future__ import annotations

import random

import pytest

from dlfusion import ConvParams, CostModelConfig, FcParams, Layer, LayerKind, NetworkIR

ATTACHED = (LayerKind.RELU, LayerKind.BATCHNORM, LayerKind.POOL, LayerKind.ADD)


def conv_layer(i, c_in, c_out, hw, k, stride=1, padding=None, w=None):
    if padding is None:
        padding = (k - 1) // 2
    return Layer(id=i, kind=LayerKind.CONV,
                 conv=ConvParams(c_in=c_in, c_out=c_out, h_out=hw,
                                 w_out=hw if w is None else w, k_h=k, k_w=k,
                                 stride=stride, padding=padding))


def fc_layer(i, m, k, n):
    return Layer(id=i, kind=LayerKind.FC, fc=FcParams(m=m, k=k, n=n))


def attached_layer(i, kind=LayerKind.RELU):
    return Layer(id=i, kind=kind)


def make_net(layers, name="testnet"):
    renumbered = []
    for i, layer in enumerate(layers):
        if layer.id != i:
            layer = Layer(id=i, kind=layer.kind, conv=layer.conv, fc=layer.fc)
        renumbered.append(layer)
    return NetworkIR(name=name, layers=tuple(renumbered))


def random_conv_chain(rng: random.Random, max_layers=4, max_dim=16):
    """A spatially consistent conv chain: each layer's reconstructed input
    size equals the previous layer's output size. Built back to front."""
    n = rng.randint(1, max_layers)
    while True:
        convs = []
        h_out = rng.randint(1, max_dim)
        w_out = rng.randint(1, max_dim)
        ok = True
        for _ in range(n):
            k = rng.choice((1, 2, 3))
            stride = rng.choice((1, 1, 2))
            padding = rng.choice((0, 1))
            p = ConvParams(c_in=rng.randint(1, 8), c_out=rng.randint(1, 8),
                           h_out=h_out, w_out=w_out, k_h=k, k_w=k,
                           stride=stride, padding=padding)
            if not (1 <= p.h_in <= max_dim and 1 <= p.w_in <= max_dim):
                ok = False
                break
            convs.append(p)
            h_out, w_out = p.h_in, p.w_in
        if ok:
            convs.reverse()  # built output-side first
            return convs


def random_net(rng: random.Random, max_layers=12, name="randnet"):
    """A mixed conv/fc/attached net with at least one compute layer."""
    n = rng.randint(1, max_layers)
    layers = []
    for i in range(n):
        roll = rng.random()
        if roll < 0.55:
            layers.append(conv_layer(i, rng.choice((4, 8, 16, 32, 64)),
                                     rng.choice((4, 8, 16, 32, 64, 128)),
                                     rng.choice((7, 14, 28, 56)),
                                     rng.choice((1, 3, 5))))
        elif roll < 0.7:
            layers.append(fc_layer(i, rng.choice((1, 4, 16)),
                                   rng.choice((64, 256, 1024)),
                                   rng.choice((10, 100, 1000))))
        else:
            layers.append(attached_layer(i, rng.choice(ATTACHED)))
    if not any(l.is_compute for l in layers):
        layers[rng.randrange(len(layers))] = conv_layer(0, 8, 16, 14, 3)
    return make_net(layers, name=name)


def compute_net(rng: random.Random, max_layers=6, name="densenet"):
    """conv/fc only; boundary shifts always change block contents, so
    schedule searches over these nets cannot tie by accident."""
    n = rng.randint(1, max_layers)
    layers = []
    for i in range(n):
        if rng.random() < 0.75:
            layers.append(conv_layer(i, rng.choice((4, 8, 16, 32)),
                                     rng.choice((8, 16, 32, 64)),
                                     rng.choice((7, 14, 28)),
                                     rng.choice((1, 3))))
        else:
            layers.append(fc_layer(i, rng.choice((1, 4)),
                                   rng.choice((64, 256)),
                                   rng.choice((16, 100))))
    return make_net(layers, name=name)


@pytest.fixture
def cfg():
    return CostModelConfig()


@pytest.fixture
def rng():
    return random.Random(0xD1F)
