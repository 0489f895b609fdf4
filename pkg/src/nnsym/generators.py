"""Random networks and modification plans for property tests and experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network, NetworkBuilder
from .nonlinearity import Nonlinearity
from .rewrite.isomorphism import _unary_plan, candidate_moves
from .rewrite.modification import ModificationPlan
from .rewrite.reduction import regularity_report


@dataclass(frozen=True)
class NetSpec:
    n_inputs: int = 2
    layers: tuple[int, ...] = (3, 2)
    dim_out: int = 1
    weight_scale: float = 1.0
    bias_scale: float = 1.0
    skip_prob: float = 0.0  # chance of an extra edge skipping a layer
    drop_prob: float = 0.0  # chance of dropping a layered edge
    twin_prob: float = 0.0  # chance a node copies a sibling at twice the scale


def _w(rng, scale):
    x = rng.normal(0.0, scale)
    return float(np.sign(x) * max(abs(x), 0.15 * scale))


def random_network(rng: np.random.Generator, spec: NetSpec = NetSpec(), meta: dict | None = None) -> Network:
    """Layered (optionally with skips) net; every node feeds the last layer."""
    b = NetworkBuilder(spec.dim_out)
    prev = [f"v{i + 1}" for i in range(spec.n_inputs)]
    b.input(*prev)
    layers = [prev]
    for li, width in enumerate(spec.layers):
        cur = []
        for j in range(width):
            name = f"h{li + 1}_{j + 1}"
            srcs = [p for p in prev if rng.random() >= spec.drop_prob] or [prev[rng.integers(len(prev))]]
            if li > 0 and spec.skip_prob:
                srcs += [p for L in layers[:-1] for p in L if rng.random() < spec.skip_prob]
            if cur and rng.random() < spec.twin_prob:
                # a sibling with doubled weights, bias 2θ or 2θ - 1 (CReLU symmetry partner)
                src = cur[rng.integers(len(cur))]
                inc = {p: 2 * w for (p, q), w in b.edges.items() if q == src}
                bias = 2 * b.biases[src] - (1.0 if rng.random() < 0.5 else 0.0)
                b.node(name, bias)
                for p, w in inc.items():
                    b.edge(p, name, w)
            else:
                b.node(name, float(rng.normal(0.0, spec.bias_scale)))
                for p in srcs:
                    b.edge(p, name, _w(rng, spec.weight_scale))
            cur.append(name)
        layers.append(cur)
        prev = cur
    # every node must reach an output: connect childless hidden nodes to the last layer
    last = layers[-1]
    for L in layers[1:-1]:
        for u in L:
            if not any(a == u for (a, _) in b.edges):
                b.edge(u, last[rng.integers(len(last))], _w(rng, spec.weight_scale))
    for u in last:
        b.output(u, *[_w(rng, 1.0) for _ in range(spec.dim_out)])
    b.constants = [float(rng.normal()) for _ in range(spec.dim_out)]
    if meta:
        b.meta = dict(meta)
    return b.build()


def random_regular(rng: np.random.Generator, rho: Nonlinearity, spec: NetSpec = NetSpec(),
                   strongly: bool = True, tries: int = 50) -> Network:
    for _ in range(tries):
        net = random_network(rng, spec, {"nonlinearity": rho.to_dict()})
        rep = regularity_report(net, rho)
        if rep.strongly_regular if strongly else rep.regular:
            return net
    raise RuntimeError("could not draw a regular network")


def random_plan(rng: np.random.Generator, net: Network, rho: Nonlinearity) -> ModificationPlan:
    """A random modification of ``net`` from the symmetry library of ρ, regular when possible."""
    from .nonlinearity import Tanh

    if isinstance(rho, Tanh):
        u = net.hidden[rng.integers(len(net.hidden))]
        return _unary_plan(net, u, f"{u}_m", -1.0 if rng.random() < 0.7 else 1.0)
    moves = [plan for _, plan, _ in candidate_moves(net, rho)]
    if not moves:
        # reducible inputs have no regular moves; any valid plan will do
        moves = [plan for _, plan, _ in candidate_moves(net, rho, regular_only=False)]
    if not moves:
        raise RuntimeError("no modification available")
    return moves[rng.integers(len(moves))]
