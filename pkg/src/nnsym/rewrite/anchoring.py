"""Fixing one input to a constant and folding its influence into biases."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..network import Network, NetworkBuilder, descendants
from ..nonlinearity import Nonlinearity
from .evaluation import zero_map_probe
from .reduction import regularity_report


def anchor_input(net: Network, rho: Nonlinearity, v: str, a: float, check: bool = True) -> Network:
    """The network M_a obtained by setting input ``v`` to ``a``.

    Nodes with an ancestor among the remaining inputs are kept; every other
    node computes a constant a_u that is folded into the biases of kept
    children and into the constants (for dropped outputs).
    """
    if v not in net.inputs:
        raise ValueError(f"{v} is not an input")
    if check:
        rep = regularity_report(net, rho)
        if not rep.strongly_regular:
            warnings.warn("anchoring expects a strongly regular network", RuntimeWarning)
    rest = set(net.inputs) - {v}
    kept = descendants(net, rest)
    const: dict[str, float] = {}
    for u in net.topo_order:
        if u in kept:
            continue
        if u == v:
            const[u] = float(a)
        else:
            s = net.biases[u] + sum(net.edges[(p, u)] * const[p] for p in net.parents[u])
            const[u] = float(rho(np.array([s]))[0])
    b = NetworkBuilder(net=net)
    for u in kept - set(net.inputs):
        b.biases[u] = net.biases[u] + sum(net.edges[(p, u)] * const[p] for p in net.parents[u] if p not in kept)
    for w, lam in net.scalars.items():
        if w not in kept:
            b.constants = [c + l * const[w] for c, l in zip(b.constants, lam)]
    for u in sorted(set(net.nodes) - kept):
        b.remove(u)
    return b.build()


@dataclass(frozen=True)
class AnchorSearchResult:
    a: float | None
    regular: bool
    tried: int

    @property
    def exhausted(self) -> bool:
        return self.a is None


def anchor_search(net: Network, rho: Nonlinearity, v: str, samples: Sequence[float]) -> AnchorSearchResult:
    """First sample a for which M_a is (strongly) regular."""
    if not samples:
        raise ValueError("no samples given")
    probe = zero_map_probe(net, rho)
    if probe.verdict != "zero-on-grid":
        warnings.warn("anchor_search is meant for networks with zero output map; continuing",
                      RuntimeWarning)
    for i, a in enumerate(samples):
        m = anchor_input(net, rho, v, a, check=False)
        if regularity_report(m, rho).strongly_regular:
            return AnchorSearchResult(float(a), True, i + 1)
    return AnchorSearchResult(None, False, len(samples))


def default_samples(n: int = 32, seed: int = 42, lo: float = -3.0, hi: float = 3.0) -> list[float]:
    return list(np.random.default_rng(seed).uniform(lo, hi, n))
