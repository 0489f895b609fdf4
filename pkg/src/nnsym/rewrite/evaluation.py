"""Forward evaluation of network maps over ℝ (and ℂ for meromorphic ρ)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..network import Network
from ..nonlinearity import Nonlinearity


def _as_points(net: Network, t) -> tuple[np.ndarray, bool]:
    order = net.input_order()
    if isinstance(t, Mapping):
        arr = np.array([[t[v] for v in order]])
        return arr, True
    arr = np.asarray(t)
    single = arr.ndim <= 1
    arr = np.atleast_1d(arr)
    if single:
        arr = arr.reshape(1, -1)
    if arr.shape[1] != len(order):
        raise ValueError(f"expected {len(order)} input coordinates, got {arr.shape[1]}")
    return arr, single


def node_maps(net: Network, rho: Nonlinearity, t) -> dict[str, np.ndarray]:
    """Values O_v at each point for every node v."""
    pts, _ = _as_points(net, t)
    cplx = np.iscomplexobj(pts)
    vals: dict[str, np.ndarray] = {}
    for i, v in enumerate(net.input_order()):
        vals[v] = pts[:, i]
    for v in net.topo_order:
        if v in net.inputs:
            continue
        acc = np.full(pts.shape[0], net.biases[v], dtype=complex if cplx else float)
        for p in net.parents[v]:
            acc = acc + net.edges[(p, v)] * vals[p]
        vals[v] = rho.complex_array(acc) if cplx else rho(acc)
    return vals


def eval_map(net: Network, rho: Nonlinearity, t) -> np.ndarray:
    """O_N at one point (shape (D,)) or many points (shape (n, D))."""
    pts, single = _as_points(net, t)
    vals = node_maps(net, rho, pts)
    out = np.tile(np.asarray(net.constants, dtype=complex if np.iscomplexobj(pts) else float), (pts.shape[0], 1))
    for w, s in net.scalars.items():
        out = out + np.outer(vals[w], s)
    return out[0] if single else out


def random_grid(n_inputs: int, n: int = 100, lo: float = -5.0, hi: float = 5.0, seed: int = 42) -> np.ndarray:
    return np.random.default_rng(seed).uniform(lo, hi, size=(n, n_inputs))


def map_deviation(n1: Network, n2: Network, rho: Nonlinearity, grid: np.ndarray | None = None,
                  seed: int = 42) -> float:
    """Max abs difference of the output maps on a grid (inputs matched by id)."""
    if n1.inputs != n2.inputs or n1.dim_out != n2.dim_out:
        raise ValueError("networks have different signatures")
    grid = random_grid(len(n1.inputs), seed=seed) if grid is None else grid
    return float(np.max(np.abs(eval_map(n1, rho, grid) - eval_map(n2, rho, grid)), initial=0.0))


@dataclass(frozen=True)
class ProbeResult:
    max_abs: float
    verdict: str  # "zero-on-grid" or "nonzero"; empirical, not a proof
    grid_size: int


def zero_map_probe(net: Network, rho: Nonlinearity, grid_size: int = 100, seed: int = 42,
                   threshold: float = 1e-9) -> ProbeResult:
    grid = np.random.default_rng(seed).uniform(-10.0, 10.0, size=(grid_size, len(net.inputs)))
    m = float(np.max(np.abs(eval_map(net, rho, grid)), initial=0.0))
    return ProbeResult(m, "zero-on-grid" if m < threshold else "nonzero", grid_size)
