"""Empirical singularity scans of single-input networks over ℂ."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..network import Network
from ..nonlinearity import Nonlinearity, Tanh, Zab
from .cluster import ClusterDepth, cluster_depth_eps, default_schedule
from .poles import BLOWUP, PointCloud, _as_zab, merge_points

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanConfig:
    half_width: float = 8.0
    h0: float = 0.03
    window_margin: float = 1.25  # the window grows to hold the nearest pole of each first-layer node
    max_half_width: float = 32.0
    chain_min: float = 1e-3  # chains around a parent pole stop at this distance from it
    chain_max: int = 1000  # seeds per parent pole
    max_points: int = 40000  # chain seeds per node, shared among its parent poles
    contour_points: int = 64
    newton_iters: int = 40


def _node_fns(net: Network, rho: Nonlinearity, u: str):
    """z -> O_u(z) and z -> pre-activation of u."""
    from ..rewrite.evaluation import node_maps

    def pre(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            vals = node_maps(net, rho, z.reshape(-1, 1))
            acc = net.biases[u] + sum(net.edges[(p, u)] * vals[p] for p in net.parents[u])
        return np.asarray(acc).reshape(z.shape)

    def out(z):
        with np.errstate(all="ignore"):
            return rho.complex_array(pre(z))
    return out, pre


def _map(net: Network, rho: Nonlinearity, coord: int):
    from ..rewrite.evaluation import eval_map

    # Dropping the constant scalar leaves the poles unchanged but keeps zeros
    # of the map away from them, which widens the Newton basins on 1/f.
    c0 = net.constants[coord]

    def f(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            return eval_map(net, rho, z.reshape(-1, 1))[:, coord].reshape(z.shape) - c0
    return f


def _newton(f, z0: np.ndarray, iters: int) -> np.ndarray:
    """Vectorized Newton on g = 1/f; converged points drop out of the iteration."""
    z = z0.astype(complex).ravel().copy()
    active = np.arange(len(z))
    for _ in range(iters):
        if len(active) == 0:
            break
        za = z[active]
        with np.errstate(all="ignore"):
            g = 1.0 / f(za)
            h = 1e-7 * np.maximum(1.0, np.abs(za))
            dg = (1.0 / f(za + h) - 1.0 / f(za - h)) / (2 * h)
            step = g / dg
        step[~np.isfinite(step)] = 0.0
        z[active] = za - step
        active = active[np.abs(step) >= 1e-15 * np.maximum(1.0, np.abs(za))]
    return z


def _grid(R: float, h: float) -> np.ndarray:
    n = max(3, int(np.ceil(2 * R / h)) + 1)
    x = np.linspace(-R, R, n)
    X, Y = np.meshgrid(x, x)
    return (X + 1j * Y).ravel()


def _window(net: Network, zab: Zab, cfg: ScanConfig) -> float:
    """Half-width covering the pole nearest the origin of every first-layer node."""
    R = cfg.half_width
    (v,) = tuple(net.inputs)
    for u in net.children[v]:
        if net.parents[u] == (v,):
            d = zab.pole_lattice(net.edges[(v, u)], net.biases[u]).distance(0j)
            R = max(R, cfg.window_margin * d)
    return min(R, cfg.max_half_width)


def _in_window(z: np.ndarray, R: float) -> np.ndarray:
    return z[(np.abs(z.real) <= R) & (np.abs(z.imag) <= R)]


def _chain_seeds(pre, zab: Zab, Q: np.ndarray, cfg: ScanConfig) -> np.ndarray:
    """Seeds q + r/(l - c) near each pole q of a parent.

    r and c are the residue and regular part at q of the pre-activation,
    read off contour means; l runs over the pole lattice of the
    nonlinearity, so the seeds are the poles of ρ(c + r/(z - q)).
    """
    Q = Q[Q.imag >= 0]  # real parameters: the rest follow by conjugation
    if len(Q) == 0:
        return np.zeros(0, complex)
    if len(Q) > 1:
        nn = cKDTree(np.column_stack([Q.real, Q.imag])).query(np.column_stack([Q.real, Q.imag]), k=2)[0][:, 1]
    else:
        nn = np.full(1, np.inf)
    per = max(8, min(cfg.chain_max, cfg.max_points // len(Q)))
    if per < cfg.chain_max:
        log.warning("chain seeds capped at %d per parent pole (%d poles)", per, len(Q))
    th = np.exp(2j * np.pi * np.arange(cfg.contour_points) / cfg.contour_points)
    rad = np.minimum(cfg.chain_min, 0.25 * nn)
    ring = Q[:, None] + rad[:, None] * th[None, :]
    A = pre(ring)
    r = np.mean(A * (ring - Q[:, None]), axis=1)
    c = np.mean(A, axis=1)
    lat = zab.pole_lattice(1.0, 0.0)
    out = []
    for q, rq, cq in zip(Q, r, c):
        if not np.isfinite(rq) or abs(rq) < 1e-12:
            continue
        ell = np.array([p for p, _, _ in lat.points(abs(rq) / cfg.chain_min, center=cq)])
        if len(ell) == 0:
            continue
        ell = ell[np.argsort(np.abs(ell - cq), kind="stable")[:per]]
        with np.errstate(all="ignore"):
            out.append(q + rq / (ell - cq))
    return np.concatenate(out) if out else np.zeros(0, complex)


def scan_singularities(net: Network, rho: Nonlinearity | None = None, cfg: ScanConfig = ScanConfig(),
                       coord: int = 0) -> PointCloud:
    """Poles of O_N in a square window, found by Newton on 1/O_N.

    Seeds are every point of a grid over the window plus, around each pole q
    of a node feeding an output node, the asymptotic chain of poles that
    accumulates at q. Poles of first-layer nodes are exact lattice points;
    deeper nodes are scanned the same way as O_N. Every returned point is a
    Newton-polished blow-up of O_N.
    """
    rho = rho or Tanh()
    if len(net.inputs) != 1:
        raise ValueError("single-input networks only")
    zab = _as_zab(rho)
    R = _window(net, zab, cfg)
    h = cfg.h0 * R / cfg.half_width
    grid = _grid(R, h)
    (v,) = tuple(net.inputs)

    def scan(f, chains):
        seeds = [grid] + [_chain_seeds(pre, zab, Q, cfg) for pre, Q in chains]
        z = _polished(f, np.concatenate(seeds), R, cfg.newton_iters)
        return _dedupe(np.concatenate([z, np.conj(z)]))

    poles: dict[str, np.ndarray] = {}

    def node_poles(u):
        if u in poles:
            return poles[u]
        if net.parents[u] == (v,):
            lat = zab.pole_lattice(net.edges[(v, u)], net.biases[u])
            pts = np.array([p for p, _, _ in lat.points(R * np.sqrt(2))], dtype=complex)
            poles[u] = _in_window(pts, R)
        else:
            f, pre = _node_fns(net, rho, u)
            poles[u] = scan(f, [(pre, _parent_poles(u))])
        log.debug("node %s: %d poles", u, len(poles[u]))
        return poles[u]

    def _parent_poles(u):
        qs = [node_poles(p) for p in net.parents[u] if p not in net.inputs]
        return np.concatenate(qs) if qs else np.zeros(0, complex)

    chains = []
    for w in sorted(net.scalars):
        if net.scalars[w][coord] != 0 and any(p not in net.inputs for p in net.parents[w]):
            chains.append((_node_fns(net, rho, w)[1], _parent_poles(w)))
    found = scan(_map(net, rho, coord), chains)
    win = float(np.max(np.abs(found), initial=0.0))
    return PointCloud(tuple(found), max(win, R * np.sqrt(2)))


def _polished(f, seeds: np.ndarray, R: float, iters: int) -> np.ndarray:
    """Newton from every seed, then a second pass on the blow-ups.

    Seeds that run out of iterations can sit ~1e-6 off a pole; the second
    pass brings them to full precision so duplicates merge.
    """
    def blowups(z):
        z = _in_window(z[np.isfinite(z)], R)
        with np.errstate(all="ignore"):
            a = np.abs(f(z))
        return z[~(a <= BLOWUP)]  # nan/inf count as blow-ups

    z = blowups(_newton(f, seeds, iters))
    z = np.unique(np.round(z.real, 11) + 1j * np.round(z.imag, 11))
    return blowups(_newton(f, z, iters))


def _dedupe(z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if len(z) == 0:
        return z
    # collapse exact repeats first; Newton sends many seeds to the same pole
    z = np.unique(np.round(z.real, 11) + 1j * np.round(z.imag, 11))
    lab = merge_points(z, tol)
    _, first = np.unique(lab, return_index=True)
    out = z[np.sort(first)]
    return out[np.lexsort((out.imag, out.real))]


@dataclass(frozen=True)
class DepthScan:
    sampled_singularities: PointCloud
    eps_depth: int
    network_depth: int
    matches_L: bool
    cluster: ClusterDepth = field(repr=False, default=None)

    def to_dict(self):
        return {"eps_depth": self.eps_depth, "network_depth": self.network_depth,
                "matches_L": self.matches_L, "n_points": len(self.sampled_singularities),
                "cluster": self.cluster.to_dict()}


def empirical_cluster_vs_depth(net: Network, rho: Nonlinearity | None = None, max_depth: int = 3,
                               cfg: ScanConfig = ScanConfig(), eps_schedule=None, m: int = 3) -> DepthScan:
    if len(net.inputs) != 1:
        raise ValueError("single-input networks only")
    if net.depth > max_depth:
        raise ValueError(f"network depth {net.depth} exceeds max_depth {max_depth}")
    cloud = scan_singularities(net, rho, cfg)
    cd = cluster_depth_eps(cloud, eps_schedule or default_schedule(), m)
    return DepthScan(cloud, cd.depth, net.depth, cd.stable and cd.depth == net.depth, cd)
