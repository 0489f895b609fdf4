"""Finite-ε surrogate for iterated cluster points and clustering depth."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

DEFAULT_M = 3
LEVEL_GROWTH = 8.0
MAX_LEVELS = 12


def default_schedule(n: int = 7, start: float = 0.5) -> list[float]:
    return [start * 2.0 ** -j for j in range(n)]


def cluster_level(points: np.ndarray, eps: float, m: int = DEFAULT_M) -> np.ndarray:
    """One step E -> C_ε(E).

    Core points have at least m points of E (themselves included) within ε;
    each ε-connected group of core points collapses to its lexicographically
    smallest member.
    """
    pts = np.asarray(points, dtype=complex)
    if len(pts) == 0:
        return pts
    xy = np.column_stack([pts.real, pts.imag])
    tree = cKDTree(xy)
    counts = np.array([len(c) for c in tree.query_ball_point(xy, eps)])
    core = pts[counts >= m]
    if len(core) == 0:
        return core
    cxy = np.column_stack([core.real, core.imag])
    pairs = cKDTree(cxy).query_pairs(eps, output_type="ndarray")
    n = len(core)
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
    _, lab = connected_components(g, directed=False)
    reps = []
    for L in np.unique(lab):
        grp = core[lab == L]
        reps.append(grp[np.lexsort((grp.imag, grp.real))[0]])
    return np.array(reps, dtype=complex)


def depth_at(points, eps: float, m: int = DEFAULT_M, growth: float = LEVEL_GROWTH) -> int:
    """Least k with C^k empty, level k using radius ε·growth^(k-1)."""
    E = np.asarray(points, dtype=complex)
    k = 0
    while len(E) and k < MAX_LEVELS:
        E = cluster_level(E, eps * growth ** k, m)
        k += 1
    return k


@dataclass(frozen=True)
class ClusterDepth:
    depth: int
    by_eps: tuple[tuple[float, int], ...]
    stable: bool

    def __int__(self):
        return self.depth

    def to_dict(self):
        return {"depth": self.depth, "stable": self.stable,
                "by_eps": [list(x) for x in self.by_eps]}


def cluster_depth_eps(cloud, eps_schedule: Sequence[float] | None = None, m: int = DEFAULT_M,
                      growth: float = LEVEL_GROWTH) -> ClusterDepth:
    pts = cloud.array if hasattr(cloud, "array") else np.asarray(cloud, dtype=complex)
    sched = list(eps_schedule) if eps_schedule is not None else default_schedule()
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    if m < 2:
        raise ValueError("m must be at least 2")
    by = tuple((e, depth_at(pts, e, m, growth)) for e in sched)
    stable = len(by) < 2 or by[-1][1] == by[-2][1]
    return ClusterDepth(by[-1][1], by, stable)
