"""Pole clouds of affine combinations of tanh-type functions."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..network import Network
from ..nonlinearity import Nonlinearity, Tanh, Zab

PRUNE_TOL = 1e-10
MARGINAL_TOL = 1e-8
MERGE_TOL = 1e-9
BLOWUP = 1e6


@dataclass(frozen=True)
class PointCloud:
    points: tuple[complex, ...]
    window: float
    residues: tuple[complex, ...] | None = None
    marginal: tuple[bool, ...] | None = None

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if any(not (math.isfinite(p.real) and math.isfinite(p.imag)) for p in pts):
            raise ValueError("point cloud contains non-finite points")
        if any(abs(p) > self.window * (1 + 1e-12) for p in pts):
            raise ValueError("point outside the cloud window")

    def __len__(self):
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    @classmethod
    def from_array(cls, arr, window: float | None = None) -> "PointCloud":
        arr = np.asarray(arr, dtype=complex).ravel()
        w = float(np.max(np.abs(arr), initial=0.0)) if window is None else window
        return cls(tuple(arr[np.abs(arr) <= w]), w)

    def to_rows(self) -> list[tuple[float, float, float, float]]:
        res = self.residues or (0j,) * len(self.points)
        return [(p.real, p.imag, complex(r).real, complex(r).imag) for p, r in zip(self.points, res)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "residue_re", "residue_im"])
        for row in self.to_rows():
            w.writerow([repr(x) for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"window": self.window,
                "points": [[r[0], r[1]] for r in self.to_rows()],
                "residues": None if self.residues is None else [[r[2], r[3]] for r in self.to_rows()],
                "marginal": None if self.marginal is None else list(self.marginal)}

    @classmethod
    def from_dict(cls, d) -> "PointCloud":
        pts = [complex(a, b) for a, b in d["points"]]
        res = None if d.get("residues") is None else tuple(complex(a, b) for a, b in d["residues"])
        marg = None if d.get("marginal") is None else tuple(d["marginal"])
        return cls(tuple(pts), float(d["window"]), res, marg)


@dataclass(frozen=True)
class LineSpec:
    x: complex
    y: complex

    def __post_init__(self):
        y = complex(self.y)
        if y == 0:
            raise ValueError("direction must be nonzero")
        object.__setattr__(self, "y", y / abs(y))
        object.__setattr__(self, "x", complex(self.x))

    def distance(self, p):
        p = np.asarray(p, dtype=complex)
        return np.abs(((p - self.x) * np.conj(self.y)).imag)


def _as_zab(rho: Nonlinearity) -> Zab:
    if isinstance(rho, Tanh):
        return rho.as_zab()
    if isinstance(rho, Zab):
        return rho
    raise TypeError("pole computations need a tanh-type nonlinearity")


def merge_points(pts: np.ndarray, tol: float) -> np.ndarray:
    """Label array grouping points closer than ``tol`` (transitively)."""
    if len(pts) == 0:
        return np.zeros(0, dtype=int)
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    pairs = tree.query_pairs(tol, output_type="ndarray")
    n = len(pts)
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
    return connected_components(g, directed=False)[1]


def poles_in_window(rho: Nonlinearity, terms: Sequence[tuple[complex, complex, complex]], N: float) -> PointCloud:
    """Poles of Σ α_s ρ(β_s z + γ_s) in |z| ≤ N with nonvanishing residue."""
    if not terms:
        raise ValueError("at least one term is required")
    z = _as_zab(rho)
    pts, res = [], []
    for al, be, ga in terms:
        lat = z.pole_lattice(be, ga)
        for p, k, _ in lat.points(N):
            pts.append(p)
            res.append(al * z.coeffs[k] * z.b / math.pi / complex(be))
    if not pts:
        return PointCloud((), N, (), ())
    P = np.array(pts)
    R = np.array(res)
    lab = merge_points(P, MERGE_TOL * max(1.0, N))
    out_p, out_r = [], []
    for L in np.unique(lab):
        idx = np.flatnonzero(lab == L)
        r = R[idx].sum()
        if abs(r) >= PRUNE_TOL:
            out_p.append(P[idx[0]])
            out_r.append(r)
    order = sorted(range(len(out_p)), key=lambda i: (round(out_p[i].real, 12), round(out_p[i].imag, 12)))
    out_p = [out_p[i] for i in order]
    out_r = [out_r[i] for i in order]
    return PointCloud(tuple(out_p), N, tuple(out_r), tuple(abs(r) < MARGINAL_TOL for r in out_r))


@dataclass(frozen=True)
class SingleLayerPoles:
    predicted_poles: PointCloud
    nonempty: bool
    confirmed: bool  # every predicted pole blows up under direct evaluation


def single_layer_terms(net: Network, coord: int = 0) -> list[tuple[float, float, float]]:
    if len(net.inputs) != 1 or net.depth > 1:
        raise ValueError("expected a single-input network of depth 1")
    (v,) = tuple(net.inputs)
    return [(net.scalars[u][coord], net.edges[(v, u)], net.biases[u]) for u in net.hidden if u in net.scalars]


def single_layer_pole_check(net: Network, N: float = 10.0, rho: Nonlinearity | None = None,
                            coord: int = 0) -> SingleLayerPoles:
    from ..rewrite.evaluation import eval_map

    rho = rho or Tanh()
    terms = single_layer_terms(net, coord)
    if not terms:
        return SingleLayerPoles(PointCloud((), N, (), ()), False, True)
    cloud = poles_in_window(rho, terms, N)
    ok = True
    if len(cloud):
        zs = cloud.array + 1e-7
        vals = np.abs(eval_map(net, rho, zs.reshape(-1, 1).astype(complex))[:, coord])
        ok = bool(np.all(vals > BLOWUP))
    return SingleLayerPoles(cloud, len(cloud) > 0, ok)
