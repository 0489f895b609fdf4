"""Windowed asymptotic density and rationality tests."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .poles import LineSpec, PointCloud

DENOM_CAP = 10 ** 6
RATIO_RESIDUAL = 1e-13  # best approximations with q <= 1e6 of generic irrationals miss by ~1e-12


def _pts(P) -> np.ndarray:
    if isinstance(P, PointCloud):
        return P.array
    return np.asarray(P, dtype=complex).ravel()


def density_along(F, P, eps: float, N: float) -> float:
    """(1/2N) #{p ∈ P : |p| ≤ N, d(p, F) ≤ ε}, F a line or a point set."""
    p = _pts(P)
    p = p[np.abs(p) <= N]
    if len(p) == 0:
        return 0.0
    if isinstance(F, LineSpec):
        d = F.distance(p)
    else:
        f = _pts(F)
        if len(f) == 0:
            return 0.0
        d, _ = cKDTree(np.column_stack([f.real, f.imag])).query(np.column_stack([p.real, p.imag]))
    return float(np.count_nonzero(d <= eps)) / (2.0 * N)


def density_trend(F_of: Callable[[float], object], P_of: Callable[[float], object],
                  windows: Sequence[float], eps_of: Callable[[float], float]) -> list[tuple[float, float, float]]:
    """[(N, ε(N), density)] for a family of windows."""
    out = []
    for N in windows:
        e = eps_of(N)
        out.append((float(N), float(e), density_along(F_of(N), P_of(N), e, N)))
    return out


def arithmetic_points(x: complex, y: complex, N: float) -> np.ndarray:
    """Points x + k y with |·| ≤ N."""
    y = complex(y)
    span = int(np.ceil((N + abs(x)) / abs(y))) + 1
    k = np.arange(-span, span + 1)
    p = complex(x) + k * y
    return p[np.abs(p) <= N]


def rational_ratio(r: complex, cap: int = DENOM_CAP, residual: float = RATIO_RESIDUAL) -> Fraction | None:
    """p/q if r is real and rational with q ≤ cap (to the residual), else None."""
    r = complex(r)
    scale = max(1.0, abs(r))
    if abs(r.imag) > residual * scale:
        return None
    f = Fraction(r.real).limit_denominator(cap)
    if abs(float(f) - r.real) > residual * scale:
        return None
    return f
