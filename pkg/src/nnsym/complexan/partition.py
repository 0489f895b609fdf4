"""Grouping terms whose pole lattices share infinitely many points."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from ..nonlinearity import Nonlinearity
from .density import DENOM_CAP, RATIO_RESIDUAL, rational_ratio
from .poles import _as_zab, poles_in_window


@dataclass(frozen=True)
class AlignmentPartition:
    parts: tuple[tuple[int, ...], ...]
    entire: tuple[bool, ...]
    denominator_cap: int = DENOM_CAP

    def to_dict(self):
        return {"parts": [list(p) for p in self.parts], "entire": list(self.entire),
                "denominator_cap": self.denominator_cap}


def _progressions(z, beta, gamma):
    ks = np.array(sorted(z.coeffs), dtype=float)
    x = (z.a * ks + 0.5j * z.b - gamma) / beta
    return x, 1j * z.b / beta


def shares_infinitely_many(z, t1, t2) -> bool:
    """Do the pole lattices of two terms (α, β, γ) meet along a common progression?"""
    x1, y1 = _progressions(z, complex(t1[1]), complex(t1[2]))
    x2, y2 = _progressions(z, complex(t2[1]), complex(t2[2]))
    f = rational_ratio(y1 / y2)
    if f is None:
        return False
    g0 = y2 / f.denominator
    d = (x1[:, None] - x2[None, :]) / g0
    near = (np.abs(d.imag) <= RATIO_RESIDUAL * np.maximum(1, np.abs(d))) & \
           (np.abs(d.real - np.round(d.real)) <= RATIO_RESIDUAL * np.maximum(1, np.abs(d)))
    return bool(near.any())


def alignment_partition(rho: Nonlinearity, terms: Sequence[tuple[complex, complex, complex]]) -> AlignmentPartition:
    """Connected components of the "lattices align" graph, with an entire-flag per part.

    A part is flagged entire when the sum over its terms has no surviving
    pole within ten lattice spacings of the origin.
    """
    z = _as_zab(rho)
    n = len(terms)
    ds = DisjointSet(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if not ds.connected(i, j) and shares_infinitely_many(z, terms[i], terms[j]):
                ds.merge(i, j)
    parts = sorted(tuple(sorted(s)) for s in ds.subsets())
    entire = []
    for p in parts:
        sub = [terms[i] for i in p]
        spacing = max(z.b / abs(complex(t[1])) for t in sub)
        entire.append(len(poles_in_window(z, sub, 10 * spacing)) == 0)
    return AlignmentPartition(tuple(parts), tuple(entire))
