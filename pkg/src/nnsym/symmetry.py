"""Affine symmetries: verification, discovery and explicit constructions."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .nonlinearity import Nonlinearity, Tanh, Zab, residue_at

GRID_LO, GRID_HI, GRID_N, GRID_RANDOM, GRID_SEED = -8.0, 8.0, 256, 32, 42
NULL_REL = 1e-8
GAP_REL = 1e-4
SUPPORT_REL = 1e-6


@dataclass(frozen=True)
class AffineSymmetry:
    zeta: float
    terms: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(a), float(b), float(g)) for a, b, g in self.terms))
        if not self.terms:
            raise ValueError("symmetry needs at least one term")

    @property
    def alphas(self) -> np.ndarray:
        return np.array([t[0] for t in self.terms])

    def scaled(self, c: float) -> "AffineSymmetry":
        return AffineSymmetry(self.zeta * c, [(a * c, b, g) for a, b, g in self.terms])

    def reparam(self, c: float, d: float) -> "AffineSymmetry":
        """Substitute t -> c t + d."""
        return AffineSymmetry(self.zeta, [(a, b * c, b * d + g) for a, b, g in self.terms])

    def to_dict(self) -> dict:
        return {"zeta": self.zeta, "terms": [list(t) for t in self.terms]}

    @classmethod
    def from_dict(cls, d) -> "AffineSymmetry":
        return cls(float(d["zeta"]), [tuple(t) for t in d["terms"]])


@dataclass(frozen=True)
class SymmetryCheck:
    holds: bool
    minimal: bool
    max_residual: float


class InconclusiveGrid(RuntimeError):
    """Singular values fall between the null and gap thresholds."""


def sample_grid(rho: Nonlinearity | None = None, params: Sequence[tuple[float, float]] = ()) -> np.ndarray:
    """Fixed grid on [-8, 8] plus seeded random points, plus shape points of ρ."""
    base = np.linspace(GRID_LO, GRID_HI, GRID_N)
    rnd = np.random.default_rng(GRID_SEED).uniform(GRID_LO, GRID_HI, GRID_RANDOM)
    extra = [rho.feature_points(b, g) for b, g in params] if rho is not None else []
    return np.unique(np.concatenate([base, rnd, *extra]))


def _columns(rho, params, t):
    cols = [np.ones_like(t)]
    for b, g in params:
        cols.append(np.real_if_close(rho(b * t + g)))
    return np.column_stack(cols).astype(float)


def _svd_normalized(M):
    norms = np.linalg.norm(M, axis=0)
    norms[norms == 0] = 1.0
    _, s, vt = np.linalg.svd(M / norms, full_matrices=False)
    return s, vt, norms


def _null_info(M):
    """(nullity, basis rows in original scaling, singular values)."""
    s, vt, norms = _svd_normalized(M)
    smax = s[0] if s.size else 0.0
    if smax == 0:
        return M.shape[1], np.eye(M.shape[1]), s
    nullity = int(np.sum(s < NULL_REL * smax)) + max(0, M.shape[1] - s.size)
    if nullity and nullity < s.size and s[-nullity - 1] <= GAP_REL * smax:
        raise InconclusiveGrid(f"singular values not separated: {s}")
    basis = vt[vt.shape[0] - nullity:] / norms if nullity else np.zeros((0, M.shape[1]))
    return nullity, basis, s


def residual(rho: Nonlinearity, s: AffineSymmetry, t: np.ndarray | None = None) -> float:
    t = sample_grid(rho, [(b, g) for _, b, g in s.terms]) if t is None else t
    val = sum(a * rho(b * t + g) for a, b, g in s.terms)
    return float(np.max(np.abs(val - s.zeta)))


def verify_symmetry(rho: Nonlinearity, s: AffineSymmetry, tol: float = 1e-10) -> SymmetryCheck:
    params = [(b, g) for _, b, g in s.terms]
    t = sample_grid(rho, params)
    res = residual(rho, s, t)
    scale = max(1.0, float(np.max(np.abs(s.alphas))), abs(s.zeta))
    holds = res <= tol * scale
    minimal = False
    if holds:
        M = _columns(rho, params, t)
        s_, vt, norms = _svd_normalized(M)
        smax = s_[0]
        if s_[-1] < NULL_REL * smax and (len(s_) < 2 or s_[-2] > GAP_REL * smax):
            v = vt[-1] / norms
            # the constant coordinate may vanish (ζ = 0); only the terms must be supported
            terms = np.abs(v[1:])
            minimal = bool(np.all(terms > SUPPORT_REL * np.max(np.abs(v))))
    return SymmetryCheck(bool(holds), minimal, res)


def tanh_symmetry_catalog(beta: float, gamma: float, alpha: float = 1.0) -> list[AffineSymmetry]:
    """The only two symmetry families of tanh through the term (α, β, γ)."""
    if beta == 0 or alpha == 0:
        raise ValueError("alpha and beta must be nonzero")
    return [AffineSymmetry(0.0, [(alpha, beta, gamma), (-alpha, beta, gamma)]),
            AffineSymmetry(0.0, [(alpha, beta, gamma), (alpha, -beta, -gamma)])]


def crelu_symmetry() -> AffineSymmetry:
    """ρ(t) - ρ(2t)/2 - ρ(2t-1)/2 = 0 for the clipped ReLU."""
    return AffineSymmetry(0.0, [(1.0, 1.0, 0.0), (-0.5, 2.0, 0.0), (-0.5, 2.0, -1.0)])


def crelu_reflection() -> AffineSymmetry:
    """ρ(t) + ρ(1 - t) = 1 for the clipped ReLU."""
    return AffineSymmetry(1.0, [(1.0, 1.0, 0.0), (1.0, -1.0, 1.0)])


def _has_null_with(M, req: Sequence[int]) -> np.ndarray | None:
    """A null vector of M that is nonzero on every index in ``req``."""
    nullity, basis, _ = _null_info(M)
    if nullity == 0:
        return None
    if not req:
        return basis[-1]
    # random combination is nonzero on each coordinate that is not identically zero
    rng = np.random.default_rng(0)
    v = rng.standard_normal(nullity) @ basis
    scale = np.max(np.abs(basis))
    if all(np.max(np.abs(basis[:, j])) > SUPPORT_REL * scale for j in req):
        return v
    return None


def discover_symmetry(rho: Nonlinearity, candidates: Sequence[tuple[float, float]],
                      required: int | Sequence[int] | None = None) -> AffineSymmetry | None:
    """Find a minimal affine symmetry among ρ(β_s t + γ_s).

    Returns a symmetry whose terms follow the candidate order restricted to
    its support, or None. With ``required`` the support must contain those
    candidate indices.
    """
    if not candidates:
        return None
    req = [] if required is None else ([required] if isinstance(required, int) else list(required))
    t = sample_grid(rho, candidates)
    M = _columns(rho, candidates, t)
    cols = list(range(1, M.shape[1]))
    reqc = [r + 1 for r in req]
    if _has_null_with(M, reqc) is None:
        return None
    # greedy shrink: drop columns while a null vector through `req` survives
    keep = list(cols)
    for c in reversed(cols):
        if c in reqc:
            continue
        trial = [x for x in keep if x != c]
        if not trial:
            continue
        if _has_null_with(M[:, [0] + trial], [trial.index(r) + 1 for r in reqc]) is not None:
            keep = trial
    sub = M[:, [0] + keep]
    nullity, basis, _ = _null_info(sub)
    if nullity != 1:
        return None
    v = basis[0]
    if np.any(np.abs(v[1:]) <= SUPPORT_REL * np.max(np.abs(v))):
        return None
    lead = v[1] if not reqc else v[keep.index(reqc[0]) + 1]
    v = v / lead
    zeta = -v[0]
    if abs(zeta) < 1e-12:
        zeta = 0.0
    terms = [(v[i + 1], candidates[c - 1][0], candidates[c - 1][1]) for i, c in enumerate(keep)]
    sym = AffineSymmetry(zeta, terms)
    # one least-squares polish of alphas and zeta on the chosen support
    A = np.column_stack([sub[:, 1:], -np.ones(len(t))])
    fix = 0 if not reqc else keep.index(reqc[0])
    rhs = -A[:, fix]
    Ared = np.delete(A, fix, axis=1)
    sol, *_ = np.linalg.lstsq(Ared, rhs, rcond=None)
    full = np.insert(sol, fix, 1.0)
    polished = AffineSymmetry(0.0 if abs(full[-1]) < 1e-12 else full[-1],
                              [(full[i], b, g) for i, (_, b, g) in enumerate(terms)])
    if residual(rho, polished) <= residual(rho, sym):
        sym = polished
    return sym


def support_indices(sym: AffineSymmetry, candidates: Sequence[tuple[float, float]]) -> list[int]:
    """Map the terms of a discovered symmetry back to candidate indices."""
    out, used = [], set()
    for _, b, g in sym.terms:
        for i, (cb, cg) in enumerate(candidates):
            if i not in used and cb == b and cg == g:
                out.append(i)
                used.add(i)
                break
    return out


# exotic symmetries of tanh-type functions ---------------------------------

@dataclass(frozen=True)
class ExoticSymmetry:
    sigma: Zab
    zeta: float
    symmetry: AffineSymmetry
    b: float
    K: int
    growth_root: float
    tail_bound: float


def _recurrence(alphas, K):
    """r_k for k in [-K, K] with Σ_l α_l r_{k-l} = 0 and r_j = α_{n-j} for 0 ≤ j < n."""
    al = np.asarray(alphas, dtype=float)
    n = len(al) - 1
    r = {j: al[n - j] for j in range(n)}
    for k in range(n, K + 1):
        r[k] = -sum(al[l] * r[k - l] for l in range(1, n + 1)) / al[0]
    for k in range(-1, -K - 1, -1):
        # solve Σ_l α_l r_{k+n-l} = 0 for r_k (the l = n term)
        r[k] = -sum(al[l] * r[k + n - l] for l in range(n)) / al[n]
    return r


def construct_exotic(alphas: Sequence[float], window: float = GRID_HI, delta: float = 0.1,
                     tail_tol: float = 1e-12, min_K: int | None = None) -> ExoticSymmetry:
    """Build σ ∈ Z_{1,b} with Σ_l α_l σ(t - l) constant.

    Coefficients follow the two-sided linear recurrence of the α's; the
    support is truncated to [-K, K] with K large enough that boundary terms
    are below ``tail_tol`` on ``[-window, window]``.
    """
    al = np.asarray(alphas, dtype=float)
    if len(al) < 2 or np.any(al == 0):
        raise ValueError("need n >= 1 and all alphas nonzero")
    n = len(al) - 1
    roots = np.roots(al)
    mods = np.abs(roots)
    g = float(max(np.max(mods), np.max(1.0 / mods)))
    if np.any(np.abs(mods - 1.0) < 1e-9):
        warnings.warn("characteristic root on the unit circle; using a larger truncation", RuntimeWarning)
    b = math.pi / (math.log(g) + delta)
    # boundary terms decay like |r_K| exp(-2π (K - window)/b)
    K = max(int(math.ceil(10 * b)) + n + int(window) + 2, min_K or 0)
    while True:
        r = _recurrence(al, K)
        rmax = max(abs(r[K]), abs(r[-K]), *(abs(r[K - j]) for j in range(n)), *(abs(r[-K + j]) for j in range(n)))
        tail = rmax * 2 * math.exp(-2 * math.pi * (K - n - window) / b) * float(np.sum(np.abs(al)))
        if tail < tail_tol:
            break
        K = int(K * 1.25) + 1
        if K > 20000:
            raise RuntimeError("exotic construction did not converge")
    sigma = Zab(1.0, b, 0.0, {k: v for k, v in r.items() if v != 0})
    terms = [(float(al[l]), 1.0, -float(l)) for l in range(n + 1)]
    t = sample_grid()
    vals = sum(a * np.real(sigma(bb * t + gg)) for a, bb, gg in terms)
    zeta = float(np.mean(vals))
    return ExoticSymmetry(sigma, zeta, AffineSymmetry(zeta, terms), b, K, g, tail)


def residue_of_combination(rho: Nonlinearity, terms: Sequence[tuple[complex, complex, complex]], z: complex) -> complex:
    return sum(a * residue_at(rho, b, g, z) for a, b, g in terms)
