"""Supported nonlinearities, real and complex evaluation, pole lattices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

POLE_GUARD = 1e-8


class _PoleMarker:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "POLE"


POLE = _PoleMarker()


def _tanh_c(x):
    """tanh on complex arrays without overflow for large |Re x|."""
    x = np.asarray(x, dtype=complex)
    s = np.where(x.real >= 0, 1.0, -1.0)
    e = np.exp(-2.0 * s * x)
    with np.errstate(all="ignore"):
        return s * (1.0 - e) / (1.0 + e)


def _one_plus_tanh(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        with np.errstate(all="ignore"):
            return 2.0 / (1.0 + np.exp(-2.0 * x))
    from scipy.special import expit
    return 2.0 * expit(2.0 * x)


def _tanh_minus_one(x):
    return -_one_plus_tanh(-np.asarray(x))


class Nonlinearity:
    kind = "abstract"
    meromorphic = False
    kinks: tuple[float, ...] = ()

    def __call__(self, t):
        raise NotImplementedError

    def eval_real(self, t: float) -> float:
        return float(np.real(self(np.asarray(t, dtype=float))))

    def complex_array(self, z):
        raise TypeError(f"{self.kind} has no meromorphic extension")

    def eval_complex(self, z: complex):
        lat = self.pole_lattice(1.0, 0.0)
        if lat.distance(z) < POLE_GUARD:
            return POLE
        return complex(self.complex_array(np.asarray([z]))[0])

    def pole_lattice(self, beta=1.0, gamma=0.0) -> "PoleLattice":
        raise TypeError(f"{self.kind} has no pole lattice")

    def feature_points(self, beta: float, gamma: float) -> np.ndarray:
        """Extra sample points where ρ(βt+γ) changes shape."""
        if not self.kinks:
            return np.empty(0)
        ds = np.array([-1.0, -0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5, 1.0])
        pts = [(k + ds - gamma) / beta for k in self.kinks]
        return np.concatenate(pts)

    def to_dict(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self):
        return self.kind

    def __eq__(self, other):
        return isinstance(other, Nonlinearity) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


class Tanh(Nonlinearity):
    kind = "tanh"
    meromorphic = True

    def __call__(self, t):
        t = np.asarray(t)
        return _tanh_c(t) if np.iscomplexobj(t) else np.tanh(t)

    def complex_array(self, z):
        return _tanh_c(z)

    def as_zab(self) -> "Zab":
        return Zab(1.0, math.pi, 0.0, {0: 1.0})

    def pole_lattice(self, beta=1.0, gamma=0.0):
        return self.as_zab().pole_lattice(beta, gamma)

    def feature_points(self, beta, gamma):
        return (np.linspace(-3.0, 3.0, 13) - gamma) / beta


class CReLU(Nonlinearity):
    kind = "crelu"
    kinks = (0.0, 1.0)

    def __call__(self, t):
        return np.clip(t, 0.0, 1.0)


class ReLU(Nonlinearity):
    kind = "relu"
    kinks = (0.0,)

    def __call__(self, t):
        return np.maximum(t, 0.0)


class Abs(Nonlinearity):
    kind = "abs"
    kinks = (0.0,)

    def __call__(self, t):
        return np.abs(t)


@dataclass(frozen=True, eq=False)
class LeakyReLU(Nonlinearity):
    slope: float = 0.01
    kind = "leaky_relu"
    kinks = (0.0,)

    def __post_init__(self):
        if not 0 < self.slope < 1:
            raise ValueError("leaky slope must lie in (0, 1)")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, t, self.slope * t)

    def to_dict(self):
        return {"kind": self.kind, "slope": self.slope}

    def __repr__(self):
        return f"leaky_relu({self.slope})"


@dataclass(frozen=True, eq=False)
class Zab(Nonlinearity):
    """σ(z) = C + Σ_k c_k [sgn(k) + tanh(π(z - k a)/b)] with finite support."""

    a: float
    b: float
    C: complex = 0.0
    coeffs: Mapping[int, complex] = field(default_factory=dict)
    growth: float | None = None
    kind = "zab"
    meromorphic = True

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        co = {int(k): complex(v) for k, v in dict(self.coeffs).items() if v != 0}
        if not co:
            raise ValueError("Zab needs at least one nonzero coefficient")
        object.__setattr__(self, "coeffs", co)
        g = self.a / 2 if self.growth is None else float(self.growth)
        if not 0 < g < self.a:
            raise ValueError("growth witness must lie in (0, a)")
        object.__setattr__(self, "growth", g)
        ks = np.array(sorted(co), dtype=float)
        object.__setattr__(self, "_ks", ks)
        object.__setattr__(self, "_cs", np.array([co[int(k)] for k in ks]))

    @property
    def real_valued(self) -> bool:
        return complex(self.C).imag == 0 and all(c.imag == 0 for c in self.coeffs.values())

    def _series(self, z):
        z = np.asarray(z)
        x = np.pi * (z[..., None] - self._ks * self.a) / self.b
        k = self._ks
        br = np.where(k > 0, _one_plus_tanh(np.where(k > 0, x, 0)),
                      np.where(k < 0, _tanh_minus_one(np.where(k < 0, x, 0)),
                               (_tanh_c(x) if np.iscomplexobj(x) else np.tanh(x))))
        return complex(self.C) + br @ self._cs

    def __call__(self, t):
        t = np.asarray(t)
        out = self._series(t)
        if not np.iscomplexobj(t) and self.real_valued:
            return np.real(out)
        return out

    def complex_array(self, z):
        return self._series(np.asarray(z, dtype=complex))

    def pole_lattice(self, beta=1.0, gamma=0.0):
        return PoleLattice(self.a, self.b, tuple(sorted(self.coeffs)), complex(beta), complex(gamma))

    def to_dict(self):
        return {"kind": "zab", "a": self.a, "b": self.b, "C": [complex(self.C).real, complex(self.C).imag],
                "coeffs": {str(k): [v.real, v.imag] for k, v in sorted(self.coeffs.items())},
                "growth": self.growth}

    def __repr__(self):
        return f"zab(a={self.a}, b={self.b}, support={len(self.coeffs)})"


@dataclass(frozen=True)
class PoleLattice:
    """The set β^{-1}({a k + i b (m + 1/2) : k ∈ support, m ∈ ℤ} - γ)."""

    a: float
    b: float
    support: tuple[int, ...]
    beta: complex = 1.0
    gamma: complex = 0.0

    def __post_init__(self):
        if self.beta == 0:
            raise ValueError("beta must be nonzero")

    @property
    def spacing(self) -> float:
        """Distance between consecutive poles along one vertical line."""
        return self.b / abs(self.beta)

    def point(self, k: int, m: int) -> complex:
        return (self.a * k + 1j * self.b * (m + 0.5) - self.gamma) / self.beta

    def locate(self, z: complex) -> tuple[int, int, float]:
        """Nearest lattice index (k, m) and the distance to it."""
        w = self.beta * z + self.gamma
        best = None
        for k in self.support:
            m = int(math.floor((w.imag / self.b) - 0.5 + 0.5))
            for mm in (m - 1, m, m + 1):
                d = abs(self.point(k, mm) - z)
                if best is None or d < best[2]:
                    best = (k, mm, d)
        return best

    def distance(self, z: complex) -> float:
        return self.locate(z)[2]

    def points(self, N: float, center: complex = 0.0) -> list[tuple[complex, int, int]]:
        out = []
        step = abs(self.spacing)
        for k in self.support:
            z0 = self.point(k, 0)
            dir_ = 1j * self.b / self.beta
            # parameter m with z0 + m*dir_ nearest to center
            m0 = ((center - z0) * np.conj(dir_)).real / (step ** 2)
            span = int(math.ceil(N / step)) + 2
            for m in range(int(math.floor(m0)) - span, int(math.ceil(m0)) + span + 1):
                p = self.point(k, m)
                if abs(p - center) <= N:
                    out.append((p, k, m))
        return out


def residue_at(rho: Nonlinearity, beta: complex, gamma: complex, p: complex, tol: float = 1e-9) -> complex:
    """Residue of z ↦ ρ(βz + γ) at p (0 if p is not a pole)."""
    z = rho.as_zab() if isinstance(rho, Tanh) else rho
    if not isinstance(z, Zab):
        raise TypeError("residues are defined for tanh-type nonlinearities only")
    lat = z.pole_lattice(beta, gamma)
    k, m, d = lat.locate(p)
    if d > tol * max(1.0, abs(p)):
        return 0.0j
    return z.coeffs[k] * z.b / math.pi / complex(beta)


def from_dict(d: Mapping) -> Nonlinearity:
    kind = d["kind"]
    if kind == "tanh":
        return Tanh()
    if kind == "crelu":
        return CReLU()
    if kind == "relu":
        return ReLU()
    if kind == "abs":
        return Abs()
    if kind in ("leaky_relu", "leaky"):
        return LeakyReLU(float(d.get("slope", 0.01)))
    if kind == "zab":
        C = d.get("C", 0.0)
        C = complex(*C) if isinstance(C, (list, tuple)) else complex(C)
        co = {int(k): (complex(*v) if isinstance(v, (list, tuple)) else complex(v))
              for k, v in d["coeffs"].items()}
        return Zab(float(d["a"]), float(d["b"]), C, co, d.get("growth"))
    raise ValueError(f"unknown nonlinearity kind {kind!r}")


def parse(spec: str) -> Nonlinearity:
    """'tanh', 'crelu', 'relu', 'abs', 'leaky:0.1'."""
    name, _, arg = spec.partition(":")
    if name in ("leaky", "leaky_relu"):
        return LeakyReLU(float(arg) if arg else 0.01)
    return from_dict({"kind": name})
