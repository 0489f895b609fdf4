"""Reducibility detection, reductions, and regular forms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..network import (ZERO_TOL, Network, NetworkBuilder, is_non_degenerate,
                       is_strongly_non_degenerate, prune)
from ..nonlinearity import Nonlinearity, Tanh
from ..symmetry import AffineSymmetry, discover_symmetry, support_indices

PROP_RTOL = 1e-10


def _close(a: float, b: float, rtol: float = PROP_RTOL) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True)
class ReductionWitness:
    U: tuple[str, ...]
    parents: tuple[str, ...]
    kappa: Mapping[str, float]
    beta: Mapping[str, float]
    symmetry: AffineSymmetry  # terms ordered as U

    def alpha(self, u: str) -> float:
        return self.symmetry.terms[self.U.index(u)][0]

    def to_dict(self) -> dict:
        return {"U": list(self.U), "parents": list(self.parents), "kappa": dict(self.kappa),
                "beta": dict(self.beta), "symmetry": self.symmetry.to_dict()}

    @classmethod
    def from_dict(cls, d) -> "ReductionWitness":
        return cls(tuple(d["U"]), tuple(d["parents"]), d["kappa"], d["beta"],
                   AffineSymmetry.from_dict(d["symmetry"]))


def incoming_profile(net: Network, u: str) -> tuple[tuple[str, ...], float, tuple[float, ...]]:
    """(parents, β_u, κ) with κ normalized so its first component is 1."""
    ps = net.parents[u]
    w0 = net.edges[(ps[0], u)]
    return ps, w0, tuple(net.edges[(p, u)] / w0 for p in ps)


def proportional_classes(net: Network) -> list[tuple[tuple[str, ...], tuple[float, ...], list[str]]]:
    """Hidden nodes grouped by parent set and weight direction, deterministic order."""
    by_parents: dict[tuple[str, ...], list[str]] = {}
    for u in net.hidden:
        if net.parents[u]:
            by_parents.setdefault(net.parents[u], []).append(u)
    out = []
    for ps in sorted(by_parents):
        classes: list[tuple[tuple[float, ...], list[str]]] = []
        for u in sorted(by_parents[ps]):
            _, _, kap = incoming_profile(net, u)
            for k0, members in classes:
                if all(_close(x, y) for x, y in zip(kap, k0)):
                    members.append(u)
                    break
            else:
                classes.append((kap, [u]))
        out.extend((ps, k, m) for k, m in classes)
    return out


def find_reduction(net: Network, rho: Nonlinearity) -> ReductionWitness | None:
    for ps, kap, members in proportional_classes(net):
        if len(members) < 2:
            continue
        betas = {u: incoming_profile(net, u)[1] for u in members}
        kappa = dict(zip(ps, kap))
        if isinstance(rho, Tanh):
            # pairwise criterion: ω_{u1·} = s ω_{u2·}, θ_{u1} = s θ_{u2}, s = ±1
            for i, u1 in enumerate(members):
                for u2 in members[i + 1:]:
                    b1, b2 = betas[u1], betas[u2]
                    t1, t2 = net.biases[u1], net.biases[u2]
                    for s in (1.0, -1.0):
                        if _close(b1, s * b2) and abs(t1 - s * t2) <= PROP_RTOL * max(1.0, abs(t1)):
                            sym = AffineSymmetry(0.0, [(1.0, b1, t1), (-s, b2, t2)])
                            return ReductionWitness((u1, u2), ps, kappa, {u1: b1, u2: b2}, sym)
            continue
        cands = [(betas[u], net.biases[u]) for u in members]
        sym = discover_symmetry(rho, cands)
        if sym is None:
            continue
        idx = support_indices(sym, cands)
        U = tuple(members[i] for i in idx)
        return ReductionWitness(U, ps, kappa, {u: betas[u] for u in U}, sym)
    return None


def fold_constants(net: Network, rho: Nonlinearity) -> Network:
    """Absorb parentless hidden nodes (constant maps) into biases/constants."""
    b = NetworkBuilder(net=net)
    while True:
        par: dict[str, int] = {v: 0 for v in b.nodes}
        for (_, d) in b.edges:
            par[d] += 1
        orphans = sorted(v for v in b.nodes if v not in b.inputs and par[v] == 0)
        if not orphans:
            break
        for v in orphans:
            a = float(rho(np.array([b.biases[v]]))[0])
            for (s, d), w in list(b.edges.items()):
                if s == v:
                    b.biases[d] += w * a
            if v in b.scalars:
                b.constants = [c + l * a for c, l in zip(b.constants, b.scalars[v])]
            b.remove(v)
    return b.build()


def apply_reduction(net: Network, w: ReductionWitness, rho: Nonlinearity,
                    keep: str | None = None) -> Network:
    """Remove one node of the witness group u*, compensating with the rest.

    ``keep`` is accepted for interface symmetry and names the node u* that is
    removed; by default the lexicographically smallest member of U.
    """
    ustar = keep if keep is not None else min(w.U)
    if ustar not in w.U:
        raise ValueError(f"{ustar} not in witness group")
    zeta = w.symmetry.zeta
    a_star = w.alpha(ustar)
    B = [u for u in w.U if u != ustar]
    b = NetworkBuilder(net=net)
    for child in net.children[ustar]:
        nu = net.edges[(ustar, child)] / a_star
        b.biases[child] += zeta * nu
        for u in B:
            new = b.edges.get((u, child), 0.0) - w.alpha(u) * nu
            if abs(new) < ZERO_TOL:
                b.edges.pop((u, child), None)
            else:
                b.edges[(u, child)] = new
    if ustar in net.scalars:
        mu = [l / a_star for l in net.scalars[ustar]]
        b.constants = [c + zeta * m for c, m in zip(b.constants, mu)]
        for u in B:
            old = net.scalars.get(u, [0.0] * net.dim_out)
            b.scalars[u] = [o - w.alpha(u) * m for o, m in zip(old, mu)]
    b.remove(ustar)
    # nodes whose incoming weights all cancelled now compute constants
    return prune(fold_constants(b.build(), rho))


def reduce_to_regular(net: Network, rho: Nonlinearity, max_steps: int | None = None) -> Network:
    net = prune(fold_constants(net, rho))
    steps = max_steps if max_steps is not None else len(net.nodes) + 1
    for _ in range(steps):
        w = find_reduction(net, rho)
        if w is None:
            return net
        net = apply_reduction(net, w, rho)
    if find_reduction(net, rho) is not None:
        raise RuntimeError("reduction did not terminate")
    return net


@dataclass(frozen=True)
class RegularityReport:
    non_degenerate: bool
    strongly_non_degenerate: bool
    irreducible: bool
    regular: bool
    strongly_regular: bool
    witness: ReductionWitness | None = None

    def to_dict(self) -> dict:
        return {"non_degenerate": self.non_degenerate,
                "strongly_non_degenerate": self.strongly_non_degenerate,
                "irreducible": self.irreducible, "regular": self.regular,
                "strongly_regular": self.strongly_regular,
                "witness": None if self.witness is None else self.witness.to_dict()}


def regularity_report(net: Network, rho: Nonlinearity) -> RegularityReport:
    nd = is_non_degenerate(net)
    snd = is_strongly_non_degenerate(net)
    w = find_reduction(net, rho)
    irr = w is None
    return RegularityReport(nd, snd, irr, nd and irr, snd and irr, w)
