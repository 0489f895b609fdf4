"""Symmetry-driven modifications of a network and their inverses."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from ..network import ZERO_TOL, Network, NetworkBuilder, ancestors
from ..nonlinearity import Nonlinearity
from ..symmetry import AffineSymmetry, discover_symmetry, support_indices, verify_symmetry
from .reduction import find_reduction, proportional_classes, regularity_report

PLAN_RTOL = 1e-9


class PlanError(ValueError):
    pass


def _close(a, b, rtol=PLAN_RTOL):
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class ModificationPlan:
    """Replace nodes A by fresh nodes C; B absorbs the remainder.

    ``symmetry`` lists its terms in the order A, B, C.
    """

    A: tuple[str, ...]
    B: tuple[str, ...]
    C: tuple[str, ...]
    symmetry: AffineSymmetry
    kappa: Mapping[str, float]
    nu: Mapping[str, float] = field(default_factory=dict)
    mu: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "B", tuple(self.B))
        object.__setattr__(self, "C", tuple(self.C))
        object.__setattr__(self, "kappa", dict(self.kappa))
        object.__setattr__(self, "nu", dict(self.nu))
        if self.mu is not None:
            object.__setattr__(self, "mu", tuple(float(m) for m in self.mu))

    @property
    def parents(self) -> tuple[str, ...]:
        return tuple(sorted(self.kappa))

    def term(self, u: str) -> tuple[float, float, float]:
        order = self.A + self.B + self.C
        return self.symmetry.terms[order.index(u)]

    def to_dict(self) -> dict:
        return {"A": list(self.A), "B": list(self.B), "C": list(self.C),
                "symmetry": self.symmetry.to_dict(), "kappa": dict(self.kappa),
                "nu": dict(self.nu), "mu": None if self.mu is None else list(self.mu)}

    @classmethod
    def from_dict(cls, d) -> "ModificationPlan":
        return cls(d["A"], d["B"], d["C"], AffineSymmetry.from_dict(d["symmetry"]),
                   d["kappa"], d.get("nu", {}), d.get("mu"))


def plan_from_symmetry(net: Network, A: Sequence[str], B: Sequence[str], C: Sequence[str],
                       sym: AffineSymmetry) -> ModificationPlan:
    """Derive κ, ν and μ from the network for a symmetry ordered A, B, C."""
    A, B = list(A), list(B)
    if not A:
        raise PlanError("A must be nonempty")
    a0 = A[0]
    al0, be0, _ = sym.terms[0]
    ps = net.parents[a0]
    kappa = {v: net.edges[(v, a0)] / be0 for v in ps}
    nu = {}
    for w in sorted({c for a in A for c in net.children[a]}):
        src = next((a for a in A if (a, w) in net.edges), None)
        nu[w] = net.edges[(src, w)] / sym.terms[A.index(src)][0]
    mu = None
    if a0 in net.scalars:
        mu = tuple(l / al0 for l in net.scalars[a0])
    return ModificationPlan(A, B, C, sym, kappa, nu, mu)


def check_plan(net: Network, plan: ModificationPlan, rho: Nonlinearity | None = None) -> list[str]:
    """Violations of the modification preconditions (empty list if none)."""
    out: list[str] = []
    A, B, C = set(plan.A), set(plan.B), plan.C
    hidden = set(net.nodes) - set(net.inputs)
    if not A:
        out.append("A is empty")
    if A & B:
        out.append("A and B overlap")
    if not (A | B) <= hidden:
        out.append("A ∪ B must be hidden nodes of the network")
    if not C:
        out.append("C is empty")
    if len(set(C)) != len(C) or set(C) & set(net.nodes):
        out.append("C ids must be fresh and distinct")
    if len(plan.symmetry.terms) != len(plan.A) + len(plan.B) + len(C):
        out.append("symmetry length differs from |A|+|B|+|C|")
    if out:
        return out
    P = plan.parents
    for u in plan.A + plan.B:
        al, be, ga = plan.term(u)
        if net.parents[u] != P:
            out.append(f"{u}: parent set differs from P")
            continue
        for v in P:
            if not _close(net.edges[(v, u)], be * plan.kappa[v]):
                out.append(f"{u}: weight from {v} is not β κ")
        if not _close(net.biases[u], ga):
            out.append(f"{u}: bias differs from γ")
    W = {w for a in A for w in net.children[a]}
    if set(plan.nu) != W:
        out.append("nu keys differ from the children of A")
    for w in W:
        nu = plan.nu.get(w, 0.0)
        for a in plan.A:
            if (a, w) not in net.edges:
                out.append(f"{a} is not a parent of {w}")
            elif not _close(net.edges[(a, w)], nu * plan.term(a)[0]):
                out.append(f"weight ({a},{w}) is not ν α")
    outs_in_A = A & set(net.scalars)
    if outs_in_A and outs_in_A != A:
        out.append("A meets the outputs but is not contained in them")
    if outs_in_A:
        if plan.mu is None or len(plan.mu) != net.dim_out:
            out.append("mu missing for output nodes in A")
        else:
            for a in plan.A:
                al = plan.term(a)[0]
                if not all(_close(l, m * al) for l, m in zip(net.scalars[a], plan.mu)):
                    out.append(f"scalars of {a} are not μ α")
    elif plan.mu is not None:
        out.append("mu given but A has no outputs")
    if rho is not None:
        chk = verify_symmetry(rho, plan.symmetry, tol=1e-9)
        if not chk.holds:
            out.append(f"symmetry does not hold (residual {chk.max_residual:.3g})")
    return out


def apply_modification(net: Network, plan: ModificationPlan, rho: Nonlinearity | None = None,
                       check: bool = True, require_irreducible: bool = True) -> Network:
    if check:
        errs = check_plan(net, plan, rho)
        if errs:
            raise PlanError("; ".join(errs))
    if rho is not None and require_irreducible and find_reduction(net, rho) is not None:
        raise PlanError("host network is reducible")
    zeta = plan.symmetry.zeta
    b = NetworkBuilder(net=net)
    for a in plan.A:
        b.remove(a)
    for c in plan.C:
        _, be, ga = plan.term(c)
        b.node(c, ga)
        for v, k in plan.kappa.items():
            b.edge(v, c, be * k)
    for w, nu in plan.nu.items():
        b.biases[w] += zeta * nu
        for c in plan.C:
            b.edge(c, w, -plan.term(c)[0] * nu)
        for u in plan.B:
            new = b.edges.get((u, w), 0.0) - plan.term(u)[0] * nu
            if abs(new) < ZERO_TOL:
                b.edges.pop((u, w), None)
            else:
                b.edges[(u, w)] = new
    if plan.mu is not None:
        mu = plan.mu
        b.constants = [c + zeta * m for c, m in zip(b.constants, mu)]
        for c in plan.C:
            b.scalars[c] = [-plan.term(c)[0] * m for m in mu]
        for u in plan.B:
            old = net.scalars.get(u, [0.0] * net.dim_out)
            new = [o - plan.term(u)[0] * m for o, m in zip(old, mu)]
            if any(abs(x) >= ZERO_TOL for x in new):
                b.scalars[u] = new
            else:
                b.scalars.pop(u, None)
    return b.build()


def invert_modification(net: Network, plan: ModificationPlan, result: Network | None = None) -> ModificationPlan:
    """Plan that maps the modified network back to ``net``."""
    sym = plan.symmetry
    nA, nB = len(plan.A), len(plan.B)
    tA, tB, tC = sym.terms[:nA], sym.terms[nA:nA + nB], sym.terms[nA + nB:]
    inv = AffineSymmetry(sym.zeta, list(tC) + list(tB) + list(tA))
    mu = None if plan.mu is None else tuple(-m for m in plan.mu)
    return ModificationPlan(plan.C, plan.B, plan.A, inv, plan.kappa,
                            {w: -n for w, n in plan.nu.items()}, mu)


class NoRegularPlan(RuntimeError):
    pass


def _degenerate_b_nodes(result: Network, B: Sequence[str]) -> list[str]:
    live = ancestors(result, result.scalars)
    return [u for u in B if u not in live]


def plan_regular_modification(net: Network, rho: Nonlinearity, plan0: ModificationPlan) -> ModificationPlan:
    """Shrink C and move orphaned B-nodes into A so the result is regular."""
    base = check_plan(net, plan0, rho)
    if base:
        raise PlanError("; ".join(base))
    a0 = plan0.A[0]
    P = plan0.parents
    group = next(m for ps, _, m in proportional_classes(net) if a0 in m)
    beta = {u: net.edges[(P[0], u)] / plan0.kappa[P[0]] for u in group}
    g_terms = [(beta[u], net.biases[u]) for u in group]
    c_terms = [plan0.term(c)[1:] for c in plan0.C]
    req_a = [group.index(a) for a in plan0.A]
    best_err = None
    for n in range(1, len(plan0.C) + 1):
        for S in combinations(range(len(plan0.C)), n):
            cands = g_terms + [c_terms[i] for i in S]
            req = req_a + [len(group) + j for j in range(n)]
            sym = discover_symmetry(rho, cands, required=req)
            if sym is None:
                continue
            idx = support_indices(sym, cands)
            names = [group[i] if i < len(group) else plan0.C[S[i - len(group)]] for i in idx]
            term_of = dict(zip(names, sym.terms))
            # rescale so α on A matches the original plan
            scale = plan0.term(a0)[0] / term_of[a0][0]
            sym_s = sym.scaled(scale)
            term_of = dict(zip(names, sym_s.terms))
            A = list(plan0.A)
            B = [u for u in names if u in group and u not in A]
            C = [plan0.C[i] for i in S]
            for _ in range(len(group) + 1):
                ordered = AffineSymmetry(sym_s.zeta, [term_of[u] for u in A + B + C])
                plan = plan_from_symmetry(net, A, B, C, ordered)
                errs = check_plan(net, plan, rho)
                if errs:
                    best_err = best_err or errs
                    break
                res = apply_modification(net, plan, rho, check=False, require_irreducible=False)
                orphans = _degenerate_b_nodes(res, B)
                if orphans:
                    A += orphans
                    B = [u for u in B if u not in orphans]
                    continue
                rep = regularity_report(res, rho)
                if rep.regular:
                    if (set(plan.A), set(plan.B), set(plan.C)) == (set(plan0.A), set(plan0.B), set(plan0.C)):
                        return plan0
                    return plan
                best_err = best_err or ["result not regular"]
                break
    raise NoRegularPlan(f"no regular plan found; first violation: {best_err}")
