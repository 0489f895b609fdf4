"""Sign-isomorphism and bounded search for chains of regular modifications."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ..network import Network, ancestors, structurally_equal
from ..nonlinearity import CReLU, Nonlinearity, Tanh
from ..symmetry import AffineSymmetry, crelu_reflection, crelu_symmetry
from .modification import ModificationPlan, PlanError, apply_modification, check_plan, plan_from_symmetry
from .reduction import incoming_profile, proportional_classes, regularity_report

ISO_TOL = 1e-10
MAX_NODES = 64


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SignIsomorphism:
    pi: dict
    s: dict

    def to_dict(self):
        return {"pi": dict(sorted(self.pi.items())), "s": dict(sorted(self.s.items()))}


def _near(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def sign_isomorphic(n1: Network, n2: Network, tol: float = ISO_TOL, signs: bool = True,
                    max_nodes: int = MAX_NODES) -> SignIsomorphism | None:
    """Find π, s with ω' = s_u ω s_v, θ' = s θ, λ' = s λ; inputs fixed, s = +1 on inputs.

    With ``signs=False`` this is plain isomorphism up to relabelling.
    """
    if len(n1.nodes) > max_nodes or len(n2.nodes) > max_nodes:
        raise BudgetExceeded(f"sign-isomorphism search limited to {max_nodes} nodes")
    if (n1.dim_out != n2.dim_out or n1.inputs != n2.inputs or len(n1.nodes) != len(n2.nodes)
            or len(n1.edges) != len(n2.edges) or len(n1.scalars) != len(n2.scalars)):
        return None
    if not all(_near(a, b, tol) for a, b in zip(n1.constants, n2.constants)):
        return None

    def sig(n: Network, v: str):
        return (n.levels[v], len(n.parents[v]), len(n.children[v]), v in n.scalars)

    order = sorted(n1.hidden, key=lambda v: (n1.levels[v], v))
    cands = {u: [x for x in n2.hidden if sig(n2, x) == sig(n1, u)] for u in order}
    if any(not c for c in cands.values()):
        return None
    pi = {v: v for v in n1.inputs}
    s = {v: 1.0 for v in n1.inputs}
    used: set[str] = set()

    def fits(u: str, x: str):
        ps = n1.parents[u]
        if sorted(pi[p] for p in ps) != list(n2.parents[x]):
            return None
        p0 = ps[0]
        w1, w2 = n1.edges[(p0, u)], n2.edges[(pi[p0], x)]
        sign = 1.0 if (w1 * s[p0] > 0) == (w2 > 0) else -1.0
        if not signs and sign < 0:
            return None
        for p in ps:
            if not _near(n2.edges[(pi[p], x)], sign * n1.edges[(p, u)] * s[p], tol):
                return None
        if not _near(n2.biases[x], sign * n1.biases[u], tol):
            return None
        if u in n1.scalars:
            if not all(_near(b, sign * a, tol) for a, b in zip(n1.scalars[u], n2.scalars[x])):
                return None
        return sign

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        u = order[i]
        for x in cands[u]:
            if x in used:
                continue
            sg = fits(u, x)
            if sg is None:
                continue
            pi[u], s[u] = x, sg
            used.add(x)
            if rec(i + 1):
                return True
            used.discard(x)
            del pi[u], s[u]
        return False

    if not rec(0):
        return None
    return SignIsomorphism(dict(pi), {u: int(v) for u, v in s.items()})


def apply_sign_map(net: Network, iso: SignIsomorphism) -> Network:
    """The image of ``net`` under (π, s)."""
    pi, s = iso.pi, iso.s
    edges = {(pi[a], pi[b]): s[b] * w * s[a] for (a, b), w in net.edges.items()}
    biases = {pi[v]: s[v] * t for v, t in net.biases.items()}
    scalars = {pi[w]: [s[w] * x for x in l] for w, l in net.scalars.items()}
    return net.replace(nodes={pi[v] for v in net.nodes}, edges=edges, biases=biases, scalars=scalars)


# chains of modifications ------------------------------------------------------

@dataclass
class IsoSearchResult:
    status: str  # "isomorphic", "not-isomorphic" (exact answer), "not-found" (budget)
    chain: list = field(default_factory=list)  # [(plan, network)]
    relabel: dict | None = None  # final network -> target node ids

    @property
    def found(self) -> bool:
        return self.status == "isomorphic"


def _fresh(net: Network, base: str, taken: set[str]) -> str:
    name, i = base, 0
    while name in net.nodes or name in taken:
        i += 1
        name = f"{base}_{i}"
    return name


def _unary_plan(net: Network, u: str, new: str, sign: float) -> ModificationPlan:
    """Rename u to ``new`` (sign +1) or flip its signs (sign -1) via a two-term symmetry."""
    _, beta, _ = incoming_profile(net, u)
    th = net.biases[u]
    sym = AffineSymmetry(0.0, [(1.0, beta, th), (-sign, sign * beta, sign * th)])
    return plan_from_symmetry(net, [u], [], [new], sym)


def _tanh_chain(n1: Network, n2: Network, rho: Nonlinearity, iso: SignIsomorphism):
    chain, cur, pending = [], n1, {}
    for u in sorted(n1.hidden, key=lambda v: (n1.levels[v], v)):
        tgt, sg = iso.pi[u], iso.s[u]
        if tgt == u and sg == 1:
            continue
        new = tgt if tgt not in cur.nodes else _fresh(cur, tgt + "~", set())
        plan = _unary_plan(cur, u, new, sg)
        cur = apply_modification(cur, plan, rho)
        chain.append((plan, cur))
        if new != tgt:
            pending[new] = tgt
    while pending:
        progressed = False
        for tmp, tgt in sorted(pending.items()):
            if tgt in cur.nodes:
                continue
            plan = _unary_plan(cur, tmp, tgt, 1.0)
            cur = apply_modification(cur, plan, rho)
            chain.append((plan, cur))
            del pending[tmp]
            progressed = True
            break
        if not progressed:
            raise RuntimeError("could not resolve renaming cycle")
    return chain, cur


def symmetry_templates(rho: Nonlinearity) -> list[AffineSymmetry]:
    if isinstance(rho, CReLU):
        return [crelu_symmetry(), crelu_reflection()]
    return []


def _profile(net: Network, u: str):
    return (net.parents[u], tuple(round(net.edges[(p, u)], 9) for p in net.parents[u]),
            round(net.biases[u], 9))


def candidate_moves(net: Network, rho: Nonlinearity, target: Network | None = None,
                    regular_only: bool = True) -> Iterator[tuple[float, ModificationPlan, Network]]:
    """Modifications generated from the symmetry templates of ρ (regular ones by default)."""
    target_profiles = set() if target is None else {_profile(target, x) for x in target.hidden}
    moves = []
    for ps, kap, members in proportional_classes(net):
        betas = {u: incoming_profile(net, u)[1] for u in members}
        for ustar in members:
            b0, t0 = betas[ustar], net.biases[ustar]
            for T in symmetry_templates(rho):
                for j, (aj, bj, gj) in enumerate(T.terms):
                    c, d = b0 / bj, (t0 - gj) / bj
                    S = T.reparam(c, d).scaled(1.0 / aj)
                    A, B, C, terms = [ustar], [], [], {ustar: S.terms[j]}
                    taken: set[str] = set()
                    for i, term in enumerate(S.terms):
                        if i == j:
                            continue
                        match = next((m for m in members if m not in terms
                                      and abs(betas[m] - term[1]) <= 1e-9 * max(1, abs(term[1]))
                                      and abs(net.biases[m] - term[2]) <= 1e-9 * max(1, abs(term[2]))), None)
                        if match is not None:
                            B.append(match)
                            terms[match] = term
                        else:
                            name = _fresh(net, "n", taken)
                            taken.add(name)
                            C.append(name)
                            terms[name] = term
                    if not C:
                        continue
                    for _ in range(len(members) + 1):
                        sym = AffineSymmetry(S.zeta, [terms[x] for x in A + B + C])
                        try:
                            plan = plan_from_symmetry(net, A, B, C, sym)
                        except (PlanError, KeyError, ZeroDivisionError):
                            plan = None
                            break
                        if check_plan(net, plan):
                            plan = None
                            break
                        res = apply_modification(net, plan, check=False)
                        live = ancestors(res, res.scalars)
                        orphans = [u for u in B if u not in live]
                        if not orphans:
                            break
                        A += orphans
                        B = [u for u in B if u not in orphans]
                    if plan is None:
                        continue
                    score = sum(_profile(res, x) in target_profiles for x in C) - len(C) + len(A)
                    moves.append((score, plan, res))
    moves.sort(key=lambda m: -m[0])
    for score, plan, res in moves:
        if not regular_only or regularity_report(res, rho).regular:
            yield score, plan, res


def _key(net: Network):
    return tuple(sorted((net.levels[v], round(net.biases.get(v, 0.0), 8),
                         tuple(sorted(round(net.edges[(p, v)], 8) for p in net.parents[v])))
                        for v in net.nodes))


def rho_isomorphic_bounded(n1: Network, n2: Network, rho: Nonlinearity, depth_budget: int = 3) -> IsoSearchResult:
    """Look for a chain of at most ``depth_budget`` regular modifications from n1 to n2.

    The final network of the chain is required to equal n2 up to a relabelling
    of hidden nodes (node ids are handles only). For tanh the question is
    decided exactly by the sign search and the chain is built from it.
    """
    if n1.inputs != n2.inputs or n1.dim_out != n2.dim_out:
        return IsoSearchResult("not-isomorphic")
    if n1.is_trivial() or n2.is_trivial():
        return IsoSearchResult("isomorphic" if n1.is_trivial() and n2.is_trivial() else "not-isomorphic")
    if isinstance(rho, Tanh):
        iso = sign_isomorphic(n1, n2)
        if iso is None:
            return IsoSearchResult("not-isomorphic")
        chain, cur = _tanh_chain(n1, n2, rho, iso)
        if not structurally_equal(cur, n2, 1e-9):
            raise RuntimeError("sign chain did not reproduce the target")
        return IsoSearchResult("isomorphic", chain, {v: v for v in cur.nodes})

    seen = {}

    def dfs(cur: Network, depth: int, chain: list):
        iso = sign_isomorphic(cur, n2, tol=1e-9, signs=False)
        if iso is not None:
            return chain, iso.pi
        if depth == 0:
            return None
        k = _key(cur)
        if seen.get(k, -1) >= depth:
            return None
        seen[k] = depth
        for _, plan, res in candidate_moves(cur, rho, n2):
            found = dfs(res, depth - 1, chain + [(plan, res)])
            if found:
                return found
        return None

    for d in range(depth_budget + 1):
        seen.clear()
        found = dfs(n1, d, [])
        if found:
            chain, relabel = found
            return IsoSearchResult("isomorphic", chain, relabel)
    return IsoSearchResult("not-found")
