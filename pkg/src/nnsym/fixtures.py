"""Worked example networks and a few hand-built constructions."""
from __future__ import annotations

from .network import Network, NetworkBuilder
from .nonlinearity import CReLU, Tanh
from .rewrite.modification import ModificationPlan, plan_from_symmetry
from .symmetry import AffineSymmetry, crelu_symmetry


def _io(b: NetworkBuilder) -> NetworkBuilder:
    return b.input("v1", "v2")


def fig3_n1() -> Network:
    b = _io(NetworkBuilder())
    b.node("u1", 0.0, v1=1.0, v2=-1.0)
    b.node("u2", -2.0, v1=2.0, v2=-2.0)
    b.node("w1", 0.0, u1=1.0, u2=4.0)
    b.node("w2", 0.0, u1=2.0, u2=8.0)
    b.output("w1", 1.0).output("w2", -0.5)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": "fig3_n1"}
    return b.build()


def fig3_n2() -> Network:
    b = _io(NetworkBuilder())
    b.node("u2", -2.0, v1=2.0, v2=-2.0)
    b.node("u3", 0.0, v1=2.0, v2=-2.0)
    b.node("u4", -1.0, v1=2.0, v2=-2.0)
    b.node("w1", 0.0, u3=0.5, u4=0.5, u2=4.0)
    b.node("w2", 0.0, u3=1.0, u4=1.0, u2=8.0)
    b.output("w1", 1.0).output("w2", -0.5)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": "fig3_n2"}
    return b.build()


def fig3_n3() -> Network:
    b = _io(NetworkBuilder())
    b.node("u2", -2.0, v1=2.0, v2=-2.0)
    b.node("u3", 0.0, v1=2.0, v2=-2.0)
    b.node("u4", -1.0, v1=2.0, v2=-2.0)
    b.node("w3", -1.0, u3=1.0, u4=1.0, u2=8.0)
    b.output("w3", 0.5)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": "fig3_n3"}
    return b.build()


def fig3_n4() -> Network:
    b = _io(NetworkBuilder())
    b.node("u2", -2.0, v1=2.0, v2=-2.0)
    b.node("u3", 0.0, v1=2.0, v2=-2.0)
    b.node("u5", -0.5, v1=1.0, v2=-1.0)
    b.node("w3", -1.0, u3=1.0, u5=2.0, u2=7.0)
    b.output("w3", 0.5)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": "fig3_n4"}
    return b.build()


def fig3_plans() -> list[ModificationPlan]:
    """The three steps N1 -> N2 -> N3 -> N4."""
    s = crelu_symmetry()
    p1 = plan_from_symmetry(fig3_n1(), ["u1"], [], ["u3", "u4"], s)
    p2 = plan_from_symmetry(fig3_n2(), ["w1", "w2"], [], ["w3"], s.reparam(4.0, 0.0))
    s3 = AffineSymmetry(0.0, [(0.5, 2.0, -1.0), (0.5, 2.0, -2.0), (-1.0, 1.0, -0.5)])
    p3 = plan_from_symmetry(fig3_n3(), ["u4"], ["u2"], ["u5"], s3)
    return [p1, p2, p3]


def fig5_n() -> Network:
    """Mirrored siblings u1, u2: O = tanh(O_u1 + 2 O_u2 + 3) with O_u1 = -O_u2."""
    b = _io(NetworkBuilder())
    b.node("u1", 0.5, v1=1.0, v2=-2.0)
    b.node("u2", -0.5, v1=-1.0, v2=2.0)
    b.node("w", 3.0, u1=1.0, u2=2.0)
    b.output("w", 1.0)
    b.meta = {"nonlinearity": {"kind": "tanh"}, "name": "fig5_n",
              "note": "derived fixture: weights into u1, u2 chosen freely"}
    return b.build()


def fig5_n_prime() -> Network:
    b = _io(NetworkBuilder())
    b.node("u2", -0.5, v1=-1.0, v2=2.0)
    b.node("w", 3.0, u2=1.0)
    b.output("w", 1.0)
    b.meta = {"nonlinearity": {"kind": "tanh"}, "name": "fig5_n_prime",
              "note": "derived fixture"}
    return b.build()


def fig6_n() -> Network:
    """Reduction leaves node g constant (tanh(3)); it folds into the bias 7 of u."""
    b = _io(NetworkBuilder())
    b.node("h1", 0.0, v1=1.0)
    b.node("h2", 0.0, v1=-1.0)
    b.node("g", 3.0, h1=1.0, h2=1.0)
    b.node("u", 7.0, g=1.0, v2=1.0)
    b.output("u", 1.0)
    b.meta = {"nonlinearity": {"kind": "tanh"}, "name": "fig6_n",
              "note": "derived fixture: topology reconstructed"}
    return b.build()


def fig2_network() -> Network:
    """Non-layered and degenerate: lv(u1) = 2 with v2 -> u1, and u2 feeds nothing."""
    b = _io(NetworkBuilder())
    b.node("x", 0.1, v1=1.0)
    b.node("u1", -0.3, x=0.7, v2=1.2)
    b.node("u2", 0.2, v1=-0.4)
    b.node("w1", 0.0, u1=1.5)
    b.node("w2", 0.4, v2=-0.9, x=0.3)
    b.output("w1", 1.0).output("w2", 2.0)
    b.meta = {"nonlinearity": {"kind": "tanh"}, "name": "fig2", "note": "derived fixture"}
    return b.build()


def tanh_mirror_pair() -> Network:
    """tanh(t) + tanh(-t): reduces to the trivial network."""
    b = NetworkBuilder().input("v1")
    b.node("u1", 0.0, v1=1.0).node("u2", 0.0, v1=-1.0)
    b.output("u1", 1.0).output("u2", 1.0)
    b.meta = {"nonlinearity": {"kind": "tanh"}, "name": "tanh_mirror_pair"}
    return b.build()


def crelu_zero_net() -> Network:
    """ρ(ρ(t)) - ρ(t), identically zero for the clipped ReLU."""
    b = NetworkBuilder().input("v1")
    b.node("u1", 0.0, v1=1.0).node("u2", 0.0, u1=1.0)
    b.output("u1", -1.0).output("u2", 1.0)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": "crelu_zero_net"}
    return b.build()


def relu_zero_net(kind: str = "relu") -> Network:
    """ρ(ρ(t)) - ρ(t) = 0 for ReLU and abs."""
    net = crelu_zero_net()
    return net.replace(meta={"nonlinearity": {"kind": kind}, "name": f"{kind}_zero_net"})


def leaky_zero_net(slope: float = 0.1) -> Network:
    """ρ(ρ(t) - ρ(-t)) - (1 + a) ρ(t) = 0 since ρ(t) - ρ(-t) = (1 + a) t."""
    b = NetworkBuilder().input("v1")
    b.node("u1", 0.0, v1=1.0).node("u2", 0.0, v1=-1.0)
    b.node("w", 0.0, u1=1.0, u2=-1.0)
    b.output("w", 1.0).output("u1", -(1.0 + slope))
    b.meta = {"nonlinearity": {"kind": "leaky_relu", "slope": slope}, "name": "leaky_zero_net"}
    return b.build()


def crelu_family(n: int) -> Network:
    """Σ_{p=1}^n 2^{-p} ρ(2^p t - 1) + 2^{-n} ρ(2^n t), which equals ρ(t)."""
    if n < 1:
        raise ValueError("n >= 1")
    b = NetworkBuilder().input("v1")
    for p in range(1, n + 1):
        b.node(f"a{p:02d}", -1.0, v1=2.0 ** p).output(f"a{p:02d}", 2.0 ** -p)
    b.node("b", 0.0, v1=2.0 ** n).output("b", 2.0 ** -n)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": f"crelu_family_{n}"}
    return b.build()


def single_crelu() -> Network:
    b = NetworkBuilder().input("v1")
    b.node("u", 0.0, v1=1.0).output("u", 1.0)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": "single_crelu"}
    return b.build()


def anchor_adversarial() -> Network:
    """Strongly regular CReLU net whose anchoring at v2 is reducible for every a.

    After anchoring, u1 = ρ(t + h(a)) and u2 = ρ(-t + 1 - h(a)), so u1 + u2 = 1.
    """
    b = NetworkBuilder().input("v1", "v2")
    b.node("h1", 0.0, v2=1.0)
    b.node("h2", 0.0, h1=1.0)
    b.node("u1", 0.0, v1=1.0, h1=1.0)
    b.node("u2", 1.0, v1=-1.0, h2=-1.0)
    b.output("u1", 1.0).output("u2", 0.5)
    b.meta = {"nonlinearity": {"kind": "crelu"}, "name": "anchor_adversarial",
              "note": "derived fixture"}
    return b.build()


def orphan_plan_fixture() -> tuple[Network, ModificationPlan]:
    """CReLU net where the naive plan leaves B-node v with no outgoing edge."""
    b = NetworkBuilder().input("x")
    b.node("u", 0.0, x=1.0).node("v", 0.0, x=2.0).node("z", 0.3, x=-1.0)
    b.node("w", 0.0, u=1.0, v=-0.5, z=1.0)
    b.output("w", 1.0)
    net = b.build()
    plan = plan_from_symmetry(net, ["u"], ["v"], ["c1"], crelu_symmetry())
    return net, plan


ALL = {
    "fig3_n1": fig3_n1, "fig3_n2": fig3_n2, "fig3_n3": fig3_n3, "fig3_n4": fig3_n4,
    "fig5_n": fig5_n, "fig5_n_prime": fig5_n_prime, "fig6_n": fig6_n, "fig2": fig2_network,
    "tanh_mirror_pair": tanh_mirror_pair, "crelu_zero_net": crelu_zero_net,
    "relu_zero_net": relu_zero_net, "abs_zero_net": lambda: relu_zero_net("abs"),
    "leaky_zero_net": leaky_zero_net, "crelu_family_3": lambda: crelu_family(3),
    "anchor_adversarial": anchor_adversarial,
}

RHO = {"tanh": Tanh(), "crelu": CReLU()}
