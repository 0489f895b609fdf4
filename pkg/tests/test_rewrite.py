import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nnsym import fixtures
from nnsym.generators import NetSpec, random_plan, random_regular
from nnsym.network import NetworkBuilder, is_non_degenerate, structurally_equal, trivial
from nnsym.nonlinearity import CReLU, Tanh
from nnsym.rewrite import (RewriteLog, anchor_input, anchor_search, apply_modification, apply_reduction,
                           apply_sign_map, check_plan, default_samples, eval_map, find_reduction,
                           invert_modification, map_deviation, plan_from_symmetry, plan_regular_modification,
                           reduce_to_regular, regularity_report, rho_isomorphic_bounded, sign_isomorphic,
                           zero_map_probe)
from nnsym.rewrite.isomorphism import SignIsomorphism
from nnsym.symmetry import AffineSymmetry, crelu_symmetry

pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def crelu_siblings():
    b = NetworkBuilder().input("x", "y")
    b.node("a", 0.0, x=1.0, y=0.5).node("b", 0.0, x=2.0, y=1.0).node("c", -1.0, x=2.0, y=1.0)
    b.output("a", 1.0).output("b", 0.3).output("c", -0.7)
    return b.build()


# reduction -------------------------------------------------------------------

def test_fig5_witness():
    w = find_reduction(fixtures.fig5_n(), Tanh())
    assert w is not None and set(w.U) == {"u1", "u2"}


def test_single_neuron_irreducible():
    b = NetworkBuilder().input("x").node("u", 0.2, x=1.5).output("u", 2.0)
    assert find_reduction(b.build(), Tanh()) is None


def test_crelu_siblings_witness():
    w = find_reduction(crelu_siblings(), CReLU())
    assert w is not None and set(w.U) == {"a", "b", "c"}


def test_fig5_one_step():
    net = fixtures.fig5_n()
    out = apply_reduction(net, find_reduction(net, Tanh()), Tanh())
    assert structurally_equal(out, fixtures.fig5_n_prime(), 1e-12)
    assert map_deviation(net, out, Tanh()) < 1e-12


def test_fig6_bias():
    out = reduce_to_regular(fixtures.fig6_n(), Tanh())
    assert abs(out.biases["u"] - (7 + np.tanh(3))) < 1e-12


def test_mirror_pair_trivial():
    assert reduce_to_regular(fixtures.tanh_mirror_pair(), Tanh()).is_trivial()


def test_reduce_fixed_point():
    net = fixtures.fig5_n_prime()
    assert structurally_equal(reduce_to_regular(net, Tanh()), net, 0.0)


def test_reduction_preserves_map():
    net = crelu_siblings()
    out = reduce_to_regular(net, CReLU())
    assert regularity_report(out, CReLU()).regular
    assert map_deviation(net, out, CReLU()) < 1e-12


# modification ----------------------------------------------------------------

@pytest.mark.parametrize("i", [0, 1, 2])
def test_fig3_steps(i):
    nets = [fixtures.fig3_n1(), fixtures.fig3_n2(), fixtures.fig3_n3(), fixtures.fig3_n4()]
    plan = fixtures.fig3_plans()[i]
    out = apply_modification(nets[i], plan, CReLU())
    assert map_deviation(out, nets[i + 1], CReLU()) < 1e-12
    assert regularity_report(out, CReLU()).regular
    assert plan_regular_modification(nets[i], CReLU(), plan) == plan


def test_fig3_inverse():
    n1, n2 = fixtures.fig3_n1(), fixtures.fig3_n2()
    plan = fixtures.fig3_plans()[0]
    back = apply_modification(n2, invert_modification(n1, plan), CReLU())
    assert structurally_equal(back, n1, 1e-12)


def test_tanh_odd_plan_is_sign_flip():
    b = NetworkBuilder().input("x").node("u", 0.4, x=1.5).node("w", 0.1, u=2.0).output("w", 1.0)
    net = b.build()
    sym = AffineSymmetry(0.0, [(1.0, 1.0, 0.4), (1.0, -1.0, -0.4)])
    out = apply_modification(net, plan_from_symmetry(net, ["u"], [], ["u2"], sym), Tanh())
    flip = apply_sign_map(net, SignIsomorphism({"x": "x", "u": "u2", "w": "w"}, {"x": 1, "u": -1, "w": 1}))
    assert structurally_equal(out, flip, 1e-12)


def test_orphan_plan_moves_b_into_a():
    net, plan = fixtures.orphan_plan_fixture()
    naive = apply_modification(net, plan, CReLU())
    assert not is_non_degenerate(naive)
    fixed = plan_regular_modification(net, CReLU(), plan)
    assert "v" in fixed.A
    out = apply_modification(net, fixed, CReLU())
    assert is_non_degenerate(out) and map_deviation(net, out, CReLU()) < 1e-12


def test_check_plan_rejects_bad_symmetry():
    net = fixtures.fig3_n1()
    bad = AffineSymmetry(0.0, [(1.0, 1.0, 0.0), (-0.5, 2.0, 0.0), (-0.5, 2.0, -0.9)])
    assert check_plan(net, plan_from_symmetry(net, ["u1"], [], ["u3", "u4"], bad), CReLU())


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.sampled_from(["tanh", "crelu"]))
def test_modification_round_trip(seed, kind):
    rng = np.random.default_rng(seed)
    rho = Tanh() if kind == "tanh" else CReLU()
    net = random_regular(rng, rho, NetSpec(n_inputs=2, layers=(3, 2), twin_prob=0.3 if kind == "crelu" else 0.0))
    plan = random_plan(rng, net, rho)
    out = apply_modification(net, plan, rho, require_irreducible=False)
    assert map_deviation(net, out, rho) < 1e-9
    back = apply_modification(out, invert_modification(net, plan, out), rho, require_irreducible=False)
    assert structurally_equal(back, net, 1e-9)


# isomorphism -----------------------------------------------------------------

def test_sign_iso_identity(rng):
    net = random_regular(rng, Tanh(), NetSpec(layers=(3, 2)))
    iso = sign_isomorphic(net, net)
    assert all(iso.pi[v] == v for v in net.nodes) and set(iso.s.values()) == {1}


def test_sign_iso_single_flip():
    b = NetworkBuilder().input("x").node("u", 0.4, x=1.5).node("w", 0.1, u=2.0).output("w", 1.0)
    net = b.build()
    flip = net.replace(edges={("x", "u"): -1.5, ("u", "w"): -2.0}, biases={"u": -0.4, "w": 0.1})
    iso = sign_isomorphic(net, flip)
    assert iso.s == {"x": 1, "u": -1, "w": 1}
    assert sign_isomorphic(net, net.replace(biases={"u": 0.5, "w": 0.1})) is None


def test_rho_iso_fig3_chain():
    r = rho_isomorphic_bounded(fixtures.fig3_n1(), fixtures.fig3_n4(), CReLU(), 3)
    assert r.found and len(r.chain) <= 3


def test_rho_iso_trivial():
    t = trivial(["v1"])
    assert rho_isomorphic_bounded(t, t, CReLU()).found
    assert rho_isomorphic_bounded(t, t, CReLU()).chain == []
    assert rho_isomorphic_bounded(t, fixtures.single_crelu(), CReLU()).status == "not-isomorphic"


# anchoring and probing -------------------------------------------------------

def test_anchor_leaf_input():
    b = NetworkBuilder().input("x", "y").node("u", 0.2, x=1.0).output("u", 1.0)
    net = b.build()
    out = anchor_input(net, Tanh(), "y", 1.7)
    assert out.nodes == net.nodes - {"y"} and out.edges == net.edges and out.biases == net.biases


def test_anchor_folds_constants():
    b = NetworkBuilder().input("x", "y").node("h", 0.5, y=2.0).node("u", 0.1, x=1.0, h=3.0)
    net = b.output("u", 1.0).output("h", 2.0).build()
    out = anchor_input(net, Tanh(), "y", 0.25)
    h = np.tanh(1.0)
    assert abs(out.biases["u"] - (0.1 + 3 * h)) < 1e-15 and abs(out.constants[0] - 2 * h) < 1e-15
    t = np.linspace(-2, 2, 9)
    full = eval_map(net, Tanh(), np.column_stack([t, np.full_like(t, 0.25)]))
    assert np.allclose(eval_map(out, Tanh(), t[:, None]), full, atol=1e-14)


def test_anchor_search_first_sample():
    b = NetworkBuilder().input("x", "y").node("u", 0.2, x=1.0, y=1.0).output("u", 1.0)
    r = anchor_search(b.build(), Tanh(), "y", [0.3, 0.7])
    assert r.a == 0.3 and r.tried == 1


def test_anchor_adversarial_exhausted():
    r = anchor_search(fixtures.anchor_adversarial(), CReLU(), "v2", default_samples())
    assert r.exhausted and r.tried == 32


def test_zero_probe():
    assert zero_map_probe(trivial(["v1"]), Tanh()).verdict == "zero-on-grid"
    assert zero_map_probe(fixtures.crelu_zero_net(), CReLU()).verdict == "zero-on-grid"
    assert zero_map_probe(fixtures.fig5_n_prime(), Tanh()).verdict == "nonzero"


def test_eval_examples():
    assert np.allclose(eval_map(fixtures.fig3_n1(), CReLU(), [1.0, 0.0]), [0.5])
    assert np.array_equal(eval_map(trivial(["v1", "v2"]), Tanh(), [3.0, 4.0]), [0.0])


def test_rewrite_log(tmp_path):
    path = tmp_path / "log.jsonl"
    log = RewriteLog(path)
    net = fixtures.fig5_n()
    out = reduce_to_regular(net, Tanh())
    rec = log.add("reduce", [net], out)
    assert rec["result-hash"] == out.content_hash() and rec["inputs"] == [net.content_hash()]
    log.add("reduce", [out], out)
    assert RewriteLog.read(path) == log.records
    assert all(set(json.loads(x)) == {"op", "inputs", "result-hash"} for x in path.read_text().splitlines())
