import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nnsym.complexan import (LineSpec, PointCloud, alignment_partition, arithmetic_points, cluster_depth_eps,
                             cluster_level, density_along, density_trend, empirical_cluster_vs_depth,
                             poles_in_window, rational_ratio, single_layer_pole_check)
from nnsym.generators import NetSpec, random_regular
from nnsym.nonlinearity import Tanh
from nnsym.symmetry import construct_exotic

pytestmark = pytest.mark.filterwarnings("ignore:characteristic root:RuntimeWarning")


def test_single_tanh_six_poles():
    cloud = poles_in_window(Tanh(), [(1, 1, 0)], 10)
    assert len(cloud) == 6
    want = sorted(math.pi * (k + 0.5) for k in range(-3, 3))
    assert np.allclose(sorted(p.imag for p in cloud.points), want)
    assert all(abs(p.real) < 1e-15 for p in cloud.points)
    assert np.allclose(cloud.residues, 1)


def test_cancelled_pair_empty():
    assert len(poles_in_window(Tanh(), [(1, 1, 0), (-1, 1, 0)], 10)) == 0
    assert len(poles_in_window(Tanh(), [(1, 1, 0.3), (1, -1, -0.3)], 10)) == 0


def test_exotic_combination_entire():
    ex = construct_exotic([1, 1])
    assert len(poles_in_window(ex.sigma, ex.symmetry.terms, 5.0)) == 0


def test_cloud_io():
    c = poles_in_window(Tanh(), [(1, 2, 0.5), (0.3, 1, 0)], 6)
    assert PointCloud.from_dict(c.to_dict()) == c
    rows = c.to_csv().splitlines()
    assert rows[0] == "re,im,residue_re,residue_im" and len(rows) == len(c) + 1
    with pytest.raises(ValueError):
        PointCloud((1 + 1j,), 1.0)
    with pytest.raises(ValueError):
        PointCloud((complex(np.nan, 0),), 1.0)


def test_cluster_empty_and_separated():
    assert cluster_depth_eps(np.array([], dtype=complex)).depth == 0
    grid = np.array([complex(i, j) for i in range(5) for j in range(5)])
    assert cluster_depth_eps(grid, [0.4, 0.2, 0.1]).depth == 1


def test_cluster_harmonic_sequence():
    pts = np.concatenate([1.0 / np.arange(1, 1001), [0.0]]).astype(complex)
    cd = cluster_depth_eps(pts)
    assert cd.depth == 2 and cd.stable


def test_cluster_level_representative():
    pts = np.array([0.02, 0.0, 0.01, 5.0], dtype=complex)
    assert list(cluster_level(pts, 0.05)) == [0.0]


def test_cluster_schedule_validation():
    with pytest.raises(ValueError):
        cluster_depth_eps(np.zeros(3, dtype=complex), [0.1, 0.2])


def test_density_integers():
    pts = arithmetic_points(0, 1, 100)
    assert len(pts) == 201
    assert density_along(LineSpec(0, 1), pts, 0.1, 100) == pytest.approx(1.005, abs=1e-12)
    assert density_along(LineSpec(0, 1), [], 0.1, 100) == 0.0


def test_density_trend_irrational():
    tr = density_trend(lambda N: arithmetic_points(0, 1, N), lambda N: arithmetic_points(0.5, math.sqrt(2), N),
                       [1e2, 1e3, 1e4], lambda N: N ** -0.5)
    d = [x[2] for x in tr]
    assert d[0] > d[1] > d[2]


def test_rational_ratio():
    assert rational_ratio(2.0) == 2
    assert rational_ratio(0.75 + 0j) == pytest.approx(0.75)
    assert rational_ratio(math.sqrt(2)) is None and rational_ratio(math.pi) is None
    assert rational_ratio(123457 / 999983) == Fraction(123457, 999983)
    assert rational_ratio(1 + 1e-3j) is None


def test_partition_ratio_three_aligns():
    # tanh lattices iπ(ℤ+½) and (iπ/3)(ℤ+½) meet; ratio 2 lattices do not
    p = alignment_partition(Tanh(), [(1, 1, 0), (1, 3, 0), (1, 2, 0)])
    assert p.parts == ((0, 1), (2,))


def test_partition_irrational_separate():
    p = alignment_partition(Tanh(), [(1, 1, 0), (1, math.sqrt(2), 0)])
    assert p.parts == ((0,), (1,))


def test_partition_single_term():
    p = alignment_partition(Tanh(), [(1, 1, 0)])
    assert p.parts == ((0,),) and p.entire == (False,)


def test_partition_entire_flag():
    p = alignment_partition(Tanh(), [(1, 1, 0), (-1, 1, 0), (1, math.sqrt(3), 0.2)])
    assert p.parts == ((0, 1), (2,)) and p.entire == (True, False)


def test_single_layer_pole_check(rng):
    for _ in range(5):
        net = random_regular(rng, Tanh(), NetSpec(n_inputs=1, layers=(3,)))
        r = single_layer_pole_check(net)
        assert r.nonempty and r.confirmed


def test_depth_scan_single_layer():
    net = random_regular(np.random.default_rng(1), Tanh(), NetSpec(n_inputs=1, layers=(2,)))
    r = empirical_cluster_vs_depth(net)
    assert r.network_depth == 1 and r.matches_L
    with pytest.raises(ValueError):
        empirical_cluster_vs_depth(random_regular(np.random.default_rng(1), Tanh(), NetSpec(n_inputs=2, layers=(2,))))


@given(st.integers(0, 10_000), st.floats(0.01, 0.5), st.floats(0.01, 0.5))
def test_density_monotone_in_eps(seed, e1, e2):
    rng = np.random.default_rng(seed)
    P = rng.uniform(-20, 20, 200) + 1j * rng.normal(0, 0.3, 200)
    lo, hi = sorted((e1, e2))
    assert density_along(LineSpec(0, 1), P, lo, 20) <= density_along(LineSpec(0, 1), P, hi, 20)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_cluster_depth_of_union_is_max(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(0, 0.01, 30) + 1j * rng.normal(0, 0.01, 30)
    b = 50 + rng.uniform(-3, 3, 10) + 1j * rng.uniform(-3, 3, 10)
    sched = [0.1, 0.05]
    da, db = cluster_depth_eps(a, sched).depth, cluster_depth_eps(b, sched).depth
    assert cluster_depth_eps(np.concatenate([a, b]), sched).depth == max(da, db)


@given(st.lists(st.tuples(st.floats(-2, 2), st.floats(0.3, 3), st.floats(-2, 2)), min_size=1, max_size=4))
def test_pruning_consistent(terms):
    from nnsym.symmetry import residue_of_combination
    c = poles_in_window(Tanh(), terms, 8.0)
    for p, r in zip(c.points, c.residues):
        assert abs(r) >= 1e-10
        assert abs(residue_of_combination(Tanh(), terms, p) - r) < 1e-9


def test_scan_window_grows_for_small_weights():
    from nnsym.network import NetworkBuilder
    b = NetworkBuilder().input("x").node("u", -1.2, x=0.15).node("w", 0.7, x=-0.15)
    net = b.output("u", 0.7).output("w", 1.4).build()
    r = empirical_cluster_vs_depth(net)
    assert len(r.sampled_singularities) > 0 and r.matches_L
