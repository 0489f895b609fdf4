import numpy as np
import pytest

pytestmark = pytest.mark.filterwarnings("ignore:characteristic root:RuntimeWarning")

from nnsym.nonlinearity import CReLU, Tanh
from nnsym.symmetry import (AffineSymmetry, construct_exotic, crelu_reflection, crelu_symmetry, discover_symmetry,
                            residual, residue_of_combination, sample_grid, support_indices,
                            tanh_symmetry_catalog, verify_symmetry)


def test_tanh_odd_pair_minimal():
    chk = verify_symmetry(Tanh(), AffineSymmetry(0, [(1, 1, 0), (1, -1, 0)]))
    assert chk.holds and chk.minimal


def test_crelu_three_term_minimal():
    chk = verify_symmetry(CReLU(), crelu_symmetry())
    assert chk.holds and chk.minimal
    assert verify_symmetry(CReLU(), crelu_reflection()).holds


def test_union_not_minimal():
    s = AffineSymmetry(0, [(1, 1, 0), (1, -1, 0), (1, 2, 0), (1, -2, 0)])
    chk = verify_symmetry(Tanh(), s)
    assert chk.holds and not chk.minimal


def test_broken_symmetry_fails():
    chk = verify_symmetry(Tanh(), AffineSymmetry(0, [(1, 1, 0), (1, -1, 0.01)]))
    assert not chk.holds and chk.max_residual > 1e-3


@pytest.mark.parametrize("abg", [(1, 1, 0), (2.5, -0.7, 1.3), (-0.3, 4, -2)])
def test_catalog_holds(abg):
    cat = tanh_symmetry_catalog(abg[1], abg[2], abg[0])
    assert len(cat) == 2
    for s in cat:
        assert verify_symmetry(Tanh(), s).holds


def test_discover_tanh_pair():
    s = discover_symmetry(Tanh(), [(1, 0), (-1, 0)])
    assert s is not None and abs(s.zeta) < 1e-10
    a = s.alphas
    assert abs(a[0] - a[1]) < 1e-10 * abs(a[0])


def test_discover_none():
    assert discover_symmetry(Tanh(), [(1, 0), (2, 1)]) is None
    assert discover_symmetry(Tanh(), []) is None


def test_discover_crelu():
    cands = [(1, 0), (2, 0), (2, -1)]
    s = discover_symmetry(CReLU(), cands)
    assert support_indices(s, cands) == [0, 1, 2]
    a = s.alphas / s.alphas[0]
    assert np.allclose(a, [1, -0.5, -0.5], atol=1e-10)


def test_discover_required_support():
    cands = [(3, 1), (1, 0), (-1, 0), (2, 0.5)]
    s = discover_symmetry(Tanh(), cands, required=1)
    assert s is not None and sorted(support_indices(s, cands)) == [1, 2]
    assert discover_symmetry(Tanh(), cands, required=0) is None


def test_exotic_alternating():
    ex = construct_exotic([1, 1])
    r = ex.sigma.coeffs
    assert all(abs(r[k] - (-1) ** k * r[0]) < 1e-12 for k in range(-5, 6))
    vals = sum(a * ex.sigma(b * sample_grid() + g) for a, b, g in ex.symmetry.terms)
    assert np.var(vals) < 1e-8


def test_exotic_residues_cancel():
    ex = construct_exotic([1, 1])
    for k in range(-3, 4):
        for m in (-1, 0, 2):
            p = k + 1j * ex.b * (m + 0.5)
            assert abs(residue_of_combination(ex.sigma, ex.symmetry.terms, p)) < 1e-10


def test_exotic_three_terms_verifies():
    ex = construct_exotic([2, -3, 1])
    assert verify_symmetry(ex.sigma, ex.symmetry, tol=1e-6).holds


def test_exotic_rejects_zero_alpha():
    with pytest.raises(ValueError):
        construct_exotic([1, 0])


def test_residue_combination():
    t = Tanh()
    p = 0.5j * np.pi
    assert residue_of_combination(t, [(2.0, 1, 0)], p) == 2.0
    assert residue_of_combination(t, [(1, 1, 0), (-1, 1, 0)], p) == 0


def test_symmetry_transforms():
    s = crelu_symmetry()
    assert residual(CReLU(), s.scaled(3.0)) < 1e-14
    assert residual(CReLU(), s.reparam(0.5, 0.25)) < 1e-14
    assert AffineSymmetry.from_dict(s.to_dict()) == s
