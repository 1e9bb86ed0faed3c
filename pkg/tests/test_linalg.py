import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bitcov.errors import NonFinite, NotPSD, ZeroMatrix
from bitcov.linalg import (
    SigmaSpec,
    SymMatrix,
    effective_rank,
    make_sigma,
    max_abs_entry,
    operator_norm,
    psd_clip,
    sampling_factor,
    sym_eigen,
)


def test_make_sigma_small():
    m = make_sigma(SigmaSpec(1, 0.2, 1, 3))
    assert np.array_equal(np.asarray(m), [[1, 0.2, 0.2], [0.2, 1, 0.2], [0.2, 0.2, 1]])


def test_make_sigma_identity():
    assert np.array_equal(np.asarray(make_sigma(SigmaSpec(1, 0, 1, 4))), np.eye(4))


def test_make_sigma_trace_and_structure():
    m = np.asarray(make_sigma(SigmaSpec(1, 0.2, 25, 10)))
    assert np.sum(np.diag(m)) == pytest.approx(34.0)
    assert m.trace() == pytest.approx(25 + 9 * 1)
    assert m[0, 0] == 25 and np.all(np.diag(m)[1:] == 1)
    off = m[~np.eye(10, dtype=bool)]
    assert np.all(off == 0.2)


def test_make_sigma_rejects_indefinite():
    # b > a makes a - b < 0 an eigenvalue of multiplicity d - 1
    with pytest.raises(NotPSD):
        make_sigma(SigmaSpec(1, 2, 1, 4))
    with pytest.raises(ValueError):
        make_sigma(SigmaSpec(1, 0, 1, 0))


def test_symmatrix_symmetrizes_and_is_readonly():
    m = SymMatrix([[1.0, 2.0], [4.0, 1.0]])
    assert np.asarray(m)[0, 1] == np.asarray(m)[1, 0] == 3.0
    with pytest.raises(ValueError):
        np.asarray(m)[0, 0] = 5.0


@pytest.mark.parametrize(
    "m, expected",
    [(np.diag([1.0, 2.0, 3.0]), 3.0), ([[0.0, 1.0], [1.0, 0.0]], 1.0), (np.diag([-5.0, 2.0]), 5.0)],
)
def test_operator_norm_trivial(m, expected):
    assert operator_norm(m) == pytest.approx(expected, rel=1e-12)


def test_operator_norm_sigma_closed_form():
    # top eigenvalue of (a-b)I + b 11^T is a - b + d b
    m = make_sigma(SigmaSpec(1, 0.2, 1, 10))
    assert operator_norm(m) == pytest.approx(0.8 + 10 * 0.2, rel=1e-9)
    assert operator_norm(m) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(np.asarray(m)))), rel=1e-9)


def test_operator_norm_nonfinite():
    with pytest.raises(NonFinite):
        operator_norm([[np.nan, 0.0], [0.0, 1.0]])


def test_effective_rank():
    assert effective_rank(np.eye(7)) == pytest.approx(7.0)
    assert effective_rank(np.diag([10.0, 0, 0, 0])) == pytest.approx(1.0)
    m = make_sigma(SigmaSpec(1, 0.2, 10, 10))
    oracle = np.max(np.linalg.eigvalsh(np.asarray(m)))
    assert effective_rank(m) == pytest.approx(19.0 / oracle, rel=1e-9)
    with pytest.raises(ZeroMatrix):
        effective_rank(np.zeros((3, 3)))


def test_max_abs_entry():
    assert max_abs_entry(make_sigma(SigmaSpec(1, 0.2, 25, 10))) == 25
    assert max_abs_entry(np.zeros((3, 3))) == 0
    assert max_abs_entry([[1, -3], [-3, 2]]) == 3


def test_sym_eigen_trivial():
    w, v = sym_eigen(np.eye(2))
    assert np.allclose(w, [1, 1]) and np.allclose(v.T @ v, np.eye(2))
    w, _ = sym_eigen([[2.0, 0.0], [0.0, 1.0]])
    assert np.array_equal(w, [2.0, 1.0])


def test_sym_eigen_reconstruction(rng):
    for _ in range(20):
        a = rng.standard_normal((20, 20))
        a = a + a.T
        w, v = sym_eigen(a)
        norm = np.max(np.abs(w))
        assert np.all(np.diff(w) <= 0)
        assert np.max(np.abs(v @ np.diag(w) @ v.T - a)) <= 1e-9 * norm
        assert np.max(np.abs(v.T @ v - np.eye(20))) <= 1e-9


def test_sym_eigen_zero_matrix():
    w, v = sym_eigen(np.zeros((4, 4)))
    assert np.array_equal(w, np.zeros(4)) and np.array_equal(v, np.eye(4))


@pytest.mark.parametrize("d", [2, 5, 17])
@pytest.mark.parametrize("a,b", [(1.0, 0.2), (1.0, 0.9), (3.0, -0.1)])
def test_sigma_spectrum_closed_form(a, b, d):
    if a + (d - 1) * b < 0:
        pytest.skip("not PSD")
    w, _ = sym_eigen(make_sigma(SigmaSpec(a, b, a, d)))
    expected = sorted([a - b] * (d - 1) + [a + (d - 1) * b], reverse=True)
    assert np.allclose(w, expected, atol=1e-9)


def test_sampling_factor():
    assert np.allclose(sampling_factor(np.eye(3)) @ sampling_factor(np.eye(3)).T, np.eye(3), atol=1e-12)
    L = sampling_factor(np.diag([4.0, 9.0]))
    assert np.allclose(L @ L.T, np.diag([4.0, 9.0]), atol=1e-8 * 9)
    m = np.asarray(make_sigma(SigmaSpec(1, 0.9, 1, 10)))
    L = sampling_factor(m)
    assert np.max(np.abs(L @ L.T - m)) <= 1e-8 * operator_norm(m)


def test_sampling_factor_clamps_tiny_negative_and_rejects_indefinite():
    m = np.ones((3, 3))  # rank one, eigenvalues 3, 0, 0 up to rounding
    L = sampling_factor(m - 1e-14 * np.eye(3))
    assert np.allclose(L @ L.T, m, atol=1e-8)
    with pytest.raises(NotPSD):
        sampling_factor(np.diag([1.0, -0.1]))


def test_psd_clip():
    c = np.asarray(psd_clip(np.diag([2.0, -1.0])))
    assert np.allclose(c, np.diag([2.0, 0.0]))


sym_arrays = arrays(np.float64, (6, 6), elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(sym_arrays)
def test_psd_norm_bounds(a):
    m = a @ a.T
    if not np.any(m):
        return
    norm = operator_norm(m)
    assert norm >= max_abs_entry(m) * (1 - 1e-12)
    r = effective_rank(m)
    assert 1 - 1e-9 <= r <= 6 + 1e-9


@settings(max_examples=60, deadline=None)
@given(sym_arrays)
def test_operator_norm_matches_reference(a):
    m = a + a.T
    assert operator_norm(m) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(m))), rel=1e-9, abs=1e-12)
