"""Kernel-level checks: singular values, norms, shifted solves."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ginlab.linalg import (
    NumericalError,
    SingularMatrixError,
    eig_extreme_hermitian,
    eigenvalues,
    hermitian_part,
    matpoly_eval,
    operator_norm,
    shifted_solve,
    sigma_min,
)


def _random_complex(n, m, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


@pytest.mark.parametrize("seed", range(5))
def test_sigma_min_matches_svd(seed):
    a = _random_complex(40, 40, seed)
    expected = np.linalg.svd(a, compute_uv=False)[-1]
    assert sigma_min(a) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("seed", range(3))
def test_sigma_min_inverse_iteration_agrees_with_dense(seed):
    a = _random_complex(80, 80, seed)
    dense = sigma_min(a, method="svd")
    iterative = sigma_min(a, method="inverse")
    assert iterative == pytest.approx(dense, rel=1e-8)


def test_sigma_min_exactly_singular():
    a = np.ones((6, 6), dtype=complex)
    assert sigma_min(a, method="inverse") == 0.0
    assert sigma_min(a, method="svd") == pytest.approx(0.0, abs=1e-12)


def test_sigma_min_rejects_bad_method():
    with pytest.raises(ValueError):
        sigma_min(np.eye(3), method="qr")


@pytest.mark.parametrize("shape", [(30, 30), (20, 35), (35, 20)])
def test_operator_norm_matches_numpy(shape):
    a = _random_complex(*shape, seed=7)
    assert operator_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)


def test_operator_norm_iterative_path():
    # Above the dense cutoff the norm comes from a Lanczos solve on A*A.
    a = _random_complex(600, 600, 1)
    assert operator_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-8)


def test_eigenvalues_diagonal():
    d = np.array([1.0 + 2j, -0.5, 3j])
    w = eigenvalues(np.diag(d))
    assert sorted(w, key=abs) == pytest.approx(sorted(d, key=abs))


def test_eig_extreme_hermitian_known_spectrum():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(_random_complex(12, 12, 3))
    d = np.sort(rng.uniform(-5.0, 5.0, 12))
    h = q @ np.diag(d) @ q.conj().T
    lo, hi = eig_extreme_hermitian(h)
    assert lo == pytest.approx(d[0], abs=1e-10)
    assert hi == pytest.approx(d[-1], abs=1e-10)


def test_eig_extreme_hermitian_rejects_nonhermitian():
    with pytest.raises(ValueError):
        eig_extreme_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_part_is_hermitian():
    a = _random_complex(9, 9, 5)
    h = hermitian_part(a)
    assert np.array_equal(h, h.conj().T)
    np.testing.assert_allclose(h, (a + a.conj().T) / 2.0, rtol=0, atol=1e-15)


def test_shifted_solve_vector_and_matrix():
    a = _random_complex(25, 25, 11)
    z = 9.0 + 1.0j  # far outside the spectrum
    b = _random_complex(25, 1, 12)[:, 0]
    x = shifted_solve(a, z, b)
    np.testing.assert_allclose((z * np.eye(25) - a) @ x, b, atol=1e-10)
    bm = _random_complex(25, 3, 13)
    xm = shifted_solve(a, z, bm)
    np.testing.assert_allclose((z * np.eye(25) - a) @ xm, bm, atol=1e-10)


def test_shifted_solve_at_eigenvalue_raises():
    a = np.diag([1.0, 2.0, 3.0]).astype(complex)
    with pytest.raises(SingularMatrixError) as err:
        shifted_solve(a, 2.0, np.ones(3))
    assert err.value.sigma_min_estimate >= 0.0


def test_shifted_solve_noncontiguous_rhs():
    a = _random_complex(10, 10, 2)
    b = _random_complex(10, 10, 3).T  # transposed view, not C-contiguous
    x = shifted_solve(a, 5.0, b)
    np.testing.assert_allclose((5.0 * np.eye(10) - a) @ x, b, atol=1e-10)


def test_matpoly_eval_diagonal_oracle():
    d = np.array([0.3, -0.7 + 0.2j, 1.1])
    roots = [0.5, -0.25j]
    out = matpoly_eval(np.diag(d), roots, scale=2.0)
    expected = 2.0 * (d - 0.5) * (d + 0.25j)
    np.testing.assert_allclose(np.diag(out), expected, atol=1e-14)
    # off-diagonal stays exactly zero for diagonal input
    assert np.all(out[~np.eye(3, dtype=bool)] == 0.0)


def test_matpoly_empty_roots_is_scaled_identity():
    out = matpoly_eval(np.eye(4), [], scale=3.0)
    np.testing.assert_array_equal(out, 3.0 * np.eye(4))


@pytest.mark.parametrize(
    "bad",
    [np.ones((3, 2)), np.array([[np.nan, 0], [0, 1]]), np.zeros((0, 0))],
    ids=["rectangular", "nan", "empty"],
)
def test_square_input_validation(bad):
    with pytest.raises(ValueError):
        eigenvalues(bad)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_sigma_min_below_operator_norm(seed):
    a = _random_complex(12, 12, seed)
    assert sigma_min(a) <= operator_norm(a) + 1e-12


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.complex_numbers(max_magnitude=50.0, allow_nan=False, allow_infinity=False),
)
def test_shifted_solve_residual_small(seed, z):
    a = _random_complex(8, 8, seed)
    b = _random_complex(8, 1, seed + 1)[:, 0]
    try:
        x = shifted_solve(a, z, b)
    except SingularMatrixError:
        return  # shift collided with the spectrum; nothing to verify
    resid = (z * np.eye(8) - a) @ x - b
    scale = max(1.0, abs(z)) * max(1.0, np.linalg.norm(x))
    assert np.linalg.norm(resid) <= 1e-8 * scale
