"""Dense complex linear algebra kernels shared by the rest of the package.

Everything here operates on plain ``numpy`` arrays with dtype complex128.
LAPACK (through numpy/scipy) supplies the dense factorizations; the iterative
paths for large matrices are thin wrappers that keep results deterministic by
using fixed starting vectors.
"""

from __future__ import annotations

import math
import warnings
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

__all__ = [
    "SingularMatrixError",
    "NumericalError",
    "sigma_min",
    "operator_norm",
    "eigenvalues",
    "eig_extreme_hermitian",
    "hermitian_part",
    "shifted_solve",
    "matpoly_eval",
]

# Dense SVD below this order; inverse iteration on the factored matrix above.
_DENSE_SIGMA_MIN_MAX = 500
_DENSE_NORM_MAX = 512
_MAX_EIG_ORDER = 4000
_RCOND_FLOOR = 1e-14
_ITER_CAP = 5000


class SingularMatrixError(ArithmeticError):
    """A shifted matrix was numerically singular.

    Carries ``sigma_min_estimate``, a cheap order-of-magnitude estimate of the
    smallest singular value (accurate to a factor of the matrix order).
    """

    def __init__(self, message: str, sigma_min_estimate: float):
        super().__init__(message)
        self.sigma_min_estimate = sigma_min_estimate


class NumericalError(RuntimeError):
    """An iterative or dense kernel failed to converge."""


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and coerce input to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be 2-D with positive dimensions, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _as_square(a, name: str = "matrix") -> np.ndarray:
    m = _as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def _as_vector(b, n: int | None = None, name: str = "vector") -> np.ndarray:
    v = np.asarray(b, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be 1-D and nonempty, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    if n is not None and v.size != n:
        raise ValueError(f"{name} has length {v.size}, expected {n}")
    return v


def _start_vector(n: int) -> np.ndarray:
    # Deterministic, generically non-orthogonal to any fixed eigenvector.
    v = np.ones(n, dtype=np.complex128)
    v[:: 2] += 0.5j
    return v / np.linalg.norm(v)


def sigma_min(a, tol: float = 1e-10, method: str = "auto") -> float:
    """Smallest singular value of ``a``.

    Small matrices go through a full SVD.  Larger ones are handled by inverse
    power iteration on the normal equations, reusing a single LU
    factorization; if the iteration stagnates the dense path is used as a
    fallback.  Accuracy is ``tol`` relative (absolute near zero).

    ``method`` may force ``"svd"`` or ``"inverse"``; the default dispatches on
    the matrix order.
    """
    m = _as_square(a)
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    if method not in ("auto", "svd", "inverse"):
        raise ValueError(f"unknown method {method!r}")
    n = m.shape[0]
    if method == "svd" or (method == "auto" and n <= _DENSE_SIGMA_MIN_MAX):
        return float(np.linalg.svd(m, compute_uv=False)[-1])
    return _sigma_min_inverse(m, tol)


def _sigma_min_inverse(m: np.ndarray, tol: float) -> float:
    n = m.shape[0]
    with warnings.catch_warnings():
        # A zero pivot is a legitimate outcome here, not a caller mistake.
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(m, check_finite=False)
    if not np.all(np.abs(np.diag(lu)) > 0.0):
        # Exact zero pivot: singular to working precision.
        return 0.0
    v = _start_vector(n)
    rho_prev = 0.0
    for it in range(_ITER_CAP):
        u = sla.lu_solve((lu, piv), v, trans=2, check_finite=False)
        w = sla.lu_solve((lu, piv), u, trans=0, check_finite=False)
        rho = float(np.linalg.norm(w))
        if not math.isfinite(rho) or rho == 0.0:
            return 0.0
        v = w / rho
        # rho -> 1/sigma_min^2; halve the tolerance for the square root.
        if it >= 2 and abs(rho - rho_prev) <= 0.5 * tol * rho:
            return 1.0 / math.sqrt(rho)
        rho_prev = rho
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def operator_norm(a, tol: float = 1e-10) -> float:
    """Largest singular value (spectral norm) of ``a``."""
    m = _as_matrix(a)
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    if min(m.shape) <= _DENSE_NORM_MAX or m.shape[0] != m.shape[1]:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    if not m.any():
        return 0.0
    n = m.shape[1]
    mh = m.conj().T
    op = spla.LinearOperator((n, n), matvec=lambda w: mh @ (m @ w), dtype=np.complex128)
    try:
        lam = spla.eigsh(
            op, k=1, which="LA", v0=_start_vector(n), tol=tol, maxiter=_ITER_CAP,
            return_eigenvectors=False,
        )[0]
        if lam > 0.0:
            return float(math.sqrt(lam))
    except spla.ArpackError:
        pass
    return float(np.linalg.svd(m, compute_uv=False)[0])


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a square matrix, in LAPACK order.

    Uses the standard Hessenberg reduction followed by implicitly shifted QR.
    """
    m = _as_square(a)
    if m.shape[0] > _MAX_EIG_ORDER:
        raise ValueError(f"matrix order {m.shape[0]} exceeds supported maximum {_MAX_EIG_ORDER}")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed to converge: {exc}") from exc


def eig_extreme_hermitian(h) -> tuple[float, float]:
    """Extreme eigenvalues ``(lambda_min, lambda_max)`` of a Hermitian matrix.

    The input must be Hermitian to within 1e-12 relative in Frobenius norm;
    it is symmetrized before the solve so roundoff asymmetry is harmless.
    """
    m = _as_square(h, "hermitian matrix")
    scale = float(np.linalg.norm(m))
    if float(np.linalg.norm(m - m.conj().T)) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix is not Hermitian within tolerance")
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return float(w[0]), float(w[-1])


def _hermitian_lambda_max(h: np.ndarray, tol: float = 1e-11) -> float:
    """Largest eigenvalue of an (exactly) Hermitian matrix, fast path.

    Lanczos with a fixed start vector for large orders, dense otherwise.
    Callers are responsible for symmetrizing.
    """
    n = h.shape[0]
    if n <= 256:
        return float(np.linalg.eigvalsh(h)[-1])
    try:
        lam = spla.eigsh(
            h, k=1, which="LA", v0=_start_vector(n), tol=tol, maxiter=_ITER_CAP,
            return_eigenvectors=False,
        )[0]
        return float(lam)
    except spla.ArpackError:
        return float(np.linalg.eigvalsh(h)[-1])


def hermitian_part(a) -> np.ndarray:
    """Hermitian part ``(A + A*)/2``."""
    m = _as_square(a)
    return 0.5 * (m + m.conj().T)


def shifted_solve(a, z: complex, b) -> np.ndarray:
    """Solve ``(z I - A) X = B`` with LU and partial pivoting.

    ``B`` may be a vector or a matrix.  Raises :class:`SingularMatrixError`
    when the shifted matrix is numerically singular (reciprocal condition
    estimate below 1e-14), carrying a smallest-singular-value estimate.
    """
    m = _as_square(a)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("shift must be finite")
    rhs = np.asarray(b, dtype=np.complex128)
    vector_rhs = rhs.ndim == 1
    if vector_rhs:
        rhs = _as_vector(rhs, m.shape[0], "right-hand side")
    else:
        rhs = _as_matrix(rhs, "right-hand side")
        if rhs.shape[0] != m.shape[0]:
            raise ValueError(
                f"right-hand side has {rhs.shape[0]} rows, expected {m.shape[0]}"
            )
    shifted = z * np.eye(m.shape[0], dtype=np.complex128) - m
    anorm = float(np.linalg.norm(shifted, 1))
    lu, piv, info = sla.lapack.zgetrf(shifted)
    if info > 0:
        raise SingularMatrixError(
            f"shifted matrix singular at z={z}", sigma_min_estimate=0.0
        )
    rcond, _ = sla.lapack.zgecon(lu, anorm)
    if rcond < _RCOND_FLOOR:
        raise SingularMatrixError(
            f"shifted matrix numerically singular at z={z} (rcond={rcond:.2e})",
            sigma_min_estimate=float(rcond * anorm),
        )
    return sla.lu_solve((lu, piv), rhs, check_finite=False)


def matpoly_eval(a, roots: Sequence[complex], scale: complex = 1.0) -> np.ndarray:
    """Evaluate ``scale * prod_j (A - root_j I)`` by repeated multiplication.

    Factors are applied in the order given, which is also the order roundoff
    accumulates; callers that care should sort roots themselves.
    """
    m = _as_square(a)
    n = m.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    out = complex(scale) * eye
    for r in roots:
        out = out @ (m - complex(r) * eye)
    return out
