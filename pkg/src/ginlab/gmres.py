"""GMRES residual computation and convergence predictions for shifted systems.

The solver path is intentionally textbook: Arnoldi with modified Gram-Schmidt
(plus one re-orthogonalization sweep) and a Givens-rotation least-squares
update whose rotated right-hand side carries the residual magnitudes.  The
prediction and bound functions are closed-form and cheap; the adversarial
right-hand side is a power iteration aimed at the top right singular vector
of G^10.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .ensembles import ShiftedSystem
from .linalg import (
    NumericalError,
    SingularMatrixError,
    _as_square,
    _as_vector,
)
from .spectral_sets import edge_e

__all__ = [
    "ArnoldiFactorization",
    "ResidualCurve",
    "arnoldi",
    "gmres_residuals",
    "residual_from_hessenberg",
    "limiting_rate",
    "gmres_bounds",
    "adversarial_rhs",
]

_BREAKDOWN_REL_TOL = 1e-14
_POWER_MAX_ITER = 500
_POWER_REL_TOL = 1e-12
_POWER_EXPONENT = 10


@dataclasses.dataclass(frozen=True)
class ArnoldiFactorization:
    """Arnoldi relation ``A V_m = V H_tilde``.

    Without breakdown ``v`` has m+1 orthonormal columns and ``h_tilde`` is
    (m+1) x m upper Hessenberg.  On breakdown at step m the Krylov space is
    A-invariant: ``v`` keeps m columns, ``h_tilde`` is square m x m, and
    ``breakdown_step`` records m.
    """

    v: np.ndarray
    h_tilde: np.ndarray
    breakdown_step: int | None = None

    def __post_init__(self):
        rows, cols = self.h_tilde.shape
        expected_rows = cols if self.breakdown_step is not None else cols + 1
        if rows != expected_rows or self.v.shape[1] != rows:
            raise ValueError(
                f"inconsistent factorization shapes v={self.v.shape} h={self.h_tilde.shape}"
            )


@dataclasses.dataclass(frozen=True)
class ResidualCurve:
    """Relative GMRES residuals with prediction and bounds at each step."""

    n: int
    sigma: float
    b_mode: str
    ks: np.ndarray
    residuals: np.ndarray
    prediction: np.ndarray
    bound_pseudo: np.ndarray
    bound_nr: np.ndarray

    def __post_init__(self):
        k = len(self.ks)
        lengths = {
            len(self.residuals), len(self.prediction),
            len(self.bound_pseudo), len(self.bound_nr),
        }
        if lengths != {k}:
            raise ValueError("curve arrays must share one length")
        if k == 0 or self.ks[0] != 0:
            raise ValueError("curve must start at k = 0")
        if abs(self.residuals[0] - 1.0) > 1e-12:
            raise ValueError("relative residual at k = 0 must be 1")
        if np.any(np.diff(self.residuals) > 1e-14):
            raise ValueError("residuals must be non-increasing")

    def to_csv(self, path) -> None:
        write_curve_csv(path, self)


def write_curve_csv(path, curve: ResidualCurve) -> None:
    """Serialize a residual curve: k, residual, prediction, bound_pseudo, bound_nr."""
    lines = ["k,residual,prediction,bound_pseudo,bound_nr"]
    for i, k in enumerate(curve.ks):
        lines.append(
            f"{int(k)},{curve.residuals[i]:.17g},{curve.prediction[i]:.17g},"
            f"{curve.bound_pseudo[i]:.17g},{curve.bound_nr[i]:.17g}"
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _norm_upper_bound(a: np.ndarray) -> float:
    # Cheap deterministic upper bound on the spectral norm.
    fro = float(np.linalg.norm(a))
    one = float(np.abs(a).sum(axis=0).max())
    inf = float(np.abs(a).sum(axis=1).max())
    return min(fro, math.sqrt(one * inf))


def arnoldi(a, b, k: int) -> ArnoldiFactorization:
    """Run k steps of Arnoldi on (A, b).

    Modified Gram-Schmidt with a single re-orthogonalization sweep keeps the
    basis orthonormal to near machine precision.  Breakdown is declared when
    the candidate basis vector has norm at most 1e-14 * ||A||, in which case
    the factorization is truncated to the invariant subspace found.
    """
    m = _as_square(a)
    n = m.shape[0]
    v0 = _as_vector(b, n, "starting vector")
    beta = float(np.linalg.norm(v0))
    if beta == 0.0:
        raise ValueError("starting vector must be nonzero")
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ValueError(f"step count must satisfy 1 <= k <= {n}, got {k!r}")
    k = int(k)

    tol = _BREAKDOWN_REL_TOL * max(_norm_upper_bound(m), 1e-300)
    basis = np.empty((n, k + 1), dtype=np.complex128)
    h = np.zeros((k + 1, k), dtype=np.complex128)
    basis[:, 0] = v0 / beta

    for j in range(k):
        w = m @ basis[:, j]
        for i in range(j + 1):
            hij = np.vdot(basis[:, i], w)
            w -= hij * basis[:, i]
            h[i, j] = hij
        for i in range(j + 1):
            corr = np.vdot(basis[:, i], w)
            w -= corr * basis[:, i]
            h[i, j] += corr
        hnext = float(np.linalg.norm(w))
        if hnext <= tol:
            return ArnoldiFactorization(
                v=basis[:, : j + 1].copy(),
                h_tilde=h[: j + 1, : j + 1].copy(),
                breakdown_step=j + 1,
            )
        h[j + 1, j] = hnext
        basis[:, j + 1] = w / hnext

    return ArnoldiFactorization(v=basis, h_tilde=h, breakdown_step=None)


def _givens(a: complex, b: float) -> tuple[complex, complex, float]:
    """Rotation annihilating b against a; returns (c, s, r) with r >= 0 scale."""
    r = math.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0 + 0.0j, 0.0 + 0.0j, 0.0
    return a / r, b / r, r


def gmres_residuals(system: ShiftedSystem, k_max: int) -> ResidualCurve:
    """Relative GMRES residual history on ``(I + sigma G) x = b``.

    Progressive Givens rotations on the Arnoldi Hessenberg matrix yield the
    residual at every step in one pass; the sequence is non-increasing by
    construction.  After an Arnoldi breakdown the residual is exactly zero
    and is reported as such for all later steps.
    """
    if not isinstance(system, ShiftedSystem):
        raise ValueError("system must be a ShiftedSystem")
    n = system.n
    if not isinstance(k_max, (int, np.integer)) or not 1 <= k_max <= n:
        raise ValueError(f"k_max must satisfy 1 <= k_max <= {n}, got {k_max!r}")
    k_max = int(k_max)

    fact = arnoldi(system.matrix(), system.b, k_max)
    steps = fact.h_tilde.shape[1]
    # Pad the square breakdown form with a zero row: the final rotation then
    # has sine zero and the residual collapses to exactly zero.
    h = np.zeros((steps + 1, steps), dtype=np.complex128)
    h[: fact.h_tilde.shape[0], :] = fact.h_tilde

    rots: list[tuple[complex, complex]] = []
    residuals = np.zeros(k_max + 1)
    residuals[0] = 1.0
    running = 1.0
    for j in range(steps):
        col = h[: j + 2, j].copy()
        for i, (c, s) in enumerate(rots):
            top = np.conj(c) * col[i] + np.conj(s) * col[i + 1]
            col[i + 1] = -s * col[i] + c * col[i + 1]
            col[i] = top
        c, s, r = _givens(col[j], col[j + 1])
        rots.append((c, s))
        # A fully zero column (possible only in the padded breakdown column,
        # when the invariant-subspace block is singular) makes no progress.
        running *= abs(s) if r > 0.0 else 1.0
        residuals[j + 1] = running
    if steps < k_max:
        residuals[steps + 1 :] = residuals[steps]

    ks = np.arange(k_max + 1)
    pred = np.array([limiting_rate(system.sigma, int(k)) for k in ks])
    bounds = [gmres_bounds(system.sigma, int(k)) for k in ks]
    return ResidualCurve(
        n=n,
        sigma=system.sigma,
        b_mode=system.b_mode,
        ks=ks,
        residuals=residuals,
        prediction=pred,
        bound_pseudo=np.array([b[0] for b in bounds]),
        bound_nr=np.array([b[1] for b in bounds]),
    )


def residual_from_hessenberg(h_tilde) -> float:
    """Relative GMRES residual encoded by a (k+1) x k Hessenberg matrix.

    For the least-squares problem min_y ||e_1 - H y|| the optimal residual is
    (1 + ||w||^2)^{-1/2} where w solves B* w = (first row)* and B is the
    upper-triangular lower k x k block.  One triangular solve, no Arnoldi.
    """
    h = np.asarray(h_tilde, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1] + 1 or h.shape[1] < 1:
        raise ValueError(f"expected a (k+1) x k matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h.view(np.float64))):
        raise ValueError("matrix contains non-finite entries")
    k = h.shape[1]
    rows, cols = np.tril_indices(k + 1, k=-2, m=k)
    keep = cols < k
    if np.any(h[rows[keep], cols[keep]] != 0):
        raise ValueError("matrix is not upper Hessenberg")
    lower = h[1:, :]
    diag_min = float(np.abs(np.diag(lower)).min())
    if diag_min == 0.0:
        raise SingularMatrixError(
            "lower block is singular (zero subdiagonal)", sigma_min_estimate=0.0
        )
    w = sla.solve_triangular(lower, np.conj(h[0, :]), trans=2, lower=False)
    return 1.0 / math.sqrt(1.0 + float(np.vdot(w, w).real))


def limiting_rate(sigma: float, k: int) -> float:
    """Limiting relative residual of GMRES on the shifted ensemble at step k.

    Equals ((1 - sigma^2) / (1 - sigma^(2 + 2k)))^(1/2) * sigma^k; the value
    at k = 0 is exactly 1, and successive ratios approach sigma from below.
    """
    _check_sigma(sigma)
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"step index must be a non-negative integer, got {k!r}")
    k = int(k)
    if k == 0:
        return 1.0
    s2 = sigma * sigma
    return math.sqrt((1.0 - s2) / (1.0 - s2 ** (k + 1))) * sigma**k


def _check_sigma(sigma: float) -> float:
    if not isinstance(sigma, (int, float, np.floating)) or not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma!r}")
    return float(sigma)


def _pseudo_objective(eta: float, sigma: float, k: int) -> float:
    # log of eta * e(eta)^(-1/2) * (sigma eta)^k
    e_val = edge_e(eta)
    if e_val <= 0.0:
        return math.inf
    return math.log(eta) - 0.5 * math.log(e_val) + k * math.log(sigma * eta)


def gmres_bounds(sigma: float, k: int) -> tuple[float, float]:
    """Pseudospectral and numerical-range residual bounds at step k.

    The pseudospectral bound minimizes eta * e(eta)^(-1/2) * (sigma eta)^k
    over eta > 1 (coarse 64-point log grid, then golden-section refinement);
    the numerical-range bound is 2 (sqrt(2) sigma)^k.  For
    sigma >= 1/sqrt(2) the latter no longer decays, which is flagged with a
    warning but still returned.
    """
    _check_sigma(sigma)
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"step index must be a non-negative integer, got {k!r}")
    k = int(k)
    if sigma >= 1.0 / math.sqrt(2.0):
        warnings.warn(
            "numerical-range bound does not decay for sigma >= 1/sqrt(2)",
            stacklevel=2,
        )
    bound_nr = 2.0 * (math.sqrt(2.0) * sigma) ** k

    lo = 1.0 + 1e-9
    hi = max(2.0 / sigma, 4.0)
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), 64))
    vals = [_pseudo_objective(float(eta), sigma, k) for eta in grid]
    i = int(np.argmin(vals))
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, len(grid) - 1)])

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = _pseudo_objective(x1, sigma, k)
    f2 = _pseudo_objective(x2, sigma, k)
    while b - a > 1e-13 * b:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = _pseudo_objective(x1, sigma, k)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = _pseudo_objective(x2, sigma, k)
    bound_pseudo = math.exp(min(f1, f2, vals[i]))
    return bound_pseudo, bound_nr


def adversarial_rhs(g, sigma: float, v0: Sequence[complex] | None = None) -> np.ndarray:
    """Unit right-hand side aligned with the top right singular vector of G^10.

    Power iteration on (G^10)* G^10, applying G ten times and its adjoint ten
    times per sweep.  Stops when the singular-value estimate changes by less
    than 1e-12 relative, errors after 500 sweeps without convergence.  The
    shift strength sigma only scales (sigma G)^10 and does not affect the
    maximizer; it is accepted for interface symmetry and validated.
    """
    m = _as_square(g)
    _check_sigma(sigma)
    n = m.shape[0]
    if v0 is None:
        v = np.ones(n, dtype=np.complex128)
        v[::2] += 0.5j
    else:
        v = np.array(v0, dtype=np.complex128)
        if v.shape != (n,):
            raise ValueError(f"start vector must have shape ({n},), got {v.shape}")
    nv = float(np.linalg.norm(v))
    if nv == 0.0 or not np.all(np.isfinite(v.view(np.float64))):
        raise ValueError("start vector must be finite and nonzero")
    v = v / nv

    mh = m.conj().T
    lam_prev = -1.0
    for _ in range(_POWER_MAX_ITER):
        w = v
        for _ in range(_POWER_EXPONENT):
            w = m @ w
        for _ in range(_POWER_EXPONENT):
            w = mh @ w
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            # G^10 annihilates v (nilpotent or zero G): every vector is optimal.
            return v
        v = w / lam
        if lam_prev >= 0.0 and abs(lam - lam_prev) <= _POWER_REL_TOL * lam:
            return v
        lam_prev = lam
    raise NumericalError("power iteration for the adversarial right-hand side did not converge")
