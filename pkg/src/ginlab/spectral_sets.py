"""Resolvent-norm geometry of the Ginibre ensemble outside the unit circle.

The scalar edge functions describe where the smallest eigenvalue of
``(zI - G)* (zI - G)`` concentrates as the matrix order grows; their inverse
turns a resolvent-norm level into a radius.  The probing helpers evaluate the
resolvent norm on annular grids and measure how far sampled boundary shapes
sit from a perfect disk.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import Sequence

import numpy as np

from .linalg import _as_square, sigma_min

__all__ = [
    "EdgeProfile",
    "AnnulusProbe",
    "edge_e",
    "edge_f",
    "edge_e_inv",
    "edge_profile",
    "resolvent_norm",
    "annulus_probe",
    "pseudospectrum_radius",
    "hausdorff_to_disk",
    "lipschitz_constants",
]

_INV_VALUE_TOL = 1e-12
_INV_BRACKET_CAP = 1e150
# Largest level whose preimage the edge formula can evaluate without the
# 8 d^2 term overflowing; beyond it the bisection would silently stall on
# the overflow cliff instead of converging.
_INV_LEVEL_CAP = 1e150


def _edge_branches(abs_z: float) -> tuple[float, float]:
    d = 1.0 - abs_z * abs_z
    root = (9.0 - 8.0 * d) ** 1.5
    base = 8.0 * d * d - 36.0 * d + 27.0
    den = 8.0 * (1.0 - d)
    return (base - root) / den, (base + root) / den


def _check_abs_z(abs_z: float) -> float:
    if not isinstance(abs_z, (int, float, np.floating)) or not math.isfinite(abs_z):
        raise ValueError(f"modulus must be a finite real, got {abs_z!r}")
    if abs_z < 1.0:
        raise ValueError(f"modulus must be >= 1, got {abs_z}")
    return float(abs_z)


def edge_e(abs_z: float) -> float:
    """Lower spectral edge of the shifted normal equations at modulus |z|.

    Increasing on [1, inf) with edge_e(1) = 0; the square root of this value
    is the reciprocal of the limiting resolvent norm.  Tiny negative rounding
    residue near the unit circle is clamped to zero.
    """
    abs_z = _check_abs_z(abs_z)
    if abs_z == 1.0:
        return 0.0
    lo, _ = _edge_branches(abs_z)
    return max(lo, 0.0)


def edge_f(abs_z: float) -> float:
    """Upper spectral edge companion to :func:`edge_e`; edge_f(1) = 27/4."""
    abs_z = _check_abs_z(abs_z)
    _, hi = _edge_branches(abs_z)
    return hi


def edge_e_inv(y: float) -> float:
    """Radius r >= 1 with edge_e(r) = y, by bracketed bisection.

    The returned radius satisfies |edge_e(r) - y| <= 1e-12 * max(1, y).
    """
    if not isinstance(y, (int, float, np.floating)) or not math.isfinite(y) or y < 0.0:
        raise ValueError(f"level must be a finite non-negative real, got {y!r}")
    y = float(y)
    if y > _INV_LEVEL_CAP:
        raise ValueError(f"level {y} out of representable range")
    tol = _INV_VALUE_TOL * max(1.0, y)
    if y <= tol:
        return 1.0
    lo, hi = 1.0, 2.0
    while edge_e(hi) < y:
        hi *= 2.0
        if hi > _INV_BRACKET_CAP:
            raise ValueError(f"level {y} out of representable range")
    # The curve is cubically flat at the unit circle, so a value-level stop
    # alone would leave the radius orders less accurate than the value; also
    # require the bracket itself to collapse.
    floor = 4.0 * np.finfo(float).eps
    while True:
        mid = 0.5 * (lo + hi)
        val = edge_e(mid)
        width = hi - lo
        if (abs(val - y) <= tol and width <= 1e-12 * mid) or width <= floor * mid:
            return mid
        if val < y:
            lo = mid
        else:
            hi = mid


def pseudospectrum_radius(epsilon_level: float) -> float:
    """Limiting radius of the epsilon-pseudospectrum: edge_e_inv(epsilon^2)."""
    if not isinstance(epsilon_level, (int, float, np.floating)) or not epsilon_level > 0.0:
        raise ValueError(f"epsilon_level must be positive, got {epsilon_level!r}")
    return edge_e_inv(float(epsilon_level) ** 2)


@dataclasses.dataclass(frozen=True)
class EdgeProfile:
    """Edge-function curves tabulated on a modulus grid."""

    abs_z: np.ndarray
    e_vals: np.ndarray
    f_vals: np.ndarray

    def __post_init__(self):
        if not (len(self.abs_z) == len(self.e_vals) == len(self.f_vals)):
            raise ValueError("profile arrays must share one length")
        if np.any(self.e_vals > self.f_vals):
            raise ValueError("lower edge exceeds upper edge")
        at_one = np.abs(self.abs_z - 1.0) == 0.0
        if np.any(np.abs(self.e_vals[at_one]) > 1e-12):
            raise ValueError("lower edge must vanish at modulus 1")

    @property
    def d(self) -> np.ndarray:
        """The shifted-coordinate grid 1 - |z|^2 the closed forms live on."""
        return 1.0 - self.abs_z**2

    def to_csv(self, path) -> None:
        lines = ["abs_z,e_val,f_val"]
        for r, ev, fv in zip(self.abs_z, self.e_vals, self.f_vals):
            lines.append(f"{r:.17g},{ev:.17g},{fv:.17g}")
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def edge_profile(abs_z_grid: Sequence[float]) -> EdgeProfile:
    """Tabulate both edge functions on a grid of moduli >= 1."""
    grid = np.asarray(abs_z_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a nonempty 1-D array")
    return EdgeProfile(
        abs_z=grid,
        e_vals=np.array([edge_e(float(r)) for r in grid]),
        f_vals=np.array([edge_f(float(r)) for r in grid]),
    )


def resolvent_norm(a, z: complex, tol: float = 1e-10) -> float:
    """Resolvent norm ``||(zI - A)^{-1}||`` as 1 / sigma_min(zI - A).

    Returns ``inf`` when the shifted matrix is singular to working precision
    (z an eigenvalue), so callers can filter rather than catch.
    """
    m = _as_square(a)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("evaluation point must be finite")
    shifted = z * np.eye(m.shape[0], dtype=np.complex128) - m
    smin = sigma_min(shifted, tol=tol)
    if smin == 0.0:
        warnings.warn(
            f"resolvent singular at z = {z}; returning inf", RuntimeWarning, stacklevel=2
        )
        return math.inf
    return 1.0 / smin


@dataclasses.dataclass(frozen=True)
class AnnulusProbe:
    """Resolvent norms sampled on a polar grid over an annulus."""

    r_inner: float
    r_outer: float
    n_radial: int
    n_angular: int
    zs: np.ndarray
    abs_z: np.ndarray
    norms: np.ndarray

    def __post_init__(self):
        if not (len(self.zs) == len(self.abs_z) == len(self.norms)):
            raise ValueError("sample arrays must share one length")

    @property
    def min_norm(self) -> float:
        return float(np.min(self.norms))

    @property
    def max_norm(self) -> float:
        return float(np.max(self.norms))

    def to_csv(self, path) -> None:
        lines = ["re_z,im_z,abs_z,resolvent_norm"]
        for z, r, v in zip(self.zs, self.abs_z, self.norms):
            lines.append(f"{z.real:.17g},{z.imag:.17g},{r:.17g},{v:.17g}")
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def annulus_probe(
    a,
    r_inner: float,
    r_outer: float,
    n_radial: int,
    n_angular: int,
    tol: float = 1e-10,
) -> AnnulusProbe:
    """Evaluate the resolvent norm of ``a`` on a radius-major polar grid.

    Radii are n_radial equispaced points on [r_inner, r_outer] (both ends
    included); angles are n_angular equispaced points on [0, 2 pi).
    """
    m = _as_square(a)
    if not 0.0 < r_inner <= r_outer:
        raise ValueError(f"need 0 < r_inner <= r_outer, got {r_inner}, {r_outer}")
    if n_radial < 1 or n_angular < 1:
        raise ValueError("grid must have at least one radius and one angle")
    radii = np.linspace(r_inner, r_outer, n_radial)
    angles = 2.0 * np.pi * np.arange(n_angular) / n_angular
    zs, abs_z, norms = [], [], []
    for r in radii:
        for t in angles:
            z = complex(r * math.cos(t), r * math.sin(t))
            zs.append(z)
            abs_z.append(float(r))
            norms.append(resolvent_norm(m, z, tol=tol))
    return AnnulusProbe(
        r_inner=float(r_inner),
        r_outer=float(r_outer),
        n_radial=int(n_radial),
        n_angular=int(n_angular),
        zs=np.array(zs, dtype=np.complex128),
        abs_z=np.array(abs_z),
        norms=np.array(norms),
    )


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Counter-clockwise convex hull (monotone chain); collinear points dropped."""
    pts = sorted(set(zip(points.real.tolist(), points.imag.tolist())))
    if len(pts) <= 2:
        return np.array([complex(x, y) for x, y in pts], dtype=np.complex128)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return np.array([complex(x, y) for x, y in hull], dtype=np.complex128)


def _support(vertices: np.ndarray, theta: float) -> float:
    return float(np.max((vertices * np.exp(-1j * theta)).real))


def hausdorff_to_disk(points: Sequence[complex], convex: bool, r: float) -> float:
    """Hausdorff-style deviation of a sampled set from the disk of radius r.

    With ``convex=False`` the points are read as boundary samples of a
    star-shaped set and the deviation is the largest radial error
    ``max | |p| - r |``.  With ``convex=True`` the points are vertices of
    their convex hull and the deviation is the sup-norm distance between the
    hull's support function and the constant r, evaluated exactly at the
    finitely many critical directions (vertex antipodes and edge normals).
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size < 1:
        raise ValueError("need at least one point")
    if not np.all(np.isfinite(pts.view(np.float64))):
        raise ValueError("points contain non-finite entries")
    if not (isinstance(r, (int, float, np.floating)) and r > 0.0):
        raise ValueError(f"disk radius must be positive, got {r!r}")
    r = float(r)
    moduli = np.abs(pts)
    if not convex:
        return float(np.max(np.abs(moduli - r)))

    hull = _convex_hull(pts)
    up = float(np.max(moduli)) - r
    thetas = [math.atan2(v.imag, v.real) + math.pi for v in hull]
    m = len(hull)
    if m >= 2:
        for i in range(m):
            t = hull[(i + 1) % m] - hull[i]
            if t == 0:
                continue
            normal = -1j * t
            thetas.append(math.atan2(normal.imag, normal.real))
    min_support = min(_support(hull, t) for t in thetas)
    return max(up, r - min_support, 0.0)


def lipschitz_constants(e: float, f: float, g: float) -> tuple[float, float]:
    """Step size and Lipschitz constant for resolvent-norm covering arguments.

    Given a resolvent-norm cap e, an evaluation-region radius cap f, and an
    operator-norm cap g, returns ``h = min(1, 1/(4 e^2 (f + g + 1)))`` and
    ``L = 3 e^3 (f + g + 1)``: within distance h, resolvent norms below e
    change by at most L times the distance.
    """
    if not (isinstance(e, (int, float, np.floating)) and e > 0.0):
        raise ValueError(f"resolvent cap must be positive, got {e!r}")
    for name, v in (("region cap", f), ("norm cap", g)):
        if not (isinstance(v, (int, float, np.floating)) and v >= 0.0):
            raise ValueError(f"{name} must be non-negative, got {v!r}")
    span = f + g + 1.0
    return min(1.0, 1.0 / (4.0 * e * e * span)), 3.0 * e**3 * span
