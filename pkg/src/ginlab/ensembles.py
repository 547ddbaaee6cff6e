"""Seeded random matrix ensembles and right-hand-side construction.

All sampling goes through counter-based Philox streams keyed by
``(seed, purpose_tag << 32 | index)``, so distinct purposes (matrix entries,
right-hand sides) never share a stream and every draw is reproducible from a
single 64-bit seed.  Normal variates use numpy's ziggurat sampler.
"""

from __future__ import annotations

import dataclasses
import os

import numpy as np

from .linalg import _as_square, _as_vector

__all__ = [
    "ShiftedSystem",
    "sample_ginibre",
    "sample_hessenberg_model",
    "make_system",
    "derive_seed",
    "matrix_to_bytes",
    "matrix_from_bytes",
    "write_matrix",
    "read_matrix",
]

_B_MODES = ("independent", "adversarial")

# Stream purpose tags (high 32 bits of the second Philox key word).
_STREAM_GINIBRE = 0x47
_STREAM_HESSENBERG = 0x48
_STREAM_RHS = 0x62

_SEED_MASK = (1 << 64) - 1


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return int(seed)


def _check_order(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"matrix order must be a positive integer, got {n!r}")
    return int(n)


def stream(seed: int, tag: int, index: int = 0) -> np.random.Generator:
    """Independent generator for (seed, purpose tag, index)."""
    if not 0 <= index < 1 << 32:
        raise ValueError(f"stream index must fit in 32 bits, got {index}")
    key = [_check_seed(seed), (int(tag) << 32) | int(index)]
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, index: int) -> int:
    """Collision-resistant per-trial seed, splitmix64-style mixing."""
    x = (_check_seed(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _SEED_MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _SEED_MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _SEED_MASK
    return x ^ (x >> 31)


@dataclasses.dataclass(frozen=True)
class ShiftedSystem:
    """A linear system ``(I + sigma G) x = b`` ready for a Krylov solver."""

    sigma: float
    g: np.ndarray
    b: np.ndarray
    b_mode: str

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma}")
        g = _as_square(self.g, "coefficient matrix")
        b = _as_vector(self.b, g.shape[0], "right-hand side")
        if abs(float(np.linalg.norm(b)) - 1.0) > 1e-12:
            raise ValueError("right-hand side must have unit norm")
        if self.b_mode not in _B_MODES:
            raise ValueError(f"b_mode must be one of {_B_MODES}, got {self.b_mode!r}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def matrix(self) -> np.ndarray:
        """The dense system matrix ``I + sigma G``."""
        return np.eye(self.n, dtype=np.complex128) + self.sigma * self.g


def sample_ginibre(n: int, seed: int) -> np.ndarray:
    """Sample an n x n complex Ginibre matrix.

    Entries are ``(x + iy) / sqrt(2 n)`` with x, y independent standard
    normals, so each entry has mean-square 1/n and the spectral norm sits
    near 2 for large n.
    """
    n = _check_order(n)
    rng = stream(seed, _STREAM_GINIBRE)
    x = rng.standard_normal((n, n))
    y = rng.standard_normal((n, n))
    return (x + 1j * y) / np.sqrt(2.0 * n)


def sample_hessenberg_model(n: int, seed: int) -> np.ndarray:
    """Sample the upper-Hessenberg matrix distributed like a Krylov projection.

    The diagonal and strict upper triangle are iid complex normal with
    mean-square 2 (x + iy with unit-variance parts); the subdiagonal entry in
    column j (1-based) is a chi variable with 2(n - j) degrees of freedom,
    drawn as the square root of a Gamma(n - j, 2) variate.  The whole matrix
    carries the global 1/sqrt(2 n) scaling.
    """
    n = _check_order(n)
    rng = stream(seed, _STREAM_HESSENBERG)
    x = rng.standard_normal((n, n))
    y = rng.standard_normal((n, n))
    h = np.triu(x + 1j * y)
    if n > 1:
        dof_half = np.arange(n - 1, 0, -1, dtype=np.float64)
        sub = np.sqrt(rng.gamma(shape=dof_half, scale=2.0))
        h[np.arange(1, n), np.arange(n - 1)] = sub
    return h / np.sqrt(2.0 * n)


def make_system(n: int, sigma: float, b_mode: str, seed: int) -> ShiftedSystem:
    """Draw a shifted Ginibre system with the requested right-hand side.

    ``independent`` draws b as an iid standard complex Gaussian vector from a
    stream separate from the matrix entries, then normalizes.  ``adversarial``
    aims b at the slowest-converging direction: the top right singular vector
    of G^10 (see :func:`ginlab.gmres.adversarial_rhs`).
    """
    n = _check_order(n)
    if b_mode not in _B_MODES:
        raise ValueError(f"b_mode must be one of {_B_MODES}, got {b_mode!r}")
    g = sample_ginibre(n, seed)
    rng = stream(seed, _STREAM_RHS)
    raw = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if b_mode == "independent":
        b = raw / np.linalg.norm(raw)
    else:
        from .gmres import adversarial_rhs

        b = adversarial_rhs(g, sigma, v0=raw)
    return ShiftedSystem(sigma=float(sigma), g=g, b=b, b_mode=b_mode)


def matrix_to_bytes(a) -> bytes:
    """Serialize a complex matrix: rows, cols as little-endian uint64, then
    row-major interleaved re/im little-endian float64."""
    m = _as_square_or_rect(a)
    header = np.array(m.shape, dtype="<u8").tobytes()
    return header + np.ascontiguousarray(m, dtype="<c16").tobytes()


def _as_square_or_rect(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def matrix_from_bytes(buf: bytes) -> np.ndarray:
    """Inverse of :func:`matrix_to_bytes`."""
    if len(buf) < 16:
        raise ValueError("buffer too short for matrix header")
    rows, cols = (int(v) for v in np.frombuffer(buf[:16], dtype="<u8"))
    expected = 16 + rows * cols * 16
    if rows < 1 or cols < 1 or len(buf) != expected:
        raise ValueError(f"buffer length {len(buf)} does not match header {rows}x{cols}")
    data = np.frombuffer(buf[16:], dtype="<c16").reshape(rows, cols)
    return data.astype(np.complex128)


def write_matrix(path: str | os.PathLike, a) -> None:
    with open(path, "wb") as fh:
        fh.write(matrix_to_bytes(a))


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        return matrix_from_bytes(fh.read())
