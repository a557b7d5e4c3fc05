"""Dense linear algebra and deterministic randomness shared by every module.

Vectors are 1-d float64 numpy arrays and matrices are 2-d row-major arrays.
The validators here check shape and finiteness once, so the rest of the
package can assume clean inputs.  Everything is desk scale by contract:
factorable matrices are capped at ``MAX_DENSE_DIM`` per side.

All randomness flows through :class:`RandomSource`, a thin splittable
wrapper over numpy's counter-based Philox generator.  Randomized routines
take a source and are pure functions of (seed, split path, parameters), so
identical configurations reproduce identical numbers and parallel sweeps
can hand each trial its own split without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

MAX_DENSE_DIM = 32


class DegenerateMatrixError(ValueError):
    """A matrix that had to be positive-definite or full-rank is not."""


def as_vector(x, dim=None) -> np.ndarray:
    """Validate ``x`` as a finite 1-d float array and return it."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got array of shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    return v


def as_matrix(a, rows=None, cols=None) -> np.ndarray:
    """Validate ``a`` as a finite 2-d float array and return it."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"row mismatch: expected {rows}, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"column mismatch: expected {cols}, got {m.shape[1]}")
    return m


def frozen_array(a) -> np.ndarray:
    """Copy to a float array and make it read-only (for dataclass fields)."""
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def svd(m):
    """Thin singular value decomposition ``m = u @ diag(s) @ vt``.

    Returns ``(s, u, vt)`` with singular values sorted descending and
    orthonormal factor columns/rows.  Reconstruction is accurate to
    ``1e-10 * s[0]`` (checked by the test suite, not re-verified per call).
    Matrices larger than ``MAX_DENSE_DIM`` per side are rejected.
    """
    a = as_matrix(m)
    if max(a.shape) > MAX_DENSE_DIM:
        raise ValueError(
            f"matrix of shape {a.shape} exceeds the {MAX_DENSE_DIM} per-side cap"
        )
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return s, u, vt


def singular_values(m) -> np.ndarray:
    return svd(m)[0]


def solve_spd(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` for symmetric positive-definite ``a``.

    Cholesky-based; raises :class:`DegenerateMatrixError` when ``a`` is not
    positive-definite and ``ValueError`` when it is not symmetric (within
    1e-12 relative).
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError("solve_spd needs a square matrix")
    v = as_vector(b, dim=m.shape[0])
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m - m.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    try:
        factor = scipy.linalg.cho_factor(m, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise DegenerateMatrixError("matrix is not positive-definite") from exc
    return scipy.linalg.cho_solve(factor, v, check_finite=False)


def spd_power(a, exponent: float) -> np.ndarray:
    """Symmetric power ``a**exponent`` of a positive-definite matrix."""
    m = as_matrix(a)
    w, q = np.linalg.eigh(m)
    if w.min() <= 0.0:
        raise DegenerateMatrixError("matrix is not positive-definite")
    return (q * w**exponent) @ q.T


def orthonormal_complement(kernel, dim: int | None = None) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement of a row span.

    Deterministic: the kernel rows are orthonormalized in the order given,
    then the standard basis vectors are swept in coordinate order and kept
    whenever they contribute a new direction.  Dependent kernel rows raise
    :class:`DegenerateMatrixError`.
    """
    K = np.asarray(kernel, dtype=float)
    if K.size == 0:
        if dim is None:
            raise ValueError("empty kernel needs an explicit dim")
        return np.eye(dim)
    K = as_matrix(K)
    d = K.shape[1]
    if dim is not None and d != dim:
        raise ValueError("kernel dimension mismatch")
    basis: list[np.ndarray] = []

    def _residual(vec):
        r = vec.astype(float)
        for b in basis:
            r = r - (r @ b) * b
        return r

    for row in K:
        r = _residual(row)
        nrm = np.linalg.norm(r)
        if nrm <= 1e-10 * max(1.0, np.linalg.norm(row)):
            raise DegenerateMatrixError("kernel basis rows are linearly dependent")
        basis.append(r / nrm)
    k = len(basis)
    comp: list[np.ndarray] = []
    for j in range(d):
        if len(comp) == d - k:
            break
        r = _residual(np.eye(d)[j])
        for b in comp:
            r = r - (r @ b) * b
        nrm = np.linalg.norm(r)
        if nrm > 1e-10:
            comp.append(r / nrm)
    return np.array(comp).reshape(len(comp), d)


@dataclass(frozen=True)
class RandomSource:
    """Deterministic splittable randomness.

    ``seed`` is a 64-bit unsigned integer, ``path`` the split history.
    Identical (seed, path) pairs always produce identical streams; splits
    with distinct indices never collide.  Sweeps should split once per
    trial rather than share a source, which keeps every trial reproducible
    in isolation and makes parallel evaluation value-identical to serial.
    """

    seed: int
    path: tuple[int, ...] = ()
    algorithm: str = "philox4x64"

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.algorithm != "philox4x64":
            raise ValueError(f"unknown generator algorithm {self.algorithm!r}")
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))

    def split(self, *indices: int) -> "RandomSource":
        return RandomSource(self.seed, self.path + tuple(int(i) for i in indices))


def gaussian_sample(rng: RandomSource, n: int) -> np.ndarray:
    """``n`` i.i.d. standard normals, a pure function of (source, n)."""
    if n < 1:
        raise ValueError("need n >= 1")
    return rng.generator().standard_normal(n)


def gaussian_matrix(rng: RandomSource, rows: int, cols: int) -> np.ndarray:
    if rows < 1 or cols < 1:
        raise ValueError("need positive shape")
    return rng.generator().standard_normal((rows, cols))
