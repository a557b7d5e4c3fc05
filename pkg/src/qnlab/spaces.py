"""Finite-dimensional quasi-normed spaces and their gauges.

A space is a symmetric star body in R^d given in one of four concrete
representations:

* :class:`WeightedLp`  -- balls of weighted p-gauges, 0 < p <= infinity;
* :class:`Schatten`    -- singular-value p-gauges on small matrices, 0 < p <= 2;
* :class:`Polytope`    -- convex hulls of symmetric vertex sets;
* :class:`RConvexAtoms` -- r-convex hulls of small atom sets, 0 < r <= 1.

Every space knows its gauge (Minkowski functional of the unit ball), the
gauge of its convex envelope, and the dual gauge, i.e. the support function
of the envelope ball.  Gauges satisfy the r-triangle inequality
``gauge(x + y)**r <= gauge(x)**r + gauge(y)**r`` for the space's
``r_exponent``.  Spaces are immutable values: array fields are copied and
frozen at construction and all methods are pure, so instances can be shared
freely across parallel work.

Exact facts used below and enforced by the test suite:

* a minimizing decomposition of ``x`` over atoms for an r-gauge (r <= 1)
  can be taken with support of size at most ``dim`` (basic solutions of the
  constraint system), so atom gauges are computed by exhaustive enumeration
  of small subsets;
* the convex envelope of a weighted Lp ball with p < 1 is the weighted
  crosspolytope spanned by the per-axis extreme points, so envelope and
  dual gauges of those spaces have closed forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .numkernel import (
    DegenerateMatrixError,
    as_matrix,
    as_vector,
    frozen_array,
    orthonormal_complement,
    singular_values,
)

MAX_ATOMS = 12
_FEAS_TOL = 1e-9


class QuasiNormedSpace:
    """Base interface; concrete spaces implement the gauge trio."""

    dim: int

    @property
    def r_exponent(self) -> float:
        raise NotImplementedError

    def gauge(self, x) -> float:
        raise NotImplementedError

    def gauge_many(self, points) -> np.ndarray:
        pts = as_matrix(points, cols=self.dim)
        return np.array([self.gauge(p) for p in pts])

    def envelope_gauge(self, x) -> float:
        raise NotImplementedError

    def dual_gauge(self, f) -> float:
        raise NotImplementedError

    def envelope_space(self) -> "QuasiNormedSpace":
        """The same ball convexified, as a space with r_exponent 1."""
        raise NotImplementedError

    def envelope_atoms(self) -> np.ndarray:
        """Extreme points of the envelope ball (finite symmetric list).

        Raises ``NotImplementedError`` for smooth balls, which have no
        finite atomic description.
        """
        raise NotImplementedError(
            f"{type(self).__name__} has no finite atomic description"
        )

    @property
    def is_atomic(self) -> bool:
        try:
            self.envelope_atoms()
            return True
        except NotImplementedError:
            return False


def _dedup_rows(rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Drop duplicate rows (within tol, scale-aware), keeping first seen."""
    out: list[np.ndarray] = []
    scale = max(1.0, float(np.abs(rows).max()) if rows.size else 1.0)
    for r in rows:
        if not any(np.max(np.abs(r - o)) <= tol * scale for o in out):
            out.append(r)
    return np.array(out).reshape(len(out), rows.shape[1])


@dataclass(frozen=True, eq=False)
class WeightedLp(QuasiNormedSpace):
    """Weighted p-gauge: ``(sum_i w_i |x_i|^p)^(1/p)``, or ``max_i w_i |x_i|``
    when p is infinite.  Weights are strictly positive; ``r_exponent`` is
    ``min(p, 1)``."""

    p: float
    weights: np.ndarray

    def __post_init__(self):
        if not (self.p > 0):
            raise ValueError("p must be positive (math.inf allowed)")
        w = as_vector(self.weights)
        if w.size < 1 or np.any(w <= 0):
            raise ValueError("weights must be positive and nonempty")
        object.__setattr__(self, "weights", frozen_array(w))

    @classmethod
    def unweighted(cls, p: float, dim: int) -> "WeightedLp":
        return cls(p, np.ones(dim))

    @classmethod
    def euclidean(cls, dim: int) -> "WeightedLp":
        return cls(2.0, np.ones(dim))

    @classmethod
    def from_scales(cls, p: float, scales) -> "WeightedLp":
        """Space whose unit ball touches axis i at distance ``scales[i]``."""
        s = as_vector(scales)
        if np.any(s <= 0):
            raise ValueError("scales must be positive")
        if math.isinf(p):
            return cls(p, 1.0 / s)
        return cls(p, s ** (-p))

    @property
    def dim(self) -> int:  # type: ignore[override]
        return int(self.weights.shape[0])

    @property
    def r_exponent(self) -> float:
        return min(self.p, 1.0)

    @cached_property
    def scales(self) -> np.ndarray:
        """Distance from the origin to the ball boundary along each axis."""
        if math.isinf(self.p):
            return frozen_array(1.0 / self.weights)
        return frozen_array(self.weights ** (-1.0 / self.p))

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0 and bool(np.all(self.weights == 1.0))

    @property
    def is_unweighted(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    def gauge(self, x) -> float:
        v = as_vector(x, dim=self.dim)
        if math.isinf(self.p):
            return float(np.max(self.weights * np.abs(v)))
        return float((self.weights @ np.abs(v) ** self.p) ** (1.0 / self.p))

    def gauge_many(self, points) -> np.ndarray:
        pts = as_matrix(points, cols=self.dim)
        if math.isinf(self.p):
            return np.max(np.abs(pts) * self.weights, axis=1)
        return (np.abs(pts) ** self.p @ self.weights) ** (1.0 / self.p)

    def envelope_gauge(self, x) -> float:
        v = as_vector(x, dim=self.dim)
        if self.p >= 1.0:
            return self.gauge(v)
        return float(self.weights ** (1.0 / self.p) @ np.abs(v))

    def dual_gauge(self, f) -> float:
        v = as_vector(f, dim=self.dim)
        s = np.asarray(self.scales)
        if self.p <= 1.0:
            return float(np.max(np.abs(v) * s))
        if math.isinf(self.p):
            return float(np.abs(v) @ s)
        q = self.p / (self.p - 1.0)
        return float(((np.abs(v) * s) ** q).sum() ** (1.0 / q))

    def envelope_space(self) -> "WeightedLp":
        if self.p >= 1.0:
            return self
        return WeightedLp(1.0, self.weights ** (1.0 / self.p))

    def dual_space(self) -> "WeightedLp":
        """Space whose gauge is this space's dual gauge (exact)."""
        s = np.asarray(self.scales)
        if self.p <= 1.0:
            return WeightedLp.from_scales(math.inf, 1.0 / s)
        if math.isinf(self.p):
            return WeightedLp.from_scales(1.0, 1.0 / s)
        q = self.p / (self.p - 1.0)
        return WeightedLp.from_scales(q, 1.0 / s)

    def envelope_atoms(self) -> np.ndarray:
        s = np.asarray(self.scales)
        d = self.dim
        if self.p <= 1.0:
            eye = np.diag(s)
            return np.vstack([eye, -eye])
        if math.isinf(self.p):
            if d > MAX_ATOMS:
                raise NotImplementedError("box corner enumeration capped at dim 12")
            corners = np.array(list(itertools.product((-1.0, 1.0), repeat=d)))
            return corners * s
        raise NotImplementedError("smooth Lp balls (1 < p < inf) are not atomic")


@dataclass(frozen=True, eq=False)
class Schatten(QuasiNormedSpace):
    """Singular-value p-gauge on rows x cols matrices, flattened row-major.

    ``p`` is restricted to (0, 2] and the shape to at most 6 per side.
    """

    p: float
    rows: int
    cols: int

    def __post_init__(self):
        if not (0 < self.p <= 2):
            raise ValueError("Schatten exponent must lie in (0, 2]")
        if not (1 <= self.rows <= 6 and 1 <= self.cols <= 6):
            raise ValueError("Schatten shapes are capped at 6 per side")

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.rows * self.cols

    @property
    def r_exponent(self) -> float:
        return min(self.p, 1.0)

    def _mat(self, x) -> np.ndarray:
        v = as_vector(x, dim=self.dim)
        return v.reshape(self.rows, self.cols)

    def gauge(self, x) -> float:
        s = singular_values(self._mat(x))
        return float((s**self.p).sum() ** (1.0 / self.p))

    def envelope_gauge(self, x) -> float:
        s = singular_values(self._mat(x))
        if self.p >= 1.0:
            return float((s**self.p).sum() ** (1.0 / self.p))
        return float(s.sum())

    def dual_gauge(self, f) -> float:
        s = singular_values(self._mat(f))
        if self.p <= 1.0:
            return float(s.max())
        q = self.p / (self.p - 1.0)
        return float((s**q).sum() ** (1.0 / q))

    def envelope_space(self) -> "Schatten":
        if self.p >= 1.0:
            return self
        return Schatten(1.0, self.rows, self.cols)


@dataclass(frozen=True, eq=False)
class Polytope(QuasiNormedSpace):
    """Convex hull of a symmetric full-dimensional vertex set; r_exponent 1.

    The gauge is the optimal value of the exact linear program
    ``min sum(lam) : vertices.T @ lam = x, lam >= 0`` (HiGHS, deterministic
    for fixed input).  For dim <= 5 the equivalent facet form
    ``max_f <n_f, x>`` is used for vectorized evaluation; the two agree to
    solver precision and the test suite checks that.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = as_matrix(self.vertices)
        if v.shape[0] < 2:
            raise ValueError("need at least one symmetric vertex pair")
        scale = float(np.abs(v).max())
        if scale <= 0:
            raise ValueError("vertices are all zero")
        for row in v:
            if not np.any(np.max(np.abs(v + row), axis=1) <= 1e-12 * scale):
                raise ValueError("vertex set is not symmetric")
        if np.linalg.matrix_rank(v, tol=1e-10 * scale) < v.shape[1]:
            raise DegenerateMatrixError("vertices do not span the space")
        object.__setattr__(self, "vertices", frozen_array(v))

    @property
    def dim(self) -> int:  # type: ignore[override]
        return int(self.vertices.shape[1])

    @property
    def r_exponent(self) -> float:
        return 1.0

    def gauge(self, x) -> float:
        v = as_vector(x, dim=self.dim)
        if not np.any(v):
            return 0.0
        m = self.vertices.shape[0]
        res = linprog(
            np.ones(m),
            A_eq=self.vertices.T,
            b_eq=v,
            bounds=(0, None),
            method="highs",
        )
        if res.status != 0:
            raise RuntimeError(f"gauge LP failed with status {res.status}")
        return float(res.fun)

    def gauge_many(self, points) -> np.ndarray:
        pts = as_matrix(points, cols=self.dim)
        if self.dim <= 5:
            return np.max(pts @ self.facet_normals.T, axis=1)
        return np.array([self.gauge(p) for p in pts])

    def envelope_gauge(self, x) -> float:
        return self.gauge(x)

    def dual_gauge(self, f) -> float:
        v = as_vector(f, dim=self.dim)
        return float(np.max(self.vertices @ v))

    def envelope_space(self) -> "Polytope":
        return self

    def envelope_atoms(self) -> np.ndarray:
        return np.asarray(self.extreme_vertices)

    @cached_property
    def extreme_vertices(self) -> np.ndarray:
        """The subset of vertices that are extreme points of the hull."""
        v = np.asarray(self.vertices)
        if self.dim == 1:
            t = float(np.abs(v).max())
            return frozen_array([[t], [-t]])
        hull = ConvexHull(v)
        return frozen_array(_dedup_rows(v[hull.vertices]))

    @cached_property
    def facet_normals(self) -> np.ndarray:
        """Outer normals n_f with the ball equal to {x : <n_f, x> <= 1}."""
        v = np.asarray(self.vertices)
        if self.dim == 1:
            t = float(np.abs(v).max())
            return frozen_array([[1.0 / t], [-1.0 / t]])
        if self.dim > 5:
            raise NotImplementedError("facet enumeration capped at dim 5")
        hull = ConvexHull(v)
        eqs = hull.equations  # rows [a, b] with a @ x + b <= 0 inside
        normals = eqs[:, :-1] / (-eqs[:, -1:])
        return frozen_array(_dedup_rows(normals))

    def dual_space(self) -> "Polytope":
        """Polytope whose gauge is this one's dual gauge (polar body)."""
        n = np.asarray(self.facet_normals)
        return Polytope(_dedup_rows(np.vstack([n, -n])))


@dataclass(frozen=True, eq=False)
class RConvexAtoms(QuasiNormedSpace):
    """r-convex hull of at most 12 spanning atoms, 0 < r <= 1.

    ``gauge(x) = min (sum |lam_i|^r)^(1/r)`` over decompositions
    ``x = sum lam_i a_i``.  A minimizer is supported on at most ``dim``
    atoms, so the gauge is computed exactly by enumerating index subsets of
    size <= dim and solving each linear system.
    """

    atoms: np.ndarray
    r: float

    def __post_init__(self):
        a = as_matrix(self.atoms)
        if not (0 < self.r <= 1):
            raise ValueError("r must lie in (0, 1]")
        if a.shape[0] > MAX_ATOMS:
            raise ValueError(f"more than {MAX_ATOMS} atoms rejected (desk scale)")
        norms = np.linalg.norm(a, axis=1)
        if a.shape[0] < 1 or np.any(norms <= 0):
            raise ValueError("atoms must be nonzero")
        if np.linalg.matrix_rank(a, tol=1e-10 * norms.max()) < a.shape[1]:
            raise DegenerateMatrixError("atoms do not span the space")
        object.__setattr__(self, "atoms", frozen_array(a))

    @property
    def dim(self) -> int:  # type: ignore[override]
        return int(self.atoms.shape[1])

    @property
    def r_exponent(self) -> float:
        return self.r

    @cached_property
    def _subset_solvers(self) -> list[tuple[tuple[int, ...], np.ndarray, np.ndarray]]:
        # (indices, pinv of the (d x |S|) atom block, the block itself)
        a = np.asarray(self.atoms)
        m, d = a.shape
        out = []
        for size in range(1, min(m, d) + 1):
            for idx in itertools.combinations(range(m), size):
                block = a[list(idx)].T  # d x size
                out.append((idx, np.linalg.pinv(block), block))
        return out

    def gauge(self, x) -> float:
        v = as_vector(x, dim=self.dim)
        return float(self.gauge_many(v.reshape(1, -1))[0])

    def gauge_many(self, points) -> np.ndarray:
        pts = as_matrix(points, cols=self.dim)
        n = pts.shape[0]
        scale = np.maximum(1.0, np.abs(pts).max(axis=1))
        best = np.full(n, np.inf)
        for _, pinv, block in self._subset_solvers:
            lam = pts @ pinv.T  # n x |S|
            resid = np.abs(lam @ block.T - pts).max(axis=1)
            vals = (np.abs(lam) ** self.r).sum(axis=1) ** (1.0 / self.r)
            ok = resid <= _FEAS_TOL * scale
            best = np.where(ok & (vals < best), vals, best)
        best = np.where(np.abs(pts).max(axis=1) == 0.0, 0.0, best)
        if np.any(np.isinf(best)):
            raise RuntimeError("no feasible decomposition found (atoms degenerate?)")
        return best

    def envelope_gauge(self, x) -> float:
        v = as_vector(x, dim=self.dim)
        if not np.any(v):
            return 0.0
        a = np.asarray(self.atoms)
        m = a.shape[0]
        # min sum(pos + neg) s.t. atoms.T @ (pos - neg) = x
        res = linprog(
            np.ones(2 * m),
            A_eq=np.hstack([a.T, -a.T]),
            b_eq=v,
            bounds=(0, None),
            method="highs",
        )
        if res.status != 0:
            raise RuntimeError(f"envelope LP failed with status {res.status}")
        return float(res.fun)

    def dual_gauge(self, f) -> float:
        v = as_vector(f, dim=self.dim)
        return float(np.max(np.abs(np.asarray(self.atoms) @ v)))

    def envelope_space(self) -> "Polytope":
        a = np.asarray(self.atoms)
        return Polytope(_dedup_rows(np.vstack([a, -a])))

    def envelope_atoms(self) -> np.ndarray:
        a = np.asarray(self.atoms)
        return _dedup_rows(np.vstack([a, -a]))


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """A linear map between two concrete spaces, as a dense matrix acting on
    coordinates (shape ``target.dim x source.dim``)."""

    matrix: np.ndarray
    source: QuasiNormedSpace
    target: QuasiNormedSpace

    def __post_init__(self):
        m = as_matrix(self.matrix, rows=self.target.dim, cols=self.source.dim)
        object.__setattr__(self, "matrix", frozen_array(m))

    @classmethod
    def identity(cls, space: QuasiNormedSpace) -> "OperatorSpec":
        return cls(np.eye(space.dim), space, space)

    def apply(self, x) -> np.ndarray:
        return np.asarray(self.matrix) @ as_vector(x, dim=self.source.dim)

    def apply_many(self, points) -> np.ndarray:
        return as_matrix(points, cols=self.source.dim) @ np.asarray(self.matrix).T


@dataclass(frozen=True)
class HornResult:
    lhs: float
    rhs: float
    p: float
    k: int
    passed: bool


def horn_check(a, b, p: float, k: int, slack: float = 1e-9) -> HornResult:
    """Partial-sum comparison of p-th powers of singular values.

    Checks ``sum_{j<=k} s_j(ab)^p <= sum_{j<=k} s_j(a)^p s_j(b)^p`` for
    0 < p <= 1, the quasi-norm analogue of the classical singular value
    product inequality.
    """
    A = as_matrix(a)
    B = as_matrix(b)
    if A.shape[1] != B.shape[0]:
        raise ValueError("shapes do not compose")
    if not (0 < p <= 1):
        raise ValueError("p must lie in (0, 1]")
    kmax = min(A.shape[0], A.shape[1], B.shape[1])
    if not (1 <= k <= kmax):
        raise ValueError(f"k must lie in [1, {kmax}]")
    s_ab = singular_values(A @ B)[:k]
    s_a = singular_values(A)[:k]
    s_b = singular_values(B)[:k]
    lhs = float((s_ab**p).sum())
    rhs = float(((s_a * s_b) ** p).sum())
    return HornResult(lhs, rhs, p, k, lhs <= rhs + slack)


def quotient(space: QuasiNormedSpace, kernel_basis) -> QuasiNormedSpace:
    """Quotient of a space by the span of ``kernel_basis``.

    The quotient ball is the orthogonal projection of the unit ball onto the
    kernel's orthogonal complement, expressed in the deterministic
    orthonormal basis produced by :func:`orthonormal_complement`.  Supported
    whenever the ball has a finite atomic description (polytopes, atom
    hulls, weighted Lp with p <= 1 or p = inf): the projection of a (r-)convex
    hull is the (r-)convex hull of the projected generators.
    """
    rows = [as_vector(r, dim=space.dim) for r in kernel_basis]
    if not rows:
        return space
    K = np.array(rows)
    U = orthonormal_complement(K, dim=space.dim)
    if U.shape[0] == 0:
        raise ValueError("kernel spans the whole space; quotient is trivial")

    def project(mat):
        out = _dedup_rows(np.asarray(mat) @ U.T)
        keep = np.linalg.norm(out, axis=1) > 1e-12
        return out[keep]

    if isinstance(space, Polytope):
        return Polytope(project(space.vertices))
    if isinstance(space, RConvexAtoms):
        return RConvexAtoms(project(space.atoms), space.r)
    if isinstance(space, WeightedLp):
        if space.p > 1.0 and not math.isinf(space.p):
            raise ValueError(
                "quotients of smooth Lp balls are not representable here"
            )
        atoms = project(space.envelope_atoms())
        if space.p < 1.0:
            return RConvexAtoms(atoms, space.p)
        return Polytope(atoms)
    raise ValueError(f"unsupported representation {type(space).__name__}")


def coordinate_section(space: WeightedLp, indices) -> WeightedLp:
    """Restriction of a weighted Lp space to a coordinate subset."""
    if not isinstance(space, WeightedLp):
        raise ValueError(
            "coordinate sections are only defined for WeightedLp spaces; "
            "use polytope_section for polytopes in dim <= 3"
        )
    idx = sorted(set(int(i) for i in indices))
    if not idx or idx[0] < 0 or idx[-1] >= space.dim:
        raise ValueError("index set out of range or empty")
    return WeightedLp(space.p, np.asarray(space.weights)[idx])


def polytope_section(space: Polytope, basis) -> Polytope:
    """Exact section of a polytope ball by a subspace, in dim <= 3.

    ``basis`` has the subspace's spanning rows (1 or 2 of them).  The result
    is expressed in the orthonormal basis obtained by Gram-Schmidt on those
    rows (in order), via intersection of the facet inequalities with the
    subspace.
    """
    if not isinstance(space, Polytope):
        raise ValueError("polytope_section needs a Polytope")
    if space.dim > 3:
        raise ValueError("sections by general subspaces capped at dim 3")
    B = as_matrix(np.array([as_vector(r, dim=space.dim) for r in basis]))
    k = B.shape[0]
    if not (1 <= k < space.dim):
        raise ValueError("subspace must be proper and nonzero")
    # orthonormalize rows in order
    U = []
    for row in B:
        r = row.astype(float)
        for u in U:
            r -= (r @ u) * u
        nrm = np.linalg.norm(r)
        if nrm <= 1e-10:
            raise DegenerateMatrixError("section basis rows are dependent")
        U.append(r / nrm)
    U = np.array(U)
    A = np.asarray(space.facet_normals) @ U.T  # constraints <a, y> <= 1
    if k == 1:
        pos = A[:, 0]
        t = 1.0 / float(pos.max())
        return Polytope([[t], [-t]])
    # k == 2: vertex enumeration of {y : A @ y <= 1}
    verts = []
    m = A.shape[0]
    for i, j in itertools.combinations(range(m), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) <= 1e-12:
            continue
        y = np.linalg.solve(M, np.ones(2))
        if np.all(A @ y <= 1.0 + 1e-9):
            verts.append(y)
    if not verts:
        raise RuntimeError("no section vertices found")
    return Polytope(_dedup_rows(np.array(verts)))
