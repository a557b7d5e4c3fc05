"""Ellipsoids, volumes, and volume-ratio inequalities.

The central objects are centered ellipsoids ``{x : x' Q x <= 1}`` with Q
symmetric positive-definite.  This module computes

* minimum-volume enclosing ellipsoids of symmetric point sets (Khachiyan
  multiplicative updates plus away steps, then rescaled so every input
  point lies inside exactly);
* enclosing/inscribed ellipsoids of concrete unit balls;
* volumes, exactly where a closed form or a fan triangulation applies and
  by rejection sampling inside the enclosing ellipsoid otherwise;
* the outer/inner volume ratios of a ball and the polar and
  section/projection inequalities built from them.

Monte-Carlo results carry a standard error and every randomized path is a
pure function of the supplied RandomSource.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull
from scipy.special import gammaln

from .numkernel import (
    DegenerateMatrixError,
    RandomSource,
    as_matrix,
    frozen_array,
    spd_power,
)
from .spaces import (
    Polytope,
    QuasiNormedSpace,
    RConvexAtoms,
    Schatten,
    WeightedLp,
    coordinate_section,
)

_MC_MIN_SAMPLES = 10_000


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Centered ellipsoid {x : x' shape x <= 1}."""

    shape: np.ndarray

    def __post_init__(self):
        q = as_matrix(self.shape)
        if q.shape[0] != q.shape[1]:
            raise ValueError("shape matrix must be square")
        scale = max(1.0, float(np.abs(q).max()))
        if float(np.abs(q - q.T).max()) > 1e-10 * scale:
            raise ValueError("shape matrix must be symmetric")
        if np.linalg.eigvalsh(q).min() <= 0:
            raise DegenerateMatrixError("shape matrix must be positive-definite")
        object.__setattr__(self, "shape", frozen_array(0.5 * (q + q.T)))

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0) -> "Ellipsoid":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls(np.eye(dim) / radius**2)

    @property
    def dim(self) -> int:
        return int(self.shape.shape[0])

    def volume(self) -> float:
        sign, logdet = np.linalg.slogdet(self.shape)
        assert sign > 0
        return float(unit_ball_volume(self.dim) * math.exp(-0.5 * logdet))

    def polar(self) -> "Ellipsoid":
        return Ellipsoid(spd_power(self.shape, -1.0))

    def quadratic_form(self, points) -> np.ndarray:
        pts = as_matrix(points, cols=self.dim)
        return np.einsum("ij,jk,ik->i", pts, self.shape, pts)

    def boundary_radii(self, directions) -> np.ndarray:
        """Distance to the boundary along each (nonzero) direction row."""
        return 1.0 / np.sqrt(self.quadratic_form(directions))

    def contains(self, points, tol: float = 1e-9) -> bool:
        return bool(np.all(self.quadratic_form(points) <= 1.0 + tol))

    def sample_interior(self, rng: RandomSource, n: int) -> np.ndarray:
        """n points uniform in the ellipsoid (pure in (rng, n))."""
        g = rng.generator()
        d = self.dim
        x = g.standard_normal((n, d))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        radii = g.random(n) ** (1.0 / d)
        return (x * radii[:, None]) @ spd_power(self.shape, -0.5)


def unit_ball_volume(dim: int) -> float:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return float(math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0))


def mvee(points, tolerance: float = 1e-7, max_iter: int = 200_000) -> Ellipsoid:
    """Minimum-volume centered ellipsoid enclosing a symmetric point set.

    Khachiyan-style multiplicative weight updates on the dual problem
    ``max log det sum_i u_i x_i x_i'`` with away/drop steps for the
    support weights, stopped once every point satisfies
    ``x' Q x <= (1 + tolerance) * dim`` in the unnormalized form; the
    result is then rescaled so the largest quadratic form value is exactly
    1, which makes it enclosing regardless of the stopping point.  The
    volume is optimal within a factor ``(1 + tolerance) ** (dim / 2)``.
    """
    X = as_matrix(points)
    m, d = X.shape
    if not (0 < tolerance <= 1e-2):
        raise ValueError("tolerance must lie in (0, 1e-2]")
    scale = float(np.abs(X).max())
    if scale <= 0 or np.linalg.matrix_rank(X, tol=1e-10 * scale) < d:
        raise DegenerateMatrixError("point set does not span the space")
    for row in X:
        if not np.any(np.max(np.abs(X + row), axis=1) <= 1e-9 * scale):
            raise ValueError("point set is not symmetric")

    u = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        M = X.T @ (u[:, None] * X)
        kappa = np.einsum("ij,jk,ik->i", X, np.linalg.inv(M), X)
        jp = int(np.argmax(kappa))
        kp = kappa[jp]
        if kp <= d * (1.0 + tolerance):
            break
        support = u > 0.0
        jn = int(np.where(support)[0][np.argmin(kappa[support])])
        kn = kappa[jn]
        if kp - d >= d - kn:
            alpha = (kp - d) / (d * (kp - 1.0))
            j = jp
            drop = False
        else:
            cap = -u[jn] / (1.0 - u[jn])
            if kn >= 1.0 + 1e-12:
                alpha = (kn - d) / (d * (kn - 1.0))  # negative: away step
            else:
                alpha = cap  # formula degenerates below 1; drop the point
            drop = alpha <= cap
            alpha = max(alpha, cap)
            j = jn
        u *= 1.0 - alpha
        u[j] = 0.0 if drop else u[j] + alpha
        u /= u.sum()
    else:
        raise RuntimeError("enclosing ellipsoid iteration did not converge")
    M = X.T @ (u[:, None] * X)
    Q = np.linalg.inv(d * M)
    Q = 0.5 * (Q + Q.T)
    worst = float(np.einsum("ij,jk,ik->i", X, Q, X).max())
    return Ellipsoid(Q / worst)


def mvee_of_ball(space: QuasiNormedSpace, tolerance: float = 1e-7) -> Ellipsoid:
    """Minimum-volume ellipsoid enclosing a concrete unit ball.

    Atomic balls reduce to :func:`mvee` of the envelope's extreme points.
    Smooth weighted Lp balls have closed forms: for 1 < p <= 2 the support
    of the quadratic form over the ball is attained on the axes, giving the
    axis-aligned ellipsoid with the ball's own axis scales; for p > 2 a
    symmetric Lagrange computation yields per-axis semiaxes
    ``scale_i * dim ** ((p - 2) / (2 p))`` (for p = inf, ``scale_i * sqrt(dim)``).
    """
    if isinstance(space, Polytope):
        return mvee(space.vertices, tolerance)
    if isinstance(space, RConvexAtoms):
        return mvee(space.envelope_atoms(), tolerance)
    if isinstance(space, WeightedLp):
        s = np.asarray(space.scales)
        if space.p <= 1.0:
            return mvee(space.envelope_atoms(), tolerance)
        if space.p <= 2.0:
            return Ellipsoid(np.diag(1.0 / s**2))
        d = space.dim
        if math.isinf(space.p):
            factor = float(d)
        else:
            factor = d ** ((space.p - 2.0) / space.p)
        return Ellipsoid(np.diag(1.0 / (s**2 * factor)))
    raise ValueError(f"no enclosing ellipsoid path for {type(space).__name__}")


@dataclass(frozen=True)
class InscribedResult:
    ellipsoid: Ellipsoid
    maximal: bool  # False when the ball surrogate was used


def inscribed_ellipsoid(space: QuasiNormedSpace, tolerance: float = 1e-7) -> InscribedResult:
    """Largest inscribed ellipsoid of a convex ball, or a certified
    inscribed ball for unweighted non-convex Lp.

    Convex cases go through polarity: the maximal inscribed ellipsoid of a
    symmetric convex body is the polar of the minimum-volume ellipsoid of
    the polar body.  For non-convex unweighted Lp the largest inscribed
    *ball* (radius ``dim ** (1/2 - 1/p)``, touching the diagonal) is
    returned with ``maximal=False``; by sign/permutation symmetry it is the
    natural round surrogate, and it is certified inscribed.
    """
    if isinstance(space, Polytope):
        normals = np.asarray(space.facet_normals)
        outer = mvee(np.vstack([normals, -normals]), tolerance)
        return InscribedResult(outer.polar(), True)
    if isinstance(space, RConvexAtoms):
        if space.r == 1.0:
            return inscribed_ellipsoid(space.envelope_space(), tolerance)
        raise NotImplementedError(
            "no inscribed ellipsoid for r-convex atom hulls with r < 1"
        )
    if isinstance(space, WeightedLp):
        s = np.asarray(space.scales)
        d = space.dim
        if math.isinf(space.p) or space.p >= 2.0:
            return InscribedResult(Ellipsoid(np.diag(1.0 / s**2)), True)
        if space.p >= 1.0:
            semi = s * d ** (0.5 - 1.0 / space.p)
            return InscribedResult(Ellipsoid(np.diag(1.0 / semi**2)), True)
        if not space.is_unweighted:
            raise NotImplementedError(
                "inscribed ellipsoids for weighted Lp with p < 1 are not "
                "implemented; only the unweighted ball surrogate is"
            )
        radius = float(s[0]) * d ** (0.5 - 1.0 / space.p)
        return InscribedResult(Ellipsoid.ball(d, radius), False)
    raise NotImplementedError(
        f"no inscribed ellipsoid path for {type(space).__name__}"
    )


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    method: str  # closed-form | triangulation | monte-carlo
    stderr: float = 0.0
    samples: int = 0


def _lp_ball_volume(space: WeightedLp) -> float:
    s = np.asarray(space.scales)
    n = space.dim
    if math.isinf(space.p):
        return float(2.0**n * np.prod(s))
    p = space.p
    log_vol = n * (math.log(2.0) + gammaln(1.0 + 1.0 / p)) - gammaln(1.0 + n / p)
    return float(math.exp(log_vol) * np.prod(s))


def _fan_volume(vertices: np.ndarray) -> float:
    """Exact volume of a symmetric polytope via fan triangulation from 0."""
    v = np.asarray(vertices)
    d = v.shape[1]
    if d == 1:
        return 2.0 * float(np.abs(v).max())
    hull = ConvexHull(v)
    total = 0.0
    fact = math.factorial(d)
    for simplex in hull.simplices:
        total += abs(np.linalg.det(v[simplex])) / fact
    return float(total)


def _mc_volume(space: QuasiNormedSpace, rng: RandomSource, samples: int) -> VolumeEstimate:
    if rng is None:
        raise ValueError("monte-carlo volume needs a RandomSource")
    if samples < _MC_MIN_SAMPLES:
        raise ValueError(f"monte-carlo volume needs at least {_MC_MIN_SAMPLES} samples")
    proposal = mvee_of_ball(space)
    vol_e = proposal.volume()
    chunk = 200_000
    hits = 0
    done = 0
    piece = 0
    while done < samples:
        take = min(chunk, samples - done)
        pts = proposal.sample_interior(rng.split(piece), take)
        hits += int(np.count_nonzero(space.gauge_many(pts) <= 1.0))
        done += take
        piece += 1
    rate = hits / samples
    value = vol_e * rate
    stderr = vol_e * math.sqrt(max(rate * (1.0 - rate), 0.0) / samples)
    return VolumeEstimate(value, "monte-carlo", stderr, samples)


def volume(
    obj,
    method: str = "auto",
    rng: RandomSource | None = None,
    samples: int = 100_000,
) -> VolumeEstimate:
    """Volume of an ellipsoid or of a space's unit ball.

    ``method`` is one of ``auto``, ``closed-form``, ``triangulation``,
    ``monte-carlo``.  Auto picks the exact path where one exists (weighted
    Lp and ellipsoids in closed form, polytopes by fan triangulation in
    dim <= 3) and rejection sampling inside the enclosing ellipsoid
    otherwise.  Schatten balls have no supported volume path.
    """
    if isinstance(obj, Ellipsoid):
        if method not in ("auto", "closed-form"):
            raise ValueError("ellipsoid volumes are closed-form only")
        return VolumeEstimate(obj.volume(), "closed-form")
    if not isinstance(obj, QuasiNormedSpace):
        raise ValueError("volume needs an Ellipsoid or a QuasiNormedSpace")
    if isinstance(obj, Schatten):
        raise ValueError("volumes of Schatten balls are not supported")
    if method == "auto":
        if isinstance(obj, WeightedLp):
            method = "closed-form"
        elif isinstance(obj, Polytope):
            method = "triangulation" if obj.dim <= 3 else "monte-carlo"
        else:
            method = "monte-carlo"
    if method == "closed-form":
        if not isinstance(obj, WeightedLp):
            raise ValueError("closed-form volume needs a WeightedLp space")
        return VolumeEstimate(_lp_ball_volume(obj), "closed-form")
    if method == "triangulation":
        if not isinstance(obj, Polytope) or obj.dim > 5:
            raise ValueError("triangulation needs a Polytope of dim <= 5")
        return VolumeEstimate(_fan_volume(np.asarray(obj.vertices)), "triangulation")
    if method == "monte-carlo":
        return _mc_volume(obj, rng, samples)
    raise ValueError(f"unknown volume method {method!r}")


@dataclass(frozen=True)
class RatioEstimate:
    value: float
    stderr: float = 0.0
    surrogate_inscribed: bool = False


def vr_star(
    space: QuasiNormedSpace,
    rng: RandomSource | None = None,
    samples: int = 100_000,
    tolerance: float = 1e-7,
) -> RatioEstimate:
    """Outer volume ratio: (vol enclosing ellipsoid / vol ball) ** (1/dim)."""
    outer = mvee_of_ball(space, tolerance)
    vb = volume(space, "auto", rng, samples)
    d = space.dim
    value = (outer.volume() / vb.value) ** (1.0 / d)
    stderr = value * vb.stderr / (d * vb.value) if vb.stderr else 0.0
    return RatioEstimate(value, stderr)


def vr(
    space: QuasiNormedSpace,
    rng: RandomSource | None = None,
    samples: int = 100_000,
    tolerance: float = 1e-7,
) -> RatioEstimate:
    """Inner volume ratio: (vol ball / vol inscribed ellipsoid) ** (1/dim).

    When the inscribed ellipsoid is the ball surrogate (non-convex
    unweighted Lp), the ellipsoid volume is only a certified lower bound
    for the maximal one and the returned ratio is flagged via
    ``surrogate_inscribed``.
    """
    inner = inscribed_ellipsoid(space, tolerance)
    vb = volume(space, "auto", rng, samples)
    d = space.dim
    value = (vb.value / inner.ellipsoid.volume()) ** (1.0 / d)
    stderr = value * vb.stderr / (d * vb.value) if vb.stderr else 0.0
    return RatioEstimate(value, stderr, surrogate_inscribed=not inner.maximal)


def _dual_space(space: QuasiNormedSpace) -> QuasiNormedSpace:
    if isinstance(space, WeightedLp):
        return space.dual_space()
    if isinstance(space, Polytope):
        return space.dual_space()
    raise ValueError("dual ball needs a convex WeightedLp or Polytope")


@dataclass(frozen=True)
class SantaloResult:
    outer_ratio: float
    dual_inner_ratio: float
    slack: float
    passed: bool


def santalo_check(
    space: QuasiNormedSpace,
    rng: RandomSource | None = None,
    samples: int = 100_000,
    tolerance: float = 1e-7,
) -> SantaloResult:
    """Polar volume comparison: outer ratio of X at least inner ratio of X*.

    Requires a convex ball (r_exponent 1) so the dual ball is available in
    the same representation family.  The dual's inscribed ellipsoid is
    taken as the polar of the enclosing ellipsoid of X (an inscribed
    ellipsoid of the dual ball by polarity, so the reported dual ratio is
    an upper bound on the true inner ratio and the comparison is the
    stronger one).  Because an ellipsoid and its polar have an exact volume
    product, exact-volume paths reduce to the polar volume-product
    inequality with only float rounding as slack; Monte-Carlo paths get a
    three-standard-error allowance.
    """
    if space.r_exponent != 1.0:
        raise ValueError("polar comparison needs a convex ball")
    dual = _dual_space(space)
    d = space.dim
    outer_ell = mvee_of_ball(space, tolerance)
    vb = volume(space, "auto", rng.split(0) if rng else None, samples)
    vd = volume(dual, "auto", rng.split(1) if rng else None, samples)
    outer_value = (outer_ell.volume() / vb.value) ** (1.0 / d)
    outer_err = outer_value * vb.stderr / (d * vb.value) if vb.stderr else 0.0
    inner_ell = outer_ell.polar()
    inner_value = (vd.value / inner_ell.volume()) ** (1.0 / d)
    inner_err = inner_value * vd.stderr / (d * vd.value) if vd.stderr else 0.0
    slack = 3.0 * math.hypot(outer_err, inner_err) + 1e-9
    passed = outer_value >= inner_value - slack
    return SantaloResult(outer_value, inner_value, slack, passed)


@dataclass(frozen=True)
class SplitVolumeResult:
    ratio: float
    bound: int
    subset: tuple[int, ...]
    passed: bool


def section_projection_volume_check(
    space: WeightedLp, subset, slack: float = 1e-9
) -> SplitVolumeResult:
    """Coordinate split inequality for Lp balls with 1/p a small integer.

    For a weighted Lp ball B with p = 1/beta (beta in {1, 2, 3}) and a
    coordinate subset S of size k out of N, both the section by S and the
    orthogonal projection onto the complementary coordinates are weighted
    Lp balls again, and

        vol_k(B & S) * vol_{N-k}(proj B) / vol_N(B) <= binom(N beta, k beta)

    with equality in the unweighted case.  All three volumes are closed
    form here, so the check is exact up to float arithmetic.
    """
    if not isinstance(space, WeightedLp):
        raise ValueError("split volume check needs a WeightedLp space")
    beta = round(1.0 / space.p)
    if beta not in (1, 2, 3) or abs(1.0 / space.p - beta) > 1e-12:
        raise ValueError("need p = 1/beta with beta in {1, 2, 3}")
    idx = tuple(sorted(set(int(i) for i in subset)))
    n = space.dim
    if not idx or idx[0] < 0 or idx[-1] >= n or len(idx) >= n:
        raise ValueError("subset must be a proper nonempty coordinate set")
    comp = tuple(i for i in range(n) if i not in idx)
    k = len(idx)
    vol_section = _lp_ball_volume(coordinate_section(space, idx))
    vol_projection = _lp_ball_volume(coordinate_section(space, comp))
    vol_full = _lp_ball_volume(space)
    ratio = vol_section * vol_projection / vol_full
    bound = math.comb(n * beta, k * beta)
    return SplitVolumeResult(ratio, bound, idx, ratio <= bound * (1.0 + slack))


def rhull_volume_defect(
    space: Polytope,
    r: float,
    rng: RandomSource | None = None,
    samples: int = 100_000,
) -> RatioEstimate:
    """Volume defect of r-convexifying a polytope's extreme points.

    Returns ``(vol B / vol co_r(extreme points)) ** (1/dim)``.  For r = 1
    the r-hull is the polytope itself and the defect is exactly 1; for
    r < 1 the hull volume is estimated by rejection sampling against the
    exact atom gauge.
    """
    if not isinstance(space, Polytope):
        raise ValueError("rhull_volume_defect needs a Polytope")
    if space.dim > 3:
        raise ValueError("exact polytope volume capped at dim 3")
    if not (0 < r <= 1):
        raise ValueError("r must lie in (0, 1]")
    if r == 1.0:
        return RatioEstimate(1.0, 0.0)
    atoms = np.asarray(space.extreme_vertices)
    hull_space = RConvexAtoms(atoms, r)
    vol_b = _fan_volume(np.asarray(space.vertices))
    vol_r = _mc_volume(hull_space, rng, samples)
    d = space.dim
    value = (vol_b / vol_r.value) ** (1.0 / d)
    stderr = value * vol_r.stderr / (d * vol_r.value)
    return RatioEstimate(value, stderr)
