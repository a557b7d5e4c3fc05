"""Two-gauge splitting functionals and the scale of spaces between them.

A pair of gauges (g0, g1) on the same R^n induces, for each t > 0, the
splitting value ``K_s(t, x) = inf over x = x0 + x1 of
(g0(x0)^s + t^s g1(x1)^s)^(1/s)``.  Integrating its s = 2 version against
``t^(-1-2*theta)`` and normalizing by ``sqrt(theta*(1-theta))`` yields the
intermediate gauge ``theta_norm``.

Exact paths:

* both gauges quadratic and s = 2: the minimizing split solves the linear
  system ``(A0 + t^2 A1) x0 = t^2 A1 x``; simultaneous diagonalization of
  (A0, A1) also gives the intermediate gauge in closed form
  (``quadratic_theta_norm_exact``), which the numerical integrator is
  tested against;
* equal gauges and s equal to the gauge's triangle exponent r:
  ``K_r(t, x) = min(1, t) g(x)`` exactly.

Everything else is a budgeted derivative-free minimization over splits;
the returned value is then an upper estimate of the true infimum, bracketed
below by ``2^(1/s - 1/r) * max(min(1, t c) g0(x), min(1/C, t) g1(x))``
where c <= g1/g0 <= C are the pair's equivalence constants (sampled with
deterministic axis directions included, hence exact for the diagonal
families exercised in the experiments).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .numkernel import RandomSource, as_matrix, as_vector, frozen_array
from .spaces import OperatorSpec, QuasiNormedSpace, WeightedLp
from .randsigns import ConstantEstimate, _deterministic_tuple_starts, _search_tuples, rademacher_average


class Gauge:
    """A positively homogeneous functional on R^n used as one endpoint."""

    dim: int
    r_exponent: float

    def value(self, x) -> float:
        raise NotImplementedError

    def value_many(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.array([self.value(p) for p in pts])


@dataclass(frozen=True, eq=False)
class QuadraticGauge(Gauge):
    """g(x) = sqrt(x' A x) for a symmetric positive definite A."""

    matrix: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.matrix)
        if a.shape[0] != a.shape[1]:
            raise ValueError("quadratic gauge needs a square matrix")
        if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max())):
            raise ValueError("quadratic gauge needs a symmetric matrix")
        if np.linalg.eigvalsh(a).min() <= 0:
            raise ValueError("quadratic gauge needs a positive definite matrix")
        object.__setattr__(self, "matrix", frozen_array(a))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def r_exponent(self) -> float:
        return 1.0

    @classmethod
    def diagonal(cls, weights) -> "QuadraticGauge":
        w = as_vector(weights)
        if np.any(w <= 0):
            raise ValueError("diagonal weights must be positive")
        return cls(np.diag(w**2))

    def value(self, x) -> float:
        v = as_vector(x, self.dim)
        return math.sqrt(float(v @ self.matrix @ v))

    def value_many(self, points) -> np.ndarray:
        pts = as_matrix(np.atleast_2d(np.asarray(points, dtype=float)), cols=self.dim)
        return np.sqrt(np.einsum("ij,jk,ik->i", pts, self.matrix, pts))


@dataclass(frozen=True, eq=False)
class SpaceGauge(Gauge):
    """The gauge of a finite-dimensional quasi-normed space."""

    space: QuasiNormedSpace

    def __post_init__(self):
        if not isinstance(self.space, QuasiNormedSpace):
            raise TypeError("SpaceGauge wraps a space object, not another gauge")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def r_exponent(self) -> float:
        return self.space.r_exponent

    def value(self, x) -> float:
        return self.space.gauge(x)

    def value_many(self, points) -> np.ndarray:
        return self.space.gauge_many(points)


@dataclass(frozen=True, eq=False)
class NormPair:
    """Two gauges on the same coordinate space, ready for splitting."""

    gauge0: Gauge
    gauge1: Gauge

    def __post_init__(self):
        if self.gauge0.dim != self.gauge1.dim:
            raise ValueError("both gauges must live on the same dimension")

    @property
    def dim(self) -> int:
        return self.gauge0.dim

    @property
    def r_exponent(self) -> float:
        return min(self.gauge0.r_exponent, self.gauge1.r_exponent)

    @property
    def is_quadratic(self) -> bool:
        return isinstance(self.gauge0, QuadraticGauge) and isinstance(self.gauge1, QuadraticGauge)

    @property
    def is_diagonal(self) -> bool:
        return self.is_quadratic and all(
            np.count_nonzero(g.matrix - np.diag(np.diag(g.matrix))) == 0
            for g in (self.gauge0, self.gauge1)
        )

    @property
    def is_equal(self) -> bool:
        return self.gauge0 is self.gauge1

    @classmethod
    def from_spaces(cls, space0: QuasiNormedSpace, space1: QuasiNormedSpace) -> "NormPair":
        return cls(SpaceGauge(space0), SpaceGauge(space1))

    @classmethod
    def equal(cls, space: QuasiNormedSpace) -> "NormPair":
        g = SpaceGauge(space)
        return cls(g, g)

    @classmethod
    def diagonal(cls, weights0, weights1) -> "NormPair":
        return cls(QuadraticGauge.diagonal(weights0), QuadraticGauge.diagonal(weights1))

    @cached_property
    def _eigsplit(self) -> tuple[np.ndarray, np.ndarray]:
        """(mu, back) with back = V^{-1} for the congruence diagonalizing
        (A0, A1): V' A0 V = I, V' A1 V = diag(mu)."""
        if not self.is_quadratic:
            raise ValueError("eigen split needs a quadratic pair")
        mu, vecs = scipy.linalg.eigh(self.gauge1.matrix, self.gauge0.matrix)
        back = vecs.T @ self.gauge0.matrix
        return np.maximum(mu, 0.0), back

    def equivalence_constants(
        self, rng: RandomSource | None = None, directions: int = 1000
    ) -> tuple[float, float]:
        """Witnessed (c, C) with c <= g1(x)/g0(x) <= C on the sampled set.

        Axis directions and the all-ones vector are always included, so the
        constants are exact whenever the ratio extremes sit on axes (every
        diagonal pair).
        """
        key = (directions, None if rng is None else (rng.seed, rng.path))
        cache = self.__dict__.setdefault("_ratio_cache", {})
        if key in cache:
            return cache[key]
        if rng is None:
            rng = RandomSource(0, (97,))
        d = self.dim
        det = np.vstack([np.eye(d), np.ones((1, d))])
        extra = rng.generator().standard_normal((max(directions - det.shape[0], 0), d))
        pts = np.vstack([det, extra]) if extra.size else det
        g0 = self.gauge0.value_many(pts)
        g1 = self.gauge1.value_many(pts)
        if np.any(g0 <= 0) or np.any(g1 <= 0):
            raise ValueError("gauges must be positive on nonzero directions")
        ratio = g1 / g0
        out = (float(ratio.min()), float(ratio.max()))
        cache[key] = out
        return out


@dataclass(frozen=True)
class KValue:
    value: float  # best split found (an upper estimate unless exact)
    lower: float  # analytic lower bound on the true infimum
    exact: bool


def _quadratic_k(pair: NormPair, t: float, x: np.ndarray) -> tuple[float, np.ndarray]:
    a0 = pair.gauge0.matrix
    a1 = pair.gauge1.matrix
    system = a0 + t * t * a1
    # solve for the small component to stay accurate at extreme t
    if t >= 1.0:
        x1 = np.linalg.solve(system, a0 @ x)
        x0 = x - x1
    else:
        x0 = np.linalg.solve(system, t * t * (a1 @ x))
        x1 = x - x0
    val = math.sqrt(max(float(x0 @ a0 @ x0) + t * t * float(x1 @ a1 @ x1), 0.0))
    return val, x0


def _separable_scales(pair: NormPair, s: float) -> tuple[np.ndarray, np.ndarray] | None:
    """Per-coordinate scales (a, b) when the splitting infimum separates.

    The s-combination of the two gauges decomposes coordinate-by-coordinate
    exactly when both gauges aggregate coordinates with the same exponent s:
    diagonal quadratic pairs at s = 2, weighted Lp pairs with p0 = p1 = s,
    and any pair at all in dimension one.
    """
    if pair.dim == 1:
        e = np.ones(1)
        return pair.gauge0.value(e) * e, pair.gauge1.value(e) * e
    if s == 2.0 and pair.is_diagonal:
        return (
            np.sqrt(np.diag(pair.gauge0.matrix)),
            np.sqrt(np.diag(pair.gauge1.matrix)),
        )
    if isinstance(pair.gauge0, SpaceGauge) and isinstance(pair.gauge1, SpaceGauge):
        sp0, sp1 = pair.gauge0.space, pair.gauge1.space
        if (
            isinstance(sp0, WeightedLp)
            and isinstance(sp1, WeightedLp)
            and not math.isinf(sp0.p)
            and sp0.p == sp1.p == s
        ):
            return (
                np.asarray(sp0.weights) ** (1.0 / s),
                np.asarray(sp1.weights) ** (1.0 / s),
            )
    return None


def _separable_k(a: np.ndarray, b: np.ndarray, t: float, x: np.ndarray, s: float) -> float:
    """Exact splitting value from per-coordinate scales.

    Each coordinate minimizes ``(a y)^s + (t b (x - y))^s`` on its own: for
    s <= 1 the integrand is concave in the split, so an endpoint wins and
    the value is ``min(a, t b) |x_i|``; for s > 1 the interior optimum gives
    ``a (t b) / (a^q + (t b)^q)^(1/q) |x_i|`` with q = s/(s-1).
    """
    c = t * b
    if s <= 1.0:
        per = np.minimum(a, c) * np.abs(x)
    else:
        q = s / (s - 1.0)
        m = np.maximum(a, c)
        lo = np.minimum(a, c)
        # (a^q + c^q)^(1/q) = m (1 + (lo/m)^q)^(1/q), overflow-safe
        per = lo * np.abs(x) / (1.0 + (lo / m) ** q) ** (1.0 / q)
    return float(np.sum(per**s)) ** (1.0 / s)


def _search_k(
    pair: NormPair,
    t: float,
    x: np.ndarray,
    s: float,
    budget: int,
    warm_start: np.ndarray | None,
) -> tuple[float, np.ndarray]:
    g0, g1 = pair.gauge0, pair.gauge1

    def objective(x0):
        return g0.value(x0) ** s + (t * g1.value(x - x0)) ** s

    starts = [np.zeros_like(x), x.copy(), 0.5 * x]
    if pair.dim <= 8:
        for i in range(pair.dim):
            mask = np.zeros_like(x)
            mask[i] = x[i]
            starts.append(mask)
    if warm_start is not None:
        starts.append(np.asarray(warm_start, dtype=float))
    best_val = math.inf
    best_x0 = starts[0]
    for s0 in starts:
        val = objective(s0)
        if val < best_val:
            best_val, best_x0 = val, s0.copy()
        res = minimize(
            objective,
            s0,
            method="Nelder-Mead",
            options={"maxfev": budget, "xatol": 1e-10, "fatol": 1e-14},
        )
        if res.fun < best_val:
            best_val, best_x0 = float(res.fun), np.asarray(res.x, dtype=float)
    return best_val ** (1.0 / s), best_x0


def k_functional(
    pair: NormPair,
    s: float,
    t: float,
    x,
    budget: int = 200,
    warm_start=None,
    rng: RandomSource | None = None,
) -> KValue:
    """Splitting value of x at parameter t with exponent s.

    Exact when the pair is quadratic with s = 2 (linear-system split; a
    per-coordinate closed form for diagonal pairs), when both gauges are
    weighted Lp with p0 = p1 = s (the s-combination separates per
    coordinate), in dimension one for every pair, or when both gauges are
    the same object and s equals that gauge's triangle exponent.
    Otherwise a budgeted split search returns an upper estimate together
    with the analytic lower bound from the pair's equivalence constants.
    """
    if not (t > 0):
        raise ValueError("t must be positive")
    if budget <= 0:
        raise ValueError("the split search needs a positive budget")
    if not (s > 0) or s < pair.r_exponent:
        raise ValueError("need exponent s >= the pair's triangle exponent")
    v = as_vector(x, pair.dim)
    if not np.any(v):
        return KValue(0.0, 0.0, True)
    if pair.is_equal and s == pair.gauge0.r_exponent:
        val = min(1.0, t) * pair.gauge0.value(v)
        return KValue(val, val, True)
    scales = _separable_scales(pair, s)
    if scales is not None:
        val = _separable_k(scales[0], scales[1], t, v, s)
        return KValue(val, val, True)
    if pair.is_quadratic and s == 2.0:
        val, _ = _quadratic_k(pair, t, v)
        return KValue(val, val, True)
    val, _ = _search_k(pair, t, v, s, budget, warm_start)
    c, cap = pair.equivalence_constants(rng)
    r = pair.r_exponent
    scale = 2.0 ** (1.0 / s - 1.0 / r)
    lower = scale * max(
        min(1.0, t * c) * pair.gauge0.value(v),
        min(1.0 / cap, t) * pair.gauge1.value(v),
    )
    return KValue(val, min(lower, val), False)


def theta_norm_constant(theta: float) -> float:
    """Value of the intermediate gauge at 1 for the pair (|.|, |.|) on R."""
    if not (0 < theta < 1):
        raise ValueError("theta must lie in (0, 1)")
    return math.sqrt(theta * (1 - theta) * math.pi / (2.0 * math.sin(math.pi * theta)))


@dataclass(frozen=True)
class ThetaParams:
    """Quadrature layout for the intermediate gauge."""

    theta: float
    s: float = 2.0
    t_min: float = 1e-6
    t_max: float = 1e6
    nodes: int = 400
    budget: int = 200

    def __post_init__(self):
        if not (0 < self.theta < 1):
            raise ValueError("theta must lie in (0, 1)")
        if self.s != 2.0:
            raise ValueError("the intermediate gauge is defined from the s = 2 functional")
        if not (self.t_min <= 1e-4 and self.t_max >= 1e4):
            raise ValueError("the grid must cover at least [1e-4, 1e4]")
        if self.nodes < 50:
            raise ValueError("need at least 50 quadrature nodes")
        if self.budget <= 0:
            raise ValueError("need a positive split-search budget")


_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class ThetaNormResult:
    value: float
    theta: float
    tail_mass: float  # analytic share of the squared integral


def theta_norm(pair: NormPair, params: ThetaParams, x) -> ThetaNormResult:
    """Intermediate gauge by log-space trapezoid quadrature plus analytic
    tails ``g1(x)^2 t_min^(2-2 theta)/(2-2 theta)`` and
    ``g0(x)^2 t_max^(-2 theta)/(2 theta)``."""
    v = as_vector(x, pair.dim)
    th = params.theta
    if not np.any(v):
        return ThetaNormResult(0.0, th, 0.0)
    ts = np.geomspace(params.t_min, params.t_max, params.nodes)
    if pair.is_quadratic:
        mu, back = pair._eigsplit
        y2 = (back @ v) ** 2
        tt = ts[:, None] ** 2
        ks2 = np.sum(mu[None, :] * tt * y2[None, :] / (1.0 + mu[None, :] * tt), axis=1)
        ks = np.sqrt(ks2)
    else:
        ks = np.empty(params.nodes)
        warm = None
        for i, t in enumerate(ts):
            ks[i], warm = _search_k(pair, t, v, 2.0, params.budget, warm)
    u = np.log(ts)
    integrand = ks**2 * np.exp(-2.0 * th * u)
    core = float(_trapezoid(integrand, u))
    g0x = pair.gauge0.value(v)
    g1x = pair.gauge1.value(v)
    low_tail = g1x**2 * params.t_min ** (2.0 - 2.0 * th) / (2.0 - 2.0 * th)
    high_tail = g0x**2 * params.t_max ** (-2.0 * th) / (2.0 * th)
    total = core + low_tail + high_tail
    value = math.sqrt(th * (1.0 - th) * total)
    tail = (low_tail + high_tail) / total if total > 0 else 0.0
    return ThetaNormResult(value, th, tail)


def quadratic_theta_norm_exact(pair: NormPair, x, theta: float) -> float:
    """Closed form for quadratic pairs: diagonalize (A0, A1) simultaneously
    and sum the one-dimensional values coordinate by coordinate."""
    if not pair.is_quadratic:
        raise ValueError("closed form needs a quadratic pair")
    if not (0 < theta < 1):
        raise ValueError("theta must lie in (0, 1)")
    v = as_vector(x, pair.dim)
    mu, back = pair._eigsplit
    y2 = (back @ v) ** 2
    return theta_norm_constant(theta) * math.sqrt(float(np.sum(mu**theta * y2)))


def diagonal_theta_norm(weights0, weights1, x, theta: float) -> float:
    """Closed form for a pair of diagonal quadratic gauges."""
    w0 = as_vector(weights0)
    w1 = as_vector(weights1, w0.shape[0])
    v = as_vector(x, w0.shape[0])
    if np.any(w0 <= 0) or np.any(w1 <= 0):
        raise ValueError("weights must be positive")
    if not (0 < theta < 1):
        raise ValueError("theta must lie in (0, 1)")
    coeff = w0 ** (1.0 - theta) * w1**theta
    return theta_norm_constant(theta) * math.sqrt(float(np.sum((coeff * v) ** 2)))


def _endpoint_op_norm(matrix: np.ndarray, src: Gauge, tgt: Gauge, rng: RandomSource | None):
    """Operator norm between endpoint gauges; (value, kind)."""
    if isinstance(src, QuadraticGauge) and isinstance(tgt, QuadraticGauge):
        from .numkernel import spd_power, singular_values

        t_half = spd_power(tgt.matrix, 0.5)
        s_halfinv = spd_power(src.matrix, -0.5)
        return float(singular_values(t_half @ matrix @ s_halfinv)[0]), "exact"
    if isinstance(src, SpaceGauge) and isinstance(tgt, SpaceGauge):
        from .factorization import op_norm

        res = op_norm(OperatorSpec(matrix, src.space, tgt.space), rng=rng)
        return res.value, res.kind
    # mixed endpoints: witnessed maximum over sampled and axis directions
    if rng is None:
        rng = RandomSource(0, (31,))
    d = src.dim
    pts = np.vstack([np.eye(d), -np.eye(d), rng.generator().standard_normal((256, d))])
    num = tgt.value_many(pts @ np.asarray(matrix).T)
    den = src.value_many(pts)
    return float(np.max(num / den)), "lower-bound"


@dataclass(frozen=True)
class OperatorInterpolationResult:
    lhs: float  # largest intermediate-gauge amplification found
    rhs: float  # allowed bound: norm0^(1-theta) * norm1^theta
    endpoint0: float
    endpoint1: float
    endpoint_kind: str
    passed: bool


def interp_operator_bound_check(
    matrix,
    source: NormPair,
    target: NormPair,
    theta: float,
    params: ThetaParams | None = None,
    rng: RandomSource | None = None,
    directions: int = 24,
    tolerance: float = 0.02,
) -> OperatorInterpolationResult:
    """Verify that the intermediate-gauge norm of the operator is bounded
    by the geometric mean of its endpoint norms, on sampled unit vectors.

    The left side is a lower estimate of the true intermediate operator
    norm while the right side uses exact endpoint norms whenever an exact
    evaluation route exists, so a failure can only come from a broken
    estimator or a false bound.
    """
    m = as_matrix(matrix, rows=target.dim, cols=source.dim)
    if params is None:
        params = ThetaParams(theta)
    if params.theta != theta:
        raise ValueError("params.theta must match theta")
    if rng is None:
        rng = RandomSource(0, (47,))
    n0, kind0 = _endpoint_op_norm(m, source.gauge0, target.gauge0, rng.split(0))
    n1, kind1 = _endpoint_op_norm(m, source.gauge1, target.gauge1, rng.split(1))
    rhs = n0 ** (1.0 - theta) * n1**theta
    d = source.dim
    pts = np.vstack([np.eye(d), rng.split(2).generator().standard_normal((max(directions - d, 0), d))])
    lhs = 0.0
    for p in pts:
        denom = theta_norm(source, params, p).value
        if denom <= 0:
            continue
        lhs = max(lhs, theta_norm(target, params, m @ p).value / denom)
    kind = "exact" if kind0 == kind1 == "exact" else "lower-bound"
    passed = lhs <= rhs * (1.0 + tolerance)
    return OperatorInterpolationResult(lhs, rhs, n0, n1, kind, passed)


@dataclass(frozen=True)
class SumRuleResult:
    computed: float
    closed_form: float
    rel_gap: float
    passed: bool


def ell2_sum_theta_check(
    weights0, weights1, x, theta: float, params: ThetaParams | None = None, tolerance: float = 0.02
) -> SumRuleResult:
    """The intermediate gauge of a quadratic-sum pair equals the quadratic
    sum of the coordinate-wise intermediate gauges; compare the quadrature
    value against that closed form."""
    w0 = as_vector(weights0)
    w1 = as_vector(weights1, w0.shape[0])
    if w0.shape[0] > 4:
        raise ValueError("the sum rule check is sized for at most 4 coordinates")
    if params is None:
        params = ThetaParams(theta)
    if params.theta != theta:
        raise ValueError("params.theta must match theta")
    pair = NormPair.diagonal(w0, w1)
    computed = theta_norm(pair, params, x).value
    closed = diagonal_theta_norm(w0, w1, x, theta)
    gap = abs(computed - closed) / closed if closed > 0 else 0.0
    return SumRuleResult(computed, closed, gap, gap <= tolerance)


def equal_norms_type(
    space: QuasiNormedSpace,
    p: float,
    n: int,
    budget: int = 6,
    rng: RandomSource | None = None,
) -> ConstantEstimate:
    """Certified lower bound for the equal-norms variant: the best T with
    ``L2 sign average <= T * N^(1/p) * max_i gauge(x_i)`` over N-tuples."""
    if not (0 < p <= 2):
        raise ValueError("need 0 < p <= 2")
    if not (1 <= n <= 12):
        raise ValueError("need 1 <= N <= 12")
    scale = n ** (1.0 / p)

    def objective(V):
        m = float(np.max(space.gauge_many(V)))
        if m <= 1e-18:
            return 0.0
        avg = rademacher_average(space, V, 2.0)
        return avg.value / (scale * m)

    value, witness = _search_tuples(
        objective, _deterministic_tuple_starts(space.dim, n), (n, space.dim), budget, rng
    )
    return ConstantEstimate(value, "certified-lower-bound", witness)
