"""Operator norms, factorizations through Euclidean space, and the
derived distance and approximation quantities.

Quantities computed here come with explicit certification semantics:

* ``op_norm`` is exact when a finite extreme-point description makes the
  supremum a finite maximum (atomic source against a compatible target,
  quadratic source against a finite-dual-atom or quadratic target), and a
  certified lower bound from budgeted search otherwise;
* ``gamma2_upper`` reports the bracket [search lower bound on the operator
  norm, best factorization product found]; the product is a true upper
  bound exactly when both factor norms were evaluated exactly or as
  genuine upper bounds, recorded in ``certified``;
* ``euclidean_distance`` combines that bracket for the identity with the
  parallelogram-defect lower bound evaluated on vector pairs;
* ``envelope_distance`` is a certified lower bound with witness: the gauge
  maximized over the convex-envelope unit sphere;
* ``approx_numbers`` is exact (a singular value) for quadratic targets and
  an upper bound from low-rank fitting otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .numkernel import RandomSource, as_matrix, frozen_array, singular_values, spd_power, svd
from .randsigns import ConstantEstimate, _coordinate_ascent
from .spaces import OperatorSpec, Polytope, QuasiNormedSpace, RConvexAtoms, WeightedLp
from .geometry import mvee_of_ball

MAX_DUAL_CORNERS_DIM = 12


def _ball_atoms(space: QuasiNormedSpace) -> tuple[np.ndarray, float] | None:
    """Finite atom set whose e-convex hull is the unit ball, with e."""
    if isinstance(space, WeightedLp):
        if space.p <= 1.0 or math.isinf(space.p):
            try:
                return space.envelope_atoms(), space.r_exponent
            except NotImplementedError:
                return None
        return None
    if isinstance(space, (Polytope, RConvexAtoms)):
        return space.envelope_atoms(), space.r_exponent
    return None


def _dual_atoms(space: QuasiNormedSpace) -> np.ndarray | None:
    """Finite F with gauge(y) = max over f in F of <f, y>, if available."""
    if isinstance(space, WeightedLp):
        if math.isinf(space.p):
            w = np.asarray(space.weights)
            eye = np.diag(w)
            return np.vstack([eye, -eye])
        if space.p == 1.0:
            d = space.dim
            if d > MAX_DUAL_CORNERS_DIM:
                return None
            signs = np.array(list(itertools.product((-1.0, 1.0), repeat=d)))
            return signs * np.asarray(space.weights)
        return None
    if isinstance(space, Polytope):
        try:
            normals = np.asarray(space.facet_normals)
        except NotImplementedError:
            return None
        return np.vstack([normals, -normals])
    if isinstance(space, RConvexAtoms) and space.r == 1.0:
        return _dual_atoms(space.envelope_space())
    return None


def _quadratic_matrix(space: QuasiNormedSpace) -> np.ndarray | None:
    if isinstance(space, WeightedLp) and space.p == 2.0:
        return np.diag(np.asarray(space.weights))
    return None


@dataclass(frozen=True)
class OpNormResult:
    value: float
    kind: str  # exact | lower-bound | upper-bound


def _search_op_norm(u: OperatorSpec, budget: int, rng: RandomSource | None) -> float:
    m = np.asarray(u.matrix)
    d = u.source.dim

    def objective(x):
        den = u.source.gauge(x)
        if den <= 1e-18:
            return 0.0
        return u.target.gauge(m @ x) / den

    starts = [np.ones(d)]
    starts.extend(np.eye(d))
    starts.extend(-np.eye(d))
    if rng is None:
        rng = RandomSource(0, (13,))
    n_random = max(4, budget // 500)
    for i in range(n_random):
        starts.append(rng.split(3, i).generator().standard_normal(d))
    best = 0.0
    per_start = max(budget, 60 * d)
    for s in starts:
        val, _ = _coordinate_ascent(objective, s, per_start)
        best = max(best, val)
    return best


def op_norm(
    u: OperatorSpec,
    method: str = "auto",
    budget: int = 2000,
    rng: RandomSource | None = None,
) -> OpNormResult:
    """Largest gauge amplification of the operator.

    Exact routes: an atomic source whose hull exponent does not exceed the
    target's triangle exponent (finite maximum over atoms); a quadratic
    source against a quadratic target (largest singular value of the
    rescaled matrix) or against a target with finitely many dual atoms
    (Euclidean norms of pulled-back functionals).  Without an exact route,
    budgeted search returns a certified lower bound.
    """
    if method not in ("auto", "exact", "search"):
        raise ValueError("method must be auto, exact, or search")
    m = np.asarray(u.matrix)
    if not np.any(m):
        return OpNormResult(0.0, "exact")
    if method != "search":
        atoms = _ball_atoms(u.source)
        if atoms is not None and atoms[1] <= u.target.r_exponent + 1e-15:
            values = u.target.gauge_many(atoms[0] @ m.T)
            return OpNormResult(float(values.max()), "exact")
        qs = _quadratic_matrix(u.source)
        if qs is not None:
            inv_half = np.diag(1.0 / np.sqrt(np.diag(qs)))
            qt = _quadratic_matrix(u.target)
            if qt is not None:
                half_t = np.diag(np.sqrt(np.diag(qt)))
                return OpNormResult(float(singular_values(half_t @ m @ inv_half)[0]), "exact")
            dual = _dual_atoms(u.target)
            if dual is not None:
                pulled = dual @ m @ inv_half
                return OpNormResult(float(np.sqrt((pulled**2).sum(axis=1)).max()), "exact")
        if method == "exact":
            raise ValueError("no exact route for this source/target combination")
    if budget <= 0:
        raise ValueError("search mode needs a positive budget")
    return OpNormResult(_search_op_norm(u, budget, rng), "lower-bound")


def _op_norm_upper(
    matrix: np.ndarray, source: QuasiNormedSpace, target: QuasiNormedSpace
) -> tuple[float, str] | None:
    """A true upper bound on the operator norm, or None if unavailable.

    Beyond the exact routes, a quadratic source against any weighted Lp
    target admits the row bound (sum of w_i ||row_i||_2^p)^(1/p), since
    every coordinate of the image is at most the row's Euclidean length.
    """
    u = OperatorSpec(matrix, source, target)
    m = np.asarray(matrix)
    if not np.any(m):
        return 0.0, "exact"
    try:
        res = op_norm(u, method="exact")
        return res.value, "exact"
    except ValueError:
        pass
    qs = _quadratic_matrix(source)
    if qs is not None and isinstance(target, WeightedLp) and not math.isinf(target.p):
        rows = m @ np.diag(1.0 / np.sqrt(np.diag(qs)))
        lengths = np.sqrt((rows**2).sum(axis=1))
        w = np.asarray(target.weights)
        return float((w @ lengths**target.p) ** (1.0 / target.p)), "upper-bound"
    return None


@dataclass(frozen=True)
class FactorizationWitness:
    """A factorization u = v w through a Euclidean middle space."""

    inner_dim: int
    w: np.ndarray  # inner_dim x source_dim
    v: np.ndarray  # target_dim x inner_dim
    norm_w: float
    norm_v: float

    def __post_init__(self):
        object.__setattr__(self, "w", frozen_array(as_matrix(self.w, rows=self.inner_dim)))
        object.__setattr__(self, "v", frozen_array(as_matrix(self.v, cols=self.inner_dim)))

    @property
    def product(self) -> float:
        return self.norm_w * self.norm_v


@dataclass(frozen=True)
class Gamma2Result:
    lower: float
    upper: float
    witness: FactorizationWitness
    certified: bool  # upper is a true upper bound (factor norms exact/upper)


def _factor_norms(
    w: np.ndarray, v: np.ndarray, source: QuasiNormedSpace, target: QuasiNormedSpace,
    budget: int, rng: RandomSource | None,
) -> tuple[float, float, bool]:
    k = w.shape[0]
    middle = WeightedLp.euclidean(k)
    res_w = _op_norm_upper(w, source, middle)
    if res_w is None:
        nw = op_norm(OperatorSpec(w, source, middle), "search", max(budget, 500), rng).value
        w_ok = False
    else:
        nw, w_ok = res_w[0], True
    res_v = _op_norm_upper(v, middle, target)
    if res_v is None:
        nv = op_norm(OperatorSpec(v, middle, target), "search", max(budget, 500), rng).value
        v_ok = False
    else:
        nv, v_ok = res_v[0], True
    return nw, nv, w_ok and v_ok


def gamma2_upper(
    u: OperatorSpec,
    k: int | None = None,
    budget: int = 8,
    rng: RandomSource | None = None,
) -> Gamma2Result:
    """Bracket for the least factorization product through Euclidean space.

    The upper bound searches over invertible reparameterizations of an
    initial split (SVD-based; for identity operators also the enclosing
    ellipsoid shape root, which John's theorem puts within sqrt(dim) of
    optimal).  The lower bound is the operator norm, since any
    factorization's product dominates it.
    """
    m = np.asarray(u.matrix)
    dy, dx = m.shape
    s_all = singular_values(m) if np.any(m) else np.zeros(min(dx, dy))
    rank = int(np.sum(s_all > (s_all[0] if s_all.size else 0.0) * 1e-12))
    if k is None:
        k = max(rank, 1)
    if k < rank:
        raise ValueError("inner dimension below the operator rank")
    if not np.any(m):
        witness = FactorizationWitness(k, np.zeros((k, dx)), np.zeros((dy, k)), 0.0, 0.0)
        return Gamma2Result(0.0, 0.0, witness, True)
    if rng is None:
        rng = RandomSource(0, (53,))
    lower = op_norm(u, "auto", 2000, rng.split(0)).value

    s, u_left, vt = svd(m)
    roots = np.sqrt(s[:rank])
    w0 = np.zeros((k, dx))
    v0 = np.zeros((dy, k))
    w0[:rank] = roots[:, None] * vt[:rank]
    v0[:, :rank] = u_left[:, :rank] * roots[None, :]
    candidates = [(w0, v0)]
    if dx == dy == k and np.allclose(m, np.eye(dx), atol=1e-12):
        try:
            q = mvee_of_ball(u.source).shape
            candidates.append((spd_power(q, 0.5), spd_power(q, -0.5)))
        except (ValueError, NotImplementedError, RuntimeError):
            pass

    best = None
    for w, v in candidates:
        nw, nv, ok = _factor_norms(w, v, u.source, u.target, 500, rng.split(1))
        if best is None or nw * nv < best[0]:
            best = (nw * nv, w, v, nw, nv, ok)
    scale = 0.25
    for i in range(max(budget, 0)):
        _, wb, vb, _, _, _ = best
        t = np.eye(k) + scale * rng.split(2, i).generator().standard_normal((k, k))
        try:
            t_inv = np.linalg.inv(t)
        except np.linalg.LinAlgError:
            continue
        w, v = t @ wb, vb @ t_inv
        nw, nv, ok = _factor_norms(w, v, u.source, u.target, 500, rng.split(3, i))
        if nw * nv < best[0]:
            best = (nw * nv, w, v, nw, nv, ok)
        else:
            scale *= 0.7
    product, w, v, nw, nv, ok = best
    recon = v @ w
    if not np.allclose(recon, m, atol=1e-9 * max(1.0, np.abs(m).max())):
        raise RuntimeError("factorization drifted away from the operator")
    upper = product if ok else max(product, lower)
    witness = FactorizationWitness(k, w, v, nw, nv)
    return Gamma2Result(lower, upper, witness, ok)


@dataclass(frozen=True)
class DistanceBracket:
    lower: float
    upper: float
    certified: bool


def euclidean_distance(
    space: QuasiNormedSpace, budget: int = 8, rng: RandomSource | None = None
) -> DistanceBracket:
    """Bracket for the least two-sided Euclidean comparison constant of the
    gauge (the identity's factorization constant).

    Lower bound: any Euclidean comparison transports the parallelogram law,
    so for every pair x, y the ratio
    (g(x+y)^2 + g(x-y)^2) / (2 g(x)^2 + 2 g(y)^2) and its reciprocal are
    at most the squared constant; maximized over deterministic axis pairs
    and sampled pairs, floored at 1.
    """
    if rng is None:
        rng = RandomSource(0, (59,))
    d = space.dim
    g = gamma2_upper(OperatorSpec.identity(space), budget=budget, rng=rng.split(0))
    pairs = [(np.eye(d)[i], np.eye(d)[j]) for i in range(d) for j in range(i + 1, d)]
    gen = rng.split(1).generator()
    for _ in range(64):
        pairs.append((gen.standard_normal(d), gen.standard_normal(d)))
    lower = 1.0
    for x, y in pairs:
        num = space.gauge(x + y) ** 2 + space.gauge(x - y) ** 2
        den = 2.0 * (space.gauge(x) ** 2 + space.gauge(y) ** 2)
        if num <= 0 or den <= 0:
            continue
        ratio = num / den
        lower = max(lower, math.sqrt(max(ratio, 1.0 / ratio)))
    return DistanceBracket(lower, max(g.upper, lower) if g.certified else g.upper, g.certified)


def envelope_distance(
    space: QuasiNormedSpace, budget: int = 8, rng: RandomSource | None = None
) -> ConstantEstimate:
    """Certified lower bound (with witness) on the distance to the convex
    envelope: the gauge maximized over the envelope unit sphere."""
    d = space.dim

    def objective(x):
        env = space.envelope_gauge(x)
        if env <= 1e-18:
            return 0.0
        return space.gauge(x) / env

    starts = [np.ones(d)]
    starts.extend(np.eye(d))
    if rng is None:
        rng = RandomSource(0, (61,))
    for i in range(max(budget, 2)):
        starts.append(np.abs(rng.split(5, i).generator().standard_normal(d)))
    best_v, best_x = 0.0, starts[0]
    for s in starts:
        val, x = _coordinate_ascent(objective, s, 80 * d)
        if val > best_v:
            best_v, best_x = val, x
    env = space.envelope_gauge(best_x)
    return ConstantEstimate(best_v, "certified-lower-bound", best_x / env)


@dataclass(frozen=True)
class DeltaResult:
    upper: float  # estimate of the norm from the envelope source (>= delta)
    lower: float  # operator norm lower bound (delta >= op norm)
    kind: str  # certification of the upper evaluation


def delta_upper(u: OperatorSpec, budget: int = 2000, rng: RandomSource | None = None) -> DeltaResult:
    """Bracket for the least factorization product through a convex space.

    Factoring through the source's convex envelope with the identity shows
    the constant is at most the operator norm taken from the envelope
    gauge; that norm is evaluated exactly when an exact route exists and
    estimated by search otherwise (kind records which).  The floor is the
    plain operator norm.
    """
    env = u.source.envelope_space()
    upper_res = op_norm(OperatorSpec(u.matrix, env, u.target), "auto", budget, rng)
    lower = op_norm(u, "auto", budget, rng.split(1) if rng else None).value
    return DeltaResult(upper_res.value, lower, upper_res.kind)


@dataclass(frozen=True)
class GaussianMean:
    value: float
    stderr: float
    samples: int


def gaussian_mean(u: OperatorSpec, samples: int = 100_000, rng: RandomSource | None = None) -> GaussianMean:
    """Root mean square of the target gauge of the image of a standard
    Gaussian vector; standard error by batch means."""
    if not (isinstance(u.source, WeightedLp) and u.source.is_euclidean):
        raise ValueError("gaussian mean needs a Euclidean source")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if rng is None:
        raise ValueError("needs a RandomSource")
    m = np.asarray(u.matrix)
    if not np.any(m):
        return GaussianMean(0.0, 0.0, samples)
    n_batches = 20
    per = samples // n_batches
    batch_means = np.empty(n_batches)
    for b in range(n_batches):
        g = rng.split(b).generator().standard_normal((per, u.source.dim))
        vals = u.target.gauge_many(g @ m.T)
        batch_means[b] = np.mean(vals**2)
    mean_sq = float(np.mean(batch_means))
    err_sq = float(np.std(batch_means, ddof=1)) / math.sqrt(n_batches)
    value = math.sqrt(mean_sq)
    stderr = err_sq / (2.0 * value) if value > 0 else 0.0
    return GaussianMean(value, stderr, per * n_batches)


@dataclass(frozen=True)
class ApproxNumber:
    value: float
    kind: str  # exact | upper-bound | search


def approx_numbers(
    u: OperatorSpec, k: int, budget: int = 24, rng: RandomSource | None = None
) -> ApproxNumber:
    """k-th approximation number: distance to operators of rank below k.

    Exact (a singular value of the rescaled matrix) for quadratic source
    and target; otherwise an upper bound from truncated-SVD initialization
    refined by perturbing the low-rank factors.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    qs = _quadratic_matrix(u.source)
    if qs is None:
        raise ValueError("approximation numbers need a quadratic source")
    inv_half = np.diag(1.0 / np.sqrt(np.diag(qs)))
    m = np.asarray(u.matrix) @ inv_half  # operator from the standard Euclidean ball
    if not np.any(m):
        return ApproxNumber(0.0, "exact")
    s_all = singular_values(m)
    rank = int(np.sum(s_all > s_all[0] * 1e-12))
    if k > rank:
        return ApproxNumber(0.0, "exact")
    qt = _quadratic_matrix(u.target)
    if qt is not None:
        half_t = np.diag(np.sqrt(np.diag(qt)))
        return ApproxNumber(float(singular_values(half_t @ m)[k - 1]), "exact")

    middle = WeightedLp.euclidean(u.source.dim)

    def residual_norm(approx: np.ndarray) -> tuple[float, bool]:
        res = _op_norm_upper(m - approx, middle, u.target)
        if res is not None:
            return res[0], True
        val = op_norm(
            OperatorSpec(m - approx, middle, u.target), "search", 500,
            rng.split(9) if rng else None,
        ).value
        return val, False

    s, u_left, vt = svd(m)
    r = k - 1
    if r == 0:
        value, ok = residual_norm(np.zeros_like(m))
        return ApproxNumber(value, "upper-bound" if ok else "search")
    a = u_left[:, :r] * s[:r][None, :]
    b = vt[:r]
    best, ok = residual_norm(a @ b)
    if rng is None:
        rng = RandomSource(0, (67,))
    scale = 0.3 * s[0]
    for i in range(max(budget, 0)):
        gen = rng.split(11, i).generator()
        a2 = a + scale * gen.standard_normal(a.shape)
        b2 = b + scale * gen.standard_normal(b.shape)
        val, ok2 = residual_norm(a2 @ b2)
        if val < best:
            best, a, b, ok = val, a2, b2, ok and ok2
        else:
            scale *= 0.7
    return ApproxNumber(best, "upper-bound" if ok else "search")


@dataclass(frozen=True)
class ProfileResult:
    value: float
    records: tuple


def weak_cotype2_profile(
    space: QuasiNormedSpace,
    n: int,
    trials: int = 8,
    rng: RandomSource | None = None,
    samples: int = 20_000,
) -> ProfileResult:
    """Empirical profile max over k of a_k sqrt(k) / (Gaussian mean), for
    random Gaussian operators from Euclidean n-space into the space.

    Observational: a_k values for non-quadratic targets are upper bounds,
    so the profile is an estimate, recorded with per-record certification.
    """
    if rng is None:
        raise ValueError("needs a RandomSource")
    if n < 1 or trials < 1:
        raise ValueError("need n >= 1 and trials >= 1")
    source = WeightedLp.euclidean(n)
    records = []
    value = 0.0
    for t in range(trials):
        g = rng.split(t, 0).generator().standard_normal((space.dim, n))
        u = OperatorSpec(g, source, space)
        ell = gaussian_mean(u, samples, rng.split(t, 1))
        if ell.value <= 0:
            continue
        for k in range(1, n + 1):
            a = approx_numbers(u, k, rng=rng.split(t, 2, k))
            ratio = a.value * math.sqrt(k) / ell.value
            value = max(value, ratio)
            records.append(
                {
                    "trial": t,
                    "k": k,
                    "a_k": a.value,
                    "a_kind": a.kind,
                    "gaussian_mean": ell.value,
                    "gaussian_stderr": ell.stderr,
                    "ratio": ratio,
                }
            )
    return ProfileResult(value, tuple(records))


@dataclass(frozen=True)
class SweepResult:
    max_ratio: float
    records: tuple


def gamma2_boundedness_sweep(
    space_pairs,
    trials: int = 4,
    budget: int = 4,
    rng: RandomSource | None = None,
) -> SweepResult:
    """Observational sweep: ratio of the factorization upper bound to the
    operator-norm lower bound for random operators between given spaces,
    alongside a sign-average certificate for each target."""
    from .randsigns import cotype2_lower

    if rng is None:
        raise ValueError("needs a RandomSource")
    records = []
    max_ratio = 0.0
    for idx, (src, tgt) in enumerate(space_pairs):
        cert = cotype2_lower(OperatorSpec.identity(tgt), n=4, budget=2, rng=rng.split(idx, 0))
        for t in range(trials):
            m = rng.split(idx, 1, t).generator().standard_normal((tgt.dim, src.dim))
            u = OperatorSpec(m, src, tgt)
            g = gamma2_upper(u, budget=budget, rng=rng.split(idx, 2, t))
            if g.lower <= 0:
                continue
            ratio = g.upper / g.lower
            max_ratio = max(max_ratio, ratio)
            records.append(
                {
                    "pair": idx,
                    "source_dim": src.dim,
                    "target_dim": tgt.dim,
                    "trial": t,
                    "target_cotype2_certificate": cert.value,
                    "op_lower": g.lower,
                    "gamma2_upper": g.upper,
                    "certified": g.certified,
                    "ratio": ratio,
                }
            )
    return SweepResult(max_ratio, tuple(records))


def delta_boundedness_sweep(
    space_pairs,
    trials: int = 4,
    budget: int = 2000,
    rng: RandomSource | None = None,
) -> SweepResult:
    """Observational sweep: ratio of the envelope-route upper estimate to
    the operator-norm lower bound for random operators."""
    if rng is None:
        raise ValueError("needs a RandomSource")
    records = []
    max_ratio = 0.0
    for idx, (src, tgt) in enumerate(space_pairs):
        for t in range(trials):
            m = rng.split(idx, 1, t).generator().standard_normal((tgt.dim, src.dim))
            u = OperatorSpec(m, src, tgt)
            res = delta_upper(u, budget=budget, rng=rng.split(idx, 2, t))
            if res.lower <= 0:
                continue
            ratio = res.upper / res.lower
            max_ratio = max(max_ratio, ratio)
            records.append(
                {
                    "pair": idx,
                    "source_dim": src.dim,
                    "target_dim": tgt.dim,
                    "trial": t,
                    "op_lower": res.lower,
                    "delta_upper": res.upper,
                    "upper_kind": res.kind,
                    "ratio": ratio,
                }
            )
    return SweepResult(max_ratio, tuple(records))
