"""Finite abelian groups, their characters, and interpolation-set
computations: the interpolation (Sidon) constant on sign groups via exact
linear programming, and the comparison of group-side moment averages
against sign-average moments for vector-coefficient character sums.

Conventions
-----------
* A group is a product of cyclic factors; element ``i`` has digit ``j``
  equal to ``(i // prod(factors[:j])) % factors[j]``.
* A character is an exponent tuple; its value at an element is
  ``exp(2 pi i * sum_j exp_j d_j / m_j)``.  When every factor is at most
  two the values are computed exactly as ``1 - 2*parity`` (floats +-1.0).
* Measures on the group are weight vectors against counting measure, so
  the total-variation norm is the plain absolute sum.
* Group-side averages of a gauge use normalized counting measure and the
  same power-mean helper as the sign-average code, so that for the full
  coordinate character set of a sign group both sides evaluate identical
  floating-point arrays.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from .numkernel import RandomSource, frozen_array
from .randsigns import (
    ConstantEstimate,
    _as_tuple,
    _power_mean,
    _search_tuples,
    _deterministic_tuple_starts,
    cotype2_lower,
    rademacher_average,
)
from .spaces import OperatorSpec, QuasiNormedSpace

MAX_GROUP_ORDER = 4096
MAX_SIDON_SET = 10


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups given by its factor sizes."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(m) for m in self.factors)
        if not factors or any(m < 2 for m in factors):
            raise ValueError("need at least one factor, each of size >= 2")
        object.__setattr__(self, "factors", factors)
        if self.order > MAX_GROUP_ORDER:
            raise ValueError(f"group order capped at {MAX_GROUP_ORDER}")

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def is_sign_group(self) -> bool:
        return all(m == 2 for m in self.factors)

    @cached_property
    def digit_table(self) -> np.ndarray:
        """Integer array (order x k): digit j of element i."""
        idx = np.arange(self.order)[:, None]
        strides = np.cumprod((1,) + self.factors[:-1])
        table = (idx // strides[None, :]) % np.array(self.factors)[None, :]
        table.setflags(write=False)
        return table

    def add(self, i: int, j: int) -> int:
        """Group addition on element indices."""
        di, dj = self.digit_table[i], self.digit_table[j]
        digits = (di + dj) % np.array(self.factors)
        strides = np.cumprod((1,) + self.factors[:-1])
        return int(np.dot(digits, strides))


@dataclass(frozen=True)
class Character:
    """Character of a product group, given by one exponent per factor."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))


def coordinate_characters(group: FiniteAbelianGroup) -> tuple[Character, ...]:
    k = len(group.factors)
    return tuple(
        Character(tuple(1 if j == i else 0 for j in range(k))) for i in range(k)
    )


def all_characters(group: FiniteAbelianGroup) -> tuple[Character, ...]:
    return tuple(
        Character(exps) for exps in itertools.product(*(range(m) for m in group.factors))
    )


def character_matrix(group: FiniteAbelianGroup, chars) -> tuple[np.ndarray, np.ndarray]:
    """Value table (order x len(chars)) as (real part, imaginary part).

    Sign groups (all factors two) take an exact integer-parity path whose
    entries are the floats +-1.0 with zero imaginary part.
    """
    chars = tuple(chars)
    k = len(group.factors)
    for ch in chars:
        if len(ch.exponents) != k:
            raise ValueError("character exponent count must match the factor count")
    if not chars:
        raise ValueError("need at least one character")
    exps = np.array([ch.exponents for ch in chars]).T  # k x n
    digits = group.digit_table  # order x k
    if group.is_sign_group:
        parity = (digits @ exps) % 2
        return 1.0 - 2.0 * parity, np.zeros(parity.shape)
    fractions = (digits[:, :, None] * exps[None, :, :]) / np.array(group.factors)[None, :, None]
    angle = 2.0 * math.pi * fractions.sum(axis=1)
    return np.cos(angle), np.sin(angle)


def character_gram(group: FiniteAbelianGroup, chars) -> np.ndarray:
    """Normalized-counting-measure Gram matrix of the characters (complex)."""
    re, im = character_matrix(group, chars)
    values = re + 1j * im
    return values.conj().T @ values / group.order


@dataclass(frozen=True)
class SidonResult:
    """Worst-case interpolation cost over sign patterns on the set."""

    value: float
    pattern: np.ndarray  # maximizing signs, one per character
    measure: np.ndarray  # optimal interpolating weights on the group

    def __post_init__(self):
        object.__setattr__(self, "pattern", frozen_array(np.asarray(self.pattern, dtype=float)))
        object.__setattr__(self, "measure", frozen_array(np.asarray(self.measure, dtype=float)))


def sidon_constant(group: FiniteAbelianGroup, chars) -> SidonResult:
    """Exact interpolation constant of a character set on a sign group.

    For each sign pattern on the set, a linear program finds the measure
    of least total variation whose transform matches the pattern there;
    the constant is the largest such cost.  Restricted to sign groups
    (real character values) with at most ``MAX_SIDON_SET`` characters.
    """
    chars = tuple(chars)
    if not group.is_sign_group:
        raise NotImplementedError("interpolation constant implemented for sign groups only")
    if len(chars) > MAX_SIDON_SET:
        raise ValueError(f"character set capped at {MAX_SIDON_SET}")
    if len(set(ch.exponents for ch in chars)) != len(chars):
        raise ValueError("characters must be distinct")
    re, _ = character_matrix(group, chars)
    n_group, n_set = re.shape
    cost = np.ones(2 * n_group)
    a_eq = np.hstack([re.T, -re.T])  # transform of nu = plus - minus parts
    best = None
    for bits in itertools.product((1.0, -1.0), repeat=n_set):
        eps = np.array(bits)
        res = linprog(cost, A_eq=a_eq, b_eq=eps, bounds=(0, None), method="highs")
        if not res.success:
            raise RuntimeError(f"interpolation LP failed: {res.message}")
        if best is None or res.fun > best[0]:
            nu = res.x[:n_group] - res.x[n_group:]
            best = (float(res.fun), eps, nu)
    value, eps, nu = best
    return SidonResult(value, eps, nu)


@dataclass(frozen=True)
class CpRatio:
    group_side: float
    rademacher_side: float
    ratio: float


def cp_ratio(
    group: FiniteAbelianGroup,
    chars,
    space: QuasiNormedSpace,
    p: float,
    vectors,
    mode: str = "exact",
    rng: RandomSource | None = None,
    samples: int = 10_000,
) -> CpRatio:
    """p-th moment of the gauge of a character sum over the group, against
    the same moment of the sign average with the same coefficients.

    Complex character values use the convention
    ``gauge(z) = max(gauge(Re z), gauge(Im z))`` per group element.  The
    sign-average side is exact enumeration or sampling per ``mode``.
    """
    chars = tuple(chars)
    V = _as_tuple(vectors, space.dim)
    if V.shape[0] != len(chars):
        raise ValueError("need exactly one coefficient vector per character")
    if not (p > 0):
        raise ValueError("p must be positive (math.inf allowed)")
    re, im = character_matrix(group, chars)
    if np.any(im):
        gauges = np.maximum(space.gauge_many(re @ V), space.gauge_many(im @ V))
    else:
        gauges = space.gauge_many(re @ V)
    group_side = _power_mean(gauges, p)
    rad = rademacher_average(space, V, p, mode=mode, rng=rng, samples=samples)
    if rad.value <= 0:
        raise ValueError("sign-average side vanished; ratio undefined")
    return CpRatio(group_side, rad.value, group_side / rad.value)


def translate_coefficients(
    group: FiniteAbelianGroup, chars, vectors, shift: int
) -> np.ndarray:
    """Coefficients of the character sum translated by a group element.

    Translating the argument multiplies each coefficient by the character's
    value at the shift; implemented for sign groups (real values)."""
    if not group.is_sign_group:
        raise NotImplementedError("translation of coefficients needs real character values")
    chars = tuple(chars)
    re, _ = character_matrix(group, chars)
    V = np.asarray(vectors, dtype=float)
    return re[shift][:, None] * V


@dataclass(frozen=True)
class RegularityResult:
    """Observational pairing of the worst moment-comparison imbalance found
    with the set's interpolation constant and a sign-average certificate
    for the space."""

    max_imbalance: float
    sidon: SidonResult | None
    cotype_certificate: ConstantEstimate
    records: tuple


def sidon_regularity_experiment(
    group: FiniteAbelianGroup,
    chars,
    space: QuasiNormedSpace,
    p: float,
    budget: int = 4,
    rng: RandomSource | None = None,
) -> RegularityResult:
    """Search coefficient tuples maximizing max(ratio, 1/ratio) of the
    group-side to sign-side moment comparison, reported alongside the
    interpolation constant (sign groups) and a cotype-2 lower certificate.

    Observational: the search value is a lower bound on the true
    worst-case imbalance; no numeric threshold is asserted.
    """
    chars = tuple(chars)
    if rng is None:
        raise ValueError("needs a RandomSource")
    n = len(chars)

    def objective(V):
        flat = V.reshape(n, space.dim)
        norms = space.gauge_many(flat)
        if norms.max() <= 1e-12:
            return 0.0
        try:
            res = cp_ratio(group, chars, space, p, flat)
        except ValueError:
            return 0.0
        if res.ratio <= 0:
            return 0.0
        return max(res.ratio, 1.0 / res.ratio)

    starts = _deterministic_tuple_starts(space.dim, n)
    value, flat = _search_tuples(objective, starts, (n, space.dim), budget, rng.split(0))
    cert = cotype2_lower(OperatorSpec.identity(space), n=min(4, 2 * space.dim), budget=2, rng=rng.split(1))
    sid = None
    if group.is_sign_group and n <= MAX_SIDON_SET:
        sid = sidon_constant(group, chars)
    best = cp_ratio(group, chars, space, p, flat.reshape(n, space.dim))
    records = (
        {
            "group_side": best.group_side,
            "rademacher_side": best.rademacher_side,
            "ratio": best.ratio,
            "imbalance": value,
        },
    )
    return RegularityResult(value, sid, cert, records)
