"""Rademacher and Monte Carlo machinery for the deviation tails.

Every Monte Carlo trial owns a generator seeded with ``(seed, trial)``, so
estimates do not depend on how trials are split across workers. Exact modes
enumerate sign vectors or sample count vectors and accumulate probabilities
in rational arithmetic before a single final rounding.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .chaining import increment_halved_norm
from .classes import FunctionClass, Distribution, exact_means, restrict, SampleVector
from .errors import InvalidArgument, SizeLimitError

EXACT_SIGN_CAP = 20
EXACT_JOINT_CAP = 2**26
EXACT_COMPOSITION_CAP = 2**22
_SIGN_BLOCK = 2**14
Z95 = 1.96


@dataclass(frozen=True)
class RademacherLaw:
    """How to evaluate probabilities over m independent random signs."""

    m: int
    exact: bool = True
    trials: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgument("m must be positive")
        if self.exact and self.m > EXACT_SIGN_CAP:
            raise SizeLimitError(f"exact sign enumeration is capped at m = {EXACT_SIGN_CAP}")
        if not self.exact and self.trials < 1:
            raise InvalidArgument("sampled mode needs at least one trial")

    @classmethod
    def sampled(cls, m: int, trials: int, seed: int) -> "RademacherLaw":
        return cls(m, False, trials, seed)


@dataclass(frozen=True)
class TailEstimate:
    point_estimate: float
    trials: int
    half_width_95: float
    seed: int
    exact: bool

    @classmethod
    def from_count(cls, hits: int, trials: int, seed: int) -> "TailEstimate":
        p = hits / trials
        return cls(p, trials, Z95 * math.sqrt(p * (1.0 - p) / trials), seed, False)

    @classmethod
    def exact_value(cls, p: float, seed: int = 0) -> "TailEstimate":
        return cls(float(p), 0, 0.0, seed, True)

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "mc"


def trial_rng(seed, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial)])


def _check_dims(cls: FunctionClass, dist: Distribution, m: int):
    if dist.size != cls.n_points:
        raise InvalidArgument(f"distribution has {dist.size} weights for {cls.n_points} points")
    if m < 1:
        raise InvalidArgument("m must be positive")


def _run_trials(fn, trials: int, workers: int) -> int:
    """Sum of ``fn(trial)`` over all trials; the result is independent of ``workers``."""
    if workers <= 1 or trials < 2 * workers:
        return sum(fn(t) for t in range(trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)

    def block(k: int) -> int:
        return sum(fn(t) for t in range(bounds[k], bounds[k + 1]))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(block, range(workers)))


# ---------------------------------------------------------------- deviations


def sup_deviation(cls: FunctionClass, dist: Distribution, m: int, seed) -> float:
    """Largest ``|empirical mean - mean|`` over the class for one sample of size m.

    The sample enters only through its count vector, which is drawn directly
    from the multinomial law of m i.i.d. draws.
    """
    _check_dims(cls, dist, m)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(m, dist.weights)
    return float(np.max(np.abs(cls.values @ counts / m - exact_means(cls, dist))))


def tail_probability_mc(
    cls: FunctionClass,
    dist: Distribution,
    m: int,
    epsilon: float,
    trials: int,
    seed: int,
    workers: int = 1,
    exact: bool = False,
) -> TailEstimate:
    """Probability that the sup deviation exceeds ``epsilon``."""
    _check_dims(cls, dist, m)
    if exact:
        return TailEstimate.exact_value(exact_deviation_tail(cls, dist, m, epsilon), seed)
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    means = exact_means(cls, dist)

    def hit(t: int) -> int:
        counts = trial_rng(seed, t).multinomial(m, dist.weights)
        return int(np.max(np.abs(cls.values @ counts / m - means)) > epsilon)

    return TailEstimate.from_count(_run_trials(hit, trials, workers), trials, seed)


def symmetrized_deviation_tail(
    cls: FunctionClass,
    dist: Distribution,
    m: int,
    epsilon: float,
    trials: int,
    seed: int,
    workers: int = 1,
    exact: bool = False,
) -> TailEstimate:
    """Probability that two independent m-samples have means more than ``epsilon / 2`` apart
    for some function of the class."""
    _check_dims(cls, dist, m)
    if exact:
        return TailEstimate.exact_value(exact_symmetrized_tail(cls, dist, m, epsilon), seed)
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    limit = m * epsilon / 2.0

    def hit(t: int) -> int:
        rng = trial_rng(seed, t)
        diff = rng.multinomial(m, dist.weights) - rng.multinomial(m, dist.weights)
        return int(np.max(np.abs(cls.values @ diff)) > limit)

    return TailEstimate.from_count(_run_trials(hit, trials, workers), trials, seed)


# ------------------------------------------------------- exact enumerations


def compositions(m: int, n: int) -> np.ndarray:
    """All count vectors of length n summing to m (stars and bars order)."""
    total = math.comb(m + n - 1, n - 1)
    if total > EXACT_COMPOSITION_CAP:
        raise SizeLimitError(f"{total} count vectors exceed the cap of {EXACT_COMPOSITION_CAP}")
    out = np.empty((total, n), dtype=np.int64)
    for k, bars in enumerate(itertools.combinations(range(m + n - 1), n - 1)):
        prev = -1
        for i, b in enumerate(bars):
            out[k, i] = b - prev - 1
            prev = b
        out[k, n - 1] = m + n - 2 - prev
    return out


def _composition_weights(counts: np.ndarray, weights: np.ndarray, m: int) -> tuple[list[int], int]:
    """Multinomial probabilities as integer numerators over a common denominator.

    Returns ``(numerators, denominator)``.
    """
    w = [Fraction(float(x)) for x in weights]
    probs = []
    fact_m = math.factorial(m)
    for c in counts.tolist():
        p = Fraction(fact_m)
        for ci, wi in zip(c, w):
            if ci:
                p *= wi**ci / math.factorial(ci)
        probs.append(p)
    den = 1
    for p in probs:
        den = math.lcm(den, p.denominator)
    return [p.numerator * (den // p.denominator) for p in probs], den


def _near(a: np.ndarray, b: float) -> np.ndarray:
    return np.abs(a - b) <= 1e-9 * max(1.0, abs(b))


def exact_deviation_tail(cls: FunctionClass, dist: Distribution, m: int, epsilon: float) -> float:
    """Exact probability that the sup deviation of an m-sample exceeds ``epsilon``.

    Count vectors whose float deviation lands within rounding of ``epsilon``
    are re-decided in rational arithmetic.
    """
    _check_dims(cls, dist, m)
    counts = compositions(m, cls.n_points)
    nums, den = _composition_weights(counts, dist.weights, m)
    means = exact_means(cls, dist)
    dev = np.max(np.abs(cls.values @ counts.T / m - means[:, None]), axis=0)
    event = dev > epsilon
    border = np.flatnonzero(_near(dev, epsilon))
    if border.size:
        vals = [[Fraction(v) for v in row] for row in cls.values.tolist()]
        w = [Fraction(x) for x in dist.weights.tolist()]
        mu = [sum(wi * v for wi, v in zip(w, row)) for row in vals]
        eps = Fraction(epsilon)
        for a in border:
            c = counts[a].tolist()
            event[a] = any(
                abs(Fraction(sum(ci * v for ci, v in zip(c, row)), m) - mu_f) > eps
                for row, mu_f in zip(vals, mu)
            )
    return float(Fraction(sum(n for n, e in zip(nums, event) if e), den))


def exact_symmetrized_tail(cls: FunctionClass, dist: Distribution, m: int, epsilon: float) -> float:
    """Exact double-sample tail ``P(sup_f |mean_1 f - mean_2 f| > epsilon / 2)``."""
    _check_dims(cls, dist, m)
    counts = compositions(m, cls.n_points)
    if counts.shape[0] ** 2 > EXACT_JOINT_CAP:
        raise SizeLimitError("joint enumeration of both samples exceeds the cap")
    nums, den = _composition_weights(counts, dist.weights, m)
    sums = cls.values @ counts.T  # row f, count vector a
    limit = m * epsilon / 2.0
    vals = None
    total = 0
    for a in range(counts.shape[0]):
        if not nums[a]:
            continue
        gap = np.max(np.abs(sums[:, a : a + 1] - sums), axis=0)
        event = gap > limit
        border = np.flatnonzero(_near(gap, limit))
        if border.size:
            if vals is None:
                vals = [[Fraction(v) for v in row] for row in cls.values.tolist()]
                exact_limit = Fraction(m) * Fraction(epsilon) / 2
            for b in border:
                diff = (counts[a] - counts[b]).tolist()
                event[b] = any(
                    abs(sum(d * v for d, v in zip(diff, row))) > exact_limit for row in vals
                )
        total += nums[a] * sum(nums[b] for b in np.flatnonzero(event))
    return float(Fraction(total, den * den))


def _half_differences(vectors, m: int) -> np.ndarray:
    v = np.asarray(getattr(vectors, "vectors", vectors), dtype=np.float64)
    if v.ndim == 1:
        v = v[None, :]
    if v.shape[1] != 2 * m:
        raise InvalidArgument(f"vectors must have length 2m = {2 * m}")
    return v[:, :m] - v[:, m:]


def _sign_blocks(m: int):
    """All sign vectors with the first sign fixed to +1, in blocks.

    Flipping every sign leaves ``|sum_i xi_i d_i|`` unchanged, so half the cube
    carries the full distribution.
    """
    free = m - 1
    total = 2**free
    for start in range(0, total, _SIGN_BLOCK):
        codes = np.arange(start, min(total, start + _SIGN_BLOCK))
        bits = (codes[:, None] >> np.arange(free)[None, :]) & 1
        signs = np.ones((codes.size, m))
        signs[:, 1:] = 1.0 - 2.0 * bits
        yield signs


def rademacher_sup_tail(vectors, m: int, threshold: float, law: RademacherLaw) -> TailEstimate:
    """``P(max_f |(1/m) sum_i xi_i (f(i) - f(m + i))| > threshold)`` over random signs."""
    if law.m != m:
        raise InvalidArgument("law and vectors disagree on m")
    diffs = _half_differences(vectors, m)
    limit = m * threshold
    if law.exact:
        hits = 0
        exact_diffs = None
        for signs in _sign_blocks(m):
            sums = np.abs(signs @ diffs.T)
            event = np.any(sums > limit, axis=1)
            border = np.flatnonzero(np.any(_near(sums, limit), axis=1))
            if border.size:
                if exact_diffs is None:
                    exact_diffs = [
                        [Fraction(a) - Fraction(b) for a, b in zip(row[:m], row[m:])]
                        for row in np.asarray(getattr(vectors, "vectors", vectors)).reshape(-1, 2 * m).tolist()
                    ]
                    exact_limit = m * Fraction(threshold)
                for k in border:
                    xi = signs[k].astype(int).tolist()
                    event[k] = any(
                        abs(sum(x * d for x, d in zip(xi, row))) > exact_limit for row in exact_diffs
                    )
            hits += int(np.count_nonzero(event))
        return TailEstimate.exact_value(hits / 2 ** (m - 1))

    def hit(t: int) -> int:
        signs = trial_rng(law.seed, t).choice((-1.0, 1.0), size=m)
        return int(np.any(np.abs(diffs @ signs) > limit))

    return TailEstimate.from_count(_run_trials(hit, law.trials, 1), law.trials, law.seed)


def worst_case_rademacher_tail(
    cls: FunctionClass, m: int, threshold: float
) -> tuple[float, tuple]:
    """``sup`` over every double sample x of the exact Rademacher tail of the restriction.

    Returns the supremum and one maximising sample (0-based columns).
    """
    n = cls.n_points
    if n ** (2 * m) * 2**m > EXACT_JOINT_CAP:
        raise SizeLimitError("enumerating every double sample exceeds the cap")
    law = RademacherLaw(m)
    best, arg = -1.0, ()
    cache = {}
    for x in itertools.product(range(n), repeat=2 * m):
        r = restrict(cls, SampleVector(x, m))
        key = r.vectors.tobytes()
        if key not in cache:
            cache[key] = rademacher_sup_tail(r.vectors, m, threshold, law).point_estimate
        if cache[key] > best:
            best, arg = cache[key], x
    return best, arg


# ------------------------------------------------------------------- bounds


def hoeffding_tail(h, m: int, eps_j: float) -> float:
    """``2 exp(-eps_j**2 m**2 / (2 sum_i (h(i) - h(m + i))**2))``; 0 if all halves agree."""
    if not eps_j > 0:
        raise InvalidArgument("eps_j must be positive")
    denom = increment_halved_norm(h, m)
    if denom == 0.0:
        return 0.0
    return 2.0 * math.exp(-0.5 * eps_j * eps_j * m * m / denom)


def multiscale_bound(levels: Sequence, m: int, schedule: Sequence[float]) -> float:
    """Sum of :func:`hoeffding_tail` over every increment of every level."""
    if len(levels) != len(schedule):
        raise InvalidArgument("need one scale per level")
    total = 0.0
    for hs, eps_j in zip(levels, schedule):
        for h in np.asarray(hs, dtype=np.float64).reshape(-1, 2 * m):
            total += hoeffding_tail(h, m, eps_j)
    return total


def weight_schedule(l: int) -> np.ndarray:
    """Chaining weights ``c_j = sqrt(4**(2 - j) (j + 1)) / 44`` for j = 0..l."""
    if l < 0:
        raise InvalidArgument("l must be non-negative")
    j = np.arange(l + 1, dtype=np.float64)
    return np.sqrt(4.0 ** (2.0 - j) * (j + 1.0)) / 44.0


def weight_partial_sums(l: int) -> np.ndarray:
    return np.cumsum(weight_schedule(l))


def symmetrization_threshold(range_width: float, epsilon: float) -> int:
    """Smallest m with ``m >= 4 ln(2) (range_width / epsilon)**2``."""
    if not epsilon > 0:
        raise InvalidArgument("epsilon must be positive")
    return max(1, math.ceil(4.0 * math.log(2.0) * (range_width / epsilon) ** 2))
