"""Finite function classes, distributions over their domain, and restrictions."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument, InvalidSample, SizeLimitError

MAX_FULL_BINARY_POINTS = 16


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FunctionClass:
    """A finite class of functions stored as a (functions x domain points) matrix.

    Row ``f`` holds the values of the ``f``-th function on every domain point.
    All values must lie in the closed range ``[range_lo, range_hi]``.
    """

    values: np.ndarray
    range_lo: float
    range_hi: float
    domain_labels: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InvalidArgument("values must be a non-empty 2-d matrix")
        lo, hi = float(self.range_lo), float(self.range_hi)
        if not lo < hi:
            raise InvalidArgument(f"empty range [{lo}, {hi}]")
        if not np.all(np.isfinite(values)):
            raise InvalidArgument("values must be finite")
        if values.min() < lo or values.max() > hi:
            raise InvalidArgument(f"values fall outside the declared range [{lo}, {hi}]")
        if np.unique(values, axis=0).shape[0] != values.shape[0]:
            raise InvalidArgument("rows must be distinct")
        labels = self.domain_labels
        if labels is not None:
            labels = np.array(labels, dtype=np.float64)
            if labels.shape != (values.shape[1],):
                raise InvalidArgument("need exactly one domain label per column")
            labels = _frozen(labels)
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "range_lo", lo)
        object.__setattr__(self, "range_hi", hi)
        object.__setattr__(self, "domain_labels", labels)

    @property
    def n_functions(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.values.shape[1]

    @property
    def range_width(self) -> float:
        return self.range_hi - self.range_lo

    def is_binary(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))

    def affine(self, scale: float, shift: float, lo: float, hi: float) -> "FunctionClass":
        """Return the class ``{scale * f + shift}`` declared on ``[lo, hi]``."""
        return FunctionClass(self.values * scale + shift, lo, hi, self.domain_labels)

    def to_dict(self) -> dict:
        d = {"values": self.values.tolist(), "range": [self.range_lo, self.range_hi]}
        if self.domain_labels is not None:
            d["domain_labels"] = self.domain_labels.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionClass":
        try:
            lo, hi = d["range"]
            values = d["values"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed class description: {exc}") from None
        return cls(values, lo, hi, d.get("domain_labels"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FunctionClass":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability weights over the domain columns of a class."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise InvalidArgument("weights must be a non-empty vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidArgument("weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidArgument(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, at: int) -> "Distribution":
        w = np.zeros(n)
        w[at] = 1.0
        return cls(w)

    @property
    def size(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class SampleVector:
    """A double sample ``(x_1, ..., x_2m)`` given as 0-based domain column indices."""

    indices: tuple
    m: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if self.m < 1:
            raise InvalidSample("m must be positive")
        if len(idx) != 2 * self.m:
            raise InvalidSample(f"expected {2 * self.m} indices, got {len(idx)}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices: Sequence[int]) -> "SampleVector":
        if len(indices) % 2:
            raise InvalidSample("a double sample needs an even number of indices")
        return cls(tuple(indices), len(indices) // 2)


@dataclass(frozen=True, eq=False)
class EmpiricalRestriction:
    """Distinct restriction vectors of a class on a double sample.

    ``vectors[k]`` came from class row ``provenance[k]``; vectors keep the
    order of their first occurrence among the class rows.
    """

    vectors: np.ndarray
    m: int
    provenance: tuple = field(default=())

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def as_set(self) -> set:
        return {tuple(v) for v in self.vectors.tolist()}


def restrict(cls: FunctionClass, sample: SampleVector) -> EmpiricalRestriction:
    idx = np.asarray(sample.indices, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= cls.n_points):
        raise InvalidSample(f"sample index out of range for a class on {cls.n_points} points")
    return distinct_rows(cls.values[:, idx], sample.m)


def distinct_rows(mat: np.ndarray, m: int) -> EmpiricalRestriction:
    """Collapse exactly equal rows, keeping first occurrences in row order."""
    mat = np.ascontiguousarray(mat, dtype=np.float64)
    seen = {}
    keep = []
    for k, row in enumerate(mat):
        key = row.tobytes()
        if key not in seen:
            seen[key] = k
            keep.append(k)
    return EmpiricalRestriction(_frozen(mat[keep].copy()), m, tuple(keep))


def make_threshold_class(grid: Sequence[float], thresholds: Sequence[float]) -> FunctionClass:
    """Indicators ``x -> 1[x >= t]`` on ``grid``, one per distinct threshold row."""
    if len(grid) == 0 or len(thresholds) == 0:
        raise InvalidArgument("grid and thresholds must be non-empty")
    g = np.asarray(grid, dtype=np.float64)
    rows = (g[None, :] >= np.asarray(thresholds, dtype=np.float64)[:, None]).astype(np.float64)
    return FunctionClass(distinct_rows(rows, 1).vectors, 0.0, 1.0, g)


def make_full_binary_class(n: int) -> FunctionClass:
    """All ``2**n`` binary functions on ``n`` points, in binary counter order."""
    if n < 1:
        raise InvalidArgument("n must be positive")
    if n > MAX_FULL_BINARY_POINTS:
        raise SizeLimitError(f"full binary class on {n} > {MAX_FULL_BINARY_POINTS} points")
    codes = np.arange(2**n)[:, None]
    rows = (codes >> np.arange(n)[None, :]) & 1
    return FunctionClass(rows.astype(np.float64), 0.0, 1.0)


def random_class(
    rng: np.random.Generator,
    n_points: int,
    n_rows: int,
    levels: int = 2,
    lo: float = 0.0,
    hi: float = 1.0,
) -> FunctionClass:
    """Random class with values on an evenly spaced grid of ``levels`` values.

    With ``levels`` a power of two plus one (or 2) and a dyadic range, every
    value is exactly representable, which keeps exact enumerations exact.
    Duplicate rows are dropped, so the result may have fewer than ``n_rows``.
    """
    if levels < 2:
        raise InvalidArgument("need at least two value levels")
    grid = np.linspace(lo, hi, levels)
    vals = grid[rng.integers(0, levels, size=(n_rows, n_points))]
    return FunctionClass(distinct_rows(vals, 1).vectors, lo, hi)


def exact_mean(cls: FunctionClass, row: int, dist: Distribution) -> float:
    if dist.size != cls.n_points:
        raise InvalidArgument(f"distribution has {dist.size} weights for {cls.n_points} points")
    if not 0 <= row < cls.n_functions:
        raise InvalidArgument(f"row {row} out of range")
    return float(np.dot(dist.weights, cls.values[row]))


def exact_means(cls: FunctionClass, dist: Distribution) -> np.ndarray:
    """Expectations of every row under ``dist``."""
    if dist.size != cls.n_points:
        raise InvalidArgument(f"distribution has {dist.size} weights for {cls.n_points} points")
    return cls.values @ dist.weights
