"""Exact gamma-shattering, fat-shattering dimension and VC dimension.

Shattering is decided without enumerating witness levels: a set S is
gamma-shattered iff every dichotomy B of S can be given a row f_B with

    min_{B containing x} f_B(x) - max_{B not containing x} f_B(x) >= 2 * gamma

for every x in S. The witness is then the midpoint of those two statistics.
The search backtracks over dichotomies in binary counter order and prunes as
soon as some point's margin drops below 2 * gamma.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classes import FunctionClass
from .errors import InvalidArgument, SizeLimitError

DEFAULT_MAX_SUBSET = 20


@dataclass(frozen=True)
class ShatterCertificate:
    """Witness that ``subset`` is ``gamma``-shattered.

    ``assignment`` maps a dichotomy bitmask (bit i set iff ``subset[i]`` is in
    B) to the class row realising it.
    """

    subset: tuple
    witness: tuple
    assignment: dict
    gamma: float

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "witness": list(self.witness),
            "gamma": self.gamma,
            "assignment": {str(b): r for b, r in sorted(self.assignment.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ShatterCertificate":
        return cls(
            tuple(d["subset"]),
            tuple(d["witness"]),
            {int(b): int(r) for b, r in d["assignment"].items()},
            float(d["gamma"]),
        )


def _dichotomy_masks(k: int) -> np.ndarray:
    """Row b holds the membership of each subset point in dichotomy b."""
    return ((np.arange(2**k)[:, None] >> np.arange(k)[None, :]) & 1).astype(bool)


def _undominated(signed: np.ndarray) -> np.ndarray:
    """Indices of rows not weakly dominated by another row (rows are distinct)."""
    n = signed.shape[0]
    if n <= 1:
        return np.arange(n)
    ge = np.all(signed[:, None, :] >= signed[None, :, :], axis=2)  # ge[j, i]: j dominates i
    np.fill_diagonal(ge, False)
    return np.flatnonzero(~ge.any(axis=0))


def _check_subset(cls: FunctionClass, subset: Sequence[int], max_size: int) -> tuple:
    s = tuple(int(i) for i in subset)
    if len(set(s)) != len(s):
        raise InvalidArgument("subset indices must be distinct")
    if any(i < 0 or i >= cls.n_points for i in s):
        raise InvalidArgument("subset index out of range")
    if len(s) > max_size:
        raise SizeLimitError(f"|S| = {len(s)} exceeds the cap of {max_size}")
    return s


def is_shattered(
    cls: FunctionClass,
    subset: Sequence[int],
    gamma: float,
    slack: float = 0.0,
    max_size: int = DEFAULT_MAX_SUBSET,
) -> Optional[ShatterCertificate]:
    """Return a certificate if ``subset`` is ``gamma``-shattered, else ``None``.

    ``slack`` relaxes the required margin ``2 * gamma`` for classes whose values
    come out of floating point computations; it is 0 by default.
    """
    if not gamma > 0:
        raise InvalidArgument("gamma must be positive")
    s = _check_subset(cls, subset, max_size)
    k = len(s)
    if k == 0:
        return ShatterCertificate((), (), {0: 0}, float(gamma))
    need = 2.0 * gamma - slack

    sub = cls.values[:, list(s)]
    _, first = np.unique(sub, axis=0, return_index=True)
    first = np.sort(first)
    if first.size < 2**k:
        return None
    rows = sub[first]
    col_min, col_max = rows.min(axis=0), rows.max(axis=0)
    if np.any(col_max - col_min < need):
        return None

    masks = _dichotomy_masks(k)
    candidates = []
    for b in range(2**k):
        inside = masks[b]
        ok = np.where(inside, rows - col_min >= need, col_max - rows >= need).all(axis=1)
        elig = np.flatnonzero(ok)
        if elig.size == 0:
            return None
        signed = np.where(inside, rows[elig], -rows[elig])
        candidates.append(elig[_undominated(signed)])

    assignment = _backtrack(rows, masks, candidates, need)
    if assignment is None:
        return None
    lo = np.full(k, np.inf)
    hi = np.full(k, -np.inf)
    for b, r in enumerate(assignment):
        v = rows[r]
        lo = np.where(masks[b], np.minimum(lo, v), lo)
        hi = np.where(masks[b], hi, np.maximum(hi, v))
    witness = tuple(((lo + hi) / 2.0).tolist())
    return ShatterCertificate(
        s, witness, {b: int(first[r]) for b, r in enumerate(assignment)}, float(gamma)
    )


def _backtrack(rows, masks, candidates, need):
    """Depth-first assignment of one row per dichotomy, first feasible wins."""
    n_dich, k = masks.shape
    lo = np.full((n_dich + 1, k), np.inf)
    hi = np.full((n_dich + 1, k), -np.inf)
    choice = [-1] * n_dich
    depth = 0
    while 0 <= depth < n_dich:
        cand = candidates[depth]
        nxt = choice[depth] + 1
        inside = masks[depth]
        placed = False
        while nxt < cand.size:
            v = rows[cand[nxt]]
            new_lo = np.where(inside, np.minimum(lo[depth], v), lo[depth])
            new_hi = np.where(inside, hi[depth], np.maximum(hi[depth], v))
            if np.all(new_lo - new_hi >= need):
                lo[depth + 1], hi[depth + 1] = new_lo, new_hi
                choice[depth] = nxt
                placed = True
                break
            nxt += 1
        if placed:
            depth += 1
        else:
            choice[depth] = -1
            depth -= 1
    if depth < 0:
        return None
    return [int(candidates[b][choice[b]]) for b in range(n_dich)]


def check_certificate(cls: FunctionClass, cert: ShatterCertificate, slack: float = 0.0) -> bool:
    """Re-check a certificate against the two defining inequalities.

    A few ulps of tolerance absorb the rounding of the midpoint witness.
    """
    k = len(cert.subset)
    if set(cert.assignment) != set(range(2**k)):
        return False
    scale = max(1.0, float(np.abs(cls.values).max()))
    tol = slack / 2.0 + 8 * np.finfo(np.float64).eps * scale
    r = np.asarray(cert.witness, dtype=np.float64)
    masks = _dichotomy_masks(k)
    for b, row in cert.assignment.items():
        v = cls.values[row, list(cert.subset)]
        inside = masks[b]
        if np.any(v[inside] < r[inside] + cert.gamma - tol):
            return False
        if np.any(v[~inside] > r[~inside] - cert.gamma + tol):
            return False
    return True


def fat_shattered_set(
    cls: FunctionClass,
    gamma: float,
    slack: float = 0.0,
    max_size: int = DEFAULT_MAX_SUBSET,
) -> tuple[int, Optional[ShatterCertificate]]:
    """Fat-shattering dimension at scale ``gamma`` and a certificate for a largest set.

    Sizes are tried in increasing order; the search stops at the first size
    with no shattered subset, which is sound because shattering is hereditary.
    """
    if not gamma > 0:
        raise InvalidArgument("gamma must be positive")
    best = None
    k = 1
    while k <= cls.n_points and 2**k <= cls.n_functions:
        if k > max_size:
            raise SizeLimitError(f"fat-shattering search reached |S| = {k} > cap {max_size}")
        found = None
        for s in itertools.combinations(range(cls.n_points), k):
            found = is_shattered(cls, s, gamma, slack, max_size)
            if found is not None:
                break
        if found is None:
            break
        best = found
        k += 1
    return (0 if best is None else len(best.subset)), best


def fat_dim(
    cls: FunctionClass,
    gamma: float,
    slack: float = 0.0,
    max_size: int = DEFAULT_MAX_SUBSET,
) -> int:
    return fat_shattered_set(cls, gamma, slack, max_size)[0]


def vc_dim(cls: FunctionClass) -> int:
    """Classical VC dimension of a {0, 1}-valued class."""
    if not cls.is_binary():
        raise InvalidArgument("VC dimension needs a {0, 1}-valued class")
    bits = cls.values.astype(np.int64)
    d = 0
    for k in range(1, cls.n_points + 1):
        if 2**k > cls.n_functions:
            break
        weights = 1 << np.arange(k, dtype=np.int64)
        if not any(
            np.unique(bits[:, list(s)] @ weights).size == 2**k
            for s in itertools.combinations(range(cls.n_points), k)
        ):
            break
        d = k
    return d
