"""Multiscale chain over a separated net: levels, projections, increments.

Level j is a ``R * 2**-j``-separated ``R * 2**-j``-net of the ambient net
(R is the range width), built greedily on top of level j - 1. Each net
point telescopes into one increment per level, ``f = h_0 + ... + h_l``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, InvariantViolation
from .geometry import SeparatedNet, sq_sums

SUM_TOL = 1e-9


def chain_depth(range_width: float, epsilon: float) -> int:
    """``floor(log2(range_width / epsilon)) + 4``."""
    if not 0 < epsilon < range_width:
        raise InvalidArgument("need 0 < epsilon < range_width")
    ratio = range_width / epsilon
    k = math.floor(math.log2(ratio))
    # log2 can round across an integer boundary; fix up against exact powers
    while 2.0 ** (k + 1) <= ratio:
        k += 1
    while 2.0**k > ratio:
        k -= 1
    return k + 4


def increment_halved_norm(h, m: int) -> float:
    """``sum_{i<m} (h[i] - h[m + i])**2`` for a double-sample vector."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 1 or h.size % 2 or h.size != 2 * m:
        raise InvalidArgument(f"need a vector of length 2m = {2 * m}")
    d = h[:m] - h[m:]
    return float(d @ d)


@dataclass(eq=False)
class ChainStructure:
    """Chain over the net points ``points`` (in net construction order).

    ``levels[j]`` lists net positions in G_j (insertion order),
    ``projections[j][f]`` is the net position of pi_j(f), ``increments[j]`` is
    the distinct increment vectors of H_j and ``decomposition[f][j]`` the
    index in ``increments[j]`` of f's level-j summand.
    """

    points: np.ndarray
    range_width: float
    epsilon: float
    levels: list
    projections: list
    increments: list
    decomposition: list
    provenance: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def radius(self, j: int) -> float:
        return self.range_width * 2.0**-j

    def level_sizes(self) -> list[int]:
        return [len(g) for g in self.levels]

    def increment_sizes(self) -> list[int]:
        return [len(h) for h in self.increments]

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "range_width": self.range_width,
            "epsilon": self.epsilon,
            "points": self.points.tolist(),
            "levels": [list(g) for g in self.levels],
            "projections": [list(p) for p in self.projections],
            "increments": [np.asarray(h).tolist() for h in self.increments],
            "decomposition": [list(d) for d in self.decomposition],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def build_chain(net: SeparatedNet, range_width: float, epsilon: float) -> ChainStructure:
    """Chain over ``net``, which must have been built at scale ``epsilon / 8``."""
    if not math.isclose(net.epsilon, epsilon / 8.0, rel_tol=1e-12):
        raise InvalidArgument(
            f"net scale {net.epsilon} does not match epsilon / 8 = {epsilon / 8.0}"
        )
    depth = chain_depth(range_width, epsilon)
    pts = np.array(net.points)
    n, dim = pts.shape
    if n == 0:
        raise InvalidArgument("empty net")

    levels = [[0]]
    for j in range(1, depth + 1):
        thresh = dim * (range_width * 2.0**-j) ** 2
        g = list(levels[-1])
        for f in range(n):
            if f in g:
                continue
            if np.all(sq_sums(pts[g], pts[f]) > thresh):
                g.append(f)
        levels.append(g)

    projections = []
    for j, g in enumerate(levels):
        thresh = dim * (range_width * 2.0**-j) ** 2
        members = pts[g]
        pj = []
        for f in range(n):
            close = np.flatnonzero(sq_sums(members, pts[f]) <= thresh)
            pj.append(g[int(close[0])])
        projections.append(pj)

    increments = [[pts[levels[0][0]].copy()]]
    index_of = [{pts[levels[0][0]].tobytes(): 0}]
    for j in range(1, depth + 1):
        vecs, idx = [], {}
        for g in levels[j]:
            h = pts[g] - pts[projections[j - 1][g]]
            key = h.tobytes()
            if key not in idx:
                idx[key] = len(vecs)
                vecs.append(h)
        increments.append(vecs)
        index_of.append(idx)

    # f = (f - pi_{j-1}(f)) + pi_{j-1}(f), recursing on pi_{j-1}(f) in G_{j-1}
    decomposition = []
    for f in range(n):
        summands = [0] * (depth + 1)
        cur = f
        for j in range(depth, 0, -1):
            if cur not in levels[j]:
                raise InvariantViolation("telescoping left the chain levels")
            prev = projections[j - 1][cur]
            summands[j] = index_of[j][(pts[cur] - pts[prev]).tobytes()]
            cur = prev
        summands[0] = 0
        decomposition.append(summands)

    return ChainStructure(
        pts,
        float(range_width),
        float(epsilon),
        levels,
        projections,
        [np.array(h) for h in increments],
        decomposition,
        list(net.members),
    )


@dataclass
class ChainReport:
    decomposition_ok: bool
    increment_norm_ok: bool
    cardinality_ok: bool
    net_equals_top_level: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (
            self.decomposition_ok
            and self.increment_norm_ok
            and self.cardinality_ok
            and self.net_equals_top_level
        )

    def to_dict(self) -> dict:
        return {
            "decomposition_ok": self.decomposition_ok,
            "increment_norm_ok": self.increment_norm_ok,
            "cardinality_ok": self.cardinality_ok,
            "net_equals_top_level": self.net_equals_top_level,
            "passed": self.passed,
            "witnesses": self.witnesses,
        }


def verify_chain(chain: ChainStructure, m: int) -> ChainReport:
    """Check the three chain properties on a double-sample chain.

    1. every net point is the sum of its recorded increments;
    2. each level-j increment satisfies the halved-norm bound
       ``16 m R**2 4**-j`` (``m R**2`` at level 0);
    3. ``|H_j| <= |G_j|`` with G_j separated at radius ``R 2**-j``.
    """
    pts = chain.points
    n, dim = pts.shape
    if dim != 2 * m:
        raise InvalidArgument(f"chain vectors have length {dim}, expected {2 * m}")
    R = chain.range_width
    witnesses = {}

    decomposition_ok = len(chain.decomposition) == n
    for f, summands in enumerate(chain.decomposition):
        if len(summands) != chain.depth + 1 or any(
            not 0 <= s < len(chain.increments[j]) for j, s in enumerate(summands)
        ):
            decomposition_ok = False
            witnesses.setdefault("decomposition", {"point": f, "reason": "bad summand index"})
            continue
        total = np.zeros(dim)
        for j, s in enumerate(summands):
            total = total + chain.increments[j][s]
        err = float(np.max(np.abs(total - pts[f])))
        if err > SUM_TOL:
            decomposition_ok = False
            witnesses.setdefault("decomposition", {"point": f, "max_error": err})

    increment_norm_ok = True
    for j, hs in enumerate(chain.increments):
        limit = m * R * R if j == 0 else 16.0 * m * R * R * 4.0**-j
        for k, h in enumerate(hs):
            val = increment_halved_norm(h, m)
            if val > limit:
                increment_norm_ok = False
                witnesses.setdefault(
                    "increment_norm", {"level": j, "index": k, "value": val, "limit": limit}
                )

    cardinality_ok = True
    for j, (g, hs) in enumerate(zip(chain.levels, chain.increments)):
        if len(hs) > len(g):
            cardinality_ok = False
            witnesses.setdefault("cardinality", {"level": j, "H": len(hs), "G": len(g)})
        members = pts[g]
        thresh = dim * chain.radius(j) ** 2
        for a in range(len(g)):
            sq = sq_sums(members[a + 1 :], members[a])
            if np.any(sq <= thresh):
                cardinality_ok = False
                witnesses.setdefault("separation", {"level": j, "member": g[a]})

    net_equals_top_level = sorted(chain.levels[-1]) == list(range(n))
    if not net_equals_top_level:
        witnesses["top_level"] = {"missing": sorted(set(range(n)) - set(chain.levels[-1]))}

    return ChainReport(
        decomposition_ok, increment_norm_ok, cardinality_ok, net_equals_top_level, witnesses
    )
