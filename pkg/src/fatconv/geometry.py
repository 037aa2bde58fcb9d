"""Normalised l_p metrics, greedy separated nets, exact packing numbers and
the fat-shattering packing bound.

All d_2 threshold tests are carried out on squared sums, ``sum (g - h)**2``
against ``n * radius**2``, so that dyadic inputs compare without rounding.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, SizeLimitError

PACKING_EXACT_CAP = 24


@dataclass(frozen=True)
class BoundConstants:
    """The two universal constants of the fat-shattering packing bound.

    Their true values are unknown; :data:`UNIT_PROFILE` is a non-rigorous
    placeholder and callers should pass calibrated values explicitly.
    """

    c_tilde: float
    C_tilde: float

    def __post_init__(self):
        if not (self.c_tilde > 0 and self.C_tilde > 0):
            raise InvalidArgument("bound constants must be strictly positive")

    @property
    def c(self) -> float:
        """Scale constant of the uniform convergence theorem, ``c_tilde / 16``."""
        return self.c_tilde / 16.0

    def to_dict(self) -> dict:
        return {"c_tilde": self.c_tilde, "C_tilde": self.C_tilde}


UNIT_PROFILE = BoundConstants(1.0, 1.0)  # non-rigorous unit profile


def _as_points(points) -> np.ndarray:
    pts = np.asarray(getattr(points, "vectors", points), dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InvalidArgument("need a non-empty collection of vectors")
    return pts


def distance(g: Sequence[float], h: Sequence[float], p: int = 2) -> float:
    g = np.asarray(g, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if g.shape != h.shape or g.ndim != 1 or g.size == 0:
        raise InvalidArgument("d_p needs two vectors of the same positive length")
    if p == 1:
        return float(np.mean(np.abs(g - h)))
    if p == 2:
        return float(math.sqrt(np.mean((g - h) ** 2)))
    raise InvalidArgument("p must be 1 or 2")


def sq_sums(points: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``sum_i (points[k, i] - v[i])**2`` for every row ``k``."""
    diff = points - v
    return np.einsum("ij,ij->i", diff, diff)


def within(sq: np.ndarray | float, dim: int, radius: float):
    """d_2 <= radius, decided on squared sums."""
    return sq <= dim * radius * radius


@dataclass(frozen=True, eq=False)
class SeparatedNet:
    """A greedy ``epsilon``-separated ``epsilon``-net of an ambient vector list.

    ``members[k]`` is the ambient index of the k-th net point (in insertion
    order) and ``cover_map[i]`` the net position covering ambient vector i.
    """

    ambient: np.ndarray
    members: tuple
    epsilon: float
    cover_map: tuple

    @property
    def points(self) -> np.ndarray:
        return self.ambient[list(self.members)]

    def __len__(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "points": self.points.tolist(),
            "members": list(self.members),
            "cover_map": list(self.cover_map),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def greedy_net(points, epsilon: float) -> SeparatedNet:
    """Scan ``points`` in order, keeping each one farther than ``epsilon`` from all kept ones."""
    if not epsilon > 0:
        raise InvalidArgument("epsilon must be positive")
    pts = _as_points(points)
    n, dim = pts.shape
    thresh = dim * epsilon * epsilon
    members = [0]
    for i in range(1, n):
        if np.all(sq_sums(pts[members], pts[i]) > thresh):
            members.append(i)
    net = pts[members]
    cover = []
    for i in range(n):
        close = np.flatnonzero(sq_sums(net, pts[i]) <= thresh)
        cover.append(int(close[0]))
    pts.setflags(write=False)
    return SeparatedNet(pts, tuple(members), float(epsilon), tuple(cover))


def separation_graph(points, zeta: float) -> list[int]:
    """Bitmask adjacency of the graph joining points at d_2 distance > zeta."""
    pts = _as_points(points)
    n, dim = pts.shape
    adj = []
    for i in range(n):
        far = sq_sums(pts, pts[i]) > dim * zeta * zeta
        far[i] = False
        adj.append(sum(1 << int(j) for j in np.flatnonzero(far)))
    return adj


def max_clique_size(adj: list[int]) -> int:
    """Exact maximum clique of a small graph given as bitmask adjacency lists.

    Branch and bound with a greedy colouring bound on the candidate set.
    """
    n = len(adj)
    best = 0

    def colour_bound(cand: int) -> list[tuple[int, int]]:
        # (vertex, colour) pairs in non-decreasing colour order
        order = []
        colour = 0
        uncoloured = cand
        while uncoloured:
            colour += 1
            avail = uncoloured
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~(1 << v) & ~adj[v]
                uncoloured &= ~(1 << v)
                order.append((v, colour))
        return order

    def expand(size: int, cand: int):
        nonlocal best
        order = colour_bound(cand)
        for v, col in reversed(order):
            if size + col <= best:
                return
            new = cand & adj[v]
            if new:
                expand(size + 1, new)
            elif size + 1 > best:
                best = size + 1
            cand &= ~(1 << v)

    if n:
        expand(0, (1 << n) - 1)
    return best


def packing_number_exact(points, zeta: float, cap: int = PACKING_EXACT_CAP) -> int:
    """Largest ``zeta``-separated subset size under d_2, by exact max clique."""
    if not zeta > 0:
        raise InvalidArgument("zeta must be positive")
    pts = _as_points(points)
    if pts.shape[0] > cap:
        raise SizeLimitError(f"exact packing is capped at {cap} points, got {pts.shape[0]}")
    return max_clique_size(separation_graph(pts, zeta))


def rv_packing_bound(
    range_width: float, zeta: float, fat_at_ctilde_zeta: int, constants: BoundConstants
) -> float:
    """``(range_width / (c_tilde * zeta)) ** (C_tilde * fat)``.

    ``fat_at_ctilde_zeta`` must be the fat-shattering dimension at scale
    ``constants.c_tilde * zeta``.
    """
    if not 0 < zeta < range_width / 2:
        raise InvalidArgument("need 0 < zeta < range_width / 2")
    if fat_at_ctilde_zeta < 0:
        raise InvalidArgument("fat-shattering dimension is non-negative")
    if fat_at_ctilde_zeta == 0:
        return 1.0
    base = range_width / (constants.c_tilde * zeta)
    return float(base ** (constants.C_tilde * fat_at_ctilde_zeta))


def calibrate_C_tilde(
    instances: Iterable[tuple[int, float, float, int]],
    c_tilde: float = 1.0,
    lo: float = 1e-3,
    hi: float = 64.0,
    rel_tol: float = 1e-6,
) -> float:
    """Smallest exponent constant (to ``rel_tol``) making the packing bound hold on all instances.

    Each instance is ``(packing, range_width, zeta, fat_at_ctilde_zeta)``.
    Bisection over ``C_tilde``; raises if even ``hi`` fails.
    """
    inst = list(instances)

    def holds(C: float) -> bool:
        k = BoundConstants(c_tilde, C)
        return all(p <= rv_packing_bound(r, z, f, k) for p, r, z, f in inst)

    if not holds(hi):
        raise InvalidArgument(f"no C_tilde <= {hi} satisfies every instance")
    if holds(lo):
        return lo
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi
