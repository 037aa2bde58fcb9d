"""Sample-size bounds: the chaining bound with explicit constants and the
older bound carrying an extra squared logarithm."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidArgument
from .geometry import BoundConstants

LN2 = math.log(2.0)


def _check(range_width: float, epsilon: float, delta: float):
    if not range_width > 0:
        raise InvalidArgument("range width must be positive")
    if not epsilon > 0:
        raise InvalidArgument("epsilon must be positive")
    if not 0 < delta < 1:
        raise InvalidArgument("delta must lie in (0, 1)")


@dataclass(frozen=True)
class TheoremTerms:
    """The three sufficient conditions on m; the bound is their maximum."""

    main: float  # 2 * 44^2 R^2 / eps^2 * (C k ln(8 max(4/c, 1)) + ln(1/delta))
    symmetrization: float  # 4 ln 2 (R / eps)^2
    geometric_sum: float  # 88^2 ln 2 R^2 / eps^2 * (C k + 1)

    @property
    def required(self) -> int:
        return max(1, math.ceil(max(self.main, self.symmetrization, self.geometric_sum)))


def theorem_terms(
    range_width: float, epsilon: float, delta: float, kappa: int, constants: BoundConstants
) -> TheoremTerms:
    _check(range_width, epsilon, delta)
    if kappa < 0:
        raise InvalidArgument("kappa must be non-negative")
    if not isinstance(constants, BoundConstants):
        raise InvalidArgument("constants must be a BoundConstants")
    r2 = (range_width / epsilon) ** 2
    Ck = constants.C_tilde * kappa
    main = 2.0 * 44**2 * r2 * (Ck * math.log(8.0 * max(4.0 / constants.c_tilde, 1.0)) + math.log(1.0 / delta))
    return TheoremTerms(main, 4.0 * LN2 * r2, 88**2 * LN2 * r2 * (Ck + 1.0))


def theorem_sample_bound(
    range_width: float, epsilon: float, delta: float, kappa: int, constants: BoundConstants
) -> int:
    """Smallest m meeting every condition of the chaining proof.

    ``kappa`` is the fat-shattering dimension at scale ``c_tilde * epsilon / 16``.
    """
    return theorem_terms(range_width, epsilon, delta, kappa, constants).required


def legacy_sample_bound(
    range_width: float,
    epsilon: float,
    delta: float,
    fat_at_eps_over_5: int,
    scale_constant: float = 1.0,
) -> int:
    """``scale * (R/eps)^2 (fat ln^2(R/eps) + ln(1/delta))``, rounded up.

    The hidden constant of this bound is unknown; 1 is a non-rigorous default.
    """
    _check(range_width, epsilon, delta)
    if not scale_constant > 0:
        raise InvalidArgument("scale constant must be positive")
    ratio = range_width / epsilon
    val = scale_constant * ratio**2 * (fat_at_eps_over_5 * math.log(ratio) ** 2 + math.log(1.0 / delta))
    return max(1, math.ceil(val))


def compare_bounds(
    range_width: float,
    epsilons: Iterable[float],
    delta: float,
    kappa,
    fat_legacy,
    constants: BoundConstants,
    scale_constant: float = 1.0,
) -> list[dict]:
    """One row per epsilon with both bounds and their ratio (legacy / theorem).

    ``kappa`` and ``fat_legacy`` are either fixed integers or callables of
    epsilon returning the dimension at the appropriate scale.
    """
    rows = []
    for eps in epsilons:
        k = kappa(eps) if callable(kappa) else kappa
        f = fat_legacy(eps) if callable(fat_legacy) else fat_legacy
        new = theorem_sample_bound(range_width, eps, delta, k, constants)
        old = legacy_sample_bound(range_width, eps, delta, f, scale_constant)
        rows.append(
            {"epsilon": eps, "kappa": k, "fat_eps_5": f, "theorem": new, "legacy": old, "ratio": old / new}
        )
    return rows
