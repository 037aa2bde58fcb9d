"""JSON experiment configs, class generators by name, and CSV reports."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import classes as fc
from .bounds import legacy_sample_bound, theorem_sample_bound
from .chaining import build_chain, verify_chain
from .classes import Distribution, FunctionClass, SampleVector
from .dimensions import fat_dim
from .empirical import symmetrization_threshold, tail_probability_mc
from .errors import ConfigError, FatconvError
from .geometry import BoundConstants, UNIT_PROFILE, greedy_net

CSV_SCHEMA_VERSION = 1

EXPERIMENT_COLUMNS = (
    "class_id", "m", "epsilon", "delta", "trials", "estimate", "half_width", "seed", "mode",
    "kappa", "fat_eps_5", "theorem_bound", "legacy_bound", "symmetrization_m",
    "chain_depth", "net_size", "level_sizes", "chain_ok", "schema_version",
)
SIMULATE_COLUMNS = ("class_id", "m", "epsilon", "trials", "estimate", "half_width", "seed", "mode")


def _generator_threshold(p: dict) -> FunctionClass:
    if "grid" in p:
        grid = p["grid"]
    else:
        n = int(p["grid_size"])
        grid = [i / n for i in range(n)]
    if "thresholds" in p:
        thresholds = p["thresholds"]
    else:
        k = int(p.get("n_thresholds", len(grid) + 1))
        thresholds = [i / (k - 1) for i in range(k)] if k > 1 else [0.0]
    return fc.make_threshold_class(grid, thresholds)


def _generator_constant(p: dict) -> FunctionClass:
    v = float(p.get("value", 0.5))
    return FunctionClass([[v] * int(p.get("n_points", 1))], min(0.0, v), max(1.0, v))


def _generator_random(p: dict) -> FunctionClass:
    rng = np.random.default_rng(int(p.get("seed", 0)))
    return fc.random_class(
        rng, int(p["n_points"]), int(p["n_rows"]), int(p.get("levels", 2)),
        float(p.get("lo", 0.0)), float(p.get("hi", 1.0)),
    )


GENERATORS = {
    "threshold": _generator_threshold,
    "full_binary": lambda p: fc.make_full_binary_class(int(p["n"])),
    "constant": _generator_constant,
    "random": _generator_random,
}


def build_class(spec: Any) -> FunctionClass:
    """A class from an inline description or ``{"generator": name, ...params}``."""
    if not isinstance(spec, dict):
        raise ConfigError("class spec must be a JSON object")
    if "values" in spec:
        return FunctionClass.from_dict(spec)
    name = spec.get("generator")
    if name not in GENERATORS:
        raise ConfigError(f"unknown class generator {name!r}")
    try:
        return GENERATORS[name](spec)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad parameters for generator {name!r}: {exc}") from None


def build_distribution(spec: Any, n_points: int) -> Distribution:
    if spec is None or spec == "uniform":
        return Distribution.uniform(n_points)
    if isinstance(spec, dict) and "weights" in spec:
        w = spec["weights"]
        if len(w) != n_points:
            raise ConfigError("distribution length does not match the class domain")
        return Distribution(w)
    if isinstance(spec, dict) and "point_mass" in spec:
        return Distribution.point_mass(n_points, int(spec["point_mass"]))
    raise ConfigError(f"unknown distribution spec {spec!r}")


@dataclass
class ExperimentConfig:
    class_spec: Optional[dict] = None
    distribution: Any = "uniform"
    epsilon: float = 0.25
    delta: float = 0.05
    m_values: list = field(default_factory=lambda: [16])
    trials: int = 1000
    seed: int = 0
    constants: BoundConstants = UNIT_PROFILE
    legacy_constant: float = 1.0
    class_id: str = "class"
    epsilons: Optional[list] = None
    sample: Optional[list] = None
    gammas: Optional[list] = None
    zeta: Optional[float] = None
    kappa: Optional[int] = None
    fat: Optional[int] = None
    range_width: Optional[float] = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.m_values or any(int(m) != m or m < 1 for m in self.m_values):
            raise ConfigError("m values must be positive integers")
        if self.legacy_constant <= 0:
            raise ConfigError("legacy constant must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d = dict(d)
        spec = d.pop("class", None)
        k = d.pop("constants", None)
        try:
            constants = UNIT_PROFILE if k is None else BoundConstants(float(k["c_tilde"]), float(k["C_tilde"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad constants: {exc}") from None
        known = set(cls.__dataclass_fields__) - {"class_spec", "constants"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(class_spec=spec, constants=constants, **d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None

    def build(self) -> tuple[FunctionClass, Distribution]:
        if self.class_spec is None:
            raise ConfigError("config needs a 'class' entry")
        c = build_class(self.class_spec)
        return c, build_distribution(self.distribution, c.n_points)


def draw_double_sample(dist: Distribution, m: int, seed: int, stream: int = 0) -> SampleVector:
    rng = np.random.default_rng([int(seed), 0x5A4D, int(stream), int(m)])
    return SampleVector(tuple(rng.choice(dist.size, size=2 * m, p=dist.weights).tolist()), m)


def chain_statistics(cls: FunctionClass, sample: SampleVector, epsilon: float) -> dict:
    """Net and chain over the restriction of ``cls`` to ``sample``, with its check."""
    r = fc.restrict(cls, sample)
    net = greedy_net(r.vectors, epsilon / 8.0)
    chain = build_chain(net, cls.range_width, epsilon)
    report = verify_chain(chain, sample.m)
    return {"net": net, "chain": chain, "report": report}


def run_experiment(config: ExperimentConfig, workers: int = 1, exact: bool = False) -> list[dict]:
    cls, dist = config.build()
    R = cls.range_width
    eps = config.epsilon
    kappa = fat_dim(cls, config.constants.c_tilde * eps / 16.0)
    fat5 = fat_dim(cls, eps / 5.0)
    theorem = theorem_sample_bound(R, eps, config.delta, kappa, config.constants)
    legacy = legacy_sample_bound(R, eps, config.delta, fat5, config.legacy_constant)
    rows = []
    for m in config.m_values:
        m = int(m)
        est = tail_probability_mc(cls, dist, m, eps, config.trials, config.seed, workers, exact)
        chain = {"chain_depth": "", "net_size": "", "level_sizes": "", "chain_ok": ""}
        if eps < R:
            stats = chain_statistics(cls, draw_double_sample(dist, m, config.seed), eps)
            ch = stats["chain"]
            chain = {
                "chain_depth": ch.depth,
                "net_size": len(stats["net"]),
                "level_sizes": ";".join(str(s) for s in ch.level_sizes()),
                "chain_ok": int(stats["report"].passed),
            }
        rows.append({
            "class_id": config.class_id, "m": m, "epsilon": eps, "delta": config.delta,
            "trials": est.trials, "estimate": est.point_estimate, "half_width": est.half_width_95,
            "seed": config.seed, "mode": est.mode, "kappa": kappa, "fat_eps_5": fat5,
            "theorem_bound": theorem, "legacy_bound": legacy,
            "symmetrization_m": symmetrization_threshold(R, eps), **chain,
            "schema_version": CSV_SCHEMA_VERSION,
        })
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def to_csv(rows: list[dict], columns) -> str:
    """UTF-8 CSV text; only ``class_id`` is ever quoted."""
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for c in columns:
            cell = _fmt(row.get(c, ""))
            if c == "class_id":
                cell = '"' + cell.replace('"', '""') + '"'
            elif any(ch in cell for ch in ',"\n'):
                raise FatconvError(f"column {c} value {cell!r} would need quoting")
            cells.append(cell)
        out.write(",".join(cells) + "\n")
    return out.getvalue()
