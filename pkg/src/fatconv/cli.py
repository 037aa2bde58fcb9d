"""Command line entry point: ``fatconv <subcommand> [--config cfg.json] ...``.

Exit codes: 0 success, 2 config error, 3 size limit, 4 invariant failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import classes as fc
from .bounds import compare_bounds, legacy_sample_bound, theorem_terms
from .dimensions import fat_dim, fat_shattered_set, vc_dim
from .empirical import symmetrized_deviation_tail, tail_probability_mc
from .errors import ConfigError, FatconvError, InvariantViolation, SizeLimitError
from .experiment import (
    EXPERIMENT_COLUMNS, SIMULATE_COLUMNS, ExperimentConfig, chain_statistics,
    draw_double_sample, run_experiment, to_csv,
)
from .geometry import PACKING_EXACT_CAP, greedy_net, packing_number_exact, rv_packing_bound
from .chaining import increment_halved_norm


def _load_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {args.config}: {exc}") from None
        if isinstance(data, dict) and "values" in data:
            data = {"class": data}
    if getattr(args, "class_file", None):
        try:
            data["class"] = json.loads(Path(args.class_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read class file: {exc}") from None
    if args.seed is not None:
        data["seed"] = args.seed
    for key in ("epsilon", "delta", "kappa", "fat", "zeta"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "range", None) is not None:
        data["range_width"] = args.range
    return ExperimentConfig.from_dict(data)


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _samples(cfg, dist):
    if cfg.sample is not None:
        yield fc.SampleVector.of(cfg.sample)
        return
    for m in cfg.m_values:
        yield draw_double_sample(dist, int(m), cfg.seed)


def cmd_dim(args):
    cfg = _load_config(args)
    cls, _ = cfg.build()
    gammas = args.gamma or cfg.gammas or [cfg.epsilon]
    vc = vc_dim(cls) if cls.is_binary() else ""
    rows, certs = [], []
    for g in gammas:
        d, cert = fat_shattered_set(cls, float(g))
        rows.append({"class_id": cfg.class_id, "gamma": float(g), "fat_dim": d, "vc_dim": vc,
                     "subset": ";".join(str(i) for i in cert.subset) if cert else ""})
        certs.append(cert.to_dict() if cert else None)
    if args.certificates:
        Path(args.certificates).write_text(json.dumps(certs, indent=1), encoding="utf-8")
    _write(args, to_csv(rows, ("class_id", "gamma", "fat_dim", "vc_dim", "subset")))


def cmd_pack(args):
    cfg = _load_config(args)
    cls, dist = cfg.build()
    zeta = cfg.zeta if cfg.zeta is not None else cfg.epsilon / 8.0
    R = cls.range_width
    rows = []
    for sample in _samples(cfg, dist):
        r = fc.restrict(cls, sample)
        net = greedy_net(r.vectors, zeta)
        if len(r) <= PACKING_EXACT_CAP:
            exact = packing_number_exact(r.vectors, zeta)
        elif args.exact:
            raise SizeLimitError(f"restriction has {len(r)} > {PACKING_EXACT_CAP} vectors")
        else:
            exact = ""
        fat = fat_dim(cls, cfg.constants.c_tilde * zeta)
        rv = rv_packing_bound(R, zeta, fat, cfg.constants) if zeta < R / 2 else ""
        rows.append({"class_id": cfg.class_id, "m": sample.m, "zeta": zeta,
                     "restriction_size": len(r), "net_size": len(net), "packing_exact": exact,
                     "fat_ctilde_zeta": fat, "rv_bound": rv})
    _write(args, to_csv(rows, ("class_id", "m", "zeta", "restriction_size", "net_size",
                               "packing_exact", "fat_ctilde_zeta", "rv_bound")))


def cmd_chain(args):
    cfg = _load_config(args)
    cls, dist = cfg.build()
    rows, reports, ok = [], [], True
    for sample in _samples(cfg, dist):
        stats = chain_statistics(cls, sample, cfg.epsilon)
        chain, report = stats["chain"], stats["report"]
        ok &= report.passed
        reports.append({"m": sample.m, **report.to_dict()})
        R, m = chain.range_width, sample.m
        for j in range(chain.depth + 1):
            norms = [increment_halved_norm(h, m) for h in chain.increments[j]]
            rows.append({"class_id": cfg.class_id, "m": m, "level": j, "radius": chain.radius(j),
                         "G_size": len(chain.levels[j]), "H_size": len(chain.increments[j]),
                         "max_halved_norm": max(norms),
                         "norm_limit": m * R * R if j == 0 else 16.0 * m * R * R * 4.0**-j,
                         "passed": int(report.passed)})
    if args.report:
        Path(args.report).write_text(json.dumps(reports, indent=1), encoding="utf-8")
    _write(args, to_csv(rows, ("class_id", "m", "level", "radius", "G_size", "H_size",
                               "max_halved_norm", "norm_limit", "passed")))
    if not ok:
        raise InvariantViolation("chain verification failed")


def cmd_simulate(args):
    cfg = _load_config(args)
    cls, dist = cfg.build()
    fn = symmetrized_deviation_tail if args.symmetrized else tail_probability_mc
    rows = []
    for m in cfg.m_values:
        est = fn(cls, dist, int(m), cfg.epsilon, cfg.trials, cfg.seed, args.threads, args.exact)
        rows.append({"class_id": cfg.class_id, "m": int(m), "epsilon": cfg.epsilon,
                     "trials": est.trials, "estimate": est.point_estimate,
                     "half_width": est.half_width_95, "seed": cfg.seed, "mode": est.mode})
    _write(args, to_csv(rows, SIMULATE_COLUMNS))


def _dims_for(cfg):
    """Fixed (kappa, fat) from the config, or per-epsilon functions of the class."""
    if cfg.class_spec is None:
        if cfg.kappa is None or cfg.fat is None or cfg.range_width is None:
            raise ConfigError("without a class, kappa, fat and range are required")
        return cfg.range_width, cfg.kappa, cfg.fat
    cls, _ = cfg.build()
    kappa = cfg.kappa if cfg.kappa is not None else (
        lambda e: fat_dim(cls, cfg.constants.c_tilde * e / 16.0))
    fat = cfg.fat if cfg.fat is not None else (lambda e: fat_dim(cls, e / 5.0))
    return cls.range_width, kappa, fat


def cmd_bound(args):
    cfg = _load_config(args)
    R, kappa, fat = _dims_for(cfg)
    eps = cfg.epsilon
    k = kappa(eps) if callable(kappa) else kappa
    f = fat(eps) if callable(fat) else fat
    t = theorem_terms(R, eps, cfg.delta, k, cfg.constants)
    row = {"range_width": R, "epsilon": eps, "delta": cfg.delta, "kappa": k, "fat_eps_5": f,
           "c_tilde": cfg.constants.c_tilde, "C_tilde": cfg.constants.C_tilde,
           "theorem_bound": t.required, "main_term": t.main,
           "symmetrization_term": t.symmetrization, "geometric_term": t.geometric_sum,
           "legacy_bound": legacy_sample_bound(R, eps, cfg.delta, f, cfg.legacy_constant)}
    _write(args, _plain_csv([row]))


def _plain_csv(rows):
    cols = tuple(rows[0])
    lines = [",".join(cols)] + [",".join(_cell(r[c]) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"


def _cell(v):
    return repr(v) if isinstance(v, float) else str(v)


def cmd_compare(args):
    cfg = _load_config(args)
    R, kappa, fat = _dims_for(cfg)
    if args.eps_exponents:
        lo, hi = args.eps_exponents
        epsilons = [2.0**-k for k in range(lo, hi + 1)]
    else:
        epsilons = cfg.epsilons or [cfg.epsilon]
    rows = compare_bounds(R, epsilons, cfg.delta, kappa, fat, cfg.constants, cfg.legacy_constant)
    _write(args, _plain_csv(rows))


def cmd_run(args):
    cfg = _load_config(args)
    _write(args, to_csv(run_experiment(cfg, args.threads, args.exact), EXPERIMENT_COLUMNS))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config or class file")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--exact", action="store_true", help="force exact enumeration or fail")
    common.add_argument("--threads", type=int, default=1, help="Monte Carlo worker threads")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--delta", type=float)

    p = argparse.ArgumentParser(prog="fatconv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dim", parents=[common], help="fat-shattering / VC dimension of a class")
    d.add_argument("class_file", nargs="?")
    d.add_argument("--gamma", type=float, action="append")
    d.add_argument("--certificates", help="dump shattering certificates as JSON")
    d.set_defaults(fn=cmd_dim)

    pk = sub.add_parser("pack", parents=[common], help="greedy net and packing report")
    pk.add_argument("--zeta", type=float)
    pk.set_defaults(fn=cmd_pack)

    c = sub.add_parser("chain", parents=[common], help="build and verify the chain")
    c.add_argument("--report", help="write the verification report as JSON")
    c.set_defaults(fn=cmd_chain)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo deviation tails")
    s.add_argument("--symmetrized", action="store_true", help="double-sample tail at epsilon/2")
    s.set_defaults(fn=cmd_simulate)

    for name, fn, helptext in (("bound", cmd_bound, "evaluate the sample-size bounds"),
                               ("compare", cmd_compare, "sweep epsilon, new vs legacy bound")):
        b = sub.add_parser(name, parents=[common], help=helptext)
        b.add_argument("--range", type=float)
        b.add_argument("--kappa", type=int)
        b.add_argument("--fat", type=int)
        if name == "compare":
            b.add_argument("--eps-exponents", type=int, nargs=2, metavar=("LO", "HI"),
                           help="sweep epsilon = 2**-k for k in LO..HI")
        b.set_defaults(fn=fn)

    r = sub.add_parser("run", parents=[common], help="end-to-end experiment report")
    r.set_defaults(fn=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except FatconvError as exc:
        print(f"fatconv: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
