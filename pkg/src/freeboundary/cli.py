"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a verification fails, 2 on
bad configuration or malformed input. Output depends only on the flags, so
the same seed reproduces the same bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import besov, measure, mobius, sample
from .scalar import format_scalar
from .verify import SuiteContext, run_all
from .words import FreeGroup


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    rank: int = 2
    p: Fraction = Fraction(2)
    depth: Optional[int] = None
    radius: Optional[int] = None
    length_max: Optional[int] = None
    count: Optional[int] = None
    seed: int = 1
    format: str = "csv"
    tolerance: Optional[float] = None
    perturb: bool = False

    def __post_init__(self):
        if self.rank < 2:
            raise ConfigError(f"rank must be >= 2, got {self.rank}")
        if self.p < 1:
            raise ConfigError(f"p must be >= 1, got {self.p}")
        for name in ("depth", "radius", "length_max", "count"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be >= 0, got {v}")
        if self.tolerance is not None and self.tolerance < 0:
            raise ConfigError("tolerance must be >= 0")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")

    @property
    def group(self) -> FreeGroup:
        return FreeGroup(self.rank)

    @property
    def integer_p(self) -> Optional[int]:
        return int(self.p) if self.p.denominator == 1 else None

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def _value(x):
    if isinstance(x, Fraction):
        return format_scalar(x)
    if isinstance(x, float):
        return repr(x)
    return x


def emit_table(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps([{k: _value(v) for k, v in r.items()} for r in rows], indent=1) + "\n")
        return
    if not rows:
        return
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _value(v) for k, v in r.items()})
    out.write(buf.getvalue())


# -- commands ------------------------------------------------------------------


def cmd_verify(cfg: RunConfig, args, out) -> int:
    p = cfg.integer_p
    if p is None:
        raise ConfigError("verify needs an integer p")
    ctx = SuiteContext(
        cfg.group,
        cfg.seed,
        cfg.count if cfg.count is not None else 50,
        cfg.depth if cfg.depth is not None else 3,
        cfg.length_max if cfg.length_max is not None else 8,
        p,
        cfg.perturb,
    )
    results = run_all(ctx)
    ok = all(r.passed for r in results)
    if cfg.format == "json":
        body = {
            "rank": cfg.rank,
            "seed": cfg.seed,
            "suites": [r.__dict__ for r in results],
            "passed": ok,
        }
        out.write(json.dumps(body, indent=1) + "\n")
    else:
        for r in results:
            out.write(r.line() + "\n")
        out.write(f"{'ALL PASS' if ok else 'FAILED'} (rank {cfg.rank}, seed {cfg.seed})\n")
    return 0 if ok else 1


def cmd_levelsets(cfg: RunConfig, args, out) -> int:
    G = cfg.group
    rows, acc = [], Fraction(0)
    for n in range(0, (cfg.depth if cfg.depth is not None else 10) + 1):
        v = measure.nu_levelset(G, n)
        acc += v
        rows.append({"n": n, "nu": v, "partial_sum": acc})
    emit_table(rows, cfg.format, out)
    return 0


def cmd_norm_table(cfg: RunConfig, args, out) -> int:
    G, rng = cfg.group, cfg.rng()
    q = G.q
    L = cfg.length_max if cfg.length_max is not None else 20
    p = cfg.integer_p
    rows, ok = [], True
    if p is not None:
        lo_rate, hi_rate = measure.growth_rate_brackets(q, p)
    for length in range(1, L + 1):
        g = G.random_word(length, rng)
        if p is not None:
            norm = measure.cocycle_lp_norm_p(G, g, p)
            s = measure.s_sum(length, p, q)
            lo, hi = measure.norm_brackets(q, length, p)
            holds = lo <= norm <= hi and lo_rate <= norm / length <= hi_rate
        else:
            pf = float(cfg.p)
            norm = measure.cocycle_lp_norm_p(G, g, pf)
            s = 2.0 * math.fsum((length + 1 - k) * k**pf * q ** (-k) for k in range(1, length + 1))
            lo, hi = ((q - 1) / (q + 1)) ** 2 * s, (q / (q + 1)) ** 2 * s
            holds = lo * (1 - 1e-9) <= norm <= hi * (1 + 1e-9)
        ok = ok and holds
        rows.append(
            {
                "length": length,
                "norm_p": norm,
                "s_sum": s,
                "lower_bracket": lo,
                "upper_bracket": hi,
                "ratio": float(norm) / length,
                "exact": p is not None,
                "holds": holds,
            }
        )
    emit_table(rows, cfg.format, out)
    return 0 if ok else 1


def cmd_besov(cfg: RunConfig, args, out) -> int:
    G, rng = cfg.group, cfg.rng()
    p = cfg.integer_p
    if p is None or p <= 1:
        raise ConfigError(f"properness table needs an integer p > 1 (for all p > e(Gamma) = 1 on trees), got p={cfg.p}")
    L = cfg.length_max if cfg.length_max is not None else 10
    elements = [G.random_word(k, rng) for k in range(0, L + 1)]
    radius = cfg.radius
    if radius is not None and radius < L + 1:
        raise ConfigError(f"--radius must be at least {L + 1} for elements of length {L}")
    rows = besov.properness_table(G, elements, p, radius)
    emit_table(rows, cfg.format, out)
    ok = all(r["ep_p"] == r["length"] and r["lower_bracket"] <= r["besov_p"] <= r["upper_bracket"] for r in rows)
    return 0 if ok else 1


def _num(x, exact: bool):
    return format_scalar(x) if exact else float(x)


def mobius_report(space: mobius.FiniteMetricSpace, m: mobius.PointMap, tolerance, seed: int) -> tuple[dict, bool]:
    exact = space.exact
    rep = mobius.is_mobius(space, m, tolerance, seed=seed)
    body: dict = {
        "points": space.size,
        "domain": len(m.domain),
        "exact": exact,
        "mobius": {
            "holds": rep.holds,
            "max_deviation": _num(rep.max_deviation, exact),
            "witness": [space.points[i] for i in rep.witness] if rep.witness else None,
            "quadruples": rep.checked,
        },
    }
    ok = rep.holds
    if len(m.domain) >= 3:
        deriv = mobius.derivative_table(space, m)
        body["derivative"] = {space.points[x]: _num(v, exact) for x, v in sorted(deriv.items())}
        res = mobius.check_mean_value(space, m, deriv)
        mv_ok = res <= tolerance
        body["mean_value"] = {"holds": mv_ok, "residual": _num(res, exact)}
        lip = mobius.lipschitz_bound_check(space, m, deriv)
        body["lipschitz"] = {"holds": lip.holds, "worst_pair": _names(space, lip.worst_pair)}
        cb = mobius.cocycle_bound_check(space, m)
        body["cocycle_bound"] = {"holds": cb.holds, "worst_pair": _names(space, cb.worst_pair)}
        al = mobius.alpha_bound_check(space, m, deriv)
        body["alpha_bound"] = {
            "applicable": al.applicable,
            "holds": al.holds,
            "displacement": _num(al.displacement, exact),
            "kappa": _num(al.kappa, exact),
        }
        ok = ok and mv_ok and lip.holds and cb.holds and al.holds
    else:
        body["derivative"] = None
    body["passed"] = ok
    return body, ok


def _names(space, pair):
    return None if pair is None else [space.points[i] for i in pair]


def cmd_mobius_check(cfg: RunConfig, args, out) -> int:
    space = sample.load_space(args.space)
    m = sample.load_map(args.map, space.size) if args.map else mobius.PointMap.identity(space.size)
    tol = cfg.tolerance if cfg.tolerance is not None else (0 if space.exact else 1e-9)
    if space.exact:
        tol = Fraction(tol)
    body, ok = mobius_report(space, m, tol, cfg.seed)
    out.write(json.dumps(body, indent=1) + "\n")
    return 0 if ok else 1


def cmd_kappa(cfg: RunConfig, args, out) -> int:
    if args.space:
        space = sample.load_space(args.space)
    else:
        G, rng = cfg.group, cfg.rng()
        pts = sample.random_points(G, cfg.count if cfg.count is not None else 30, rng,
                                   max_preperiod=cfg.depth if cfg.depth is not None else 6)
        space = sample.sample_space(G, pts)
    k = mobius.kappa(space)
    emit_table([{"points": space.size, "kappa": k}], cfg.format, out)
    return 0


def cmd_export_sample(cfg: RunConfig, args, out) -> int:
    G, rng = cfg.group, cfg.rng()
    elements = [G.parse(t) for t in args.elements.split(",") if t.strip()] if args.elements else []
    base = sample.random_points(G, cfg.count if cfg.count is not None else 50, rng,
                                max_preperiod=cfg.depth if cfg.depth is not None else 6)
    pts = sample.close_sample(base, elements, args.closure_depth, strict=args.strict, cap=args.cap)
    space = sample.sample_space(G, pts)
    maps = [(str(g), sample.element_map(pts, g)) for g in elements]
    written = sample.write_sample(args.outdir, space, maps)
    for pth in written:
        out.write(f"{pth}\n")
    for name, m in maps:
        out.write(f"{name}: defined on {len(m.domain)} of {space.size} points\n")
    return 0


# -- argument parsing -------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--rank", type=int, default=2, help="free group rank n >= 2")
    c.add_argument("--p", type=Fraction, default=Fraction(2), help="exponent p >= 1")
    c.add_argument("--depth", type=int, default=None)
    c.add_argument("--radius", type=int, default=None)
    c.add_argument("--length-max", type=int, default=None)
    c.add_argument("--count", type=int, default=None)
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--tolerance", type=float, default=None)
    c.add_argument("--perturb", action="store_true", help="inject a deliberate fault (self-test)")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="freeboundary", description="Exact boundary calculus of free groups.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the exact-identity suites")
    sub.add_parser("levelsets", parents=[common], help="nu-masses of the level sets K_n")
    sub.add_parser("norm-table", parents=[common], help="L^p norms of the cocycle against their brackets")
    sub.add_parser("besov", parents=[common], help="E_p and Besov seminorms of Busemann functions")
    mc = sub.add_parser("mobius-check", parents=[common], help="Moebius checks for a space and a map")
    mc.add_argument("space")
    mc.add_argument("map", nargs="?")
    kp = sub.add_parser("kappa", parents=[common], help="two-ball covering constant of a space")
    kp.add_argument("space", nargs="?")
    ex = sub.add_parser("export-sample", parents=[common], help="write a boundary sample and element maps")
    ex.add_argument("outdir")
    ex.add_argument("--elements", default="", help="comma-separated words, e.g. a1,a1.A2")
    ex.add_argument("--closure-depth", type=int, default=1)
    ex.add_argument("--strict", action="store_true", help="require the sample to be closed already")
    ex.add_argument("--cap", type=int, default=sample.DEFAULT_CAP)
    return ap


COMMANDS = {
    "verify": cmd_verify,
    "levelsets": cmd_levelsets,
    "norm-table": cmd_norm_table,
    "besov": cmd_besov,
    "mobius-check": cmd_mobius_check,
    "kappa": cmd_kappa,
    "export-sample": cmd_export_sample,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            rank=args.rank,
            p=args.p,
            depth=args.depth,
            radius=args.radius,
            length_max=args.length_max,
            count=args.count,
            seed=args.seed,
            format=args.format,
            tolerance=args.tolerance,
            perturb=args.perturb,
        )
        return COMMANDS[args.command](cfg, args, out)
    except (ConfigError, sample.SampleError, mobius.MetricError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
