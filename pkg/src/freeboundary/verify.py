"""The exact-identity suites run by ``freeboundary verify``.

Every suite draws its instances from its own ``random.Random`` seeded from
the run seed and the suite name, so reports are reproducible byte for byte
and adding a suite does not shift the draws of the others.
"""
from __future__ import annotations

import random
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import besov, measure, mobius, sample
from .cylinders import image_of_cylinder
from .functions import PairFunction, depth_cells, integrate_nu, pullback
from .words import BoundaryPoint, FreeGroup, Word, act, gromov_product


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    witness: Optional[str] = None

    def line(self) -> str:
        head = f"{'PASS' if self.passed else 'FAIL'} {self.name} ({self.checked} checks)"
        return head if self.passed else f"{head}: {self.witness}"


@dataclass
class SuiteContext:
    group: FreeGroup
    seed: int
    count: int
    depth: int
    length_max: int
    p: int
    perturb: bool = False

    def rng(self, name: str) -> random.Random:
        return random.Random(self.seed * 1_000_003 + zlib.crc32(name.encode()))


class _Fail(Exception):
    pass


def _expect(ok: bool, witness: Callable[[], str]):
    if not ok:
        raise _Fail(witness())


def suite_words(ctx: SuiteContext) -> int:
    G, rng = ctx.group, ctx.rng("words")
    L = ctx.length_max
    for _ in range(ctx.count):
        g, h, k = (G.random_word(rng.randint(0, L), rng) for _ in range(3))
        lhs = gromov_product(g, h)
        _expect(2 * lhs == len(g) + len(h) - len(g.inverse() * h), lambda: f"(g,h) formula at g={g}, h={h}")
        _expect(
            gromov_product(g, k) >= min(lhs, gromov_product(h, k)),
            lambda: f"ultrametric inequality at {g}, {h}, {k}",
        )
        xi = G.random_point(rng)
        _expect(act(g * h, xi) == act(g, act(h, xi)), lambda: f"action axiom at g={g}, h={h}, xi={xi}")
        x = G.random_word(rng.randint(0, 4), rng)
        _expect(
            image_of_cylinder(G.n, g * h, x) == image_of_cylinder(G.n, h, x).image(g),
            lambda: f"image composition at g={g}, h={h}, x={x}",
        )
    return 4 * ctx.count


def suite_poisson(ctx: SuiteContext) -> int:
    G, rng, q = ctx.group, ctx.rng("poisson"), ctx.group.q
    for _ in range(ctx.count):
        g, h = (G.random_word(rng.randint(0, ctx.length_max), rng) for _ in range(2))
        xi, om = G.random_point(rng), G.random_point(rng)
        lhs = measure.poisson_kernel(G, g * h, xi)
        rhs = measure.poisson_kernel(G, g, xi) * measure.poisson_kernel(G, h, act(g.inverse(), xi))
        _expect(lhs == rhs, lambda: f"P_gh != P_g g.P_h at g={g}, h={h}, xi={xi}")
        if xi != om:
            gi = g.inverse()
            left = measure.qpow(q, -2 * gromov_product(act(g, xi), act(g, om)))
            right = measure.poisson_kernel(G, gi, xi) * measure.poisson_kernel(G, gi, om) * measure.qpow(
                q, -2 * gromov_product(xi, om)
            )
            _expect(left == right, lambda: f"relation for q^-2(gxi,gom) fails at g={g}, xi={xi}, om={om}")
        k = G.random_word(rng.randint(0, 6), rng)
        total = sum(
            (measure.poisson_kernel(G, k, _point_in(x)) * measure.mu_cylinder(G, x) for x in G.sphere(len(k))),
            Fraction(0),
        )
        _expect(total == 1, lambda: f"integral of P_g is {total} for g={k}")
    return 3 * ctx.count


def _point_in(x: Word) -> BoundaryPoint:
    # any point of Omega_x; the kernel of g is constant on depth-|g| cylinders
    nxt = 0 if not x or x[-1] != 1 else 2
    return BoundaryPoint(x, (nxt,))


def suite_radon_nikodym(ctx: SuiteContext) -> int:
    G, rng = ctx.group, ctx.rng("radon-nikodym")
    for _ in range(ctx.count):
        g, x = G.random_word(rng.randint(0, 6), rng), G.random_word(rng.randint(0, 6), rng)
        lhs, rhs = measure.radon_nikodym_check(G, g, x)
        _expect(lhs == rhs, lambda: f"mu(g Omega_x)={lhs} but integral of |g'| is {rhs} (g={g}, x={x})")
    return ctx.count


def random_admissible(group: FreeGroup, depth: int, rng: random.Random, bound: int = 50) -> PairFunction:
    """A random pair function on depth-``depth`` cylinders, zero on the diagonal cells."""
    words, cells = depth_cells(group, depth)
    nrng = np.random.default_rng(rng.getrandbits(64))
    num = nrng.integers(-bound, bound + 1, size=(len(words), len(words)), dtype=np.int64)
    np.fill_diagonal(num, 0)
    return PairFunction(group.n, cells, num, rng.randint(1, 9), check=False)


def suite_nu_invariance(ctx: SuiteContext) -> int:
    G, rng = ctx.group, ctx.rng("nu-invariance")
    for i in range(ctx.count):
        F = random_admissible(G, rng.randint(1, min(ctx.depth, 4)), rng)
        g = G.random_word(rng.randint(0, 8), rng)
        moved = pullback(g, F)
        if ctx.perturb and i == 0:
            num = moved.numerators.copy()
            num[0, 1] += 1
            moved = PairFunction(G.n, moved.cells, num, moved.denominator, check=False)
        a, b = integrate_nu(F), integrate_nu(moved)
        _expect(a == b, lambda: f"integral changed from {a} to {b} under g={g} at depth {F.depth}")
    return ctx.count


def suite_cocycle(ctx: SuiteContext) -> int:
    G, rng, p = ctx.group, ctx.rng("cocycle"), ctx.p
    for _ in range(ctx.count):
        g, h = (G.random_word(rng.randint(1, ctx.length_max), rng) for _ in range(2))
        xi, om = G.random_point(rng), G.random_point(rng)
        gi = g.inverse()
        lhs = measure.cocycle_value(g * h, xi, om)
        rhs = measure.cocycle_value(h, act(gi, xi), act(gi, om)) + measure.cocycle_value(g, xi, om)
        _expect(lhs == rhs, lambda: f"cocycle identity fails at g={g}, h={h}")
        norm = measure.cocycle_lp_norm_p(G, g, p)
        lo, hi = measure.norm_brackets(G.q, len(g), p)
        _expect(lo <= norm <= hi, lambda: f"norm {norm} outside [{lo}, {hi}] for g={g}")
        _expect(norm == measure.cocycle_lp_norm_p(G, gi, p), lambda: f"norm of g^-1 differs for g={g}")
    return 3 * ctx.count


def suite_mobius(ctx: SuiteContext) -> int:
    G, rng = ctx.group, ctx.rng("mobius")
    checks = 0
    for i in range(max(1, ctx.count // 10)):
        g, h = (G.random_word(rng.randint(1, 5), rng) for _ in range(2))
        base = sample.random_points(G, 20, rng)
        pts = sample.close_sample(sample.close_sample(base, [h]), [g])
        space = sample.sample_space(G, pts)
        mg, mh = sample.element_map(pts, g), sample.element_map(pts, h)
        rep = mobius.is_mobius(space, mg, 0, seed=rng.getrandbits(32))
        _expect(rep.holds, lambda: f"cross-ratio changed by {g} on quadruple {rep.witness}")
        deriv = mobius.derivative_table(space, mg)
        for x, v in deriv.items():
            _expect(v == measure.derivative_on_tree(G, g, pts[x]), lambda: f"|g'| mismatch at {pts[x]} for g={g}")
        if ctx.perturb and i == 0:
            deriv = mobius.DerivativeFunction(deriv)
            first = next(iter(deriv))
            deriv[first] *= 2
        res = mobius.check_mean_value(space, mg, deriv)
        _expect(res == 0, lambda: f"mean-value residual {res} for g={g}")
        res = mobius.check_chain_rule(space, mg, mh)
        _expect(res == 0, lambda: f"chain-rule residual {res} for g={g}, h={h}")
        for m, name in ((mg, "g"), (mg.inverse(), "g^-1")):
            lip = mobius.lipschitz_bound_check(space, m)
            _expect(lip.holds, lambda: f"Lipschitz bound fails for {name}={g} at pair {lip.worst_pair}")
        cb = mobius.cocycle_bound_check(space, mg)
        _expect(cb.holds, lambda: f"cocycle bound fails for g={g} at pair {cb.worst_pair}")
        checks += 7
    return checks


def suite_besov(ctx: SuiteContext) -> int:
    G, rng = ctx.group, ctx.rng("besov")
    ball = besov.CayleyBall(G, ctx.length_max + 1)
    for _ in range(ctx.count):
        g = G.random_word(rng.randint(0, ctx.length_max), rng)
        phi = besov.busemann_function(g, ball)
        ep = besov.ep_seminorm_p(phi, ctx.p)
        _expect(ep == len(g), lambda: f"E_p seminorm {ep} != |g| for g={g}")
        b = besov.besov_seminorm_p(besov.boundary_extension(phi, len(g)), ctx.p)
        c = measure.cocycle_lp_norm_p(G, g, ctx.p)
        _expect(b == c, lambda: f"Besov seminorm {b} != cocycle norm {c} for g={g}")
    return 2 * ctx.count


def suite_measures(ctx: SuiteContext) -> int:
    G, rng, q = ctx.group, ctx.rng("measures"), ctx.group.q
    n = 0
    for x in G.sphere(2):
        kids = sum((measure.mu_cylinder(G, c) for c in G.children(x)), Fraction(0))
        _expect(kids == measure.mu_cylinder(G, x), lambda: f"children of {x} do not add up")
        n += 1
    acc = Fraction(0)
    for m in range(1, 31):
        acc += measure.nu_levelset(G, m - 1)
        _expect(measure.tail_distribution(G, m) == acc, lambda: f"tail at {m} differs from level-set sum")
        om = G.random_point(rng)
        _expect(
            measure.ball_measure(G, om, m) * q**m == Fraction(q, q + 1),
            lambda: f"ball ratio off at n={m}, omega={om}",
        )
        n += 2
    return n


SUITES = [
    ("words", suite_words),
    ("measures", suite_measures),
    ("poisson", suite_poisson),
    ("radon-nikodym", suite_radon_nikodym),
    ("nu-invariance", suite_nu_invariance),
    ("cocycle", suite_cocycle),
    ("mobius", suite_mobius),
    ("besov", suite_besov),
]


def run_all(ctx: SuiteContext) -> list[SuiteResult]:
    out = []
    for name, fn in SUITES:
        try:
            out.append(SuiteResult(name, True, fn(ctx)))
        except _Fail as exc:
            out.append(SuiteResult(name, False, 0, str(exc)))
    return out
