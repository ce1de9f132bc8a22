"""Acceptance criteria, one test each, with their runtime budgets.

Every test appends a PASS/FAIL line that pytest prints in its summary; run
this file directly (``python tests/test_acceptance.py``) for the lines alone.
"""
import csv
import io
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import conftest  # noqa: E402
from freeboundary import measure, mobius, sample  # noqa: E402
from freeboundary.besov import (  # noqa: E402
    CayleyBall,
    besov_seminorm_p,
    boundary_extension,
    busemann_function,
    ep_seminorm_p,
)
from freeboundary.cli import main  # noqa: E402
from freeboundary.functions import integrate_nu, pullback  # noqa: E402
from freeboundary.verify import random_admissible  # noqa: E402
from freeboundary.words import BoundaryPoint, FreeGroup, Word, act, gromov_product  # noqa: E402

SEED = 20240611


def report(number: int, title: str, ok: bool, elapsed: float, budget: float, detail: str = "") -> None:
    passed = ok and elapsed < budget
    why = "" if ok else " [check failed]"
    why += "" if elapsed < budget else " [over time budget]"
    line = f"{'PASS' if passed else 'FAIL'} {number}. {title}: {detail} ({elapsed:.2f} s, budget {budget:g} s){why}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert elapsed < budget, line


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def _point_in(x: Word) -> BoundaryPoint:
    return BoundaryPoint(x, (0 if not x or x[-1] != 1 else 2,))


# -- 1 ------------------------------------------------------------------------


def test_criterion_1_level_sets():
    bad = []
    with Clock() as c:
        for rank, q in ((2, 3), (3, 5), (5, 9)):
            out = io.StringIO()
            assert main(["levelsets", "--rank", str(rank), "--depth", "20"], out=out) == 0
            rows = list(csv.DictReader(io.StringIO(out.getvalue())))
            if [int(r["n"]) for r in rows] != list(range(21)):
                bad.append((q, "rows"))
            for r in rows:
                n = int(r["n"])
                want = Fraction(q, q + 1) if n == 0 else Fraction((q - 1) * q**n, q + 1)
                if Fraction(r["nu"]) != want:
                    bad.append((q, n))
    report(1, "level-set table", not bad, c.elapsed, 1, f"q in 3,5,9, n = 0..20 via CLI, mismatches {bad}")


# -- 2 ------------------------------------------------------------------------


def test_criterion_2_nu_invariance():
    rng = random.Random(SEED + 2)
    bad = []
    with Clock() as c:
        for i in range(200):
            G = FreeGroup(2 if i % 2 == 0 else 3)
            depth = rng.randint(1, 6 if G.n == 2 else 4)
            F = random_admissible(G, depth, rng)
            g = G.random_word(rng.randint(0, 8), rng)
            if integrate_nu(pullback(g, F)) != integrate_nu(F):
                bad.append((str(g), depth))
    report(2, "nu-invariance", not bad, c.elapsed, 30, f"200 (g, F), |g| <= 8, depth <= 6, failures {len(bad)}")


# -- 3 ------------------------------------------------------------------------


def test_criterion_3_poisson_identities():
    rng = random.Random(SEED + 3)
    fails = {"relation": 0, "cocycle": 0, "integral": 0}
    with Clock() as c:
        for i in range(500):
            G = FreeGroup(2 + i % 2)
            q = G.q
            g, h = (G.random_word(rng.randint(0, 10), rng) for _ in range(2))
            xi = G.random_point(rng)
            om = G.random_point(rng)
            while om == xi:
                om = G.random_point(rng)
            gi = g.inverse()
            lhs = measure.qpow(q, -2 * gromov_product(act(g, xi), act(g, om)))
            rhs = (
                measure.poisson_kernel(G, gi, xi)
                * measure.poisson_kernel(G, gi, om)
                * measure.qpow(q, -2 * gromov_product(xi, om))
            )
            fails["relation"] += lhs != rhs
            pc = measure.poisson_kernel(G, g * h, xi)
            fails["cocycle"] += pc != measure.poisson_kernel(G, g, xi) * measure.poisson_kernel(G, h, act(gi, xi))
            k = G.random_word(rng.randint(0, 5 if G.n == 2 else 4), rng)
            total = sum(
                (measure.poisson_kernel(G, k, _point_in(x)) * measure.mu_cylinder(G, x) for x in G.sphere(len(k))),
                Fraction(0),
            )
            fails["integral"] += total != 1
    report(3, "relation, Poisson cocycle, integral of P_g", not any(fails.values()), c.elapsed, 10,
           f"500 instances each, failures {fails}")


# -- 4 ------------------------------------------------------------------------


def test_criterion_4_norm_growth():
    q, top = 3, 2000
    rng = random.Random(SEED + 4)
    G = FreeGroup(2)
    problems = []
    with Clock() as c:
        for p in (2, 3, 4):
            T = measure.power_series_sum(p, q)
            lo_rate = Fraction(2, q) * Fraction(q - 1, q + 1) ** 2
            hi_rate = 2 * Fraction(q, q + 1) ** 2 * T
            S = [measure.s_sum(0, p, q)]
            for N in range(1, top + 1):
                S.append(measure.s_sum(N, p, q))
                if not S[N - 1] + Fraction(2, q) <= S[N] < S[N - 1] + 2 * T:
                    problems.append(("S", p, N))
            for L in range(1, top + 1):
                g = G.random_word(L, rng)
                norm = measure.cocycle_lp_norm_p(G, g, p)
                if not Fraction(q - 1, q + 1) ** 2 * S[L] <= norm <= Fraction(q, q + 1) ** 2 * S[L]:
                    problems.append(("bracket", p, L))
                if not lo_rate <= norm / L <= hi_rate:
                    problems.append(("rate", p, L))
    report(4, "cocycle norm growth", not problems, c.elapsed, 60,
           f"p in 2,3,4, |g| = 1..{top}, S_N steps for N < {top}, violations {problems[:5]}")


# -- 5 ------------------------------------------------------------------------


def test_criterion_5_mobius_suite():
    # A nontrivial element fixes exactly two boundary points and moves every
    # other point along an infinite orbit, so a finite sample of 50 points
    # closed under the action does not exist. Each sample here is a 50-point
    # base S together with its images (S u hS u g(hS)), and each element acts
    # as a partial map defined on at least the 50 base points.
    rng = random.Random(SEED + 5)
    stats = {"mobius": 0, "mean_value": 0, "chain_rule": 0, "radon_nikodym": 0, "min_domain": 10**9}
    with Clock() as c:
        G = FreeGroup(2)
        probe = sample.random_points(G, 50, rng)
        g0 = G.random_word(3, rng)
        with pytest.raises(sample.SampleError, match="sample not closed"):
            sample.close_sample(probe, [g0], strict=True)
        for i in range(100):
            G = FreeGroup(2 if i % 4 else 3)
            g, h = (G.random_word(rng.randint(1, 6), rng) for _ in range(2))
            base = sample.random_points(G, 50, rng)
            pts = sample.close_sample(sample.close_sample(base, [h]), [g])
            space = sample.sample_space(G, pts)
            mg, mh = sample.element_map(pts, g), sample.element_map(pts, h)
            stats["min_domain"] = min(stats["min_domain"], len(mg.domain))
            stats["mobius"] += not mobius.is_mobius(space, mg, 0, seed=rng.getrandbits(32)).holds
            deriv = mobius.derivative_table(space, mg)
            stats["mean_value"] += mobius.check_mean_value(space, mg, deriv) != 0
            stats["chain_rule"] += mobius.check_chain_rule(space, mg, mh) != 0
        G = FreeGroup(2)
        for _ in range(100):
            g, x = G.random_word(rng.randint(0, 6), rng), G.random_word(rng.randint(0, 6), rng)
            lhs, rhs = measure.radon_nikodym_check(G, g, x)
            stats["radon_nikodym"] += lhs != rhs
    ok = stats["min_domain"] >= 50 and not any(v for k, v in stats.items() if k != "min_domain")
    report(5, "Moebius suite", ok, c.elapsed, 60,
           "100 elements on image-closed samples (partial maps, action-closed samples impossible), "
           f"failures {stats}")


# -- 6 ------------------------------------------------------------------------


def _twin_sample(G, rng):
    base = sample.random_points(G, 40, rng, max_preperiod=3)
    xi = base[0]
    pre = xi.prefix(16)
    c = next(c for c in G.letters if c not in (xi.letter(16), pre[-1] ^ 1))
    twin = BoundaryPoint(pre, (c,))
    pts = list(dict.fromkeys(base + [twin]))
    imgs = list(range(len(pts)))
    i, j = pts.index(xi), pts.index(twin)
    imgs[i], imgs[j] = j, i
    return sample.sample_space(G, pts), mobius.PointMap(tuple(imgs))


def test_criterion_6_inequalities():
    rng = random.Random(SEED + 6)
    fails = {"lipschitz": 0, "cocycle": 0, "alpha": 0}
    applicable = 0
    tested = 0
    with Clock() as c:
        cases = []
        for i in range(30):
            G = FreeGroup(2 + i % 2)
            g = G.random_word(rng.randint(1, 8), rng)
            pts, space, (m,) = sample.build_sample(G, 50, [g], rng)
            cases += [(space, m), (space, m.inverse())]
        for i in range(10):
            cases.append(_twin_sample(FreeGroup(2 + i % 2), rng))
        for space, m in cases:
            tested += 1
            fails["lipschitz"] += not mobius.lipschitz_bound_check(space, m).holds
            fails["cocycle"] += not mobius.cocycle_bound_check(space, m).holds
            a = mobius.alpha_bound_check(space, m)
            applicable += a.applicable
            fails["alpha"] += a.applicable and not a.holds
    report(6, "inequality suite", not any(fails.values()) and applicable > 0, c.elapsed, 30,
           f"{tested} maps incl. 10 twin-swap isometries, alpha applicable on {applicable}, failures {fails}")


# -- 7 ------------------------------------------------------------------------


def test_criterion_7_besov_bridge():
    rng = random.Random(SEED + 7)
    bad = []
    with Clock() as c:
        for i in range(100):
            G = FreeGroup(2 + i % 2)
            g = G.random_word(rng.randint(0, 50), rng)
            ball = CayleyBall(G, len(g) + 1)
            phi = busemann_function(g, ball)
            f = boundary_extension(phi, len(g))
            for p in (2, 3):
                if besov_seminorm_p(f, p) != measure.cocycle_lp_norm_p(G, g, p):
                    bad.append(("besov", str(g), p))
                if ep_seminorm_p(phi, p) != len(g):
                    bad.append(("ep", str(g), p))
    report(7, "Besov / l^p bridge", not bad, c.elapsed, 60, f"100 g with |g| <= 50, p in 2,3, mismatches {bad[:3]}")


# -- 8 ------------------------------------------------------------------------


def test_criterion_8_ahlfors_and_tail():
    rng = random.Random(SEED + 8)
    bad = []
    with Clock() as c:
        for rank in (2, 3):
            G = FreeGroup(rank)
            q = G.q
            for _ in range(20 if rank == 2 else 5):
                om = G.random_point(rng)
                for n in range(1, 31):
                    if measure.ball_measure(G, om, n) * q**n != Fraction(q, q + 1):
                        bad.append(("ball", str(om), n))
            for n in range(1, 31):
                if measure.tail_distribution(G, n) != sum((measure.nu_levelset(G, m) for m in range(n)), Fraction(0)):
                    bad.append(("tail", rank, n))
    report(8, "Ahlfors regularity and tail", not bad, c.elapsed, 5, f"n = 1..30, 20 points, mismatches {bad[:3]}")


# -- 9 ------------------------------------------------------------------------


def test_criterion_9_determinism():
    cmd = [sys.executable, "-m", "freeboundary.cli", "verify", "--seed", "4242"]
    with Clock() as c:
        a = subprocess.run(cmd, capture_output=True)
        b = subprocess.run(cmd, capture_output=True)
    ok = a.returncode == b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    report(9, "determinism", ok, c.elapsed, 60, f"two verify runs, {len(a.stdout)} bytes each, identical={a.stdout == b.stdout}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider", "-W", "ignore::pytest.PytestAssertRewriteWarning"]))
