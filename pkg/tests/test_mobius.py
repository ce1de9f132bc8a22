import itertools
import random
from fractions import Fraction

import pytest

from freeboundary import _kernels
from freeboundary import mobius as M
from freeboundary.measure import derivative_on_tree
from freeboundary.sample import build_sample, close_sample, element_map, random_points, sample_space
from freeboundary.words import BoundaryPoint

import oracles


def generic_space(n=6, seed=5, exact=True):
    r = random.Random(seed)
    D = [[0] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        D[i][j] = D[j][i] = Fraction(r.randint(100, 200), 100)
    if not exact:
        D = [[float(x) for x in row] for row in D]
    return M.FiniteMetricSpace([f"p{i}" for i in range(n)], D, exact=exact).validate()


def is_power_of(q, v):
    while v % q == 0:
        v //= q
    return v == 1


def uniform_space(n, exact=True):
    one = Fraction(1) if exact else 1.0
    return M.FiniteMetricSpace(list(map(str, range(n))), [[0 if i == j else one for j in range(n)] for i in range(n)], exact)


def test_validation_errors():
    with pytest.raises(M.MetricError, match="triangle"):
        M.FiniteMetricSpace(list("abc"), [[0, 1, 5], [1, 0, 1], [5, 1, 0]]).validate()
    with pytest.raises(M.MetricError, match="asymmetric"):
        M.FiniteMetricSpace(list("ab"), [[0, 1], [2, 0]]).validate()
    with pytest.raises(M.MetricError):
        M.FiniteMetricSpace(list("ab"), [[0, 0], [0, 0]]).validate()
    with pytest.raises(M.MetricError):
        M.FiniteMetricSpace(list("abc"), [[0, 1], [1, 0]])
    # approximate mode tolerates rounding at the 1e-12 level only
    M.FiniteMetricSpace(list("abc"), [[0, 1, 2 + 1e-14], [1, 0, 1], [2 + 1e-14, 1, 0]], exact=False).validate()
    with pytest.raises(M.MetricError):
        M.FiniteMetricSpace(list("abc"), [[0, 1, 2 + 1e-6], [1, 0, 1], [2 + 1e-6, 1, 0]], exact=False).validate()


def test_point_maps():
    m = M.PointMap((2, 0, 1, None))
    assert m.domain == [0, 1, 2]
    assert m.inverse().compose(m).images == (0, 1, 2, None)
    with pytest.raises(M.MetricError):
        M.PointMap((0, 0))
    with pytest.raises(M.MetricError):
        M.PointMap((0, 5))


def test_coprime_base():
    base = M.coprime_base([12, 18, 35, 1])
    assert all(M.math.gcd(a, b) == 1 for a, b in itertools.combinations(base, 2))
    for v in (12, 18, 35):
        assert M._exponents(v, base) is not None


def test_cross_ratio_examples():
    s = uniform_space(4)
    assert M.cross_ratio(s, 0, 1, 2, 3) == 1
    g = generic_space()
    assert M.cross_ratio(g, 0, 1, 3, 2) == 1 / M.cross_ratio(g, 0, 1, 2, 3)
    with pytest.raises(ValueError):
        M.cross_ratio(g, 0, 1, 1, 2)


def test_cross_ratio_on_boundary_is_power_of_q(F2, rng):
    pts = random_points(F2, 12, rng)
    s = sample_space(F2, pts)
    for quad in itertools.combinations(range(12), 4):
        cr = M.cross_ratio(s, *quad)
        assert is_power_of(3, cr.numerator * cr.denominator) and min(cr.numerator, cr.denominator) == 1


def test_is_mobius_examples(F2, rng):
    g6 = generic_space()
    rep = M.is_mobius(g6, M.PointMap.identity(6), 0)
    assert rep.holds and rep.max_deviation == 0 and rep.checked == 15
    rep = M.is_mobius(g6, M.random_transposition(6, random.Random(1)), 0)
    assert not rep.holds and rep.max_deviation > 0 and rep.witness is not None
    g = F2.random_word(4, rng)
    pts, space, (m,) = build_sample(F2, 30, [g], rng)
    assert M.is_mobius(space, m, 0).holds


def test_is_mobius_float_mode_and_tolerance_monotone():
    s = generic_space(exact=False)
    t = M.random_transposition(6, random.Random(1))
    dev = M.is_mobius(s, t, 0).max_deviation
    assert dev > 0
    assert not M.is_mobius(s, t, dev / 2).holds
    assert M.is_mobius(s, t, dev).holds and M.is_mobius(s, t, 2 * dev).holds


def test_sampled_quadruples_above_the_enumeration_limit(F2, rng):
    g = F2.random_word(3, rng)
    pts, space, (m,) = build_sample(F2, 60, [g], rng)
    rep = M.is_mobius(space, m, 0, samples=5000)
    assert rep.holds and rep.checked == 5000


def test_metric_derivative_examples(F2, rng):
    s = generic_space()
    ident = M.PointMap.identity(6)
    assert M.metric_derivative(s, ident, 0, 1, 2) == 1
    with pytest.raises(ValueError):
        M.metric_derivative(s, ident, 0, 0, 2)
    # an isometry: swap two points at equal distance from everything else
    u = uniform_space(5)
    swap = M.PointMap((1, 0, 2, 3, 4))
    assert set(M.derivative_table(u, swap).values()) == {1}


def test_derivative_matches_tree_formula_and_is_pair_independent(F2, rng):
    for _ in range(5):
        g = F2.random_word(rng.randint(1, 5), rng)
        pts, space, (m,) = build_sample(F2, 25, [g], rng)
        d = M.derivative_table(space, m)
        for x, v in d.items():
            assert v == derivative_on_tree(F2, g, pts[x])
        x = m.domain[0]
        pairs = list(itertools.combinations([y for y in m.domain if y != x], 2))[:200]
        assert M.derivative_spread(space, m, x, pairs) == 0


def test_mean_value(F2, rng):
    u = uniform_space(5)
    ident = M.PointMap.identity(5)
    assert M.check_mean_value(u, ident, M.DerivativeFunction({i: 1 for i in range(5)})) == 0
    g = F2.random_word(3, rng)
    pts, space, (m,) = build_sample(F2, 25, [g], rng)
    tree = M.DerivativeFunction({x: derivative_on_tree(F2, g, pts[x]) for x in m.domain})
    assert M.check_mean_value(space, m, tree) == 0
    x0 = m.domain[0]
    tree[x0] *= 2
    assert M.check_mean_value(space, m, tree) > 0
    with pytest.raises(ValueError):
        M.DerivativeFunction({0: 0})


def test_chain_rule(F2, rng):
    g, h = F2.random_word(3, rng), F2.random_word(4, rng)
    base = random_points(F2, 20, rng)
    pts = close_sample(close_sample(base, [h]), [g])
    space = sample_space(F2, pts)
    mg, mh = element_map(pts, g), element_map(pts, h)
    assert M.check_chain_rule(space, mg, mh) == 0
    assert M.check_chain_rule(space, mg, M.PointMap.identity(len(pts))) == 0
    # g = h^-1 recovers |(h^-1)'| = 1 / h.|h'|
    assert M.check_chain_rule(space, mh.inverse(), mh) == 0


def test_chain_rule_composes_mobius(F2, rng):
    g, h = F2.random_word(2, rng), F2.random_word(3, rng)
    pts = close_sample(close_sample(random_points(F2, 20, rng), [h]), [g])
    space = sample_space(F2, pts)
    gh = element_map(pts, g).compose(element_map(pts, h))
    assert M.is_mobius(space, gh, 0).holds
    direct = element_map(pts, g * h)
    assert all(direct(x) == gh(x) for x in gh.domain)


def test_inequalities_on_samples(F2, rng):
    for _ in range(5):
        g = F2.random_word(rng.randint(1, 6), rng)
        pts, space, (m,) = build_sample(F2, 30, [g], rng)
        assert M.lipschitz_bound_check(space, m).holds
        assert M.cocycle_bound_check(space, m).holds
        a = M.alpha_bound_check(space, m)
        assert a.holds


def test_lipschitz_isometry_and_sqrt_comparisons():
    u = uniform_space(5)
    assert M.lipschitz_bound_check(u, M.PointMap((1, 0, 2, 3, 4))).holds
    # sqrt(9) - sqrt(4) = 1 <= K / sqrt(m) decided exactly at the boundary
    assert M._sqrt_gap_le(Fraction(9), Fraction(4), Fraction(1), Fraction(1), True)
    assert not M._sqrt_gap_le(Fraction(9), Fraction(4), Fraction(99, 100), Fraction(1), True)
    assert M._sqrt_gap_le(Fraction(2), Fraction(1), Fraction(1, 2), Fraction(1), True)
    assert not M._sqrt_gap_le(Fraction(2), Fraction(1), Fraction(2, 5), Fraction(1), True)


def test_kappa_examples(F2, rng):
    assert M.kappa(uniform_space(4)) == 1
    with pytest.raises(ValueError):
        M.kappa(uniform_space(2))
    for _ in range(5):
        s = sample_space(F2, random_points(F2, 14, rng, max_preperiod=3))
        k = M.kappa(s)
        assert k == oracles.kappa_by_radii(s.dist)
        assert k.numerator == 1 and is_power_of(3, k.denominator)
    g = generic_space(7, seed=9)
    assert M.kappa(g) == oracles.kappa_by_radii(g.dist)


def test_alpha_bound_gate(F2, rng):
    u = uniform_space(5)
    a = M.alpha_bound_check(u, M.PointMap.identity(5))
    assert a.applicable and a.holds and a.displacement == 0
    far = M.alpha_bound_check(u, M.PointMap((1, 0, 2, 3, 4)))
    assert not far.applicable


def test_alpha_bound_small_isometry(F2, rng):
    # twins sharing a long prefix, swapped: an isometry that moves points very little
    base = random_points(F2, 12, rng, max_preperiod=3)
    twins = []
    for xi in base[:4]:
        pre = xi.prefix(16)
        c = next(c for c in F2.letters if c not in (xi.letter(16), pre[-1] ^ 1))
        twins.append(BoundaryPoint(pre, (c,)))
    pts = list(dict.fromkeys(base + twins))
    s = sample_space(F2, pts)
    i, j = pts.index(base[0]), pts.index(twins[0])
    imgs = list(range(len(pts)))
    imgs[i], imgs[j] = j, i
    m = M.PointMap(tuple(imgs))
    assert M.is_mobius(s, m, 0).holds
    a = M.alpha_bound_check(s, m)
    assert a.applicable and a.holds


@pytest.mark.skipif("cython" not in _kernels.BACKENDS, reason="compiled kernels not built")
def test_mobius_backends_agree(F2, rng):
    g = F2.random_word(3, rng)
    pts, space, (m,) = build_sample(F2, 25, [g], rng)
    t = M.random_transposition(len(pts), rng)
    for mp in (m, t):
        a = M.is_mobius(space, mp, 0, backend=_kernels.BACKENDS["python"])
        b = M.is_mobius(space, mp, 0, backend=_kernels.BACKENDS["cython"])
        assert a == b
