import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeboundary import _kernels
from freeboundary._kernels import _fallback
from freeboundary.cylinders import CylinderSet
from freeboundary.functions import (
    BoundaryFunction,
    NotIntegrable,
    PairFunction,
    integrate_nu,
    integrate_nu_reference,
    pullback,
)
from freeboundary.verify import random_admissible
from freeboundary.words import FreeGroup, Word, act

import oracles
from strategies import words


def test_zero_and_indicator(F2):
    zero = PairFunction.from_table(F2, 2, lambda x, y: 0)
    assert integrate_nu(zero) == 0
    F = PairFunction.indicator_of_rectangle(F2, F2.parse("a1"), F2.parse("a2"))
    assert integrate_nu(F) == Fraction(1, 16)


def test_indicator_of_level_zero(F2):
    K0 = PairFunction.from_table(F2, 1, lambda x, y: 1 if x != y else 0)
    assert integrate_nu(K0) == Fraction(3, 4)


def test_frozen_integral(F2):
    # value derived with oracles.nu_integral_by_refinement at depths 2 and 4
    F = PairFunction.from_table(F2, 2, lambda x, y: 0 if x == y else x[0] + 2 * y[1] - x[1])
    assert integrate_nu(F) == Fraction(27, 4)


def test_nested_cells_are_not_integrable(F2):
    F = PairFunction.from_table(F2, 1, lambda x, y: 1)
    with pytest.raises(NotIntegrable, match="not nu-integrable"):
        integrate_nu(F)
    with pytest.raises(NotIntegrable):
        integrate_nu_reference(F)


def test_refinement_oracle_agrees(rng):
    for rank in (2, 3):
        G = FreeGroup(rank)
        for depth in (1, 2):
            F = random_admissible(G, depth, rng)
            want = oracles.nu_integral_by_refinement(G, F, depth)
            assert integrate_nu(F) == want == integrate_nu_reference(F)


def test_pullback_identity_and_invariance(F2, rng):
    F = random_admissible(F2, 3, rng)
    assert pullback(Word(), F) is F
    for _ in range(20):
        g = F2.random_word(rng.randint(1, 8), rng)
        assert integrate_nu(pullback(g, F)) == integrate_nu(F)


def test_pullback_against_refinement_oracle(F2, rng):
    for _ in range(5):
        F = random_admissible(F2, 2, rng)
        g = F2.random_word(rng.randint(1, 3), rng)
        moved = pullback(g, F)
        assert oracles.nu_integral_by_refinement(F2, moved, 2 + len(g)) == integrate_nu(F)


def test_pullback_pointwise(F2, rng):
    F = random_admissible(F2, 2, rng)
    g, h = F2.random_word(3, rng), F2.random_word(4, rng)
    for _ in range(200):
        xi, om = F2.random_point(rng), F2.random_point(rng)
        gi = g.inverse()
        assert pullback(g, F)(xi, om) == F(act(gi, xi), act(gi, om))
        assert pullback(g * h, F)(xi, om) == pullback(g, pullback(h, F))(xi, om)


def test_boundary_function_translate_and_table(F2):
    f = BoundaryFunction.from_table(F2, 1, lambda w: 1 if w == F2.parse("a1") else 0)
    assert len(f.cells) == 2
    g = F2.parse("a2")
    moved = f.translate(g)
    xi = F2.parse_point("a2.a1|(a2)^inf")
    assert moved(xi) == 1
    assert moved(F2.parse_point("a1|(a2)^inf")) == 0


def test_cell_validation(F2):
    with pytest.raises(ValueError):
        BoundaryFunction(2, [CylinderSet.cylinder(2, F2.parse("a1"))], [1])
    with pytest.raises(ValueError):
        BoundaryFunction(2, [CylinderSet.full(2), CylinderSet.cylinder(2, F2.parse("a1"))], [1, 2])


def test_large_values_use_exact_fallback(F2):
    big = 2**61
    F = PairFunction.from_table(F2, 1, lambda x, y: 0 if x == y else big)
    assert integrate_nu(F) == big * Fraction(3, 4)
    F2b = PairFunction.from_table(F2, 1, lambda x, y: 0 if x == y else Fraction(big * 8, 3))
    assert integrate_nu(F2b) == Fraction(big * 8, 3) * Fraction(3, 4)


@given(st.integers(0, 2**32), words(2, 5))
def test_invariance_property(seed, g):
    r = random.Random(seed)
    F = random_admissible(FreeGroup(2), r.randint(1, 3), r)
    assert integrate_nu(pullback(g, F)) == integrate_nu(F)


@pytest.mark.skipif("cython" not in _kernels.BACKENDS, reason="compiled kernels not built")
def test_backends_agree_on_integrals(F2, rng):
    for _ in range(10):
        F = random_admissible(F2, rng.randint(1, 4), rng)
        g = F2.random_word(rng.randint(0, 6), rng)
        moved = pullback(g, F)
        assert integrate_nu(moved, backend=_fallback) == integrate_nu(moved, backend=_kernels.BACKENDS["cython"])
