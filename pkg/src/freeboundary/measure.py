"""The boundary measure ``mu``, Poisson kernels, and the invariant measure ``nu``.

``mu`` is the uniform probability measure on the boundary of the
``(q+1)``-regular tree, and ``nu = q^(2 (xi, omega)) dmu dmu`` on pairs.
Everything here is exact; functions return :class:`~fractions.Fraction`
or :data:`~freeboundary.scalar.INF`.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .cylinders import CylinderSet, image_of_cylinder
from .scalar import INF
from .words import BoundaryPoint, FreeGroup, Word, common_prefix_length, gromov_product


def _q(group_or_q) -> int:
    return group_or_q.q if isinstance(group_or_q, FreeGroup) else int(group_or_q)


def qpow(q: int, k: int) -> Fraction:
    return Fraction(q**k) if k >= 0 else Fraction(1, q ** (-k))


def mu_cylinder(group, x) -> Fraction:
    """``mu(Omega_x)``; the identity cylinder is the whole boundary."""
    q = _q(group)
    if len(x) == 0:
        return Fraction(1)
    return Fraction(q, (q + 1) * q ** len(x))


def mu_set(A: CylinderSet) -> Fraction:
    q = 2 * A.n - 1
    return sum((mu_cylinder(q, t) for t in A.terms), Fraction(0))


def poisson_kernel(group, g: Word, xi: BoundaryPoint) -> Fraction:
    """``P_g(xi) = q^(2 (g, xi) - |g|)``."""
    return qpow(_q(group), 2 * gromov_product(g, xi) - len(g))


def derivative_on_tree(group, g: Word, xi: BoundaryPoint) -> Fraction:
    """Metric derivative of ``g`` for the visual metric ``q^-(.,.)``.

    Equal to ``q^(2 (g^-1, xi) - |g|)``, i.e. the Poisson kernel of ``g^-1``.
    """
    return qpow(_q(group), 2 * gromov_product(g.inverse(), xi) - len(g))


def derivative_on_cylinder(group, g: Word, x) -> Fraction:
    """The (constant) value of :func:`derivative_on_tree` on ``Omega_x``; needs ``|x| > |g|``."""
    if len(x) <= len(g):
        raise ValueError("derivative is constant only on cylinders deeper than |g|")
    return qpow(_q(group), 2 * common_prefix_length(g.inverse(), x) - len(g))


def nu_of_rectangle(group, x, y):
    """``nu(Omega_x x Omega_y)``; infinite when one word is a prefix of the other."""
    q = _q(group)
    k = common_prefix_length(x, y)
    if k == min(len(x), len(y)):
        return INF
    return qpow(q, 2 * k) * mu_cylinder(q, x) * mu_cylinder(q, y)


def nu_levelset(group, n: int) -> Fraction:
    """``nu(K_n)`` where ``K_n`` is the set of pairs with Gromov product ``n``."""
    if n < 0:
        raise ValueError("level must be >= 0")
    q = _q(group)
    if n == 0:
        return Fraction(q, q + 1)
    return Fraction((q - 1) * q**n, q + 1)


def levelset_table(group, count: int) -> list[tuple[int, Fraction]]:
    return [(n, nu_levelset(group, n)) for n in range(count)]


def tail_distribution(group, n: int) -> Fraction:
    """``nu({d > q^-n}) = q^n / (q + 1)`` for the visual metric ``d = q^-(.,.)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = _q(group)
    return Fraction(q**n, q + 1)


def ball_measure(group, omega: BoundaryPoint, n: int) -> Fraction:
    """``mu`` of the closed ball of radius ``q^-n`` about ``omega``.

    That ball is the cylinder of the first ``n`` letters of ``omega``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return mu_cylinder(group, omega.prefix(n))


def gromov_level_measure(group, g: Word, i: int) -> Fraction:
    """``mu({xi : (g, xi) = i})`` for ``0 <= i <= |g|``."""
    if not g:
        raise ValueError("g must not be the identity")
    if not 0 <= i <= len(g):
        raise ValueError(f"level {i} outside 0..{len(g)}")
    q = _q(group)
    if i in (0, len(g)):
        return Fraction(q, (q + 1) * q**i)
    return Fraction(q - 1, (q + 1) * q**i)


def radon_nikodym_check(group: FreeGroup, g: Word, x: Word) -> tuple[Fraction, Fraction]:
    """``(mu(g Omega_x), integral over Omega_x of |g'| dmu)``; the two agree exactly.

    The right side refines ``Omega_x`` to depth ``|x| + |g| + 1``, where the
    derivative is constant. Subtrees on which the common prefix with ``g^-1``
    is already frozen are counted in one step instead of leaf by leaf.
    """
    lhs = mu_set(image_of_cylinder(group.n, g, x))
    depth = len(x) + len(g) + 1
    ginv = g.inverse()
    counts: dict[int, int] = {}
    stack = [Word(x)]
    while stack:
        w = stack.pop()
        k = common_prefix_length(ginv, w)
        if len(w) == depth or k < len(w) or k == len(ginv):
            leaves = group.q ** (depth - len(w)) if w else group.sphere_size(depth)
            counts[k] = counts.get(k, 0) + leaves
        else:
            stack.extend(group.children(w))
    leaf_mu = Fraction(group.q, (group.q + 1) * group.q**depth)
    rhs = sum((qpow(group.q, 2 * k - len(g)) * c * leaf_mu for k, c in counts.items()), Fraction(0))
    return lhs, rhs


# -- cocycle norms ---------------------------------------------------------


def cocycle_value(g: Word, xi: BoundaryPoint, omega: BoundaryPoint) -> int:
    """``c_g(xi, omega) = (g, xi) - (g, omega)``."""
    return gromov_product(g, xi) - gromov_product(g, omega)


def cocycle_lp_norm_p(group, g: Word, p):
    """``||c_g||_p^p`` in ``L^p(nu)``.

    Exact for integer ``p >= 1``; a float (relative error ~1e-12) for
    non-integer ``p``. The double sum over level pairs ``(i, j)`` collapses
    to a single sum over ``k = |i - j|``:

        2 / (q+1)^2 * sum_k k^p q^-k w_k,
        w_k = 2(q-1)q + (L-k-1)(q-1)^2  (k < L),  w_L = q^2.
    """
    q = _q(group)
    L = len(g)
    if L == 0:
        return Fraction(0) if _is_int(p) else 0.0
    if not _is_int(p):
        p = float(p)
        if p <= 0:
            raise ValueError("p must be positive")
        terms = [k**p * q ** (-k) * _w(q, L, k) for k in range(1, L + 1)]
        return 2.0 * math.fsum(terms) / (q + 1) ** 2
    p = int(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    # Horner in q over k = 1..L of k^p w_k q^(L-k)
    acc = 0
    for k in range(1, L + 1):
        acc = acc * q + k**p * _w(q, L, k)
    return Fraction(2 * acc, (q + 1) ** 2 * q**L)


def _w(q: int, L: int, k: int) -> int:
    if k == L:
        return q * q
    return 2 * (q - 1) * q + (L - k - 1) * (q - 1) ** 2


def _is_int(p) -> bool:
    return isinstance(p, int) or (isinstance(p, Fraction) and p.denominator == 1)


def cocycle_lp_norm_naive(group, g: Word, p: int) -> Fraction:
    """The O(|g|^2) double sum over level pairs; cross-check for the fast path."""
    q = _q(group)
    L = len(g)
    if L == 0:
        return Fraction(0)
    mus = [gromov_level_measure(q, g, i) for i in range(L + 1)]
    total = Fraction(0)
    for i in range(L + 1):
        for j in range(L + 1):
            if i != j:
                total += abs(i - j) ** p * qpow(q, 2 * min(i, j)) * mus[i] * mus[j]
    return total


def s_sum(N: int, p: int, q: int) -> Fraction:
    """``S_N = sum_{i,j=0..N} |i-j|^p q^-|i-j| = 2 sum_k (N+1-k) k^p q^-k``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    acc = 0
    for k in range(1, N + 1):
        acc = acc * q + (N + 1 - k) * k**p
    return Fraction(2 * acc, q**N)


@lru_cache(maxsize=None)
def eulerian_row(p: int) -> tuple[int, ...]:
    """Eulerian numbers ``A(p, 0..p-1)``."""
    row = [1]
    for m in range(2, p + 1):
        row = [(k + 1) * (row[k] if k < len(row) else 0) + (m - k) * (row[k - 1] if k >= 1 else 0)
               for k in range(m)]
    return tuple(row)


def power_series_sum(p: int, q: int) -> Fraction:
    """``sum_{i >= 1} i^p q^-i`` in closed form, ``x A_p(x) / (1-x)^(p+1)`` at ``x = 1/q``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    x = Fraction(1, q)
    poly = sum((a * x**k for k, a in enumerate(eulerian_row(p))), Fraction(0))
    return x * poly / (1 - x) ** (p + 1)


def norm_brackets(q: int, L: int, p: int) -> tuple[Fraction, Fraction]:
    """``((q-1)/(q+1))^2 S_L`` and ``(q/(q+1))^2 S_L``."""
    s = s_sum(L, p, q)
    return Fraction(q - 1, q + 1) ** 2 * s, Fraction(q, q + 1) ** 2 * s


def growth_rate_brackets(q: int, p: int) -> tuple[Fraction, Fraction]:
    """Bounds on ``||c_g||_p^p / |g|`` valid for every ``g != e``."""
    lo = Fraction(2, q) * Fraction(q - 1, q + 1) ** 2
    hi = 2 * Fraction(q, q + 1) ** 2 * power_series_sum(p, q)
    return lo, hi
