"""Locally constant functions on the boundary and on pairs of boundary points.

A function is stored over a *cell partition*: a tuple of disjoint
:class:`CylinderSet` cells covering the boundary. A dense depth-``N`` table
is the special case where every cell is a single depth-``N`` cylinder, but
translated functions and Busemann-type functions stay small in this form
where a dense table would not (``g . F`` lives at depth ``N + |g|``).

Pair-function values are kept as an integer numerator matrix over a common
denominator so the integration kernel can run on machine integers.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .cylinders import CylinderSet
from .scalar import INF
from .words import BoundaryPoint, FreeGroup, Word, common_prefix_length


class NotIntegrable(ValueError):
    pass


class _Cells:
    """Shared cell bookkeeping: term lookup and validation of the partition."""

    def _init_cells(self, n: int, cells: Sequence[CylinderSet], check: bool):
        self.n = n
        self.cells = tuple(cells)
        lookup: dict[Word, int] = {}
        for i, c in enumerate(self.cells):
            if c.n != n:
                raise ValueError("cells belong to different ranks")
            for t in c.terms:
                lookup[t] = i
        self._lookup = lookup
        self._maxlen = max((len(t) for t in lookup), default=0)
        if check:
            q = 2 * n - 1
            total = sum(Fraction(q, (q + 1) * q ** len(t)) if t else Fraction(1) for t in lookup)
            covered = sum(len(c.terms) for c in self.cells)
            if covered != len(lookup) or total != 1 or not self._non_nested():
                raise ValueError("cells do not form a partition of the boundary")

    def _non_nested(self) -> bool:
        terms = sorted(self._lookup)
        return all(common_prefix_length(a, b) < len(a) for a, b in zip(terms, terms[1:]))

    @property
    def depth(self) -> int:
        return self._maxlen

    def cell_of(self, xi: BoundaryPoint | Sequence[int]) -> int:
        """Index of the cell containing a boundary point (or a deep enough word)."""
        get = xi.prefix if isinstance(xi, BoundaryPoint) else (lambda k: Word(xi[:k]))
        for k in range(self._maxlen + 1):
            i = self._lookup.get(get(k))
            if i is not None:
                return i
        raise KeyError(f"{xi} is not resolved by the cell partition")


def depth_cells(group: FreeGroup, depth: int) -> tuple[list[Word], list[CylinderSet]]:
    words = list(group.sphere(depth))
    return words, [CylinderSet(group.n, [w], normalized=True) for w in words]


class BoundaryFunction(_Cells):
    """A locally constant function on the boundary, one value per cell."""

    def __init__(self, n: int, cells: Sequence[CylinderSet], values: Sequence, *, check: bool = True):
        self._init_cells(n, cells, check)
        if len(values) != len(self.cells):
            raise ValueError("one value per cell required")
        self.values = tuple(Fraction(v) for v in values)

    @classmethod
    def from_table(cls, group: FreeGroup, depth: int, table: dict | Callable[[Word], object]) -> "BoundaryFunction":
        """Dense form: a value for each of the reduced words of length ``depth``."""
        words, cells = depth_cells(group, depth)
        get = table if callable(table) else table.__getitem__
        return cls(group.n, cells, [get(w) for w in words], check=False).coarsen()

    def coarsen(self) -> "BoundaryFunction":
        """Merge cells carrying equal values."""
        groups: dict[Fraction, list[Word]] = {}
        for c, v in zip(self.cells, self.values):
            groups.setdefault(v, []).extend(c.terms)
        vals = sorted(groups)
        cells = [CylinderSet(self.n, groups[v]) for v in vals]
        return BoundaryFunction(self.n, cells, vals, check=False)

    def __call__(self, xi) -> Fraction:
        return self.values[self.cell_of(xi)]

    def translate(self, g: Word) -> "BoundaryFunction":
        """``(g . f)(xi) = f(g^-1 xi)``."""
        return BoundaryFunction(self.n, [c.image(g) for c in self.cells], self.values, check=False)

    def difference_power(self, p: int) -> "PairFunction":
        """The pair function ``|f(xi) - f(omega)|^p``."""
        return PairFunction.from_values(
            self.n, self.cells, [[abs(a - b) ** p for b in self.values] for a in self.values]
        )


class PairFunction(_Cells):
    """A locally constant function on pairs, constant on products of cells.

    ``numerators[i, j] / denominator`` is the value on ``cells[i] x cells[j]``.
    """

    def __init__(self, n: int, cells: Sequence[CylinderSet], numerators, denominator: int = 1, *, check: bool = True):
        self._init_cells(n, cells, check)
        num = np.asarray(numerators)
        if num.dtype != object and num.dtype != np.int64:
            num = num.astype(np.int64)
        if num.shape != (len(self.cells), len(self.cells)):
            raise ValueError("numerator matrix must be cells x cells")
        if denominator <= 0:
            raise ValueError("denominator must be positive")
        self.numerators = num
        self.denominator = int(denominator)

    @classmethod
    def from_values(cls, n: int, cells: Sequence[CylinderSet], values, *, check: bool = True) -> "PairFunction":
        vals = [[Fraction(v) for v in row] for row in values]
        den = math.lcm(1, *(v.denominator for row in vals for v in row))
        big = [[v.numerator * (den // v.denominator) for v in row] for row in vals]
        fits = all(abs(x) < 2**62 for row in big for x in row)
        arr = np.array(big, dtype=np.int64 if fits else object)
        return cls(n, cells, arr, den, check=check)

    @classmethod
    def from_table(cls, group: FreeGroup, depth: int, table) -> "PairFunction":
        """Dense form over ordered pairs of depth-``depth`` cylinders.

        ``table`` is a callable ``(x, y) -> value`` or a mapping keyed by word pairs;
        missing keys are zero.
        """
        words, cells = depth_cells(group, depth)
        if callable(table):
            vals = [[table(x, y) for y in words] for x in words]
        else:
            vals = [[table.get((x, y), 0) for y in words] for x in words]
        return cls.from_values(group.n, cells, vals, check=False)

    @classmethod
    def indicator_of_rectangle(cls, group: FreeGroup, x: Word, y: Word) -> "PairFunction":
        n = group.n
        parts = []
        for w in (x, y):
            if w not in parts:
                parts.append(w)
        cells = [CylinderSet.cylinder(n, w) for w in parts]
        rest = CylinderSet.full(n)
        for c in cells:
            rest = rest - c
        if not rest.is_empty():
            cells.append(rest)
        if len(parts) == 2 and cells[0].intersection(cells[1]) != CylinderSet.empty(n):
            raise ValueError("rectangle sides must be disjoint cylinders")
        num = np.zeros((len(cells), len(cells)), dtype=np.int64)
        num[parts.index(x), parts.index(y)] = 1
        return cls(n, cells, num, 1, check=False)

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.numerators[i, j]), self.denominator)

    def __call__(self, xi, omega) -> Fraction:
        return self.value(self.cell_of(xi), self.cell_of(omega))

    def translate(self, g: Word) -> "PairFunction":
        return pullback(g, self)


def pullback(g: Word, F: PairFunction) -> PairFunction:
    """``(g . F)(xi, omega) = F(g^-1 xi, g^-1 omega)``.

    The cell ``C`` of ``F`` becomes the cell ``g C`` of ``g . F`` with the same
    values; every image is an exact :class:`CylinderSet`.
    """
    if not g:
        return F
    cells = [c.image(g) for c in F.cells]
    return PairFunction(F.n, cells, F.numerators, F.denominator, check=False)


def _term_layout(F: PairFunction):
    terms = sorted(F._lookup)
    lengths = np.fromiter((len(t) for t in terms), dtype=np.int64, count=len(terms))
    cells = np.fromiter((F._lookup[t] for t in terms), dtype=np.int64, count=len(terms))
    adj = np.fromiter(
        (common_prefix_length(a, b) for a, b in zip(terms, terms[1:])),
        dtype=np.int64,
        count=max(len(terms) - 1, 0),
    )
    return terms, lengths, cells, adj


def integrate_nu(F: PairFunction, backend=None):
    """``integral F dnu`` as an exact rational.

    Admissible ``F`` vanish on every diagonal cell ``C x C`` (those cells carry
    infinite ``nu``-mass); pairs from distinct cells are products of disjoint
    cylinders, whose measure is ``b^2 q^(2 lcp - |x| - |y|)`` with
    ``b = q / (q + 1)``. Pairs are bucketed by the exponent in the kernel.
    """
    num = F.numerators
    diag = [i for i in range(len(F.cells)) if num[i, i] != 0]
    if diag:
        raise NotIntegrable(f"not nu-integrable at this resolution: nonzero on diagonal cell {F.cells[diag[0]]}")
    q = 2 * F.n - 1
    terms, lengths, cells, adj = _term_layout(F)
    if len(terms) < 2:
        return Fraction(0)
    nb = 2 * int(lengths.max()) + 1
    kern = _kernels if backend is None else backend
    bound = int(np.max(np.abs(num))) if num.size else 0
    if num.dtype == object or bound * len(terms) ** 2 * 2 >= 2**63:
        buckets = _buckets_exact(adj, lengths, cells, num, nb)
    else:
        buckets = [int(b) for b in kern.pair_exponent_buckets(adj, lengths, cells, num, nb)]
    # integral = b^2 / den * sum_e buckets[e] q^-e
    top = nb - 1
    acc = 0
    for e in range(nb):
        acc += buckets[e] * q ** (top - e)
    return Fraction(q * q * acc, (q + 1) ** 2 * F.denominator * q**top)


def _buckets_exact(adj, lengths, cells, num, nb) -> list[int]:
    out = [0] * nb
    adj = [int(a) for a in adj]
    lengths = [int(x) for x in lengths]
    cells = [int(c) for c in cells]
    for i in range(len(lengths) - 1):
        lcp = adj[i]
        for j in range(i + 1, len(lengths)):
            lcp = min(lcp, adj[j - 1])
            out[lengths[i] + lengths[j] - 2 * lcp] += int(num[cells[i], cells[j]]) + int(num[cells[j], cells[i]])
    return out


def integrate_nu_reference(F: PairFunction):
    """Cell-by-cell sum of ``F * nu(cell)`` with the ``0 * inf = 0`` convention.

    Slow but independent of the kernels: it works term pair by term pair with
    :func:`~freeboundary.measure.nu_of_rectangle`.
    """
    from .measure import nu_of_rectangle

    q = 2 * F.n - 1
    total = Fraction(0)
    for i, A in enumerate(F.cells):
        for j, B in enumerate(F.cells):
            v = F.value(i, j)
            mass = Fraction(0)
            for s in A.terms:
                for t in B.terms:
                    mass = mass + nu_of_rectangle(q, s, t)
            if mass is INF and v != 0:
                raise NotIntegrable(f"nonzero value on infinite cell {A} x {B}")
            total += v * mass
    return total
