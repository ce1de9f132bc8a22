"""Cross-ratios and metric derivatives of point maps on finite metric spaces.

A :class:`FiniteMetricSpace` is either *exact* (Fraction distances) or
*approximate* (floats). In exact mode every equality is decided exactly:
distances are encoded as integer exponent vectors over a pairwise coprime
base, so a product of distances compares equal to another product iff the
summed exponent vectors agree. Inequalities that involve square roots are
squared after a sign analysis; the single place that needs a logarithm
(:func:`cocycle_bound_check`) uses 60-digit arithmetic.

Maps are :class:`PointMap` objects: injective maps from a subset of the
points (the domain) into the points. A free-group element acting on a
finite boundary sample is only defined on part of it, since a nontrivial
element has no finite invariant set with more than two points.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import mpmath
import numpy as np

from . import _kernels

FULL_ENUMERATION_LIMIT = 40
SAMPLED_QUADRUPLES = 100_000
TRIANGLE_RTOL = 1e-12


class MetricError(ValueError):
    pass


def coprime_base(values: Sequence[int]) -> list[int]:
    """A pairwise coprime set of integers > 1 over which every value factors."""
    base: list[int] = []
    work = [v for v in values if v > 1]
    while work:
        x = work.pop()
        if x == 1:
            continue
        for i, b in enumerate(base):
            g = math.gcd(x, b)
            if g > 1:
                del base[i]
                work.extend(y for y in (g, b // g, x // g) if y > 1)
                break
        else:
            base.append(x)
    return sorted(base)


def _exponents(v: int, base: Sequence[int]) -> list[int]:
    out = []
    for b in base:
        e = 0
        while v % b == 0:
            v //= b
            e += 1
        out.append(e)
    if v != 1:
        raise AssertionError("value does not factor over the coprime base")
    return out


@dataclass
class FiniteMetricSpace:
    points: list[str]
    dist: list[list]
    exact: bool = True
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.points)
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise MetricError("distance matrix must be square and match the point list")
        kind = Fraction if self.exact else float
        self.dist = [[x if type(x) is kind else kind(x) for x in row] for row in self.dist]

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def d(self, i: int, j: int):
        return self.dist[i][j]

    def validate(self) -> "FiniteMetricSpace":
        """Check the metric axioms; raises :class:`MetricError` with a witness."""
        n = self.size
        tol = 0 if self.exact else TRIANGLE_RTOL
        for i in range(n):
            if self.dist[i][i] != 0:
                raise MetricError(f"d({self.points[i]},{self.points[i]}) != 0")
            for j in range(i + 1, n):
                a, b = self.dist[i][j], self.dist[j][i]
                if abs(a - b) > tol * max(abs(a), abs(b)):
                    raise MetricError(f"asymmetric at ({self.points[i]},{self.points[j]})")
                if a <= 0:
                    raise MetricError(f"non-positive distance at ({self.points[i]},{self.points[j]})")
        if len(set(self.points)) != n:
            raise MetricError("duplicate point identifiers")
        # float screen, then exact confirmation of the near-violations
        cand = _kernels.triangle_candidates(self.as_float(), 1e-9)
        D = self.dist
        for i, j, k in cand:
            lhs, rhs = D[i][k], D[i][j] + D[j][k]
            if lhs > rhs * (1 + tol):
                raise MetricError(
                    f"triangle inequality fails: d({self.points[i]},{self.points[k]}) > "
                    f"d({self.points[i]},{self.points[j]}) + d({self.points[j]},{self.points[k]})"
                )
        return self

    def as_float(self) -> np.ndarray:
        if "float" not in self._cache:
            self._cache["float"] = np.array([[float(x) for x in row] for row in self.dist], dtype=np.float64)
        return self._cache["float"]

    def log_dist(self) -> np.ndarray:
        if "log" not in self._cache:
            D = self.as_float().copy()
            np.fill_diagonal(D, 1.0)
            self._cache["log"] = np.log(D)
        return self._cache["log"]

    def _codes(self) -> tuple[np.ndarray, list]:
        """Each entry as an index into the list of distinct values.

        Exact entries are keyed by ``(numerator, denominator)``, which hashes
        far faster than the Fraction itself.
        """
        if "codes" not in self._cache:
            key = (lambda x: (x.numerator, x.denominator)) if self.exact else (lambda x: x)
            index: dict = {}
            values: list = []
            rows = []
            for row in self.dist:
                out = []
                for x in row:
                    k = key(x)
                    c = index.get(k)
                    if c is None:
                        c = index[k] = len(values)
                        values.append(x)
                    out.append(c)
                rows.append(out)
            self._cache["codes"] = (np.array(rows, dtype=np.int64).reshape(self.size, self.size), values)
        return self._cache["codes"]

    def exponent_tensor(self) -> np.ndarray:
        """``E[i, j]``: exponent vector of ``d(i, j)`` over a coprime base (zero on the diagonal)."""
        if not self.exact:
            raise ValueError("exponent encoding needs an exact space")
        if "exp" not in self._cache:
            codes, values = self._codes()
            ints = {v.numerator for v in values if v} | {v.denominator for v in values if v}
            base = coprime_base(sorted(ints))
            width = max(len(base), 1)
            enc = np.zeros((len(values), width), dtype=np.int64)
            for c, v in enumerate(values):
                if v and base:
                    enc[c] = np.subtract(_exponents(v.numerator, base), _exponents(v.denominator, base))
            self._cache["exp"] = enc[codes]
        return self._cache["exp"]

    def rank_matrix(self) -> tuple[np.ndarray, list]:
        """Integer ranks of the entries (order-isomorphic) and the sorted distinct values."""
        if "rank" not in self._cache:
            codes, values = self._codes()
            order = sorted(range(len(values)), key=values.__getitem__)
            rank = np.empty(len(values), dtype=np.int64)
            rank[order] = np.arange(len(values))
            self._cache["rank"] = (rank[codes], [values[i] for i in order])
        return self._cache["rank"]

    def diameter(self, subset: Optional[Sequence[int]] = None):
        idx = range(self.size) if subset is None else subset
        return max((self.dist[i][j] for i in idx for j in idx), default=0)

    def subspace(self, subset: Sequence[int]) -> "FiniteMetricSpace":
        return FiniteMetricSpace(
            [self.points[i] for i in subset], [[self.dist[i][j] for j in subset] for i in subset], self.exact
        )


@dataclass(frozen=True)
class PointMap:
    """An injective map ``i -> images[i]``; ``None`` marks points outside the domain."""

    images: tuple

    def __post_init__(self):
        imgs = tuple(None if x is None else int(x) for x in self.images)
        object.__setattr__(self, "images", imgs)
        targets = [x for x in imgs if x is not None]
        if len(set(targets)) != len(targets):
            raise MetricError("point map is not injective")
        if any(not 0 <= x < len(imgs) for x in targets):
            raise MetricError("point map sends a point outside the space")

    @classmethod
    def identity(cls, n: int) -> "PointMap":
        return cls(tuple(range(n)))

    def __call__(self, i: int) -> int:
        x = self.images[i]
        if x is None:
            raise KeyError(f"point {i} is outside the domain")
        return x

    @property
    def domain(self) -> list[int]:
        return [i for i, x in enumerate(self.images) if x is not None]

    @property
    def is_permutation(self) -> bool:
        return None not in self.images

    def compose(self, other: "PointMap") -> "PointMap":
        """``self o other``."""
        out = []
        for x in other.images:
            out.append(None if x is None else self.images[x])
        return PointMap(tuple(out))

    def inverse(self) -> "PointMap":
        out: list = [None] * len(self.images)
        for i, x in enumerate(self.images):
            if x is not None:
                out[x] = i
        return PointMap(tuple(out))

    def img_array(self) -> np.ndarray:
        return np.array([-1 if x is None else x for x in self.images], dtype=np.int64)


# -- cross-ratios ------------------------------------------------------------


def cross_ratio(space: FiniteMetricSpace, z1: int, z2: int, z3: int, z4: int):
    """``d(z1,z3) d(z2,z4) / (d(z1,z4) d(z2,z3))``."""
    if len({z1, z2, z3, z4}) != 4:
        raise ValueError("cross-ratio needs four distinct points")
    d = space.dist
    return d[z1][z3] * d[z2][z4] / (d[z1][z4] * d[z2][z3])


class MobiusReport(NamedTuple):
    holds: bool
    max_deviation: object
    witness: Optional[tuple]
    checked: int


def _quadruples(domain: Sequence[int], seed: int, limit: int, samples: int) -> np.ndarray:
    if len(domain) < 4:
        return np.zeros((0, 4), dtype=np.int64)
    if len(domain) <= limit:
        return np.array(list(itertools.combinations(domain, 4)), dtype=np.int64)
    rng = np.random.default_rng(seed)
    dom = np.asarray(domain, dtype=np.int64)
    picks = np.zeros((0, 4), dtype=np.int64)
    while len(picks) < samples:
        draw = rng.integers(0, len(dom), size=(2 * samples, 4))
        s = np.sort(draw, axis=1)
        ok = (s[:, 1:] != s[:, :-1]).all(axis=1)
        picks = np.concatenate([picks, draw[ok]])
    picks = picks[:samples]
    return dom[picks]


def _quad_deviation(space: FiniteMetricSpace, m: PointMap, quad) -> object:
    """Exact (or float) ``max |CR(g q)/CR(q) - 1|`` over the two independent ratios."""
    a, b, c, d = (int(x) for x in quad)
    A, B, C, D = (m(x) for x in (a, b, c, d))
    devs = []
    for (p1, p2, p3, p4), (P1, P2, P3, P4) in (
        ((a, c, b, d), (A, C, B, D)),
        ((a, b, c, d), (A, B, C, D)),
    ):
        devs.append(abs(cross_ratio(space, P1, P2, P3, P4) / cross_ratio(space, p1, p2, p3, p4) - 1))
    return max(devs)


def is_mobius(
    space: FiniteMetricSpace,
    m: PointMap,
    tolerance=0,
    *,
    seed: int = 0,
    limit: int = FULL_ENUMERATION_LIMIT,
    samples: int = SAMPLED_QUADRUPLES,
    backend=None,
) -> MobiusReport:
    """Check cross-ratio preservation on quadruples of domain points.

    All 4-subsets are checked when the domain has at most ``limit`` points,
    otherwise ``samples`` random 4-subsets. In exact mode with
    ``tolerance == 0`` equality is demanded exactly.
    """
    kern = _kernels if backend is None else backend
    quads = _quadruples(m.domain, seed, limit, samples)
    if len(quads) == 0:
        return MobiusReport(True, Fraction(0) if space.exact else 0.0, None, 0)
    img = m.img_array()
    devs = kern.quad_log_deviation(space.log_dist(), img, quads)
    if space.exact:
        bad = np.flatnonzero(kern.quad_mismatch(space.exponent_tensor(), img, quads))
        if len(bad) == 0:
            return MobiusReport(True, Fraction(0), None, len(quads))
        worst = bad[int(np.argmax(devs[bad]))]
        dev = _quad_deviation(space, m, quads[worst])
        return MobiusReport(dev <= tolerance, dev, tuple(int(x) for x in quads[worst]), len(quads))
    worst = int(np.argmax(devs))
    dev = float(devs[worst])
    return MobiusReport(dev <= tolerance, dev, tuple(int(x) for x in quads[worst]) if dev > 0 else None, len(quads))


# -- metric derivatives ------------------------------------------------------


def metric_derivative(space: FiniteMetricSpace, m: PointMap, x: int, u: int, v: int):
    """Local formula ``d(gx,gu)/d(x,u) * d(gx,gv)/d(x,v) * d(u,v)/d(gu,gv)``."""
    if len({x, u, v}) != 3:
        raise ValueError("metric derivative needs three distinct points")
    d = space.dist
    gx, gu, gv = m(x), m(u), m(v)
    return d[gx][gu] / d[x][u] * (d[gx][gv] / d[x][v]) * (d[u][v] / d[gu][gv])


class DerivativeFunction(dict):
    """Point index -> metric derivative value."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        if any(v <= 0 for v in self.values()):
            raise ValueError("metric derivative values must be positive")

    @property
    def max(self):
        return max(self.values())

    @property
    def min(self):
        return min(self.values())


def derivative_table(space: FiniteMetricSpace, m: PointMap) -> DerivativeFunction:
    """``|g'|`` on the domain, each value from the first two other domain points."""
    dom = m.domain
    if len(dom) < 3:
        raise ValueError("need at least three domain points")
    out = {}
    for x in dom:
        u, v = [y for y in dom if y != x][:2]
        out[x] = metric_derivative(space, m, x, u, v)
    return DerivativeFunction(out)


def derivative_spread(space: FiniteMetricSpace, m: PointMap, x: int, pairs: Optional[Sequence] = None):
    """Max minus min of the local formula at ``x`` over auxiliary pairs ``(u, v)``."""
    others = [y for y in m.domain if y != x]
    if pairs is None:
        pairs = itertools.combinations(others, 2)
    vals = [metric_derivative(space, m, x, u, v) for u, v in pairs]
    return max(vals) - min(vals)


def check_mean_value(space: FiniteMetricSpace, m: PointMap, deriv: DerivativeFunction):
    """Max over domain pairs of ``|d^2(gx,gy) - |g'|(x) |g'|(y) d^2(x,y)|``."""
    d = space.dist
    dom = m.domain
    worst = 0 if not space.exact else Fraction(0)
    for i, x in enumerate(dom):
        gx = m(x)
        for y in dom[i + 1:]:
            gy = m(y)
            r = abs(d[gx][gy] ** 2 - deriv[x] * deriv[y] * d[x][y] ** 2)
            if r > worst:
                worst = r
    return worst


def check_chain_rule(space: FiniteMetricSpace, g: PointMap, h: PointMap):
    """Max over ``x`` of ``||(gh)'|(x) - |g'|(hx) |h'|(x)|`` where all are defined."""
    gh = g.compose(h)
    dg, dh, dgh = derivative_table(space, g), derivative_table(space, h), derivative_table(space, gh)
    worst = Fraction(0) if space.exact else 0.0
    for x, v in dgh.items():
        r = abs(v - dg[h(x)] * dh[x])
        if r > worst:
            worst = r
    return worst


class PairCheck(NamedTuple):
    holds: bool
    worst_pair: Optional[tuple]


def _sqrt_gap_le(a, b, K, m, exact: bool) -> bool:
    """Decide ``sqrt(a) - sqrt(b) <= K / sqrt(m)`` for ``a, b, m > 0``, ``K >= 0``."""
    if not exact:
        return math.sqrt(a) - math.sqrt(b) <= K / math.sqrt(m) * (1 + 1e-12) + 1e-300
    if a <= b:
        return True
    # sqrt(a) <= sqrt(b) + K/sqrt(m)  <=>  a - b - K^2/m <= 2 K sqrt(b/m)
    lhs = a - b - K * K / m
    if lhs <= 0:
        return True
    return lhs * lhs <= 4 * K * K * b / m


def lipschitz_bound_check(space: FiniteMetricSpace, m: PointMap, deriv: Optional[DerivativeFunction] = None) -> PairCheck:
    """``sqrt|g'|(x) - sqrt|g'|(y) <= 4/diam * max|g'| / sqrt(min|g'|) * d(x, y)`` on ordered pairs.

    ``diam``, ``max`` and ``min`` are taken over the domain of the map.
    """
    deriv = deriv or derivative_table(space, m)
    dom = m.domain
    diam = space.diameter(dom)
    hi, lo = deriv.max, deriv.min
    worst, worst_gap = None, None
    ok = True
    for x in dom:
        for y in dom:
            if x == y:
                continue
            K = 4 * hi * space.dist[x][y] / diam
            holds = _sqrt_gap_le(deriv[x], deriv[y], K, lo, space.exact)
            gap = math.sqrt(float(deriv[x])) - math.sqrt(float(deriv[y])) - float(K) / math.sqrt(float(lo))
            if worst_gap is None or gap > worst_gap:
                worst, worst_gap = (x, y), gap
            ok = ok and holds
    return PairCheck(ok, worst)


def cocycle_bound_check(space: FiniteMetricSpace, m: PointMap) -> PairCheck:
    """``|c_g(x,y)| <= 8/diam * max|g'|/min|g'| * d(x,y)`` with ``c_g = log|(g^-1)'|(x) - log|(g^-1)'|(y)``.

    Pairs range over the image of ``m`` (the domain of ``g^-1``).
    """
    inv = m.inverse()
    deriv = derivative_table(space, inv)
    dom = inv.domain
    diam = space.diameter(dom)
    ratio = deriv.max / deriv.min
    ok = True
    worst, worst_gap = None, None
    with mpmath.workdps(60):
        for i, x in enumerate(dom):
            for y in dom[i + 1:]:
                bound = 8 * ratio * space.dist[x][y] / diam
                r = deriv[x] / deriv[y]
                c = abs(_mplog(r))
                b = _mpnum(bound)
                gap = c - b
                if gap > mpmath.mpf(10) ** -50:
                    ok = False
                if worst_gap is None or gap > worst_gap:
                    worst, worst_gap = (x, y), gap
    return PairCheck(ok, worst)


def _mpnum(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _mplog(x):
    if isinstance(x, Fraction):
        return mpmath.log(x.numerator) - mpmath.log(x.denominator)
    return mpmath.log(x)


# -- covering radius and the alpha bound -----------------------------------


def kappa(space: FiniteMetricSpace, subset: Optional[Sequence[int]] = None):
    """Largest ``k`` such that no two open ``k``-balls (centred at points) cover the set.

    Equals ``min over centres (a, b) of max over x of min(d(x,a), d(x,b))``.
    """
    idx = list(range(space.size)) if subset is None else list(subset)
    if len(idx) < 3:
        raise ValueError("kappa needs at least three points")
    # min/max only compare, so exact ranks of the distinct distances suffice
    ranks, values = space.rank_matrix()
    R = ranks[np.ix_(idx, idx)]
    best = None
    for start in range(0, len(idx), 64):
        block = np.minimum(R[start:start + 64, None, :], R[None, :, :]).max(axis=2).min()
        best = block if best is None else min(best, block)
    return values[int(best)]


class AlphaCheck(NamedTuple):
    applicable: bool
    holds: bool
    displacement: object
    kappa: object


def alpha_bound_check(space: FiniteMetricSpace, m: PointMap, deriv: Optional[DerivativeFunction] = None) -> AlphaCheck:
    """If ``D(g) = max d(gx, x) <= kappa/10``, check ``-6 D/kappa <= |g'| - 1 <= 8 D/kappa``.

    ``kappa`` is computed on the domain of the map.
    """
    dom = m.domain
    k = kappa(space, dom)
    disp = max(space.dist[m(x)][x] for x in dom)
    if disp * 10 > k:
        return AlphaCheck(False, True, disp, k)
    deriv = deriv or derivative_table(space, m)
    lo, hi = -6 * disp / k, 8 * disp / k
    ok = all(lo <= deriv[x] - 1 <= hi for x in dom)
    return AlphaCheck(True, ok, disp, k)


# -- convenience ------------------------------------------------------------


def random_transposition(n: int, rng: random.Random) -> PointMap:
    i, j = rng.sample(range(n), 2)
    imgs = list(range(n))
    imgs[i], imgs[j] = j, i
    return PointMap(tuple(imgs))
