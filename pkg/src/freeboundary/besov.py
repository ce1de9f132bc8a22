"""Edge-differential seminorms on Cayley balls and Besov seminorms on the boundary.

A :class:`GroupFunction` lists values on some vertices of a ball; every
other vertex takes the value of its deepest listed ancestor. This covers
every function on the ball (list all vertices) while keeping functions
that are eventually constant along branches, such as ``x -> (g, x)``, small
even when the ball has billions of vertices.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence

from .cylinders import CylinderSet
from .functions import BoundaryFunction, integrate_nu
from .measure import growth_rate_brackets
from .scalar import format_scalar
from .words import IDENTITY, FreeGroup, Word


class CayleyBall:
    """Reduced words of length ``<= radius`` and the edges ``(x, xs)`` between them."""

    def __init__(self, group: FreeGroup, radius: int):
        if radius < 0:
            raise ValueError("radius must be >= 0")
        self.group = group
        self.radius = radius

    @property
    def vertex_count(self) -> int:
        q = self.group.q
        return 1 + (q + 1) * (q**self.radius - 1) // (q - 1)

    @property
    def edge_count(self) -> int:
        return self.vertex_count - 1

    def __contains__(self, w) -> bool:
        return len(w) <= self.radius

    def vertices(self) -> Iterator[Word]:
        for r in range(self.radius + 1):
            yield from self.group.sphere(r)

    def edges(self) -> Iterator[tuple[Word, Word]]:
        """Each non-identity vertex with its parent edge, as ``(parent, vertex)``."""
        for r in range(1, self.radius + 1):
            for w in self.group.sphere(r):
                yield Word(w[:-1]), w

    def require(self, *depths: int) -> None:
        need = max(depths, default=0) + 1
        if self.radius < need:
            raise ValueError(f"ball radius {self.radius} too small; need at least {need}")


class GroupFunction:
    def __init__(self, ball: CayleyBall, values: Mapping[Word, object]):
        vals = {Word(w): Fraction(v) for w, v in values.items()}
        if IDENTITY not in vals:
            raise ValueError("the identity vertex must be listed")
        for w in vals:
            if w not in ball:
                raise ValueError(f"vertex {w} lies outside the ball of radius {ball.radius}")
        self.ball = ball
        self.values = vals

    @classmethod
    def from_callable(cls, ball: CayleyBall, f: Callable[[Word], object]) -> "GroupFunction":
        """Evaluate ``f`` at every vertex, then drop entries the inheritance rule recovers."""
        return cls(ball, {w: f(w) for w in ball.vertices()}).compress()

    def compress(self) -> "GroupFunction":
        keep = {IDENTITY: self.values[IDENTITY]}
        for w in sorted(self.values, key=len):
            if w and self.values[w] != self._inherited(Word(w[:-1]), keep):
                keep[w] = self.values[w]
        return GroupFunction(self.ball, keep)

    @staticmethod
    def _inherited(w: Word, table) -> Fraction:
        for k in range(len(w), -1, -1):
            v = table.get(w[:k])
            if v is not None:
                return v
        raise AssertionError("identity missing")

    def __call__(self, w: Sequence[int]) -> Fraction:
        w = Word(w)
        if w not in self.ball:
            raise ValueError(f"vertex {w} lies outside the ball")
        return self._inherited(w, self.values)

    def listed(self) -> list[Word]:
        return sorted(self.values, key=lambda w: (len(w), w))

    def to_json(self) -> str:
        return json.dumps(
            {"radius": self.ball.radius, "values": {str(w): format_scalar(self.values[w]) for w in self.listed()}},
            indent=1,
        )


def load_group_function(path: str | Path, group: FreeGroup, radius: int | None = None) -> GroupFunction:
    """Read ``{"radius": R, "values": {"a1.a2": "1/2", ...}}`` (or a bare vertex map)."""
    data = json.loads(Path(path).read_text())
    table = data.get("values", data) if isinstance(data, dict) else None
    if not isinstance(table, dict):
        raise ValueError("group function file must hold a vertex -> value map")
    if radius is None:
        radius = data.get("radius") if "values" in data else None
    words = {group.parse(k): Fraction(v) for k, v in table.items()}
    if radius is None:
        radius = max((len(w) for w in words), default=0)
    return GroupFunction(CayleyBall(group, int(radius)), words)


def ep_seminorm_p(phi: GroupFunction, p: int) -> Fraction:
    """``sum over ball edges (x, xs) of |phi(x) - phi(xs)|^p``.

    Only edges into listed vertices can carry a difference.
    """
    total = Fraction(0)
    for w in phi.values:
        if w:
            total += abs(phi.values[w] - phi(w[:-1])) ** p
    return total


def ep_seminorm_p_dense(phi: GroupFunction, p: int) -> Fraction:
    """Edge-by-edge sum over the whole ball; reference for small radii."""
    return sum((abs(phi(x) - phi(y)) ** p for x, y in phi.ball.edges()), Fraction(0))


def busemann_function(g: Word, ball: CayleyBall) -> GroupFunction:
    """``x -> (g, x)``: ``i`` on the branch leaving ``g`` after ``i`` letters."""
    ball.require(len(g))
    return GroupFunction(ball, {Word(g[:i]): i for i in range(len(g) + 1)})


def boundary_extension(phi: GroupFunction, depth: int) -> BoundaryFunction:
    """The boundary function ``xi -> lim phi(xi[:k])``, locally constant at ``depth``.

    Each branch must be constant from level ``R - 1`` on (``R`` the radius),
    and that limit must be constant on every depth-``depth`` cylinder.
    """
    ball = phi.ball
    R = ball.radius
    if depth < 0:
        raise ValueError("depth must be >= 0")
    ball.require(depth)
    n = ball.group.n
    vals = phi.values
    for w, v in vals.items():
        if len(w) == R and R > 0 and v != phi(w[:-1]):
            raise ValueError(f"extension undefined at this depth: phi does not stabilise along {w}")
    # nearest listed ancestor of each listed vertex below the root
    inner = [w for w in vals if len(w) <= R - 1]
    inner_set = set(inner)
    children: dict[Word, list[Word]] = {w: [] for w in inner}
    for w in inner:
        if w:
            k = len(w) - 1
            while Word(w[:k]) not in inner_set:
                k -= 1
            children[Word(w[:k])].append(w)
    by_value: dict[Fraction, list[tuple[int, Word]]] = {}
    for w in inner:
        signed = by_value.setdefault(vals[w], [])
        signed.append((1, w))
        signed.extend((-1, c) for c in children[w])
    keys = sorted(by_value)
    cells = [CylinderSet.from_signed(n, by_value[v]) for v in keys]
    f = BoundaryFunction(n, [c for c in cells if not c.is_empty()], [v for c, v in zip(cells, keys) if not c.is_empty()])
    seen: dict[Word, Fraction] = {}
    for c, v in zip(f.cells, f.values):
        for t in c.terms:
            if len(t) > depth:
                key = Word(t[:depth])
                if seen.setdefault(key, v) != v:
                    raise ValueError(f"extension undefined at this depth: not constant on the cylinder of {key}")
    return f


def besov_seminorm_p(f: BoundaryFunction, p: int) -> Fraction:
    """``iint |f(xi) - f(omega)|^p q^(2 (xi, omega)) dmu dmu``."""
    return integrate_nu(f.difference_power(p))


def properness_table(group: FreeGroup, elements: Sequence[Word], p: int, radius: int | None = None) -> list[dict]:
    """Rows ``length, ep_p, besov_p, lower_bracket, upper_bracket`` for each element.

    The brackets are ``c1 |g|`` and ``c2 |g|`` with the linear growth
    constants of :func:`~freeboundary.measure.growth_rate_brackets`.
    """
    if not isinstance(p, int) or p <= 1:
        raise ValueError(f"properness needs an integer p > 1 (for all p > e(Gamma) = 1 on trees), got p={p}")
    R = radius if radius is not None else max((len(g) for g in elements), default=0) + 1
    ball = CayleyBall(group, R)
    lo, hi = growth_rate_brackets(group.q, p)
    rows = []
    for g in elements:
        phi = busemann_function(g, ball)
        f = boundary_extension(phi, len(g))
        rows.append(
            {
                "length": len(g),
                "ep_p": ep_seminorm_p(phi, p),
                "besov_p": besov_seminorm_p(f, p),
                "lower_bracket": lo * len(g),
                "upper_bracket": hi * len(g),
            }
        )
    return rows
