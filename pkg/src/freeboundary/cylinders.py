"""Finite unions of boundary cylinders ``Omega_x``.

A :class:`CylinderSet` is stored as the set of maximal cylinders it
contains. That representation is unique, so equality of sets is equality
of term sets, and no term is ever a prefix of another.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .words import IDENTITY, BoundaryPoint, Word, common_prefix_length


class MalformedSet(ValueError):
    pass


def _next_letters(n: int, x: Sequence[int]) -> range | list[int]:
    if not x:
        return range(2 * n)
    bad = x[-1] ^ 1
    return [c for c in range(2 * n) if c != bad]


_FULL = object()


def _resolve(n: int, signed: Iterable[tuple[int, Sequence[int]]]) -> frozenset[Word]:
    base = 0
    deeper: list[tuple[int, tuple[int, ...]]] = []
    for sign, w in signed:
        if len(w) == 0:
            base += sign
        else:
            deeper.append((sign, tuple(w)))

    def rec(x: tuple[int, ...], const: int, terms: list):
        if not terms:
            if const == 1:
                return _FULL
            if const == 0:
                return ()
            raise MalformedSet(f"signed terms give multiplicity {const} on cylinder {Word(x)}")
        depth = len(x)
        by_letter: dict[int, list] = {}
        for t in terms:
            by_letter.setdefault(t[1][depth], []).append(t)
        out: list[Word] = []
        all_full = True
        for c in _next_letters(n, x):
            child = x + (c,)
            sub = by_letter.pop(c, [])
            cconst = const + sum(s for s, w in sub if len(w) == depth + 1)
            r = rec(child, cconst, [t for t in sub if len(t[1]) > depth + 1])
            if r is _FULL:
                out.append(Word(child))
            else:
                all_full = False
                out.extend(r)
        if by_letter:
            bad = next(iter(by_letter.values()))[0][1]
            raise MalformedSet(f"term {bad} is not a reduced word")
        return _FULL if all_full else out

    r = rec((), base, deeper)
    if r is _FULL:
        return frozenset([IDENTITY])
    return frozenset(r)


def _complement_of_cylinder(n: int, w: Sequence[int]) -> list[Word]:
    out = []
    for j in range(len(w)):
        for c in _next_letters(n, w[:j]):
            if c != w[j]:
                out.append(Word(tuple(w[:j]) + (c,)))
    return out


class CylinderSet:
    """A finite union of cylinders in the boundary of the rank-``n`` tree."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Iterable[Sequence[int]] = (), *, normalized: bool = False):
        self.n = n
        if normalized:
            self.terms = frozenset(Word(t) for t in terms)
        else:
            self.terms = _resolve(n, ((1, t) for t in terms))
        self._hash = hash((n, self.terms))

    @classmethod
    def from_signed(cls, n: int, signed: Iterable[tuple[int, Sequence[int]]]) -> "CylinderSet":
        """Build from ``(sign, word)`` pairs whose signed indicator sum is 0/1 valued."""
        signed = list(signed)
        for s, _ in signed:
            if s not in (1, -1):
                raise MalformedSet(f"sign must be +1 or -1, got {s!r}")
        return cls(n, _resolve(n, signed), normalized=True)

    @classmethod
    def full(cls, n: int) -> "CylinderSet":
        return cls(n, [IDENTITY], normalized=True)

    @classmethod
    def empty(cls, n: int) -> "CylinderSet":
        return cls(n, (), normalized=True)

    @classmethod
    def cylinder(cls, n: int, x: Sequence[int]) -> "CylinderSet":
        return cls(n, [Word(x)], normalized=True)

    @classmethod
    def complement_of(cls, n: int, x: Sequence[int]) -> "CylinderSet":
        """``Omega \\ Omega_x`` as maximal cylinders (siblings along the path to x)."""
        return cls(n, _complement_of_cylinder(n, x), normalized=True)

    def sorted_terms(self) -> list[Word]:
        return sorted(self.terms)

    @property
    def depth(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def is_empty(self) -> bool:
        return not self.terms

    def contains(self, xi: BoundaryPoint | Sequence[int]) -> bool:
        """Membership of a boundary point (or of a cylinder, given as a word)."""
        if isinstance(xi, BoundaryPoint):
            return any(xi.prefix(len(t)) == t for t in self.terms)
        return any(len(t) <= len(xi) and tuple(xi[: len(t)]) == t for t in self.terms)

    __contains__ = contains

    def complement(self) -> "CylinderSet":
        return CylinderSet.from_signed(self.n, [(1, IDENTITY)] + [(-1, t) for t in self.terms])

    def intersection(self, other: "CylinderSet") -> "CylinderSet":
        out = []
        for s in self.terms:
            for t in other.terms:
                k = common_prefix_length(s, t)
                if k == min(len(s), len(t)):
                    out.append(s if len(s) >= len(t) else t)
        return CylinderSet(self.n, out)

    def union(self, other: "CylinderSet") -> "CylinderSet":
        signed = [(1, t) for t in self.terms] + [(1, t) for t in other.terms]
        signed += [(-1, t) for t in self.intersection(other).terms]
        return CylinderSet.from_signed(self.n, signed)

    def difference(self, other: "CylinderSet") -> "CylinderSet":
        return self.intersection(other.complement())

    __and__ = intersection
    __or__ = union
    __sub__ = difference

    def image(self, g: Word) -> "CylinderSet":
        """The set ``g . A``."""
        if not g:
            return self
        if len(self.terms) == 1:
            return image_of_cylinder(self.n, g, next(iter(self.terms)))
        out: list[Word] = []
        for t in self.terms:
            out.extend(image_of_cylinder(self.n, g, t).terms)
        return CylinderSet(self.n, out)

    def __eq__(self, other):
        if not isinstance(other, CylinderSet):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = " + ".join(f"O[{t}]" for t in self.sorted_terms()) or "empty"
        return f"CylinderSet(n={self.n}: {body})"


def image_of_cylinder(n: int, g: Word, x: Sequence[int]) -> CylinderSet:
    """The exact set ``g . Omega_x``.

    If some letter of ``x`` survives in ``g x`` the image is the cylinder of
    the reduced product. Otherwise ``g = g' x^-1`` and the image is
    ``Omega \\ Omega_{g[:|g'|+1]}``.
    """
    x = Word(x)
    if not x:
        return CylinderSet.full(n)
    gx = g * x
    cancelled = (len(g) + len(x) - len(gx)) // 2
    if cancelled < len(x):
        return CylinderSet.cylinder(n, gx)
    return CylinderSet.complement_of(n, g[: len(g) - len(x) + 1])
