"""Free groups, reduced words and eventually periodic boundary points.

Letters are small integers: generator ``a_i`` is ``2*(i-1)`` and its inverse
is ``2*(i-1) + 1``, so ``letter ^ 1`` inverts a letter and integer order is
the alphabet order ``a1 < A1 < a2 < A2 < ...`` used for canonical forms.
Serialized tokens are ``a1, A1, a2, ...`` joined by dots; the identity is
written ``e``.
"""
from __future__ import annotations

import random
import re
from math import gcd
from typing import Iterable, Iterator, Sequence, Union

from .scalar import INF

IDENTITY_TOKENS = ("", "e", "1")
_TOKEN = re.compile(r"^([aA])(\d+)$")


def letter_token(c: int) -> str:
    return ("A" if c & 1 else "a") + str(c // 2 + 1)


def token_letter(tok: str) -> int:
    m = _TOKEN.match(tok.strip())
    if not m or int(m.group(2)) < 1:
        raise ValueError(f"unknown letter {tok!r}")
    return 2 * (int(m.group(2)) - 1) + (m.group(1) == "A")


class Word(tuple):
    """A freely reduced word, stored as a tuple of letter codes.

    ``Word`` trusts its input; use :meth:`FreeGroup.reduce` or
    :meth:`FreeGroup.parse` for unvalidated letters. ``*`` is the group
    product (with free cancellation), not tuple repetition.
    """

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        return super().__new__(cls, letters)

    def inverse(self) -> "Word":
        return Word(c ^ 1 for c in reversed(self))

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, tuple):
            return NotImplemented
        n, m = len(self), len(other)
        k = 0
        while k < n and k < m and self[n - 1 - k] == other[k] ^ 1:
            k += 1
        return Word(self[: n - k] + other[k:])

    def prefix(self, k: int) -> "Word":
        return Word(self[:k])

    @property
    def is_identity(self) -> bool:
        return len(self) == 0

    def __str__(self):
        return ".".join(letter_token(c) for c in self) if self else "e"

    def __repr__(self):
        return f"Word({str(self)!r})"


IDENTITY = Word()


def common_prefix_length(x: Sequence[int], y: Sequence[int]) -> int:
    k = 0
    for a, b in zip(x, y):
        if a != b:
            break
        k += 1
    return k


def reduce_letters(letters: Iterable[int]) -> Word:
    out: list[int] = []
    for c in letters:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return Word(out)


def multiply(g: Word, h: Word) -> Word:
    return g * h


def invert(g: Word) -> Word:
    return g.inverse()


def gromov_product_words(g: Sequence[int], h: Sequence[int]) -> int:
    """Gromov product at the identity: the length of the shared prefix."""
    return common_prefix_length(g, h)


def _cyclic_split(v: Word) -> tuple[Word, Word]:
    """Write ``v = c * core * c^-1`` with ``core`` cyclically reduced."""
    lo, hi = 0, len(v)
    while hi - lo >= 2 and v[lo] == v[hi - 1] ^ 1:
        lo += 1
        hi -= 1
    return Word(v[:lo]), Word(v[lo:hi])


def _primitive_root(v: Sequence[int]) -> tuple[int, ...]:
    m = len(v)
    for d in range(1, m + 1):
        if m % d == 0 and all(v[i] == v[i % d] for i in range(d, m)):
            return tuple(v[:d])
    return tuple(v)  # unreachable


class BoundaryPoint:
    """An eventually periodic infinite reduced word ``u v v v ...``.

    The constructor accepts any reduced ``preperiod`` and non-identity
    ``period`` and stores the canonical form: the period is the least
    rotation of the primitive period, and the preperiod is the shortest one
    compatible with that period. Equal points have identical fields.
    """

    __slots__ = ("preperiod", "period", "_hash")

    def __init__(self, preperiod: Sequence[int] = (), period: Sequence[int] = ()):
        u = reduce_letters(preperiod)
        v = reduce_letters(period)
        if not v:
            raise ValueError("period of a boundary point must be a non-identity word")
        c, core = _cyclic_split(v)
        w = u * c
        m = len(core)
        # cancellation of w against core^inf; at most |w| letters go
        k = 0
        while k < len(w) and w[len(w) - 1 - k] == core[k % m] ^ 1:
            k += 1
        pre = list(w[: len(w) - k])
        s = k % m
        per = core[s:] + core[:s]
        root = _primitive_root(per)
        d = len(root)
        best = min(range(d), key=lambda i: root[i:] + root[:i])
        pre.extend(root[:best])
        per = root[best:] + root[:best]
        while len(pre) >= d and tuple(pre[len(pre) - d:]) == per:
            del pre[len(pre) - d:]
        self.preperiod = Word(pre)
        self.period = Word(per)
        self._hash = hash((self.preperiod, self.period))

    def letter(self, i: int) -> int:
        u = self.preperiod
        if i < len(u):
            return u[i]
        return self.period[(i - len(u)) % len(self.period)]

    def prefix(self, k: int) -> Word:
        return Word(self.letter(i) for i in range(k))

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return self.preperiod == other.preperiod and self.period == other.period

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "BoundaryPoint"):
        return (len(self.preperiod), self.preperiod, self.period) < (
            len(other.preperiod),
            other.preperiod,
            other.period,
        )

    def __str__(self):
        pre = ".".join(letter_token(c) for c in self.preperiod)
        per = ".".join(letter_token(c) for c in self.period)
        return f"{pre}|({per})^inf"

    def __repr__(self):
        return f"BoundaryPoint({str(self)!r})"

    def max_letter(self) -> int:
        return max(self.preperiod + self.period)


Point = Union[Word, BoundaryPoint]


def scan_bound(x: BoundaryPoint, y: BoundaryPoint) -> int:
    """Index before which two distinct canonical points must disagree."""
    p1, p2 = len(x.period), len(y.period)
    return max(len(x.preperiod), len(y.preperiod)) + p1 * p2 // gcd(p1, p2) + max(p1, p2)


def gromov_product(x: Point, y: Point):
    """Length of the longest common prefix; ``INF`` for equal boundary points.

    Words and boundary points may be mixed freely.
    """
    if isinstance(x, BoundaryPoint) and isinstance(y, BoundaryPoint):
        if x == y:
            return INF
        bound = scan_bound(x, y)
        for i in range(bound):
            if x.letter(i) != y.letter(i):
                return i
        raise AssertionError(f"no disagreement before index {bound}: {x} vs {y} not canonical")
    if isinstance(x, BoundaryPoint):
        x, y = y, x
    if isinstance(y, BoundaryPoint):
        k = 0
        for c in x:
            if c != y.letter(k):
                break
            k += 1
        return k
    return common_prefix_length(x, y)


gromov_product_boundary = gromov_product


def act(g: Word, xi: BoundaryPoint) -> BoundaryPoint:
    """Left action of ``g`` on the boundary, returned in canonical form."""
    if not g:
        return xi
    return BoundaryPoint(g * xi.preperiod, xi.period)


class FreeGroup:
    """The free group of rank ``n`` and its ``(2n)``-regular Cayley tree."""

    def __init__(self, n: int):
        if not isinstance(n, int) or n < 2:
            raise ValueError(f"rank must be an integer >= 2, got {n!r}")
        self.n = n
        self.q = 2 * n - 1

    def __repr__(self):
        return f"FreeGroup({self.n})"

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and other.n == self.n

    def __hash__(self):
        return hash(("FreeGroup", self.n))

    @property
    def letters(self) -> range:
        return range(2 * self.n)

    @property
    def identity(self) -> Word:
        return IDENTITY

    def generators(self) -> list[Word]:
        return [Word((2 * i,)) for i in range(self.n)]

    def _check(self, c: int) -> int:
        if not isinstance(c, int) or not 0 <= c < 2 * self.n:
            raise ValueError(f"unknown letter {c!r} for rank {self.n}")
        return c

    def reduce(self, letters: Iterable[Union[int, str]]) -> Word:
        """Freely reduce raw letters (codes or tokens) into a :class:`Word`."""
        codes = [self._check(token_letter(c) if isinstance(c, str) else c) for c in letters]
        return reduce_letters(codes)

    def parse(self, text: str) -> Word:
        text = text.strip()
        if text in IDENTITY_TOKENS:
            return IDENTITY
        return self.reduce(text.split("."))

    def parse_point(self, text: str) -> BoundaryPoint:
        m = re.fullmatch(r"\s*([^|]*)\|\((.+)\)\^inf\s*", text)
        if not m:
            raise ValueError(f"malformed boundary point {text!r}")
        return BoundaryPoint(self.parse(m.group(1)), self.parse(m.group(2)))

    def next_letters(self, x: Sequence[int]) -> list[int]:
        if not x:
            return list(self.letters)
        bad = x[-1] ^ 1
        return [c for c in self.letters if c != bad]

    def children(self, x: Word) -> list[Word]:
        return [Word(x + (c,)) for c in self.next_letters(x)]

    def sphere(self, length: int) -> Iterator[Word]:
        """All reduced words of the given length, in lexicographic order."""
        if length == 0:
            yield IDENTITY
            return
        stack = [IDENTITY]
        while stack:
            x = stack.pop()
            if len(x) == length:
                yield x
                continue
            stack.extend(reversed(self.children(x)))

    def sphere_size(self, length: int) -> int:
        return 1 if length == 0 else (self.q + 1) * self.q ** (length - 1)

    def random_word(self, length: int, rng: random.Random) -> Word:
        """Uniform random reduced word of exactly ``length`` letters."""
        out: list[int] = []
        for _ in range(length):
            out.append(rng.choice(self.next_letters(out)))
        return Word(out)

    def random_cyclic_word(self, length: int, rng: random.Random) -> Word:
        while True:
            w = self.random_word(length, rng)
            if length <= 1 or w[0] != w[-1] ^ 1:
                return w

    def random_point(self, rng: random.Random, max_preperiod: int = 6, max_period: int = 3) -> BoundaryPoint:
        u = self.random_word(rng.randint(0, max_preperiod), rng)
        v = self.random_cyclic_word(rng.randint(1, max_period), rng)
        return BoundaryPoint(u, v)

    def check_word(self, w: Sequence[int]) -> Word:
        for c in w:
            self._check(c)
        return Word(w)

    def check_point(self, xi: BoundaryPoint) -> BoundaryPoint:
        if xi.max_letter() >= 2 * self.n:
            raise ValueError(f"{xi} uses letters outside rank {self.n}")
        return xi
