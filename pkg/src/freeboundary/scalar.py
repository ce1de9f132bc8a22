"""Exact scalars: rationals extended by a single positive infinity.

Values are plain :class:`fractions.Fraction` objects; the only addition is
the :data:`INF` singleton. ``0 * INF == 0`` by convention, so integrands
that vanish on infinite-measure cells integrate to finite values.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("freeboundary.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        if isinstance(other, (Rational, _Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if other is self:
            return self
        if isinstance(other, Rational):
            if other == 0:
                return Fraction(0)
            if other > 0:
                return self
            raise ValueError("negative multiple of infinity is not representable")
        return NotImplemented

    __rmul__ = __mul__


INF = _Infinity()

ExactScalar = Union[Fraction, _Infinity]


def is_inf(x) -> bool:
    return x is INF


def format_scalar(x) -> str:
    """Serialize as ``"num/den"`` (always with a denominator) or ``"inf"``."""
    if x is INF:
        return "inf"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(text: str) -> ExactScalar:
    text = text.strip()
    if text.lower() in ("inf", "+inf"):
        return INF
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact scalar: {text!r}") from exc
