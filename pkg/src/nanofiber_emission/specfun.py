"""Cylindrical Bessel functions and Wigner 3j/6j symbols.

Bessel evaluations are thin wrappers over :mod:`scipy.special` that accept
scalars or arrays. Wigner symbols use the Racah single-sum formulas on exact
integers; angular momenta are carried as doubled integers so half-integer
triangle and parity tests stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt
from numbers import Real

import numpy as np
from scipy import special

__all__ = [
    "HalfInteger",
    "bessel_j",
    "bessel_y",
    "bessel_k",
    "hankel",
    "bessel_derivative",
    "wigner_3j",
    "wigner_6j",
    "clebsch_gordan",
]


@dataclass(frozen=True, order=True)
class HalfInteger:
    """An angular-momentum quantum number stored as ``2 * value``."""

    twice_value: int

    @classmethod
    def of(cls, value) -> "HalfInteger":
        if isinstance(value, HalfInteger):
            return value
        return cls(_twice(value))

    def __float__(self) -> float:
        return self.twice_value / 2

    def __neg__(self) -> "HalfInteger":
        return HalfInteger(-self.twice_value)

    def __repr__(self) -> str:
        tv = self.twice_value
        return f"HalfInteger({tv // 2})" if tv % 2 == 0 else f"HalfInteger({tv}/2)"


def _twice(value) -> int:
    if isinstance(value, HalfInteger):
        return value.twice_value
    if isinstance(value, (int, np.integer)):
        return 2 * int(value)
    if isinstance(value, Fraction):
        doubled = 2 * value
    elif isinstance(value, Real):
        doubled = Fraction(2 * float(value)).limit_denominator(8)
        if abs(float(doubled) - 2 * float(value)) > 1e-9:
            raise ValueError(f"{value!r} is not a half-integer")
    else:
        raise TypeError(f"cannot interpret {value!r} as a half-integer")
    if doubled.denominator != 1:
        raise ValueError(f"{value!r} is not a half-integer")
    return int(doubled)


# -- Bessel family -----------------------------------------------------------


def bessel_j(order, x):
    """Bessel function of the first kind J_l(x)."""
    return special.jv(order, x)


def bessel_y(order, x):
    """Bessel function of the second kind Y_l(x)."""
    return special.yv(order, x)


def bessel_k(order, x):
    """Modified Bessel function of the second kind K_l(x), defined for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("bessel_k requires x > 0")
    return special.kv(order, x)


def hankel(kind: int, order, x):
    """Hankel function H_l^(1) = J + iY or H_l^(2) = J - iY for real x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("hankel requires x > 0")
    if kind == 1:
        return special.hankel1(order, x)
    if kind == 2:
        return special.hankel2(order, x)
    raise ValueError(f"Hankel kind must be 1 or 2, got {kind!r}")


_FAMILIES = {
    "J": bessel_j,
    "Y": bessel_y,
    "K": bessel_k,
    "H1": lambda l, x: hankel(1, l, x),
    "H2": lambda l, x: hankel(2, l, x),
}


def bessel_derivative(family: str, order, x):
    """Derivative with respect to the argument, via the order recurrences.

    J, Y, H1, H2 use ``(Z_{l-1} - Z_{l+1}) / 2``; K uses
    ``-(K_{l-1} + K_{l+1}) / 2``.
    """
    try:
        fn = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown Bessel family {family!r}") from None
    lower = fn(np.subtract(order, 1), x)
    upper = fn(np.add(order, 1), x)
    if family == "K":
        return -(lower + upper) / 2
    return (lower - upper) / 2


# -- Wigner symbols ----------------------------------------------------------


def _fact2(twice: int) -> int:
    """Factorial of an integer given as twice its value."""
    if twice < 0 or twice % 2:
        raise ValueError("factorial argument must be a non-negative integer")
    return factorial(twice // 2)


def _triangle(ta: int, tb: int, tc: int) -> bool:
    return (
        ta >= 0
        and tb >= 0
        and tc >= 0
        and (ta + tb + tc) % 2 == 0
        and abs(ta - tb) <= tc <= ta + tb
    )


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    return Fraction(
        _fact2(ta + tb - tc) * _fact2(ta - tb + tc) * _fact2(-ta + tb + tc),
        _fact2(ta + tb + tc + 2),
    )


def _check_projection(tj: int, tm: int) -> None:
    if tj < 0:
        raise ValueError("angular momentum must be non-negative")
    if abs(tm) > tj or (tj - tm) % 2:
        raise ValueError(f"projection {tm}/2 is not valid for j = {tj}/2")


@lru_cache(maxsize=None)
def _wigner_3j_twice(tj1, tj2, tj3, tm1, tm2, tm3) -> float:
    if tm1 + tm2 + tm3 != 0 or not _triangle(tj1, tj2, tj3):
        return 0.0
    radicand = _delta_sq(tj1, tj2, tj3)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        radicand *= _fact2(tj + tm) * _fact2(tj - tm)
    # summation bounds, all in doubled units
    kmin = max(0, tj2 - tj3 - tm1, tj1 - tj3 + tm2)
    kmax = min(tj1 + tj2 - tj3, tj1 - tm1, tj2 + tm2)
    total = Fraction(0)
    for tk in range(kmin, kmax + 1, 2):
        denom = (
            _fact2(tk)
            * _fact2(tj3 - tj2 + tk + tm1)
            * _fact2(tj3 - tj1 + tk - tm2)
            * _fact2(tj1 + tj2 - tj3 - tk)
            * _fact2(tj1 - tk - tm1)
            * _fact2(tj2 - tk + tm2)
        )
        total += Fraction(-1 if (tk // 2) % 2 else 1, denom)
    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    return phase * float(total) * sqrt(radicand)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3).

    Arguments may be ints, half-integral floats/Fractions or
    :class:`HalfInteger`. Raises ``ValueError`` when some ``|m| > j``.
    """
    t = [_twice(v) for v in (j1, j2, j3, m1, m2, m3)]
    for tj, tm in zip(t[:3], t[3:]):
        _check_projection(tj, tm)
    return _wigner_3j_twice(*t)


@lru_cache(maxsize=None)
def _wigner_6j_twice(tj1, tj2, tj3, tj4, tj5, tj6) -> float:
    triads = ((tj1, tj2, tj3), (tj1, tj5, tj6), (tj4, tj2, tj6), (tj4, tj5, tj3))
    if not all(_triangle(*tri) for tri in triads):
        return 0.0
    radicand = Fraction(1)
    for tri in triads:
        radicand *= _delta_sq(*tri)
    a = [sum(tri) for tri in triads]
    b = (tj1 + tj2 + tj4 + tj5, tj2 + tj3 + tj5 + tj6, tj3 + tj1 + tj6 + tj4)
    total = Fraction(0)
    for tt in range(max(a), min(b) + 1, 2):
        denom = 1
        for ai in a:
            denom *= _fact2(tt - ai)
        for bi in b:
            denom *= _fact2(bi - tt)
        total += Fraction((-1 if (tt // 2) % 2 else 1) * _fact2(tt + 2), denom)
    return float(total) * sqrt(radicand)


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}; zero if any triad is not triangular."""
    t = [_twice(v) for v in (j1, j2, j3, j4, j5, j6)]
    if any(tv < 0 for tv in t):
        raise ValueError("6j arguments must be non-negative")
    return _wigner_6j_twice(*t)


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """Clebsch-Gordan coefficient <j1 m1 j2 m2 | j m>."""
    tj1, tj2, tm = _twice(j1), _twice(j2), _twice(m)
    phase = -1 if ((tj1 - tj2 + tm) // 2) % 2 else 1
    return phase * sqrt(_twice(j) + 1) * wigner_3j(j1, j2, j, m1, m2, -Fraction(tm, 2))
