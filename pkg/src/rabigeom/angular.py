"""Exact and floating-point angular-momentum algebra.

Wigner 3j and 6j symbols are evaluated with arbitrary-precision rational
arithmetic under the square root (normal form ``s * sqrt(p/q)``), so
selection-rule zeros are exact and values stay accurate at large j where
naive float factorials fail.  Scalar spherical harmonics carry the
Condon-Shortley phase.  Rotation-matrix elements are provided only for the
rows m' = +-1, which is all the transverse-harmonic construction needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

__all__ = [
    "HalfInt",
    "SqrtRational",
    "SphDirection",
    "double_factorial",
    "triangle_ok",
    "wigner3j",
    "wigner6j",
    "sph_harm",
    "sph_harm_array",
    "wigner_d_pm1",
    "wigner_d_pm1_array",
]

HalfIntLike = Union["HalfInt", int, float, str]


@dataclass(frozen=True, order=True)
class HalfInt:
    """Angular-momentum quantum number stored as twice its value.

    Storing ``2j`` as an integer keeps j = 1/2, 7/2, ... exact, so triangle
    and projection selection rules are integer decisions rather than float
    comparisons.
    """

    twice: int

    @classmethod
    def of(cls, value: HalfIntLike) -> "HalfInt":
        """Coerce an int, exact float (n or n + 1/2), "p/q" string, or
        HalfInt into a HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, float):
            doubled = 2.0 * value
            if doubled != round(doubled):
                raise ValueError(f"{value!r} is not an integer or half-integer")
            return cls(int(round(doubled)))
        if isinstance(value, str):
            text = value.strip()
            if "/" in text:
                num, den = text.split("/", 1)
                frac = Fraction(int(num), int(den))
                if frac.denominator not in (1, 2):
                    raise ValueError(f"{value!r} is not an integer or half-integer")
                return cls(int(frac * 2))
            return cls.of(float(text))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def as_int(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __add__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    def __sub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice // 2)
        return f"{self.twice}/2"


@dataclass(frozen=True)
class SqrtRational:
    """Exact value of the form ``sign * sqrt(radicand)`` with rational radicand.

    This is the natural normal form for Wigner symbols; ``sign`` is 0 for an
    exact zero.
    """

    sign: int
    radicand: Fraction

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.radicand < 0:
            raise ValueError("radicand must be nonnegative")

    @property
    def signed_square(self) -> Fraction:
        """sign * radicand; convenient for exact comparisons."""
        return self.sign * self.radicand

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        # split the sqrt to postpone overflow for very large factorials
        return self.sign * math.sqrt(self.radicand.numerator) / math.sqrt(self.radicand.denominator)

    def __mul__(self, other: "SqrtRational") -> "SqrtRational":
        sign = self.sign * other.sign
        if sign == 0:
            return SqrtRational(0, Fraction(0))
        return SqrtRational(sign, self.radicand * other.radicand)


ZERO_SQRT = SqrtRational(0, Fraction(0))


@dataclass(frozen=True)
class SphDirection:
    """Point on the unit sphere, theta in [0, pi], phi wrapped to [0, 2pi).

    At the poles the azimuth is degenerate; it is canonicalized to phi = 0
    there so frames attached to a pole direction are unambiguous.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must be in [0, pi], got {self.theta}")
        phi = self.phi % (2.0 * math.pi)
        if self.theta == 0.0 or self.theta == math.pi:
            phi = 0.0
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_vector(cls, x: float, y: float, z: float) -> "SphDirection":
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            raise ValueError("zero vector has no direction")
        theta = math.acos(min(1.0, max(-1.0, z / r)))
        phi = math.atan2(y, x)
        return cls(theta, phi)


def double_factorial(n: int) -> int:
    """n!! for n >= -1, with (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError("double factorial requires n >= -1")
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def triangle_ok(j1: HalfIntLike, j2: HalfIntLike, j3: HalfIntLike) -> bool:
    """Triangle rule |j1-j2| <= j3 <= j1+j2 with integer perimeter."""
    t1, t2, t3 = (HalfInt.of(j).twice for j in (j1, j2, j3))
    if (t1 + t2 + t3) % 2 != 0:
        return False
    return abs(t1 - t2) <= t3 <= t1 + t2


def _fact(n: int) -> int:
    if n < 0:
        raise ValueError("negative factorial")
    return math.factorial(n)


def _triangle_coefficient(t1: int, t2: int, t3: int) -> Fraction:
    """Delta(j1 j2 j3) as an exact rational; assumes the triangle rule holds."""
    return Fraction(
        _fact((t1 + t2 - t3) // 2) * _fact((t1 - t2 + t3) // 2) * _fact((-t1 + t2 + t3) // 2),
        _fact((t1 + t2 + t3) // 2 + 1),
    )


@lru_cache(maxsize=None)
def _wigner3j_twice(tj1: int, tj2: int, tj3: int, tm1: int, tm2: int, tm3: int) -> SqrtRational:
    if tm1 + tm2 + tm3 != 0:
        return ZERO_SQRT
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if tj < 0 or abs(tm) > tj or (tj - tm) % 2 != 0:
            return ZERO_SQRT
    if not (abs(tj1 - tj2) <= tj3 <= tj1 + tj2) or (tj1 + tj2 + tj3) % 2 != 0:
        return ZERO_SQRT

    # Racah single-sum form; every factorial argument below is an integer.
    tmin = max(0, tj2 - tj3 - tm1, tj1 - tj3 + tm2) // 2
    tmax = min(tj1 + tj2 - tj3, tj1 - tm1, tj2 + tm2) // 2
    total = Fraction(0)
    for t in range(tmin, tmax + 1):
        denom = (
            _fact(t)
            * _fact((tj3 - tj2 + tm1) // 2 + t)
            * _fact((tj3 - tj1 - tm2) // 2 + t)
            * _fact((tj1 + tj2 - tj3) // 2 - t)
            * _fact((tj1 - tm1) // 2 - t)
            * _fact((tj2 + tm2) // 2 - t)
        )
        total += Fraction((-1) ** t, denom)
    if total == 0:
        return ZERO_SQRT

    prefactor = _triangle_coefficient(tj1, tj2, tj3)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        prefactor *= _fact((tj + tm) // 2) * _fact((tj - tm) // 2)
    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return SqrtRational(sign, prefactor * total * total)


def wigner3j(
    j1: HalfIntLike,
    j2: HalfIntLike,
    j3: HalfIntLike,
    m1: HalfIntLike,
    m2: HalfIntLike,
    m3: HalfIntLike,
) -> SqrtRational:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3), exact.

    Selection-rule violations return an exact zero rather than raising,
    since couplings legitimately vanish for forbidden projections.
    """
    return _wigner3j_twice(*(HalfInt.of(j).twice for j in (j1, j2, j3, m1, m2, m3)))


def wigner3j_f(j1, j2, j3, m1, m2, m3) -> float:
    return float(wigner3j(j1, j2, j3, m1, m2, m3))


@lru_cache(maxsize=None)
def _wigner6j_twice(ta: int, tb: int, tc: int, td: int, te: int, tf: int) -> SqrtRational:
    triads = ((ta, tb, tc), (ta, te, tf), (td, tb, tf), (td, te, tc))
    for t1, t2, t3 in triads:
        if min(t1, t2, t3) < 0:
            return ZERO_SQRT
        if not (abs(t1 - t2) <= t3 <= t1 + t2) or (t1 + t2 + t3) % 2 != 0:
            return ZERO_SQRT

    prefactor = Fraction(1)
    for t1, t2, t3 in triads:
        prefactor *= _triangle_coefficient(t1, t2, t3)

    sums = ((ta + tb + tc) // 2, (ta + te + tf) // 2, (td + tb + tf) // 2, (td + te + tc) // 2)
    caps = ((ta + tb + td + te) // 2, (tb + tc + te + tf) // 2, (ta + tc + td + tf) // 2)
    total = Fraction(0)
    for t in range(max(sums), min(caps) + 1):
        denom = _fact(t - sums[0]) * _fact(t - sums[1]) * _fact(t - sums[2]) * _fact(t - sums[3])
        denom *= _fact(caps[0] - t) * _fact(caps[1] - t) * _fact(caps[2] - t)
        total += Fraction((-1) ** t * _fact(t + 1), denom)
    if total == 0:
        return ZERO_SQRT
    sign = 1 if total > 0 else -1
    return SqrtRational(sign, prefactor * total * total)


def wigner6j(
    j1: HalfIntLike,
    j2: HalfIntLike,
    j3: HalfIntLike,
    j4: HalfIntLike,
    j5: HalfIntLike,
    j6: HalfIntLike,
) -> SqrtRational:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}, exact.

    Returns an exact zero when any of the four triads violates the triangle
    rule.
    """
    return _wigner6j_twice(*(HalfInt.of(j).twice for j in (j1, j2, j3, j4, j5, j6)))


def wigner6j_f(j1, j2, j3, j4, j5, j6) -> float:
    return float(wigner6j(j1, j2, j3, j4, j5, j6))


def _legendre_pmm(m: int, sintheta):
    # P_m^m(cos t) = (-1)^m (2m-1)!! sin^m(t), Condon-Shortley included
    sign = -1.0 if m % 2 else 1.0
    return sign * double_factorial(2 * m - 1) * sintheta**m


def sph_harm_array(l: int, m: int, theta, phi):
    """Spherical harmonic Y_{l,m}(theta, phi), vectorized over angle arrays.

    Condon-Shortley phase convention.  Returns zeros when |m| > l, which is
    convenient for ladder-style sums.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast_shapes(theta.shape, phi.shape)
    if abs(m) > l:
        return np.zeros(shape, dtype=complex)

    mm = abs(m)
    x = np.cos(theta)
    s = np.sin(theta)
    p_prev = _legendre_pmm(mm, s)
    if l == mm:
        plm = p_prev
    else:
        p_curr = x * (2 * mm + 1) * p_prev
        for ll in range(mm + 2, l + 1):
            p_next = (x * (2 * ll - 1) * p_curr - (ll + mm - 1) * p_prev) / (ll - mm)
            p_prev, p_curr = p_curr, p_next
        plm = p_curr if l > mm else p_prev

    norm = math.sqrt((2 * l + 1) / (4.0 * math.pi) * _fact(l - mm) / _fact(l + mm))
    y = norm * plm * np.exp(1j * mm * phi)
    y = np.broadcast_to(y, shape).astype(complex)
    if m < 0:
        y = np.conj(y) * (-1.0 if mm % 2 else 1.0)
    return y


def sph_harm(K: HalfIntLike, p: HalfIntLike, direction: SphDirection) -> complex:
    """Scalar spherical harmonic Y_{K,p} at a direction; K and p integers."""
    k = HalfInt.of(K).as_int()
    pp = HalfInt.of(p).as_int()
    return complex(sph_harm_array(k, pp, direction.theta, direction.phi))


def wigner_d_pm1_array(K: int, sign: int, M2: int, theta, phi):
    """Rotation-matrix elements D^(K)_{+-1, M2}(0, theta, phi).

    Evaluated through scalar spherical harmonics, which is regular at the
    poles (no 1/sin terms).  ``sign`` selects the +1 or -1 row.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if abs(M2) > K:
        raise ValueError("|M2| must not exceed K")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct = np.cos(theta)
    st = np.sin(theta)
    s = float(sign)

    term1 = (
        0.5
        * math.sqrt((K - M2) * (K + M2 + 1))
        * (1.0 - s * ct)
        * sph_harm_array(K, -M2 - 1, theta, phi)
        * np.exp(1j * phi)
    )
    term2 = -s * M2 * st * sph_harm_array(K, -M2, theta, phi)
    term3 = (
        -0.5
        * math.sqrt((K + M2) * (K - M2 + 1))
        * (1.0 + s * ct)
        * sph_harm_array(K, -M2 + 1, theta, phi)
        * np.exp(-1j * phi)
    )
    prefactor = -s * math.sqrt(4.0 * math.pi / (K * (K + 1) * (2 * K + 1)))
    return prefactor * (term1 + term2 + term3)


def wigner_d_pm1(K: int, sign: int, M2: int, theta: float, phi: float) -> complex:
    return complex(wigner_d_pm1_array(K, sign, M2, theta, phi))
