"""Complex 3-vectors, the spherical basis of the quantization frame, and the
helicity frame attached to a propagation direction.

The dot product used throughout is bilinear (no conjugation): for complex
vectors a and b it is sum_i a_i b_i, equal to sum_p (-1)^p a_p b_{-p} in
spherical components.  Norms are Hermitian, sqrt(conj(a) . a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import SphDirection

__all__ = [
    "CVec3",
    "HelicityFrame",
    "X_HAT",
    "Y_HAT",
    "Z_HAT",
    "E_PLUS",
    "E_ZERO",
    "E_MINUS",
    "bilinear_dot",
    "hermitian_dot",
    "cross",
    "spherical_components",
    "from_spherical_components",
    "k_hat",
    "theta_hat",
    "phi_hat",
    "helicity_frame",
]

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class CVec3:
    """Complex 3-vector in quantization-frame Cartesian components."""

    x: complex
    y: complex
    z: complex

    def __add__(self, other: "CVec3") -> "CVec3":
        return CVec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "CVec3") -> "CVec3":
        return CVec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, scalar: complex) -> "CVec3":
        return CVec3(self.x * scalar, self.y * scalar, self.z * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "CVec3":
        return CVec3(-self.x, -self.y, -self.z)

    def conj(self) -> "CVec3":
        return CVec3(self.x.conjugate(), self.y.conjugate(), self.z.conjugate())

    @property
    def norm(self) -> float:
        """Hermitian norm sqrt(conj(v) . v)."""
        return math.sqrt(abs(self.x) ** 2 + abs(self.y) ** 2 + abs(self.z) ** 2)

    def unit(self) -> "CVec3":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return self * (1.0 / n)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=complex)

    @classmethod
    def from_array(cls, arr) -> "CVec3":
        a = np.asarray(arr, dtype=complex).reshape(3)
        return cls(complex(a[0]), complex(a[1]), complex(a[2]))


X_HAT = CVec3(1.0, 0.0, 0.0)
Y_HAT = CVec3(0.0, 1.0, 0.0)
Z_HAT = CVec3(0.0, 0.0, 1.0)

_SQRT2 = math.sqrt(2.0)
E_PLUS = CVec3(-1.0 / _SQRT2, -1j / _SQRT2, 0.0)  # e_{+1}
E_ZERO = Z_HAT  # e_0
E_MINUS = CVec3(1.0 / _SQRT2, -1j / _SQRT2, 0.0)  # e_{-1}


def bilinear_dot(a: CVec3, b: CVec3) -> complex:
    """Unconjugated dot product sum_i a_i b_i."""
    return a.x * b.x + a.y * b.y + a.z * b.z


def hermitian_dot(a: CVec3, b: CVec3) -> complex:
    """conj(a) . b."""
    return a.x.conjugate() * b.x + a.y.conjugate() * b.y + a.z.conjugate() * b.z


def cross(a: CVec3, b: CVec3) -> CVec3:
    """Componentwise (bilinear) cross product."""
    return CVec3(
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    )


def spherical_components(v: CVec3) -> tuple[complex, complex, complex]:
    """Spherical components (A_{+1}, A_0, A_{-1}) with A_p = v . e_p.

    The expansion that reconstructs the vector is v = sum_p A_p conj(e_p).
    """
    return (bilinear_dot(v, E_PLUS), bilinear_dot(v, E_ZERO), bilinear_dot(v, E_MINUS))


def from_spherical_components(a_plus: complex, a_zero: complex, a_minus: complex) -> CVec3:
    return a_plus * E_PLUS.conj() + a_zero * E_ZERO.conj() + a_minus * E_MINUS.conj()


def k_hat(direction: SphDirection) -> CVec3:
    st, ct = math.sin(direction.theta), math.cos(direction.theta)
    sp, cp = math.sin(direction.phi), math.cos(direction.phi)
    return CVec3(st * cp, st * sp, ct)


def theta_hat(direction: SphDirection) -> CVec3:
    st, ct = math.sin(direction.theta), math.cos(direction.theta)
    sp, cp = math.sin(direction.phi), math.cos(direction.phi)
    return CVec3(ct * cp, ct * sp, -st)


def phi_hat(direction: SphDirection) -> CVec3:
    sp, cp = math.sin(direction.phi), math.cos(direction.phi)
    return CVec3(-sp, cp, 0.0)


@dataclass(frozen=True)
class HelicityFrame:
    """Orthonormal frame attached to a propagation direction.

    e_zero is the real unit vector along k; e_xp and e_yp are the polar and
    azimuthal unit vectors of the quantization frame evaluated at k, and the
    circular vectors are e_{+-1} = -+(e_xp +- i e_yp)/sqrt(2).
    """

    k_dir: SphDirection
    e_plus: CVec3
    e_minus: CVec3
    e_zero: CVec3
    e_xp: CVec3
    e_yp: CVec3


def helicity_frame(k_dir: SphDirection) -> HelicityFrame:
    exp_ = theta_hat(k_dir)
    eyp = phi_hat(k_dir)
    return HelicityFrame(
        k_dir=k_dir,
        e_plus=(exp_ + 1j * eyp) * (-1.0 / _SQRT2),
        e_minus=(exp_ - 1j * eyp) * (1.0 / _SQRT2),
        e_zero=k_hat(k_dir),
        e_xp=exp_,
        e_yp=eyp,
    )
