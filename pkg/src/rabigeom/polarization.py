"""Jones-vector polarization states in the helicity frame, wave plates, and
the magnetic-field polarization.

Jones components are taken along the linear helicity basis (e_xp, e_yp).
LCP is the state with Jones column (1, i)/sqrt(2): positive helicity, unit
component on the q' = -1 circular basis vector.  Wave-plate matrices drop
global phases; relative phases between beams belong to the drive
specification, never to the Jones vector.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .angular import SphDirection
from .frames import CVec3, HelicityFrame, bilinear_dot, cross, helicity_frame, k_hat

__all__ = [
    "PolarizationError",
    "JonesVector",
    "WavePlate",
    "jones_to_cvec",
    "cvec_to_jones",
    "apply_waveplate",
    "beta_vector",
    "named_polarization",
    "JONES_LCP",
    "JONES_RCP",
]

TRANSVERSE_TOL = 1e-10


class PolarizationError(ValueError):
    """Polarization incompatible with the beam geometry (e.g. not transverse)."""


@dataclass(frozen=True)
class JonesVector:
    """Two-component polarization state (components along e_xp and e_yp)."""

    jx: complex
    jy: complex

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.jx) ** 2 + abs(self.jy) ** 2)

    def normalized(self) -> "JonesVector":
        n = self.norm
        if n == 0.0:
            raise PolarizationError("zero Jones vector")
        return JonesVector(self.jx / n, self.jy / n)

    def is_unit(self, tol: float = 1e-12) -> bool:
        return abs(self.norm - 1.0) <= tol


JONES_LCP = JonesVector(1.0 / math.sqrt(2.0), 1j / math.sqrt(2.0))
JONES_RCP = JonesVector(1.0 / math.sqrt(2.0), -1j / math.sqrt(2.0))


@dataclass(frozen=True)
class WavePlate:
    """Half- or quarter-wave plate.

    ``fast_axis_angle`` is the rotation of the fast axis about +k, measured
    from e_yp.
    """

    kind: str  # "half" or "quarter"
    fast_axis_angle: float

    def __post_init__(self):
        if self.kind not in ("half", "quarter"):
            raise ValueError("wave plate kind must be 'half' or 'quarter'")
        if not math.isfinite(self.fast_axis_angle):
            raise ValueError("fast axis angle must be finite")

    def matrix(self) -> np.ndarray:
        t = self.fast_axis_angle
        if self.kind == "half":
            c2, s2 = math.cos(2 * t), math.sin(2 * t)
            return np.array([[c2, s2], [s2, -c2]], dtype=complex)
        c, s = math.cos(t), math.sin(t)
        off = (1.0 + 1j) * c * s
        return np.array(
            [[c * c - 1j * s * s, off], [off, s * s - 1j * c * c]], dtype=complex
        )


def jones_to_cvec(jones: JonesVector, frame: HelicityFrame) -> CVec3:
    """Polarization vector jx * e_xp + jy * e_yp in lab components."""
    if not jones.is_unit():
        raise PolarizationError("Jones vector must be normalized")
    return jones.jx * frame.e_xp + jones.jy * frame.e_yp


def cvec_to_jones(eps: CVec3, frame: HelicityFrame) -> JonesVector:
    """Project a transverse unit polarization onto the linear helicity basis."""
    if not eps.is_unit(tol=TRANSVERSE_TOL):
        raise PolarizationError("polarization must be a unit vector")
    if abs(bilinear_dot(eps, frame.e_zero)) > TRANSVERSE_TOL:
        raise PolarizationError("polarization is not transverse to the beam")
    return JonesVector(bilinear_dot(eps, frame.e_xp), bilinear_dot(eps, frame.e_yp))


def apply_waveplate(jones: JonesVector, plate: WavePlate) -> JonesVector:
    j = plate.matrix() @ np.array([jones.jx, jones.jy])
    return JonesVector(complex(j[0]), complex(j[1]))


def beta_vector(k_dir: SphDirection, eps: CVec3) -> CVec3:
    """Magnetic-field polarization k x eps for a transverse unit eps."""
    k = k_hat(k_dir)
    if not eps.is_unit(tol=TRANSVERSE_TOL):
        raise PolarizationError("polarization must be a unit vector")
    if abs(bilinear_dot(eps, k)) > TRANSVERSE_TOL:
        raise PolarizationError("polarization is not transverse to k")
    return cross(k, eps)


_NAMED_LAB = {
    "x": CVec3(1.0, 0.0, 0.0),
    "y": CVec3(0.0, 1.0, 0.0),
    "z": CVec3(0.0, 0.0, 1.0),
}


def named_polarization(name: str, k_dir: SphDirection) -> CVec3:
    """Resolve a named polarization state for a given propagation direction.

    Supported: lcp, rcp, theta (or theta_hat), phi (or phi_hat), and the lab
    axes x, y, z.  Lab-axis names raise when not transverse to k.
    """
    frame = helicity_frame(k_dir)
    key = name.strip().lower().removesuffix("_hat")
    if key == "lcp":
        return jones_to_cvec(JONES_LCP, frame)
    if key == "rcp":
        return jones_to_cvec(JONES_RCP, frame)
    if key == "theta":
        return frame.e_xp
    if key == "phi":
        return frame.e_yp
    if key in _NAMED_LAB:
        eps = _NAMED_LAB[key]
        if abs(bilinear_dot(eps, frame.e_zero)) > TRANSVERSE_TOL:
            raise PolarizationError(
                f"'{name}' polarization is not transverse to k at {k_dir}"
            )
        return eps
    raise PolarizationError(f"unknown polarization name {name!r}")


def phase_aligned(jones: JonesVector) -> JonesVector:
    """Fix the global phase so the largest component is real positive.

    Convenience for comparing states defined only up to a global phase.
    """
    a, b = jones.jx, jones.jy
    ref = a if abs(a) >= abs(b) else b
    if abs(ref) == 0.0:
        return jones
    ph = cmath.exp(-1j * cmath.phase(ref))
    return JonesVector(a * ph, b * ph)
