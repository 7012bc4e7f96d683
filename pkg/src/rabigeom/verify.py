"""Built-in fidelity checks against published closed forms.

The reference tables here are the low-rank rotation-matrix elements, the
explicit transverse-harmonic expressions in the linear and circular helicity
bases, the magnitude/direction split, and the principal polarization states.
They are deliberately hard-coded, independently of the production formulas,
so `rabigeom verify` exercises the implementation against frozen algebra.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from .angular import SphDirection, wigner_d_pm1
from .coupling import multipole_prefactors, plane_wave_coupling
from .frames import (
    CVec3,
    bilinear_dot,
    helicity_frame,
    phi_hat,
    spherical_components,
    theta_hat,
)
from .polarization import JONES_LCP, JONES_RCP, JonesVector, cvec_to_jones, jones_to_cvec
from .tensors import verify_polarization_identity
from .vsh import vsh_plus1

__all__ = [
    "WIGNER_D_FORMS",
    "VSH_LINEAR_FORMS",
    "VSH_CIRCULAR_FORMS",
    "MAGNITUDE_FORMS",
    "DIRECTION_LINEAR_FORMS",
    "DIRECTION_CIRCULAR_FORMS",
    "POLARIZATION_ROWS",
    "sample_directions",
    "run_verification",
]

PI = math.pi


def _e(n: int, phi: float) -> complex:
    return cmath.exp(1j * n * phi)


# ---------------------------------------------------------------------------
# low-rank rotation-matrix elements D^(K)_{s,M2}(0, theta, phi)

WIGNER_D_FORMS: dict[tuple[int, int, int], Callable[[float, float], complex]] = {
    (1, -1, -1): lambda t, p: _e(1, p) * math.cos(t / 2) ** 2,
    (1, +1, -1): lambda t, p: _e(1, p) * math.sin(t / 2) ** 2,
    (1, -1, 0): lambda t, p: math.sin(t) / math.sqrt(2),
    (1, +1, 0): lambda t, p: -math.sin(t) / math.sqrt(2),
    (1, -1, +1): lambda t, p: _e(-1, p) * math.sin(t / 2) ** 2,
    (1, +1, +1): lambda t, p: _e(-1, p) * math.cos(t / 2) ** 2,
    (2, -1, -2): lambda t, p: -_e(2, p) * math.sin(t) * math.cos(t / 2) ** 2,
    (2, +1, -2): lambda t, p: -_e(2, p) * math.sin(t) * math.sin(t / 2) ** 2,
    (2, -1, -1): lambda t, p: _e(1, p) * 0.5 * (math.cos(t) + math.cos(2 * t)),
    (2, +1, -1): lambda t, p: _e(1, p) * 0.5 * (math.cos(t) - math.cos(2 * t)),
    (2, -1, 0): lambda t, p: math.sqrt(3.0 / 8.0) * math.sin(2 * t),
    (2, +1, 0): lambda t, p: -math.sqrt(3.0 / 8.0) * math.sin(2 * t),
    (2, -1, +1): lambda t, p: _e(-1, p) * 0.5 * (math.cos(t) - math.cos(2 * t)),
    (2, +1, +1): lambda t, p: _e(-1, p) * 0.5 * (math.cos(t) + math.cos(2 * t)),
    (2, -1, +2): lambda t, p: _e(-2, p) * math.sin(t) * math.sin(t / 2) ** 2,
    (2, +1, +2): lambda t, p: _e(-2, p) * math.sin(t) * math.cos(t / 2) ** 2,
    (3, -1, -3): lambda t, p: _e(3, p) * math.sqrt(15) * math.cos(t / 2) ** 4 * math.sin(t / 2) ** 2,
    (3, +1, -3): lambda t, p: _e(3, p) * math.sqrt(15) * math.sin(t / 2) ** 4 * math.cos(t / 2) ** 2,
    (3, -1, -2): lambda t, p: _e(2, p)
    * (math.sqrt(2.5) / 16)
    * (math.sin(t) - 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
    (3, +1, -2): lambda t, p: -_e(2, p)
    * (math.sqrt(2.5) / 16)
    * (math.sin(t) + 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
    (3, -1, -1): lambda t, p: _e(1, p)
    * (6 + math.cos(t) + 10 * math.cos(2 * t) + 15 * math.cos(3 * t))
    / 32,
    (3, +1, -1): lambda t, p: _e(1, p)
    * (6 - math.cos(t) + 10 * math.cos(2 * t) - 15 * math.cos(3 * t))
    / 32,
    (3, -1, 0): lambda t, p: (math.sqrt(3) / 8) * math.sin(t) * (3 + 5 * math.cos(2 * t)),
    (3, +1, 0): lambda t, p: -(math.sqrt(3) / 8) * math.sin(t) * (3 + 5 * math.cos(2 * t)),
    (3, -1, +1): lambda t, p: _e(-1, p)
    * (6 - math.cos(t) + 10 * math.cos(2 * t) - 15 * math.cos(3 * t))
    / 32,
    (3, +1, +1): lambda t, p: _e(-1, p)
    * (6 + math.cos(t) + 10 * math.cos(2 * t) + 15 * math.cos(3 * t))
    / 32,
    (3, -1, +2): lambda t, p: _e(-2, p)
    * (math.sqrt(2.5) / 16)
    * (math.sin(t) + 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
    (3, +1, +2): lambda t, p: -_e(-2, p)
    * (math.sqrt(2.5) / 16)
    * (math.sin(t) - 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
    (3, -1, +3): lambda t, p: _e(-3, p) * math.sqrt(15) * math.sin(t / 2) ** 4 * math.cos(t / 2) ** 2,
    (3, +1, +3): lambda t, p: _e(-3, p) * math.sqrt(15) * math.cos(t / 2) ** 4 * math.sin(t / 2) ** 2,
}


# ---------------------------------------------------------------------------
# explicit lambda = +1 harmonics, linear helicity basis: (f_theta, f_phi)

def _r(x: float) -> float:
    return math.sqrt(x / PI)


VSH_LINEAR_FORMS: dict[tuple[int, int], Callable[[float, float], tuple[complex, complex]]] = {
    (1, -1): lambda t, p: (
        _e(-1, p) * _r(3 / 16) * math.cos(t),
        _e(-1, p) * _r(3 / 16) * -1j,
    ),
    (1, 0): lambda t, p: (-_r(3 / 8) * math.sin(t), 0.0),
    (1, +1): lambda t, p: (
        -_e(1, p) * _r(3 / 16) * math.cos(t),
        -_e(1, p) * _r(3 / 16) * 1j,
    ),
    (2, -2): lambda t, p: (
        _e(-2, p) * _r(5 / 16) * math.sin(t) * math.cos(t),
        _e(-2, p) * _r(5 / 16) * math.sin(t) * -1j,
    ),
    (2, -1): lambda t, p: (
        _e(-1, p) * _r(5 / 16) * math.cos(2 * t),
        _e(-1, p) * _r(5 / 16) * -1j * math.cos(t),
    ),
    (2, 0): lambda t, p: (-_r(15 / 32) * math.sin(2 * t), 0.0),
    (2, +1): lambda t, p: (
        -_e(1, p) * _r(5 / 16) * math.cos(2 * t),
        -_e(1, p) * _r(5 / 16) * 1j * math.cos(t),
    ),
    (2, +2): lambda t, p: (
        _e(2, p) * _r(5 / 16) * math.sin(t) * math.cos(t),
        _e(2, p) * _r(5 / 16) * math.sin(t) * 1j,
    ),
    (3, -3): lambda t, p: (
        _e(-3, p) * _r(105 / 256) * math.sin(t) ** 2 * math.cos(t),
        _e(-3, p) * _r(105 / 256) * math.sin(t) ** 2 * -1j,
    ),
    (3, -2): lambda t, p: (
        -_e(-2, p) * _r(35 / 2048) * (math.sin(t) - 3 * math.sin(3 * t)),
        -_e(-2, p) * _r(35 / 2048) * 1j * 4 * math.sin(2 * t),
    ),
    (3, -1): lambda t, p: (
        _e(-1, p) * _r(7 / 4096) * (math.cos(t) + 15 * math.cos(3 * t)),
        _e(-1, p) * _r(7 / 4096) * -1j * (6 + 10 * math.cos(2 * t)),
    ),
    (3, 0): lambda t, p: (-_r(21 / 256) * math.sin(t) * (3 + 5 * math.cos(2 * t)), 0.0),
    (3, +1): lambda t, p: (
        -_e(1, p) * _r(7 / 4096) * (math.cos(t) + 15 * math.cos(3 * t)),
        -_e(1, p) * _r(7 / 4096) * 1j * (6 + 10 * math.cos(2 * t)),
    ),
    (3, +2): lambda t, p: (
        -_e(2, p) * _r(35 / 2048) * (math.sin(t) - 3 * math.sin(3 * t)),
        -_e(2, p) * _r(35 / 2048) * -1j * 4 * math.sin(2 * t),
    ),
    (3, +3): lambda t, p: (
        -_e(3, p) * _r(105 / 256) * math.sin(t) ** 2 * math.cos(t),
        -_e(3, p) * _r(105 / 256) * math.sin(t) ** 2 * 1j,
    ),
}


# explicit lambda = +1 harmonics, circular helicity basis: (c_plus, c_minus)

VSH_CIRCULAR_FORMS: dict[tuple[int, int], Callable[[float, float], tuple[complex, complex]]] = {
    (1, -1): lambda t, p: (
        _e(-1, p) * _r(3 / 8) * math.sin(t / 2) ** 2,
        _e(-1, p) * _r(3 / 8) * math.cos(t / 2) ** 2,
    ),
    (1, 0): lambda t, p: (_r(3 / 16) * math.sin(t), -_r(3 / 16) * math.sin(t)),
    (1, +1): lambda t, p: (
        _e(1, p) * _r(3 / 8) * math.cos(t / 2) ** 2,
        _e(1, p) * _r(3 / 8) * math.sin(t / 2) ** 2,
    ),
    (2, -2): lambda t, p: (
        _e(-2, p) * _r(5 / 8) * math.sin(t) * math.sin(t / 2) ** 2,
        _e(-2, p) * _r(5 / 8) * math.sin(t) * math.cos(t / 2) ** 2,
    ),
    (2, -1): lambda t, p: (
        _e(-1, p) * _r(5 / 32) * (math.cos(t) - math.cos(2 * t)),
        _e(-1, p) * _r(5 / 32) * (math.cos(t) + math.cos(2 * t)),
    ),
    (2, 0): lambda t, p: (
        _r(15 / 64) * math.sin(2 * t),
        -_r(15 / 64) * math.sin(2 * t),
    ),
    (2, +1): lambda t, p: (
        _e(1, p) * _r(5 / 32) * (math.cos(t) + math.cos(2 * t)),
        _e(1, p) * _r(5 / 32) * (math.cos(t) - math.cos(2 * t)),
    ),
    (2, +2): lambda t, p: (
        -_e(2, p) * _r(5 / 8) * math.sin(t) * math.cos(t / 2) ** 2,
        -_e(2, p) * _r(5 / 8) * math.sin(t) * math.sin(t / 2) ** 2,
    ),
    (3, -3): lambda t, p: (
        _e(-3, p) * _r(105 / 128) * math.sin(t) ** 2 * math.sin(t / 2) ** 2,
        _e(-3, p) * _r(105 / 128) * math.sin(t) ** 2 * math.cos(t / 2) ** 2,
    ),
    (3, -2): lambda t, p: (
        _e(-2, p) * _r(35 / 4096) * (math.sin(t) + 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
        -_e(-2, p) * _r(35 / 4096) * (math.sin(t) - 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
    ),
    (3, -1): lambda t, p: (
        _e(-1, p) * _r(7 / 8192) * (6 - math.cos(t) + 10 * math.cos(2 * t) - 15 * math.cos(3 * t)),
        _e(-1, p) * _r(7 / 8192) * (6 + math.cos(t) + 10 * math.cos(2 * t) + 15 * math.cos(3 * t)),
    ),
    (3, 0): lambda t, p: (
        _r(21 / 512) * math.sin(t) * (3 + 5 * math.cos(2 * t)),
        -_r(21 / 512) * math.sin(t) * (3 + 5 * math.cos(2 * t)),
    ),
    (3, +1): lambda t, p: (
        _e(1, p) * _r(7 / 8192) * (6 + math.cos(t) + 10 * math.cos(2 * t) + 15 * math.cos(3 * t)),
        _e(1, p) * _r(7 / 8192) * (6 - math.cos(t) + 10 * math.cos(2 * t) - 15 * math.cos(3 * t)),
    ),
    (3, +2): lambda t, p: (
        _e(2, p) * _r(35 / 4096) * (math.sin(t) - 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
        -_e(2, p) * _r(35 / 4096) * (math.sin(t) + 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
    ),
    (3, +3): lambda t, p: (
        _e(3, p) * _r(105 / 128) * math.sin(t) ** 2 * math.cos(t / 2) ** 2,
        _e(3, p) * _r(105 / 128) * math.sin(t) ** 2 * math.sin(t / 2) ** 2,
    ),
}


# ---------------------------------------------------------------------------
# magnitude / direction split: sqrt(W) plus unnormalized direction entries

MAGNITUDE_FORMS: dict[tuple[int, int], Callable[[float], float]] = {
    (1, 0): lambda t: math.sqrt(3 / (8 * PI) * math.sin(t) ** 2),
    (1, 1): lambda t: math.sqrt(3 / (16 * PI) * (1 + math.cos(t) ** 2)),
    (2, 0): lambda t: math.sqrt(15 / (8 * PI) * math.sin(t) ** 2 * math.cos(t) ** 2),
    (2, 1): lambda t: math.sqrt(
        5 / (16 * PI) * (1 - 3 * math.cos(t) ** 2 + 4 * math.cos(t) ** 4)
    ),
    (2, 2): lambda t: math.sqrt(5 / (16 * PI) * (1 - math.cos(t) ** 4)),
    (3, 0): lambda t: math.sqrt(
        21 / (64 * PI) * math.sin(t) ** 2 * (1 - 5 * math.cos(t) ** 2) ** 2
    ),
    (3, 1): lambda t: math.sqrt(
        7
        / (256 * PI)
        * (1 + 111 * math.cos(t) ** 2 - 305 * math.cos(t) ** 4 + 225 * math.cos(t) ** 6)
    ),
    (3, 2): lambda t: math.sqrt(
        35 / (128 * PI) * math.sin(t) ** 2 * (1 - 2 * math.cos(t) ** 2 + 9 * math.cos(t) ** 4)
    ),
    (3, 3): lambda t: math.sqrt(105 / (256 * PI) * math.sin(t) ** 4 * (1 + math.cos(t) ** 2)),
}

# direction entries take (theta, phi, s) with s = +1 or -1 selecting the p sign
DIRECTION_LINEAR_FORMS: dict[int | tuple[int, int], Callable] = {
    (1, 0): lambda t, p, s: (-1.0, 0.0),
    (1, 1): lambda t, p, s: (
        -s * _e(s, p) * math.cos(t),
        -s * _e(s, p) * s * 1j,
    ),
    (2, 0): lambda t, p, s: (-math.cos(t), 0.0),
    (2, 1): lambda t, p, s: (
        -s * _e(s, p) * math.cos(2 * t),
        -s * _e(s, p) * s * 1j * math.cos(t),
    ),
    (2, 2): lambda t, p, s: (
        _e(2 * s, p) * math.cos(t),
        _e(2 * s, p) * s * 1j,
    ),
    (3, 0): lambda t, p, s: (-(3 + 5 * math.cos(2 * t)), 0.0),
    (3, 1): lambda t, p, s: (
        -s * _e(s, p) * (math.cos(t) + 15 * math.cos(3 * t)),
        -s * _e(s, p) * s * 1j * (6 + 10 * math.cos(2 * t)),
    ),
    (3, 2): lambda t, p, s: (
        -_e(2 * s, p) * (math.sin(t) - 3 * math.sin(3 * t)),
        -_e(2 * s, p) * (-s) * 1j * 4 * math.sin(2 * t),
    ),
    (3, 3): lambda t, p, s: (
        -s * _e(3 * s, p) * math.cos(t),
        -s * _e(3 * s, p) * s * 1j,
    ),
}

# circular entries return coefficients on (e'_s, e'_{-s})
DIRECTION_CIRCULAR_FORMS: dict[tuple[int, int], Callable] = {
    (1, 0): lambda t, p, s: (1.0, -1.0),  # on (e'_+, e'_-)
    (1, 1): lambda t, p, s: (
        _e(s, p) * math.cos(t / 2) ** 2,
        _e(s, p) * math.sin(t / 2) ** 2,
    ),
    (2, 0): lambda t, p, s: (math.cos(t), -math.cos(t)),
    (2, 1): lambda t, p, s: (
        _e(s, p) * (math.cos(t) + math.cos(2 * t)),
        _e(s, p) * (math.cos(t) - math.cos(2 * t)),
    ),
    (2, 2): lambda t, p, s: (
        -s * _e(2 * s, p) * math.cos(t / 2) ** 2,
        -s * _e(2 * s, p) * math.sin(t / 2) ** 2,
    ),
    (3, 0): lambda t, p, s: (
        3 + 5 * math.cos(2 * t),
        -(3 + 5 * math.cos(2 * t)),
    ),
    (3, 1): lambda t, p, s: (
        _e(s, p) * (6 + math.cos(t) + 10 * math.cos(2 * t) + 15 * math.cos(3 * t)),
        _e(s, p) * (6 - math.cos(t) + 10 * math.cos(2 * t) - 15 * math.cos(3 * t)),
    ),
    (3, 2): lambda t, p, s: (
        s * _e(2 * s, p) * (math.sin(t) - 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
        -s * _e(2 * s, p) * (math.sin(t) + 4 * math.sin(2 * t) - 3 * math.sin(3 * t)),
    ),
    (3, 3): lambda t, p, s: (
        _e(3 * s, p) * math.cos(t / 2) ** 2,
        _e(3 * s, p) * math.sin(t / 2) ** 2,
    ),
}


def vsh_from_linear_form(K: int, p: int, direction: SphDirection) -> np.ndarray:
    f_th, f_ph = VSH_LINEAR_FORMS[(K, p)](direction.theta, direction.phi)
    th = theta_hat(direction).as_array()
    ph = phi_hat(direction).as_array()
    return f_th * th + f_ph * ph


def vsh_from_circular_form(K: int, p: int, direction: SphDirection) -> np.ndarray:
    c_plus, c_minus = VSH_CIRCULAR_FORMS[(K, p)](direction.theta, direction.phi)
    frame = helicity_frame(direction)
    return c_plus * frame.e_plus.as_array() + c_minus * frame.e_minus.as_array()


def vsh_from_magnitude_direction(K: int, p: int, direction: SphDirection, basis: str) -> np.ndarray:
    """Reconstruct sqrt(W) * normalized direction entry; NaN-free only where
    the direction entry is nonzero."""
    s = 1 if p >= 0 else -1
    mag = MAGNITUDE_FORMS[(K, abs(p))](direction.theta)
    if basis == "linear":
        f_th, f_ph = DIRECTION_LINEAR_FORMS[(K, abs(p))](direction.theta, direction.phi, s)
        th = theta_hat(direction).as_array()
        ph = phi_hat(direction).as_array()
        vec = f_th * th + f_ph * ph
    else:
        c_a, c_b = DIRECTION_CIRCULAR_FORMS[(K, abs(p))](direction.theta, direction.phi, s)
        frame = helicity_frame(direction)
        if s >= 0:
            vec = c_a * frame.e_plus.as_array() + c_b * frame.e_minus.as_array()
        else:
            vec = c_a * frame.e_minus.as_array() + c_b * frame.e_plus.as_array()
    norm = math.sqrt(float(np.sum(np.abs(vec) ** 2)))
    if norm == 0.0:
        return np.zeros(3, dtype=complex)
    return mag * vec / norm


# ---------------------------------------------------------------------------
# principal polarization states: (label, k_dir, jones, (eps'_plus, eps'_minus), eps_lab or None)

def _pol_rows() -> list:
    isq = 1.0 / math.sqrt(2.0)
    rows = []
    for k_dir in (SphDirection(0.0, 0.0), SphDirection(1.1, 0.7), SphDirection(2.0, 4.2)):
        rows.append(("lcp", k_dir, JONES_LCP, (0.0, 1.0), None))
        rows.append(("rcp", k_dir, JONES_RCP, (1.0, 0.0), None))
    rows.append(("sigma+ along +z", SphDirection(0.0, 0.0), JONES_LCP, (0.0, 1.0), None))
    rows.append(("sigma+ along -z", SphDirection(math.pi, 0.0), JONES_RCP, (1.0, 0.0), None))
    for phi_k in (0.0, 1.3):
        rows.append(
            (
                "transverse k, eps = z",
                SphDirection(math.pi / 2, phi_k),
                JonesVector(-1.0, 0.0),
                (isq, -isq),
                CVec3(0.0, 0.0, 1.0),
            )
        )
    for gamma in (0.4, 2.1):
        rows.append(
            (
                f"transverse k, linear at gamma={gamma}",
                SphDirection(math.pi / 2, 0.9),
                JonesVector(-math.cos(gamma), -math.sin(gamma)),
                (isq * cmath.exp(1j * gamma), -isq * cmath.exp(-1j * gamma)),
                None,
            )
        )
    rows.append(
        (
            "k = -y, eps = x",
            SphDirection(math.pi / 2, 3 * math.pi / 2),
            JonesVector(0.0, 1.0),
            (-1j * isq, -1j * isq),
            CVec3(1.0, 0.0, 0.0),
        )
    )
    rows.append(
        (
            "k = -x, eps = y",
            SphDirection(math.pi / 2, math.pi),
            JonesVector(0.0, -1.0),
            (1j * isq, 1j * isq),
            CVec3(0.0, 1.0, 0.0),
        )
    )
    for gamma in (0.0, 1.0):
        rows.append(
            (
                f"tilted k, linear at gamma={gamma}",
                SphDirection(0.7, 1.3),
                JonesVector(-math.cos(gamma), -math.sin(gamma)),
                (isq * cmath.exp(1j * gamma), -isq * cmath.exp(-1j * gamma)),
                None,
            )
        )
    rows.append(
        (
            "k = +z, eps = x",
            SphDirection(0.0, 0.0),
            JonesVector(1.0, 0.0),
            (-isq, isq),
            CVec3(1.0, 0.0, 0.0),
        )
    )
    for beta in (0.6,):
        rows.append(
            (
                f"k = +z, linear at beta={beta}",
                SphDirection(0.0, 0.0),
                JonesVector(math.cos(beta), math.sin(beta)),
                (-isq * cmath.exp(1j * beta), isq * cmath.exp(-1j * beta)),
                CVec3(math.cos(beta), math.sin(beta), 0.0),
            )
        )
    return rows


POLARIZATION_ROWS = _pol_rows()


def sample_directions(n: int = 20) -> list[SphDirection]:
    """Deterministic set of n general-position directions (away from poles)."""
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    out = []
    for i in range(n):
        theta = math.pi * (i + 0.7) / (n + 0.4)
        phi = (2.0 * math.pi * i / golden) % (2.0 * math.pi)
        out.append(SphDirection(theta, phi))
    return out


def _collinear_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    na = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    nb = math.sqrt(float(np.sum(np.abs(b) ** 2)))
    if na == 0.0 or nb == 0.0:
        return na == nb
    overlap = abs(complex(np.sum(np.conj(a) * b)))
    return abs(overlap - na * nb) <= tol and abs(na - nb) <= tol


# ---------------------------------------------------------------------------
# checks

def _check_wigner_d() -> tuple[bool, str]:
    worst = 0.0
    for (K, s, m2), form in WIGNER_D_FORMS.items():
        for d in sample_directions(20):
            got = wigner_d_pm1(K, s, m2, d.theta, d.phi)
            want = form(d.theta, d.phi)
            worst = max(worst, abs(got - want))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def _check_vsh_lists() -> tuple[bool, str]:
    worst = 0.0
    for (K, p) in VSH_LINEAR_FORMS:
        for d in sample_directions(20):
            got = vsh_plus1(K, p, d).value.as_array()
            worst = max(worst, float(np.max(np.abs(got - vsh_from_linear_form(K, p, d)))))
            worst = max(worst, float(np.max(np.abs(got - vsh_from_circular_form(K, p, d)))))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def _check_magnitude_direction() -> tuple[bool, str]:
    worst = 0.0
    for (K, pa) in MAGNITUDE_FORMS:
        signs = (1,) if pa == 0 else (1, -1)
        for s in signs:
            p = s * pa
            for d in sample_directions(20):
                if MAGNITUDE_FORMS[(K, pa)](d.theta) < 1e-6:
                    continue
                got = vsh_plus1(K, p, d).value.as_array()
                for basis in ("linear", "circular"):
                    want = vsh_from_magnitude_direction(K, p, d, basis)
                    worst = max(worst, float(np.max(np.abs(got - want))))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def _check_polarization_table() -> tuple[bool, str]:
    bad = []
    for label, k_dir, jones, circ, eps_lab in POLARIZATION_ROWS:
        frame = helicity_frame(k_dir)
        eps = jones_to_cvec(JonesVector(jones.jx, jones.jy).normalized(), frame)
        got_circ = np.array(
            [bilinear_dot(eps, frame.e_plus), bilinear_dot(eps, frame.e_minus)]
        )
        want_circ = np.array(circ, dtype=complex)
        if not _collinear_up_to_phase(got_circ, want_circ, 1e-12):
            bad.append(label + " (circular components)")
            continue
        if eps_lab is not None:
            got_jones = cvec_to_jones(eps_lab, frame)
            a = np.array([got_jones.jx, got_jones.jy])
            b = np.array([jones.jx, jones.jy], dtype=complex)
            if not _collinear_up_to_phase(a, b, 1e-12):
                bad.append(label + " (jones column)")
    return not bad, "; ".join(bad)


def _check_identity() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    worst = 0.0
    for K in range(1, 5):
        for _ in range(10):
            d = SphDirection(float(rng.uniform(0.05, math.pi - 0.05)), float(rng.uniform(0, 2 * math.pi)))
            frame = helicity_frame(d)
            a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
            eps = (a * frame.e_xp + b * frame.e_yp)
            eps = eps * (1.0 / eps.norm)
            worst = max(worst, verify_polarization_identity(K, d, eps))
    return worst <= 1e-10, f"max residual {worst:.2e}"


def _check_identity_prefactors() -> tuple[bool, str]:
    want = {
        1: math.sqrt(8 * PI / 3),
        2: math.sqrt(4 * PI / 5),
        3: math.sqrt(32 * PI / 105),
    }
    worst = 0.0
    for K, value in want.items():
        got = multipole_prefactors(K)[2]
        worst = max(worst, abs(got - value))
    return worst <= 1e-15, f"max deviation {worst:.2e}"


def _check_rank1_extraction() -> tuple[bool, str]:
    rng = np.random.default_rng(11)
    factor = math.sqrt(8 * PI / 3)
    worst = 0.0
    for _ in range(50):
        d = SphDirection(float(rng.uniform(0.02, math.pi - 0.02)), float(rng.uniform(0, 2 * math.pi)))
        frame = helicity_frame(d)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        eps = a * frame.e_xp + b * frame.e_yp
        eps = eps * (1.0 / eps.norm)
        comps = spherical_components(eps)
        for q, comp in zip((1, 0, -1), comps):
            got = factor * plane_wave_coupling(1, -q, d, eps)
            worst = max(worst, abs(got - comp))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def run_verification() -> list[tuple[str, bool, str]]:
    """Run every fidelity check; returns (name, passed, detail) triples."""
    checks = [
        ("rotation-matrix closed forms (K=1..3)", _check_wigner_d),
        ("vector-harmonic explicit forms, both bases (K=1..3)", _check_vsh_lists),
        ("magnitude/direction reconstruction", _check_magnitude_direction),
        ("principal polarization states", _check_polarization_table),
        ("tensor contraction identity (K=1..4)", _check_identity),
        ("contraction-identity prefactors", _check_identity_prefactors),
        ("rank-1 component extraction", _check_rank1_extraction),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"exception: {exc}"
        results.append((name, ok, detail))
    return results
