"""Transverse vector spherical harmonics.

Two families are provided: the lambda = +1 harmonics, which give the
far-field polarization pattern of a rank-K multipole, and their quadrature
partners lambda = 0.  Both are built from the +-1 rows of the rotation
matrix, so the construction is exact at the poles where gradient-based
definitions are singular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .angular import SphDirection, sph_harm_array, wigner_d_pm1_array
from .frames import CVec3

__all__ = [
    "VshValue",
    "vsh_plus1",
    "vsh_zero",
    "vsh_magnitude_W",
    "vsh_grid",
    "vsh_plus1_array",
    "vsh_zero_array",
    "vsh_magnitude_W_array",
]

_SPLIT_TOL = 1e-15


@dataclass(frozen=True)
class VshValue:
    """A vector harmonic split into value, squared magnitude and direction.

    ``direction`` is the zero vector where the magnitude vanishes (the split
    is undefined there and must not produce NaN).
    """

    value: CVec3
    magnitude_sq: float
    direction: CVec3


def _frame_vectors_array(theta, phi):
    """theta-hat, phi-hat and the circular pair as (..., 3) arrays."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast_shapes(theta.shape, phi.shape)
    st, ct = np.broadcast_to(np.sin(theta), shape), np.broadcast_to(np.cos(theta), shape)
    sp, cp = np.broadcast_to(np.sin(phi), shape), np.broadcast_to(np.cos(phi), shape)
    th = np.stack([ct * cp, ct * sp, -st], axis=-1).astype(complex)
    ph = np.stack([-sp, cp, np.zeros(shape)], axis=-1).astype(complex)
    e_plus = -(th + 1j * ph) / math.sqrt(2.0)
    e_minus = (th - 1j * ph) / math.sqrt(2.0)
    return th, ph, e_plus, e_minus


def vsh_plus1_array(K: int, p: int, theta, phi) -> np.ndarray:
    """lambda = +1 harmonic as (..., 3) Cartesian components."""
    _, _, e_plus, e_minus = _frame_vectors_array(theta, phi)
    d_minus = wigner_d_pm1_array(K, -1, -p, theta, phi)
    d_plus = wigner_d_pm1_array(K, +1, -p, theta, phi)
    c = math.sqrt((2 * K + 1) / (8.0 * math.pi))
    return c * (d_minus[..., None] * e_plus + d_plus[..., None] * e_minus)


def vsh_zero_array(K: int, p: int, theta, phi) -> np.ndarray:
    """lambda = 0 harmonic, equal to -i k x (lambda = +1 harmonic)."""
    _, _, e_plus, e_minus = _frame_vectors_array(theta, phi)
    d_minus = wigner_d_pm1_array(K, -1, -p, theta, phi)
    d_plus = wigner_d_pm1_array(K, +1, -p, theta, phi)
    c = math.sqrt((2 * K + 1) / (8.0 * math.pi))
    return c * (-d_minus[..., None] * e_plus + d_plus[..., None] * e_minus)


def vsh_magnitude_W_array(K: int, p: int, theta) -> np.ndarray:
    """Squared magnitude W_{K,|p|}(theta), the emitted-power distribution.

    Independent of phi, the sign of p, and the lambda type.
    """
    theta = np.asarray(theta, dtype=float)
    y_m = np.abs(sph_harm_array(K, p - 1, theta, 0.0)) ** 2
    y_0 = np.abs(sph_harm_array(K, p, theta, 0.0)) ** 2
    y_p = np.abs(sph_harm_array(K, p + 1, theta, 0.0)) ** 2
    w = (
        (K + p) * (K - p + 1) * y_m
        + 2.0 * p * p * y_0
        + (K - p) * (K + p + 1) * y_p
    ) / (2.0 * K * (K + 1))
    return w


def _check_kp(K: int, p: int):
    if K < 1:
        raise ValueError("K must be >= 1")
    if abs(p) > K:
        raise ValueError("|p| must not exceed K")


def _split(value_arr: np.ndarray, w: float) -> VshValue:
    value = CVec3.from_array(value_arr)
    if w <= _SPLIT_TOL:
        return VshValue(value=value, magnitude_sq=w, direction=CVec3(0.0, 0.0, 0.0))
    return VshValue(value=value, magnitude_sq=w, direction=value * (1.0 / math.sqrt(w)))


def vsh_plus1(K: int, p: int, direction: SphDirection) -> VshValue:
    """lambda = +1 vector spherical harmonic at a single direction."""
    _check_kp(K, p)
    arr = vsh_plus1_array(K, p, direction.theta, direction.phi)
    w = float(vsh_magnitude_W_array(K, p, direction.theta))
    return _split(arr, w)


def vsh_zero(K: int, p: int, direction: SphDirection) -> VshValue:
    """lambda = 0 vector spherical harmonic at a single direction."""
    _check_kp(K, p)
    arr = vsh_zero_array(K, p, direction.theta, direction.phi)
    w = float(vsh_magnitude_W_array(K, p, direction.theta))
    return _split(arr, w)


def vsh_magnitude_W(K: int, p: int, theta: float) -> float:
    _check_kp(K, p)
    return float(vsh_magnitude_W_array(K, p, theta))


def vsh_grid(
    K: int,
    p: int,
    lambda_type: int,
    n_theta: int,
    n_phi: int,
) -> list[tuple[SphDirection, CVec3, float]]:
    """Sample a harmonic on a regular grid over [0, pi] x [0, 2pi).

    Rows are emitted in row-major order (theta outer, phi inner) with
    deterministic ordering; theta includes both poles, phi excludes 2pi.
    """
    _check_kp(K, p)
    if lambda_type not in (0, 1):
        raise ValueError("lambda_type must be 0 or +1")
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid needs at least 2 points per axis")

    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    fn = vsh_plus1_array if lambda_type == 1 else vsh_zero_array
    values = fn(K, p, tg, pg)
    ws = np.broadcast_to(vsh_magnitude_W_array(K, p, tg), tg.shape)

    records: list[tuple[SphDirection, CVec3, float]] = []
    for i in range(n_theta):
        for j in range(n_phi):
            direction = SphDirection(float(tg[i, j]), float(pg[i, j]))
            records.append((direction, CVec3.from_array(values[i, j]), float(ws[i, j])))
    return records
