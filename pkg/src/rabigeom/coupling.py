"""Physical coupling strengths: multipole prefactors, Einstein-A based
reduced matrix elements, resonant Rabi frequencies (fine and hyperfine),
coherent multi-beam sums, suppression phases, selectivity, and geometry
optimization.

Sign conventions: the resonant Rabi frequency carries a user-supplied sign
``s_J_sign`` for the reduced matrix element (unknowable from the decay rate
alone) and the rank-dependent phase i^(K-1) is applied internally.  For
single-moment, single-beam work the overall phase is irrelevant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import constants
from .angular import (
    HalfInt,
    HalfIntLike,
    SphDirection,
    double_factorial,
    triangle_ok,
    wigner3j,
    wigner6j,
    SqrtRational,
)
from .frames import CVec3, bilinear_dot, helicity_frame, k_hat
from .polarization import JonesVector, PolarizationError, TRANSVERSE_TOL
from .vsh import vsh_magnitude_W_array, vsh_plus1, vsh_plus1_array

__all__ = [
    "TransitionSpec",
    "PlaneWaveDrive",
    "CouplingResult",
    "OptimizationResult",
    "multipole_prefactors",
    "reduced_matrix_element_from_A",
    "einstein_A_from_reduced",
    "plane_wave_coupling",
    "rabi_frequency",
    "rabi_frequency_hyperfine",
    "multi_beam_coupling",
    "suppression_phase",
    "selectivity",
    "optimize_geometry",
]


@dataclass(frozen=True)
class TransitionSpec:
    """One 2^K-pole transition between angular-momentum eigenstates.

    ``m_e`` and ``m_g`` are projections of J, or of F when the hyperfine
    quantum numbers (i, f_e, f_g) are given.  ``einstein_a`` is the decay
    rate of the upper level in 1/s; for hyperfine transitions it is the rate
    of the J_e -> J_g multiplet.
    """

    K: int
    character: str
    j_e: HalfInt
    j_g: HalfInt
    m_e: HalfInt
    m_g: HalfInt
    einstein_a: float
    omega: float
    s_j_sign: int = 1
    i: Optional[HalfInt] = None
    f_e: Optional[HalfInt] = None
    f_g: Optional[HalfInt] = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("multipole rank K must be >= 1")
        if self.character not in ("E", "M"):
            raise ValueError("character must be 'E' or 'M'")
        if self.s_j_sign not in (1, -1):
            raise ValueError("s_J sign must be +1 or -1")
        if self.einstein_a < 0:
            raise ValueError("Einstein A must be nonnegative")
        if not self.omega > 0:
            raise ValueError("transition frequency must be positive")
        for name in ("j_e", "j_g", "m_e", "m_g", "i", "f_e", "f_g"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, HalfInt.of(val))
        hyper = (self.i, self.f_e, self.f_g)
        if any(v is not None for v in hyper) and not all(v is not None for v in hyper):
            raise ValueError("hyperfine use requires all of i, f_e, f_g")
        if self.j_e.twice < 0 or self.j_g.twice < 0:
            raise ValueError("J must be nonnegative")
        upper, lower = self.projection_levels()
        for j, m in ((upper, self.m_e), (lower, self.m_g)):
            if abs(m.twice) > j.twice or (j.twice - m.twice) % 2 != 0:
                raise ValueError(f"projection {m} invalid for angular momentum {j}")
        if self.is_hyperfine:
            if self.i.twice < 0:
                raise ValueError("I must be nonnegative")
            if not triangle_ok(self.j_e, self.i, self.f_e):
                raise ValueError("(J_e, I, F_e) violates the triangle rule")
            if not triangle_ok(self.j_g, self.i, self.f_g):
                raise ValueError("(J_g, I, F_g) violates the triangle rule")

    @property
    def is_hyperfine(self) -> bool:
        return self.i is not None

    def projection_levels(self) -> tuple[HalfInt, HalfInt]:
        """Angular momenta that m_e and m_g are projections of."""
        if self.is_hyperfine:
            return self.f_e, self.f_g
        return self.j_e, self.j_g

    @property
    def delta_m(self) -> int:
        d = self.m_e - self.m_g
        if not d.is_integer:
            raise ValueError("m_e - m_g must be an integer")
        return d.as_int()


@dataclass(frozen=True)
class PlaneWaveDrive:
    """A single monochromatic plane wave: amplitude, direction, polarization
    and phase offset."""

    amplitude_E0: float
    k_dir: SphDirection
    eps: CVec3
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude_E0 < 0:
            raise ValueError("field amplitude must be nonnegative")
        if not self.eps.is_unit(tol=TRANSVERSE_TOL):
            raise PolarizationError("drive polarization must be a unit vector")
        if abs(bilinear_dot(self.eps, k_hat(self.k_dir))) > TRANSVERSE_TOL:
            raise PolarizationError("drive polarization must be transverse to k")


@dataclass(frozen=True)
class CouplingResult:
    geometric_amplitude: complex
    rabi: complex


def multipole_prefactors(K: int) -> tuple[float, float, float]:
    """The three closed-form rank-K coefficients.

    Returns (hamiltonian_factor, einstein_factor, identity_factor):
    the square-root factor of the interaction Hamiltonian, the rational
    factor of the spontaneous-emission rate, and the factor of the
    transverse-harmonic contraction identity.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    df_m = double_factorial(2 * K - 1)
    df_p = double_factorial(2 * K + 1)
    ham = math.sqrt(float(Fraction(4 * (K + 1), K * df_p * df_m)) * math.pi)
    einstein = float(Fraction(2 * (K + 1), K * df_m * df_p))
    ident = math.sqrt(float(Fraction(4 * math.factorial(K - 1) * (K + 1), df_p)) * math.pi)
    return ham, einstein, ident


def reduced_matrix_element_from_A(spec: TransitionSpec) -> float:
    """|reduced matrix element| / e in units of m^K, from the Einstein A.

    Inverts the spontaneous-rate formula; the sign is left to ``s_j_sign``.
    """
    if spec.einstein_a == 0.0:
        return 0.0
    c = constants.SPEED_OF_LIGHT
    alpha = constants.FINE_STRUCTURE
    K = spec.K
    rate_factor = float(
        Fraction(K * double_factorial(2 * K - 1) * double_factorial(2 * K + 1), 2 * (K + 1))
    )
    return math.sqrt(
        spec.einstein_a
        / (alpha * c)
        * (spec.j_e.twice + 1)
        * (c / spec.omega) ** (2 * K + 1)
        * rate_factor
    )


def einstein_A_from_reduced(K: int, j_e: HalfIntLike, omega: float, reduced_over_e: float) -> float:
    """Spontaneous rate from |reduced matrix element|/e; inverse companion of
    :func:`reduced_matrix_element_from_A`."""
    _, einstein_factor, _ = multipole_prefactors(K)
    c = constants.SPEED_OF_LIGHT
    tj = HalfInt.of(j_e).twice
    return (
        einstein_factor
        * (omega / c) ** (2 * K + 1)
        * constants.FINE_STRUCTURE
        * c
        * reduced_over_e**2
        / (tj + 1)
    )


def plane_wave_coupling(K: int, delta_m: int, k_dir: SphDirection, eps: CVec3) -> complex:
    """Geometric amplitude eps . Y^(+1)_{K,-delta_m}(k) for one plane wave."""
    if abs(delta_m) > K:
        raise ValueError("|delta_m| must not exceed K")
    if not eps.is_unit(tol=TRANSVERSE_TOL):
        raise PolarizationError("polarization must be a unit vector")
    if abs(bilinear_dot(eps, k_hat(k_dir))) > TRANSVERSE_TOL:
        raise PolarizationError("polarization must be transverse to k")
    return bilinear_dot(eps, vsh_plus1(K, -delta_m, k_dir).value)


def _rank_phase(K: int) -> complex:
    return 1j ** ((K - 1) % 4)


def _rabi_scale(spec: TransitionSpec) -> float:
    c = constants.SPEED_OF_LIGHT
    return (
        constants.ELEMENTARY_CHARGE
        / constants.HBAR
        * math.sqrt(
            2.0
            * math.pi
            * spec.einstein_a
            / (constants.FINE_STRUCTURE * c)
            * (spec.j_e.twice + 1)
            * (c / spec.omega) ** 3
        )
    )


def rabi_frequency(spec: TransitionSpec, geometric_amplitude: complex, amplitude_E0: float) -> complex:
    """Resonant Rabi frequency in rad/s for a fine-structure transition.

    ``geometric_amplitude`` is the plane-wave dot product or its beam
    integral; for character 'M' supply the beta-based amplitude and c*B0 as
    the field.  Forbidden projection changes give an exact 0.
    """
    if spec.is_hyperfine:
        return rabi_frequency_hyperfine(spec, geometric_amplitude, amplitude_E0)
    p = spec.m_e - spec.m_g
    w3 = wigner3j(spec.j_e, HalfInt.of(spec.K), spec.j_g, -spec.m_e, p, spec.m_g)
    if w3.sign == 0:
        return 0.0 + 0.0j
    phase = -1.0 if ((spec.j_e.twice - spec.m_g.twice) // 2) % 2 else 1.0
    s = spec.s_j_sign * _rank_phase(spec.K) * phase
    return s * _rabi_scale(spec) * amplitude_E0 * float(w3) * geometric_amplitude


def rabi_frequency_hyperfine(
    spec: TransitionSpec, geometric_amplitude: complex, amplitude_E0: float
) -> complex:
    """Resonant Rabi frequency with hyperfine structure.

    Uses the multiplet decay rate A(J_e, J_g) and reduces the F-level matrix
    element through the 6j recoupling factor.  Forbidden triads give 0.
    """
    if not spec.is_hyperfine:
        raise ValueError("transition has no hyperfine quantum numbers")
    p = spec.m_e - spec.m_g
    w3 = wigner3j(spec.f_e, HalfInt.of(spec.K), spec.f_g, -spec.m_e, p, spec.m_g)
    w6 = wigner6j(spec.j_e, spec.f_e, spec.i, spec.f_g, spec.j_g, HalfInt.of(spec.K))
    if w3.sign == 0 or w6.sign == 0:
        return 0.0 + 0.0j

    # (-1)^(F_e - M_g) and (-1)^(J_e + I + F_g + K); both exponents integer
    phase1 = -1.0 if ((spec.f_e.twice - spec.m_g.twice) // 2) % 2 else 1.0
    exp2 = (spec.j_e.twice + spec.i.twice + spec.f_g.twice) // 2 + spec.K
    phase2 = -1.0 if exp2 % 2 else 1.0
    # multiply the degeneracy root into the exact 6j radicand so the I = 0
    # collapse is exact
    recouple = SqrtRational(
        w6.sign, w6.radicand * (spec.f_g.twice + 1) * (spec.f_e.twice + 1)
    )
    s = spec.s_j_sign * _rank_phase(spec.K) * phase1 * phase2
    return s * _rabi_scale(spec) * amplitude_E0 * float(w3) * float(recouple) * geometric_amplitude


def multi_beam_coupling(
    K: int,
    delta_m: int,
    drives: Sequence[PlaneWaveDrive],
    atom_position: Sequence[float] = (0.0, 0.0, 0.0),
    k_mag: Optional[float] = None,
) -> complex:
    """Coherent geometric amplitude of several same-frequency plane waves.

    sum_i E0_i (eps_i . Y^(+1)_{K,-delta_m}(k_i)) exp(i (k_i . r + phi_i)).
    A single drive with E0 = 1, phi = 0 at the origin reduces to the
    single-wave coupling.  ``k_mag`` (rad/m) is required for a displaced
    atom.
    """
    if len(drives) == 0:
        raise ValueError("at least one drive is required")
    r = np.asarray(atom_position, dtype=float)
    if np.any(r != 0.0) and k_mag is None:
        raise ValueError("k_mag is required when the atom is displaced")
    total = 0.0 + 0.0j
    for drive in drives:
        geo = plane_wave_coupling(K, delta_m, drive.k_dir, drive.eps)
        phase = drive.phase
        if k_mag is not None:
            k_vec = k_hat(drive.k_dir).as_array().real * k_mag
            phase += float(k_vec @ r)
        total += drive.amplitude_E0 * geo * cmath.exp(1j * phase)
    return total


def suppression_phase(K: int, delta_m_kill: int, phi_k1: float, phi_k2: float) -> float:
    """Relative phase of the second beam that nulls one projection channel.

    For two in-plane beams (theta_k = pi/2) polarized along their azimuthal
    unit vectors, the coupling to Delta M = ``delta_m_kill`` vanishes at
    phi_2 = pi + delta_m_kill * (phi_k2 - phi_k1), reduced mod 2 pi.
    """
    if abs(delta_m_kill) > K:
        raise ValueError("|delta_m_kill| must not exceed K")
    return (math.pi + delta_m_kill * (phi_k2 - phi_k1)) % (2.0 * math.pi)


def selectivity(K: int, delta_m: int, k_dir: SphDirection, eps: CVec3) -> float:
    """Sum of unwanted-channel coupling magnitudes.

    Zero means the geometry drives exactly one projection channel.
    """
    if abs(delta_m) > K:
        raise ValueError("|delta_m| must not exceed K")
    total = 0.0
    for p in range(-K, K + 1):
        if p == delta_m:
            continue
        total += abs(plane_wave_coupling(K, p, k_dir, eps))
    return total


@dataclass(frozen=True)
class OptimizationResult:
    feasible: bool
    k_dir: SphDirection
    jones: JonesVector
    value: float
    selectivity: float


_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def _channel_projections(K: int, theta: float) -> np.ndarray:
    """(2K+1, 2) array of (theta-hat, phi-hat) projections of Y_{K,-p}."""
    direction = SphDirection(theta, 0.0)
    frame = helicity_frame(direction)
    ex, ey = frame.e_xp.as_array(), frame.e_yp.as_array()
    rows = []
    for p in range(-K, K + 1):
        y = vsh_plus1_array(K, -p, theta, 0.0)
        rows.append([np.sum(ex * y), np.sum(ey * y)])
    return np.array(rows, dtype=complex)


def _jones_from_params(chi: float, delta: float) -> np.ndarray:
    return np.array([math.cos(chi), math.sin(chi) * cmath.exp(1j * delta)], dtype=complex)


def _score(K: int, delta_m: int, theta: float, chi: float, delta: float, penalty: float) -> tuple[float, float, float]:
    proj = _channel_projections(K, theta)
    j = _jones_from_params(chi, delta)
    couplings = proj @ j
    want = abs(couplings[delta_m + K])
    others = float(np.sum(np.abs(couplings))) - want
    return want - penalty * others, want, others


def optimize_geometry(K: int, delta_m: int, objective: str = "max_coupling") -> OptimizationResult:
    """Search (k direction, polarization) for the best coupling geometry.

    ``max_coupling`` maximizes |eps . Y^(+1)_{K,-delta_m}|; the optimum
    polarization at fixed direction is analytic (the conjugate of the
    channel projections), so only the polar angle is scanned and refined.
    ``max_coupling_zero_selectivity`` additionally requires all other
    projection channels to vanish; a penalized grid search plus coordinate
    descent is used, and infeasibility is reported rather than raised.
    Deterministic by construction (fixed grids, no randomness).
    """
    if abs(delta_m) > K:
        raise ValueError("|delta_m| must not exceed K")
    if objective not in ("max_coupling", "max_coupling_zero_selectivity"):
        raise ValueError(f"unknown objective {objective!r}")

    thetas = np.linspace(0.0, math.pi, 181)

    if objective == "max_coupling":
        # |eps . Y| at the optimal polarization equals sqrt(W)
        w = vsh_magnitude_W_array(K, delta_m, thetas)
        theta = float(thetas[int(np.argmax(w))])
        step = float(thetas[1] - thetas[0])
        while step > 1e-10:
            for cand in (theta - step, theta + step):
                cand = min(max(cand, 0.0), math.pi)
                if vsh_magnitude_W_array(K, delta_m, cand) > vsh_magnitude_W_array(K, delta_m, theta):
                    theta = cand
            step *= 0.5
        proj = _channel_projections(K, theta)
        c = proj[delta_m + K]
        norm = math.sqrt(abs(c[0]) ** 2 + abs(c[1]) ** 2)
        if norm == 0.0:
            jones = JonesVector(1.0, 0.0)
        else:
            jones = JonesVector(*(np.conj(c) / norm))
        direction = SphDirection(theta, 0.0)
        value = abs(np.conj(c) @ c) / norm if norm else 0.0
        sel = float(np.sum(np.abs(proj @ np.array([jones.jx, jones.jy])))) - value
        return OptimizationResult(True, direction, jones, float(value), max(sel, 0.0))

    # penalized grid: 181 polar angles x 73 ellipse points (golden-angle lattice)
    penalty = 10.0
    ellipse = [
        ((j + 0.5) / 73.0 * (math.pi / 2.0), (j * 2.0 * math.pi / _GOLDEN) % (2.0 * math.pi))
        for j in range(73)
    ]
    best = None
    for theta in thetas:
        proj = _channel_projections(K, float(theta))
        for chi, delta in ellipse:
            j = _jones_from_params(chi, delta)
            couplings = proj @ j
            want = abs(couplings[delta_m + K])
            others = float(np.sum(np.abs(couplings))) - want
            score = want - penalty * others
            if best is None or score > best[0]:
                best = (score, float(theta), chi, delta)

    _, theta, chi, delta = best
    for penalty in (10.0, 1e3, 1e6, 1e9):
        steps = [0.05, 0.05, 0.1]
        while max(steps) > 1e-10:
            for idx in range(3):
                current = (theta, chi, delta)
                base_score, _, _ = _score(K, delta_m, theta, chi, delta, penalty)
                for direction_sign in (-1.0, 1.0):
                    trial = list(current)
                    trial[idx] += direction_sign * steps[idx]
                    trial[0] = min(max(trial[0], 0.0), math.pi)
                    cand_score, _, _ = _score(K, delta_m, *trial, penalty)
                    if cand_score > base_score:
                        theta, chi, delta = trial
                        base_score = cand_score
                steps[idx] *= 0.5

    _, value, others = _score(K, delta_m, theta, chi, delta, 0.0)
    feasible = others < 1e-8 and value > 1e-6
    j = _jones_from_params(chi, delta)
    return OptimizationResult(
        feasible=feasible,
        k_dir=SphDirection(theta, 0.0),
        jones=JonesVector(complex(j[0]), complex(j[1])),
        value=float(value),
        selectivity=float(others),
    )
