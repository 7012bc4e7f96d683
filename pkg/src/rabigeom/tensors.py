"""Irreducible spherical tensor products and the transverse-harmonic
contraction identity.

This module is a correctness harness: the production coupling path never
goes through nested tensor products, but the identity connecting the
stretched product T^(K)[Y_(K-1)(k), eps] to the dot product eps . Y^(+1)_(K)(k)
is the mathematical core of the whole construction and deserves an
executable check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import SphDirection, double_factorial, sph_harm_array, wigner3j
from .frames import CVec3, bilinear_dot, k_hat, spherical_components
from .vsh import vsh_plus1_array

__all__ = [
    "SphTensor",
    "vector_tensor",
    "scalar_tensor",
    "tensor_product",
    "nested_stretched",
    "solid_harmonic_tensor",
    "identity_prefactor",
    "verify_polarization_identity",
]


@dataclass(frozen=True)
class SphTensor:
    """Rank-K irreducible tensor; components indexed p = -K..K."""

    rank: int
    components: tuple[complex, ...]

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be >= 0")
        if len(self.components) != 2 * self.rank + 1:
            raise ValueError("component count must be 2K+1")

    def component(self, p: int) -> complex:
        if abs(p) > self.rank:
            raise ValueError("|p| must not exceed the rank")
        return self.components[p + self.rank]

    def as_array(self) -> np.ndarray:
        return np.array(self.components, dtype=complex)


def scalar_tensor(value: complex = 1.0) -> SphTensor:
    return SphTensor(0, (complex(value),))


def vector_tensor(v: CVec3) -> SphTensor:
    """Rank-1 tensor whose components are the spherical components of v."""
    a_plus, a_zero, a_minus = spherical_components(v)
    return SphTensor(1, (a_minus, a_zero, a_plus))


def tensor_product(K: int, a: SphTensor, b: SphTensor) -> SphTensor:
    """Rank-K irreducible product of two tensors.

    Component p is (-1)^(ka-kb+p) sqrt(2K+1) sum over (ma, mb) of the
    3j-coupled products.
    """
    ka, kb = a.rank, b.rank
    if not (abs(ka - kb) <= K <= ka + kb):
        raise ValueError(f"rank {K} outside the triangle of ranks {ka} and {kb}")
    comps = []
    root = math.sqrt(2 * K + 1)
    for p in range(-K, K + 1):
        total = 0.0 + 0.0j
        for ma in range(-ka, ka + 1):
            mb = p - ma
            if abs(mb) > kb:
                continue
            w = wigner3j(ka, kb, K, ma, mb, -p)
            if w.sign == 0:
                continue
            total += float(w) * a.component(ma) * b.component(mb)
        phase = -1.0 if (ka - kb + p) % 2 else 1.0
        comps.append(phase * root * total)
    return SphTensor(K, tuple(comps))


def nested_stretched(K: int, a: CVec3) -> SphTensor:
    """K-fold stretched product T^(K)[a, ..., a] by recursion; K = 0 gives 1."""
    if K < 0:
        raise ValueError("K must be >= 0")
    result = scalar_tensor(1.0)
    if K == 0:
        return result
    va = vector_tensor(a)
    for rank in range(1, K + 1):
        result = tensor_product(rank, result, va)
    return result


def solid_harmonic_tensor(K: int, a: CVec3) -> SphTensor:
    """sqrt(K! 4pi / (2K+1)!!) |a|^K Y_(K)(a-hat), defined for real a.

    Closed form a stretched product must equal; restricted to real vectors,
    where the direction of a is well defined.
    """
    arr = a.as_array()
    if np.max(np.abs(arr.imag)) > 1e-14:
        raise ValueError("closed form requires a real vector")
    direction = SphDirection.from_vector(arr.real[0], arr.real[1], arr.real[2])
    scale = math.sqrt(math.factorial(K) * 4.0 * math.pi / double_factorial(2 * K + 1))
    scale *= a.norm**K
    comps = tuple(
        scale * complex(sph_harm_array(K, p, direction.theta, direction.phi))
        for p in range(-K, K + 1)
    )
    return SphTensor(K, comps)


def identity_prefactor(K: int) -> float:
    """sqrt((K-1)! (K+1) 4pi / (2K+1)!!), the contraction-identity factor."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return math.sqrt(
        math.factorial(K - 1) * (K + 1) * 4.0 * math.pi / double_factorial(2 * K + 1)
    )


def verify_polarization_identity(K: int, k_dir: SphDirection, eps: CVec3) -> float:
    """Componentwise residual of the contraction identity at rank K.

    Left side: T^(K)[T^(K-1)[k, ..., k], eps].  Right side: the identity
    prefactor times (eps . Y^(+1)_{K,p}(k)) for each p.  Returns the maximum
    absolute difference over p.
    """
    k_vec = k_hat(k_dir)
    if not eps.is_unit(tol=1e-10):
        raise ValueError("eps must be a unit vector")
    if abs(bilinear_dot(eps, k_vec)) > 1e-10:
        raise ValueError("eps must be transverse to k")

    lhs = tensor_product(K, nested_stretched(K - 1, k_vec), vector_tensor(eps))
    pref = identity_prefactor(K)
    eps_arr = eps.as_array()
    residual = 0.0
    for p in range(-K, K + 1):
        y = vsh_plus1_array(K, p, k_dir.theta, k_dir.phi)
        rhs = pref * complex(np.sum(eps_arr * y))
        residual = max(residual, abs(lhs.component(p) - rhs))
    return residual
