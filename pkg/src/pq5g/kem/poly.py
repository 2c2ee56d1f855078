"""Polynomial ring Z_q[X]/(X^256 + 1) helpers over the selected kernel backend."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from ..errors import ParameterError
from ._backend import kernels
from .params import N, Q

COMPRESS_WIDTHS = (1, 4, 5, 10, 11, 12)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != N:
            raise ParameterError(f"polynomial needs {N} coefficients, got {len(self.coeffs)}")
        if any(not 0 <= c < Q for c in self.coeffs):
            raise ParameterError("polynomial coefficients must be reduced mod q")

    @classmethod
    def from_list(cls, values) -> "Polynomial":
        return cls(tuple(int(v) % Q for v in values))

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls((0,) * N)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(kernels.poly_add(list(self.coeffs), list(other.coeffs))))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(kernels.poly_sub(list(self.coeffs), list(other.coeffs))))


def ntt(p: Polynomial) -> Polynomial:
    return Polynomial(tuple(kernels.ntt(list(p.coeffs))))


def inv_ntt(p: Polynomial) -> Polynomial:
    return Polynomial(tuple(kernels.inv_ntt(list(p.coeffs))))


def multiply_ntts(a: Polynomial, b: Polynomial) -> Polynomial:
    """Pointwise product of two NTT-domain polynomials."""
    return Polynomial(tuple(kernels.multiply_ntts(list(a.coeffs), list(b.coeffs))))


def _check_width(d: int) -> None:
    if d not in COMPRESS_WIDTHS:
        raise ParameterError(f"compression width must be one of {COMPRESS_WIDTHS}, got {d}")


def _round_half_up(x: Fraction) -> int:
    return floor(x + Fraction(1, 2))


def compress(d: int, x: int) -> int:
    _check_width(d)
    if not 0 <= x < Q:
        raise ParameterError(f"coefficient {x} outside [0, {Q})")
    return _round_half_up(Fraction(2**d * x, Q)) % 2**d


def decompress(d: int, y: int) -> int:
    _check_width(d)
    if not 0 <= y < 2**d:
        raise ParameterError(f"value {y} outside [0, 2^{d})")
    return _round_half_up(Fraction(Q * y, 2**d))


def sample_cbd(eta: int, prf_stream: bytes) -> Polynomial:
    if eta not in (2, 3):
        raise ParameterError(f"CBD width must be 2 or 3, got {eta}")
    if len(prf_stream) != 64 * eta:
        raise ParameterError(f"CBD stream must be {64 * eta} bytes, got {len(prf_stream)}")
    return Polynomial(tuple(kernels.sample_cbd(eta, bytes(prf_stream))))
