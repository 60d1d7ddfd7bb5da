"""Numerical kernel: dilogarithms, the lifted dilogarithm, and modular values.

All logarithms are principal: branch cut along (-inf, 0], arguments in
(-pi, pi].  Values on the cut are normalized so that a negative real
number has argument +pi even when it carries a -0.0 imaginary part.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import DegenerateShape, ModulusMismatch

PI = math.pi
PI_SQ_OVER_6 = math.pi ** 2 / 6
TWO_PI_SQ = 2 * math.pi ** 2


def principal_log(z: complex) -> complex:
    """Principal logarithm with arguments in (-pi, pi].

    Negative reals with a -0.0 imaginary part are pushed onto the +pi side
    of the cut, so the value agrees with the limit from the upper half plane.
    """
    z = complex(z)
    if z == 0:
        raise DegenerateShape("log of 0")
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.log(z)


def _bernoulli_over_factorial(count: int) -> list[float]:
    # b[k] = B_k / (k+1)!, with B_1 = -1/2.
    bern = [Fraction(1)]
    for m in range(1, count):
        acc = Fraction(0)
        comb = 1
        for j in range(m):
            acc += comb * bern[j]
            comb = comb * (m + 1 - j) // (j + 1)
        bern.append(-acc / (m + 1))
    out = []
    fact = 1
    for k in range(count):
        fact *= k + 1
        out.append(float(bern[k] / fact))
    return out

_XI_COEFFS = _bernoulli_over_factorial(96)


def _li2_series(z: complex) -> complex:
    # Maclaurin series, intended for |z| <= 1/2.
    total = 0j
    term = z
    k = 1
    while True:
        total += term / (k * k)
        k += 1
        term *= z
        if abs(term) < 1e-18 * (1 + abs(total)) * k * k:
            return total
        if k > 200:
            return total


def _li2_log_series(z: complex) -> complex:
    # Expansion in xi = -log(1-z); converges for |xi| < 2 pi.
    xi = -principal_log(1 - z)
    total = 0j
    power = xi
    for coeff in _XI_COEFFS:
        term = coeff * power
        total += term
        power *= xi
        if abs(power) * 1e-2 < 1e-18 * (1 + abs(total)):
            break
    return total


def dilog(z: complex) -> complex:
    """Principal branch of Li_2, cut along [1, inf), continuous from below."""
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI_SQ_OVER_6, 0.0)
    if abs(z) > 1.4:
        lz = principal_log(-z)
        return -dilog(1 / z) - PI_SQ_OVER_6 - 0.5 * lz * lz
    if abs(z) <= 0.5:
        return _li2_series(z)
    if abs(1 - z) <= 0.5:
        return PI_SQ_OVER_6 - principal_log(z) * principal_log(1 - z) - _li2_series(1 - z)
    if z.real > 0.5:
        return PI_SQ_OVER_6 - principal_log(z) * principal_log(1 - z) - dilog(1 - z)
    return _li2_log_series(z)


def rogers(z: complex) -> complex:
    """Rogers dilogarithm R(z) = Li_2(z) + log(z) log(1-z) / 2."""
    z = complex(z)
    if z == 0 or z == 1:
        raise DegenerateShape(f"Rogers dilogarithm undefined at {z}")
    return dilog(z) + 0.5 * principal_log(z) * principal_log(1 - z)


class ModDirection(Enum):
    """Which coordinate of a complex value is defined modulo 2 pi^2."""

    REAL2PISQ = "real"   # class in C / 2 pi^2 Z       (lifted dilogarithm values)
    IMAG2PISQ = "imag"   # class in C / 2 pi^2 i Z     (complex volumes)


@dataclass(frozen=True)
class ModValue:
    """A complex number with one coordinate defined modulo 2 pi^2."""

    value: complex
    direction: ModDirection

    def reduced(self) -> "ModValue":
        return mod_reduce(self)

    def conjugate(self) -> "ModValue":
        # conj is well defined on both quotients: conj(v + 2 pi^2 k) and
        # conj(v + 2 pi^2 i k) differ from conj(v) by lattice elements.
        return ModValue(self.value.conjugate(), self.direction)

    def __add__(self, other: "ModValue") -> "ModValue":
        _check_direction(self, other)
        return ModValue(self.value + other.value, self.direction)

    def __neg__(self) -> "ModValue":
        return ModValue(-self.value, self.direction)

    def __sub__(self, other: "ModValue") -> "ModValue":
        _check_direction(self, other)
        return ModValue(self.value - other.value, self.direction)


def _check_direction(u: ModValue, v: ModValue) -> None:
    if u.direction is not v.direction:
        raise ModulusMismatch(f"{u.direction} vs {v.direction}")


def real_class(value: complex) -> ModValue:
    return ModValue(complex(value), ModDirection.REAL2PISQ)


def imag_class(value: complex) -> ModValue:
    return ModValue(complex(value), ModDirection.IMAG2PISQ)


def mod_reduce(v: ModValue) -> ModValue:
    """Canonical representative with the wrapped coordinate in [0, 2 pi^2)."""
    if v.direction is ModDirection.REAL2PISQ:
        return ModValue(complex(v.value.real % TWO_PI_SQ, v.value.imag), v.direction)
    return ModValue(complex(v.value.real, v.value.imag % TWO_PI_SQ), v.direction)


def mod_distance(u: ModValue, v: ModValue) -> float:
    """Distance between classes, minimized over the period lattice."""
    _check_direction(u, v)
    d = u.value - v.value
    if u.direction is ModDirection.REAL2PISQ:
        wrapped = complex(_wrap_half(d.real), d.imag)
    else:
        wrapped = complex(d.real, _wrap_half(d.imag))
    return abs(wrapped)


def _wrap_half(x: float) -> float:
    # Reduce to [-pi^2, pi^2).
    return (x + TWO_PI_SQ / 2) % TWO_PI_SQ - TWO_PI_SQ / 2


def lifted_L(zeta0: complex, zeta1: complex) -> ModValue:
    """Lifted dilogarithm on flattening logs (zeta0, zeta1), mod 2 pi^2.

    Evaluates R(exp(zeta0)) - pi^2/6 + (zeta0 log(1-z) + zeta1 log z)/2 with
    z = exp(zeta0) and principal logs.  The branch integers of the flattening
    are carried implicitly by the 2 pi i parts of the arguments.
    """
    z = cmath.exp(zeta0)
    if z == 0 or abs(z - 1) == 0:
        raise DegenerateShape("flattened argument exponentiates to 0 or 1")
    correction = 0.5 * (zeta0 * principal_log(1 - z) + zeta1 * principal_log(z))
    return real_class(rogers(z) - PI_SQ_OVER_6 + correction)


def lifted_L_pq(z: complex, p0: int, p1: int) -> ModValue:
    """Lifted dilogarithm in (z; p0, p1) coordinates on the Z^2-cover."""
    z = complex(z)
    if z == 0 or z == 1:
        raise DegenerateShape(f"lifted dilogarithm undefined at {z}")
    correction = 1j * PI * (p0 * principal_log(1 - z) + p1 * principal_log(z))
    return real_class(rogers(z) - PI_SQ_OVER_6 + correction)
