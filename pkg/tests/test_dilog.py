"""Kernel tests: Li2 against mpmath, Rogers values, lifted dilogarithm identities."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from shapevol.dilog import (
    ModDirection,
    PI_SQ_OVER_6,
    TWO_PI_SQ,
    dilog,
    imag_class,
    lifted_L,
    lifted_L_pq,
    mod_distance,
    mod_reduce,
    principal_log,
    real_class,
    rogers,
)
from shapevol.errors import DegenerateShape, ModulusMismatch

mpmath.mp.dps = 30


def mp_li2(z):
    v = mpmath.polylog(2, mpmath.mpc(z))
    return complex(v)


def test_dilog_trivial_values():
    assert dilog(0) == 0
    assert abs(dilog(1) - PI_SQ_OVER_6) < 1e-15


def test_dilog_half():
    expected = math.pi ** 2 / 12 - math.log(2) ** 2 / 2
    assert abs(dilog(0.5) - expected) < 1e-13
    assert abs(dilog(0.5) - mp_li2(0.5)) < 1e-14


def test_dilog_against_mpmath_grid():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(400):
        r = 10 ** rng.uniform(-2, 4)
        theta = rng.uniform(-math.pi, math.pi)
        z = r * cmath.exp(1j * theta)
        ours = dilog(z)
        ref = mp_li2(z)
        worst = max(worst, abs(ours - ref) / max(1.0, abs(ref)))
    assert worst < 1e-13


def test_dilog_on_cut_continuous_from_below():
    # mpmath's principal branch takes the same limit.
    for x in (1.5, 2.0, 17.0, 123.0):
        assert abs(dilog(x) - mp_li2(x)) < 1e-13 * abs(mp_li2(x))
        below = dilog(x - 1e-12j)
        assert abs(dilog(x) - below) < 1e-9


def test_reflection_identity_thousand_points():
    rng = np.random.default_rng(11)
    count = 0
    while count < 1000:
        z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        if abs(z) < 1e-3 or abs(z - 1) < 1e-3 or abs(z.imag) < 1e-6:
            continue
        count += 1
        lhs = dilog(z) + dilog(1 - z)
        rhs = PI_SQ_OVER_6 - principal_log(z) * principal_log(1 - z)
        assert abs(lhs - rhs) < 1e-11


def test_rogers_half():
    assert abs(rogers(0.5) - math.pi ** 2 / 12) < 1e-13


def test_rogers_hexagonal_point_matches_clausen_quadrature():
    # Independent oracle: Im R(e^{i pi/3}) = Cl_2(pi/3) = -int_0^{pi/3} log|2 sin(t/2)| dt.
    oracle = mpmath.quad(lambda t: -mpmath.log(abs(2 * mpmath.sin(t / 2))), [0, mpmath.pi / 3])
    value = rogers(cmath.exp(1j * math.pi / 3))
    assert abs(value.imag - float(oracle)) < 1e-12
    assert abs(value.imag - 1.0149416064096535) < 1e-12


def test_rogers_schwarz_reflection():
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.05, 2))
        assert abs(rogers(z.conjugate()) - rogers(z).conjugate()) < 1e-12


def test_rogers_degenerate():
    with pytest.raises(DegenerateShape):
        rogers(0)
    with pytest.raises(DegenerateShape):
        rogers(1)


def _random_admissible(rng):
    # zeta0 = log z + 2 pi i p0, zeta1 = -log(1-z) + 2 pi i p1
    z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
    if abs(z) < 0.05 or abs(z - 1) < 0.05 or abs(z.imag) < 1e-4:
        return None
    p0 = int(rng.integers(-3, 4))
    p1 = int(rng.integers(-3, 4))
    zeta0 = principal_log(z) + 2j * math.pi * p0
    zeta1 = -principal_log(1 - z) + 2j * math.pi * p1
    return z, p0, p1, zeta0, zeta1


def test_lifted_L_half_point():
    got = lifted_L(principal_log(0.5), -principal_log(0.5))
    assert mod_distance(got, real_class(-math.pi ** 2 / 12)) < 1e-13


def test_lifted_L_matches_pq_coordinates():
    rng = np.random.default_rng(23)
    done = 0
    while done < 200:
        data = _random_admissible(rng)
        if data is None:
            continue
        z, p0, p1, zeta0, zeta1 = data
        done += 1
        assert mod_distance(lifted_L(zeta0, zeta1), lifted_L_pq(z, p0, p1)) < 1e-10


def test_lifted_L_shift_identity():
    # L(zeta0 + 2 pi i k0, zeta1 + 2 pi i k1) - L(zeta0, zeta1)
    #   = pi i (k1 zeta0 - k0 zeta1)  mod 2 pi^2
    rng = np.random.default_rng(5)
    done = 0
    while done < 1000:
        data = _random_admissible(rng)
        if data is None:
            continue
        _, _, _, zeta0, zeta1 = data
        k0 = int(rng.integers(-4, 5))
        k1 = int(rng.integers(-4, 5))
        done += 1
        shifted = lifted_L(zeta0 + 2j * math.pi * k0, zeta1 + 2j * math.pi * k1)
        predicted = lifted_L(zeta0, zeta1).value + 1j * math.pi * (k1 * zeta0 - k0 * zeta1)
        assert mod_distance(shifted, real_class(predicted)) < 1e-10


def test_lifted_L_three_expressions_agree():
    rng = np.random.default_rng(41)
    done = 0
    while done < 300:
        data = _random_admissible(rng)
        if data is None:
            continue
        z, p0, p1, zeta0, zeta1 = data
        done += 1
        logz = principal_log(z)
        log1z = principal_log(1 - z)
        base = rogers(z) - PI_SQ_OVER_6
        expr1 = base + 1j * math.pi * (p1 * zeta0 - p0 * zeta1)
        expr3 = base + 0.5 * (-zeta0 * zeta1 + zeta1 * logz + 2j * math.pi * p1 * logz)
        got = lifted_L(zeta0, zeta1)
        assert mod_distance(got, real_class(expr1)) < 1e-10
        assert mod_distance(got, real_class(expr3)) < 1e-10


def test_lifted_L_pq_collapses_to_rogers():
    rng = np.random.default_rng(9)
    for _ in range(100):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.05, 3))
        got = lifted_L_pq(z, 0, 0)
        assert mod_distance(got, real_class(rogers(z) - PI_SQ_OVER_6)) < 1e-12


def _one_sided_limit(x, sign, p0, p1, delta):
    # Linear extrapolation of the vertical approach; kills the O(delta) drift
    # of the smooth part so only a genuine jump across the cut would survive.
    near = lifted_L_pq(x + sign * 1j * delta, p0, p1).value
    far = lifted_L_pq(x + sign * 2j * delta, p0, p1).value
    return real_class(2 * near - far)


def test_lifted_L_pq_cut_continuity():
    # Sheet gluing of the Z^2-cover: (x + 0i; p0, p1) ~ (x - 0i; p0+1, p1) on x < 0
    # and (x + 0i; p0, p1) ~ (x - 0i; p0, p1+1) on x > 1.
    delta = 1e-6
    for x in (-0.3, -1.5, -7.0):
        for (p0, p1) in [(0, 0), (1, -1), (-2, 3)]:
            above = _one_sided_limit(x, +1, p0, p1, delta)
            below = _one_sided_limit(x, -1, p0 + 1, p1, delta)
            assert mod_distance(above, below) < 1e-7
    for x in (1.3, 2.5, 11.0):
        for (p0, p1) in [(0, 0), (1, -1), (-2, 3)]:
            above = _one_sided_limit(x, +1, p0, p1, delta)
            below = _one_sided_limit(x, -1, p0, p1 + 1, delta)
            assert mod_distance(above, below) < 1e-7


def test_lifted_L_conjugation():
    rng = np.random.default_rng(13)
    done = 0
    while done < 200:
        data = _random_admissible(rng)
        if data is None:
            continue
        _, _, _, zeta0, zeta1 = data
        done += 1
        lhs = lifted_L(zeta0.conjugate(), zeta1.conjugate())
        rhs = lifted_L(zeta0, zeta1).conjugate()
        assert mod_distance(lhs, rhs) < 1e-10


def test_mod_reduce_and_distance():
    v = imag_class(1.5 + 1j * (TWO_PI_SQ + 0.3))
    got = mod_reduce(v)
    assert abs(got.value - (1.5 + 0.3j)) < 1e-12

    x = imag_class(0.7 + 0.2j)
    assert mod_distance(x, imag_class(x.value + 2j * math.pi ** 2 * 7)) < 1e-12
    assert abs(mod_distance(imag_class(0), imag_class(1j * math.pi ** 2)) - math.pi ** 2) < 1e-12

    r = real_class(TWO_PI_SQ * 3 + 0.25 + 1j)
    assert abs(mod_reduce(r).value - (0.25 + 1j)) < 1e-9


def test_mod_direction_mismatch():
    with pytest.raises(ModulusMismatch):
        mod_distance(real_class(1), imag_class(1))


def test_mod_value_is_not_compared_raw():
    assert mod_distance(real_class(0.0), real_class(TWO_PI_SQ)) < 1e-12
    assert real_class(0.0).direction is ModDirection.REAL2PISQ
