"""Volume engine: kink values, lens pipeline, invariances, mirror/reversal."""

import cmath
import math

import numpy as np
import pytest

from shapevol.diagram import disjoint_union, kink_diagram
from shapevol.dilog import imag_class, mod_distance
from shapevol.errors import FillingIncompatible, IncompatibleTarget, NotParabolic
from shapevol.flatten import (
    LogDecoration,
    adjust_to_decoration,
    default_flattening,
    induced_decoration,
    mirror_flattened,
    reverse_flattened,
    validate_flattening,
)
from shapevol.shapes import Shape, Shaping, braid_shaping, kink_partner
from shapevol.surgery import lens_oracle
from shapevol.volume import (
    crossing_volume,
    decoration_shift,
    diagram_volume,
    generic_crossing_volume,
    manifold_volume,
    neumann_sum,
    octahedral_export,
    pinched_crossing_volume,
    solid_torus_volume,
)

PI2 = math.pi ** 2


def lens_kink(p, n, label=None, sign=+1):
    omega = cmath.exp(2j * math.pi * n / p)
    through = Shape(1 / omega, 1, omega)
    d = kink_diagram(sign, label=label)
    rec = d.crossings[0]
    shapes = [None, None]
    shapes[rec.in1] = through
    shapes[rec.in2] = kink_partner(through)
    return d, Shaping(d, tuple(shapes))


def random_shape(rng, lo=0.6, hi=1.8):
    def z():
        r = 10 ** rng.uniform(math.log10(lo), math.log10(hi))
        return r * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
    return Shape(z(), z(), z())


def random_palindrome_shaping(rng, pairs=2, strands=2):
    """Valid shaping on the closure of w wbar: braid letters then their inverses."""
    word = []
    for _ in range(pairs):
        i = int(rng.integers(1, strands))
        s = int(rng.choice([-1, 1]))
        word.append((i, s))
    word = word + [(i, -s) for (i, s) in reversed(word)]
    shapes = [random_shape(rng) for _ in range(strands)]
    return braid_shaping(word, strands, shapes)


def test_trivial_shaping_crossing_is_zero():
    d, chi = lens_kink(5, 0)
    f = default_flattening(d, chi)
    value, pinched = crossing_volume(d, chi, f, 0)
    assert pinched
    assert mod_distance(value, imag_class(0)) < 1e-12


def test_kink_closed_form():
    # With the induced decoration (mu, lambda), the kink volume is
    # 4 pi^2 i mu lambda; the sign is the calibrated global convention.
    d, chi = lens_kink(7, 2)
    f = default_flattening(d, chi)
    dec = induced_decoration(d, chi, f)
    for l in (-2, 0, 1, 3):
        target = LogDecoration(((dec.mu(0), dec.lam(0) + l),))
        f2 = adjust_to_decoration(d, chi, f, target)
        rep = diagram_volume(d, chi, f2)
        want = 4j * PI2 * target.mu(0) * target.lam(0)
        assert mod_distance(rep.total, imag_class(want)) < 1e-10


def test_lens_family_values():
    # V(unknot diagram, rho_n) = 4 pi^2 i mu lambda = 4 pi^2 i n l / p classes.
    p, n = 5, 1
    d, chi = lens_kink(p, n)
    f = default_flattening(d, chi)
    dec = induced_decoration(d, chi, f)
    assert abs(dec.mu(0) - n / p) < 1e-12
    assert abs(dec.lam(0)) < 1e-12
    for l in (0, 1, 2):
        target = LogDecoration(((dec.mu(0), l),))
        f2 = adjust_to_decoration(d, chi, f, target)
        rep = diagram_volume(d, chi, f2)
        want = 4j * PI2 * n * l / p
        assert mod_distance(rep.total, imag_class(want)) < 1e-10


def test_pinched_continuity():
    # Family of RII-pair shapings approaching a pinch; the dilogarithm branch
    # converges to the polynomial branch.
    rng = np.random.default_rng(8)
    chi1 = random_shape(rng)
    m2 = 1.3 * cmath.exp(0.4j)
    a2 = 0.9 * cmath.exp(-0.7j)
    gaps = []
    for t in (1e-3, 1e-4, 1e-5, 1e-6):
        b2 = chi1.m * chi1.b * (1 + t)
        shaping = braid_shaping([(1, +1), (1, -1)], 2, [chi1, Shape(a2, b2, m2)])
        d = shaping.diagram
        f = default_flattening(d, shaping)
        gen = generic_crossing_volume(d, shaping, f, 0)
        pin = pinched_crossing_volume(d, shaping, f, 0)
        gaps.append(mod_distance(imag_class(gen), imag_class(pin)))
    assert gaps[2] < 1e-3          # parameter distance 1e-5
    assert gaps[0] > gaps[1] > gaps[2] > gaps[3]


def test_kappa_independence_exact():
    rng = np.random.default_rng(21)
    shaping = random_palindrome_shaping(rng)
    d = shaping.diagram
    f = default_flattening(d, shaping)
    for ci in range(len(d.crossings)):
        base = generic_crossing_volume(d, shaping, f, ci)
        for k in (-2, 1, 5):
            shifted = generic_crossing_volume(d, shaping, f, ci, kappa_offset=k)
            assert abs(shifted - base) < 1e-9 * max(1.0, abs(base))


def test_gamma_shift_invariance():
    rng = np.random.default_rng(33)
    for _ in range(5):
        shaping = random_palindrome_shaping(rng, pairs=int(rng.integers(1, 4)))
        d = shaping.diagram
        f = default_flattening(d, shaping)
        base = diagram_volume(d, shaping, f).total
        shifts = {r: int(rng.integers(-2, 3)) for r in range(d.n_regions)}
        f2 = f.shift(gamma=shifts)
        assert validate_flattening(d, shaping, f2).passed
        shifted = diagram_volume(d, shaping, f2).total
        assert mod_distance(base, shifted) < 1e-9


def test_beta_mu_shift_predictor():
    rng = np.random.default_rng(55)
    for _ in range(6):
        shaping = random_palindrome_shaping(rng, pairs=int(rng.integers(1, 4)))
        d = shaping.diagram
        f = default_flattening(d, shaping)
        report = diagram_volume(d, shaping, f)
        beta_shifts = {s: int(rng.integers(-2, 3)) for s in range(d.n_segments)}
        mu_shifts = {k: int(rng.integers(-2, 3)) for k in range(len(d.components))}
        f2 = f.shift(mu=mu_shifts, beta=beta_shifts)
        assert validate_flattening(d, shaping, f2).passed
        report2 = diagram_volume(d, shaping, f2)
        predicted = decoration_shift(report.total, report.decoration, report2.decoration)
        assert mod_distance(report2.total, predicted) < 1e-9


def test_decoration_shift_identity_and_integrality():
    d, chi = lens_kink(5, 1)
    f = default_flattening(d, chi)
    rep = diagram_volume(d, chi, f)
    same = decoration_shift(rep.total, rep.decoration, rep.decoration)
    assert mod_distance(same, rep.total) < 1e-14
    bad = LogDecoration(((rep.decoration.mu(0) + 0.5, rep.decoration.lam(0)),))
    with pytest.raises(IncompatibleTarget):
        decoration_shift(rep.total, rep.decoration, bad)


def test_parabolic_shift_is_trivial_class():
    # mu, lambda in Z/2: the predictor shift lies in 2 pi^2 i Z.
    dec = LogDecoration(((0.5, -1.5),))
    dec2 = LogDecoration(((0.5 + 3, -1.5 - 2),))
    base = imag_class(0.123 + 0.456j)
    shifted = decoration_shift(base, dec, dec2)
    assert mod_distance(shifted, base) < 1e-12


def test_solid_torus_values():
    assert mod_distance(solid_torus_volume(0.0, 0.7 + 0.2j), imag_class(0)) < 1e-14
    got = solid_torus_volume(2, 1 / 3)
    want = imag_class(1j * (2 / 3) * PI2)
    assert mod_distance(got, want) < 1e-12
    # integer t(m) = k gives k times the 2 pi complex-length correction
    k, lam = 3, 0.21 + 0.11j
    got = solid_torus_volume(k, lam)
    assert mod_distance(got, imag_class(4j * PI2 * k * lam)) < 1e-12


def test_manifold_volume_lens_sweep_small():
    for (p, q) in [(5, 1), (7, 3), (4, 3)]:
        for n in range(0, p // 2 + 1):
            d, chi = lens_kink(p, n, label=f"{p}/{q}")
            f = default_flattening(d, chi)
            got = manifold_volume(d, chi, f)
            assert mod_distance(got.total, lens_oracle(p, q, n)) < 1e-9


def test_manifold_volume_flattening_independence():
    # Different admissible flattenings on the filled component: same class.
    d, chi = lens_kink(5, 1, label="5/1")
    f = default_flattening(d, chi)
    base = manifold_volume(d, chi, f).total
    rng = np.random.default_rng(3)
    for _ in range(8):
        dec = induced_decoration(d, chi, f)
        target = LogDecoration(((dec.mu(0) + int(rng.integers(-2, 3)),
                                 dec.lam(0) + int(rng.integers(-2, 3))),))
        f2 = adjust_to_decoration(d, chi, f, target)
        other = manifold_volume(d, chi, f2).total
        assert mod_distance(base, other) < 1e-9


def test_manifold_volume_rejects_bad_filling():
    d, chi = lens_kink(5, 1, label="3/1")   # m^3 != 1 for m = e^{2 pi i/5}
    f = default_flattening(d, chi)
    with pytest.raises(FillingIncompatible):
        manifold_volume(d, chi, f)


def test_manifold_volume_rejects_nonparabolic_cusp():
    d, chi = lens_kink(5, 1, label="inf")
    f = default_flattening(d, chi)
    with pytest.raises(NotParabolic):
        manifold_volume(d, chi, f)


def test_cusp_component_accepted_when_parabolic():
    d, chi = lens_kink(2, 1, label="inf")   # m = -1
    f = default_flattening(d, chi)
    report = manifold_volume(d, chi, f)
    assert report.solid_torus_terms == []


def test_mirror_conjugates_volume():
    rng = np.random.default_rng(44)
    for _ in range(5):
        shaping = random_palindrome_shaping(rng, pairs=int(rng.integers(1, 4)))
        d = shaping.diagram
        f = default_flattening(d, shaping)
        base = diagram_volume(d, shaping, f).total
        mir_shaping, mir_flat = mirror_flattened(shaping, f)
        assert validate_flattening(mir_shaping.diagram, mir_shaping, mir_flat).passed
        mirrored = diagram_volume(mir_shaping.diagram, mir_shaping, mir_flat).total
        assert mod_distance(mirrored, base.conjugate()) < 1e-9


def test_reversal_preserves_crossing_volumes_exactly():
    rng = np.random.default_rng(66)
    for _ in range(5):
        shaping = random_palindrome_shaping(rng, pairs=int(rng.integers(1, 4)))
        d = shaping.diagram
        f = default_flattening(d, shaping)
        before = [crossing_volume(d, shaping, f, ci)[0] for ci in range(len(d.crossings))]
        for k in range(len(d.components)):
            rev_shaping, rev_flat = reverse_flattened(shaping, f, k)
            rd = rev_shaping.diagram
            assert validate_flattening(rd, rev_shaping, rev_flat).passed
            after = [crossing_volume(rd, rev_shaping, rev_flat, ci)[0]
                     for ci in range(len(rd.crossings))]
            for u, v in zip(before, after):
                assert mod_distance(u, v) < 1e-10


def test_disjoint_union_additive_exactly():
    rng = np.random.default_rng(77)
    s1 = random_palindrome_shaping(rng)
    s2 = random_palindrome_shaping(rng)
    d1, d2 = s1.diagram, s2.diagram
    f1 = default_flattening(d1, s1)
    f2 = default_flattening(d2, s2)
    v1 = diagram_volume(d1, s1, f1)
    v2 = diagram_volume(d2, s2, f2)

    d = disjoint_union(d1, d2)
    shapes = list(s1.shapes) + list(s2.shapes)
    chi = Shaping(d, tuple(shapes))
    f = default_flattening(d, chi)
    v = diagram_volume(d, chi, f)
    # The union's default flattening restricts to each piece's default one,
    # so per-crossing values agree exactly and the total is the exact sum.
    assert v.total.value == v1.total.value + v2.total.value


def test_octahedral_export_and_neumann_sum():
    rng = np.random.default_rng(88)
    shaping = random_palindrome_shaping(rng, pairs=2)
    d = shaping.diagram
    f = default_flattening(d, shaping)
    tets = octahedral_export(d, shaping, f)
    assert len(tets) == len(d.crossings)
    flat_list = []
    for ci, quad in tets:
        assert [t.label for t in quad] == ["n", "w", "s", "e"]
        eps = d.crossings[ci].sign
        assert [t.sign for t in quad] == [eps, -eps, eps, -eps]
        flat_list.extend(quad)
    total = neumann_sum(flat_list)
    direct = diagram_volume(d, shaping, f).total
    assert mod_distance(total, direct) < 1e-10
