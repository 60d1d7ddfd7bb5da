"""The volume engine: per-crossing volumes, diagram volume, Dehn-filling assembly.

The volume of a crossing of sign eps is

    -i eps [ L(zeta_N) - L(zeta_W) + L(zeta_S) - L(zeta_E) ]

with L the lifted dilogarithm; at a pinched crossing the tetrahedra
degenerate and the volume is the polynomial limit of the same expression.
Summing over crossings gives the diagram volume, a class in C / 2 pi^2 i Z
depending only on the induced log-decoration.  Dehn-filled components add
the complex volume of the filling solid torus, 4 pi^2 i t(m) t(l).

The solid-torus (and hence kink) closed forms carry an overall sign that
the source material states inconsistently; here it is fixed to +1, the
choice under which the whole pipeline reproduces the lens-space values
4 pi^2 i n^2 r / p with q r = -1 mod p.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .diagram import Diagram
from .dilog import ModValue, imag_class, lifted_L, mod_reduce
from .errors import (
    FillingIncompatible,
    IncompatibleTarget,
    MissingTarget,
    NotParabolic,
    PinchedCrossing,
)
from .flatten import (
    Flattening,
    LogDecoration,
    _crossing_data,
    adjust_to_decoration,
    crossing_zetas,
    induced_decoration,
)
from .shapes import Shaping, is_pinched, longitude_eigenvalue
from .surgery import bezout

TWO_PI_SQ_I = 2j * math.pi ** 2
FOUR_PI_SQ_I = 4j * math.pi ** 2

# Global sign of the solid-torus / kink closed forms; see module docstring.
SOLID_TORUS_SIGN = +1

# Pinch detection for volume evaluation, with a conditioning guard band.
PINCH_TOL = 1e-8
PINCH_WARN = 1e-5


@dataclass
class VolumeReport:
    total: ModValue
    per_crossing: list            # (crossing index, ModValue, pinched)
    decoration: LogDecoration
    warnings: list = field(default_factory=list)
    solid_torus_terms: list = field(default_factory=list)

    @property
    def real(self) -> float:
        return self.total.value.real

    @property
    def cs(self) -> float:
        return mod_reduce(self.total).value.imag


def _pinch_distance(shaping: Shaping, ci: int) -> float:
    rec = shaping.diagram.crossings[ci]
    return abs(shaping.shapes[rec.out2].b / shaping.shapes[rec.in1].b - 1)


def pinched_crossing_volume(diagram: Diagram, shaping: Shaping, flat: Flattening,
                            ci: int) -> complex:
    """Closed-form volume of a pinched crossing (unreduced complex value)."""
    rec, b1, b2, b1p, b2p, m1, m2, gn, gw, gs, ge = _crossing_data(
        diagram, shaping, flat, ci)
    eps = rec.sign
    bracket = (
        b1 * (gw - gn) - b1p * (gs - ge)
        + b2 * (gs - gw) - b2p * (ge - gn)
        - m1 * (eps * (b1 - b1p + m2) + gs - gw)
        - m2 * (eps * (b2p - b2 + m1) + ge - gs)
    )
    return TWO_PI_SQ_I * bracket


def generic_crossing_volume(diagram: Diagram, shaping: Shaping, flat: Flattening,
                            ci: int, kappa_offset: int = 0) -> complex:
    """Dilogarithm volume of a non-pinched crossing (unreduced complex value).

    ``kappa_offset`` adds an integer to kappa; the result never depends on
    it, which the tests check exactly.
    """
    tets = crossing_zetas(diagram, shaping, flat, ci)
    eps = diagram.crossings[ci].sign
    shift = 2j * math.pi * kappa_offset
    total = 0j
    for tet, orientation in zip(tets, (+1, -1, +1, -1)):
        total += orientation * lifted_L(tet.zeta0, tet.zeta1 + shift).value
    return -1j * eps * total


def crossing_volume(diagram: Diagram, shaping: Shaping, flat: Flattening,
                    ci: int, warnings=None) -> tuple:
    """Volume of one crossing as (ModValue, pinched flag)."""
    dist = _pinch_distance(shaping, ci)
    if dist < PINCH_TOL:
        is_pinched(diagram, shaping, ci, PINCH_TOL)  # raises if inconsistent
        return imag_class(pinched_crossing_volume(diagram, shaping, flat, ci)), True
    if dist < PINCH_WARN and warnings is not None:
        warnings.append(
            f"crossing {ci} is within {dist:.2e} of a pinch; the lifted "
            "dilogarithm is poorly conditioned there")
    return imag_class(generic_crossing_volume(diagram, shaping, flat, ci)), False


def diagram_volume(diagram: Diagram, shaping: Shaping, flat: Flattening) -> VolumeReport:
    """Sum of the crossing volumes, as a class in C / 2 pi^2 i Z.

    The total is accumulated unreduced and reduced once; per-crossing values
    are reduced for display only.
    """
    warnings = []
    per = []
    total = 0j
    for ci in range(len(diagram.crossings)):
        value, pinched = crossing_volume(diagram, shaping, flat, ci, warnings)
        total += value.value
        per.append((ci, mod_reduce(value), pinched))
    decoration = induced_decoration(diagram, shaping, flat)
    return VolumeReport(mod_reduce(imag_class(total)), per, decoration, warnings)


def decoration_shift(value: ModValue, old: LogDecoration, new: LogDecoration) -> ModValue:
    """Predicted volume at ``new`` given the volume at ``old``.

    Adds 4 pi^2 i sum_j (dlambda_j mu_j - dmu_j lambda_j); the decorations
    must differ by integers componentwise.
    """
    if len(old) != len(new):
        raise IncompatibleTarget("decorations have different component counts")
    shift = 0j
    for j in range(len(old)):
        dmu = new.mu(j) - old.mu(j)
        dlam = new.lam(j) - old.lam(j)
        for name, d in (("mu", dmu), ("lambda", dlam)):
            if abs(d - round(d.real)) > 1e-7:
                raise IncompatibleTarget(
                    f"component {j}: {name} offset {d!r} is not an integer")
        shift += round(dlam.real) * old.mu(j) - round(dmu.real) * old.lam(j)
    return mod_reduce(imag_class(value.value + FOUR_PI_SQ_I * shift))


def solid_torus_volume(t_mu: complex, t_lam: complex) -> ModValue:
    """Complex volume of a solid torus with log-decoration values (t(m), t(l))."""
    return mod_reduce(imag_class(SOLID_TORUS_SIGN * FOUR_PI_SQ_I * t_mu * t_lam))


def manifold_volume(diagram: Diagram, shaping: Shaping, flat: Flattening,
                    boundary_targets=None, tol: float = 1e-6) -> VolumeReport:
    """Complex volume of the manifold presented by the labeled diagram.

    Rational components must satisfy m^p ell^q = 1 and contribute the
    solid-torus term with t(m^W) = p mu + q lambda, t(l^W) = r mu + s lambda
    for (r, s) = bezout(p, q); cusp components must be parabolic (m = +-1);
    boundary components are adjusted to hit ``boundary_targets`` when given.
    """
    targets = dict(boundary_targets or {})
    boundary = [k for k, lab in enumerate(diagram.labels) if lab.kind == "boundary"]
    if targets:
        missing = [k for k in boundary if k not in targets]
        if missing:
            raise MissingTarget(f"no log-decoration target for components {missing}")
        extra = [k for k in targets if k not in boundary]
        if extra:
            raise IncompatibleTarget(
                f"targets given for non-boundary components {extra}")
        current = induced_decoration(diagram, shaping, flat)
        wanted = LogDecoration(tuple(
            targets.get(k, current.pairs[k]) for k in range(len(diagram.components))
        ))
        flat = adjust_to_decoration(diagram, shaping, flat, wanted)

    for k, lab in enumerate(diagram.labels):
        if lab.kind == "rational":
            m = shaping.meridian(k)
            ell = longitude_eigenvalue(diagram, shaping, k)
            holonomy = m ** lab.p * ell ** lab.q
            if abs(holonomy - 1) > tol:
                raise FillingIncompatible(
                    f"component {k}: m^{lab.p} ell^{lab.q} = {holonomy!r} != 1")
        elif lab.kind == "cusp":
            m = shaping.meridian(k)
            if min(abs(m - 1), abs(m + 1)) > tol:
                raise NotParabolic(f"component {k}: meridian eigenvalue {m!r}")

    report = diagram_volume(diagram, shaping, flat)
    decoration = report.decoration
    total = report.total.value
    terms = []
    for k, lab in enumerate(diagram.labels):
        if lab.kind != "rational":
            continue
        mu, lam = decoration.pairs[k]
        t_mu = lab.p * mu + lab.q * lam
        if abs(t_mu - round(t_mu.real)) > 1e-6:
            raise FillingIncompatible(
                f"component {k}: p mu + q lambda = {t_mu!r} is not an integer; "
                "the flattening is incompatible with the filling")
        r, s = bezout(lab.p, lab.q)
        t_lam = r * mu + s * lam
        term = solid_torus_volume(t_mu, t_lam)
        terms.append((k, term))
        total += term.value
    return VolumeReport(mod_reduce(imag_class(total)), report.per_crossing,
                        decoration, report.warnings, terms)


def octahedral_export(diagram: Diagram, shaping: Shaping, flat: Flattening) -> list:
    """All flattened tetrahedra, one NWSE quadruple per crossing.

    The Neumann sum -i sum_j sign_j L(zeta_j) over this list reproduces
    diagram_volume exactly (same summands).  Pinched crossings have no
    nondegenerate tetrahedra and raise.
    """
    out = []
    for ci in range(len(diagram.crossings)):
        if is_pinched(diagram, shaping, ci):
            raise PinchedCrossing(f"crossing {ci} is pinched")
        out.append((ci, crossing_zetas(diagram, shaping, flat, ci)))
    return out


def neumann_sum(tetrahedra) -> ModValue:
    """-i sum of sign * lifted_L over flattened tetrahedra."""
    total = 0j
    for tet in tetrahedra:
        total += tet.sign * lifted_L(tet.zeta0, tet.zeta1).value
    return mod_reduce(imag_class(-1j * total))
