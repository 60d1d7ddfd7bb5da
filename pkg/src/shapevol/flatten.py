"""Flattenings: coherent logarithm choices lifting a shaping.

A flattening picks mu with e^{2 pi i mu} = m per component, beta with
e^{2 pi i beta} = b per segment, and a region log-parameter gamma per
region.  Across an oriented segment with a-variable a the two adjacent
regions satisfy e^{2 pi i (gamma_right - gamma_left)} = a, sides taken
relative to the segment's direction of travel.  At each crossing these
data produce the log-parameters of the four tetrahedra of the octahedral
decomposition; kappa is always the principal logarithm of
K = e^{2 pi i gamma_N} / (1 - (b_2'/b_1)^eps), which never affects the
volume.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

from .diagram import Diagram, segment_eta, writhe
from .dilog import principal_log
from .errors import (
    IncompatibleTarget,
    InconsistentRegionHolonomy,
    LongitudeMismatch,
    ParseError,
    PinchedCrossing,
)
from .shapes import Shaping, is_pinched, longitude_eigenvalue

TWO_PI_I = 2j * math.pi


def log2pii(z: complex) -> complex:
    """Principal logarithm scaled by 2 pi i, so exp(2 pi i result) = z."""
    return principal_log(z) / TWO_PI_I


@dataclass(frozen=True, eq=False)
class Flattening:
    """mu per component, beta per segment, gamma per region."""

    mu: tuple
    beta: tuple
    gamma: tuple

    def shift(self, mu=None, beta=None, gamma=None) -> "Flattening":
        """Return a copy with integer (or general) shifts added."""
        new_mu = list(self.mu)
        new_beta = list(self.beta)
        new_gamma = list(self.gamma)
        for k, v in (mu or {}).items():
            new_mu[k] += v
        for k, v in (beta or {}).items():
            new_beta[k] += v
        for k, v in (gamma or {}).items():
            new_gamma[k] += v
        return Flattening(tuple(new_mu), tuple(new_beta), tuple(new_gamma))


@dataclass(frozen=True)
class LogDecoration:
    """Values (s(m_j), s(l_j)) of the boundary class on each torus."""

    pairs: tuple

    def mu(self, j: int) -> complex:
        return self.pairs[j][0]

    def lam(self, j: int) -> complex:
        return self.pairs[j][1]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class FlattenedTetrahedron:
    label: str       # "n", "w", "s", "e"
    sign: int        # orientation relative to the ambient manifold
    zeta0: complex
    zeta1: complex
    shape: complex   # the z^0 shape parameter


def _near_int(x: complex, tol: float = 1e-7):
    n = round(x.real)
    if abs(x - n) < tol:
        return n
    return None


def default_flattening(diagram: Diagram, shaping: Shaping,
                       tol: float = 1e-6) -> Flattening:
    """Principal-log flattening: mu, beta principal; gamma by breadth-first
    traversal of the region adjacency from a base face with gamma = 0.

    Raises InconsistentRegionHolonomy when the multiplicative product of
    a-variables around some region is not 1, which signals an invalid
    shaping rather than a bad log choice.
    """
    mu = tuple(log2pii(shaping.meridian(k)) for k in range(len(diagram.components)))
    beta = tuple(log2pii(shaping.shapes[s].b) for s in range(diagram.n_segments))

    # Region-dual adjacency: crossing segment s from its left face to its
    # right face adds log(a_s) / 2 pi i.
    n_regions = diagram.n_regions
    adj = [[] for _ in range(n_regions)]
    for s in range(diagram.n_segments):
        step = log2pii(shaping.shapes[s].a)
        adj[diagram.left_region[s]].append((diagram.right_region[s], step, s))
        adj[diagram.right_region[s]].append((diagram.left_region[s], -step, s))

    gamma = [None] * n_regions
    order = sorted(range(n_regions),
                   key=lambda f: (-len(diagram.faces[f]), f))
    for root in order:
        if gamma[root] is not None:
            continue
        gamma[root] = 0j
        queue = [root]
        while queue:
            here = queue.pop(0)
            for other, step, s in adj[here]:
                cand = gamma[here] + step
                if gamma[other] is None:
                    gamma[other] = cand
                    queue.append(other)
                elif _near_int(gamma[other] - cand, tol) is None:
                    raise InconsistentRegionHolonomy(
                        f"a-holonomy around a region through segment {s} "
                        f"is off by {gamma[other] - cand!r}")
    return Flattening(mu, beta, tuple(gamma))


@dataclass
class FlatteningReport:
    beta_residuals: list
    mu_residuals: list
    region_residuals: list
    zeta1_residuals: list
    tol: float

    @property
    def max_residual(self) -> float:
        pool = (self.beta_residuals + self.mu_residuals
                + self.region_residuals + self.zeta1_residuals)
        return max(pool) if pool else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def validate_flattening(diagram: Diagram, shaping: Shaping, flat: Flattening,
                        tol: float = 1e-8) -> FlatteningReport:
    """Check all exp-compatibility conditions of the flattening.

    At non-pinched crossings this includes exp(sign zeta^1) = z^1 for all
    four tetrahedra, which pins the region conventions.
    """
    beta_res = [
        abs(cmath.exp(TWO_PI_I * flat.beta[s]) - shaping.shapes[s].b)
        / max(1.0, abs(shaping.shapes[s].b))
        for s in range(diagram.n_segments)
    ]
    mu_res = [
        abs(cmath.exp(TWO_PI_I * flat.mu[k]) - shaping.meridian(k))
        for k in range(len(diagram.components))
    ]
    region_res = []
    for s in range(diagram.n_segments):
        dgamma = flat.gamma[diagram.right_region[s]] - flat.gamma[diagram.left_region[s]]
        a = shaping.shapes[s].a
        region_res.append(abs(cmath.exp(TWO_PI_I * dgamma) - a) / max(1.0, abs(a)))
    zeta1_res = []
    for ci in range(len(diagram.crossings)):
        if is_pinched(diagram, shaping, ci):
            continue
        for tet in crossing_zetas(diagram, shaping, flat, ci):
            z0 = tet.shape
            if tet.sign == +1:
                z1 = 1 / (1 - z0)
            else:
                z1 = 1 - 1 / z0
            zeta1_res.append(abs(cmath.exp(tet.sign * tet.zeta1) - z1) / max(1.0, abs(z1)))
            zeta1_res.append(abs(cmath.exp(tet.sign * tet.zeta0) - z0) / max(1.0, abs(z0)))
    return FlatteningReport(beta_res, mu_res, region_res, zeta1_res, tol)


def _crossing_data(diagram: Diagram, shaping: Shaping, flat: Flattening, ci: int):
    rec = diagram.crossings[ci]
    b1 = flat.beta[rec.in1]
    b2 = flat.beta[rec.in2]
    b1p = flat.beta[rec.out1]
    b2p = flat.beta[rec.out2]
    m1 = flat.mu[diagram.component_of[rec.in1]]
    m2 = flat.mu[diagram.component_of[rec.in2]]
    rn, rw, rs, re = diagram.crossing_regions[ci]
    g = flat.gamma
    return rec, b1, b2, b1p, b2p, m1, m2, g[rn], g[rw], g[rs], g[re]


def crossing_zetas(diagram: Diagram, shaping: Shaping, flat: Flattening,
                   ci: int) -> tuple:
    """The four flattened tetrahedra at a non-pinched crossing, in NWSE order."""
    if is_pinched(diagram, shaping, ci):
        raise PinchedCrossing(f"crossing {ci} is pinched; kappa is undefined")
    rec, b1, b2, b1p, b2p, m1, m2, gn, gw, gs, ge = _crossing_data(diagram, shaping, flat, ci)
    eps = rec.sign
    chi1 = shaping.shapes[rec.in1]
    chi2 = shaping.shapes[rec.in2]
    chi1p = shaping.shapes[rec.out1]
    chi2p = shaping.shapes[rec.out2]
    ratio = (chi2p.b / chi1.b) ** eps
    kappa = log2pii(cmath.exp(TWO_PI_I * gn) / (1 - ratio))
    zN0 = TWO_PI_I * eps * (b2p - b1)
    zN1 = TWO_PI_I * (kappa - gn)
    zW0 = TWO_PI_I * eps * (b2 - b1 - m1)
    zW1 = TWO_PI_I * (kappa - gw + eps * m1)
    zS0 = TWO_PI_I * eps * (b2 - b1p + m2 - m1)
    zS1 = TWO_PI_I * (kappa - gs + eps * (m1 - m2))
    zE0 = TWO_PI_I * eps * (b2p - b1p + m2)
    zE1 = TWO_PI_I * (kappa - ge - eps * m2)
    return (
        FlattenedTetrahedron("n", eps, zN0, zN1, chi2p.b / chi1.b),
        FlattenedTetrahedron("w", -eps, zW0, zW1, chi1.m * chi1.b / chi2.b),
        FlattenedTetrahedron("s", eps, zS0, zS1, chi2.m * chi2.b / (chi1.m * chi1p.b)),
        FlattenedTetrahedron("e", -eps, zE0, zE1, chi1p.b / (chi2.m * chi2p.b)),
    )


def induced_decoration(diagram: Diagram, shaping: Shaping, flat: Flattening,
                       check: bool = True, tol: float = 1e-7) -> LogDecoration:
    """Log-decoration induced by the flattening: (mu_j, -w_j mu_j + sum eta_k beta_k)."""
    pairs = []
    for k, cyc in enumerate(diagram.components):
        lam = -writhe(diagram, k) * flat.mu[k]
        for s in cyc:
            lam += segment_eta(diagram, s) * flat.beta[s]
        if check:
            want = longitude_eigenvalue(diagram, shaping, k)
            got = cmath.exp(TWO_PI_I * lam)
            if abs(got - want) > tol * max(1.0, abs(want)):
                raise LongitudeMismatch(
                    f"component {k}: exp(2 pi i lambda) = {got!r} but the "
                    f"longitude eigenvalue is {want!r}")
        pairs.append((flat.mu[k], lam))
    return LogDecoration(tuple(pairs))


def adjust_to_decoration(diagram: Diagram, shaping: Shaping, flat: Flattening,
                         target: LogDecoration, tol: float = 1e-7) -> Flattening:
    """Integer-shift the flattening so it induces ``target`` exactly.

    mu is shifted first (it feeds the induced longitude through the writhe),
    then one beta per component with eta != 0 absorbs the remaining integer.
    """
    current = induced_decoration(diagram, shaping, flat)
    result = flat
    for k in range(len(diagram.components)):
        dmu = _near_int(target.mu(k) - current.mu(k), tol)
        if dmu is None:
            raise IncompatibleTarget(
                f"component {k}: mu offset {target.mu(k) - current.mu(k)!r} "
                "is not an integer")
        if dmu:
            result = result.shift(mu={k: dmu})
    current = induced_decoration(diagram, shaping, result)
    for k, cyc in enumerate(diagram.components):
        dlam = _near_int(target.lam(k) - current.lam(k), tol)
        if dlam is None:
            raise IncompatibleTarget(
                f"component {k}: lambda offset {target.lam(k) - current.lam(k)!r} "
                "is not an integer")
        if not dlam:
            continue
        carrier = next((s for s in sorted(cyc) if segment_eta(diagram, s) != 0), None)
        if carrier is None:
            raise IncompatibleTarget(
                f"component {k} has no over-under segments; its longitude "
                "log cannot be shifted")
        result = result.shift(beta={carrier: segment_eta(diagram, carrier) * dlam})
    return result


# ---------------------------------------------------------------------------
# Orientation transforms


def _match_regions(old: Diagram, new: Diagram, left_goes_to_left) -> list:
    """Map new region ids to old region ids through shared segments.

    ``left_goes_to_left(s)`` says whether segment s keeps its left face
    (True) or swaps sides (False) under the transform.
    """
    mapping = [None] * new.n_regions
    for s in range(old.n_segments):
        if left_goes_to_left(s):
            pairs = ((new.left_region[s], old.left_region[s]),
                     (new.right_region[s], old.right_region[s]))
        else:
            pairs = ((new.left_region[s], old.right_region[s]),
                     (new.right_region[s], old.left_region[s]))
        for nr, orr in pairs:
            if mapping[nr] is None:
                mapping[nr] = orr
            elif mapping[nr] != orr:
                raise InconsistentRegionHolonomy(
                    "region correspondence is not well defined; "
                    "transform does not preserve the faces")
    return mapping


def mirror_flattened(shaping: Shaping, flat: Flattening):
    """Shaping and flattening of the mirror diagram.

    Shapes invert, mu -> -mu, beta -> beta + mu, gamma -> -gamma on the
    corresponding regions.  Returns (mirror shaping, mirror flattening).
    """
    from .shapes import mirror_shaping

    old = shaping.diagram
    new_shaping = mirror_shaping(shaping)
    new = new_shaping.diagram
    mu = tuple(-m for m in flat.mu)
    beta = tuple(flat.beta[s] + flat.mu[old.component_of[s]]
                 for s in range(old.n_segments))
    # Reflection and full reversal each swap the sides; together they cancel.
    mapping = _match_regions(old, new, lambda s: True)
    gamma = tuple(-flat.gamma[mapping[r]] for r in range(new.n_regions))
    return new_shaping, Flattening(mu, beta, gamma)


def reverse_flattened(shaping: Shaping, flat: Flattening, component):
    """Shaping and flattening after reversing one component.

    The reversed component's shapes invert, its mu flips sign and its betas
    gain the old mu; region log-parameters are carried across unchanged.
    """
    from .shapes import reverse_shaping

    old = shaping.diagram
    k = old.component_index(component)
    new_shaping = reverse_shaping(shaping, k)
    new = new_shaping.diagram
    mu = tuple(-m if j == k else m for j, m in enumerate(flat.mu))
    beta = tuple(
        flat.beta[s] + flat.mu[k] if old.component_of[s] == k else flat.beta[s]
        for s in range(old.n_segments)
    )
    mapping = _match_regions(old, new, lambda s: old.component_of[s] != k)
    gamma = tuple(flat.gamma[mapping[r]] for r in range(new.n_regions))
    return new_shaping, Flattening(mu, beta, gamma)


# ---------------------------------------------------------------------------
# JSON format


def _c2pair(z: complex):
    return [z.real, z.imag]


def flattening_to_json(flat: Flattening) -> dict:
    return {
        "format": 1,
        "mu": {str(k): _c2pair(v) for k, v in enumerate(flat.mu)},
        "beta": {str(k): _c2pair(v) for k, v in enumerate(flat.beta)},
        "gamma": {str(k): _c2pair(v) for k, v in enumerate(flat.gamma)},
    }


def flattening_from_json(diagram: Diagram, data) -> Flattening:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        mu = tuple(complex(*data["mu"][str(k)]) for k in range(len(diagram.components)))
        beta = tuple(complex(*data["beta"][str(s)]) for s in range(diagram.n_segments))
        gamma = tuple(complex(*data["gamma"][str(r)]) for r in range(diagram.n_regions))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed flattening JSON: {exc}") from exc
    return Flattening(mu, beta, gamma)


def decoration_to_json(dec: LogDecoration) -> dict:
    return {
        "format": 1,
        "components": [
            {"mu": _c2pair(mu), "lambda": _c2pair(lam)} for (mu, lam) in dec.pairs
        ],
    }


def decoration_from_json(data) -> LogDecoration:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        pairs = tuple(
            (complex(*entry["mu"]), complex(*entry["lambda"]))
            for entry in data["components"]
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed log-decoration JSON: {exc}") from exc
    return LogDecoration(pairs)
