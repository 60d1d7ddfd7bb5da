"""Shape triples, the braiding at crossings, and shaping validation.

A shape chi = (a, b, m) is a triple of nonzero complex numbers attached to
a diagram segment.  At a positive crossing the incoming shapes determine
the outgoing ones through the braiding B(chi_1, chi_2) = (chi_2', chi_1');
negative crossings use the inverse map.  A shaping of a diagram assigns
shapes to all segments so that these relations hold at every crossing.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass

from .diagram import Diagram, mirror_diagram, reverse_component, segment_eta, writhe
from .errors import DegenerateBraiding, DegenerateShape, InconsistentPinch, ParseError

_HUGE = 1e130
_TINY = 1e-130


@dataclass(frozen=True)
class Shape:
    a: complex
    b: complex
    m: complex

    def inverse(self) -> "Shape":
        return Shape(1 / self.a, self.b * self.m, 1 / self.m)

    def close_to(self, other: "Shape", tol: float) -> bool:
        return shape_distance(self, other) < tol


def shape_distance(x: Shape, y: Shape) -> float:
    return max(abs(x.a - y.a), abs(x.b - y.b), abs(x.m - y.m))


def inverse_shape(chi: Shape) -> Shape:
    """Shape of the same segment traversed backwards: (1/a, b m, 1/m)."""
    return chi.inverse()


def _check_value(z: complex, what: str) -> complex:
    if not (cmath.isfinite(z)) or abs(z) > _HUGE or abs(z) < _TINY:
        raise DegenerateBraiding(f"{what} is zero or infinite: {z!r}")
    return z


def _check_shape(chi: Shape, what: str) -> Shape:
    _check_value(chi.a, f"{what}.a")
    _check_value(chi.b, f"{what}.b")
    _check_value(chi.m, f"{what}.m")
    return chi


def braid_pos(chi1: Shape, chi2: Shape) -> tuple:
    """Braiding at a positive crossing: B(chi_1, chi_2) = (chi_2', chi_1')."""
    _check_shape(chi1, "chi1"), _check_shape(chi2, "chi2")
    a1, b1, m1 = chi1.a, chi1.b, chi1.m
    a2, b2, m2 = chi2.a, chi2.b, chi2.m
    A = 1 - (m1 * b1 / b2) * (1 - a1 / m1) * (1 - 1 / (m2 * a2))
    _check_value(A, "A")
    u = 1 - b2 / (m1 * b1)
    d1 = 1 - m2 * a2 * u
    _check_value(d1, "1 - m2 a2 (1 - b2/(m1 b1))")
    chi2p = Shape(a2 * A, b1 * (1 - (m1 / a1) * u), m2)
    chi1p = Shape(a1 / A, (m2 * b2 / m1) / d1, m1)
    return _check_shape(chi2p, "chi2'"), _check_shape(chi1p, "chi1'")


def braid_neg(chi1: Shape, chi2: Shape) -> tuple:
    """Inverse braiding, used at negative crossings."""
    _check_shape(chi1, "chi1"), _check_shape(chi2, "chi2")
    a1, b1, m1 = chi1.a, chi1.b, chi1.m
    a2, b2, m2 = chi2.a, chi2.b, chi2.m
    At = 1 - (b2 / (m1 * b1)) * (1 - m1 * a1) * (1 - m2 / a2)
    _check_value(At, "A~")
    v = 1 - m1 * b1 / b2
    d2 = 1 - v / (m1 * a1)
    _check_value(d2, "1 - (1 - m1 b1/b2)/(m1 a1)")
    chi2p = Shape(a2 * At, b1 / d2, m2)
    chi1p = Shape(a1 / At, (m2 * b2 / m1) * (1 - (a2 / m2) * v), m1)
    return _check_shape(chi2p, "chi2'"), _check_shape(chi1p, "chi1'")


def braid(sign: int, chi1: Shape, chi2: Shape) -> tuple:
    return braid_pos(chi1, chi2) if sign == +1 else braid_neg(chi1, chi2)


def kink_partner(chi: Shape) -> Shape:
    """Loop shape of a kink whose through-strand carries ``chi``.

    At a kink the through-strand enters as strand 1 and leaves as strand 2',
    the loop runs from 1' back to 2, and the braiding fixed point forces the
    loop shape (a', m b, m) with a' = m + 1/m - 1/a.  The same formula works
    for both kink signs.
    """
    a, b, m = chi.a, chi.b, chi.m
    return _check_shape(Shape(m + 1 / m - 1 / a, m * b, m), "kink loop shape")


@dataclass(frozen=True, eq=False)
class Shaping:
    """Shapes for every segment of a diagram."""

    diagram: Diagram
    shapes: tuple

    def shape(self, segment: int) -> Shape:
        return self.shapes[self.diagram.check_segment(segment)]

    def meridian(self, component) -> complex:
        k = self.diagram.component_index(component)
        return self.shapes[self.diagram.components[k][0]].m

    def crossing_shapes(self, ci: int) -> tuple:
        rec = self.diagram.crossings[ci]
        return (self.shapes[rec.in1], self.shapes[rec.in2],
                self.shapes[rec.out1], self.shapes[rec.out2])


def trivial_shaping(diagram: Diagram) -> Shaping:
    one = Shape(1, 1, 1)
    return Shaping(diagram, tuple(one for _ in range(diagram.n_segments)))


def braid_shaping(word, strands: int, start_shapes, labels=None,
                  tol: float = 1e-9) -> Shaping:
    """Propagate shapes through a braid word and close up.

    ``start_shapes`` gives the shape of each strand at the left edge of the
    braid.  Kink letters compute their loop shape from the through-strand.
    Raises DegenerateBraiding if the propagated shapes do not match up under
    the closure, so this builds exact shapings for words that are shaped RII
    pairs, kinks, Yang-Baxter triangles, and similar.
    """
    from .diagram import braid_closure

    diagram, trace = braid_closure(word, strands, labels=labels, return_trace=True)
    shapes = {}
    current = list(trace["initial"])
    cur_shape = [Shape(complex(c.a), complex(c.b), complex(c.m)) for c in start_shapes]
    for seg, chi in zip(current, cur_shape):
        shapes[seg] = chi
    for letter, rec in zip(word, trace["crossings"]):
        if letter[0] == "kink":
            pos = letter[1] - 1
            chi = cur_shape[pos]
            loop = kink_partner(chi)
            shapes[rec["in2"]] = loop
            shapes[rec["out1"]] = loop
            shapes[rec["out2"]] = chi
            current[pos] = rec["out2"]
        else:
            pos = letter[0] - 1
            chi1, chi2 = cur_shape[pos], cur_shape[pos + 1]
            chi2p, chi1p = braid(rec["sign"], chi1, chi2)
            shapes[rec["out1"]] = chi1p
            shapes[rec["out2"]] = chi2p
            current[pos], current[pos + 1] = rec["out2"], rec["out1"]
            cur_shape[pos], cur_shape[pos + 1] = chi2p, chi1p
    result = Shaping(diagram, tuple(shapes[s] for s in range(diagram.n_segments)))
    report = validate_shaping(diagram, result, tol)
    if not report.passed:
        raise DegenerateBraiding(
            f"braid shaping does not close up; residual {report.max_residual:.2e}")
    return result


@dataclass
class ShapingReport:
    crossing_residuals: list
    meridian_residuals: list
    tol: float

    @property
    def max_residual(self) -> float:
        pool = self.crossing_residuals + self.meridian_residuals
        return max(pool) if pool else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def crossing_residual(shaping: Shaping, ci: int) -> float:
    """max |computed output - assigned output| at one crossing."""
    rec = shaping.diagram.crossings[ci]
    chi1, chi2 = shaping.shapes[rec.in1], shaping.shapes[rec.in2]
    chi2p, chi1p = braid(rec.sign, chi1, chi2)
    return max(shape_distance(chi2p, shaping.shapes[rec.out2]),
               shape_distance(chi1p, shaping.shapes[rec.out1]))


def validate_shaping(diagram: Diagram, shaping: Shaping, tol: float = 1e-9) -> ShapingReport:
    """Check the braiding at each crossing and m-constancy along components."""
    crossing = [crossing_residual(shaping, ci) for ci in range(len(diagram.crossings))]
    meridian = []
    for cyc in diagram.components:
        m0 = shaping.shapes[cyc[0]].m
        meridian.append(max(abs(shaping.shapes[s].m - m0) for s in cyc))
    return ShapingReport(crossing, meridian, tol)


def is_pinched(diagram: Diagram, shaping: Shaping, ci: int, tol: float = 1e-8) -> bool:
    """True when b_2' = b_1 at crossing ci (all four pinch relations follow).

    If the first relation holds but one of the others misses by more than a
    derived tolerance the shaping itself is inconsistent and we raise.
    """
    rec = diagram.crossings[ci]
    chi1, chi2 = shaping.shapes[rec.in1], shaping.shapes[rec.in2]
    chi1p, chi2p = shaping.shapes[rec.out1], shaping.shapes[rec.out2]
    first = abs(chi2p.b / chi1.b - 1)
    if first >= tol:
        return False
    others = (
        abs(chi2.b / (chi1.m * chi1.b) - 1),
        abs(chi2.m * chi2.b / (chi1.m * chi1p.b) - 1),
        abs(chi2.m * chi2p.b / chi1p.b - 1),
    )
    derived = max(1e-8, tol ** 0.5)
    if max(others) > derived:
        raise InconsistentPinch(
            f"crossing {ci}: b2'=b1 holds ({first:.2e}) but relations "
            f"{[f'{o:.2e}' for o in others]} fail beyond {derived:.2e}"
        )
    return True


def pinched_crossings(diagram: Diagram, shaping: Shaping, tol: float = 1e-8) -> tuple:
    return tuple(is_pinched(diagram, shaping, ci, tol) for ci in range(len(diagram.crossings)))


def longitude_eigenvalue(diagram: Diagram, shaping: Shaping, component) -> complex:
    """delta(l_j) = m_j^{-w_j} prod_k b_k^{eta_k} over the component's segments."""
    k = diagram.component_index(component)
    m = shaping.meridian(k)
    value = m ** (-writhe(diagram, k))
    for s in diagram.components[k]:
        eta = segment_eta(diagram, s)
        if eta == +1:
            value *= shaping.shapes[s].b
        elif eta == -1:
            value /= shaping.shapes[s].b
    return value


def reverse_shaping(shaping: Shaping, component) -> Shaping:
    """Shaping of the diagram with one component reversed (shapes inverted)."""
    d = shaping.diagram
    k = d.component_index(component)
    new_d = reverse_component(d, k)
    shapes = [
        shaping.shapes[s].inverse() if d.component_of[s] == k else shaping.shapes[s]
        for s in range(d.n_segments)
    ]
    new = Shaping(new_d, tuple(shapes))
    report = validate_shaping(new_d, new)
    if not report.passed:
        raise DegenerateBraiding(
            f"reversed shaping fails validation at {report.max_residual:.2e}")
    return new


def mirror_shaping(shaping: Shaping) -> Shaping:
    """Shaping of the mirror diagram: every shape inverted."""
    d = shaping.diagram
    new_d = mirror_diagram(d)
    new = Shaping(new_d, tuple(chi.inverse() for chi in shaping.shapes))
    report = validate_shaping(new_d, new)
    if not report.passed:
        raise DegenerateBraiding(
            f"mirror shaping fails validation at {report.max_residual:.2e}")
    return new


# ---------------------------------------------------------------------------
# JSON format


def _c2pair(z: complex) -> list:
    return [z.real, z.imag]


def shaping_to_json(shaping: Shaping) -> dict:
    return {
        "format": 1,
        "segments": {
            str(s): {"a": _c2pair(chi.a), "b": _c2pair(chi.b), "m": _c2pair(chi.m)}
            for s, chi in enumerate(shaping.shapes)
        },
    }


def shaping_from_json(diagram: Diagram, data) -> Shaping:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        segs = data["segments"]
        shapes = []
        for s in range(diagram.n_segments):
            entry = segs[str(s)]
            shapes.append(Shape(complex(*entry["a"]), complex(*entry["b"]),
                                complex(*entry["m"])))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed shaping JSON: {exc}") from exc
    return Shaping(diagram, tuple(shapes))
