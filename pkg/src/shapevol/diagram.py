"""Combinatorial model of oriented link diagrams with surgery labels.

Planar conventions, frozen once and used everywhere:

* A crossing is read left to right.  Its four ports sit at compass
  positions NW, SW, SE, NE and hold, in that order, the segments
  ``in1``, ``in2``, ``out1``, ``out2``.  Strands pass ``in1 -> out1``
  (NW to SE) and ``in2 -> out2`` (SW to NE).
* At a positive crossing the ``in1 -> out1`` strand is the over-strand;
  at a negative crossing it is the under-strand.  This is the unique
  choice under which a kink satisfies chi_1 = chi_2' with the loop on
  strand 2 and the longitude eigenvalue formula calibrates.
* The regions touching a crossing are N (between out2 and in1),
  W (between in1 and in2), S (between in2 and out1) and E (between
  out1 and out2).

Faces are traced from the rotation system, so a Diagram is fully
determined by its crossing records; region ids are canonical and
reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import BadLabel, DanglingSegment, NonPlanar, UnknownComponent, UnknownSegment, ParseError

IN1, IN2, OUT1, OUT2 = "in1", "in2", "out1", "out2"
_IN_ROLES = (IN1, IN2)
_OUT_ROLES = (OUT1, OUT2)

# Clockwise port order; face tracing exits through the clockwise-next port,
# keeping the traced face on the left of the walk.
_CW_NEXT = {IN1: OUT2, OUT2: OUT1, OUT1: IN2, IN2: IN1}

# Corner crossed when arriving at a port: (arrival port) -> region letter.
_ARRIVAL_CORNER = {IN1: "n", IN2: "w", OUT1: "s", OUT2: "e"}


@dataclass(frozen=True)
class SurgeryLabel:
    """Label of a surgery-presentation component: p/q filling, cusp, or boundary."""

    kind: str  # "rational" | "cusp" | "boundary"
    p: int = 0
    q: int = 0

    @staticmethod
    def rational(p: int, q: int) -> "SurgeryLabel":
        if q == 0:
            raise BadLabel("q = 0 labels are cusps; use SurgeryLabel.cusp()")
        if q < 0:
            p, q = -p, -q
        if math.gcd(p, q) != 1:
            raise BadLabel(f"{p}/{q} is not in lowest terms")
        return SurgeryLabel("rational", p, q)

    @staticmethod
    def cusp() -> "SurgeryLabel":
        return SurgeryLabel("cusp")

    @staticmethod
    def boundary() -> "SurgeryLabel":
        return SurgeryLabel("boundary")

    @staticmethod
    def parse(text) -> "SurgeryLabel":
        if text is None:
            return SurgeryLabel.boundary()
        if isinstance(text, SurgeryLabel):
            return text
        t = str(text).strip().lower()
        if t in ("inf", "infinity", "1/0", "cusp"):
            return SurgeryLabel.cusp()
        if t in ("", "none", "boundary"):
            return SurgeryLabel.boundary()
        # Parse by hand: Fraction would silently reduce "2/4".
        num, _, den = t.partition("/")
        try:
            p = int(num)
            q = int(den) if den else 1
        except ValueError as exc:
            raise BadLabel(f"cannot parse surgery label {text!r}") from exc
        return SurgeryLabel.rational(p, q)

    def unparse(self):
        if self.kind == "rational":
            return f"{self.p}/{self.q}"
        if self.kind == "cusp":
            return "inf"
        return None


@dataclass(frozen=True)
class CrossingRecord:
    """One crossing: sign and the segment ids at its four ports."""

    sign: int
    in1: int
    in2: int
    out1: int
    out2: int

    def role(self, name: str) -> int:
        return getattr(self, name)

    def roles(self) -> dict:
        return {IN1: self.in1, IN2: self.in2, OUT1: self.out1, OUT2: self.out2}


@dataclass(frozen=True, eq=False)
class Diagram:
    """An oriented link diagram with derived components, faces and labels.

    Segments are dense integers ``0 .. n_segments - 1``; ``segment_names``
    maps them back to the ids used to build the diagram.  Components are
    oriented cycles of segments, ordered by their smallest segment.
    """

    crossings: tuple
    components: tuple
    labels: tuple
    n_segments: int
    segment_names: tuple
    faces: tuple                 # face -> tuple of (segment, forward) sides
    left_region: tuple           # segment -> region id on its left
    right_region: tuple          # segment -> region id on its right
    crossing_regions: tuple      # crossing -> (n, w, s, e) region ids
    outer_region: int
    head: tuple = field(repr=False)   # segment -> (crossing index, in-role)
    tail: tuple = field(repr=False)   # segment -> (crossing index, out-role)
    component_of: tuple = field(repr=False)

    @property
    def n_regions(self) -> int:
        return len(self.faces)

    def component_index(self, component) -> int:
        if isinstance(component, int) and 0 <= component < len(self.components):
            return component
        raise UnknownComponent(f"no component {component!r}")

    def check_segment(self, segment: int) -> int:
        if not (isinstance(segment, int) and 0 <= segment < self.n_segments):
            raise UnknownSegment(f"no segment {segment!r}")
        return segment

    def with_labels(self, labels) -> "Diagram":
        labels = _canonical_labels(labels, len(self.components))
        return Diagram(self.crossings, self.components, labels, self.n_segments,
                       self.segment_names, self.faces, self.left_region,
                       self.right_region, self.crossing_regions, self.outer_region,
                       self.head, self.tail, self.component_of)


def _canonical_labels(labels, n_components):
    if labels is None:
        return tuple(SurgeryLabel.boundary() for _ in range(n_components))
    if isinstance(labels, dict):
        out = [SurgeryLabel.boundary()] * n_components
        for key, value in labels.items():
            idx = int(str(key).removeprefix("comp"))
            if not 0 <= idx < n_components:
                raise BadLabel(f"label for nonexistent component {key!r}")
            out[idx] = SurgeryLabel.parse(value)
        return tuple(out)
    labels = [SurgeryLabel.parse(x) for x in labels]
    if len(labels) != n_components:
        raise BadLabel(f"{len(labels)} labels for {n_components} components")
    return tuple(labels)


def build_diagram(records, labels=None, regions=None) -> Diagram:
    """Assemble a Diagram from crossing records, deriving everything else.

    Raises DanglingSegment unless every segment id occurs exactly once in an
    in-role and once in an out-role, and NonPlanar if the face count fails
    the Euler check V - E + F = 1 + #(connected components of the graph).
    """
    records = list(records)
    if not records:
        raise DanglingSegment("a diagram needs at least one crossing")

    raw_in, raw_out = {}, {}
    for ci, rec in enumerate(records):
        if rec.sign not in (+1, -1):
            raise BadLabel(f"crossing {ci} has sign {rec.sign!r}")
        for role in _IN_ROLES:
            seg = rec.role(role)
            if seg in raw_in:
                raise DanglingSegment(f"segment {seg!r} enters two crossings")
            raw_in[seg] = (ci, role)
        for role in _OUT_ROLES:
            seg = rec.role(role)
            if seg in raw_out:
                raise DanglingSegment(f"segment {seg!r} leaves two crossings")
            raw_out[seg] = (ci, role)
    if set(raw_in) != set(raw_out):
        odd = set(raw_in).symmetric_difference(raw_out)
        raise DanglingSegment(f"segments with a missing endpoint: {sorted(map(str, odd))}")

    names = sorted(raw_in, key=str)
    dense = {name: k for k, name in enumerate(names)}
    nseg = len(names)

    recs = tuple(
        CrossingRecord(rec.sign, dense[rec.in1], dense[rec.in2],
                       dense[rec.out1], dense[rec.out2])
        for rec in records
    )
    head = [None] * nseg
    tail = [None] * nseg
    for ci, rec in enumerate(recs):
        head[rec.in1] = (ci, IN1)
        head[rec.in2] = (ci, IN2)
        tail[rec.out1] = (ci, OUT1)
        tail[rec.out2] = (ci, OUT2)

    components = _trace_components(recs, head, nseg)
    component_of = [None] * nseg
    for k, cyc in enumerate(components):
        for s in cyc:
            component_of[s] = k

    faces, left, right, corners = _trace_faces(recs, head, tail, nseg)

    # Faces are traced per connected piece of the 4-valent graph, so a
    # planar (spherical) embedding of each piece gives V - E + F = 2C.
    n_graph_components = _count_graph_components(recs)
    euler = len(recs) - nseg + len(faces)
    if euler != 2 * n_graph_components:
        raise NonPlanar(
            f"V - E + F = {euler}, expected {2 * n_graph_components}; "
            "records do not describe a planar diagram"
        )

    outer = max(range(len(faces)), key=lambda f: (len(faces[f]), -f))

    diagram = Diagram(
        crossings=recs,
        components=components,
        labels=_canonical_labels(labels, len(components)),
        n_segments=nseg,
        segment_names=tuple(names),
        faces=faces,
        left_region=tuple(left),
        right_region=tuple(right),
        crossing_regions=tuple(corners),
        outer_region=outer,
        head=tuple(head),
        tail=tuple(tail),
        component_of=tuple(component_of),
    )
    if regions is not None:
        _verify_regions(diagram, regions)
    return diagram


def _trace_components(recs, head, nseg):
    seen = [False] * nseg
    cycles = []
    for start in range(nseg):
        if seen[start]:
            continue
        cyc = []
        s = start
        while not seen[s]:
            seen[s] = True
            cyc.append(s)
            ci, role = head[s]
            s = recs[ci].out1 if role == IN1 else recs[ci].out2
        if s != start:
            raise DanglingSegment(f"segment {start} is not on a closed cycle")
        cycles.append(tuple(cyc))
    cycles.sort(key=lambda c: min(c))
    return tuple(tuple(c) for c in cycles)


def _trace_faces(recs, head, tail, nseg):
    # Directed sides: (segment, True) walks with the orientation and sees the
    # face on the segment's left; (segment, False) sees the right face.
    side_face = {}
    faces = []
    corner_of = {}
    for seg0 in range(nseg):
        for fwd0 in (True, False):
            if (seg0, fwd0) in side_face:
                continue
            walk = []
            seg, fwd = seg0, fwd0
            while (seg, fwd) not in side_face:
                side_face[(seg, fwd)] = -1  # placeholder, assigned below
                walk.append((seg, fwd))
                ci, port = head[seg] if fwd else tail[seg]
                corner_of[(ci, _ARRIVAL_CORNER[port])] = len(faces)
                exit_port = _CW_NEXT[port]
                nxt = recs[ci].role(exit_port)
                fwd = exit_port in _OUT_ROLES
                seg = nxt
            faces.append(tuple(walk))
            for side in walk:
                side_face[side] = len(faces) - 1

    # Canonical renumbering: sort faces by their side multisets.
    order = sorted(range(len(faces)), key=lambda f: tuple(sorted(faces[f])))
    relabel = {old: new for new, old in enumerate(order)}
    faces = tuple(faces[old] for old in order)
    left = [relabel[side_face[(s, True)]] for s in range(nseg)]
    right = [relabel[side_face[(s, False)]] for s in range(nseg)]
    corners = []
    for ci in range(len(recs)):
        corners.append(tuple(relabel[corner_of[(ci, letter)]] for letter in "nwse"))
    return faces, left, right, corners


def _count_graph_components(recs):
    parent = list(range(len(recs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_segment = {}
    for ci, rec in enumerate(recs):
        for seg in (rec.in1, rec.in2, rec.out1, rec.out2):
            if seg in by_segment:
                a, b = find(by_segment[seg]), find(ci)
                parent[a] = b
            else:
                by_segment[seg] = ci
    return len({find(ci) for ci in range(len(recs))})


def _verify_regions(diagram, regions):
    want = [tuple(r) for r in regions]
    got = [tuple(c) for c in diagram.crossing_regions]
    ok = len(want) == len(got)
    if ok:
        # Any consistent relabeling of region ids is accepted.
        mapping = {}
        for w, g in zip(want, got):
            for a, b in zip(w, g):
                if mapping.setdefault(a, b) != b:
                    ok = False
    if not ok:
        raise NonPlanar("supplied region data is inconsistent with the traced faces")


# ---------------------------------------------------------------------------
# Elementary queries


def writhe(diagram: Diagram, component) -> int:
    """Sum of the signs of the self-crossings of one component."""
    k = diagram.component_index(component)
    total = 0
    for rec in diagram.crossings:
        if diagram.component_of[rec.in1] == k and diagram.component_of[rec.in2] == k:
            total += rec.sign
    return total


def _passage_is_over(sign: int, passage: int) -> bool:
    # Passage 1 is in1 -> out1.  Frozen convention: over at positive crossings.
    return (passage == 1) == (sign == +1)


def segment_eta(diagram: Diagram, segment: int) -> int:
    """+1 for an over-under segment, -1 for under-over, 0 otherwise.

    The order is the segment's own orientation: its initial end is where it
    leaves a crossing, its terminal end where it enters one.
    """
    s = diagram.check_segment(segment)
    ci_t, out_role = diagram.tail[s]
    ci_h, in_role = diagram.head[s]
    start_over = _passage_is_over(diagram.crossings[ci_t].sign, 1 if out_role == OUT1 else 2)
    end_over = _passage_is_over(diagram.crossings[ci_h].sign, 1 if in_role == IN1 else 2)
    if start_over and not end_over:
        return +1
    if end_over and not start_over:
        return -1
    return 0


def mirror_diagram(diagram: Diagram) -> Diagram:
    """Mirror image: all crossings reversed, all components reversed.

    Combinatorially this is a reflection of the plane composed with reversal
    of every component: each crossing swaps its two inputs and its two
    outputs and flips sign.  Segment ids are unchanged.
    """
    recs = [
        CrossingRecord(-rec.sign, rec.in2, rec.in1, rec.out2, rec.out1)
        for rec in diagram.crossings
    ]
    return build_diagram(recs, [lab for lab in diagram.labels])


def reverse_component(diagram: Diagram, component) -> Diagram:
    """Reverse the orientation of one component; other components keep theirs."""
    k = diagram.component_index(component)
    on = lambda seg: diagram.component_of[seg] == k
    recs = []
    for rec in diagram.crossings:
        p1, p2 = on(rec.in1), on(rec.in2)
        if p1 and p2:
            recs.append(CrossingRecord(rec.sign, rec.out1, rec.out2, rec.in1, rec.in2))
        elif p1:
            recs.append(CrossingRecord(-rec.sign, rec.in2, rec.out1, rec.out2, rec.in1))
        elif p2:
            recs.append(CrossingRecord(-rec.sign, rec.out2, rec.in1, rec.in2, rec.out1))
        else:
            recs.append(rec)
    return build_diagram(recs, [lab for lab in diagram.labels])


# ---------------------------------------------------------------------------
# Builders


def braid_closure(word, strands: int, labels=None, return_trace: bool = False):
    """Closure of a braid word, with optional kink letters.

    ``word`` is a list of letters; each letter is either ``(i, sign)`` for the
    braid generator crossing strand positions i and i+1 (positions are
    numbered from 1 at the top), or ``("kink", i, sign)`` for a kink inserted
    on the strand at position i with the loop on strand 2 of the crossing.
    Every strand must meet at least one crossing.

    With ``return_trace`` the construction history is returned as well:
    the initial segment at every position and, per letter, the dense ids of
    the segments around its crossing.  Tests use this to propagate shapes.
    """
    current = [("s", j) for j in range(strands)]
    initial = list(current)
    fresh = [0]

    def new_seg():
        fresh[0] += 1
        return ("t", fresh[0])

    records = []
    for letter in word:
        if letter[0] == "kink":
            _, pos, sign = letter
            j = pos - 1
            if not 0 <= j < strands:
                raise BadLabel(f"kink position {pos} out of range")
            through_out = new_seg()
            loop = new_seg()
            records.append(CrossingRecord(sign, in1=current[j], in2=loop,
                                          out1=loop, out2=through_out))
            current[j] = through_out
        else:
            i, sign = letter
            j = i - 1
            if not 0 <= j < strands - 1:
                raise BadLabel(f"generator position {i} out of range")
            upper, lower = current[j], current[j + 1]
            new_lower = new_seg()
            new_upper = new_seg()
            records.append(CrossingRecord(sign, in1=upper, in2=lower,
                                          out1=new_lower, out2=new_upper))
            current[j] = new_upper
            current[j + 1] = new_lower

    # Close up: the final segment at each position is the initial one.
    alias = dict(zip(current, initial))
    for pos in range(strands):
        if current[pos] == initial[pos]:
            raise BadLabel(f"strand {pos + 1} has no crossings; closed circles "
                           "without crossings are not supported")

    def resolve(seg):
        return alias.get(seg, seg)

    records = [
        CrossingRecord(r.sign, resolve(r.in1), resolve(r.in2),
                       resolve(r.out1), resolve(r.out2))
        for r in records
    ]
    diagram = build_diagram(records, labels)
    if not return_trace:
        return diagram
    dense = {name: k for k, name in enumerate(diagram.segment_names)}
    trace = {
        "initial": [dense[resolve(s)] for s in initial],
        "crossings": [
            {"in1": r.in1, "in2": r.in2, "out1": r.out1, "out2": r.out2,
             "sign": r.sign}
            for r in diagram.crossings
        ],
    }
    return diagram, trace


def kink_diagram(sign: int = +1, label=None) -> Diagram:
    """The one-crossing unknot diagram (closure of a single kink)."""
    labels = None if label is None else [label]
    return braid_closure([("kink", 1, sign)], strands=1, labels=labels)


def figure_eight_diagram(label=None) -> Diagram:
    """The standard 4-crossing diagram of the figure-eight knot."""
    labels = None if label is None else [label]
    return braid_closure([(1, +1), (2, -1), (1, +1), (2, -1)], strands=3, labels=labels)


def disjoint_union(d1: Diagram, d2: Diagram) -> Diagram:
    """Disjoint union, with d2's segments and components renumbered after d1's."""
    recs = list(d1.crossings)
    offset = d1.n_segments
    for rec in d2.crossings:
        recs.append(CrossingRecord(rec.sign, rec.in1 + offset, rec.in2 + offset,
                                   rec.out1 + offset, rec.out2 + offset))
    return build_diagram(recs, list(d1.labels) + list(d2.labels))


# ---------------------------------------------------------------------------
# JSON format


def diagram_to_json(diagram: Diagram) -> dict:
    return {
        "format": 1,
        "crossings": [
            {"sign": rec.sign, "in": [rec.in1, rec.in2], "out": [rec.out1, rec.out2]}
            for rec in diagram.crossings
        ],
        "labels": {str(k): lab.unparse() for k, lab in enumerate(diagram.labels)},
    }


def diagram_from_json(data) -> Diagram:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        records = [
            CrossingRecord(int(c["sign"]), c["in"][0], c["in"][1], c["out"][0], c["out"][1])
            for c in data["crossings"]
        ]
    except (KeyError, IndexError, TypeError) as exc:
        raise ParseError(f"malformed diagram JSON: {exc}") from exc
    return build_diagram(records, data.get("labels"))
