"""Surgery-presentation utilities: continued fractions, Bezout data, the
lens-space value, and the chain-of-unknots construction that glues two
torus boundary components.

Continued fractions use the minus convention <a_1, ..., a_k> =
a_1 - 1/(a_2 - 1/(... - 1/a_k)) with the associated integer sequences

    p_0 = 0, p_1 = -1, p_{i+1} = a_i p_i - p_{i-1}
    q_0 = 1, q_1 = 0,  q_{i+1} = a_i q_i - q_{i-1}

so that p_{k+1}/q_{k+1} = <a_1, ..., a_k>.  Note det [[p_k, q_k],
[p_{k+1}, q_{k+1}]] = +1 for this recursion (checked in the tests).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .dilog import ModValue, imag_class, mod_reduce
from .errors import (
    BVariableMismatch,
    CFUndefined,
    DegenerateBraiding,
    IncompatibleTarget,
    InvalidMatrix,
    NoCFFound,
    NotCoprime,
)

FOUR_PI_SQ_I = 4j * math.pi ** 2


def cf_eval(a) -> Fraction:
    """Value of the minus continued fraction <a_1, ..., a_k>."""
    value = None
    for entry in reversed(list(a)):
        if value is None:
            value = Fraction(entry)
        else:
            if value == 0:
                raise CFUndefined("division by zero while evaluating")
            value = Fraction(entry) - 1 / value
    if value is None:
        raise CFUndefined("empty continued fraction")
    return value


def cf_convergents(a):
    """The sequences (p_i), (q_i) of the minus continued fraction."""
    p = [0, -1]
    q = [1, 0]
    for entry in a:
        p.append(entry * p[-1] - p[-2])
        q.append(entry * q[-1] - q[-2])
    return p, q


def bezout(p: int, q: int):
    """Integers (r, s) with p s - q r = 1, r least nonnegative when |p| > 1.

    The r returned satisfies q r = -1 (mod p), the congruence used by the
    lens-space value.
    """
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1")
    if p == 0:
        return (-q, 0)          # q = +-1, and p s - q r = q^2 = 1
    if abs(p) == 1:
        return (0, p)           # p s = 1
    r = (-pow(q, -1, abs(p))) % abs(p)
    s = (1 + q * r) // p
    assert p * s - q * r == 1, (p, q, r, s)
    return (r, s)


@dataclass(frozen=True)
class GluingMatrix:
    """Matrix [[r, s], [p, q]] identifying (m, l) with (m', l'); rq - ps = -1.

    Rows: m' = r m + s l and l' = p m + q l on first homology of the torus.
    """

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.r * self.q - self.p * self.s != -1:
            raise InvalidMatrix(
                f"rq - ps = {self.r * self.q - self.p * self.s}, expected -1")

    @staticmethod
    def from_filling(p: int, q: int) -> "GluingMatrix":
        r, s = bezout(p, q)
        return GluingMatrix(p=p, q=q, r=r, s=s)


def matrix_to_cf(g: GluingMatrix):
    """A continued fraction whose convergents realize the gluing matrix.

    Returns a list of integers a with p_{k+1}/q_{k+1} = p/q and
    p_k/q_k = r/s as fractions (rows recovered up to sign, verified by
    re-expansion).  The identity-like gluing with q = 0 is realized by the
    single-entry fraction [p * r] when possible.
    """
    p, q, r, s = g.p, g.q, g.r, g.s
    if q != 0:
        # Canonical minus expansion by ceiling division; all entries after
        # the first are >= 2.  Often matches the requested (r, s) ray.
        word = []
        x = Fraction(p, q)
        for _ in range(128):
            a = math.ceil(x)
            word.append(a)
            if x == a:
                break
            x = 1 / (a - x)
        else:
            word = None
        if word and _cf_matches(word, g):
            return word
    # Factor [[p', q'], [r', s']] ~ M(a_k) ... M(a_1) with M(a) = [[a,-1],[1,0]]
    # acting on rows (-p_i, q_i) of the convergent recursion.
    target = [[-p, q], [-r, s]]
    for flip in ((1, 1), (-1, -1), (1, -1), (-1, 1)):
        rows = [[flip[0] * target[0][0], flip[0] * target[0][1]],
                [flip[1] * target[1][0], flip[1] * target[1][1]]]
        det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
        if det != 1:
            continue
        word = _factor_unimodular(rows)
        if word is None:
            continue
        if _cf_matches(word, g):
            return word
    raise NoCFFound(f"no continued fraction realizes {g!r}")


def _factor_unimodular(rows, max_len: int = 200):
    # Peel factors M(a) = [[a, -1], [1, 0]] from the left of the det-1 matrix
    # G: G = M(a) G' with G' = [[g10, g11], [a g10 - g00, a g11 - g01]].
    g00, g01 = rows[0]
    g10, g11 = rows[1]
    word = []
    for _ in range(max_len):
        if (g00, g01, g10, g11) == (1, 0, 0, 1):
            return list(reversed(word))
        if g10 == 0:
            # Endgame: G = [[e, c], [0, e]] with e = +-1.
            if g00 == -1:
                a = -g01          # lands on M(0)
            else:
                a = 0             # detour toward the e = -1 case
        else:
            # Nearest-integer division keeps |a g10 - g00| <= |g10| / 2.
            base = g00 // g10
            a = min((base, base + 1), key=lambda c: (abs(c * g10 - g00), c))
        new0 = (g10, g11)
        new1 = (a * g10 - g00, a * g11 - g01)
        word.append(a)
        (g00, g01), (g10, g11) = new0, new1
    return None


def _cf_matches(word, g: GluingMatrix) -> bool:
    # Rows are recovered projectively: each of (p, q) and (r, s) up to sign.
    p_seq, q_seq = cf_convergents(word)
    last = (p_seq[-1], q_seq[-1])
    prev = (p_seq[-2], q_seq[-2])
    def same_ray(u, v):
        return u == v or u == (-v[0], -v[1])
    return same_ray(last, (g.p, g.q)) and same_ray(prev, (g.r, g.s))


def lens_oracle(p: int, q: int, n: int) -> ModValue:
    """Complex volume of the lens space L(-p, q) at the n-th representation:
    4 pi^2 i n^2 r / p with q r = -1 (mod p), as a class mod 2 pi^2 i."""
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1")
    r, _ = bezout(p, q)
    return mod_reduce(imag_class(FOUR_PI_SQ_I * n * n * r / p))
