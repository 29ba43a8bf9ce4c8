"""Shared generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from mvsubalg import terms as T
from mvsubalg.geometry import Complex, blow_up
from mvsubalg.linalg import affine_rank

BINARY = [T.OPlus, T.OTimes, T.Meet, T.Join, T.TruncSub, T.Implies]


def random_term(rng: random.Random, n: int, depth: int) -> T.Term:
    """Random term of depth at most ``depth`` using every connective."""
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.08:
            return T.ZERO
        if r < 0.12:
            return T.ONE
        return T.Var(rng.randint(1, n))
    if rng.random() < 0.2:
        return T.Neg(random_term(rng, n, depth - 1))
    return rng.choice(BINARY)(random_term(rng, n, depth - 1), random_term(rng, n, depth - 1))


def random_point(rng: random.Random, n: int, max_den: int = 12) -> tuple:
    return tuple(Fraction(rng.randint(0, d), d) for d in (rng.randint(1, max_den) for _ in range(n)))


def random_vertex(rng: random.Random, n: int, max_den: int = 12) -> tuple:
    """Rational point whose denominator (lcm of coordinate denominators) is at most ``max_den``."""
    d = rng.randint(1, max_den)
    return tuple(Fraction(rng.randint(0, d), d) for _ in range(n))


def random_complex(rng: random.Random, n: int, max_den: int = 12) -> Complex:
    """A rational triangulation: a chain of segments (n=1) or a triangle,
    possibly stellarly subdivided a few times (n=2)."""
    if n == 1:
        while True:
            pts = sorted({random_vertex(rng, 1, max_den) for _ in range(rng.randint(2, 5))})
            if len(pts) >= 2:
                return Complex.from_simplices(1, [[a, b] for a, b in zip(pts, pts[1:])])
    while True:
        tri = [random_vertex(rng, 2, max_den) for _ in range(3)]
        if affine_rank(tri) == 2:
            break
    cx = Complex.from_simplices(2, [tri])
    for _ in range(rng.randint(0, 2)):
        s = rng.choice(cx.simplexes)
        d = rng.randint(2, max_den)
        # a point of the closed simplex with denominator dividing lcm(d, dens)
        w = [rng.randint(0, d) for _ in s]
        if sum(w) == 0:
            continue
        c = tuple(sum(Fraction(wi, sum(w)) * v[j] for wi, v in zip(w, s)) for j in range(2))
        if c in cx.vertices() or max(x.denominator for x in c) > max_den:
            continue
        cx = blow_up(cx, c)
    return cx


def parse_all(texts, n):
    return [T.parse_term(s, n) for s in texts]


@st.composite
def terms(draw, n: int = 2, max_depth: int = 5):
    """Hypothesis strategy for terms over x1..xn."""
    leaves = st.one_of(st.just(T.ZERO), st.just(T.ONE),
                       st.integers(1, n).map(T.Var))

    def extend(children):
        return st.one_of(children.map(T.Neg),
                         st.tuples(st.sampled_from(BINARY), children, children)
                         .map(lambda x: x[0](x[1], x[2])))

    return draw(st.recursive(leaves, extend, max_leaves=2 ** max_depth // 2))


@st.composite
def rationals01(draw, max_den: int = 24):
    d = draw(st.integers(1, max_den))
    return Fraction(draw(st.integers(0, d)), d)


def points(n: int, max_den: int = 24):
    return st.tuples(*[rationals01(max_den) for _ in range(n)])
