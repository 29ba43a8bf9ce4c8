"""Weighted triangulations, hats, basic sets and unit partitions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .geometry import (Complex, GeometryError, complex_from_json, complex_to_json,
                       denominator, homogeneous_correspondent, is_regular_complex,
                       parse_rational)
from .linalg import inverse
from .pwl import (LinearForm, PwlFunction, from_vertex_values, interpolate,
                  is_constant, lincomb)


@dataclass(frozen=True)
class WeightedTriangulation:
    """A triangulation with a positive integer weight dividing each vertex denominator.

    ``weights`` is aligned with ``complex.vertices()`` (lexicographic order).
    """

    complex: Complex
    weights: tuple

    def __post_init__(self):
        vs = self.complex.vertices()
        if len(vs) != len(self.weights):
            raise ValueError(f"expected {len(vs)} weights, got {len(self.weights)}")
        for v, a in zip(vs, self.weights):
            if not isinstance(a, int) or a < 1:
                raise ValueError("weights must be positive integers")
            if denominator(v) % a:
                raise ValueError(f"weight {a} does not divide the denominator {denominator(v)}")

    @classmethod
    def uniform(cls, cx: Complex) -> "WeightedTriangulation":
        return cls(cx, (1,) * len(cx.vertices()))

    @property
    def vertices(self) -> tuple:
        return self.complex.vertices()

    def weight_map(self) -> dict:
        return dict(zip(self.complex.vertices(), self.weights))


@dataclass(frozen=True)
class HatSet:
    """Hats ``h_i`` with their vertices and weights."""

    hats: tuple
    vertices: tuple
    weights: tuple

    def __len__(self) -> int:
        return len(self.hats)

    def without(self, i: int) -> "HatSet":
        keep = [j for j in range(len(self.hats)) if j != i]
        return HatSet(tuple(self.hats[j] for j in keep),
                      tuple(self.vertices[j] for j in keep),
                      tuple(self.weights[j] for j in keep))

    def multipliers(self) -> list[int]:
        return [denominator(v) // a for v, a in zip(self.vertices, self.weights)]


def hat(cx: Complex, v, value: Fraction) -> PwlFunction:
    """The function with ``value`` at ``v``, 0 at the other vertices, linear on simplexes."""
    vals = {u: Fraction(0) for u in cx.vertices()}
    if v not in vals:
        raise GeometryError("not a vertex of the complex")
    vals[v] = Fraction(value)
    return from_vertex_values(cx, vals)


def hats_of(w: WeightedTriangulation) -> HatSet:
    cx = w.complex
    index = {v: i for i, v in enumerate(w.vertices)}
    zero = LinearForm.constant(cx.dim, 0)
    pieces = [[zero] * len(cx.simplexes) for _ in w.vertices]
    # one interpolation per (simplex, vertex) pair; each hat is zero off its star
    for k, s in enumerate(cx.simplexes):
        for pos, v in enumerate(s):
            i = index[v]
            vals = [Fraction(0)] * len(s)
            vals[pos] = Fraction(w.weights[i], denominator(v))
            pieces[i][k] = interpolate(s, vals)
    hs = tuple(PwlFunction(cx, tuple(p)) for p in pieces)
    return HatSet(hs, w.vertices, w.weights)


def basic_defect(w: WeightedTriangulation):
    """First maximal simplex whose matrix ``M_T^-1 D_T`` is not integral, else None."""
    wm = w.weight_map()
    n = w.complex.dim
    for t in w.complex.simplexes:
        if len(t) != n + 1:
            raise GeometryError("basicness is tested on full-dimensional triangulations")
        m = [homogeneous_correspondent(v) for v in t]
        inv = inverse(m)
        # column i of M^-1 D is the homogeneous coefficient vector of hat i on t
        for row in inv:
            for x, v in zip(row, t):
                if (x * wm[v]).denominator != 1:
                    return t
    return None


def is_basic(w: WeightedTriangulation) -> bool:
    return basic_defect(w) is None


def schauder_hats(cx: Complex) -> HatSet:
    if not is_regular_complex(cx):
        raise GeometryError("Schauder hats need a regular complex")
    return hats_of(WeightedTriangulation.uniform(cx))


def multipliers(w: WeightedTriangulation) -> list[int]:
    if not is_basic(w):
        raise GeometryError("multipliers are defined for basic weighted triangulations")
    return [denominator(v) // a for v, a in zip(w.vertices, w.weights)]


def verify_unit_partition(h: HatSet) -> bool:
    """``sum m_i h_i`` is the constant function 1."""
    if not h.hats:
        return False
    return is_constant(lincomb(list(h.hats), h.multipliers()), 1)


# -- serialization ------------------------------------------------------------

def weighted_to_json(w: WeightedTriangulation) -> dict:
    out = complex_to_json(w.complex)
    out["weights"] = list(w.weights)
    return out


def weighted_from_json(obj: dict) -> WeightedTriangulation:
    cx = complex_from_json(obj)
    try:
        weights = tuple(int(a) for a in obj["weights"])
    except (KeyError, TypeError, ValueError) as e:
        raise GeometryError(f"malformed weights: {e}") from e
    return WeightedTriangulation(cx, weights)


def interval_triangulation(points: Iterable) -> Complex:
    """The 1-dimensional triangulation of [0,1] with the given breakpoints."""
    ps = sorted({parse_rational(p) for p in points} | {Fraction(0), Fraction(1)})
    return Complex.from_simplices(1, [[(a,), (b,)] for a, b in zip(ps, ps[1:])])
