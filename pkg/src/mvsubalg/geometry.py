"""Rational simplicial geometry in the unit cube.

Points are tuples of ``Fraction``; a simplex is the sorted tuple of its
vertices; a :class:`Complex` stores its maximal simplexes only (faces are
implied).  All routines are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .cancel import CancellationToken, check
from .linalg import det, det_int, inverse, lcm, maximal_minors_gcd, primitive, rref
from .polytope import Point, Polytope, as_point, pulling_triangulation

Simplex = tuple  # sorted tuple of Points


class GeometryError(ValueError):
    """Invalid geometric input (bad point, non-complex, support mismatch...)."""


def rational_point(coords: Iterable) -> Point:
    """Validated point of the unit cube with exact rational coordinates."""
    p = as_point(coords)
    if not p:
        raise GeometryError("a point needs at least one coordinate")
    for c in p:
        if not 0 <= c <= 1:
            raise GeometryError(f"coordinate {c} outside [0,1]")
    return p


def simplex(vertices: Iterable[Sequence]) -> Simplex:
    return tuple(sorted(set(as_point(v) for v in vertices)))


# -- denominators -------------------------------------------------------------

def denominator(x: Sequence) -> int:
    """Least common multiple of the reduced denominators of the coordinates."""
    return lcm(*(Fraction(c).denominator for c in x))


def homogeneous_correspondent(x: Sequence) -> tuple[int, ...]:
    d = denominator(x)
    return tuple(int(Fraction(c) * d) for c in x) + (d,)


def from_homogeneous(v: Sequence[int]) -> Point:
    d = v[-1]
    if d <= 0:
        raise GeometryError("homogeneous vector needs a positive last entry")
    return tuple(Fraction(c, d) for c in v[:-1])


@lru_cache(maxsize=200_000)
def simplex_index(t: Simplex) -> int:
    """gcd of the maximal minors of the homogeneous vertex matrix.

    1 exactly when the simplex is regular; |det| for full-dimensional ones;
    0 when the vertices are affinely dependent.
    """
    return maximal_minors_gcd([homogeneous_correspondent(v) for v in t])


def is_regular_simplex(t: Sequence[Sequence]) -> bool:
    t = simplex(t)
    idx = simplex_index(t)
    if idx == 0:
        raise GeometryError("vertices are affinely dependent")
    return idx == 1


# -- complexes ----------------------------------------------------------------

@dataclass(frozen=True)
class Complex:
    """Finite simplicial complex given by its maximal simplexes."""

    dim: int
    simplexes: tuple

    @classmethod
    def from_simplices(cls, dim: int, simplices: Iterable[Iterable[Sequence]]) -> "Complex":
        sets = {frozenset(simplex(s)) for s in simplices}
        by_vertex: dict = {}
        for s in sets:
            for v in s:
                by_vertex.setdefault(v, []).append(s)
        maximal = []
        for s in sets:
            v = next(iter(s))
            if any(len(o) > len(s) and s < o for o in by_vertex[v]):
                continue
            maximal.append(tuple(sorted(s)))
        return cls(dim, tuple(sorted(maximal)))

    def __iter__(self):
        return iter(self.simplexes)

    def __len__(self) -> int:
        return len(self.simplexes)

    def vertices(self) -> tuple[Point, ...]:
        return tuple(sorted({v for s in self.simplexes for v in s}))

    def faces(self) -> set[Simplex]:
        out = set()
        for s in self.simplexes:
            for k in range(1, len(s) + 1):
                out.update(combinations(s, k))
        return out

    def is_pure(self) -> bool:
        return len({len(s) for s in self.simplexes}) <= 1

    def top_dim(self) -> int:
        return max((len(s) - 1 for s in self.simplexes), default=-1)

    def edges(self) -> set[tuple[Point, Point]]:
        return {e for s in self.simplexes for e in combinations(s, 2)}


def is_regular_complex(cx: Complex) -> bool:
    return all(is_regular_simplex(s) for s in cx.simplexes)


def total_index(cx: Complex) -> int:
    """Sum of the simplex indices (|det| values) over maximal simplexes."""
    return sum(simplex_index(s) for s in cx.simplexes)


def standard_cube_triangulation(n: int) -> Complex:
    """The n! order simplexes ``x_p1 >= ... >= x_pn`` of ``[0,1]^n``."""
    if n < 1:
        raise GeometryError("n must be positive")
    simplices = []
    for perm in permutations(range(n)):
        v = [0] * n
        verts = [tuple(v)]
        for i in perm:
            v[i] = 1
            verts.append(tuple(v))
        simplices.append(verts)
    return Complex.from_simplices(n, simplices)


# -- point location -----------------------------------------------------------

def barycentric(t: Simplex, x: Sequence) -> tuple[Fraction, ...] | None:
    """Barycentric coordinates of ``x`` w.r.t. ``t``; None if not in aff(t)."""
    m = len(t)
    rows = [[v[j] for v in t] + [x[j]] for j in range(len(x))]
    rows.append([Fraction(1)] * m + [Fraction(1)])
    red, piv = rref(rows)
    if m in piv:
        return None
    if piv != list(range(m)):
        raise GeometryError("vertices are affinely dependent")
    return tuple(red[i][m] for i in range(m))


def in_simplex(t: Simplex, x: Sequence) -> bool:
    b = barycentric(t, x)
    return b is not None and all(c >= 0 for c in b)


def _bbox(points: Sequence[Point]):
    cols = list(zip(*points))
    return tuple(map(min, cols)), tuple(map(max, cols))


def _bbox_overlap(a, b) -> bool:
    return all(l1 <= h2 and l2 <= h1 for l1, h1, l2, h2 in zip(a[0], a[1], b[0], b[1]))


def _in_bbox(box, x) -> bool:
    return all(lo <= c <= hi for lo, hi, c in zip(box[0], box[1], x))


def locate(cx: Complex, x: Sequence) -> Simplex | None:
    """Some maximal simplex containing ``x``, or None."""
    x = as_point(x)
    for s in cx.simplexes:
        if _in_bbox(_bbox(s), x) and in_simplex(s, x):
            return s
    return None


def in_support(cx: Complex, x: Sequence) -> bool:
    return locate(cx, x) is not None


# -- blow-ups -----------------------------------------------------------------

def carrier_face(cx: Complex, c: Point) -> Simplex:
    """The unique simplex of ``cx`` containing ``c`` in its relative interior."""
    for t in cx.simplexes:
        b = barycentric(t, c)
        if b is not None and all(x >= 0 for x in b):
            return tuple(v for v, x in zip(t, b) if x > 0)
    raise GeometryError(f"point {fmt_point(c)} lies outside the support")


def blow_up(cx: Complex, c: Sequence, face: Simplex | None = None) -> Complex:
    """Stellar subdivision of ``cx`` at the point ``c``.

    ``face`` (the carrier of ``c``) is located when not supplied.
    """
    c = as_point(c)
    if face is None:
        face = carrier_face(cx, c)
    if len(face) == 1:
        raise GeometryError("blow-up centre is already a vertex")
    fs = set(face)
    out = []
    for t in cx.simplexes:
        if fs.issubset(t):
            for s in face:
                out.append(tuple(sorted([v for v in t if v != s] + [c])))
        else:
            out.append(t)
    return Complex(cx.dim, tuple(sorted(out)))


def box_points(t: Simplex) -> list[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """Nonzero lattice points ``sum(lam_i * v~_i)`` with every ``lam_i`` in [0,1).

    Returns ``(xi, lam)`` pairs.  Empty exactly when ``t`` is regular.
    """
    rows = [homogeneous_correspondent(v) for v in t]
    m, width = len(rows), len(rows[0])
    best = None
    for cols in combinations(range(width), m):
        sub = [[r[c] for c in cols] for r in rows]
        d = abs(det_int(sub))
        if d and (best is None or d < best[0]):
            best = (d, sub)
    if best is None:
        raise GeometryError("vertices are affinely dependent")
    d, sub = best
    # lam = k / d with k ranging over the subgroup of (Z/d)^m generated by
    # the rows of d * sub^-1 (the lam making lam . sub integral)
    inv = inverse(sub)
    gens = {tuple(int(x * d) % d for x in row) for row in inv}
    gens.discard((0,) * m)
    group = {(0,) * m}
    frontier = list(group)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                s = tuple((a + b) % d for a, b in zip(g, h))
                if s not in group:
                    group.add(s)
                    nxt.append(s)
        frontier = nxt
    out = []
    for k in sorted(group):
        if not any(k):
            continue
        xi = [sum(ki * r[j] for ki, r in zip(k, rows)) for j in range(width)]
        if all(x % d == 0 for x in xi):
            out.append((tuple(x // d for x in xi), tuple(Fraction(ki, d) for ki in k)))
    return out


def blow_up_center(t: Simplex) -> Point:
    """Centre used to desingularize the non-regular simplex ``t``.

    Among the box points pick the one whose blow-up shrinks the indices
    the most (smallest ``sum(lam) / content(xi)``), then lexicographically
    least ``xi``.
    """
    pts = box_points(t)
    if not pts:
        raise GeometryError("simplex is already regular")

    def key(item):
        xi, lam = item
        _, content = primitive(xi)
        return (sum(lam) / content, xi)

    xi, _ = min(pts, key=key)
    prim, _ = primitive(xi)
    return from_homogeneous(prim)


def desingularize(cx: Complex, token: CancellationToken | None = None,
                  keep: Iterable[Simplex] = ()) -> tuple[Complex, list[Point]]:
    """Regular subdivision of ``cx`` by successive blow-ups.

    Returns the regular complex and the ordered list of blow-up centres.
    Centres always lie in relative interiors of non-regular simplexes, so
    regular simplexes that are faces only of regular simplexes survive.
    """
    cur = cx
    log: list[Point] = []
    while True:
        check(token)
        bad = [t for t in cur.simplexes if simplex_index(t) != 1]
        if not bad:
            return cur, log
        if any(simplex_index(t) == 0 for t in bad):
            raise GeometryError("complex has a degenerate simplex")
        t = bad[0]
        c = blow_up_center(t)
        face = tuple(v for v, x in zip(t, barycentric(t, c)) if x > 0)
        cur = blow_up(cur, c, face)
        log.append(c)


def replay(cx: Complex, centers: Iterable[Sequence]) -> Complex:
    for c in centers:
        cx = blow_up(cx, c)
    return cx


# -- polyhedral machinery -----------------------------------------------------

def to_polytope(t: Simplex) -> Polytope:
    return Polytope.from_points(t)


def triangulate_cells(cells: Iterable, dim: int | None = None, validate: bool = False) -> Complex:
    """Triangulate a polyhedral complex without adding vertices.

    ``cells`` are :class:`Polytope` objects or vertex lists.  Each cell is
    pulled at its lexicographically least vertex; the rule is local to
    faces, so shared faces are triangulated identically.
    """
    polys = [c if isinstance(c, Polytope) else Polytope.from_points(c) for c in cells]
    if not polys:
        if dim is None:
            raise GeometryError("cannot infer the ambient dimension of no cells")
        return Complex(dim, ())
    if dim is None:
        dim = polys[0].ambient
    if validate:
        check_polyhedral_complex(polys)
    simplices = []
    for p in polys:
        simplices.extend(pulling_triangulation(p))
    return Complex.from_simplices(dim, simplices)


def is_common_face(p: Polytope, q: Polytope) -> bool:
    """True when ``p`` and ``q`` meet in a common face (or not at all)."""
    if not _bbox_overlap(p.bbox(), q.bbox()):
        return True
    inter = p.intersect(q)
    if inter is None:
        return True
    vs = set(inter.verts)
    return p.minimal_face(vs) == vs and q.minimal_face(vs) == vs


def check_polyhedral_complex(polys: Sequence[Polytope]) -> None:
    for i, j in combinations(range(len(polys)), 2):
        if not is_common_face(polys[i], polys[j]):
            raise GeometryError("cells do not meet in common faces")


def simplex_volume(t: Simplex) -> Fraction:
    n = len(t) - 1
    v0 = t[0]
    return abs(det([[a - b for a, b in zip(v, v0)] for v in t[1:]])) / math.factorial(n)


def volume(cx: Complex) -> Fraction:
    """Sum of the volumes of the full-dimensional maximal simplexes."""
    return sum((simplex_volume(s) for s in cx.simplexes if len(s) == cx.dim + 1), Fraction(0))


def _intersection_cells(a: Complex, b: Complex, full_only: bool) -> list[Polytope]:
    boxes_b = [(_bbox(t), t) for t in b.simplexes]
    cells: dict = {}
    for s in a.simplexes:
        bs = _bbox(s)
        ps = to_polytope(s)
        for bt, t in boxes_b:
            if not _bbox_overlap(bs, bt):
                continue
            inter = ps.intersect(to_polytope(t))
            if inter is None:
                continue
            if full_only and inter.dim < a.dim:
                continue
            cells[inter.verts] = inter
    polys = list(cells.values())
    if not full_only:
        keys = [set(p.verts) for p in polys]
        polys = [p for p, k in zip(polys, keys)
                 if not any(k < o for o in keys)]
    return polys


def _is_full_pure(cx: Complex) -> bool:
    return all(len(s) == cx.dim + 1 for s in cx.simplexes)


def joint_subdivision(a: Complex, b: Complex, check_support: bool = True) -> Complex:
    """Triangulation refining both ``a`` and ``b`` (equal supports)."""
    if a.dim != b.dim:
        raise GeometryError("ambient dimensions differ")
    if a == b:
        return a
    full = _is_full_pure(a) and _is_full_pure(b)
    cells = _intersection_cells(a, b, full_only=full)
    out = triangulate_cells(cells, a.dim)
    if check_support:
        if full:
            va, vb, vo = volume(a), volume(b), volume(out)
            ok = va == vb == vo
        else:
            ok = support_equal(a, b)
        if not ok:
            raise GeometryError("supports differ")
    return out


def refines(fine: Complex, coarse: Complex) -> bool:
    """Every simplex of ``fine`` lies inside some simplex of ``coarse``."""
    for s in fine.simplexes:
        if not any(all(in_simplex(t, v) for v in s) for t in coarse.simplexes):
            return False
    return True


def support_contains(cx: Complex, t: Simplex) -> bool:
    """Exact test ``t`` subset of ``|cx|``.

    The pieces ``t & s`` of full dimension within ``t`` have disjoint relative
    interiors once duplicates (pieces cut from a common face) are dropped, so
    ``t`` is covered iff their measures add up to the measure of ``t``.
    Measures are taken after projecting onto coordinates that are injective
    on the affine hull of ``t``; this keeps them rational.
    """
    t = tuple(t)
    if len(t) == 1:
        return in_support(cx, t[0])
    poly = to_polytope(t)
    box = poly.bbox()
    pieces = {}
    for s in cx.simplexes:
        if not _bbox_overlap(box, _bbox(s)):
            continue
        r = poly.intersect(to_polytope(s))
        if r is not None and r.dim == poly.dim:
            pieces[r.verts] = r
    piv = poly.pivots
    covered = sum((_projected_volume(r, piv) for r in pieces.values()), Fraction(0))
    return covered == _projected_volume(poly, piv)


def _projected_volume(p: Polytope, coords) -> Fraction:
    total = Fraction(0)
    for s in pulling_triangulation(p):
        total += simplex_volume(tuple(tuple(v[j] for j in coords) for v in s))
    return total


def support_equal(a: Complex, b: Complex) -> bool:
    if a.dim != b.dim:
        return False
    return (all(support_contains(b, s) for s in a.simplexes)
            and all(support_contains(a, s) for s in b.simplexes))


def _normalize_plane(a: Sequence, d) -> tuple[tuple, Fraction]:
    """Canonical scaling of a hyperplane ``a . x + d = 0``."""
    lead = next(x for x in a if x != 0)
    k = abs(lead)
    return tuple(Fraction(x) / k for x in a), Fraction(d) / k


def arrangement_cells(polys: Sequence[Polytope]) -> list[Polytope]:
    """Cut every polytope by every hyperplane of every polytope.

    The pieces are closed cells of one hyperplane arrangement, hence they
    form a polyhedral complex whose support is the union of ``polys``.
    """
    planes = set()
    for p in polys:
        for a, d in p.hyperplanes():
            if any(a):
                planes.add(_normalize_plane(a, d))
    planes = sorted(planes)
    cells: dict = {}
    for p in polys:
        pieces = [p]
        for a, d in planes:
            nxt = []
            for q in pieces:
                nxt.extend(q.split(a, d))
            pieces = nxt
        for q in pieces:
            cells[q.verts] = q
    out = list(cells.values())
    keys = [set(p.verts) for p in out]
    return [p for p, k in zip(out, keys) if not any(k < o and _contained(p, q) for o, q in zip(keys, out))]


def _contained(p: Polytope, q: Polytope) -> bool:
    return all(q.contains(v) for v in p.verts)


# -- connectivity and strong regularity --------------------------------------

def is_connected(cx: Complex) -> bool:
    if not cx.simplexes:
        raise GeometryError("empty complex: connectivity is not answered")
    parent: dict = {}

    def find(v):
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s in cx.simplexes:
        r = find(s[0])
        for v in s[1:]:
            parent[find(v)] = r
    roots = {find(v) for v in cx.vertices()}
    return len(roots) == 1


def is_strongly_regular(cx: Complex) -> bool:
    if not is_regular_complex(cx):
        raise GeometryError("strong regularity is only defined for regular complexes")
    return all(math.gcd(*(denominator(v) for v in s)) == 1 for s in cx.simplexes)


# -- serialization ------------------------------------------------------------

def fmt_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise GeometryError(f"bad rational {s!r}") from e


def fmt_point(p: Sequence) -> list[str]:
    return [fmt_rational(c) for c in p]


def complex_to_json(cx: Complex) -> dict:
    return {"dim": cx.dim,
            "simplexes": [[fmt_point(v) for v in s] for s in cx.simplexes]}


def complex_from_json(obj: dict) -> Complex:
    try:
        dim = int(obj["dim"])
        simplices = []
        for s in obj["simplexes"]:
            verts = [rational_point(parse_rational(c) for c in v) for v in s]
            if any(len(v) != dim for v in verts):
                raise GeometryError("vertex dimension does not match 'dim'")
            simplices.append(verts)
    except (KeyError, TypeError) as e:
        raise GeometryError(f"malformed complex: {e}") from e
    return Complex.from_simplices(dim, simplices)
