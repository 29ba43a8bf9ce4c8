"""Exact piecewise-linear functions over rational triangulations.

A :class:`PwlFunction` is a full-dimensional triangulation of a polyhedron
in ``[0,1]^n`` together with one affine form per maximal simplex.  Terms are
compiled bottom-up on polyhedral cells: each connective overlays the cells of
its arguments and cuts every cell along the level set where the connective
changes its linear expression.  Because those level sets are zero sets of
continuous functions, the cells stay face-to-face.  In one and two
variables, cells sharing an affine form are merged whenever their union is
convex, and the final triangulation adds hanging vertices so that simplexes
meet face-to-face.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from itertools import combinations
from typing import NamedTuple, Sequence

from . import terms as T
from .cancel import CancellationToken, check
from .geometry import (Complex, GeometryError, Simplex, _bbox_overlap,
                       arrangement_cells, complex_from_json, complex_to_json,
                       fmt_rational, in_simplex, is_common_face, parse_rational,
                       simplex_volume, support_equal, triangulate_cells, volume)
from .linalg import affine_rank, solve
from .polytope import Point, Polytope, as_point, pulling_triangulation

ZERO = Fraction(0)
ONE = Fraction(1)


class LinearForm(NamedTuple):
    """The affine function ``coeffs . x + const``."""

    coeffs: tuple
    const: Fraction

    @classmethod
    def constant(cls, n: int, c) -> "LinearForm":
        return cls((ZERO,) * n, Fraction(c))

    @classmethod
    def coordinate(cls, n: int, i: int) -> "LinearForm":
        return cls(tuple(ONE if j == i else ZERO for j in range(n)), ZERO)

    def __call__(self, x: Sequence) -> Fraction:
        s = self.const
        for a, c in zip(self.coeffs, x):
            if a:
                s += a * c
        return s

    def add(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                          self.const + other.const)

    def sub(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
                          self.const - other.const)

    def scale(self, k) -> "LinearForm":
        return LinearForm(tuple(a * k for a in self.coeffs), self.const * k)

    def shift(self, c) -> "LinearForm":
        return LinearForm(self.coeffs, self.const + c)

    def is_integral(self) -> bool:
        return self.const.denominator == 1 and all(a.denominator == 1 for a in self.coeffs)

    def __str__(self) -> str:
        parts = []
        for i, a in enumerate(self.coeffs, 1):
            if a:
                parts.append(f"{fmt_rational(a)}*x{i}")
        if self.const or not parts:
            parts.append(fmt_rational(self.const))
        return " + ".join(parts)


def interpolate(t: Simplex, values: Sequence) -> LinearForm:
    """The affine form on the full-dimensional simplex ``t`` with given vertex values."""
    n = len(t[0])
    if len(t) != n + 1:
        raise GeometryError("interpolation needs a full-dimensional simplex")
    sol = solve([list(v) + [ONE] for v in t], values)
    if sol is None:
        raise GeometryError("degenerate simplex")
    return LinearForm(tuple(sol[:n]), sol[n])


@lru_cache(maxsize=100_000)
def simplex_polytope(t: Simplex) -> Polytope:
    return Polytope.from_points(t)


@dataclass(frozen=True)
class PwlFunction:
    """Piecewise-linear function: one affine form per maximal simplex.

    ``mv`` marks functions with values in [0,1]; integer combinations used for
    unit-partition checks clear it.
    """

    carrier: Complex
    pieces: tuple
    mv: bool = True

    def __post_init__(self):
        if len(self.pieces) != len(self.carrier.simplexes):
            raise ValueError("one piece per maximal simplex is required")
        n = self.carrier.dim
        if any(len(s) != n + 1 for s in self.carrier.simplexes):
            raise GeometryError("carrier must consist of full-dimensional simplexes")

    @property
    def dim(self) -> int:
        return self.carrier.dim

    def items(self):
        return zip(self.carrier.simplexes, self.pieces)

    def piece_at(self, x: Sequence) -> LinearForm:
        x = as_point(x)
        if len(x) != self.dim:
            raise ValueError(f"point has dimension {len(x)}, expected {self.dim}")
        for s, form in self.items():
            if in_simplex(s, x):
                return form
        raise GeometryError("point outside the support")

    def __call__(self, x: Sequence) -> Fraction:
        return self.piece_at(x)(as_point(x))

    def vertex_values(self) -> dict:
        out = {}
        for s, form in self.items():
            for v in s:
                if v not in out:
                    out[v] = form(v)
        return out

    def is_integral(self) -> bool:
        return all(f.is_integral() for f in self.pieces)


def eval_pwl(f: PwlFunction, x: Sequence) -> Fraction:
    return f(x)


def from_vertex_values(cx: Complex, values: dict, mv: bool = True) -> PwlFunction:
    zero = LinearForm.constant(cx.dim, 0)
    pieces = []
    for s in cx.simplexes:
        vals = [values[v] for v in s]
        # hats vanish on most simplexes; skip the solve there
        pieces.append(interpolate(s, vals) if any(vals) else zero)
    return PwlFunction(cx, tuple(pieces), mv)


# -- cells --------------------------------------------------------------------
#
# A cell list is a list of (Polytope, payload) pairs forming a polyhedral
# complex of full-dimensional cells.

def _overlay_cells(a: list, b: list, token=None) -> list:
    """Pairwise full-dimensional intersections; payloads become pairs."""
    if len(b) == 1 and len(a) >= 1 and _covers(b[0][0], a):
        return [(p, (x, b[0][1])) for p, x in a]
    if len(a) == 1 and _covers(a[0][0], b):
        return [(q, (a[0][1], y)) for q, y in b]
    if [p for p, _ in a] == [q for q, _ in b]:
        return [(p, (x, y)) for (p, x), (_, y) in zip(a, b)]
    boxes = [(q.bbox(), q, y) for q, y in b]
    out = []
    for p, x in a:
        check(token)
        pb = p.bbox()
        for qb, q, y in boxes:
            if not _bbox_overlap(pb, qb):
                continue
            if all(q.contains(v) for v in p.verts):
                out.append((p, (x, y)))
                continue
            if all(p.contains(v) for v in q.verts):
                out.append((q, (x, y)))
                continue
            r = p.intersect(q)
            if r is not None and r.dim == p.ambient:
                out.append((r, (x, y)))
    return out


def _covers(p: Polytope, cells: list) -> bool:
    return all(all(p.contains(v) for v in q.verts) for q, _ in cells)


def _split_by(cells: list, diff, pos, neg, zero_side_pos: bool = False) -> list:
    """Cut each cell along ``diff(payload) = 0``.

    ``pos``/``neg`` build the new payload on the side where ``diff`` is
    nonnegative / nonpositive.
    """
    out = []
    for p, y in cells:
        h = diff(y)
        vals = p.values(h.coeffs, h.const)
        lo, hi = min(vals), max(vals)
        if lo >= 0:
            out.append((p, pos(y)))
        elif hi <= 0:
            out.append((p, neg(y)))
        else:
            below, above = p.split(h.coeffs, h.const)
            out.append((below, neg(y)))
            out.append((above, pos(y)))
    return out


def _apply_binary(u: T.Term, a: list, b: list, n: int, token=None) -> list:
    one = LinearForm.constant(n, 1)
    zero = LinearForm.constant(n, 0)
    cells = _overlay_cells(a, b, token)
    if isinstance(u, T.OPlus):
        # f+g-1 >= 0 -> 1 ; <= 0 -> f+g
        return _split_by(cells, lambda y: y[0].add(y[1]).shift(-1),
                         lambda y: one, lambda y: y[0].add(y[1]))
    if isinstance(u, T.OTimes):
        return _split_by(cells, lambda y: y[0].add(y[1]).shift(-1),
                         lambda y: y[0].add(y[1]).shift(-1), lambda y: zero)
    if isinstance(u, T.Meet):
        return _split_by(cells, lambda y: y[0].sub(y[1]),
                         lambda y: y[1], lambda y: y[0])
    if isinstance(u, T.Join):
        return _split_by(cells, lambda y: y[0].sub(y[1]),
                         lambda y: y[0], lambda y: y[1])
    if isinstance(u, T.TruncSub):
        return _split_by(cells, lambda y: y[0].sub(y[1]),
                         lambda y: y[0].sub(y[1]), lambda y: zero)
    if isinstance(u, T.Implies):
        # 1 - f + g >= 1 iff g - f >= 0
        return _split_by(cells, lambda y: y[1].sub(y[0]),
                         lambda y: one, lambda y: one.sub(y[0]).add(y[1]))
    raise TypeError(f"unknown node {type(u).__name__}")


def compile_cells(t: T.Term, n: int, token: CancellationToken | None = None) -> list:
    """Polyhedral cells of ``[0,1]^n`` with the affine form of ``t`` on each."""
    if T.max_var(t) > n:
        raise ValueError(f"term uses variables beyond x{n}")
    cube = Polytope.cube(n)
    memo: dict[int, list] = {}
    keep = []
    stack = [(t, False)]
    while stack:
        u, done = stack.pop()
        if id(u) in memo:
            continue
        kids = u.children()
        if not kids or done:
            check(token)
            if isinstance(u, T.Zero):
                cells = [(cube, LinearForm.constant(n, 0))]
            elif isinstance(u, T.One):
                cells = [(cube, LinearForm.constant(n, 1))]
            elif isinstance(u, T.Var):
                cells = [(cube, LinearForm.coordinate(n, u.index - 1))]
            elif isinstance(u, T.Neg):
                one = LinearForm.constant(n, 1)
                cells = [(p, one.sub(f)) for p, f in memo[id(kids[0])]]
            else:
                cells = _apply_binary(u, memo[id(kids[0])], memo[id(kids[1])], n, token)
                if n <= 2:
                    cells = merge_cells(cells)
            memo[id(u)] = cells
            keep.append(u)
        else:
            stack.append((u, True))
            for c in kids:
                if id(c) not in memo:
                    stack.append((c, False))
    return memo[id(t)]


# Merging keeps cell counts proportional to the number of linear regions
# instead of the number of connectives.  Merged cells need not meet face to
# face, so in the plane the final triangulation inserts hanging vertices;
# in higher dimensions cells are never merged.

_GREEDY_LIMIT = 24


def _merge_group(ps: list) -> list:
    """Replace cells carrying the same form by fewer convex cells with the same union."""
    vols = [p_volume(p) for p in ps]
    hull = Polytope.from_points(v for p in ps for v in p.verts)
    if p_volume(hull) == sum(vols, ZERO):
        return [hull]
    if len(ps) > _GREEDY_LIMIT:
        return ps
    items = list(zip(ps, vols))
    merged = True
    while merged:
        merged = False
        for i, j in combinations(range(len(items)), 2):
            (p, a), (q, b) = items[i], items[j]
            if not _bbox_overlap(p.bbox(), q.bbox()):
                continue
            h = Polytope.from_points(p.verts + q.verts)
            if p_volume(h) == a + b:
                items[i] = (h, a + b)
                del items[j]
                merged = True
                break
    return [p for p, _ in items]


def merge_cells(cells: list) -> list:
    groups: dict = {}
    for p, f in cells:
        groups.setdefault(f, []).append(p)
    if len(groups) == len(cells):
        return cells
    out = []
    for f, ps in groups.items():
        out.extend((p, f) for p in (ps if len(ps) == 1 else _merge_group(ps)))
    return out


def _angle_key(c):
    def cmp(p, q):
        a = (p[0] - c[0], p[1] - c[1])
        b = (q[0] - c[0], q[1] - c[1])
        ha = a[1] < 0 or (a[1] == 0 and a[0] < 0)
        hb = b[1] < 0 or (b[1] == 0 and b[0] < 0)
        if ha != hb:
            return 1 if ha else -1
        cross = a[0] * b[1] - a[1] * b[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)
    return cmp_to_key(cmp)


def _cross(p, a, b):
    return (a[0] - p[0]) * (b[1] - p[1]) - (a[1] - p[1]) * (b[0] - p[0])


def _ear_clip(points: list) -> list[tuple]:
    """Triangulate a convex polygon given by all points on its boundary,
    so that every boundary segment between consecutive points is an edge."""
    c = tuple(sum(x) / len(points) for x in zip(*points))
    ring = sorted(points, key=_angle_key(c))
    out = []
    while len(ring) > 3:
        m = len(ring)
        for i in range(m):
            a, b, d = ring[i - 1], ring[i], ring[(i + 1) % m]
            if _cross(a, b, d) == 0:
                continue
            rest = ring[:i] + ring[i + 1:]
            if all(_cross(rest[0], rest[1], q) == 0 for q in rest[2:]):
                continue
            out.append(tuple(sorted((a, b, d))))
            ring = rest
            break
        else:
            raise GeometryError("cannot triangulate a degenerate polygon")
    out.append(tuple(sorted(ring)))
    return out


def _conforming_triangles(cells: list) -> list:
    """Triangles of planar cells with every cell vertex lying on a neighbour's
    edge included, so that the pieces meet edge to edge."""
    verts = sorted({v for p, _ in cells for v in p.verts})
    out = []
    for p, f in cells:
        lo, hi = p.bbox()
        own = set(p.verts)
        extra = [v for v in verts if v not in own
                 and lo[0] <= v[0] <= hi[0] and lo[1] <= v[1] <= hi[1] and p.contains(v)]
        tris = _ear_clip(list(p.verts) + extra) if extra else pulling_triangulation(p)
        out.extend((s, f) for s in tris)
    return out


def cells_to_pwl(cells: list, n: int, mv: bool = True, conform: bool = False) -> PwlFunction:
    simplices: dict = {}
    if conform and n == 2:
        for s, f in _conforming_triangles(cells):
            simplices[s] = f
    else:
        for p, f in cells:
            for s in pulling_triangulation(p):
                simplices[s] = f
    cx = Complex(n, tuple(sorted(simplices)))
    return PwlFunction(cx, tuple(simplices[s] for s in cx.simplexes), mv)


def compile_term(t: T.Term, n: int, token: CancellationToken | None = None) -> PwlFunction:
    """Exact piecewise-linear representation of the McNaughton function of ``t``."""
    f = cells_to_pwl(compile_cells(t, n, token), n, conform=True)
    if not f.is_integral():
        raise AssertionError("compiled piece with non-integer coefficients")
    return f


# -- overlays of functions ----------------------------------------------------

def _function_cells(f: PwlFunction) -> list:
    return [(simplex_polytope(s), form) for s, form in f.items()]


def overlay(fs: Sequence[PwlFunction], token=None, check_support: bool = True):
    """Common refinement of several carriers.

    Returns ``(complex, forms)`` where ``forms[i]`` is the tuple of pieces of
    ``fs`` on the i-th maximal simplex of ``complex``.
    """
    if not fs:
        raise ValueError("nothing to overlay")
    n = fs[0].dim
    if any(f.dim != n for f in fs):
        raise GeometryError("ambient dimensions differ")
    if all(f.carrier == fs[0].carrier for f in fs):
        cx = fs[0].carrier
        return cx, [tuple(f.pieces[i] for f in fs) for i in range(len(cx.simplexes))]
    cells = [(p, (form,)) for p, form in _function_cells(fs[0])]
    for f in fs[1:]:
        pairs = _overlay_cells(cells, _function_cells(f), token)
        cells = [(p, x + (y,)) for p, (x, y) in pairs]
    if check_support:
        total = sum((p_volume(p) for p, _ in cells), ZERO)
        if any(volume(f.carrier) != total for f in fs):
            raise GeometryError("supports differ")
    simplices: dict = {}
    for p, forms in cells:
        for s in pulling_triangulation(p):
            simplices[s] = forms
    cx = Complex(n, tuple(sorted(simplices)))
    return cx, [simplices[s] for s in cx.simplexes]


def p_volume(p: Polytope) -> Fraction:
    return sum((simplex_volume(s) for s in pulling_triangulation(p)), ZERO)


def restrict_to(f: PwlFunction, cx: Complex) -> PwlFunction:
    """``f`` re-expressed on a refinement ``cx`` of its carrier."""
    pieces = []
    for s in cx.simplexes:
        b = tuple(sum(c) / len(s) for c in zip(*s))
        pieces.append(f.piece_at(b))
    return PwlFunction(cx, tuple(pieces), f.mv)


def linearizing_triangulation(fs: Sequence[PwlFunction], token=None) -> Complex:
    return overlay(fs, token)[0]


def _fills_cube(cx: Complex) -> bool:
    return volume(cx) == 1 and all(0 <= x <= 1 for v in cx.vertices() for x in v)


def pwl_difference(f: PwlFunction, g: PwlFunction, token=None) -> Point | None:
    """A point where ``f`` and ``g`` differ, or None when they are equal.

    Only pieces with different forms are intersected; the point is the
    barycentre of the first full-dimensional such intersection, or one of its
    vertices if the two forms happen to agree at the barycentre.
    """
    n = f.dim
    if g.dim != n:
        raise GeometryError("ambient dimensions differ")
    # supports inside the cube with full volume are the whole cube
    if not (_fills_cube(f.carrier) and _fills_cube(g.carrier)):
        if not support_equal(f.carrier, g.carrier):
            raise GeometryError("supports differ")
    cells = [(simplex_polytope(t), b) for t, b in g.items()]
    boxes = [q.bbox() for q, _ in cells]
    for s, a in f.items():
        check(token)
        p = simplex_polytope(s)
        pb = p.bbox()
        for (q, b), qb in zip(cells, boxes):
            if a == b or not _bbox_overlap(pb, qb):
                continue
            r = p.intersect(q)
            if r is None or r.dim != n:
                continue
            bc = r.barycenter()
            if a(bc) != b(bc):
                return bc
            return next(v for v in r.verts if a(v) != b(v))
    return None


def pwl_equal(f: PwlFunction, g: PwlFunction, token=None) -> bool:
    return pwl_difference(f, g, token) is None


def lincomb(fs: Sequence[PwlFunction], ms: Sequence[int], token=None) -> PwlFunction:
    """Pointwise integer combination; the result is not range-restricted."""
    if len(fs) != len(ms):
        raise ValueError("one multiplier per function is required")
    cx, forms = overlay(fs, token)
    n = cx.dim
    pieces = []
    for fm in forms:
        acc = LinearForm.constant(n, 0)
        for form, m in zip(fm, ms):
            acc = acc.add(form.scale(m))
        pieces.append(acc)
    return PwlFunction(cx, tuple(pieces), mv=False)


def is_constant(f: PwlFunction, c) -> bool:
    c = Fraction(c)
    return all(v == c for v in f.vertex_values().values())


# -- zero sets ----------------------------------------------------------------

def zeroset(f: PwlFunction) -> Complex:
    """Triangulation of ``f^-1(0)`` for a nonnegative function ``f``."""
    faces = []
    for s, form in f.items():
        vals = [form(v) for v in s]
        if any(x < 0 for x in vals):
            raise GeometryError("zeroset expects a nonnegative function")
        zs = [v for v, x in zip(s, vals) if x == 0]
        if zs:
            faces.append(zs)
    return Complex.from_simplices(f.dim, faces)


# -- Z-maps -------------------------------------------------------------------

@dataclass(frozen=True)
class ZMap:
    """A tuple of piecewise-linear functions on one shared carrier."""

    carrier: Complex
    forms: tuple  # per maximal simplex: tuple of k LinearForms

    @property
    def k(self) -> int:
        return len(self.forms[0]) if self.forms else 0

    @property
    def dim(self) -> int:
        return self.carrier.dim

    def image_of_vertex_in(self, i: int, v: Point) -> Point:
        return tuple(form(v) for form in self.forms[i])

    def __call__(self, x: Sequence) -> Point:
        x = as_point(x)
        for s, fs in zip(self.carrier.simplexes, self.forms):
            if in_simplex(s, x):
                return tuple(form(x) for form in fs)
        raise GeometryError("point outside the support")

    def vertex_images(self) -> dict:
        out = {}
        for s, fs in zip(self.carrier.simplexes, self.forms):
            for v in s:
                if v not in out:
                    out[v] = tuple(form(v) for form in fs)
        return out

    def component(self, j: int) -> PwlFunction:
        return PwlFunction(self.carrier, tuple(fs[j] for fs in self.forms))

    def refine(self, cx: Complex) -> "ZMap":
        """Same map on a refinement of the carrier."""
        forms = []
        for s in cx.simplexes:
            b = tuple(sum(c) / len(s) for c in zip(*s))
            for t, fs in zip(self.carrier.simplexes, self.forms):
                if in_simplex(t, b):
                    forms.append(fs)
                    break
            else:
                raise GeometryError("refinement leaves the carrier")
        return ZMap(cx, tuple(forms))


def zmap_of(fs: Sequence[PwlFunction], token=None) -> ZMap:
    cx, forms = overlay(fs, token)
    return ZMap(cx, tuple(forms))


def compile_tuple(ts: Sequence[T.Term], n: int, token=None) -> ZMap:
    if not ts:
        raise ValueError("at least one term is required")
    return zmap_of([compile_term(t, n, token) for t in ts], token)


@dataclass(frozen=True)
class ImageComplex:
    """Vertex-image hulls ``g(T)`` over the maximal simplexes of a carrier."""

    sources: tuple      # maximal simplexes T
    images: tuple       # tuple of image points, aligned with T's vertices
    dims: tuple         # affine dimension of each image hull
    is_triangulation: bool

    def simplexes(self) -> list:
        return [tuple(sorted(set(im))) for im in self.images]


def image_complex(g: ZMap, token=None) -> ImageComplex:
    sources, images, dims = [], [], []
    ok = True
    for i, s in enumerate(g.carrier.simplexes):
        im = tuple(g.image_of_vertex_in(i, v) for v in s)
        d = affine_rank(list(im))
        sources.append(s)
        images.append(im)
        dims.append(d)
        if d != len(s) - 1:
            ok = False
    if ok:
        polys = [Polytope.from_points(im) for im in images]
        for a, b in combinations(range(len(polys)), 2):
            check(token)
            if not is_common_face(polys[a], polys[b]):
                ok = False
                break
    return ImageComplex(tuple(sources), tuple(images), tuple(dims), ok)


def range_polyhedron(g: ZMap, token=None) -> Complex:
    """Triangulation of the range of ``g``."""
    ic = image_complex(g, token)
    k = g.k
    if ic.is_triangulation:
        return Complex.from_simplices(k, ic.simplexes())
    polys = {}
    for im in ic.images:
        p = Polytope.from_points(im)
        polys[p.verts] = p
    cells = arrangement_cells(list(polys.values()))
    return triangulate_cells(cells, k)


# -- serialization ------------------------------------------------------------

def pwl_to_json(f: PwlFunction) -> dict:
    return {
        "carrier": complex_to_json(f.carrier),
        "pieces": [{"simplex": i, "coeffs": [fmt_rational(a) for a in form.coeffs],
                    "const": fmt_rational(form.const)}
                   for i, form in enumerate(f.pieces)],
    }


def pwl_from_json(obj: dict) -> PwlFunction:
    cx = complex_from_json(obj["carrier"])
    # simplexes are re-sorted on load; map the listed order onto canonical order
    listed = [tuple(sorted(tuple(parse_rational(c) for c in v) for v in s))
              for s in obj["carrier"]["simplexes"]]
    by_simplex = {}
    for piece in obj["pieces"]:
        s = listed[int(piece["simplex"])]
        coeffs = tuple(parse_rational(a) for a in piece["coeffs"])
        if len(coeffs) != cx.dim:
            raise GeometryError("coefficient vector has the wrong length")
        by_simplex[s] = LinearForm(coeffs, parse_rational(piece["const"]))
    try:
        pieces = tuple(by_simplex[s] for s in cx.simplexes)
    except KeyError as e:
        raise GeometryError("missing piece for a maximal simplex") from e
    f = PwlFunction(cx, pieces)
    _check_continuous(f)
    return f


def _check_continuous(f: PwlFunction) -> None:
    seen: dict = {}
    for s, form in f.items():
        for v in s:
            val = form(v)
            if seen.setdefault(v, val) != val:
                raise GeometryError("pieces disagree at a shared vertex")
