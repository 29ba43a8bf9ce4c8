"""Exact rational convex polytopes.

A :class:`Polytope` stores its vertices in ambient coordinates together with
an affine frame of its hull.  The frame is chosen in reduced echelon form, so
the local coordinates of an ambient point ``x`` of the hull are simply the
pivot coordinates ``x[J]``.  Facets are kept as inequalities ``c . x[J] <= e``
in those local coordinates.

Everything is exact (``Fraction``); dimensions are small, so facet
enumeration by brute force is fine.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from .linalg import affine_rank, inverse, nullspace, rank, rref

Point = tuple  # tuple[Fraction, ...]
ZERO = Fraction(0)
ONE = Fraction(1)


def as_point(xs: Iterable) -> Point:
    return tuple(Fraction(x) for x in xs)


def _dot(a, b):
    s = ZERO
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


class Polytope:
    """Convex hull of finitely many rational points."""

    __slots__ = ("verts", "ambient", "dim", "pivots", "origin", "basis",
                 "cons", "tight", "_edges", "_facets")

    def __init__(self, verts, ambient, dim, pivots, origin, basis, cons, tight):
        self.verts = verts
        self.ambient = ambient
        self.dim = dim
        self.pivots = pivots
        self.origin = origin
        self.basis = basis
        self.cons = cons
        self.tight = tight
        self._edges = None
        self._facets = None

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "Polytope":
        pts = sorted(set(as_point(p) for p in points))
        if not pts:
            raise ValueError("empty point set")
        ambient = len(pts[0])
        p0 = pts[0]
        basis, pivots = rref([[a - b for a, b in zip(p, p0)] for p in pts[1:]])
        dim = len(pivots)
        if dim == ambient:
            basis = [[ONE if i == j else ZERO for j in range(ambient)] for i in range(ambient)]
            origin = (ZERO,) * ambient
        else:
            origin = p0
        frame = (tuple(pivots), origin, tuple(tuple(r) for r in basis))
        local = [tuple(p[j] for j in pivots) for p in pts]
        if dim == 0:
            return cls((p0,), ambient, 0, *frame, (), (frozenset(),))
        if len(pts) == dim + 1:
            return cls._simplex(pts, local, ambient, dim, frame)
        cons = _hull_facets(local, dim)
        return cls._finish(pts, local, ambient, dim, frame, cons)

    @classmethod
    def _simplex(cls, pts, local, ambient, dim, frame):
        inv = inverse([list(y) + [ONE] for y in local])
        cons = []
        for i in range(dim + 1):
            c = tuple(-inv[k][i] for k in range(dim))
            cons.append((c, inv[dim][i]))
        tight = tuple(frozenset(j for j in range(dim + 1) if j != i) for i in range(dim + 1))
        return cls(tuple(pts), ambient, dim, *frame, tuple(cons), tight)

    @classmethod
    def _finish(cls, pts, local, ambient, dim, frame, cons):
        """Keep facet-defining constraints and extreme points only."""
        cons = list(cons)
        tight_pts = [[i for i, y in enumerate(local) if _dot(c, y) == e] for c, e in cons]
        keep = []
        for k, idx in enumerate(tight_pts):
            if len(idx) >= dim and affine_rank([local[i] for i in idx]) == dim - 1:
                keep.append(k)
        cons = [cons[k] for k in keep]
        vert_tight = [frozenset(k for k, c in enumerate(cons) if _dot(c[0], y) == c[1]) for y in local]
        verts, tight = [], []
        for p, y, t in zip(pts, local, vert_tight):
            if len(t) >= dim and (dim <= 1 or rank([cons[k][0] for k in t]) == dim):
                verts.append(p)
                tight.append(t)
        return cls(tuple(verts), ambient, dim, *frame, tuple(cons), tuple(tight))

    @classmethod
    def cube(cls, n: int) -> "Polytope":
        return cls.from_points(product((ZERO, ONE), repeat=n))

    # -- frame helpers --------------------------------------------------------

    def local(self, x: Sequence) -> tuple:
        return tuple(x[j] for j in self.pivots)

    def restrict(self, a: Sequence, d) -> tuple[tuple, Fraction]:
        """Express the ambient affine function ``a . x + d`` in local coordinates."""
        if self.dim == self.ambient:
            return tuple(Fraction(v) for v in a), Fraction(d)
        c = tuple(_dot(b, a) for b in self.basis)
        k = _dot(a, self.origin) + d - _dot(c, self.local(self.origin))
        return c, k

    def in_hull(self, x: Sequence) -> bool:
        if self.dim == self.ambient:
            return True
        y = self.local(x)
        o = self.origin
        oy = self.local(o)
        for j in range(self.ambient):
            v = o[j] + sum((yi - oi) * b[j] for yi, oi, b in zip(y, oy, self.basis))
            if v != x[j]:
                return False
        return True

    def contains(self, x: Sequence) -> bool:
        x = as_point(x)
        if len(x) != self.ambient or not self.in_hull(x):
            return False
        y = self.local(x)
        return all(_dot(c, y) <= e for c, e in self.cons)

    def equalities(self) -> list[tuple[tuple, Fraction]]:
        """Ambient affine functions ``a . x + d`` vanishing on the hull."""
        out = []
        piv = self.pivots
        o = self.origin
        for j in range(self.ambient):
            if j in piv:
                continue
            a = [ZERO] * self.ambient
            a[j] = ONE
            d = -o[j]
            for i, pj in enumerate(piv):
                a[pj] = -self.basis[i][j]
                d += o[pj] * self.basis[i][j]
            out.append((tuple(a), d))
        return out

    def inequalities(self) -> list[tuple[tuple, Fraction]]:
        """Ambient extensions ``a . x + d <= 0`` of the facet inequalities."""
        out = []
        for c, e in self.cons:
            a = [ZERO] * self.ambient
            for ci, j in zip(c, self.pivots):
                a[j] = ci
            out.append((tuple(a), -e))
        return out

    def hyperplanes(self) -> list[tuple[tuple, Fraction]]:
        return self.equalities() + self.inequalities()

    # -- combinatorics --------------------------------------------------------

    def edges(self) -> list[tuple[int, int]]:
        if self._edges is None:
            out = []
            if self.dim == 1:
                out = [(0, 1)]
            elif self.dim >= 2:
                for i, j in combinations(range(len(self.verts)), 2):
                    common = self.tight[i] & self.tight[j]
                    if not common:
                        continue
                    if self.dim == 2 or rank([self.cons[k][0] for k in common]) == self.dim - 1:
                        out.append((i, j))
            self._edges = out
        return self._edges

    def facets(self) -> list[frozenset]:
        """Facets as vertex sets."""
        if self._facets is None:
            out = []
            for k in range(len(self.cons)):
                out.append(frozenset(v for v, t in zip(self.verts, self.tight) if k in t))
            self._facets = out
        return self._facets

    def is_simplex(self) -> bool:
        return len(self.verts) == self.dim + 1

    def barycenter(self) -> Point:
        n = len(self.verts)
        return tuple(sum(c) / n for c in zip(*self.verts))

    def bbox(self) -> tuple[Point, Point]:
        cols = list(zip(*self.verts))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)

    # -- cutting --------------------------------------------------------------

    def values(self, a: Sequence, d) -> list[Fraction]:
        return [_dot(a, v) + d for v in self.verts]

    def clip(self, a: Sequence, d) -> "Polytope | None":
        """Intersection with the half-space ``a . x + d <= 0`` (any dimension)."""
        vals = self.values(a, d)
        lo, hi = min(vals), max(vals)
        if hi <= 0:
            return self
        if lo > 0:
            return None
        if lo == 0:
            return Polytope.from_points([v for v, s in zip(self.verts, vals) if s == 0])
        return self._cut(a, d, vals)

    def split(self, a: Sequence, d) -> list["Polytope"]:
        """Pieces of full (own) dimension on either side of ``a . x + d = 0``."""
        vals = self.values(a, d)
        if min(vals) >= 0 or max(vals) <= 0:
            return [self]
        neg = [-x for x in a]
        return [self._cut(a, d, vals), self._cut(neg, -d, [-s for s in vals])]

    def _cut(self, a, d, vals) -> "Polytope":
        # precondition: some value < 0 < some value
        new_pts = [v for v, s in zip(self.verts, vals) if s <= 0]
        for i, j in self.edges():
            si, sj = vals[i], vals[j]
            if (si < 0 < sj) or (sj < 0 < si):
                t = si / (si - sj)
                u, w = self.verts[i], self.verts[j]
                new_pts.append(tuple(x + t * (y - x) for x, y in zip(u, w)))
        c, k = self.restrict(a, d)
        cons = list(self.cons) + [(c, -k)]
        pts = sorted(set(new_pts))
        local = [self.local(p) for p in pts]
        frame = (self.pivots, self.origin, self.basis)
        return Polytope._finish(pts, local, self.ambient, self.dim, frame, cons)

    def intersect(self, other: "Polytope") -> "Polytope | None":
        p: Polytope | None = self
        for a, d in other.equalities():
            p = p.clip(a, d)
            if p is None:
                return None
            p = p.clip(tuple(-x for x in a), -d)
            if p is None:
                return None
        for a, d in other.inequalities():
            p = p.clip(a, d)
            if p is None:
                return None
        return p

    def minimal_face(self, pts: Iterable[Point]) -> frozenset:
        """Vertex set of the smallest face containing all of ``pts``."""
        pts = list(pts)
        ks = [k for k, (c, e) in enumerate(self.cons)
              if all(_dot(c, self.local(p)) == e for p in pts)]
        return frozenset(v for v, t in zip(self.verts, self.tight) if all(k in t for k in ks))

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, verts={len(self.verts)})"


def _hull_facets(local: list[tuple], dim: int) -> list[tuple[tuple, Fraction]]:
    if dim == 1:
        ys = [y[0] for y in local]
        return [((-ONE,), -min(ys)), ((ONE,), max(ys))]
    seen = set()
    out = []
    for sub in combinations(range(len(local)), dim):
        q0 = local[sub[0]]
        rows = [[a - b for a, b in zip(local[i], q0)] for i in sub[1:]]
        ns = nullspace(rows, dim)
        if len(ns) != 1:
            continue
        c = ns[0]
        e = _dot(c, q0)
        s = [_dot(c, y) - e for y in local]
        if all(x <= 0 for x in s):
            pass
        elif all(x >= 0 for x in s):
            c = [-x for x in c]
            e = -e
        else:
            continue
        key = frozenset(i for i, x in enumerate(s) if x == 0)
        if key in seen:
            continue
        seen.add(key)
        out.append((tuple(c), e))
    return out


def pulling_triangulation(poly: Polytope) -> list[tuple]:
    """Triangulate ``poly`` without new vertices by pulling lexicographically
    least vertices.  The result on each face depends only on the face's own
    vertex set, so cells of a polyhedral complex triangulate compatibly."""
    if poly.is_simplex():
        return [poly.verts]
    facets = poly.facets()
    dims: dict[frozenset, int] = {}

    def fdim(f: frozenset) -> int:
        if f not in dims:
            dims[f] = affine_rank(sorted(f))
        return dims[f]

    def subfacets(face: frozenset, d: int) -> set:
        if d == poly.dim:
            return set(facets)
        out = set()
        for g in facets:
            h = face & g
            if h != face and len(h) >= d and fdim(h) == d - 1:
                out.add(h)
        return out

    def rec(face: frozenset, d: int) -> list[tuple]:
        if len(face) == d + 1:
            return [tuple(sorted(face))]
        apex = min(face)
        out = []
        for g in subfacets(face, d):
            if apex in g:
                continue
            for s in rec(g, d - 1):
                out.append(tuple(sorted(s + (apex,))))
        return out

    return rec(frozenset(poly.verts), poly.dim)
