"""Decision procedures on finitely generated subalgebras of free MV-algebras.

Every procedure returns a report with a verdict and a witness that can be
replayed by plain evaluation or arithmetic.  Procedures whose problem is only
posed for separating generators raise :class:`PreconditionError` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

from . import terms as T
from .cancel import CancellationToken, check
from .geometry import (Complex, GeometryError, _bbox, _bbox_overlap, _normalize_plane,
                       barycentric, blow_up, denominator, desingularize, fmt_point, in_simplex,
                       in_support, is_connected, is_strongly_regular,
                       simplex_index, support_equal, triangulate_cells)
from .hats import (HatSet, WeightedTriangulation, hats_of, is_basic,
                   multipliers, schauder_hats, verify_unit_partition)
from .linalg import nullspace
from .polytope import Polytope
from .pwl import (ImageComplex, ZMap, compile_term, image_complex,
                  range_polyhedron, zeroset, zmap_of)
from .synth import synthesize_term


class PreconditionError(ValueError):
    """The instance lies outside the hypotheses under which the problem is posed."""


def _pt(p) -> list[str]:
    return fmt_point(p)


def _simplex_json(s) -> list[list[str]]:
    return [fmt_point(v) for v in s]


# -- separation ---------------------------------------------------------------

@dataclass
class SeparationReport:
    verdict: bool
    witness_pair: tuple | None
    reason: str
    linearizer: Complex
    image: ImageComplex
    zmap: ZMap

    @property
    def projective_flag(self) -> bool:
        return self.verdict

    def witness_json(self):
        if self.witness_pair is None:
            return None
        x, y = self.witness_pair
        return {"kind": self.reason, "x": _pt(x), "y": _pt(y),
                "image": _pt(self.zmap(x))}


def _compile_all(ts: Sequence[T.Term], n: int, token) -> ZMap:
    if not ts:
        raise ValueError("at least one term is required")
    return zmap_of([compile_term(t, n, token) for t in ts], token)


def _collapse_witness(s, im):
    """Two distinct points of ``s`` with the same image, from an affine
    dependency among the image vertices."""
    m = len(s)
    rows = [[p[j] for p in im] for j in range(len(im[0]))] + [[Fraction(1)] * m]
    mu = nullspace(rows, m)[0]
    pos = [max(c, 0) for c in mu]
    neg = [max(-c, 0) for c in mu]
    tot = sum(pos)
    x = tuple(sum(c * v[j] for c, v in zip(pos, s)) / tot for j in range(len(s[0])))
    y = tuple(sum(c * v[j] for c, v in zip(neg, s)) / tot for j in range(len(s[0])))
    return x, y


def _from_bary(s, lam):
    return tuple(sum(l * v[j] for l, v in zip(lam, s)) for j in range(len(s[0])))


def _separation_on(g: ZMap, token=None) -> tuple[bool, tuple | None, str]:
    cx = g.carrier
    images = g.vertex_images()
    seen: dict = {}
    for v in sorted(images):
        w = images[v]
        if w in seen:
            return False, (seen[w], v), "vertices with equal images"
        seen[w] = v
    ims = []
    for i, s in enumerate(cx.simplexes):
        im = tuple(images[v] for v in s)
        poly = Polytope.from_points(im)
        if poly.dim != len(s) - 1:
            return False, _collapse_witness(s, im), "collapsed simplex"
        ims.append((s, im, poly, poly.bbox()))
    for (s, im, p, pb), (t, jm, q, qb) in combinations(ims, 2):
        check(token)
        if not _bbox_overlap(pb, qb):
            continue
        inter = p.intersect(q)
        if inter is None:
            continue
        for z in inter.verts:
            x = _from_bary(s, barycentric(im, z))
            y = _from_bary(t, barycentric(jm, z))
            if x != y:
                return False, (x, y), "overlapping images"
    return True, None, "injective"


def check_separation(ts: Sequence[T.Term], n: int,
                     token: CancellationToken | None = None) -> SeparationReport:
    g = _compile_all(ts, n, token)
    ok, pair, reason = _separation_on(g, token)
    return SeparationReport(ok, pair, reason, g.carrier, image_complex(g, token), g)


def _require_separating(ts, n, token, label="generators") -> SeparationReport:
    rep = check_separation(ts, n, token)
    if not rep.verdict:
        x, y = rep.witness_pair
        raise PreconditionError(
            f"{label} do not separate points: {_pt(x)} and {_pt(y)} have the same image")
    return rep


# -- isomorphism to the free algebra -----------------------------------------

@dataclass
class IsoReport:
    verdict: bool
    bad_simplex: tuple | None = None     # (source simplex, image simplex)
    bad_vertex: tuple | None = None      # (v, g(v))
    regular_linearizer: Complex | None = None

    def witness_json(self):
        if self.bad_simplex is not None:
            s, im = self.bad_simplex
            return {"kind": "non-regular image simplex", "simplex": _simplex_json(s),
                    "image": _simplex_json(im), "index": simplex_index(im)}
        if self.bad_vertex is not None:
            v, w = self.bad_vertex
            return {"kind": "denominator drop", "vertex": _pt(v), "image": _pt(w),
                    "den_vertex": denominator(v), "den_image": denominator(w)}
        return None


def _iso_on(sep: SeparationReport, token=None) -> IsoReport:
    sigma, _ = desingularize(sep.linearizer, token)
    g = sep.zmap.refine(sigma)
    images = g.vertex_images()
    for s in sigma.simplexes:
        check(token)
        im = tuple(sorted(images[v] for v in s))
        if simplex_index(im) != 1:
            return IsoReport(False, bad_simplex=(s, im), regular_linearizer=sigma)
    for v in sigma.vertices():
        if denominator(images[v]) != denominator(v):
            return IsoReport(False, bad_vertex=(v, images[v]), regular_linearizer=sigma)
    return IsoReport(True, regular_linearizer=sigma)


def check_iso_to_free(ts: Sequence[T.Term], n: int,
                      token: CancellationToken | None = None) -> IsoReport:
    return _iso_on(_require_separating(ts, n, token), token)


@dataclass
class FreenessReport:
    verdict: bool
    separation: SeparationReport
    iso: IsoReport | None

    def witness_json(self):
        if not self.separation.verdict:
            return {"failed": "separation", "detail": self.separation.witness_json()}
        if self.iso is not None and not self.iso.verdict:
            return {"failed": "isomorphism", "detail": self.iso.witness_json()}
        return None


def _freeness(ts, n, token) -> FreenessReport:
    sep = check_separation(ts, n, token)
    if not sep.verdict:
        return FreenessReport(False, sep, None)
    iso = _iso_on(sep, token)
    return FreenessReport(iso.verdict, sep, iso)


def check_free_and_separating(ts: Sequence[T.Term], n: int,
                              token: CancellationToken | None = None) -> FreenessReport:
    """Free and separating iff separating and isomorphic to the free algebra."""
    return _freeness(ts, n, token)


def check_equals_free(ts: Sequence[T.Term], n: int,
                      token: CancellationToken | None = None) -> FreenessReport:
    """Equal to the whole free algebra iff separating and isomorphic to it."""
    return _freeness(ts, n, token)


# -- basic presentations ------------------------------------------------------

@dataclass
class BasicPresentation:
    """Regular-image triangulation ``sigma`` of the cube with the map on it."""

    sigma: Complex
    zmap: ZMap            # all components, on sigma
    nabla: Complex        # regular triangulation of the range
    weights: tuple        # aligned with sigma.vertices()


def basic_presentation(g: ZMap, comps: Sequence[int], token=None) -> BasicPresentation:
    """Pull back a regular triangulation of the range of the ``comps``
    components of ``g`` (assumed injective) to the cube."""
    sigma0, _ = desingularize(g.carrier, token)
    g0 = g.refine(sigma0)

    def proj(w):
        return tuple(w[j] for j in comps)

    imgs = []
    for i, s in enumerate(sigma0.simplexes):
        im = tuple(proj(g0.image_of_vertex_in(i, v)) for v in s)
        imgs.append((s, im, _bbox(im)))
    image = Complex.from_simplices(len(comps), [im for _, im, _ in imgs])
    nabla, _ = desingularize(image, token)
    pulled = []
    for q in nabla.simplexes:
        check(token)
        qb = _bbox(q)
        bc = tuple(sum(c) / len(q) for c in zip(*q))
        for s, im, ib in imgs:
            if not _bbox_overlap(qb, ib) or not in_simplex(im, bc):
                continue
            pulled.append([_from_bary(s, barycentric(im, w)) for w in q])
            break
        else:
            raise GeometryError("range triangulation not covered by the images")
    sigma = Complex.from_simplices(g.dim, pulled)
    gs = g.refine(sigma)
    images = gs.vertex_images()
    weights = tuple(denominator(v) // denominator(proj(images[v])) for v in sigma.vertices())
    return BasicPresentation(sigma, gs, nabla, weights)


@dataclass
class BasisReport:
    weighted: WeightedTriangulation
    hats: HatSet
    terms: list
    multipliers: list
    is_basic: bool
    unit_partition: bool
    generates_same: bool
    nabla: Complex


def basis_from_generators(ts: Sequence[T.Term], n: int,
                          token: CancellationToken | None = None) -> BasisReport:
    sep = _require_separating(ts, n, token)
    pres = basic_presentation(sep.zmap, range(len(ts)), token)
    w = WeightedTriangulation(pres.sigma, pres.weights)
    hs = hats_of(w)
    basic = is_basic(w)
    if not basic:
        raise AssertionError("pulled-back hats are not basic")
    hat_terms = [synthesize_term(h, token) for h in hs.hats]
    unit = verify_unit_partition(hs)
    same = subalgebras_equal(ts, hat_terms, n, token).verdict
    if not (unit and same):
        raise AssertionError("basis postconditions failed")
    return BasisReport(w, hs, hat_terms, multipliers(w), basic, unit, same, pres.nabla)


# -- subalgebra equality ------------------------------------------------------

@dataclass
class EqualityReport:
    verdict: bool
    direction: str | None = None   # which inclusion fails
    generator: int | None = None   # j, index into the other list
    simplex: tuple | None = None   # T
    vertex: tuple | None = None    # v
    value: Fraction | None = None  # f_j(v)
    hat_value: Fraction | None = None  # q_v(v)

    def witness_json(self):
        if self.verdict:
            return None
        return {"direction": self.direction, "generator": self.generator,
                "simplex": _simplex_json(self.simplex), "vertex": _pt(self.vertex),
                "value": str(self.value), "hat_value": str(self.hat_value)}


def _inclusion(g: ZMap, a: list, b: list, token):
    """Is every function of components ``b`` in the algebra of components ``a``?

    Returns None or a failing ``(j, T, v, f_j(v), q_v(v))``.
    """
    pres = basic_presentation(g, a, token)
    images = pres.zmap.vertex_images()
    for i, s in enumerate(pres.sigma.simplexes):
        check(token)
        for v in s:
            q = Fraction(1, denominator(tuple(images[v][c] for c in a)))
            for j, c in enumerate(b):
                f = pres.zmap.forms[i][c](v)
                if (f / q).denominator != 1:
                    return j, s, v, f, q
    return None


def subalgebras_equal(ts1: Sequence[T.Term], ts2: Sequence[T.Term], n: int,
                      token: CancellationToken | None = None) -> EqualityReport:
    _require_separating(ts1, n, token, "first generators")
    _require_separating(ts2, n, token, "second generators")
    g = _compile_all(list(ts1) + list(ts2), n, token)
    a = list(range(len(ts1)))
    b = list(range(len(ts1), len(ts1) + len(ts2)))
    for label, x, y in (("first contains second", a, b), ("second contains first", b, a)):
        bad = _inclusion(g, x, y, token)
        if bad is not None:
            j, s, v, f, q = bad
            return EqualityReport(False, label, j, s, v, f, q)
    return EqualityReport(True)


# -- presentations as principal quotients ------------------------------------

@dataclass
class QuotientReport:
    sigma: T.Term
    k: int
    range_complex: Complex
    triangulation: Complex
    outside_vertices: list
    zeroset_matches: bool


def _cut_cube(planes_from: Complex, k: int) -> list:
    cube = Polytope.cube(k)
    polys = [Polytope.from_points(s) for s in planes_from.simplexes]
    planes = set()
    for p in polys:
        for a, d in p.hyperplanes():
            if any(a):
                planes.add(_normalize_plane(a, d))
    pieces = [cube]
    for a, d in sorted(planes):
        nxt = []
        for p in pieces:
            nxt.extend(p.split(a, d))
        pieces = nxt
    return pieces


def _fullness_defect(cx: Complex, rng: Complex):
    """Lowest-dimensional simplex with all vertices in the range but not contained in it."""
    inside = {v: in_support(rng, v) for v in cx.vertices()}
    cands = set()
    for s in cx.simplexes:
        vs = [v for v in s if inside[v]]
        for r in range(2, len(vs) + 1):
            cands.update(combinations(vs, r))
    for f in sorted(cands, key=lambda f: (len(f), f)):
        bc = tuple(sum(c) / len(f) for c in zip(*f))
        if not in_support(rng, bc):
            return f, bc
    return None


def generators_to_quotient(ts: Sequence[T.Term], n: int,
                           token: CancellationToken | None = None) -> QuotientReport:
    k = len(ts)
    g = _compile_all(ts, n, token)
    rng = range_polyhedron(g, token)
    cx = triangulate_cells(_cut_cube(rng, k), k)
    cx, _ = desingularize(cx, token)
    while True:
        check(token)
        bad = _fullness_defect(cx, rng)
        if bad is None:
            break
        face, bc = bad
        cx = blow_up(cx, bc, face)
        cx, _ = desingularize(cx, token)
    hs = schauder_hats(cx)
    outside = [(v, h) for v, h in zip(hs.vertices, hs.hats) if not in_support(rng, v)]
    sigma = T.big_oplus([synthesize_term(h, token) for _, h in outside])
    z = zeroset(compile_term(sigma, k, token))
    ok = support_equal(z, rng) if z.simplexes else not rng.simplexes
    if not ok:
        raise AssertionError("zeroset of the quotient term differs from the range")
    return QuotientReport(sigma, k, rng, cx, [v for v, _ in outside], ok)


# -- embeddability ------------------------------------------------------------

@dataclass
class EmbedReport:
    verdict: bool
    failed: str | None          # "a", "b", "c" or None
    reason: str
    zeroset: Complex
    regular_zeroset: Complex | None

    def witness_json(self):
        if self.verdict:
            return None
        return {"failed_condition": self.failed, "reason": self.reason}


def quotient_embeddable(sigma: T.Term, k: int,
                        token: CancellationToken | None = None) -> EmbedReport:
    z = zeroset(compile_term(sigma, k, token))
    if not z.simplexes:
        return EmbedReport(False, "a", "trivial quotient: empty zeroset", z, None)
    zr, _ = desingularize(z, token)
    if not any(denominator(v) == 1 for v in zr.vertices()):
        return EmbedReport(False, "a", "zeroset contains no vertex of the cube", z, zr)
    if not is_connected(zr):
        return EmbedReport(False, "b", "zeroset is not connected", z, zr)
    if not is_strongly_regular(zr):
        bad = next(s for s in zr.simplexes
                   if _gcd_dens(s) != 1)
        return EmbedReport(False, "c", "maximal simplex with vertex denominators "
                           f"{[denominator(v) for v in bad]} sharing a factor", z, zr)
    return EmbedReport(True, None, "conditions (a), (b), (c) hold", z, zr)


def _gcd_dens(s) -> int:
    out = 0
    for v in s:
        out = gcd(out, denominator(v))
    return out
