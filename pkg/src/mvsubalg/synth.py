"""Writing down MV-terms for given McNaughton functions.

:func:`synthesize_term` uses the max-min representation of a piecewise
linear function and a recursive builder for truncated integer affine forms.
:func:`term_for_hat` tracks Schauder hats through Farey blow-ups of the
standard cube triangulation.  Every returned term is checked against its
target by exact semantic comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import terms as T
from .cancel import CancellationToken, check
from .geometry import (Complex, GeometryError, blow_up, carrier_face,
                       homogeneous_correspondent, replay,
                       standard_cube_triangulation, volume)
from .hats import hat, schauder_hats
from .pwl import LinearForm, PwlFunction, compile_term, pwl_difference


class SynthesisError(RuntimeError):
    """A synthesized term failed semantic verification (internal error)."""


# -- smart constructors (constant folding only) ------------------------------

def neg(a: T.Term) -> T.Term:
    if isinstance(a, T.Zero):
        return T.ONE
    if isinstance(a, T.One):
        return T.ZERO
    if isinstance(a, T.Neg):
        return a.child
    return T.Neg(a)


def oplus(a: T.Term, b: T.Term) -> T.Term:
    if isinstance(a, T.Zero):
        return b
    if isinstance(b, T.Zero):
        return a
    if isinstance(a, T.One) or isinstance(b, T.One):
        return T.ONE
    return T.OPlus(a, b)


def otimes(a: T.Term, b: T.Term) -> T.Term:
    if isinstance(a, T.One):
        return b
    if isinstance(b, T.One):
        return a
    if isinstance(a, T.Zero) or isinstance(b, T.Zero):
        return T.ZERO
    return T.OTimes(a, b)


def meet_all(ts: Sequence[T.Term]) -> T.Term:
    if any(isinstance(t, T.Zero) for t in ts):
        return T.ZERO
    return T.big_meet([t for t in ts if not isinstance(t, T.One)])


def join_all(ts: Sequence[T.Term]) -> T.Term:
    if any(isinstance(t, T.One) for t in ts):
        return T.ONE
    return T.big_join([t for t in ts if not isinstance(t, T.Zero)])


# -- truncated affine forms ---------------------------------------------------

class TruncatedFormBuilder:
    """Terms for ``min(1, max(0, a . x + b))`` with integer ``a``, ``b``.

    Peels one unit of a positive coefficient at a time:
    ``T(l + x_i) = (T(l) + x_i) . T(l + 1)``; forms with no positive
    coefficient use ``T(l) = ~T(1 - l)``.  Results are shared across calls.
    """

    def __init__(self, n: int):
        self.n = n
        self.memo: dict[tuple, T.Term] = {}

    def __call__(self, coeffs: Sequence[int], const: int) -> T.Term:
        key = (tuple(int(a) for a in coeffs), int(const))
        stack = [key]
        while stack:
            k = stack[-1]
            if k in self.memo:
                stack.pop()
                continue
            deps = self._deps(k)
            todo = [d for d in deps if d not in self.memo]
            if todo:
                stack.extend(todo)
                continue
            stack.pop()
            self.memo[k] = self._build(k)
        return self.memo[key]

    @staticmethod
    def _range(k):
        a, b = k
        lo = b + sum(x for x in a if x < 0)
        hi = b + sum(x for x in a if x > 0)
        return lo, hi

    def _deps(self, k):
        a, b = k
        lo, hi = self._range(k)
        if hi <= 0 or lo >= 1:
            return []
        i = next((j for j, x in enumerate(a) if x > 0), None)
        if i is None:
            return [(tuple(-x for x in a), 1 - b)]
        rest = tuple(x - 1 if j == i else x for j, x in enumerate(a))
        return [(rest, b), (rest, b + 1)]

    def _build(self, k):
        a, b = k
        lo, hi = self._range(k)
        if hi <= 0:
            return T.ZERO
        if lo >= 1:
            return T.ONE
        i = next((j for j, x in enumerate(a) if x > 0), None)
        if i is None:
            return neg(self.memo[(tuple(-x for x in a), 1 - b)])
        rest = tuple(x - 1 if j == i else x for j, x in enumerate(a))
        return otimes(oplus(self.memo[(rest, b)], T.Var(i + 1)), self.memo[(rest, b + 1)])


def truncated_form_term(form: LinearForm) -> T.Term:
    if not form.is_integral():
        raise ValueError("truncation terms need integer coefficients")
    return TruncatedFormBuilder(len(form.coeffs))(form.coeffs, form.const)


# -- synthesis ----------------------------------------------------------------

def verify(t: T.Term, f: PwlFunction, token=None) -> None:
    diff = pwl_difference(compile_term(t, f.dim, token), f, token)
    if diff is not None:
        raise SynthesisError(f"synthesized term differs from its target at {diff}")


def synthesize_term(f: PwlFunction, token: CancellationToken | None = None) -> T.Term:
    """An MV-term whose McNaughton function is ``f`` (defined on the whole cube)."""
    n = f.dim
    if not f.is_integral():
        raise ValueError("the function has a piece with non-integer coefficients")
    if volume(f.carrier) != 1:
        raise ValueError("the function must be defined on the whole unit cube")
    if any(not 0 <= x <= 1 for x in f.vertex_values().values()):
        raise ValueError("the function takes values outside [0,1]")
    forms = sorted(set(f.pieces))
    index = {form: i for i, form in enumerate(forms)}
    sets = set()
    for s, form in f.items():
        check(token)
        vals = {v: form(v) for v in s}
        dominating = frozenset(j for j, other in enumerate(forms)
                               if all(other(v) >= vals[v] for v in s))
        assert index[form] in dominating
        sets.add(dominating)
    # a superset yields a smaller meet, which the join absorbs
    minimal = sorted((s for s in sets if not any(o < s for o in sets)), key=sorted)
    build = TruncatedFormBuilder(n)
    trunc = [build(form.coeffs, form.const) for form in forms]
    t = join_all([meet_all([trunc[j] for j in sorted(s)]) for s in minimal])
    verify(t, f, token)
    return t


# -- hats through Farey blow-ups ---------------------------------------------

@dataclass(frozen=True)
class ProvenancedComplex:
    """A complex obtained from the standard triangulation of ``[0,1]^n``
    by the blow-ups in ``history``."""

    n: int
    history: tuple = ()

    @property
    def complex(self) -> Complex:
        return replay(standard_cube_triangulation(self.n), self.history)


def base_hat_term(v: Sequence, n: int) -> T.Term:
    """Hat at a 0/1 vertex of the standard cube triangulation.

    ``(meet of x_i, i in S) - (join of x_j, j not in S)`` where ``S`` is the
    set of coordinates equal to 1.
    """
    ones = [T.Var(i + 1) for i in range(n) if v[i] == 1]
    zeros = [T.Var(i + 1) for i in range(n) if v[i] == 0]
    if not ones:
        return T.Neg(T.big_join(zeros))
    if not zeros:
        return T.big_meet(ones)
    return T.TruncSub(T.big_meet(ones), T.big_join(zeros))


def _is_mediant(face, c) -> bool:
    ct = homogeneous_correspondent(c)
    s = [sum(col) for col in zip(*(homogeneous_correspondent(v) for v in face))]
    return tuple(s) == ct


def hat_terms(p: ProvenancedComplex, token=None, verify_steps: bool = True) -> dict:
    """Terms for all Schauder hats of ``p.complex``.

    Farey blow-ups update the terms by ``t_c = meet(t_a for a in F)`` and
    ``t_a <- t_a - t_c``; any other step, or an update failing verification,
    falls back to direct synthesis on the final complex.
    """
    n = p.n
    cx = standard_cube_triangulation(n)
    tm = {v: base_hat_term(v, n) for v in cx.vertices()}
    for c in p.history:
        check(token)
        c = tuple(Fraction(x) for x in c)
        face = carrier_face(cx, c)
        if len(face) < 2 or not _is_mediant(face, c):
            return _synthesized_hats(p.complex, token)
        tc = T.big_meet([tm[a] for a in face])
        for a in face:
            tm[a] = T.TruncSub(tm[a], tc)
        tm[c] = tc
        cx = blow_up(cx, c, face)
        if verify_steps:
            for v in list(face) + [c]:
                target = hat(cx, v, Fraction(1, homogeneous_correspondent(v)[-1]))
                if pwl_difference(compile_term(tm[v], n, token), target, token) is not None:
                    return _synthesized_hats(p.complex, token)
    return tm


def _synthesized_hats(cx: Complex, token=None) -> dict:
    hs = schauder_hats(cx)
    return {v: synthesize_term(h, token) for v, h in zip(hs.vertices, hs.hats)}


def term_for_hat(p: ProvenancedComplex, v: Sequence, token=None) -> T.Term:
    v = tuple(Fraction(x) for x in v)
    tm = hat_terms(p, token)
    if v not in tm:
        raise GeometryError("not a vertex of the complex")
    t = tm[v]
    target = hat(p.complex, v, Fraction(1, homogeneous_correspondent(v)[-1]))
    verify(t, target, token)
    return t
