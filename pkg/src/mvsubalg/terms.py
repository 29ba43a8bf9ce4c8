"""MV-terms: syntax trees, parsing, printing, desugaring and evaluation.

Terms are immutable.  Builders such as the term synthesizer share subterms,
so a term may be a DAG; every traversal here memoizes on node identity and
never relies on structural hashing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence


class ParseError(ValueError):
    """Syntax error or out-of-range variable, with the offending position."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.text = text


class Term:
    __slots__ = ()

    def children(self) -> tuple["Term", ...]:
        return ()

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, eq=True, slots=True)
class Zero(Term):
    pass


@dataclass(frozen=True, eq=True, slots=True)
class One(Term):
    pass


@dataclass(frozen=True, eq=True, slots=True)
class Var(Term):
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise ValueError("variable index must be a positive integer")


@dataclass(frozen=True, eq=True, slots=True)
class Neg(Term):
    child: Term

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=True, slots=True)
class Binary(Term):
    left: Term
    right: Term
    symbol = "?"

    def children(self):
        return (self.left, self.right)


class OPlus(Binary):
    __slots__ = ()
    symbol = "+"


class OTimes(Binary):
    __slots__ = ()
    symbol = "."


class Meet(Binary):
    __slots__ = ()
    symbol = "/\\"


class Join(Binary):
    __slots__ = ()
    symbol = "\\/"


class TruncSub(Binary):
    __slots__ = ()
    symbol = "-"


class Implies(Binary):
    __slots__ = ()
    symbol = "->"


ZERO = Zero()
ONE = One()

# loosest first; each level is left-associative
_LEVELS: list[dict[str, type]] = [
    {"->": Implies},
    {"\\/": Join},
    {"/\\": Meet},
    {"-": TruncSub},
    {"+": OPlus},
    {".": OTimes},
]

_TOKEN = re.compile(r"\s*(?:(x\d+)|(->|/\\|\\/|[-+.~()01]))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            p = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[p]!r}", p, text)
        tok = m.group(1) or m.group(2)
        out.append((tok, m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, arity: int):
        self.text = text
        self.arity = arity
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def fail(self, msg: str):
        raise ParseError(msg, self.pos(), self.text)

    def parse(self) -> Term:
        if not self.toks:
            self.fail("empty term")
        t = self.binary(0)
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()!r}")
        return t

    def binary(self, level: int) -> Term:
        if level == len(_LEVELS):
            return self.unary()
        ops = _LEVELS[level]
        left = self.binary(level + 1)
        while self.peek() in ops:
            cls = ops[self.peek()]
            self.i += 1
            left = cls(left, self.binary(level + 1))
        return left

    def unary(self) -> Term:
        tok = self.peek()
        if tok == "~":
            self.i += 1
            return Neg(self.unary())
        if tok == "(":
            self.i += 1
            t = self.binary(0)
            if self.peek() != ")":
                self.fail("expected ')'")
            self.i += 1
            return t
        if tok == "0":
            self.i += 1
            return ZERO
        if tok == "1":
            self.i += 1
            return ONE
        if tok is not None and tok.startswith("x"):
            k = int(tok[1:])
            if k < 1 or k > self.arity:
                self.fail(f"variable {tok} out of range for arity {self.arity}")
            self.i += 1
            return Var(k)
        self.fail("expected a term" if tok is None else f"unexpected {tok!r}")


def parse_term(text: str, arity: int) -> Term:
    """Parse ``text`` as a term over the variables x1..x<arity>."""
    if not isinstance(arity, int) or arity < 1:
        raise ValueError("arity must be a positive integer")
    return _Parser(text, arity).parse()


# -- traversal helpers --------------------------------------------------------

def _fold(t: Term, leaf: Callable[[Term], object], node: Callable[[Term, list], object]):
    """Post-order fold with memoization by node identity (iterative)."""
    memo: dict[int, object] = {}
    keep = []
    stack = [(t, False)]
    while stack:
        u, done = stack.pop()
        if id(u) in memo:
            continue
        kids = u.children()
        if not kids:
            memo[id(u)] = leaf(u)
            keep.append(u)
        elif done:
            memo[id(u)] = node(u, [memo[id(c)] for c in kids])
            keep.append(u)
        else:
            stack.append((u, True))
            for c in kids:
                if id(c) not in memo:
                    stack.append((c, False))
    return memo[id(t)]


def print_term(t: Term) -> str:
    def leaf(u):
        if isinstance(u, Zero):
            return "0"
        if isinstance(u, One):
            return "1"
        return f"x{u.index}"

    def node(u, kids):
        if isinstance(u, Neg):
            return "~" + kids[0]
        return f"({kids[0]}{u.symbol}{kids[1]})"

    return _fold(t, leaf, node)


def max_var(t: Term) -> int:
    """Largest variable index occurring in ``t`` (0 for closed terms)."""
    return _fold(t, lambda u: u.index if isinstance(u, Var) else 0,
                 lambda u, kids: max(kids))


def dag_size(t: Term) -> int:
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if id(u) in seen:
            continue
        seen.add(id(u))
        stack.extend(u.children())
    return len(seen)


def depth(t: Term) -> int:
    return _fold(t, lambda u: 0, lambda u, kids: 1 + max(kids))


# -- desugaring ---------------------------------------------------------------

def desugar(t: Term) -> Term:
    """Rewrite ``t`` over the core signature {0, +, ~} only."""

    def leaf(u):
        return Neg(ZERO) if isinstance(u, One) else u

    def node(u, kids):
        if isinstance(u, Neg):
            return u if kids[0] is u.child else Neg(kids[0])
        a, b = kids
        if isinstance(u, OPlus):
            return u if (a is u.left and b is u.right) else OPlus(a, b)
        if isinstance(u, OTimes):
            return otimes(a, b)
        if isinstance(u, Meet):
            return otimes(a, OPlus(Neg(a), b))
        if isinstance(u, Join):
            return OPlus(otimes(a, Neg(b)), b)
        if isinstance(u, TruncSub):
            return otimes(a, Neg(b))
        if isinstance(u, Implies):
            return OPlus(Neg(a), b)
        raise TypeError(f"unknown node {type(u).__name__}")

    return _fold(t, leaf, node)


def otimes(a: Term, b: Term) -> Term:
    """Core form of ``a . b``."""
    return Neg(OPlus(Neg(a), Neg(b)))


def is_core(t: Term) -> bool:
    return _fold(t, lambda u: isinstance(u, (Zero, Var)),
                 lambda u, kids: isinstance(u, (Neg, OPlus)) and all(kids))


# -- evaluation ---------------------------------------------------------------

def _op_value(u: Term, kids: list[Fraction]) -> Fraction:
    if isinstance(u, Neg):
        return 1 - kids[0]
    a, b = kids
    if isinstance(u, OPlus):
        return min(Fraction(1), a + b)
    if isinstance(u, OTimes):
        return max(Fraction(0), a + b - 1)
    if isinstance(u, Meet):
        return min(a, b)
    if isinstance(u, Join):
        return max(a, b)
    if isinstance(u, TruncSub):
        return max(Fraction(0), a - b)
    if isinstance(u, Implies):
        return min(Fraction(1), 1 - a + b)
    raise TypeError(f"unknown node {type(u).__name__}")


def eval_term(t: Term, x: Sequence, arity: int | None = None) -> Fraction:
    """Exact value of the McNaughton function of ``t`` at ``x``."""
    x = tuple(Fraction(c) for c in x)
    if arity is not None and len(x) != arity:
        raise ValueError(f"point has dimension {len(x)}, expected {arity}")
    if any(not 0 <= c <= 1 for c in x):
        raise ValueError("point outside the unit cube")

    def leaf(u):
        if isinstance(u, Zero):
            return Fraction(0)
        if isinstance(u, One):
            return Fraction(1)
        if u.index > len(x):
            raise ValueError(f"variable x{u.index} exceeds point dimension {len(x)}")
        return x[u.index - 1]

    return _fold(t, leaf, _op_value)


# -- convenience builders -----------------------------------------------------

def big_join(ts: Sequence[Term]) -> Term:
    return _balanced(list(ts), Join, ZERO)


def big_meet(ts: Sequence[Term]) -> Term:
    return _balanced(list(ts), Meet, ONE)


def big_oplus(ts: Sequence[Term]) -> Term:
    return _balanced(list(ts), OPlus, ZERO)


def _balanced(ts: list[Term], cls: type, empty: Term) -> Term:
    if not ts:
        return empty
    while len(ts) > 1:
        ts = [cls(ts[i], ts[i + 1]) if i + 1 < len(ts) else ts[i]
              for i in range(0, len(ts), 2)]
    return ts[0]
