"""Formula AST, concrete syntax and substitutions.

Concrete grammar (loosest binding first)::

    imp   := or ( '->' imp )?                      right associative
    or    := and ( '|' and )*
    and   := unary ( '&' unary )*
    unary := '~' unary | 'dia[' AG ']' unary | 'box[' AG ']' unary
           | '[' EV ',' ID ']' unary | '<' EV ',' ID '>' unary | primary
    primary := 'true' | 'false' | ATOM | '(' imp ')'
           | 'pr[' AG ']' '(' terms ( '>=' | '>' ) RAT ')'
    terms := '0' | term ( ('+'|'-') term )*
    term  := ['-'] [RAT '*'] 'mu(' imp ')'

Atoms match ``[a-z][a-zA-Z0-9_]*``; rationals are integers, ``p/q`` or exact
decimals. ``~f`` abbreviates ``f -> false``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from ..errors import FormulaSyntaxError


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Dia(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class DynDia(Formula):
    event: str
    eid: str
    sub: Formula


@dataclass(frozen=True)
class DynBox(Formula):
    event: str
    eid: str
    sub: Formula


@dataclass(frozen=True)
class ProbGeq(Formula):
    """Σ coeff·μ_agent(formula) >= bound."""

    agent: str
    terms: tuple
    bound: Fraction


@dataclass(frozen=True)
class ProbGt(Formula):
    """Σ coeff·μ_agent(formula) > bound."""

    agent: str
    terms: tuple
    bound: Fraction


BOT = Bot()
TOP = Top()
Prob = (ProbGeq, ProbGt)


def Not(f: Formula) -> Formula:
    return Imp(f, BOT)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def prob(agent: str, terms, bound, strict: bool = False) -> Formula:
    terms = tuple((Fraction(c), f) for c, f in terms)
    cls = ProbGt if strict else ProbGeq
    return cls(str(agent), terms, Fraction(bound))


def big_or(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return BOT
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def big_and(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return TOP
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


# traversal ------------------------------------------------------------------------


def children(f: Formula) -> tuple:
    if isinstance(f, (And, Or, Imp)):
        return (f.left, f.right)
    if isinstance(f, (Dia, Box, DynDia, DynBox)):
        return (f.sub,)
    if isinstance(f, Prob):
        return tuple(g for _, g in f.terms)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for g in children(f):
        yield from subformulas(g)


def atoms(f: Formula) -> set:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def event_names(f: Formula) -> set:
    return {g.event for g in subformulas(f) if isinstance(g, (DynDia, DynBox))}


def is_static(f: Formula) -> bool:
    return not any(isinstance(g, (DynDia, DynBox)) for g in subformulas(f))


def dynamic_depth(f: Formula) -> int:
    own = 1 if isinstance(f, (DynDia, DynBox)) else 0
    return own + max((dynamic_depth(g) for g in children(f)), default=0)


def size(f: Formula) -> int:
    return 1 + sum(size(g) for g in children(f))


def apply_substitution(sigma: Mapping[str, Formula], f: Formula) -> Formula:
    """Replace atoms in ``dom(sigma)``; everything else is rebuilt unchanged."""
    if not sigma:
        return f
    if isinstance(f, Atom):
        return sigma.get(f.name, f)
    if isinstance(f, (Bot, Top)):
        return f
    if isinstance(f, (And, Or, Imp)):
        return type(f)(apply_substitution(sigma, f.left), apply_substitution(sigma, f.right))
    if isinstance(f, (Dia, Box)):
        return type(f)(f.agent, apply_substitution(sigma, f.sub))
    if isinstance(f, (DynDia, DynBox)):
        return type(f)(f.event, f.eid, apply_substitution(sigma, f.sub))
    if isinstance(f, Prob):
        return type(f)(f.agent, tuple((c, apply_substitution(sigma, g)) for c, g in f.terms), f.bound)
    raise TypeError(f"not a formula: {f!r}")


# printing ---------------------------------------------------------------------------

_IMP, _OR, _AND, _UNARY = 1, 2, 3, 4


def fmt_rational(q: Fraction) -> str:
    return str(Fraction(q))


def to_text(f: Formula) -> str:
    return _show(f, 0)


def _wrap(s: str, prec: int, ctx: int) -> str:
    return f"({s})" if prec < ctx else s


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Imp):
        if isinstance(f.right, Bot):
            return _wrap("~" + _show(f.left, _UNARY), _UNARY, ctx)
        return _wrap(f"{_show(f.left, _IMP + 1)} -> {_show(f.right, _IMP)}", _IMP, ctx)
    if isinstance(f, Or):
        return _wrap(f"{_show(f.left, _OR)} | {_show(f.right, _OR + 1)}", _OR, ctx)
    if isinstance(f, And):
        return _wrap(f"{_show(f.left, _AND)} & {_show(f.right, _AND + 1)}", _AND, ctx)
    if isinstance(f, Dia):
        return _wrap(f"dia[{f.agent}] {_show(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, Box):
        return _wrap(f"box[{f.agent}] {_show(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, DynBox):
        return _wrap(f"[{f.event},{f.eid}] {_show(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, DynDia):
        return _wrap(f"<{f.event},{f.eid}> {_show(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, Prob):
        parts = []
        for k, (c, g) in enumerate(f.terms):
            body = f"mu({_show(g, 0)})"
            if k == 0:
                parts.append(f"{fmt_rational(c)}*{body}")
            elif c < 0:
                parts.append(f"- {fmt_rational(-c)}*{body}")
            else:
                parts.append(f"+ {fmt_rational(c)}*{body}")
        lhs = " ".join(parts) if parts else "0"
        op = ">" if isinstance(f, ProbGt) else ">="
        return f"pr[{f.agent}]({lhs} {op} {fmt_rational(f.bound)})"
    raise TypeError(f"not a formula: {f!r}")


# parsing --------------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>->|>=|[&|~()\[\],<>*+\-])
""", re.VERBOSE)

_ATOM = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
_KEYWORDS = {"true", "false", "dia", "box", "pr", "mu"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
            kind = m.lastgroup
            if kind != "ws":
                self.toks.append((kind, m.group(), pos))
            pos = m.end()
        self.toks.append(("eof", "", len(text)))
        self.k = 0

    def peek(self, offset: int = 0):
        return self.toks[min(self.k + offset, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def error(self, msg: str):
        raise FormulaSyntaxError(msg, self.peek()[2], self.text)

    def expect(self, value: str):
        t = self.peek()
        if t[1] != value or t[0] == "eof":
            self.error(f"expected {value!r}, found {t[1] or 'end of input'!r}")
        return self.next()

    def ident(self, what: str) -> str:
        t = self.peek()
        if t[0] not in ("ident", "num"):
            self.error(f"expected {what}")
        self.next()
        return t[1]

    def parse(self) -> Formula:
        f = self.imp()
        if self.peek()[0] != "eof":
            self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->":
            self.next()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.next()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, _ = self.peek()
        if val == "~":
            self.next()
            return Imp(self.unary(), BOT)
        if kind == "ident" and val in ("dia", "box") and self.peek(1)[1] == "[":
            self.next()
            self.expect("[")
            agent = self.ident("agent")
            self.expect("]")
            sub = self.unary()
            return Dia(agent, sub) if val == "dia" else Box(agent, sub)
        if val == "[" and kind == "sym":
            self.next()
            ev = self.ident("event structure name")
            self.expect(",")
            eid = self.ident("event")
            self.expect("]")
            return DynBox(ev, eid, self.unary())
        if val == "<" and kind == "sym":
            self.next()
            ev = self.ident("event structure name")
            self.expect(",")
            eid = self.ident("event")
            self.expect(">")
            return DynDia(ev, eid, self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "(" and kind == "sym":
            self.next()
            f = self.imp()
            self.expect(")")
            return f
        if kind == "ident":
            if val == "true":
                self.next()
                return TOP
            if val == "false":
                self.next()
                return BOT
            if val == "pr" and self.peek(1)[1] == "[":
                return self.probability()
            if val in _KEYWORDS or not _ATOM.match(val):
                self.error(f"{val!r} is not an atom (atoms match [a-z][a-zA-Z0-9_]*)")
            self.next()
            return Atom(val)
        self.error(f"expected a formula, found {val or 'end of input'!r}")

    def rational(self) -> Fraction:
        sign = 1
        if self.peek()[1] == "-":
            self.next()
            sign = -1
        kind, val, _ = self.peek()
        if kind != "num":
            self.error("expected a rational number")
        self.next()
        return sign * Fraction(val)

    def probability(self) -> Formula:
        self.next()
        self.expect("[")
        agent = self.ident("agent")
        self.expect("]")
        self.expect("(")
        terms = []
        if self.peek()[0] == "num" and self.peek(1)[1] in (">=", ">") and self.peek()[1] == "0":
            self.next()
        else:
            sign = 1
            first = True
            while True:
                if not first or self.peek()[1] == "-":
                    t = self.peek()[1]
                    if t in ("+", "-"):
                        self.next()
                        sign = -1 if t == "-" else 1
                    elif not first:
                        break
                coeff = Fraction(1)
                if self.peek()[0] == "num":
                    coeff = self.rational()
                    self.expect("*")
                if self.peek()[1] != "mu":
                    self.error("expected mu(...)")
                self.next()
                self.expect("(")
                g = self.imp()
                self.expect(")")
                terms.append((sign * coeff, g))
                first = False
                sign = 1
                if self.peek()[1] not in ("+", "-"):
                    break
        op = self.peek()[1]
        if op not in (">=", ">"):
            self.error("expected '>=' or '>'")
        self.next()
        bound = self.rational()
        self.expect(")")
        cls = ProbGt if op == ">" else ProbGeq
        return cls(agent, tuple(terms), bound)


def parse(text: str) -> Formula:
    """Parse concrete syntax; raises ``FormulaSyntaxError`` with a position."""
    return _Parser(text).parse()
