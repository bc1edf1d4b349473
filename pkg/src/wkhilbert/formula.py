"""Propositional formulas over small signatures.

Formulas are immutable trees built from :class:`Var` leaves and :class:`App`
nodes.  Hashes and sizes are computed once at construction, so formulas are
cheap to use as dictionary keys and set members, which the proof search
relies on heavily.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Mapping, Optional, Sequence

NEG = "neg"
AND = "and"
OR = "or"
IMP = "imp"

SYMBOLS = {NEG: "~", AND: "&", OR: "|", IMP: "->"}
PRECEDENCE = {IMP: 1, OR: 2, AND: 3, NEG: 4}
ATOM_PREC = 5


@dataclass(frozen=True)
class Signature:
    name: str
    connectives: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for conn, arity in self.connectives.items():
            if arity < 0:
                raise ValueError(f"negative arity for {conn!r}")

    def __contains__(self, conn: str) -> bool:
        return conn in self.connectives

    def arity(self, conn: str) -> int:
        return self.connectives[conn]


SIG_ANDORNEG = Signature("and-or-neg", {AND: 2, OR: 2, NEG: 1})
SIG_IMPNEG = Signature("imp-neg", {IMP: 2, NEG: 1})
SIG_FULL = Signature("and-or-imp-neg", {AND: 2, OR: 2, IMP: 2, NEG: 1})

SIGNATURES = {s.name: s for s in (SIG_ANDORNEG, SIG_IMPNEG, SIG_FULL)}


class Formula:
    """Base class; use :class:`Var` and :class:`App`."""

    __slots__ = ("_hash", "size", "depth", "_text")

    def __lt__(self, other: "Formula") -> bool:
        return sort_key(self) < sort_key(other)

    def __str__(self) -> str:
        return render_formula(self)

    def __repr__(self) -> str:
        return f"<{render_formula(self)}>"


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.size = 1
        self.depth = 0
        self._text = None
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Var, (self.name,))


class App(Formula):
    __slots__ = ("conn", "args")

    def __init__(self, conn: str, args: Iterable[Formula]):
        self.conn = conn
        self.args = tuple(args)
        self.size = 1 + sum(a.size for a in self.args)
        self.depth = 1 + max((a.depth for a in self.args), default=-1)
        self._text = None
        self._hash = hash((conn, self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.conn == other.conn
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (App, (self.conn, self.args))


Substitution = Mapping[Var, Formula]


def var(name: str) -> Var:
    return Var(name)


def neg(a: Formula) -> App:
    return App(NEG, (a,))


def conj(a: Formula, b: Formula) -> App:
    return App(AND, (a, b))


def disj(a: Formula, b: Formula) -> App:
    return App(OR, (a, b))


def imp(a: Formula, b: Formula) -> Formula:
    """The BK/PWK abbreviation ``a -> b := ~a | b``."""
    return disj(neg(a), b)


def big_or(operands: Iterable[Formula]) -> Formula:
    """Left-associated disjunction of a nonempty sequence, in the given order."""
    ops = list(operands)
    if not ops:
        raise ValueError("big_or needs at least one operand")
    acc = ops[0]
    for f in ops[1:]:
        acc = disj(acc, f)
    return acc


def is_conn(f: Formula, conn: str) -> bool:
    return isinstance(f, App) and f.conn == conn


# --- parsing ---------------------------------------------------------------


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class SignatureError(ValueError):
    pass


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<var>[a-z][a-z0-9_]*)|(?P<op>->|/\\|\\/|[~!&|()]))"
)
_OP_NAMES = {"~": NEG, "!": NEG, "&": AND, "/\\": AND, "|": OR, "\\/": OR, "->": IMP}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise FormulaSyntaxError(f"unexpected character {text[start]!r}", text, start)
        start = m.start("var") if m.group("var") else m.start("op")
        if m.group("var"):
            tokens.append(("var", m.group("var"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature, expand_arrow: bool):
        self.text = text
        self.sig = sig
        self.expand_arrow = expand_arrow
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def peek_op(self) -> Optional[str]:
        kind, val, _ = self.tokens[self.i]
        return _OP_NAMES.get(val) if kind == "op" else None

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def build(self, conn: str, args: tuple[Formula, ...], pos: int) -> Formula:
        if conn == IMP and IMP not in self.sig:
            if not self.expand_arrow:
                raise SignatureError(f"connective -> not in signature {self.sig.name}")
            conn, args = OR, (self.build(NEG, (args[0],), pos), args[1])
        if conn not in self.sig:
            raise SignatureError(
                f"connective {SYMBOLS[conn]} not in signature {self.sig.name} (position {pos})"
            )
        return App(conn, args)

    def parse(self) -> Formula:
        f = self.imp()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise FormulaSyntaxError(f"unexpected token {val!r}", self.text, pos)
        return f

    def imp(self) -> Formula:
        left = self.or_()
        if self.peek_op() == IMP:
            pos = self.advance()[2]
            right = self.imp()
            return self.build(IMP, (left, right), pos)
        return left

    def or_(self) -> Formula:
        left = self.and_()
        while self.peek_op() == OR:
            pos = self.advance()[2]
            left = self.build(OR, (left, self.and_()), pos)
        return left

    def and_(self) -> Formula:
        left = self.neg()
        while self.peek_op() == AND:
            pos = self.advance()[2]
            left = self.build(AND, (left, self.neg()), pos)
        return left

    def neg(self) -> Formula:
        if self.peek_op() == NEG:
            pos = self.advance()[2]
            return self.build(NEG, (self.neg(),), pos)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.advance()
        if kind == "var":
            return Var(val)
        if kind == "op" and val == "(":
            f = self.imp()
            kind, val, pos2 = self.advance()
            if val != ")":
                raise FormulaSyntaxError("expected ')'", self.text, pos2)
            return f
        what = "end of input" if kind == "eof" else repr(val)
        raise FormulaSyntaxError(f"unexpected {what}", self.text, pos)


def parse_formula(text: str, sig: Signature = SIG_ANDORNEG, expand_arrow: Optional[bool] = None) -> Formula:
    """Parse ``text`` into a formula over ``sig``.

    Precedence is ``~ > & > | > ->``; ``&`` and ``|`` associate to the left and
    ``->`` to the right.  When ``sig`` has no ``->`` and ``expand_arrow`` is
    true, ``a -> b`` is built as ``~a | b``.  ``expand_arrow`` defaults to true
    for signatures without implication and is forced off for those with it.
    """
    if expand_arrow is None or IMP in sig:
        expand_arrow = IMP not in sig
    return _Parser(text, sig, expand_arrow).parse()


def parse_formula_list(text: str, sig: Signature = SIG_ANDORNEG, expand_arrow: Optional[bool] = None) -> list[Formula]:
    """Comma separated formulas; blank text or ``-`` is the empty list."""
    text = text.strip()
    if text in ("", "-"):
        return []
    return [parse_formula(part, sig, expand_arrow) for part in text.split(",")]


# --- printing --------------------------------------------------------------


def _prec(f: Formula) -> int:
    return ATOM_PREC if isinstance(f, Var) else PRECEDENCE.get(f.conn, ATOM_PREC)


def render_formula(f: Formula) -> str:
    if f._text is not None:
        return f._text
    if isinstance(f, Var):
        text = f.name
    elif f.conn == NEG:
        a = f.args[0]
        inner = render_formula(a)
        text = "~" + (inner if _prec(a) >= PRECEDENCE[NEG] else f"({inner})")
    elif f.conn in (AND, OR, IMP):
        p = PRECEDENCE[f.conn]
        left, right = f.args
        ls, rs = render_formula(left), render_formula(right)
        if f.conn == IMP:
            left_paren, right_paren = _prec(left) <= p, _prec(right) < p
        else:
            left_paren, right_paren = _prec(left) < p, _prec(right) <= p
        if left_paren:
            ls = f"({ls})"
        if right_paren:
            rs = f"({rs})"
        text = f"{ls} {SYMBOLS[f.conn]} {rs}"
    else:
        text = f"{f.conn}(" + ", ".join(render_formula(a) for a in f.args) + ")"
    f._text = text
    return text


def sort_key(f: Formula) -> tuple[int, str]:
    """Canonical order: size first, then rendered text."""
    return (f.size, render_formula(f))


def canonical(formulas: Iterable[Formula]) -> tuple[Formula, ...]:
    return tuple(sorted(set(formulas), key=sort_key))


# --- structure -------------------------------------------------------------


def variables(f: Formula) -> frozenset[Var]:
    if isinstance(f, Var):
        return frozenset((f,))
    out: set[Var] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g)
        else:
            stack.extend(g.args)
    return frozenset(out)


def variables_of(formulas: Iterable[Formula]) -> frozenset[Var]:
    out: set[Var] = set()
    for f in formulas:
        out |= variables(f)
    return frozenset(out)


def sorted_vars(vs: Iterable[Var]) -> list[Var]:
    return sorted(vs, key=lambda v: v.name)


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, App):
            stack.extend(g.args)
    return out


def subformulas_of(formulas: Iterable[Formula]) -> set[Formula]:
    out: set[Formula] = set()
    for f in formulas:
        out |= subformulas(f)
    return out


def connectives(f: Formula) -> set[str]:
    return {g.conn for g in subformulas(f) if isinstance(g, App)}


def check_signature(f: Formula, sig: Signature) -> None:
    for g in subformulas(f):
        if isinstance(g, App):
            if g.conn not in sig or sig.arity(g.conn) != len(g.args):
                raise SignatureError(f"{render_formula(g)} is not a formula over {sig.name}")


def substitute(f: Formula, s: Substitution) -> Formula:
    if isinstance(f, Var):
        return s.get(f, f)
    args = tuple(substitute(a, s) for a in f.args)
    if all(a is b for a, b in zip(args, f.args)):
        return f
    return App(f.conn, args)


def compose(s1: Substitution, s2: Substitution) -> dict[Var, Formula]:
    """``s2 after s1``: applying the result equals applying s1 then s2."""
    out = {v: substitute(t, s2) for v, t in s1.items()}
    for v, t in s2.items():
        out.setdefault(v, t)
    return out


def match_schema(pattern: Formula, target: Formula, bound: Optional[Substitution] = None) -> Optional[dict[Var, Formula]]:
    """One-sided matching: the unique ``s`` with ``substitute(pattern, s) == target``.

    ``bound`` pre-binds some variables.  Returns None when no such ``s`` exists.
    """
    s = dict(bound) if bound else {}
    return s if _match(pattern, target, s) else None


def _match(pattern: Formula, target: Formula, s: dict) -> bool:
    if isinstance(pattern, Var):
        seen = s.get(pattern)
        if seen is None:
            s[pattern] = target
            return True
        return seen == target
    if not isinstance(target, App) or target.conn != pattern.conn or len(target.args) != len(pattern.args):
        return False
    return all(_match(p, t, s) for p, t in zip(pattern.args, target.args))


def formulas_up_to(atoms: Sequence[Var], depth: int, sig: Signature = SIG_ANDORNEG) -> tuple[Formula, ...]:
    """Every formula over ``atoms`` and the connectives of ``sig`` with depth at most ``depth``."""
    levels = [list(atoms)]
    seen = set(atoms)
    for _ in range(depth):
        pool = [f for lvl in levels for f in lvl]
        new = []
        for conn in sorted(sig.connectives):
            for args in product(pool, repeat=sig.arity(conn)):
                f = App(conn, args)
                if f not in seen:
                    seen.add(f)
                    new.append(f)
        levels.append(new)
    return canonical(seen)


def rename_connective(f: Formula, mapping: Mapping[str, str]) -> Formula:
    if isinstance(f, Var):
        return f
    return App(mapping.get(f.conn, f.conn), (rename_connective(a, mapping) for a in f.args))


def theta_subformulas(
    antecedent: Iterable[Formula], succedent: Iterable[Formula], theta: Iterable[Formula]
) -> tuple[Formula, ...]:
    """Subformulas of the statement plus their images under each one-variable formula in ``theta``."""
    subs = subformulas_of(list(antecedent) + list(succedent))
    out = set(subs)
    for t in theta:
        vs = variables(t)
        if len(vs) != 1:
            raise ValueError(f"theta member {render_formula(t)} must have exactly one variable")
        (x,) = vs
        for g in subs:
            out.add(substitute(t, {x: g}))
    return canonical(out)


def equivalent_up_to_renaming(
    a: tuple[frozenset[Formula], frozenset[Formula]],
    b: tuple[frozenset[Formula], frozenset[Formula]],
) -> Optional[dict[Var, Var]]:
    """Find a variable bijection mapping statement ``a`` onto statement ``b``."""
    va = sorted_vars(variables_of(a[0] | a[1]))
    vb = sorted_vars(variables_of(b[0] | b[1]))
    if len(va) != len(vb) or len(a[0]) != len(b[0]) or len(a[1]) != len(b[1]):
        return None
    for perm in permutations(vb):
        ren = dict(zip(va, perm))
        if frozenset(substitute(f, ren) for f in a[0]) == b[0] and frozenset(
            substitute(f, ren) for f in a[1]
        ) == b[1]:
            return ren
    return None
