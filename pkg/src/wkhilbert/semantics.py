"""Finite algebras, logical matrices and semantic consequence by enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .formula import (
    AND,
    IMP,
    NEG,
    OR,
    Formula,
    Var,
    render_formula,
    sorted_vars,
    variables,
    variables_of,
)

Valuation = Mapping[Var, str]

# arities of the connectives the matrix file format knows by name
KNOWN_ARITIES = {NEG: 1, AND: 2, OR: 2, IMP: 2}


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Algebra:
    name: str
    carrier: tuple[str, ...]
    tables: Mapping[str, Mapping[tuple[str, ...], str]]

    def __post_init__(self):
        for conn, table in self.tables.items():
            arity = len(next(iter(table))) if table else 0
            if len(table) != len(self.carrier) ** arity:
                raise ValueError(f"table for {conn} in {self.name} is not total")
            for args, out in table.items():
                if out not in self.carrier or any(a not in self.carrier for a in args):
                    raise ValueError(f"table for {conn} in {self.name} leaves the carrier")

    def arity(self, conn: str) -> int:
        return len(next(iter(self.tables[conn])))

    def apply(self, conn: str, *args: str) -> str:
        return self.tables[conn][args]


@dataclass(frozen=True)
class Matrix:
    name: str
    algebra: Algebra
    designated: frozenset[str]

    def __post_init__(self):
        if not self.designated <= set(self.algebra.carrier):
            raise ValueError(f"designated values of {self.name} are not in the carrier")

    @property
    def undesignated(self) -> frozenset[str]:
        return frozenset(self.algebra.carrier) - self.designated


@dataclass(frozen=True)
class EntailmentVerdict:
    holds: bool
    countermodel: Optional[dict[Var, str]] = None

    def __bool__(self) -> bool:
        return self.holds


def table_from_function(carrier: Sequence[str], arity: int, fn: Callable[..., str]) -> dict:
    return {args: fn(*args) for args in product(carrier, repeat=arity)}


def _weak_kleene(classical: Callable[..., bool]) -> Callable[..., str]:
    def op(*args: str) -> str:
        if "u" in args:
            return "u"
        return "t" if classical(*(a == "t" for a in args)) else "f"

    return op


_CLASSICAL = {
    NEG: (1, lambda a: not a),
    AND: (2, lambda a, b: a and b),
    OR: (2, lambda a, b: a or b),
    IMP: (2, lambda a, b: (not a) or b),
}


def boolean_algebra() -> Algebra:
    carrier = ("f", "t")
    tables = {}
    for conn, (arity, fn) in _CLASSICAL.items():
        tables[conn] = table_from_function(
            carrier, arity, lambda *xs, fn=fn: "t" if fn(*(x == "t" for x in xs)) else "f"
        )
    return Algebra("B2", carrier, tables)


def weak_kleene_algebra() -> Algebra:
    carrier = ("f", "u", "t")
    tables = {
        conn: table_from_function(carrier, arity, _weak_kleene(fn))
        for conn, (arity, fn) in _CLASSICAL.items()
        if conn != IMP
    }
    return Algebra("WK", carrier, tables)


def weak_kleene_dual_algebra() -> Algebra:
    """WK with the tables of conjunction and disjunction swapped."""
    wk = weak_kleene_algebra()
    return Algebra("WKprime", wk.carrier, {NEG: wk.tables[NEG], AND: wk.tables[OR], OR: wk.tables[AND]})


def evaluate(f: Formula, alg: Algebra, v: Valuation, _memo: Optional[dict] = None) -> str:
    memo = {} if _memo is None else _memo
    return _eval(f, alg, v, memo)


def _eval(f: Formula, alg: Algebra, v: Valuation, memo: dict) -> str:
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Var):
        try:
            out = v[f]
        except KeyError:
            raise EvaluationError(f"valuation does not assign {f.name}") from None
    else:
        table = alg.tables.get(f.conn)
        if table is None:
            raise EvaluationError(f"algebra {alg.name} has no table for {f.conn}")
        out = table[tuple(_eval(a, alg, v, memo) for a in f.args)]
    memo[f] = out
    return out


def valuations(vs: Iterable[Var], carrier: Sequence[str]):
    """All valuations over ``vs``: variables in name order, values in carrier order."""
    ordered = sorted_vars(vs)
    for values in product(carrier, repeat=len(ordered)):
        yield dict(zip(ordered, values))


def consequence_holds(
    m: Matrix, antecedent: Iterable[Formula], succedent: Iterable[Formula]
) -> EntailmentVerdict:
    """Set-Set consequence: no valuation designates all antecedents and no succedent."""
    ante = list(dict.fromkeys(antecedent))
    succ = list(dict.fromkeys(succedent))
    designated = m.designated
    for v in valuations(variables_of(ante + succ), m.algebra.carrier):
        memo: dict = {}
        if all(_eval(f, m.algebra, v, memo) in designated for f in ante) and not any(
            _eval(f, m.algebra, v, memo) in designated for f in succ
        ):
            return EntailmentVerdict(False, v)
    return EntailmentVerdict(True, None)


def entails(m: Matrix, antecedent: Iterable[Formula], conclusion: Formula) -> EntailmentVerdict:
    """Set-Fmla companion."""
    return consequence_holds(m, antecedent, [conclusion])


def check_monadicity(m: Matrix, theta: Sequence[Formula]) -> dict[tuple[str, str], Optional[Formula]]:
    """For each pair of distinct values (carrier order), the first separator in ``theta``."""
    report: dict[tuple[str, str], Optional[Formula]] = {}
    for x, y in combinations(m.algebra.carrier, 2):
        report[(x, y)] = None
        for t in theta:
            vs = variables(t)
            if len(vs) != 1:
                raise ValueError(f"separator candidate {render_formula(t)} is not unary")
            (p,) = vs
            in_x = evaluate(t, m.algebra, {p: x}) in m.designated
            in_y = evaluate(t, m.algebra, {p: y}) in m.designated
            if in_x != in_y:
                report[(x, y)] = t
                break
    return report


def is_monadic(m: Matrix, theta: Sequence[Formula]) -> bool:
    return all(sep is not None for sep in check_monadicity(m, theta).values())


def check_matrix_renaming(m1: Matrix, m2: Matrix, swap: Mapping[str, str]) -> bool:
    """True iff ``swap`` is an isomorphism of matrices from ``m1`` onto ``m2``."""
    c1, c2 = m1.algebra.carrier, m2.algebra.carrier
    if set(swap) != set(c1) or set(swap.values()) != set(c2) or len(c1) != len(c2):
        return False
    if {swap[x] for x in m1.designated} != set(m2.designated):
        return False
    if set(m1.algebra.tables) != set(m2.algebra.tables):
        return False
    for conn, table in m1.algebra.tables.items():
        other = m2.algebra.tables[conn]
        for args, out in table.items():
            if other.get(tuple(swap[a] for a in args)) != swap[out]:
                return False
    return True


# --- classical companions ---------------------------------------------------


def cl_entails(antecedent: Iterable[Formula], conclusion: Formula) -> bool:
    return consequence_holds(CL, antecedent, [conclusion]).holds


def cl_satisfiable(formulas: Iterable[Formula]) -> bool:
    return not consequence_holds(CL, formulas, []).holds


def companion_oracle(logic: str, antecedent: Iterable[Formula], conclusion: Formula) -> bool:
    """Decide PWK / BK consequence through classical logic and variable inclusion."""
    gamma = list(dict.fromkeys(antecedent))
    if logic == "PWK":
        vs = variables(conclusion)
        restricted = [g for g in gamma if variables(g) <= vs]
        return cl_entails(restricted, conclusion)
    if logic == "BK":
        if not cl_satisfiable(gamma):
            return True
        return variables(conclusion) <= variables_of(gamma) and cl_entails(gamma, conclusion)
    raise ValueError(f"unknown logic {logic!r}; expected PWK or BK")


# --- matrix file format ----------------------------------------------------


class MatrixFormatError(ValueError):
    pass


def dump_matrix(m: Matrix) -> str:
    alg = m.algebra
    lines = [f"matrix {m.name}", "values " + " ".join(alg.carrier)]
    lines.append("designated " + " ".join(x for x in alg.carrier if x in m.designated))
    for conn in sorted(alg.tables, key=lambda c: (alg.arity(c), c)):
        arity = alg.arity(conn)
        lines.append(f"table {conn}")
        outs = [alg.tables[conn][args] for args in product(alg.carrier, repeat=arity)]
        width = len(alg.carrier) if arity > 1 else len(outs)
        for i in range(0, len(outs), max(width, 1)):
            lines.append(" ".join(outs[i : i + width]))
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> Matrix:
    name = None
    carrier: list[str] = []
    designated: list[str] = []
    blocks: dict[str, list[str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "matrix":
            name = rest.strip()
        elif head == "values":
            carrier = rest.split()
        elif head == "designated":
            designated = rest.split()
        elif head == "table":
            current = rest.strip()
            blocks[current] = []
        elif current is not None:
            blocks[current].extend(line.split())
        else:
            raise MatrixFormatError(f"line {lineno}: unexpected {line!r}")
    if name is None or not carrier:
        raise MatrixFormatError("missing 'matrix' or 'values' line")
    n = len(carrier)
    tables = {}
    for conn, outs in blocks.items():
        arity = KNOWN_ARITIES.get(conn)
        if arity is None:
            arity = round(math.log(len(outs), n)) if n > 1 and outs else 0
        if len(outs) != n**arity:
            raise MatrixFormatError(f"table {conn}: expected {n ** arity} entries, got {len(outs)}")
        tables[conn] = dict(zip(product(carrier, repeat=arity), outs))
    try:
        alg = Algebra(name, tuple(carrier), tables)
        return Matrix(name, alg, frozenset(designated))
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from exc


B2 = boolean_algebra()
WK = weak_kleene_algebra()
WK_PRIME = weak_kleene_dual_algebra()
CL = Matrix("CL2", B2, frozenset({"t"}))
PWK = Matrix("PWK", WK, frozenset({"u", "t"}))
BK = Matrix("BK", WK, frozenset({"t"}))
M_PRIME = Matrix("Mprime", WK_PRIME, frozenset({"f"}))
