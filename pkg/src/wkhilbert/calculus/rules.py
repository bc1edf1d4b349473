"""Rule schemas, H-systems and the system file format."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Optional

from ..formula import (
    SIG_ANDORNEG,
    Formula,
    Signature,
    Var,
    check_signature,
    parse_formula_list,
    render_formula,
    sorted_vars,
    variables_of,
)

if TYPE_CHECKING:
    from .derivation import LinearDerivation

SETSET = "setset"
SETFMLA = "setfmla"
KINDS = (SETSET, SETFMLA)


@dataclass(frozen=True)
class RuleSchema:
    """A schematic rule ``antecedent / succedent``.

    Both sides are kept in the order written; semantically they are sets.
    """

    name: str
    antecedent: tuple[Formula, ...]
    succedent: tuple[Formula, ...]
    kind: str = SETSET

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == SETFMLA and len(self.succedent) != 1:
            raise ValueError(f"Set-Fmla rule {self.name} must have exactly one conclusion")

    @property
    def variables(self) -> frozenset[Var]:
        return variables_of(self.antecedent + self.succedent)

    @property
    def conclusion(self) -> Formula:
        if len(self.succedent) != 1:
            raise ValueError(f"rule {self.name} has no single conclusion")
        return self.succedent[0]

    def statement(self) -> tuple[frozenset[Formula], frozenset[Formula]]:
        return frozenset(self.antecedent), frozenset(self.succedent)

    def with_kind(self, kind: str) -> "RuleSchema":
        return RuleSchema(self.name, self.antecedent, self.succedent, kind)

    def renamed(self, name: str) -> "RuleSchema":
        return RuleSchema(name, self.antecedent, self.succedent, self.kind)

    def __str__(self) -> str:
        return format_rule(self)


@dataclass
class DerivedRule:
    """A derived Set-Fmla rule together with a schematic derivation of it."""

    schema: RuleSchema
    template: "LinearDerivation"
    note: str = ""
    # cached verification result; None until checked
    verdict: Optional[object] = None
    checking: bool = False


@dataclass
class HSystem:
    name: str
    kind: str
    rules: tuple[RuleSchema, ...]
    signature: Signature = SIG_ANDORNEG
    derived: dict[str, DerivedRule] = field(default_factory=dict)
    matrix: Optional[str] = None

    def __post_init__(self):
        self.rules = tuple(self.rules)
        seen = set()
        for r in self.rules:
            if r.name in seen:
                raise ValueError(f"duplicate rule name {r.name} in {self.name}")
            if r.kind != self.kind:
                raise ValueError(f"rule {r.name} has kind {r.kind}, system {self.name} is {self.kind}")
            for f in r.antecedent + r.succedent:
                check_signature(f, self.signature)
            seen.add(r.name)
        self._by_name = {r.name: r for r in self.rules}

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def rule(self, name: str) -> RuleSchema:
        return self._by_name[name]

    def has_rule(self, name: str) -> bool:
        return name in self._by_name

    def lookup(self, name: str) -> Optional[RuleSchema]:
        """Primitive or derived schema named ``name``."""
        r = self._by_name.get(name)
        if r is None and name in self.derived:
            r = self.derived[name].schema
        return r

    def register(self, schema: RuleSchema, template: "LinearDerivation", note: str = "") -> DerivedRule:
        if schema.name in self._by_name:
            raise ValueError(f"{schema.name} is already a primitive rule of {self.name}")
        entry = DerivedRule(schema.with_kind(SETFMLA), template, note)
        self.derived[schema.name] = entry
        return entry

    def primitive_copy(self, name: Optional[str] = None) -> "HSystem":
        return HSystem(name or self.name, self.kind, self.rules, self.signature, {}, self.matrix)

    def with_rules(self, rules: Iterable[RuleSchema], name: Optional[str] = None) -> "HSystem":
        return HSystem(name or self.name, self.kind, tuple(rules), self.signature, {}, self.matrix)


def satisfies_containment(r: RuleSchema) -> bool:
    """Conclusion variables are among the premise variables."""
    return variables_of(r.succedent) <= variables_of(r.antecedent)


# --- text format -----------------------------------------------------------


class SystemFormatError(ValueError):
    pass


def _side(formulas: Iterable[Formula]) -> str:
    parts = [render_formula(f) for f in formulas]
    return ", ".join(parts) if parts else "-"


def format_rule(r: RuleSchema) -> str:
    return f"rule {r.name} : {_side(r.antecedent)} |- {_side(r.succedent)}"


def dump_system(sys: HSystem) -> str:
    lines = [f"system {sys.name} {sys.kind}"]
    if sys.signature is not SIG_ANDORNEG:
        lines.append(f"signature {sys.signature.name}")
    if sys.matrix:
        lines.append(f"matrix {sys.matrix}")
    lines.extend(format_rule(r) for r in sys.rules)
    return "\n".join(lines) + "\n"


def parse_rule(line: str, kind: str, sig: Signature) -> RuleSchema:
    body = line[len("rule") :].strip()
    name, sep, rest = body.partition(":")
    if not sep or "|-" not in rest:
        raise SystemFormatError(f"malformed rule line {line!r}")
    lhs, _, rhs = rest.partition("|-")
    try:
        ante = parse_formula_list(lhs, sig)
        succ = parse_formula_list(rhs, sig)
        return RuleSchema(name.strip(), tuple(ante), tuple(succ), kind)
    except ValueError as exc:
        raise SystemFormatError(f"rule {name.strip()}: {exc}") from exc


def load_system(text: str) -> HSystem:
    from ..formula import SIGNATURES

    name = kind = None
    sig = SIG_ANDORNEG
    matrix = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("system "):
            parts = line.split()
            if len(parts) != 3 or parts[2] not in KINDS:
                raise SystemFormatError(f"line {lineno}: expected 'system NAME setset|setfmla'")
            name, kind = parts[1], parts[2]
        elif line.startswith("signature "):
            key = line.split(None, 1)[1].strip()
            if key not in SIGNATURES:
                raise SystemFormatError(f"line {lineno}: unknown signature {key!r}")
            sig = SIGNATURES[key]
        elif line.startswith("matrix "):
            matrix = line.split(None, 1)[1].strip()
        elif line.startswith("rule "):
            if kind is None:
                raise SystemFormatError(f"line {lineno}: rule before system header")
            rules.append(parse_rule(line, kind, sig))
        else:
            raise SystemFormatError(f"line {lineno}: unexpected {line!r}")
    if name is None:
        raise SystemFormatError("missing system header")
    try:
        return HSystem(name, kind, tuple(rules), sig, {}, matrix)
    except ValueError as exc:
        raise SystemFormatError(str(exc)) from exc


def schema_vars(r: RuleSchema) -> list[Var]:
    return sorted_vars(r.variables)
