"""Derivation objects, rule instantiation and a builder for linear proofs."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Sequence, Union

from ..formula import Formula, Var, canonical, match_schema, render_formula, substitute
from .rules import RuleSchema

if TYPE_CHECKING:
    from .rules import HSystem


class ProofError(ValueError):
    """A rule application that does not check; ``code`` is machine readable."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Statement:
    antecedent: tuple[Formula, ...]
    succedent: tuple[Formula, ...]

    @classmethod
    def of(cls, antecedent: Iterable[Formula], succedent: Iterable[Formula]) -> "Statement":
        return cls(canonical(antecedent), tuple(dict.fromkeys(succedent)))

    @property
    def conclusion(self) -> Formula:
        if len(self.succedent) != 1:
            raise ValueError("statement does not have a single conclusion")
        return self.succedent[0]

    def __str__(self) -> str:
        from .formats import format_claim

        return format_claim(self)


# --- justifications ----------------------------------------------------------


@dataclass(frozen=True)
class Premise:
    formula: Formula


@dataclass(frozen=True)
class RuleApp:
    rule: str
    refs: tuple[int, ...] = ()
    subst: Optional[Mapping[Var, Formula]] = None


@dataclass(frozen=True)
class DerivedApp:
    rule: str
    refs: tuple[int, ...] = ()
    subst: Optional[Mapping[Var, Formula]] = None


@dataclass(frozen=True)
class ChainApp:
    """Rules applied in sequence, each to the conclusion of the previous one."""

    rules: tuple[str, ...]
    refs: tuple[int, ...] = ()
    substs: Optional[tuple[Optional[Mapping[Var, Formula]], ...]] = None


Justification = Union[Premise, RuleApp, DerivedApp, ChainApp]


@dataclass(frozen=True)
class Step:
    just: Justification
    formula: Optional[Formula] = None


@dataclass(frozen=True)
class LinearDerivation:
    steps: tuple[Step, ...]
    system: Optional[str] = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def premises(self) -> tuple[Formula, ...]:
        return tuple(s.just.formula for s in self.steps if isinstance(s.just, Premise))

    @property
    def conclusion(self) -> Optional[Formula]:
        return self.steps[-1].formula if self.steps else None

    def formula(self, line: int) -> Optional[Formula]:
        return self.steps[line - 1].formula

    def rule_names(self) -> set[str]:
        out = set()
        for s in self.steps:
            if isinstance(s.just, (RuleApp, DerivedApp)):
                out.add(s.just.rule)
            elif isinstance(s.just, ChainApp):
                out.update(s.just.rules)
        return out


@dataclass(frozen=True)
class TreeNode:
    """One node of a Set-Set derivation.

    A leaf has no rule and names the succedent formula it closes with.  An
    expanded node names a rule instance and has either ``star`` set (empty
    succedent) or one branch per succedent formula.
    """

    rule: Optional[str] = None
    subst: Optional[Mapping[Var, Formula]] = None
    branches: tuple[tuple[Formula, "TreeNode"], ...] = ()
    star: bool = False
    close: Optional[Formula] = None

    def size(self) -> int:
        return 1 + sum(child.size() for _, child in self.branches)

    def rule_names(self) -> set[str]:
        out = {self.rule} if self.rule else set()
        for _, child in self.branches:
            out |= child.rule_names()
        return out


@dataclass(frozen=True)
class TreeDerivation:
    root_label: tuple[Formula, ...]
    root: TreeNode
    system: Optional[str] = None

    def labels(self) -> list[frozenset[Formula]]:
        """Every node label, in preorder."""
        out = []

        def walk(node: TreeNode, label: frozenset):
            out.append(label)
            for f, child in node.branches:
                walk(child, label | {f})

        walk(self.root, frozenset(self.root_label))
        return out


Derivation = Union[LinearDerivation, TreeDerivation]


# --- instantiation -----------------------------------------------------------


def _assignments(n_ante: int, refs: Sequence[Formula]):
    if len(refs) == n_ante:
        yield tuple(refs)
        for perm in permutations(refs):
            if perm != tuple(refs):
                yield perm
    if len(set(refs)) <= n_ante:
        for combo in product(refs, repeat=n_ante):
            if set(combo) == set(refs):
                yield combo


def instantiate(
    schema: RuleSchema, ref_formulas: Sequence[Formula], subst: Optional[Mapping[Var, Formula]] = None
) -> tuple[dict[Var, Formula], tuple[Formula, ...]]:
    """Complete ``subst`` so that the antecedent image is exactly ``ref_formulas``.

    Returns the completed substitution and the succedent image.  The
    referenced formulas may be given in any order.
    """
    given = dict(subst or {})
    ante = schema.antecedent
    if not ante:
        if ref_formulas:
            raise ProofError("arity-mismatch", f"{schema.name} takes no premises")
        s = given
    else:
        if not ref_formulas:
            raise ProofError("arity-mismatch", f"{schema.name} needs {len(ante)} premise(s)")
        s = None
        for combo in _assignments(len(ante), ref_formulas):
            trial = dict(given)
            if all(_extend(p, f, trial) for p, f in zip(ante, combo)):
                s = trial
                break
        if s is None:
            shown = ", ".join(render_formula(f) for f in ref_formulas)
            raise ProofError("antecedent-mismatch", f"{schema.name} does not apply to {shown}")
    missing = [v for v in schema.variables if v not in s]
    if missing:
        names = ", ".join(sorted(v.name for v in missing))
        raise ProofError("incomplete-substitution", f"{schema.name}: no value for {names}")
    return s, tuple(substitute(f, s) for f in schema.succedent)


def _extend(pattern: Formula, target: Formula, s: dict) -> bool:
    m = match_schema(pattern, target, s)
    if m is None:
        return False
    s.update(m)
    return True


def restrict(s: Mapping[Var, Formula], vs: Iterable[Var]) -> dict[Var, Formula]:
    keep = set(vs)
    return {v: t for v, t in sorted(s.items(), key=lambda kv: kv[0].name) if v in keep}


# --- builder -----------------------------------------------------------------


class ProofBuilder:
    """Incrementally assemble a checked linear derivation.

    Every step is computed from its rule when added, so a builder can never
    hold an invalid step.  A formula is derived at most once; asking for it
    again returns the existing line.
    """

    def __init__(self, system: "HSystem"):
        self.system = system
        self.steps: list[Step] = []
        self._line: dict[Formula, int] = {}

    def __len__(self) -> int:
        return len(self.steps)

    def formula(self, line: int) -> Formula:
        return self.steps[line - 1].formula

    def line(self, f: Formula) -> Optional[int]:
        return self._line.get(f)

    def _push(self, just: Justification, f: Formula) -> int:
        hit = self._line.get(f)
        if hit is not None:
            return hit
        self.steps.append(Step(just, f))
        self._line[f] = len(self.steps)
        return len(self.steps)

    def premise(self, f: Formula) -> int:
        return self._push(Premise(f), f)

    def apply(self, name: str, refs: Sequence[int], subst: Optional[Mapping[Var, Formula]] = None) -> int:
        schema = self.system.lookup(name)
        if schema is None:
            raise ProofError("unknown-rule", f"{name} is not a rule of {self.system.name}")
        s, succ = instantiate(schema, [self.formula(r) for r in refs], subst)
        s = restrict(s, schema.variables)
        refs = tuple(refs)
        just = RuleApp(name, refs, s) if self.system.has_rule(name) else DerivedApp(name, refs, s)
        return self._push(just, succ[0])

    def chain(self, names: Sequence[str], refs: Sequence[int], substs=None) -> int:
        substs = list(substs) if substs is not None else [None] * len(names)
        current = [self.formula(r) for r in refs]
        done = []
        for name, sub in zip(names, substs):
            schema = self.system.lookup(name)
            if schema is None:
                raise ProofError("unknown-rule", f"{name} is not a rule of {self.system.name}")
            s, succ = instantiate(schema, current, sub)
            done.append(restrict(s, schema.variables))
            current = [succ[0]]
        return self._push(ChainApp(tuple(names), tuple(refs), tuple(done)), current[0])

    def splice(self, d: LinearDerivation, premise_lines: Optional[Mapping[Formula, int]] = None) -> dict[int, int]:
        """Copy ``d`` into this builder; its premises map to ``premise_lines`` when given."""
        premise_lines = premise_lines or {}
        mapping: dict[int, int] = {}
        for i, step in enumerate(d.steps, 1):
            j = step.just
            if isinstance(j, Premise):
                hit = premise_lines.get(j.formula) or self.line(j.formula)
                mapping[i] = hit if hit is not None else self.premise(j.formula)
            elif isinstance(j, ChainApp):
                mapping[i] = self.chain(j.rules, [mapping[r] for r in j.refs], j.substs)
            else:
                mapping[i] = self.apply(j.rule, [mapping[r] for r in j.refs], j.subst)
        return mapping

    def build(self, goal: Optional[int] = None) -> LinearDerivation:
        """The derivation, trimmed to the steps that ``goal`` (default: last line) depends on."""
        if not self.steps:
            return LinearDerivation((), self.system.name)
        goal = len(self.steps) if goal is None else goal
        needed = set()
        stack = [goal]
        while stack:
            i = stack.pop()
            if i in needed:
                continue
            needed.add(i)
            j = self.steps[i - 1].just
            if not isinstance(j, Premise):
                stack.extend(j.refs)
        renum = {}
        out = []
        for i in sorted(needed):
            step = self.steps[i - 1]
            j = step.just
            if isinstance(j, RuleApp):
                j = RuleApp(j.rule, tuple(renum[r] for r in j.refs), j.subst)
            elif isinstance(j, DerivedApp):
                j = DerivedApp(j.rule, tuple(renum[r] for r in j.refs), j.subst)
            elif isinstance(j, ChainApp):
                j = ChainApp(j.rules, tuple(renum[r] for r in j.refs), j.substs)
            out.append(Step(j, step.formula))
            renum[i] = len(out)
        return LinearDerivation(tuple(out), self.system.name)


def normalize(system: "HSystem", d: LinearDerivation) -> LinearDerivation:
    """Recompute every formula and complete every substitution; raises ProofError."""
    b = ProofBuilder(system)
    mapping = b.splice(d)
    return b.build(mapping[len(d.steps)]) if d.steps else b.build()


# --- expansion of derived and chained steps -----------------------------------


def expand_derived(
    system: "HSystem", step: Union[DerivedApp, ChainApp, RuleApp], ref_formulas: Sequence[Formula]
) -> LinearDerivation:
    """Primitive derivation of the step's conclusion from ``ref_formulas``."""
    b = ProofBuilder(system)
    lines = [b.premise(f) for f in ref_formulas]
    goal = _expand_into(b, system, step, lines, depth=0)
    return b.build(goal)


def expand_derivation(system: "HSystem", d: LinearDerivation) -> LinearDerivation:
    """Replace every derived and chained step by primitive rule applications."""
    b = ProofBuilder(system)
    mapping: dict[int, int] = {}
    for i, step in enumerate(d.steps, 1):
        j = step.just
        if isinstance(j, Premise):
            mapping[i] = b.premise(j.formula)
        else:
            mapping[i] = _expand_into(b, system, j, [mapping[r] for r in j.refs], depth=0)
    return b.build(mapping[len(d.steps)]) if d.steps else b.build()


_MAX_DEPTH = 200


def _expand_into(b: ProofBuilder, system: "HSystem", j, ref_lines: list[int], depth: int) -> int:
    if depth > _MAX_DEPTH:
        raise ProofError("invalid-template", "derived rule templates nest too deeply")
    if isinstance(j, ChainApp):
        substs = j.substs or (None,) * len(j.rules)
        current = ref_lines
        for name, sub in zip(j.rules, substs):
            current = [_expand_into(b, system, RuleApp(name, (), sub), current, depth + 1)]
        return current[0]
    name = j.rule
    if system.has_rule(name):
        return b.apply(name, ref_lines, j.subst)
    entry = system.derived.get(name)
    if entry is None:
        raise ProofError("unknown-rule", f"{name} is not a rule of {system.name}")
    s, _ = instantiate(entry.schema, [b.formula(r) for r in ref_lines], j.subst)
    by_formula = {b.formula(r): r for r in ref_lines}
    local: dict[int, int] = {}
    for i, step in enumerate(entry.template.steps, 1):
        tj = step.just
        if isinstance(tj, Premise):
            f = substitute(tj.formula, s)
            if f not in by_formula:
                raise ProofError("invalid-template", f"template of {name} uses extra premise {render_formula(f)}")
            local[i] = by_formula[f]
            continue
        if isinstance(tj, ChainApp):
            subs = tuple(_subst_image(x, s) for x in (tj.substs or (None,) * len(tj.rules)))
            inner = ChainApp(tj.rules, (), subs)
        else:
            inner = RuleApp(tj.rule, (), _subst_image(tj.subst, s))
        local[i] = _expand_into(b, system, inner, [local[r] for r in tj.refs], depth + 1)
    return local[len(entry.template.steps)]


def _subst_image(sub: Optional[Mapping[Var, Formula]], s: Mapping[Var, Formula]):
    if sub is None:
        return None
    return {v: substitute(t, s) for v, t in sub.items()}


def uses_rule(system: "HSystem", d: LinearDerivation, name: str, _seen: Optional[set] = None) -> bool:
    """Whether ``d`` applies ``name``, looking inside derived rule templates."""
    seen = set() if _seen is None else _seen
    for rule in d.rule_names():
        if rule == name:
            return True
        entry = system.derived.get(rule)
        if entry is not None and rule not in seen:
            seen.add(rule)
            if uses_rule(system, entry.template, name, seen):
                return True
    return False
