"""Checking derivations against a system.

The checker recomputes every formula from its rule and substitution; any
formula written in the derivation is only a claim to be compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..formula import Formula, render_formula, substitute
from ..semantics import EntailmentVerdict, Matrix, consequence_holds
from .derivation import (
    ChainApp,
    LinearDerivation,
    Premise,
    ProofError,
    Statement,
    TreeDerivation,
    TreeNode,
    expand_derivation,
    instantiate,
)
from .rules import SETFMLA, SETSET, HSystem, RuleSchema


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    location: Optional[str] = None
    reason: Optional[str] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accepted"
        return f"rejected at {self.location}: {self.reason}: {self.message}"


ACCEPTED = Verdict(True)


def rule_sound(m: Matrix, r: RuleSchema) -> EntailmentVerdict:
    return consequence_holds(m, r.antecedent, r.succedent)


def verify_derivation(
    sys: HSystem, d: Union[LinearDerivation, TreeDerivation], claim: Statement, expand: bool = False
) -> Verdict:
    """Accept ``d`` as a derivation of ``claim`` in ``sys`` or say where it breaks.

    With ``expand`` every derived and chained step of a linear derivation is
    first replaced by primitive steps.  Otherwise derived steps are checked
    against the derived schema and the template is verified once per rule.
    """
    if isinstance(d, TreeDerivation):
        if sys.kind != SETSET:
            return Verdict(False, "derivation", "kind-mismatch", f"{sys.name} is not a Set-Set system")
        return _verify_tree(sys, d, claim)
    if sys.kind != SETFMLA:
        return Verdict(False, "derivation", "kind-mismatch", f"{sys.name} is not a Set-Fmla system")
    if len(claim.succedent) != 1:
        return Verdict(False, "claim", "bad-claim", "a linear derivation needs a single conclusion")
    if expand:
        try:
            d = expand_derivation(sys, d)
        except ProofError as exc:
            return Verdict(False, "expansion", exc.code, str(exc))
    return _verify_linear(sys, d, set(claim.antecedent), claim.succedent[0])


def check_derived(sys: HSystem, name: str) -> Verdict:
    """Verify the template of a registered derived rule, caching the answer."""
    entry = sys.derived[name]
    if entry.verdict is not None:
        return entry.verdict
    if entry.checking:
        return Verdict(False, name, "invalid-template", f"template of {name} depends on itself")
    entry.checking = True
    try:
        schema = entry.schema
        v = _verify_linear(sys, entry.template, set(schema.antecedent), schema.conclusion)
        if not v.accepted:
            v = Verdict(False, name, "invalid-template", f"template of {name}: {v}")
    finally:
        entry.checking = False
    entry.verdict = v
    return v


def check_registry(sys: HSystem) -> dict[str, Verdict]:
    return {name: check_derived(sys, name) for name in sys.derived}


def _lookup(sys: HSystem, name: str, where: str) -> tuple[Optional[RuleSchema], Optional[Verdict]]:
    if sys.has_rule(name):
        return sys.rule(name), None
    if name in sys.derived:
        v = check_derived(sys, name)
        if not v.accepted:
            return None, Verdict(False, where, "invalid-template", v.message)
        return sys.derived[name].schema, None
    return None, Verdict(False, where, "unknown-rule", f"{name} is not a rule of {sys.name}")


def _verify_linear(sys: HSystem, d: LinearDerivation, premises: set[Formula], conclusion: Formula) -> Verdict:
    if not d.steps:
        return Verdict(False, "derivation", "empty-derivation", "no steps")
    computed: list[Formula] = []
    for i, step in enumerate(d.steps, 1):
        where = f"step {i}"
        j = step.just
        if isinstance(j, Premise):
            if j.formula not in premises:
                return Verdict(False, where, "premise-not-in-claim", f"{render_formula(j.formula)} is not a premise")
            f = j.formula
        else:
            for r in j.refs:
                if not 1 <= r < i:
                    return Verdict(False, where, "bad-reference", f"step {r} is not an earlier step")
            current = [computed[r - 1] for r in j.refs]
            if isinstance(j, ChainApp):
                names = j.rules
                substs = j.substs if j.substs is not None else (None,) * len(names)
                if len(substs) != len(names) or not names:
                    return Verdict(False, where, "bad-chain", "one substitution per chained rule is required")
            else:
                names, substs = (j.rule,), (j.subst,)
            for name, sub in zip(names, substs):
                schema, bad = _lookup(sys, name, where)
                if bad is not None:
                    return bad
                if len(schema.succedent) != 1:
                    return Verdict(False, where, "kind-mismatch", f"{name} has no single conclusion")
                try:
                    _, succ = instantiate(schema, current, sub)
                except ProofError as exc:
                    return Verdict(False, where, exc.code, str(exc))
                current = [succ[0]]
            f = current[0]
        if step.formula is not None and step.formula != f:
            return Verdict(
                False,
                where,
                "formula-mismatch",
                f"written {render_formula(step.formula)}, rule gives {render_formula(f)}",
            )
        computed.append(f)
    if computed[-1] != conclusion:
        return Verdict(
            False,
            f"step {len(computed)}",
            "wrong-conclusion",
            f"derivation ends with {render_formula(computed[-1])}, claim is {render_formula(conclusion)}",
        )
    return ACCEPTED


def _verify_tree(sys: HSystem, d: TreeDerivation, claim: Statement) -> Verdict:
    ante = set(claim.antecedent)
    succ = set(claim.succedent)
    for f in d.root_label:
        if f not in ante:
            return Verdict(False, "root", "root-not-in-claim", f"{render_formula(f)} is not in the claim antecedent")
    return _verify_node(sys, d.root, frozenset(d.root_label), succ, "root")


def _verify_node(sys: HSystem, node: TreeNode, label: frozenset, succ: set, where: str) -> Verdict:
    if node.rule is None:
        if node.close is None:
            return Verdict(False, where, "open-leaf", "leaf has no closing formula")
        if node.close not in label or node.close not in succ:
            return Verdict(
                False, where, "open-leaf", f"{render_formula(node.close)} is not both in the label and the claim succedent"
            )
        return ACCEPTED
    if not sys.has_rule(node.rule):
        return Verdict(False, where, "unknown-rule", f"{node.rule} is not a rule of {sys.name}")
    schema = sys.rule(node.rule)
    s = dict(node.subst or {})
    missing = [v for v in schema.variables if v not in s]
    if missing:
        names = ", ".join(sorted(v.name for v in missing))
        return Verdict(False, where, "incomplete-substitution", f"{node.rule}: no value for {names}")
    for f in schema.antecedent:
        img = substitute(f, s)
        if img not in label:
            return Verdict(
                False, where, "antecedent-mismatch", f"{node.rule} needs {render_formula(img)}, which is not in the label"
            )
    images = list(dict.fromkeys(substitute(f, s) for f in schema.succedent))
    if node.star or not schema.succedent:
        if schema.succedent or not node.star or node.branches:
            return Verdict(False, where, "star-misuse", f"{node.rule} does not have an empty succedent")
        return ACCEPTED
    shown = [f for f, _ in node.branches]
    if len(shown) != len(images) or set(shown) != set(images):
        return Verdict(
            False,
            where,
            "branch-mismatch",
            "branches " + ", ".join(render_formula(f) for f, _ in node.branches)
            + " differ from succedent " + ", ".join(render_formula(f) for f in images),
        )
    for i, (f, child) in enumerate(node.branches):
        v = _verify_node(sys, child, label | {f}, succ, f"{where}.{i}")
        if not v.accepted:
            return v
    return ACCEPTED


def verify_rules_sound(sys: HSystem, m: Matrix) -> dict[str, EntailmentVerdict]:
    return {r.name: rule_sound(m, r) for r in sys.rules}


def check_claim_matches(d: LinearDerivation, claim: Statement) -> bool:
    """Premises used are within the claim and the last formula is its conclusion."""
    return set(d.premises) <= set(claim.antecedent) and d.conclusion == claim.conclusion

