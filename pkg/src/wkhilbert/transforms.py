"""System-level conversions and proof transformations.

System level: conversion of a Set-Set system into a Set-Fmla one by adding a
side disjunct, dualization, lifting of single rules, assembly of the starred
Set-Set system and the Set-Fmla system for BK.

Proof level (all over the Set-Fmla system for BK): lifting whole
derivations, the two deduction transforms, the explosion transform,
disjunction elimination and the translation of Set-Set trees into linear
derivations.

Naming convention: ``name + "v"`` is always the disjunction-lift of ``name``.
Lifts that are not primitive are registered on demand as derived rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .calculus.derivation import (
    ChainApp,
    DerivedApp,
    LinearDerivation,
    Premise,
    ProofBuilder,
    ProofError,
    RuleApp,
    Statement,
    TreeDerivation,
    TreeNode,
    expand_derivation,
    normalize,
    uses_rule,
)
from .calculus.rules import SETFMLA, SETSET, HSystem, RuleSchema
from .calculus.search import SearchConfig, prove_setfmla_bounded, prove_setset_analytic
from .calculus.verify import verify_derivation
from .formula import (
    AND,
    OR,
    App,
    Formula,
    Var,
    conj,
    disj,
    equivalent_up_to_renaming,
    is_conn,
    neg,
    parse_formula_list,
    render_formula,
    sort_key,
    substitute,
    variables_of,
)
from .formula import big_or as _big_or


class TransformError(ValueError):
    pass


BOMB = "BK1s"  # the explosion rule p, ~p / q of the Set-Fmla system for BK


class FreshNamer:
    """Hands out v0, v1, ... skipping reserved names."""

    def __init__(self, reserved: Iterable[Var] = ()):
        self.reserved = {v.name for v in reserved}
        self.counter = 0

    def fresh(self) -> Var:
        while f"v{self.counter}" in self.reserved:
            self.counter += 1
        v = Var(f"v{self.counter}")
        self.reserved.add(v.name)
        self.counter += 1
        return v


def big_or(operands: Sequence[Formula], order: str = "declared") -> Formula:
    """Left-associated disjunction; ``order`` is "declared" or "canonical"."""
    ops = list(dict.fromkeys(operands))
    if order == "canonical":
        ops.sort(key=sort_key)
    elif order != "declared":
        raise ValueError(f"unknown order {order!r}")
    return _big_or(ops)


def system_vars(sys: HSystem) -> frozenset[Var]:
    out: frozenset[Var] = frozenset()
    for r in sys.rules:
        out |= r.variables
    return out


# --- system level ------------------------------------------------------------

_P, _Q, _R = Var("p"), Var("q"), Var("r")

OR_RULES = (
    RuleSchema("or-idem", (disj(_P, _P),), (_P,), SETFMLA),
    RuleSchema("or-intro", (_P,), (disj(_P, _Q),), SETFMLA),
    RuleSchema("or-comm", (disj(_P, _Q),), (disj(_Q, _P),), SETFMLA),
    RuleSchema("or-assoc", (disj(_P, disj(_Q, _R)),), (disj(disj(_P, _Q), _R),), SETFMLA),
)


@dataclass
class Conversion:
    system: HSystem
    side_variable: Var
    discarded: list[str] = field(default_factory=list)


def or_convert_rule(r: RuleSchema, p0: Var, order: str = "declared") -> RuleSchema:
    """Image of one Set-Set rule: every formula gets the side disjunct ``p0``."""
    if not r.antecedent and len(r.succedent) == 1:
        return RuleSchema(r.name + "or", (), r.succedent, SETFMLA)
    ante = tuple(dict.fromkeys(disj(f, p0) for f in r.antecedent))
    concl = disj(big_or(r.succedent, order), p0) if r.succedent else p0
    return RuleSchema(r.name + "or", ante, (concl,), SETFMLA)


def or_convert_system(r_sys: HSystem, fresh: Optional[FreshNamer] = None, order: str = "declared") -> Conversion:
    """Set-Fmla system obtained by carrying a side disjunct through every rule.

    Images whose single premise equals the conclusion are trivial and dropped.
    """
    if r_sys.kind != SETSET:
        raise TransformError(f"{r_sys.name} is not a Set-Set system")
    fresh = fresh or FreshNamer(system_vars(r_sys))
    p0 = fresh.fresh()
    rules = list(OR_RULES)
    discarded = []
    for r in r_sys.rules:
        img = or_convert_rule(r, p0, order)
        if len(img.antecedent) == 1 and img.antecedent == img.succedent:
            discarded.append(r.name)
            continue
        rules.append(img)
    sys = HSystem(r_sys.name + "_or", SETFMLA, tuple(rules), r_sys.signature, {}, r_sys.matrix)
    return Conversion(sys, p0, discarded)


def swap_and_or(f: Formula) -> Formula:
    if isinstance(f, Var):
        return f
    conn = {AND: OR, OR: AND}.get(f.conn, f.conn)
    return App(conn, tuple(swap_and_or(a) for a in f.args))


def dualize_system(r_sys: HSystem, name: Optional[str] = None) -> HSystem:
    if r_sys.kind != SETSET:
        raise TransformError(f"{r_sys.name} is not a Set-Set system")
    rules = tuple(
        RuleSchema(r.name, tuple(swap_and_or(f) for f in r.succedent), tuple(swap_and_or(f) for f in r.antecedent), SETSET)
        for r in r_sys.rules
    )
    return HSystem(name or r_sys.name + "_dual", SETSET, rules, r_sys.signature, {}, None)


def lift_rule(r: RuleSchema, mode: str = "or", fresh: Optional[FreshNamer] = None, name: Optional[str] = None) -> RuleSchema:
    """``c|phi1, ..., c|phim / c|psi`` (mode or) or the same with ``~c`` (mode imp)."""
    if r.kind != SETFMLA:
        raise TransformError(f"rule {r.name} is not a Set-Fmla rule")
    fresh = fresh or FreshNamer(r.variables)
    c = fresh.fresh()
    if mode == "or":
        side, suffix = c, "v"
    elif mode == "imp":
        side, suffix = neg(c), "i"
    else:
        raise TransformError(f"unknown lifting mode {mode!r}")
    return RuleSchema(
        name or r.name + suffix,
        tuple(disj(side, f) for f in r.antecedent),
        (disj(side, r.conclusion),),
        SETFMLA,
    )


def lift_variable(schema: RuleSchema) -> Var:
    """The side variable ``c`` of a lifted schema ``... / c|psi``."""
    concl = schema.conclusion
    if not (is_conn(concl, OR) and isinstance(concl.args[0], Var)):
        raise TransformError(f"{schema.name} is not a lifted rule")
    return concl.args[0]


def rules_equal_up_to_renaming(a: Sequence[RuleSchema], b: Sequence[RuleSchema]):
    """Match rules one to one up to variable renaming.

    Returns (pairs, unmatched from a, unmatched from b).
    """
    stmts_b = [r.statement() for r in b]
    options = []
    for r in a:
        sa = r.statement()
        options.append([j for j, sb in enumerate(stmts_b) if equivalent_up_to_renaming(sa, sb) is not None])
    match_b: dict[int, int] = {}

    def augment(i: int, seen: set) -> bool:
        for j in options[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_b or augment(match_b[j], seen):
                match_b[j] = i
                return True
        return False

    for i in range(len(a)):
        augment(i, set())
    pairs = sorted((a[i].name, b[j].name) for j, i in match_b.items())
    used_a = set(match_b.values())
    used_b = set(match_b)
    return (
        pairs,
        [r.name for i, r in enumerate(a) if i not in used_a],
        [r.name for j, r in enumerate(b) if j not in used_b],
    )


def systems_equal_up_to_renaming(a: HSystem, b: HSystem) -> bool:
    _, ua, ub = rules_equal_up_to_renaming(a.rules, b.rules)
    return not ua and not ub


# --- the BK systems ------------------------------------------------------------

_STARRED = {
    "r8": RuleSchema("r8s", (neg(conj(_P, _Q)),), (disj(neg(_P), _P),), SETSET),
    "r9": RuleSchema("r9s", (neg(conj(_P, _Q)),), (disj(neg(_Q), _Q),), SETSET),
    "r15": RuleSchema("r15s", (disj(_P, _Q),), (disj(_P, neg(_P)),), SETSET),
    "r16": RuleSchema("r16s", (disj(_P, _Q),), (disj(_Q, neg(_Q)),), SETSET),
}

_EXTRA_BK = (
    ("BK20", "p | q, ~p", "q"),
    ("BK21", "p | (q | r)", "(p | q) | r"),
    ("BK22", "p | p", "p"),
    ("BK23", "p | q", "q | p"),
    ("BK24", "p | q, r", "~p | r"),
)

# the shipped R_BK, used to recognise the input of assemble_bk_systems
R_BK_FINGERPRINT = (
    ("r1", "p, ~p", ""), ("r2", "p", "~~p"), ("r3", "~~p", "p"), ("r4", "p, q", "p & q"),
    ("r5", "~p, ~q", "~(p & q)"), ("r6", "~p, q", "~(p & q)"), ("r7", "p, ~q", "~(p & q)"),
    ("r8", "~(p & q)", "~p, p"), ("r9", "~(p & q)", "~q, q"), ("r10", "p & q", "p"),
    ("r11", "p & q", "q"), ("r12", "~p, ~q", "~(p | q)"), ("r13", "~(p | q)", "~p"),
    ("r14", "~(p | q)", "~q"), ("r15", "p | q", "p, ~p"), ("r16", "p | q", "q, ~q"),
    ("r17", "~p, q", "p | q"), ("r18", "p, ~q", "p | q"), ("r19", "p, q", "p | q"),
    ("r20", "p | q", "p, q"),
)


def _schema(name: str, ante: str, succ: str, kind: str) -> RuleSchema:
    return RuleSchema(name, tuple(parse_formula_list(ante)), tuple(parse_formula_list(succ)), kind)


def star_name_to_h(name: str) -> str:
    """Rule of the starred Set-Set system to its namesake in the Set-Fmla system."""
    if name == "r1":
        return BOMB
    if not name.startswith("r"):
        raise TransformError(f"{name} is not a rule of the starred system")
    return "BK" + name[1:]


def assemble_bk_systems(r_bk: HSystem) -> tuple[HSystem, HSystem]:
    expected = [_schema(n, a, s, SETSET) for n, a, s in R_BK_FINGERPRINT]
    _, ua, ub = rules_equal_up_to_renaming(r_bk.rules, expected)
    if ua or ub or len(r_bk.rules) != len(expected) or r_bk.kind != SETSET:
        raise TransformError(f"{r_bk.name} does not match the expected R_BK rule set")
    by_shape = {}
    for r in r_bk.rules:
        for e in expected:
            if equivalent_up_to_renaming(r.statement(), e.statement()) is not None:
                by_shape[e.name] = r
    star_rules = []
    for e in expected:
        star_rules.append(_STARRED.get(e.name, by_shape[e.name].renamed(e.name)))
    star = HSystem("R_BK_star", SETSET, tuple(star_rules), r_bk.signature, {}, r_bk.matrix)

    core = [RuleSchema(BOMB, (_P, neg(_P)), (_Q,), SETFMLA)]
    for r in star_rules[1:19]:  # r20 has two conclusions; BK20 below replaces it
        core.append(RuleSchema(star_name_to_h(r.name), r.antecedent, r.succedent, SETFMLA))
    core.extend(_schema(n, a, s, SETFMLA) for n, a, s in _EXTRA_BK)
    lifted = [lift_rule(r, "or") for r in core if r.name != BOMB]
    h = HSystem("H_BK", SETFMLA, tuple(core + lifted), r_bk.signature, {}, r_bk.matrix)
    return star, h


def is_core_rule(sys: HSystem, name: str) -> bool:
    return sys.has_rule(name) and not (name.endswith("v") and sys.has_rule(name[:-1]))


# --- lifting derivations -------------------------------------------------------


def lifted_derivation_scheme(sys: HSystem, name: str) -> LinearDerivation:
    """Derivation of the double lift of a primitive rule.

    From ``d|(c|phi_i)`` re-associate each premise, apply the primitive
    lift with ``c := d|c``, and re-associate the conclusion back.
    """
    base = name[:-1] if name.endswith("v") and sys.has_rule(name[:-1]) else name
    if base == BOMB:
        raise TransformError(f"{BOMB} has no lifted version")
    if not sys.has_rule(base) or not sys.has_rule(base + "v"):
        raise TransformError(f"{name} is not a primitive rule with a primitive lift")
    lifted = sys.rule(base + "v")
    c = lift_variable(lifted)
    d = FreshNamer(lifted.variables).fresh()
    b = ProofBuilder(sys)
    tops = [b.premise(disj(d, f)) for f in lifted.antecedent]
    inner = [b.apply("BK21", [t]) for t in tops]
    s = {v: v for v in lifted.variables}
    s[c] = disj(d, c)
    top = b.apply(lifted.name, inner, s)
    return b.build(b.apply("BK27", [top]))


def ensure_lifts_named(sys: HSystem, names) -> list[str]:
    """Register the ``v``-suffixed lifts among ``names`` that ``sys`` does not know yet.

    Lifts are created on demand, so a derivation read back from a file may
    mention, say, ``BK4vv`` before anything registered it.  Returns the names
    that were added.
    """
    added = []
    for name in sorted(names):
        if sys.lookup(name) is not None:
            continue
        base = name
        while base.endswith("v") and sys.lookup(base) is None:
            base = base[:-1]
        if sys.lookup(base) is None or base == name:
            continue
        while base != name:
            base = ensure_lift(sys, base)
            added.append(base)
    return added


def ensure_lift(sys: HSystem, name: str) -> str:
    """Name of the lift of rule ``name``, registering it as a derived rule if needed."""
    target = name + "v"
    if sys.lookup(target) is not None:
        return target
    if name == BOMB:
        raise TransformError(f"{BOMB} has no lifted version")
    if sys.has_rule(name):
        if not (name.endswith("v") and sys.has_rule(name[:-1])):
            raise TransformError(f"{name} has no lifted version in {sys.name}")
        template = lifted_derivation_scheme(sys, name)
        schema = RuleSchema(target, template.premises, (template.conclusion,), SETFMLA)
        sys.register(schema, template, "double lift of a primitive rule")
        return target
    entry = sys.derived.get(name)
    if entry is None:
        raise TransformError(f"{name} is not a rule of {sys.name}")
    reserved = set(entry.schema.variables)
    for step in entry.template.steps:
        if step.formula is not None:
            reserved |= variables_of([step.formula])
    c = FreshNamer(reserved).fresh()
    schema = lift_rule(entry.schema, "or", name=target, fresh=_fixed(c))
    # register before building the template so that nested lifts see it
    sys.register(schema, LinearDerivation(()), "lift of a derived rule")
    try:
        template = lift_derivation(sys, entry.template, c)
    except Exception:
        del sys.derived[target]
        raise
    sys.derived[target].template = template
    return target


class _fixed(FreshNamer):
    def __init__(self, v: Var):
        super().__init__()
        self.v = v

    def fresh(self) -> Var:
        return self.v


def lift_derivation(sys: HSystem, d: LinearDerivation, c: Formula) -> LinearDerivation:
    """Prefix every line of ``d`` with the side disjunct ``c``."""
    b = ProofBuilder(sys)
    lines = _lift_into(b, sys, d, c, premise_line=lambda f: b.premise(disj(c, f)))
    return b.build(lines[len(d.steps)])


def _lift_into(b: ProofBuilder, sys: HSystem, d: LinearDerivation, c: Formula, premise_line) -> dict[int, int]:
    """Add to ``b`` the line ``c | gamma`` for every line ``gamma`` of ``d``."""
    lines: dict[int, int] = {}
    for i, step in enumerate(d.steps, 1):
        j = step.just
        if isinstance(j, Premise):
            lines[i] = premise_line(j.formula)
            continue
        refs = [lines[r] for r in j.refs]
        if isinstance(j, ChainApp):
            substs = j.substs or (None,) * len(j.rules)
            current = refs
            for rule, sub in zip(j.rules, substs):
                current = [_lift_apply(b, sys, rule, current, sub, c)]
            lines[i] = current[0]
        else:
            lines[i] = _lift_apply(b, sys, j.rule, refs, j.subst, c)
    return lines


def _lift_apply(b: ProofBuilder, sys: HSystem, rule: str, refs, sub, c: Formula) -> int:
    if rule == BOMB:
        raise TransformError(f"cannot lift an application of {BOMB}")
    if sub is None:
        raise TransformError(f"step with {rule} has no substitution; normalize first")
    lifted = ensure_lift(sys, rule)
    s = dict(sub)
    s[lift_variable(sys.lookup(lifted))] = c
    return b.apply(lifted, refs, s)


# --- deduction transforms -------------------------------------------------------


def _check_input(sys: HSystem, d: LinearDerivation) -> LinearDerivation:
    if not d.steps:
        raise TransformError("empty derivation")
    try:
        d = normalize(sys, d)
    except ProofError as exc:
        raise TransformError(f"input derivation does not verify: {exc}") from exc
    v = verify_derivation(sys, d, Statement.of(d.premises, [d.conclusion]))
    if not v.accepted:
        raise TransformError(f"input derivation does not verify: {v}")
    return d


def _split(disjunction: Formula, delta: Formula) -> Formula:
    if not is_conn(disjunction, OR):
        raise TransformError(f"{render_formula(disjunction)} is not a disjunction")
    left, right = disjunction.args
    if delta not in (left, right):
        raise TransformError(f"{render_formula(delta)} is not a disjunct of {render_formula(disjunction)}")
    return right if delta == left else left


def _delta_first(b: ProofBuilder, disjunction: Formula, delta: Formula) -> tuple[int, int]:
    """Lines of the disjunction and of its variant with ``delta`` on the left."""
    d_line = b.premise(disjunction)
    if disjunction.args[0] == delta:
        return d_line, d_line
    return d_line, b.apply("BK23", [d_line])


def _deduction_into(b: ProofBuilder, sys: HSystem, d: LinearDerivation, disjunction: Formula, delta: Formula) -> dict[int, int]:
    _split(disjunction, delta)
    c = neg(delta)
    d_line, first = _delta_first(b, disjunction, delta)

    def premise_line(g: Formula) -> int:
        if g == delta:
            # delta | ~delta, then commute
            return b.apply("BK23", [b.apply("BK15s", [first])])
        if g == disjunction:
            if disjunction.args[0] == delta:
                return b.apply("BK25", [d_line])
            flipped = b.apply("BK25", [first])
            return b.apply("BK23v", [flipped], {lift_variable(sys.rule("BK23v")): c})
        return b.apply("BK24", [first, b.premise(g)])

    return _lift_into(b, sys, d, c, premise_line)


def deduction_transform(sys: HSystem, d: LinearDerivation, disjunction: Formula, delta: Formula) -> LinearDerivation:
    """From Gamma, phi|psi, delta |- gamma (no explosion) to Gamma, phi|psi |- ~delta | gamma."""
    d = _check_input(sys, d)
    if uses_rule(sys, d, BOMB):
        raise TransformError(f"the deduction transform needs a derivation without {BOMB}")
    b = ProofBuilder(sys)
    lines = _deduction_into(b, sys, d, disjunction, delta)
    return b.build(lines[len(d.steps)])


def _first_bomb(d: LinearDerivation) -> Optional[int]:
    for i, step in enumerate(d.steps, 1):
        j = step.just
        names = j.rules if isinstance(j, ChainApp) else (() if isinstance(j, Premise) else (j.rule,))
        if BOMB in names:
            return i
    return None


def _bomb_free_prefix(sys: HSystem, d: LinearDerivation) -> tuple[LinearDerivation, int]:
    """Expand steps that hide an explosion; return d and the line of the first explosion."""
    hidden = False
    for s in d.steps:
        j = s.just
        if isinstance(j, ChainApp):
            hidden |= BOMB in j.rules[1:] or any(r in sys.derived for r in j.rules)
        elif isinstance(j, (RuleApp, DerivedApp)) and j.rule in sys.derived:
            hidden |= uses_rule(sys, sys.derived[j.rule].template, BOMB)
    if hidden:
        d = expand_derivation(sys, d)
    k = _first_bomb(d)
    if k is None:
        raise TransformError(f"derivation does not apply {BOMB}")
    return d, k


def _bomb_refs(d: LinearDerivation, k: int) -> tuple[int, int]:
    """Lines of gamma and ~gamma feeding the first explosion (possibly inside a chain)."""
    j = d.steps[k - 1].just
    refs = list(j.refs)
    if len(refs) == 1:
        refs = refs * 2
    a, bb = refs
    fa, fb = d.steps[a - 1].formula, d.steps[bb - 1].formula
    if fb == neg(fa):
        return a, bb
    return bb, a


def neg_deduction_transform(sys: HSystem, d: LinearDerivation, disjunction: Formula, delta: Formula) -> LinearDerivation:
    """From Gamma, phi|psi, delta |- ~delta to Gamma, phi|psi |- ~delta."""
    d = _check_input(sys, d)
    c = neg(delta)
    if d.conclusion != c:
        raise TransformError(f"derivation must conclude {render_formula(c)}")
    _split(disjunction, delta)
    b = ProofBuilder(sys)
    if not uses_rule(sys, d, BOMB):
        lines = _deduction_into(b, sys, d, disjunction, delta)
        return b.build(b.apply("BK22", [lines[len(d.steps)]]))
    d, k = _bomb_free_prefix(sys, d)
    m1, m2 = _bomb_refs(d, k)
    gm = d.steps[m1 - 1].formula
    pre = ProofBuilder(sys)
    pmap = pre.splice(LinearDerivation(d.steps[: k - 1], d.system))
    prefix = pre.build(pre.apply("BK4", [pmap[m1], pmap[m2]]))
    lines = _deduction_into(b, sys, prefix, disjunction, delta)
    both = lines[len(prefix.steps)]  # ~delta | (gm & ~gm)
    to_gm = b.line(disj(c, gm))
    not_both = b.apply("BK30", [to_gm], {Var("p"): delta, Var("q"): gm})
    flipped = b.apply("BK23", [both])
    return b.build(b.apply("BK20", [flipped, not_both]))


def explosion_transform(sys: HSystem, d: LinearDerivation, disjunction: Formula, delta1: Formula) -> LinearDerivation:
    """From Gamma, phi|psi, delta1 |- gamma using explosion to Gamma, phi|psi |- delta2."""
    d = _check_input(sys, d)
    delta2 = _split(disjunction, delta1)
    d, k = _bomb_free_prefix(sys, d)
    m1, m2 = _bomb_refs(d, k)
    pre = ProofBuilder(sys)
    pmap = pre.splice(LinearDerivation(d.steps[: k - 1], d.system))
    exploded = pre.apply(BOMB, [pmap[m1], pmap[m2]], {Var("q"): neg(delta1)})
    negated = neg_deduction_transform(sys, pre.build(exploded), disjunction, delta1)
    b = ProofBuilder(sys)
    lines = b.splice(negated)
    not_d1 = lines[len(negated.steps)]
    _, first = _delta_first(b, disjunction, delta1)
    goal = b.apply("BK20", [first, not_d1])
    if b.formula(goal) != delta2:
        raise TransformError("explosion transform produced the wrong formula")
    return b.build(goal)


def disjunction_elim(sys: HSystem, d1: LinearDerivation, d2: LinearDerivation, disjunction: Formula) -> LinearDerivation:
    """From Gamma, phi|psi, phi |- gamma and Gamma, phi|psi, psi |- gamma to Gamma, phi|psi |- gamma."""
    if not is_conn(disjunction, OR):
        raise TransformError(f"{render_formula(disjunction)} is not a disjunction")
    phi, psi = disjunction.args
    d1 = _check_input(sys, d1)
    d2 = _check_input(sys, d2)
    gamma = d1.conclusion
    if d2.conclusion != gamma:
        raise TransformError("the two derivations have different conclusions")
    side1 = (set(d1.premises) - {phi}) | {disjunction}
    side2 = (set(d2.premises) - {psi}) | {disjunction}
    if gamma in side1 or gamma in side2:
        b = ProofBuilder(sys)
        return b.build(b.premise(gamma))
    bomb1, bomb2 = uses_rule(sys, d1, BOMB), uses_rule(sys, d2, BOMB)
    b = ProofBuilder(sys)
    if not bomb1 and not bomb2:
        l1 = _deduction_into(b, sys, d1, disjunction, phi)[len(d1.steps)]
        l2 = _deduction_into(b, sys, d2, disjunction, psi)[len(d2.steps)]
        both = b.apply("BK28", [l1, l2])
        goal = b.apply("BK26", [both, b.premise(disjunction)])
        return b.build(goal)
    if bomb1:
        got, rest, hyp = explosion_transform(sys, d1, disjunction, phi), d2, psi
    else:
        got, rest, hyp = explosion_transform(sys, d2, disjunction, psi), d1, phi
    lines = b.splice(got)
    mapping = b.splice(rest, {hyp: lines[len(got.steps)]})
    return b.build(mapping[len(rest.steps)])


# --- completeness translation ---------------------------------------------------


def translate_bk(star: HSystem, h: HSystem, t: TreeDerivation, claim: Statement) -> LinearDerivation:
    """Linear derivation in the Set-Fmla BK system from a starred Set-Set tree."""
    if len(claim.succedent) != 1:
        raise TransformError("the translation needs a single conclusion")
    v = verify_derivation(star, t, claim)
    if not v.accepted:
        raise TransformError(f"input tree does not verify: {v}")
    goal = claim.succedent[0]
    memo: dict = {}
    return _translate(star, h, t.root, frozenset(t.root_label), goal, memo)


def _translate(star: HSystem, h: HSystem, node: TreeNode, label: frozenset, goal: Formula, memo: dict) -> LinearDerivation:
    key = (id(node), label)
    if key in memo:
        return memo[key]
    b = ProofBuilder(h)
    if node.rule is None:
        out = b.build(b.premise(goal))
    else:
        schema = star.rule(node.rule)
        s = dict(node.subst)
        ante = [substitute(f, s) for f in schema.antecedent]
        if node.star:
            if node.rule != "r1":
                raise TransformError(f"unexpected empty-succedent rule {node.rule}")
            g, ng = ante
            out = b.build(b.apply(BOMB, [b.premise(g), b.premise(ng)], {Var("q"): goal}))
        elif len(node.branches) == 1:
            f, child = node.branches[0]
            sub = _translate(star, h, child, label | {f}, goal, memo)
            if node.rule == "r20":  # p|p with a single branch
                line = b.apply("BK22", [b.premise(ante[0])])
            else:
                line = b.apply(star_name_to_h(node.rule), [b.premise(a) for a in ante], s)
            mapping = b.splice(sub, {f: line})
            out = b.build(mapping[len(sub.steps)])
        else:
            (f1, c1), (f2, c2) = node.branches
            if f1 in label:
                out = _translate(star, h, c1, label, goal, memo)
            elif f2 in label:
                out = _translate(star, h, c2, label, goal, memo)
            else:
                disjunction = ante[0]
                phi, psi = disjunction.args
                by_formula = dict(node.branches)
                d1 = _translate(star, h, by_formula[phi], label | {phi}, goal, memo)
                d2 = _translate(star, h, by_formula[psi], label | {psi}, goal, memo)
                out = disjunction_elim(h, d1, d2, disjunction)
    memo[key] = out
    return out


# --- comparing systems ------------------------------------------------------------


@dataclass
class InterderivabilityEntry:
    direction: str
    rule: str
    status: str


def rule_interderivability(
    a: HSystem, b: HSystem, cfg: Optional[SearchConfig] = None, rules: Optional[dict[str, Sequence[str]]] = None
) -> list[InterderivabilityEntry]:
    """Try to prove every rule of each system in the other.

    ``rules`` may restrict the check to {"a": [...], "b": [...]} rule names.
    """
    if a.kind != b.kind:
        raise TransformError("systems of different kinds")
    out = []
    for src, dst, tag in ((a, b, "a"), (b, a, "b")):
        names = rules.get(tag, []) if rules is not None else [r.name for r in src.rules]
        for name in names:
            r = src.rule(name)
            claim = Statement.of(r.antecedent, r.succedent)
            if dst.kind == SETSET:
                res = prove_setset_analytic(dst, claim, cfg)
            else:
                res = prove_setfmla_bounded(dst, claim, cfg)
            out.append(InterderivabilityEntry(f"{src.name} -> {dst.name}", name, res.status))
    return out

