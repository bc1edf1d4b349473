"""Proof search.

``prove_setset_analytic`` decides provability in an analytic Set-Set system.
Labels are bitmasks over the analytic universe.  A label is first saturated
with every applicable single-conclusion instance; then it closes (meets the
goal or fires an empty-succedent instance) or branches on the first
applicable multi-conclusion instance none of whose conclusions is present yet.
Branching is invertible (a label is provable iff every extension by one of
the conclusions is), so no backtracking over rule choice is needed, and a
fully saturated open label is a definitive failure.

``prove_setfmla_bounded`` is a plain forward saturation over a bounded
universe and only ever answers "proved" or "don't know".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ..formula import (
    OR,
    App,
    Formula,
    Var,
    canonical,
    disj,
    match_schema,
    neg,
    parse_formula,
    sort_key,
    subformulas_of,
    substitute,
    theta_subformulas,
    variables,
)
from .derivation import (
    ProofBuilder,
    Statement,
    TreeDerivation,
    TreeNode,
    restrict,
)
from .rules import SETFMLA, SETSET, HSystem, RuleSchema

PROVED = "proved"
NO_PROOF = "no-proof"
BUDGET = "budget-exhausted"
INCONCLUSIVE = "no-proof-within-budget"

DEFAULT_THETA = (parse_formula("x"), parse_formula("~x"))


@dataclass
class SearchConfig:
    theta: Sequence[Formula] = DEFAULT_THETA
    universe: Optional[Sequence[Formula]] = None
    max_nodes: int = 200_000
    max_steps: int = 20_000
    max_universe: int = 500
    verify: bool = True
    # add x|~x and ~x|x for every subformula; None means "if some rule concludes one"
    excluded_middle: Optional[bool] = None

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_steps <= 0 or self.max_universe <= 0:
            raise ValueError("search budgets must be positive")


@dataclass
class SearchResult:
    status: str
    proof: Optional[object] = None
    # for a failed analytic search: a saturated label with no way forward
    witness: Optional[tuple[Formula, ...]] = None
    universe_size: int = 0
    nodes: int = 0
    note: str = ""

    @property
    def proved(self) -> bool:
        return self.status == PROVED


class BudgetExhausted(Exception):
    pass


# --- instance enumeration ----------------------------------------------------


def _index_by_head(pool: Iterable[Formula]) -> dict:
    idx: dict = {}
    for f in pool:
        key = f.conn if isinstance(f, App) else None
        idx.setdefault(key, []).append(f)
    return idx


def _candidates(pat: Formula, idx: dict, pool: Sequence[Formula]):
    if isinstance(pat, Var):
        return pool
    return idx.get(pat.conn, ())


def instances_over(rule: RuleSchema, pools: Sequence[tuple[Formula, Sequence[Formula], dict, set]]):
    """Substitutions making each pattern match a member of its own pool.

    ``pools`` lists (pattern, members, head index, membership set); patterns
    whose variables are already bound are checked by membership only.
    """
    out = []

    def rec(k: int, s: dict):
        if k == len(pools):
            out.append(s)
            return
        pat, members, idx, member_set = pools[k]
        if all(v in s for v in _vars(pat)):
            if substitute(pat, s) in member_set:
                rec(k + 1, s)
            return
        for f in _candidates(pat, idx, members):
            m = match_schema(pat, f, s)
            if m is not None:
                rec(k + 1, m)

    rec(0, {})
    return out


_VARS_CACHE: dict = {}


def _vars(f: Formula):
    hit = _VARS_CACHE.get(f)
    if hit is None:
        hit = _VARS_CACHE[f] = variables(f)
    return hit


def subst_key(s: dict) -> tuple:
    return tuple(sort_key(s[v]) for v in sorted(s, key=lambda v: v.name))


def analytic_instances(rule: RuleSchema, universe: Sequence[Formula], idx: dict, members: set) -> list[dict]:
    """All instances of ``rule`` with every formula inside the universe, canonical order."""
    pats = sorted(set(rule.antecedent + rule.succedent), key=lambda p: -p.size)
    found = instances_over(rule, [(p, universe, idx, members) for p in pats])
    return sorted(found, key=subst_key)


def star_universe(universe: Iterable[Formula]) -> tuple[Formula, ...]:
    """Universe extended by the excluded-middle disjunctions used by the starred rules."""
    base = list(universe)
    out = set(base)
    for f in subformulas_of(base):
        out.add(disj(neg(f), f))
        out.add(disj(f, neg(f)))
    return canonical(out)


def _is_excluded_middle(f: Formula) -> bool:
    if not (isinstance(f, App) and f.conn == OR):
        return False
    a, b = f.args
    return a == neg(b) or b == neg(a)


# --- Set-Set analytic search -------------------------------------------------


@dataclass
class _Inst:
    rule: str
    subst: dict
    ante: int
    succ: tuple[int, ...]


@dataclass
class _Proof:
    kind: str  # close | star | apply
    inst: Optional[_Inst] = None
    close: int = -1
    children: list = field(default_factory=list)  # (bit index, _Proof)


def prove_setset_analytic(sys: HSystem, claim: Statement, cfg: Optional[SearchConfig] = None) -> SearchResult:
    cfg = cfg or SearchConfig()
    if sys.kind != SETSET:
        raise ValueError(f"{sys.name} is not a Set-Set system")
    if cfg.universe is not None:
        universe = canonical(list(cfg.universe) + list(claim.antecedent) + list(claim.succedent))
    else:
        universe = theta_subformulas(claim.antecedent, claim.succedent, cfg.theta)
    em = cfg.excluded_middle
    if em is None:
        em = any(_is_excluded_middle(f) for r in sys.rules for f in r.succedent)
    if em:
        universe = star_universe(universe)
    pos = {f: i for i, f in enumerate(universe)}
    members = set(universe)
    idx = _index_by_head(universe)

    singles: list[_Inst] = []
    stars: list[_Inst] = []
    multis: list[_Inst] = []
    for rule in sys.rules:
        for s in analytic_instances(rule, universe, idx, members):
            ante = 0
            for f in rule.antecedent:
                ante |= 1 << pos[substitute(f, s)]
            succ = tuple(dict.fromkeys(pos[substitute(f, s)] for f in rule.succedent))
            inst = _Inst(rule.name, s, ante, succ)
            if not succ:
                stars.append(inst)
            elif len(succ) == 1:
                singles.append(inst)
            else:
                multis.append(inst)

    goal = 0
    for f in claim.succedent:
        goal |= 1 << pos[f]
    root = 0
    for f in claim.antecedent:
        root |= 1 << pos[f]

    memo: dict[int, Optional[_Proof]] = {}
    failed_witness = [None]
    counter = [0]

    def first_bit(mask: int) -> int:
        return (mask & -mask).bit_length() - 1

    def solve(label: int) -> Optional[_Proof]:
        if label in memo:
            return memo[label]
        counter[0] += 1
        if counter[0] > cfg.max_nodes:
            raise BudgetExhausted()
        chain: list[tuple[_Inst, int]] = []
        sat = label
        result: Optional[_Proof] = None
        changed = True
        while changed and not sat & goal:
            changed = False
            for inst in singles:
                bit = 1 << inst.succ[0]
                if not sat & bit and inst.ante & sat == inst.ante:
                    sat |= bit
                    chain.append((inst, inst.succ[0]))
                    changed = True
                    if sat & goal:
                        break
        if sat & goal:
            result = _Proof("close", close=first_bit(sat & goal))
        else:
            for inst in stars:
                if inst.ante & sat == inst.ante:
                    result = _Proof("star", inst)
                    break
        if result is None:
            pick = None
            for inst in multis:
                if inst.ante & sat == inst.ante and not any(sat >> b & 1 for b in inst.succ):
                    pick = inst
                    break
            if pick is None:
                if failed_witness[0] is None:
                    failed_witness[0] = sat
                memo[label] = memo[sat] = None
                return None
            kids = []
            for b in pick.succ:
                sub = solve(sat | 1 << b)
                if sub is None:
                    memo[label] = memo[sat] = None
                    return None
                kids.append((b, sub))
            result = _Proof("apply", pick, children=kids)
        for inst, b in reversed(chain):
            result = _Proof("apply", inst, children=[(b, result)])
        memo[label] = result
        return result

    try:
        found = solve(root)
    except BudgetExhausted:
        return SearchResult(BUDGET, universe_size=len(universe), nodes=counter[0])
    if found is None:
        witness = failed_witness[0]
        shown = tuple(f for i, f in enumerate(universe) if witness is not None and witness >> i & 1)
        return SearchResult(NO_PROOF, witness=shown, universe_size=len(universe), nodes=counter[0])
    pruned, _ = _prune(found, {})
    tree = TreeDerivation(tuple(claim.antecedent), _to_tree(pruned, universe), sys.name)
    if cfg.verify:
        from .verify import verify_derivation

        v = verify_derivation(sys, tree, claim)
        if not v.accepted:
            raise AssertionError(f"search produced an invalid proof: {v}")
    return SearchResult(PROVED, tree, universe_size=len(universe), nodes=counter[0])


def _prune(p: _Proof, memo: dict) -> tuple[_Proof, frozenset]:
    """Drop steps whose conclusions are never used below them.

    Returns the pruned proof and the label formulas it depends on.
    """
    key = id(p)
    if key in memo:
        return memo[key]
    if p.kind == "close":
        out = (p, frozenset((p.close,)))
    elif p.kind == "star":
        out = (p, _bits(p.inst.ante))
    else:
        kids = []
        used = set(_bits(p.inst.ante))
        out = None
        for b, child in p.children:
            c, u = _prune(child, memo)
            if b not in u:
                # the child never needs the new formula, so it proves the parent label
                out = (c, u)
                break
            kids.append((b, c))
            used |= u - {b}
        if out is None:
            out = (_Proof("apply", p.inst, children=kids), frozenset(used))
    memo[key] = out
    return out


def _bits(mask: int) -> frozenset:
    out = set()
    i = 0
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _to_tree(p: _Proof, universe: Sequence[Formula]) -> TreeNode:
    if p.kind == "close":
        return TreeNode(close=universe[p.close])
    rule = p.inst.rule
    subst = dict(sorted(p.inst.subst.items(), key=lambda kv: kv[0].name))
    if p.kind == "star":
        return TreeNode(rule, subst, star=True)
    branches = tuple((universe[b], _to_tree(c, universe)) for b, c in p.children)
    return TreeNode(rule, subst, branches)


# --- Set-Fmla bounded search -------------------------------------------------


def default_setfmla_universe(
    claim: Statement, theta: Sequence[Formula], cap: int, connectives: Sequence[str] = (OR,)
) -> tuple[tuple[Formula, ...], bool]:
    """Theta-subformulas of the claim and one layer of binary compounds over them, capped."""
    base = theta_subformulas(claim.antecedent, claim.succedent, theta)
    out = set(base)
    for conn in connectives:
        for a in base:
            for b in base:
                out.add(App(conn, (a, b)))
    ordered = canonical(out)
    truncated = len(ordered) > cap
    if truncated:
        keep = set(ordered[:cap]) | set(claim.antecedent) | set(claim.succedent)
        ordered = canonical(keep)
    return ordered, truncated


def prove_setfmla_bounded(sys: HSystem, claim: Statement, cfg: Optional[SearchConfig] = None) -> SearchResult:
    cfg = cfg or SearchConfig()
    if sys.kind != SETFMLA:
        raise ValueError(f"{sys.name} is not a Set-Fmla system")
    goal = claim.conclusion
    truncated = False
    if cfg.universe is not None:
        universe = canonical(list(cfg.universe) + list(claim.antecedent) + [goal])
    else:
        layer = (OR,) if OR in sys.signature else tuple(c for c in sorted(sys.signature.connectives) if sys.signature.arity(c) == 2)
        universe, truncated = default_setfmla_universe(claim, cfg.theta, cfg.max_universe, layer)
    u_idx = _index_by_head(universe)
    u_set = set(universe)

    # formula -> (rule name, substitution, antecedent formulas); None for premises
    why: dict[Formula, Optional[tuple]] = {}
    order: list[Formula] = []
    for f in claim.antecedent:
        why[f] = None
        order.append(f)
    steps = 0
    found = goal in why
    while not found:
        grew = False
        for rule in sys.rules:
            have = list(order)
            d_idx = _index_by_head(have)
            d_set = set(have)
            pats = [(p, have, d_idx, d_set) for p in rule.antecedent]
            pats.append((rule.conclusion, universe, u_idx, u_set))
            for s in sorted(instances_over(rule, pats), key=subst_key):
                concl = substitute(rule.conclusion, s)
                if concl in why:
                    continue
                steps += 1
                if steps > cfg.max_steps:
                    return SearchResult(BUDGET, universe_size=len(universe), nodes=steps)
                why[concl] = (rule.name, restrict(s, rule.variables), tuple(substitute(a, s) for a in rule.antecedent))
                order.append(concl)
                grew = True
                if concl == goal:
                    found = True
                    break
            if found:
                break
        if not grew:
            break
    if not found:
        note = "universe truncated" if truncated else "saturated without reaching the goal"
        return SearchResult(INCONCLUSIVE, universe_size=len(universe), nodes=steps, note=note)

    needed = set()
    stack = [goal]
    while stack:
        f = stack.pop()
        if f in needed:
            continue
        needed.add(f)
        if why[f] is not None:
            stack.extend(why[f][2])
    b = ProofBuilder(sys)
    for f in order:
        if f not in needed:
            continue
        if why[f] is None:
            b.premise(f)
        else:
            name, s, ante = why[f]
            b.apply(name, [b.line(a) for a in ante], s)
    proof = b.build(b.line(goal))
    if cfg.verify:
        from .verify import verify_derivation

        v = verify_derivation(sys, proof, claim)
        if not v.accepted:
            raise AssertionError(f"search produced an invalid proof: {v}")
    return SearchResult(PROVED, proof, universe_size=len(universe), nodes=steps)


def prove(sys: HSystem, claim: Statement, cfg: Optional[SearchConfig] = None) -> SearchResult:
    if sys.kind == SETSET:
        return prove_setset_analytic(sys, claim, cfg)
    return prove_setfmla_bounded(sys, claim, cfg)
