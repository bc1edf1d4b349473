"""Seeded generators of formulas, statements and H_BK derivations for tests."""

from __future__ import annotations

import itertools
import random

from wkhilbert.calculus import Statement, prove
from wkhilbert.calculus.derivation import ProofBuilder, ProofError
from wkhilbert.formula import Var, conj, disj, neg, variables_of
from wkhilbert.transforms import (
    BOMB,
    deduction_transform,
    disjunction_elim,
    explosion_transform,
    is_core_rule,
    neg_deduction_transform,
)

ATOMS = [Var("p"), Var("q"), Var("r")]


def random_formula(rng: random.Random, depth: int, atoms=ATOMS):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(atoms)
    k = rng.randrange(3)
    if k == 0:
        return neg(random_formula(rng, depth - 1, atoms))
    a, b = random_formula(rng, depth - 1, atoms), random_formula(rng, depth - 1, atoms)
    return conj(a, b) if k == 1 else disj(a, b)


def literal(rng: random.Random, atoms=ATOMS):
    a = rng.choice(atoms)
    return neg(a) if rng.random() < 0.5 else a


def forward_steps(b: ProofBuilder, rng: random.Random, n: int, allow_bomb: bool = False) -> list[int]:
    """Apply ``n`` random core rules to lines already in ``b``; returns new lines."""
    sys = b.system
    rules = [r for r in sys.rules if is_core_rule(sys, r.name) and (allow_bomb or r.name != BOMB)]
    made = []
    for _ in range(n * 20):
        if len(made) >= n:
            break
        r = rng.choice(rules)
        k = len(r.antecedent)
        lines = list(range(1, len(b.steps) + 1))
        picks = [rng.choice(lines) for _ in range(k)]
        free = variables_of(r.succedent) - variables_of(r.antecedent)
        sub = {v: literal(rng) for v in free}
        for perm in itertools.permutations(picks):
            try:
                line = b.apply(r.name, list(perm), sub)
            except ProofError:
                continue
            if line == len(b.steps) and line not in made:
                made.append(line)
            break
    return made


# --- generated inputs for the four BK proof transforms ---------------------


def transform_setup(rng: random.Random):
    phi = literal(rng)
    psi = literal(rng)
    while psi == phi:
        psi = literal(rng)
    dis = disj(phi, psi)
    delta = rng.choice([phi, psi])
    gamma = sorted({g for g in (literal(rng) for _ in range(rng.randint(0, 2))) if g != delta}, key=str)
    return phi, psi, dis, delta, gamma


def base_derivation(h, rng: random.Random, premises, n: int = 4):
    b = ProofBuilder(h)
    for f in premises:
        b.premise(f)
    made = forward_steps(b, rng, n)
    return b.build(rng.choice(made) if made else len(b.steps))


def deduction_cases(h, seed: int, n: int):
    """Yield ``(output, claim)`` pairs for the deduction transform."""
    rng = random.Random(seed)
    for _ in range(n):
        phi, psi, dis, delta, gamma = transform_setup(rng)
        d = base_derivation(h, rng, gamma + [dis, delta])
        out = deduction_transform(h, d, dis, delta)
        yield out, Statement.of(gamma + [dis], [disj(neg(delta), d.conclusion)])


def neg_deduction_cases(h, seed: int, n: int):
    rng = random.Random(seed)
    for i in range(n):
        phi, psi, dis, delta, gamma = transform_setup(rng)
        d = base_derivation(h, rng, gamma + [dis, delta])
        b = ProofBuilder(h)
        b.splice(d)
        if i % 2:
            # through an explosion
            gm = d.conclusion
            ng = b.premise(neg(gm))
            goal = b.apply(BOMB, [b.line(gm), ng], {Var("q"): neg(delta)})
            extra = [neg(gm)]
        else:
            # through a triple negation
            nnn = b.premise(neg(neg(neg(delta))))
            goal = b.apply("BK3", [nnn])
            extra = [neg(neg(neg(delta)))]
        out = neg_deduction_transform(h, b.build(goal), dis, delta)
        yield out, Statement.of(gamma + [dis] + extra, [neg(delta)])


def explosion_cases(h, seed: int, n: int):
    rng = random.Random(seed)
    done = 0
    while done < n:
        phi, psi, dis, delta, gamma = transform_setup(rng)
        d = base_derivation(h, rng, gamma + [dis, delta])
        gm = d.conclusion
        b = ProofBuilder(h)
        b.splice(d)
        ng = b.premise(neg(gm))
        d2 = b.build(b.apply(BOMB, [b.line(gm), ng], {Var("q"): random_formula(rng, 2)}))
        if BOMB not in d2.rule_names():
            continue  # the exploded formula was already a line
        out = explosion_transform(h, d2, dis, delta)
        other = psi if delta == phi else phi
        done += 1
        yield out, Statement.of(gamma + [dis, neg(gm)], [other])


def disjunction_elim_cases(h, seed: int, n: int):
    rng = random.Random(seed)
    for i in range(n):
        phi, psi, dis, _, gamma = transform_setup(rng)
        d1 = base_derivation(h, rng, gamma + [dis, phi], 3)
        target = d1.conclusion
        b = ProofBuilder(h)
        for f in gamma + [dis]:
            b.premise(f)
        if i % 3 == 0:
            # both sides derive the target the same way from the disjunction
            d1 = prove(h, Statement.of(gamma + [dis, phi], [disj(psi, phi)])).proof
            d2 = prove(h, Statement.of(gamma + [dis, psi], [disj(psi, phi)])).proof
            target, extra = disj(psi, phi), []
        else:
            p_line = b.premise(psi)
            n_line = b.premise(neg(psi))
            d2 = b.build(b.apply(BOMB, [p_line, n_line], {Var("q"): target}))
            extra = [neg(psi)]
        out = disjunction_elim(h, d1, d2, dis)
        yield out, Statement.of(gamma + [dis] + extra, [target])


TRANSFORM_CASES = {
    "deduction_transform": deduction_cases,
    "neg_deduction_transform": neg_deduction_cases,
    "explosion_transform": explosion_cases,
    "disjunction_elim": disjunction_elim_cases,
}
