"""Acceptance gate: one test per criterion, summarised at the end of the run.

Every test records its criterion number, a title and a detail line through
``record_property``; ``conftest.py`` prints them as a pass/fail table.
"""

import random
import subprocess
import sys
import time

import pytest

from gen import TRANSFORM_CASES, random_formula
from test_cli import CASES
from wkhilbert import corpus
from wkhilbert.calculus import (
    BUDGET,
    LinearDerivation,
    Statement,
    prove_setset_analytic,
    rule_sound,
    verify_derivation,
)
from wkhilbert.cli import run, statement_family
from wkhilbert.formula import Var, disj, formulas_up_to, neg, theta_subformulas, variables, variables_of
from wkhilbert.semantics import (
    BK,
    M_PRIME,
    PWK,
    WK,
    check_matrix_renaming,
    check_monadicity,
    companion_oracle,
    consequence_holds,
    evaluate,
)
from wkhilbert.transforms import (
    dualize_system,
    lifted_derivation_scheme,
    or_convert_system,
    rule_interderivability,
    rules_equal_up_to_renaming,
    systems_equal_up_to_renaming,
    translate_bk,
)

P, Q, X = Var("p"), Var("q"), Var("x")
THETA = [X, neg(X)]
FAMILY_SEED = 0


@pytest.fixture
def crit(record_property):
    """Returns ``start(n, title)``; the returned setter records the detail line."""

    def start(n, title):
        record_property("criterion", n)
        record_property("title", title)

        def detail(text):
            record_property("detail", text)

        return detail

    return start


@pytest.fixture(scope="module")
def family_runs():
    """Analytic search and truth tables over the desk-scale family, for three systems."""
    family = statement_family(2, 1, 2, sample=200, seed=FAMILY_SEED)
    runs = {}
    t0 = time.perf_counter()
    for sid in ("R_PWK", "R_BK", "SS-CL"):
        sys_ = corpus.get_system(sid)
        m = corpus.get_matrix(corpus.SYSTEM_MATRIX[sid])
        rows = []
        for claim in family:
            res = prove_setset_analytic(sys_, claim)
            holds = consequence_holds(m, claim.antecedent, claim.succedent).holds
            rows.append((claim, res, holds))
        runs[sid] = rows
    return family, runs, time.perf_counter() - t0


# ---------------------------------------------------------------------------


EXPECTED_RULES = {
    "SS-CL": 8,
    "R_PWK": 20,
    "H_PWK": 23,
    "R_BK": 20,
    "R_BK_star": 20,
    "H_BK": 47,
    "SF-CL": 4,
}


def test_c01_soundness_sweeps(crit):
    detail = crit(1, "soundness sweeps")
    t0 = time.perf_counter()
    counts, failures, too_wide = {}, [], []
    for sid, expected in EXPECTED_RULES.items():
        sys_ = corpus.get_system(sid)
        m = corpus.get_matrix(corpus.SYSTEM_MATRIX[sid])
        counts[sid] = len(sys_.rules)
        for r in sys_.rules:
            if len(variables_of(r.antecedent + r.succedent)) > 4:
                too_wide.append(r.name)
            if not rule_sound(m, r).holds:
                failures.append(f"{sid}:{r.name}")
    elapsed = time.perf_counter() - t0
    total = sum(counts.values())
    detail(f"{total} rules in 7 systems, {len(failures)} unsound, {elapsed:.2f}s (limit 5s)")
    assert counts == EXPECTED_RULES
    assert not failures
    assert not too_wide
    assert elapsed < 5.0


def test_c02_desk_scale_agreement(crit, family_runs):
    detail = crit(2, "desk-scale agreement")
    family, runs, elapsed = family_runs
    parts, bad, budget = [], 0, 0
    for sid, rows in runs.items():
        dis = sum(res.proved != holds for _, res, holds in rows if res.status != BUDGET)
        bud = sum(res.status == BUDGET for _, res, _ in rows)
        parts.append(f"{sid} {sum(r.proved for _, r, _ in rows)} proved/{dis} disagree/{bud} budget")
        bad += dis
        budget += bud
    detail(f"{len(family)} statements per system; " + "; ".join(parts) + f"; {elapsed:.1f}s (limit 600s)")
    assert len(family) == 79 * 79 + 3 * 200
    assert bad == 0 and budget == 0
    assert elapsed < 600


def test_c03_theta_analyticity(crit, family_runs):
    detail = crit(3, "theta-analyticity of search proofs")
    _, runs, _ = family_runs
    checked, violations = 0, []
    for sid, rows in runs.items():
        for claim, res, _ in rows:
            if not res.proved:
                continue
            allowed = set(theta_subformulas(claim.antecedent, claim.succedent, THETA))
            used = set().union(*res.proof.labels())
            checked += 1
            if not used <= allowed:
                violations.append((sid, claim))
    detail(f"{checked} proofs checked, {len(violations)} violations")
    assert checked > 0
    assert not violations


CORPUS_ENTRIES = {
    "cl-p-imp-p": 5,
    "sscl-excluded-middle": None,
    "sscl-demorgan": None,
    "bk-demorgan": None,
    "bk25": 6,
    "bk28": 6,
    "bk29": None,
}


def test_c04_corpus_derivations(crit):
    detail = crit(4, "corpus derivations")
    h = corpus.get_system("H_BK")
    results = {}
    for did, steps in CORPUS_ENTRIES.items():
        e = corpus.get_derivation(did)
        sys_ = corpus.get_system(e.system)
        ok = verify_derivation(sys_, e.derivation, e.claim).accepted
        if isinstance(e.derivation, LinearDerivation):
            ok = ok and verify_derivation(sys_, e.derivation, e.claim, expand=True).accepted
        if steps is not None:
            ok = ok and len(e.derivation.steps) == steps
        results[did] = ok
    for name in ("BK3", "BK4", "BK12"):
        d = lifted_derivation_scheme(h, name)
        claim = Statement.of(d.premises, [d.conclusion])
        results[f"lift-{name}"] = (
            verify_derivation(h, d, claim).accepted and verify_derivation(h, d, claim, expand=True).accepted
        )
    passed = sum(results.values())
    detail(f"{passed}/{len(results)} verified ({', '.join(k for k, v in results.items() if not v) or 'none failed'})")
    assert passed == len(results)


def test_c05_transform_identities(crit):
    detail = crit(5, "dualization and or-conversion")
    r_pwk = corpus.get_system("R_PWK")
    dual_ok = systems_equal_up_to_renaming(dualize_system(r_pwk), corpus.get_system("R_BK"))
    conv = or_convert_system(r_pwk)
    h_pwk = corpus.get_system("H_PWK")
    _, only_conv, only_h = rules_equal_up_to_renaming(conv.system.rules, h_pwk.rules)
    closed = rule_interderivability(conv.system, h_pwk, rules={"a": only_conv, "b": only_h})
    statuses = [e.status for e in closed]
    detail(
        f"dualize {'equal' if dual_ok else 'DIFFERENT'}; or-convert exceptions: discarded {conv.discarded}, "
        f"unmatched {only_conv} vs {only_h}, interderivability {statuses}"
    )
    assert dual_ok
    assert conv.discarded == ["r15"]
    assert len(only_conv) == 1 and only_h == ["hPWK1"]
    assert statuses == ["proved", "proved"]


def test_c06_companion_oracles(crit):
    detail = crit(6, "variable-inclusion companions")
    rng = random.Random(6)
    t0 = time.perf_counter()
    mismatches, valid = 0, {"PWK": 0, "BK": 0}
    for _ in range(1000):
        gamma = [random_formula(rng, 3) for _ in range(rng.randint(0, 3))]
        psi = random_formula(rng, 3)
        for name, m in (("PWK", PWK), ("BK", BK)):
            brute = consequence_holds(m, gamma, [psi]).holds
            valid[name] += brute
            mismatches += companion_oracle(name, gamma, psi) != brute
    elapsed = time.perf_counter() - t0
    detail(f"1000 samples, {mismatches} mismatches (valid: PWK {valid['PWK']}, BK {valid['BK']}), {elapsed:.1f}s (limit 30s)")
    assert mismatches == 0
    assert elapsed < 30


def test_c07_disj_for_pwk_and_bk_witnesses(crit):
    detail = crit(7, "(disj) for PWK, BK witnesses")
    rng = random.Random(7)
    failures, nontrivial = 0, 0
    for _ in range(300):
        gamma = [random_formula(rng, 2) for _ in range(rng.randint(0, 2))]
        phi, psi, gam = (random_formula(rng, 2) for _ in range(3))
        left = consequence_holds(PWK, gamma + [disj(phi, psi)], [gam]).holds
        right = (
            consequence_holds(PWK, gamma + [phi], [gam]).holds and consequence_holds(PWK, gamma + [psi], [gam]).holds
        )
        failures += left != right
        nontrivial += left
    # witnesses: every binary C over {p,q} using both variables
    binary = [c for c in formulas_up_to([P, Q], 2) if variables(c) == {P, Q}]
    v1, v2 = {P: "u", Q: "t"}, {P: "f", Q: "u"}
    witness_bad = 0
    for c in binary:
        em = disj(c, neg(c))
        # C |- C or not C holds, yet q |- C or not C fails at v1
        ok1 = consequence_holds(BK, [c], [em]).holds
        ok1 = ok1 and evaluate(Q, WK, v1) in BK.designated and evaluate(em, WK, v1) not in BK.designated
        # not p, p |- q holds, yet not p |- C fails at v2
        ok2 = consequence_holds(BK, [neg(P), P], [Q]).holds
        ok2 = ok2 and evaluate(neg(P), WK, v2) in BK.designated and evaluate(c, WK, v2) not in BK.designated
        witness_bad += not (ok1 and ok2)
    detail(f"300 quadruples, {failures} failures ({nontrivial} valid); {len(binary)} binary C, {witness_bad} witness failures")
    assert failures == 0
    assert binary and witness_bad == 0


def test_c08_completeness_translation(crit, family_runs):
    detail = crit(8, "R_BK* to H_BK translation")
    _, runs, _ = family_runs
    star = corpus.get_system("R_BK_star")
    h = corpus.get_system("H_BK")
    claims = sorted({claim for claim, res, _ in runs["R_BK"] if res.proved and len(claim.succedent) == 1}, key=str)
    good, failed = 0, []
    for claim in claims:
        res = prove_setset_analytic(star, claim)
        if not res.proved:
            failed.append(claim)
            continue
        d = translate_bk(star, h, res.proof, claim)
        if verify_derivation(h, d, claim).accepted and d.conclusion == claim.conclusion:
            good += 1
        else:
            failed.append(claim)
    detail(f"{len(claims)} provable singleton-succedent statements, {good} translations verify")
    assert len(claims) >= 30
    assert not failed


def test_c09_proof_transforms(crit):
    detail = crit(9, "proof transforms on generated inputs")
    h = corpus.get_system("H_BK")
    counts = {}
    for seed, (name, cases) in enumerate(TRANSFORM_CASES.items(), start=901):
        ok = total = 0
        for out, claim in cases(h, seed, 40):
            total += 1
            ok += verify_derivation(h, out, claim).accepted and out.conclusion == claim.conclusion
        counts[name] = (ok, total)
    detail(", ".join(f"{k} {ok}/{n}" for k, (ok, n) in counts.items()))
    for ok, n in counts.values():
        assert n >= 30 and ok == n


def test_c10_matrix_structure(crit):
    detail = crit(10, "matrix renaming and monadicity")
    swap = {"t": "f", "f": "t", "u": "u"}
    renamed = check_matrix_renaming(BK, M_PRIME, swap)
    coverage = {}
    for name, m in (("PWK", PWK), ("BK", BK)):
        report = check_monadicity(m, THETA)
        coverage[name] = (sum(s is not None for s in report.values()), len(report))
    detail(f"BK ~ M' under t<->f: {renamed}; separators " + ", ".join(f"{k} {a}/{b}" for k, (a, b) in coverage.items()))
    assert renamed
    assert all(a == b == 3 for a, b in coverage.values())


ROUNDTRIP = [
    ("R_PWK", "", "p | ~p"),
    ("R_BK", "p, q", "p & q"),
    ("SS-CL", "~(p & q)", "~p, ~q"),
    ("R_BK_star", "~(p & q)", "~p | ~q"),
    ("H_BK", "~p | q, p", "q"),
    ("H_PWK", "p", "p | q"),
    ("SF-CL", "p", "q -> p"),
]


def test_c11_cli_contract(crit, tmp_path):
    detail = crit(11, "CLI exit codes, determinism, round-trip")
    code_ok = sum(run(argv).code == code for argv, code, _ in CASES)
    det_ok = sum(run(argv).report == run(argv).report for argv, _, _ in CASES)
    trips = 0
    for system, lhs, rhs in ROUNDTRIP:
        out = tmp_path / f"{system}.drv"
        emitted = run(["prove", "--system", system, "--lhs", lhs, "--rhs", rhs, "-o", str(out)])
        checked = run(["verify", str(out)])
        trips += emitted.code == 0 and checked.code == 0 and checked.report.startswith("accepted")
    # a translated proof must also verify in a fresh interpreter
    tree, lin = tmp_path / "tree.drv", tmp_path / "lin.drv"
    run(["prove", "--system", "R_BK_star", "--lhs", "~(p & q)", "--rhs", "~p | ~q", "-o", str(tree)])
    run(["translate-bk", str(tree), "-o", str(lin)])
    proc = subprocess.run([sys.executable, "-m", "wkhilbert", "verify", str(lin)], capture_output=True, text=True)
    trips += proc.returncode == 0 and proc.stdout.startswith("accepted")
    n = len(CASES)
    detail(f"{code_ok}/{n} exit codes, {det_ok}/{n} deterministic, {trips}/{len(ROUNDTRIP) + 1} prove->verify round-trips")
    assert n >= 15
    assert code_ok == n and det_ok == n and trips == len(ROUNDTRIP) + 1
