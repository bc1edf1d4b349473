import itertools
import random

import pytest

from gen import random_formula
from wkhilbert.formula import Var, conj, disj, formulas_up_to, neg, parse_formula, parse_formula_list, variables
from wkhilbert.semantics import (
    BK,
    CL,
    M_PRIME,
    PWK,
    WK,
    EvaluationError,
    MatrixFormatError,
    check_matrix_renaming,
    check_monadicity,
    companion_oracle,
    consequence_holds,
    dump_matrix,
    entails,
    evaluate,
    is_monadic,
    load_matrix,
    valuations,
)

P, Q = Var("p"), Var("q")
X = Var("x")


def F(text):
    return parse_formula(text)


def test_weak_kleene_tables_are_infectious():
    for conn in ("and", "or"):
        for a in WK.carrier:
            assert WK.apply(conn, "u", a) == "u"
            assert WK.apply(conn, a, "u") == "u"
    assert WK.apply("neg", "u") == "u"
    assert WK.apply("and", "t", "f") == "f"
    assert WK.apply("or", "t", "f") == "t"


def test_weak_kleene_agrees_with_classical_on_t_f():
    for conn in ("and", "or"):
        for a, b in itertools.product("tf", repeat=2):
            assert WK.apply(conn, a, b) == CL.algebra.apply(conn, a, b)


def test_evaluate_and_missing_variable():
    assert evaluate(F("p | ~q"), WK, {P: "t", Q: "u"}) == "u"
    assert evaluate(F("p | ~q"), WK, {P: "f", Q: "f"}) == "t"
    with pytest.raises(EvaluationError):
        evaluate(F("p & q"), WK, {P: "t"})


def test_valuations_enumerate_in_carrier_order():
    vs = list(valuations([Q, P], WK.carrier))
    assert len(vs) == 9
    assert vs[0] == {P: "f", Q: "f"} and vs[1] == {P: "f", Q: "u"}


@pytest.mark.parametrize(
    "m,lhs,rhs,holds",
    [
        (PWK, "", "p | ~p", True),
        (BK, "", "p | ~p", False),
        (PWK, "p, ~p", "q", False),
        (BK, "p, ~p", "q", True),
        (BK, "p", "p | q", False),
        (PWK, "p", "p | q", True),
        (BK, "p, q", "p | q", True),
        (PWK, "p & q", "p", False),
        (BK, "p & q", "p", True),
        (CL, "", "p, ~p", True),
        (PWK, "", "p, ~p", True),
        (BK, "p, ~p", "", True),
    ],
)
def test_consequence_examples(m, lhs, rhs, holds):
    assert consequence_holds(m, parse_formula_list(lhs), parse_formula_list(rhs)).holds is holds


def test_countermodel_is_genuine():
    v = consequence_holds(PWK, [F("p"), F("~p")], [F("q")])
    assert not v.holds
    assert v.countermodel == {P: "u", Q: "f"}
    assert not entails(BK, [F("p")], F("p | q")).holds


def test_monadicity_with_x_and_negation():
    theta = [X, neg(X)]
    for m in (PWK, BK):
        report = check_monadicity(m, theta)
        assert len(report) == 3
        assert all(sep is not None for sep in report.values())
    assert not is_monadic(PWK, [X])
    with pytest.raises(ValueError):
        check_monadicity(PWK, [conj(X, Var("y"))])


def test_matrix_renaming():
    swap = {"t": "f", "f": "t", "u": "u"}
    assert check_matrix_renaming(BK, M_PRIME, swap)
    assert not check_matrix_renaming(PWK, M_PRIME, swap)
    assert not check_matrix_renaming(BK, M_PRIME, {"t": "t", "f": "f", "u": "u"})


def test_matrix_dump_load_roundtrip():
    for m in (CL, PWK, BK, M_PRIME):
        back = load_matrix(dump_matrix(m))
        assert back.designated == m.designated
        assert back.algebra.carrier == m.algebra.carrier
        assert dict(back.algebra.tables) == dict(m.algebra.tables)


def test_matrix_format_errors():
    with pytest.raises(MatrixFormatError):
        load_matrix("values t f\n")
    with pytest.raises(MatrixFormatError):
        load_matrix("matrix M\nvalues f t\ndesignated t\ntable neg\nt\n")


def test_companion_oracle_against_truth_tables():
    rng = random.Random(11)
    for _ in range(200):
        gamma = [random_formula(rng, 2) for _ in range(rng.randint(0, 2))]
        psi = random_formula(rng, 2)
        for name, m in (("PWK", PWK), ("BK", BK)):
            assert companion_oracle(name, gamma, psi) == entails(m, gamma, psi).holds
    with pytest.raises(ValueError):
        companion_oracle("K3", [], P)


def test_bk_witness_valuations_break_binary_connectives():
    binary = [c for c in formulas_up_to([P, Q], 2) if variables(c) == {P, Q}]
    assert binary
    for c in binary:
        em = disj(c, neg(c))
        assert consequence_holds(BK, [c], [em]).holds
        v1 = {P: "u", Q: "t"}
        assert evaluate(Q, WK, v1) in BK.designated and evaluate(em, WK, v1) not in BK.designated
        v2 = {P: "f", Q: "u"}
        assert evaluate(neg(P), WK, v2) in BK.designated and evaluate(c, WK, v2) not in BK.designated
