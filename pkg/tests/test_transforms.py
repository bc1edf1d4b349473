import pytest

from gen import TRANSFORM_CASES
from wkhilbert import corpus
from wkhilbert.calculus import ProofBuilder, Statement, prove, verify_derivation
from wkhilbert.formula import Var, disj, neg, parse_formula
from wkhilbert.semantics import BK, consequence_holds
from wkhilbert.transforms import (
    FreshNamer,
    TransformError,
    big_or,
    deduction_transform,
    dualize_system,
    ensure_lift,
    ensure_lifts_named,
    explosion_transform,
    lift_rule,
    lifted_derivation_scheme,
    neg_deduction_transform,
    or_convert_rule,
    or_convert_system,
    rule_interderivability,
    rules_equal_up_to_renaming,
    systems_equal_up_to_renaming,
    translate_bk,
)

P, Q, R = Var("p"), Var("q"), Var("r")
H = corpus.get_system("H_BK")


def F(text):
    return parse_formula(text)


def test_big_or_orders():
    assert big_or([Q, P]) == disj(Q, P)
    assert big_or([Q, P], "canonical") == disj(P, Q)
    assert big_or([P, Q, R]) == disj(disj(P, Q), R)
    with pytest.raises(ValueError):
        big_or([])


def test_fresh_names_avoid_used_variables():
    n = FreshNamer({Var("v0"), P})
    assert n.fresh() == Var("v1")
    assert n.fresh() == Var("v2")


def test_dualize_pwk_gives_bk():
    assert systems_equal_up_to_renaming(dualize_system(corpus.get_system("R_PWK")), corpus.get_system("R_BK"))
    assert not systems_equal_up_to_renaming(corpus.get_system("R_PWK"), corpus.get_system("R_BK"))


def test_or_conversion_matches_h_pwk_up_to_two_exceptions():
    r = corpus.get_system("R_PWK")
    conv = or_convert_system(r)
    assert conv.discarded == ["r15"]
    _, only_conv, only_h = rules_equal_up_to_renaming(conv.system.rules, corpus.get_system("H_PWK").rules)
    assert only_conv == ["r1or"] and only_h == ["hPWK1"]
    res = rule_interderivability(conv.system, corpus.get_system("H_PWK"), rules={"a": only_conv, "b": only_h})
    assert [e.status for e in res] == ["proved", "proved"]
    img = or_convert_rule(r.rule("r15"), conv.side_variable)
    assert prove(corpus.get_system("H_PWK"), Statement.of(img.antecedent, img.succedent)).proved


def test_lifting():
    r = H.rule("BK4")
    lifted = lift_rule(r, "or")
    assert lifted.antecedent == (disj(Var("v0"), P), disj(Var("v0"), Q))
    imp_lift = lift_rule(r, "imp")
    assert imp_lift.name == "BK4i"
    assert imp_lift.succedent[0] == disj(neg(Var("v0")), F("p & q"))
    with pytest.raises(TransformError):
        lift_rule(corpus.get_system("R_PWK").rule("r1"))


@pytest.mark.parametrize("name", ["BK3", "BK4", "BK12", "BK20", "BK23"])
def test_double_lift_scheme_verifies(name):
    d = lifted_derivation_scheme(H, name)
    c = Statement.of(d.premises, [d.conclusion])
    assert verify_derivation(H, d, c).accepted
    assert verify_derivation(H, d, c, expand=True).accepted


def test_ensure_lift_registers_derived_lifts():
    name = ensure_lift(H, "BK26")
    assert name == "BK26v"
    assert name in H.derived
    assert H.derived[name].verdict is None or H.derived[name].verdict.accepted


@pytest.mark.parametrize("kind,seed", [("deduction_transform", 101), ("neg_deduction_transform", 102), ("explosion_transform", 103), ("disjunction_elim", 104)])
def test_transform_on_generated_inputs(kind, seed):
    n = 0
    for out, claim in TRANSFORM_CASES[kind](H, seed, 30):
        assert verify_derivation(H, out, claim).accepted
        assert out.conclusion == claim.conclusion
        assert consequence_holds(BK, claim.antecedent, claim.succedent).holds
        n += 1
    assert n == 30


def test_transforms_reject_bad_input():
    b = ProofBuilder(H)
    b.premise(F("a | b"))
    b.premise(F("a"))
    b.apply("BK23", [1])
    d = b.build(3)
    with pytest.raises(TransformError):
        deduction_transform(H, d, F("a & b"), F("a"))
    with pytest.raises(TransformError):
        deduction_transform(H, d, F("a | b"), F("c"))
    with pytest.raises(TransformError):
        explosion_transform(H, d, F("a | b"), F("a"))
    with pytest.raises(TransformError):
        neg_deduction_transform(H, d, F("a | b"), F("a"))


def test_translate_de_morgan_tree():
    star = corpus.get_system("R_BK_star")
    e = corpus.get_derivation("bk-demorgan")
    d = translate_bk(star, H, e.derivation, e.claim)
    assert d.conclusion == F("~p | ~q")
    assert verify_derivation(H, d, e.claim).accepted
    assert verify_derivation(H, d, e.claim, expand=True).accepted


def test_translate_rejects_invalid_tree():
    star = corpus.get_system("R_BK_star")
    e = corpus.get_derivation("bk-demorgan")
    wrong = Statement.of(e.claim.antecedent, [F("~p")])
    with pytest.raises(TransformError):
        translate_bk(star, H, e.derivation, wrong)


def test_lifts_are_rebuilt_from_their_names():
    h = H
    added = ensure_lifts_named(h, {"BK12vvv", "BK3", "nonsense"})
    assert all(h.lookup(n) is not None for n in ("BK12v", "BK12vv", "BK12vvv"))
    assert set(added) <= {"BK12vv", "BK12vvv"}
    assert ensure_lifts_named(h, {"BK12vvv"}) == []
