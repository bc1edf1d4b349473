import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wkhilbert.formula import (
    SIG_FULL,
    SIG_IMPNEG,
    App,
    FormulaSyntaxError,
    SignatureError,
    Var,
    canonical,
    conj,
    disj,
    equivalent_up_to_renaming,
    formulas_up_to,
    imp,
    match_schema,
    neg,
    parse_formula,
    parse_formula_list,
    render_formula,
    subformulas,
    substitute,
    theta_subformulas,
    variables,
)

P, Q, R = Var("p"), Var("q"), Var("r")

atoms = st.sampled_from([P, Q, R])
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        sub.map(neg),
        st.tuples(sub, sub).map(lambda t: conj(*t)),
        st.tuples(sub, sub).map(lambda t: disj(*t)),
    ),
    max_leaves=8,
)
full_formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        sub.map(neg),
        st.tuples(sub, sub).map(lambda t: conj(*t)),
        st.tuples(sub, sub).map(lambda t: disj(*t)),
        st.tuples(sub, sub).map(lambda t: App("imp", t)),
    ),
    max_leaves=8,
)


@given(formulas)
def test_render_parse_roundtrip(f):
    assert parse_formula(render_formula(f)) == f


@given(full_formulas)
def test_roundtrip_with_implication(f):
    assert parse_formula(render_formula(f), SIG_FULL) == f


@given(formulas, st.dictionaries(atoms, formulas, max_size=3))
@settings(max_examples=60)
def test_match_recovers_substitution(f, s):
    target = substitute(f, s)
    found = match_schema(f, target)
    assert found is not None
    assert substitute(f, found) == target


@given(formulas)
def test_theta_subformulas_contains_subformulas_and_negations(f):
    u = set(theta_subformulas([f], [], [Var("x"), neg(Var("x"))]))
    for g in subformulas(f):
        assert g in u and neg(g) in u


@pytest.mark.parametrize(
    "text,expected",
    [
        ("p | q & r", disj(P, conj(Q, R))),
        ("p & q | r", disj(conj(P, Q), R)),
        ("~p & q", conj(neg(P), Q)),
        ("p | q | r", disj(disj(P, Q), R)),
        ("~~p", neg(neg(P))),
        ("~(p & q)", neg(conj(P, Q))),
    ],
)
def test_precedence(text, expected):
    assert parse_formula(text) == expected


def test_arrow_is_right_associative_and_expands_without_imp():
    assert parse_formula("p -> q -> r", SIG_FULL) == App("imp", (P, App("imp", (Q, R))))
    assert parse_formula("p -> q") == disj(neg(P), Q)
    assert imp(P, Q) == disj(neg(P), Q)


@pytest.mark.parametrize("bad", ["p &", "(p", "p q", "", "p $ q", ")"])
def test_syntax_errors(bad):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(bad)


def test_signature_error():
    with pytest.raises(SignatureError):
        parse_formula("p & q", SIG_IMPNEG)
    assert render_formula(parse_formula("~p -> q", SIG_IMPNEG)) == "~p -> q"


def test_formula_list():
    assert parse_formula_list("") == []
    assert parse_formula_list("-") == []
    assert parse_formula_list("p, ~q") == [P, neg(Q)]


def test_variables_and_substitution():
    f = parse_formula("p & ~q")
    assert variables(f) == {P, Q}
    assert substitute(f, {P: disj(Q, R)}) == parse_formula("(q | r) & ~q")


def test_match_fails_on_inconsistent_binding():
    assert match_schema(conj(P, P), conj(Q, R)) is None
    assert match_schema(conj(P, P), conj(Q, Q)) == {P: Q}


def test_canonical_order_is_size_then_text():
    fs = canonical([parse_formula("p & q"), Q, P, neg(P)])
    assert [render_formula(f) for f in fs] == ["p", "q", "~p", "p & q"]


def test_equivalent_up_to_renaming():
    a = (frozenset([conj(P, Q)]), frozenset([P]))
    b = (frozenset([conj(R, P)]), frozenset([R]))
    assert equivalent_up_to_renaming(a, b) == {P: R, Q: P}
    c = (frozenset([conj(R, P)]), frozenset([P]))
    assert equivalent_up_to_renaming(a, c) is None


def test_formulas_up_to_counts():
    # depth 1 over {p,q}: 2 atoms, 2 negations, 4 conjunctions, 4 disjunctions
    assert len(formulas_up_to([P, Q], 1)) == 12
    # depth 2: 12 + (12 + 144 + 144 - 10 already present)
    assert len(formulas_up_to([P, Q], 2)) == 302
    assert len(formulas_up_to([P], 0)) == 1
