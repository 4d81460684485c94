import pytest
from hypothesis import given, strategies as st

from rescalc.calculus import (Context, EntExpr, RuleError, add, axioms, cancel, chain, compose,
                              equate, parse, parse_coeff, parse_expr, parse_resource, refl, relabel,
                              reverse, swap_parties, time_reverse)


def ax(name):
    return axioms().get(name).statement


def test_add_with_trivial_inequality():
    x = parse("[q->q] + [qq] >= 2*[q->qq]")
    zero = refl(parse_expr("0*[qq]"))
    assert add(x, zero).equivalent(x)


def test_add_relation():
    e = parse("2*[q->qq] = [q->q] + [qq]")
    assert add(e, e).relation == "="
    assert add(e, parse("[qq] >= [cc]")).relation == ">="


def test_add_rejects_conflicting_relative_states():
    a = parse("<N{A'->B}:rho> >= [q->q]")
    b = parse("<N{A'->B}:sigma> >= [q->q]")
    with pytest.raises(RuleError, match="relative"):
        add(a, b)


def test_chain():
    x = chain(parse("[q->q] >= [c->c]"), parse("[c->c] >= [cc]"))
    assert x.equivalent(parse("[q->q] >= [cc]"))


def test_chain_reports_leftover():
    with pytest.raises(RuleError, match=r"middle expressions differ.*\[qq\]"):
        chain(parse("[q->q] >= [c->c] + [qq]"), parse("[c->c] >= [cc]"))


def test_cancel():
    i = parse("[q->q] + H(A)*[qq] >= 2*H(A)*[qq] + [c->c] where pure(A,B)")
    out, witnesses = cancel(i, parse_resource("[qq]"), EntExpr.H("A"))
    assert out.equivalent(parse("[q->q] >= H(A)*[qq] + [c->c] where pure(A,B)"))
    assert len(witnesses) == 2


def test_cancel_zero_is_identity():
    i = parse("[q->q] >= [c->c]")
    out, _ = cancel(i, parse_resource("[qq]"), EntExpr())
    assert out.equivalent(i)


def test_cancel_errors():
    i = parse("[q->q] + H(A)*[qq] >= 2*H(A)*[qq] where pure(A,B)")
    with pytest.raises(RuleError, match="cannot cancel"):
        cancel(i, parse_resource("[qq]"), EntExpr.H("A") * 2)
    with pytest.raises(RuleError, match="does not occur"):
        cancel(i, parse_resource("[cc]"), EntExpr.const(1))


def test_reverse_of_fqrs_is_feedback_father():
    assert reverse(ax("fqrs")).equivalent(ax("feedback-father"))


def test_reverse_of_classical_reverse_shannon():
    assert reverse(ax("classical-reverse-shannon")).equivalent(ax("classical-feedback-coding"))


def test_time_reverse_of_slepian_wolf_matches_nothing():
    assert axioms().matches(time_reverse(ax("slepian-wolf")), "classical") == []


def test_swap_parties():
    assert swap_parties("A") == "B" and swap_parties("B") == "A"
    assert swap_parties("X_A") == "X_B"
    assert swap_parties("A'") == "B^" and swap_parties("R") == "R"


def test_relabel_identity_and_collision():
    f = ax("fqsw")
    assert relabel(f, {}).equivalent(f)
    with pytest.raises(RuleError, match="collides"):
        relabel(f, {"A": "B"})


def test_relabel_source_to_channel_input():
    d = relabel(ax("fqsw"), {"S": "A'"})
    assert any(t.ins == ("A'",) for _, t in d.lhs.terms)


def test_relabel_term_substitution_rules():
    f = ax("fqsw")
    state = parse_resource("<sigma@A,B>")
    mother = relabel(f, terms={parse_resource("<U{S->A,B}:rho>"): state,
                               parse_resource("<id{S->B^}:rho>"): None})
    assert mother.equivalent(ax("mother"))
    with pytest.raises(RuleError):
        relabel(f, terms={parse_resource("<U{S->A,B}:rho>"): None})
    with pytest.raises(RuleError):
        relabel(ax("fqrs"), terms={parse_resource("<U{A'->A,B}:rho>"): state})


def test_compose():
    i = parse("[qq] >= <id{S->A'}:rho> + <U{A'->A,B}:rho>")
    out = compose(i, parse_resource("<id{S->A'}:rho>"), parse_resource("<U{A'->A,B}:rho>"))
    assert out.equivalent(parse("[qq] >= <U{S->A,B}:rho>"))
    with pytest.raises(RuleError):
        compose(i, parse_resource("<U{A'->A,B}:rho>"), parse_resource("<id{S->A'}:rho>"))


def test_equate():
    e = equate(ax("feedback-father"), ax("fqrs"))
    assert e.relation == "=" and e.equivalent(ax("feedback-equality"))
    with pytest.raises(RuleError):
        equate(ax("feedback-father"), ax("father"))


names = [a.name for a in axioms()]
coeffs = st.sampled_from(["", "2*", "1/2*", "H(A)*", "1/2*I(R;A)*", "H(B|A)*", "I(A;B)*"])
terms = st.sampled_from(["[q->q]", "[qq]", "[c->c]", "[cc]", "[q->qq]", "[qq<-q]", "[c<-c]",
                         "<N{A'->A,B}:rho>", "<s@A,B>", "<{X_A->X_B}>"])
sides = st.lists(st.tuples(coeffs, terms), min_size=1, max_size=4).map(
    lambda xs: " + ".join(c + t for c, t in xs))
random_ineqs = st.builds(lambda l, r, rel: parse(f"{l} {rel} {r} where pure(R,A,B), pure(A',R)"),
                         sides, sides, st.sampled_from([">=", "="]))


@given(st.one_of(st.sampled_from(names).map(ax), random_ineqs))
def test_reverse_is_involution(i):
    assert reverse(reverse(i)).equivalent(i)


@given(st.one_of(st.sampled_from(names).map(ax), random_ineqs))
def test_time_reverse_is_involution(i):
    assert time_reverse(time_reverse(i)).equivalent(i)


@given(random_ineqs)
def test_time_reverse_keeps_communication_cost_side(i):
    t = time_reverse(i)
    lhs_kinds = lambda x: sorted(u.kind for _, u in x.lhs.terms if u.directed)
    assert lhs_kinds(t) == lhs_kinds(i.canonical())
