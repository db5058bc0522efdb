import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ABSTRACT, NODES, access_labels, behaviours
from lnuma.effects import (
    EPSILON, canonical, concat, concat_all, epsilon_closure, equiv,
    filter_behaviour, locations, reduce, reduce_closure, silent_steps, subst_locations,
)
from lnuma.syntax import parse_behaviour
from lnuma.syntax.nodes import (
    EPS, Choice, Loop, NodeId, Par, Seq, UnmappedLocation, msg, read, write,
)

# the headline algebraic laws run at 1000 examples in test_acceptance.py
MANY = settings(max_examples=300, deadline=None)

k0, k1, k2 = NodeId(0), NodeId(1), NodeId(2)


def b(text):
    return parse_behaviour(text)


# -- concatenation -----------------------------------------------------------

def test_concat_joins_parallel_continuation_on_the_left():
    left = Par(Seq(read(k0, k1), EPS), Seq(write(k1, k0), EPS))
    got = concat(left, Seq(write(k0, k2), EPS))
    assert got == Par(Seq(read(k0, k1), Seq(write(k0, k2), EPS)), Seq(write(k1, k0), EPS))


def test_concat_all_of_nothing_is_eps():
    assert concat_all() == EPS


# -- filter -----------------------------------------------------------------

def test_filter_drops_local_accesses_and_empty_structure():
    assert filter_behaviour(b("read(0,0).write(0,1)")) == b("write(0,1)")
    assert filter_behaviour(b("(read(1,1) + write(2,2)).write(0,1)")) == b("write(0,1)")
    assert filter_behaviour(b("3*{read(1,1)}.eps")) == EPS


def test_filter_keeps_choice_with_one_remote_branch():
    got = filter_behaviour(b("(read(1,1) + write(0,2))"))
    assert got == Seq(Choice(EPS, b("write(0,2)")), EPS)


def test_filter_keeps_parallel_shape():
    got = filter_behaviour(b("msg(0,1,m).(eps || write(1,1))"))
    assert got == b("msg(0,1,m).(eps || eps)")


@MANY
@given(behaviours(), behaviours())
def test_filter_distributes_over_concat(x, y):
    assert filter_behaviour(concat(x, y)) == concat(filter_behaviour(x), filter_behaviour(y))


@MANY
@given(behaviours(ABSTRACT), st.lists(st.sampled_from(NODES), min_size=4, max_size=4))
def test_filter_absorbs_prefiltering_under_any_substitution(x, image):
    mapping = dict(zip(ABSTRACT, image))
    direct = filter_behaviour(subst_locations(x, mapping))
    assert filter_behaviour(subst_locations(filter_behaviour(x), mapping)) == direct


# -- substitution -----------------------------------------------------------

def test_substitution_rejects_unmapped_abstract_locations():
    with pytest.raises(UnmappedLocation) as err:
        subst_locations(b("write(L1,L2)"), {})
    assert str(err.value.args[0]) == "L1"


def test_substitution_leaves_unmapped_nodes_alone():
    x = b("write(0,1)")
    assert subst_locations(x, {}) == x


def test_locations_collects_every_endpoint():
    assert locations(b("(read(0,1) + 2*{write(2,0)}).msg(0,3,m)")) == {
        NodeId(0), NodeId(1), NodeId(2), NodeId(3)}


# -- reduction --------------------------------------------------------------

def test_prefix_step():
    assert reduce(b("write(0,1).read(1,2)"), write(k0, k1)) == {b("read(1,2)")}
    assert reduce(b("write(0,1)"), read(k0, k1)) == set()


def test_silent_clauses():
    clauses = {c for c, _, _ in silent_steps(b("(read(0,1) + write(0,1)).msg(0,2,m)"))}
    assert clauses == {"choice-left", "choice-right"}
    (clause, after, mig), = silent_steps(b("2*{read(0,1)}.write(0,2)"))
    assert clause == "unroll" and mig is None
    assert after == b("read(0,1).1*{read(0,1)}.write(0,2)")
    (clause, after, mig), = silent_steps(b("1*{read(0,1)}"))
    assert after == b("read(0,1)")
    (clause, after, mig), = silent_steps(b("(write(0,1) || read(1,0))"))
    assert (clause, after, mig) == ("par", b("write(0,1)"), b("read(1,0)"))


def test_eps_reduces_only_to_itself():
    assert reduce(EPS) == {EPS}
    assert epsilon_closure(EPS) == {EPS}


def test_reduce_closure_under_a_choice():
    got = reduce_closure(b("(read(0,1) + write(0,1)).msg(0,2,m)"), write(k0, k1))
    assert got == {b("msg(0,2,m)")}


def test_reduce_closure_through_loop_unrolling():
    got = reduce_closure(b("2*{write(0,1)}"), write(k0, k1))
    assert got == {b("1*{write(0,1)}")}


@MANY
@given(access_labels(), behaviours())
def test_prefix_is_always_consumable(label, rest):
    assert rest in reduce_closure(Seq(label, rest), label)


@settings(max_examples=300, deadline=None)
@given(behaviours(max_leaves=6))
def test_closure_is_reflexive_and_closed(x):
    closure = epsilon_closure(x)
    assert x in closure
    for c in closure:
        assert reduce(c, EPSILON) <= closure


@MANY
@given(behaviours())
def test_canonical_form(x):
    assert canonical(x) == x
    assert equiv(x, x)


def test_loop_count_is_positive():
    with pytest.raises(ValueError):
        Loop(0, EPS)


def test_msg_carries_method_name():
    assert msg(k0, k1, "ping").method == "ping"
