from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from helpers import CORPUS, behaviours, collapsed_map, program
from lnuma.cost import CostError, CostMatrix, static_cost, trace_cost
from lnuma.runtime import RandomScheduler, run
from lnuma.syntax import parse_behaviour
from lnuma.syntax.nodes import NodeId, UnmappedLocation, msg, read

TOPOLOGY_MAIN = parse_behaviour("write(L1,L2).write(L1,L3)")
SHARED = {"L1": 0, "L2": 1, "L3": 1}


def matrix(k, cost, **kw):
    return CostMatrix.uniform(k, cost, **kw)


def test_topology_static_total():
    assert static_cost(TOPOLOGY_MAIN, SHARED, matrix(2, 10)).total == 20


def test_eps_costs_nothing():
    report = static_cost(parse_behaviour("eps"), {}, matrix(1, 0))
    assert report.total == 0 and report.by_pair == {}


def test_loops_multiply():
    report = static_cost(parse_behaviour("3*{read(0,1)}"), {}, matrix(2, 2))
    assert report.total == 6
    assert report.by_kind == {"read": 6}


def test_topology_dynamic_total():
    res = run(program("topology"), SHARED)
    report = trace_cost(res.trace, matrix(2, 10))
    assert report.total == 20
    assert report.by_pair == {(0, 1): 20}


def test_weights_apply_per_kind():
    k0, k1 = NodeId(0), NodeId(1)
    m = CostMatrix(np.array([[0, 5], [5, 0]]), weights=(1, 1, 3))
    report = trace_cost([msg(k0, k1, "m"), read(k0, k1)], m)
    assert report.total == 20
    assert report.by_kind == {"msg": 15, "read": 5}


def test_choice_reports_min_max_and_expected():
    b = parse_behaviour("(read(0,1) + 2*{read(0,1)}).write(0,1)")
    report = static_cost(b, {}, matrix(2, 4))
    assert (report.min, report.max) == (8, 12)
    assert report.expected == 10 and report.total == 10
    odd = static_cost(parse_behaviour("(read(0,1) + eps)"), {}, matrix(2, 3))
    assert odd.expected == Fraction(3, 2)


def test_parallel_reports_sum_and_makespan():
    b = parse_behaviour("msg(0,1,m).(write(0,1) || 2*{write(1,0)})")
    report = static_cost(b, {}, matrix(2, 1))
    assert report.total == 4
    assert report.makespan_bound == 3


def test_matrix_file_format():
    m = CostMatrix.parse("3\n0 1 2\n1 0 1\n2 1 0\nweights 1 2 3\n")
    assert m.size == 3 and m.weights == (1, 2, 3)
    assert int(m.matrix[0, 2]) == 2
    assert CostMatrix.parse("2\n0 7\n7 0").weights == (1, 1, 1)


@pytest.mark.parametrize("text", [
    "", "2\n0 1\n", "2\n0 1\n1 x\n", "2\n1 1\n1 0\n", "2\n0 -1\n1 0\n",
    "1\n0\nweights 1 1\n", "1\n0\nextra\n",
])
def test_bad_matrix_files(text):
    with pytest.raises(CostError):
        CostMatrix.parse(text)


def test_matrix_too_small():
    with pytest.raises(CostError):
        static_cost(parse_behaviour("read(0,3)"), {}, matrix(2, 1))


def test_unmapped_location():
    with pytest.raises(UnmappedLocation):
        static_cost(TOPOLOGY_MAIN, {"L1": 0}, matrix(2, 1))


def test_report_records():
    report = static_cost(TOPOLOGY_MAIN, SHARED, matrix(2, 10))
    records = dict(report.records())
    assert records["total"] == 20 and records["pair.0->1"] == 20
    assert "kind.write" in report.table()


@pytest.mark.parametrize("name", CORPUS)
def test_single_node_placement_is_free(name):
    prog = program(name)
    mapping = collapsed_map(prog)
    m = matrix(1, 0)
    for cls in prog.classes:
        for md in cls.methods:
            if md.name == "main":
                assert static_cost(md.behaviour, mapping, m).total == 0
    assert trace_cost(run(prog, mapping).trace, m).total == 0


@settings(max_examples=200, deadline=None)
@given(behaviours(),
       hnp.arrays(np.int64, (4, 4), elements=st.integers(0, 50)),
       hnp.arrays(np.int64, (4, 4), elements=st.integers(0, 50)))
def test_costs_are_monotone_in_the_matrix(b, base, bump):
    np.fill_diagonal(base, 0)
    np.fill_diagonal(bump, 0)
    low = static_cost(b, {}, CostMatrix(base))
    high = static_cost(b, {}, CostMatrix(base + bump))
    for name in ("total", "min", "max", "expected", "makespan_bound"):
        assert getattr(high, name) >= getattr(low, name)
    assert low.min <= low.expected <= low.max


@pytest.mark.parametrize("seed", range(5))
def test_static_matches_dynamic_on_straight_line_programs(seed):
    rng = np.random.default_rng(seed)
    m = CostMatrix.random(3, rng)
    for name in ("topology", "for_loop", "remote_read", "sync_call", "local_only"):
        prog = program(name)
        mapping = {str(l): i for i, l in enumerate(prog.get("Main").param_locations())}
        declared = prog.get("Main").method("main").behaviour
        expected = static_cost(declared, mapping, m).total
        assert trace_cost(run(prog, mapping, RandomScheduler(seed)).trace, m).total == expected
