import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CORPUS, collapsed_map, injective_map, program
import lnuma.runtime.machine as machine
from lnuma.monitor import (
    GlobalBehaviour, check_step, explore_verified, global_behaviour, type_at_runtime,
    verify_run, wf_config,
)
from lnuma.runtime import Node, RandomScheduler, init_config, run
from lnuma.runtime.config import Message, ObjectRecord
from lnuma.syntax import parse_behaviour, pretty
from lnuma.syntax.nodes import BOOL, EPS, Addr, NodeId, OwnedType, TrueLit, msg, read, write

k0, k1 = NodeId(0), NodeId(1)
SHARED = {"L1": 0, "L2": 1, "L3": 1}


def sigma(*bs):
    return GlobalBehaviour(tuple(enumerate(parse_behaviour(b) if isinstance(b, str) else b
                                           for b in bs)))


# -- extracting global behaviours ------------------------------------------

def test_fresh_topology_global_behaviour():
    cfg = init_config(program("topology"), SHARED)
    g = global_behaviour(cfg)
    assert g.tids == [0]
    assert g[0] == parse_behaviour("write(0,1).write(0,1)")
    assert g.format() == "[0:write(0,1).write(0,1)]"


@pytest.mark.parametrize("name", CORPUS)
def test_quiescent_configurations_are_all_eps(name):
    prog = program(name)
    res = run(prog, injective_map(prog))
    assert res.config.quiescent
    assert all(b == EPS for b in global_behaviour(res.config))


def test_runtime_typing_of_values():
    res = run(program("topology"), SHARED)
    cfg = res.config
    main = next(th.actor for _, th in cfg.threads() if cfg.lookup(th.actor).cls == "Main")
    d = next(a for a, o in cfg.node(1).heap.items() if o.cls == "D")
    frames = [{"this": main}]
    assert type_at_runtime(cfg, frames, d) == (OwnedType("D", (k1,)), EPS)
    assert type_at_runtime(cfg, frames, TrueLit()) == (BOOL, EPS)


def test_queued_local_messages_contribute_eps():
    prog = program("msg_loop")

    class MainFirst:
        def choose(self, redexes):
            return min(redexes, key=lambda r: r.thread)

    def until_main_done(before, ev, after):
        return not after.thread(0)[1].terminated

    res = run(prog, {"L1": 0, "L2": 1}, MainFirst(), observer=until_main_done)
    cfg = res.config
    acc = next(o for o in cfg.node(1).heap.values() if o.cls == "Acc")
    assert len(acc.queue) == 3
    assert all(b == EPS for b in global_behaviour(cfg))


def test_queued_messages_extend_the_actor_entry():
    prog = program("queued")
    res = run(prog, {"L1": 0, "L2": 1}, "fifo",
              observer=lambda b, ev, a: not a.thread(0)[1].terminated)
    g = global_behaviour(res.config)
    worker = [t for t in g.tids if t != 0][0]
    assert g[worker] == parse_behaviour("write(1,0).read(1,0)")


# -- well-formedness -------------------------------------------------------

def fresh():
    return init_config(program("topology"), {"L1": 0, "L2": 1, "L3": 2})


def clauses(cfg):
    return {v.clause for v in wf_config(cfg)}


def test_initial_configuration_is_well_formed():
    assert wf_config(fresh()) == []


def test_duplicate_node_ids_violate_clause_1():
    cfg = fresh()
    cfg.nodes.append(Node(1))
    assert 1 in clauses(cfg)


def test_foreign_address_violates_clause_2():
    cfg = fresh()
    cfg.node(0).heap[Addr(1, 7)] = ObjectRecord("D", (1,), {})
    assert 2 in clauses(cfg)


def test_bad_field_value_violates_clause_3():
    cfg = run(program("topology"), {"L1": 0, "L2": 1, "L3": 2}).config
    c = next(o for o in cfg.node(0).heap.values() if o.cls == "C")
    c.fields["d1"] = c.fields["d2"]
    assert clauses(cfg) == {3}


def test_bad_queue_violates_clause_3():
    cfg = run(program("ping"), {"L1": 0, "L2": 1}).config
    pong = next(o for o in cfg.node(1).heap.values() if o.cls == "Pong")
    pong.queue.append(Message("nope"))
    assert clauses(cfg) == {3}


def test_dangling_frame_value_violates_clause_5():
    cfg = fresh()
    cfg.thread(0)[1].frames[0]["x"] = Addr(2, 40)
    assert 5 in clauses(cfg)


# -- single-step checking --------------------------------------------------

def test_prefix_step_passes():
    v = check_step(sigma("write(0,1).read(1,0)"), write(k0, k1), sigma("read(1,0)"))
    assert v.ok and v.clause == "prefix"


def test_message_split_migrates_to_receiver():
    before = sigma("msg(0,1,m).(eps || write(1,0))", "eps")
    after = sigma("eps", "write(1,0)")
    v = check_step(before, msg(k0, k1, "m"), after)
    assert v.ok and "migrate" in v.clause
    hinted = check_step(before, msg(k0, k1, "m"), after, acting=0, receiver=1, hinted=True)
    assert hinted.ok
    wrong = check_step(before, msg(k0, k1, "m"), sigma("write(1,0)", "eps"),
                       acting=0, receiver=1, hinted=True)
    assert not wrong.ok


def test_label_mismatch_fails_with_counterexample():
    v = check_step(sigma("read(0,1).write(0,1)"), write(k0, k1), sigma("write(0,1)"))
    assert not v.ok
    assert "thread 0" in v.detail and "read(0,1)" in v.detail


def test_self_labels_are_silent():
    v = check_step(sigma("write(0,1)"), write(k0, k0), sigma("write(0,1)"))
    assert v.ok and v.clause == "identity"


def test_new_threads_must_start_empty():
    before = sigma("eps")
    assert check_step(before, None, sigma("eps", "eps")).ok
    assert not check_step(before, None, sigma("eps", "read(1,0)")).ok


def test_choice_and_unroll_are_silent():
    before = sigma("(read(0,1) + write(0,1)).2*{msg(0,1,m)}")
    v = check_step(before, write(k0, k1), sigma("msg(0,1,m).1*{msg(0,1,m)}"))
    assert v.ok and "choice-right" in v.clause and "unroll" in v.clause


# -- whole-run verification ------------------------------------------------

def test_topology_verifies_for_many_seeds():
    prog = program("topology")
    for seed in range(100):
        report = verify_run(prog, SHARED, RandomScheduler(seed))
        assert report.ok, report.first_failure.format()


def test_report_serialisation():
    report = verify_run(program("ping"), {"L1": 0, "L2": 1})
    lines = report.lines()
    assert len(lines) == len(report.records) > 0
    assert all(" verdict=pass clause=" in ln for ln in lines)
    assert any("label=msg(0,1,ping)" in ln and "migrate" in ln for ln in lines)


def test_mislabelled_allocation_fails_at_first_remote_step(monkeypatch):
    monkeypatch.setattr(machine, "_new_label",
                        lambda src, dst: machine.access_label("read", src, dst))
    report = verify_run(program("topology"), SHARED, "fifo")
    assert not report.ok
    bad = report.first_failure
    assert bad.event.rule == "NewR"
    first_remote = next(r for r in report.records if r.event.label is not None)
    assert bad is first_remote
    assert report.records[-1] is bad
    assert "verdict=fail" in bad.format()


@pytest.mark.parametrize("name", CORPUS)
@pytest.mark.parametrize("layout", ["injective", "collapsed", "shared"])
def test_every_interleaving_verifies(name, layout):
    prog = program(name)
    mapping = injective_map(prog)
    if layout == "collapsed":
        mapping = collapsed_map(prog)
    elif layout == "shared":
        mapping = {k: min(v, 1) for k, v in mapping.items()}
    v = explore_verified(prog, mapping)
    assert v.ok, [r.format() for r in v.failures[:3]] + [str(w) for w in v.wf_violations[:3]]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CORPUS), st.integers(0, 2**32 - 1))
def test_random_runs_verify(name, seed):
    prog = program(name)
    report = verify_run(prog, injective_map(prog), RandomScheduler(seed))
    assert report.ok and not report.exhausted


def test_labels_render():
    assert pretty(read(k1, k0)) == "read(1,0)"
