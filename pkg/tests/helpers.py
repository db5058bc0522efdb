"""Shared strategies and corpus helpers for the test suite."""
from __future__ import annotations

from hypothesis import strategies as st

from lnuma import corpus
from lnuma.syntax import parse_program
from lnuma.syntax.nodes import (
    EPS, AbstractLoc, Choice, Loop, NodeId, Par, RemAccess, Seq,
)

NODES = tuple(NodeId(i) for i in range(4))
ABSTRACT = tuple(AbstractLoc(f"L{i}") for i in range(1, 5))


KINDS = ("read", "write", "msg")


def _access(loc):
    kind = st.sampled_from(KINDS)
    method = st.sampled_from(("m", "n"))
    return st.builds(
        lambda k, s, d, m: RemAccess(k, s, d, m if k == "msg" else None),
        kind, loc, loc, method,
    )


@st.composite
def behaviours(draw, locs=NODES, max_leaves: int = 12):
    """Random behaviour terms with roughly `max_leaves` constructors.

    Shapes are drawn as small integers rather than through nested
    `one_of`/`recursive`, which keeps generation cheap enough for
    thousands of examples; every choice still shrinks towards `eps`.
    """
    budget = [max_leaves]
    last = len(locs) - 1

    def access():
        kind = KINDS[draw(st.integers(0, 2))]
        src, dst = locs[draw(st.integers(0, last))], locs[draw(st.integers(0, last))]
        method = ("m", "n")[draw(st.integers(0, 1))] if kind == "msg" else None
        return RemAccess(kind, src, dst, method)

    def term():
        budget[0] -= 1
        shape = draw(st.integers(0, 5 if budget[0] > 0 else 1))
        if shape == 0:
            return EPS
        if shape == 1:
            return Seq(access(), EPS)
        if shape == 2:
            return Seq(access(), term())
        if shape == 3:
            return Par(term(), term())
        if shape == 4:
            return Seq(Choice(term(), term()), term())
        return Seq(Loop(draw(st.integers(1, 3)), term()), term())

    return term()


def access_labels(locs=NODES):
    return _access(st.sampled_from(locs))


def program(name: str):
    return parse_program(corpus.source(name))


def injective_map(prog) -> dict:
    return {str(l): i for i, l in enumerate(prog.get("Main").param_locations())}


def collapsed_map(prog) -> dict:
    return {str(l): 0 for l in prog.get("Main").param_locations()}


def straight_line(prog) -> bool:
    """Main's declared behaviour uses neither choice nor parallel split."""
    b = prog.get("Main").method("main").behaviour

    def walk(b):
        if isinstance(b, Par):
            return False
        if not isinstance(b, Seq):
            return True
        if isinstance(b.op, Choice):
            return False
        if isinstance(b.op, Loop) and not walk(b.op.body):
            return False
        return walk(b.rest)

    return walk(b)


CORPUS = corpus.names()
