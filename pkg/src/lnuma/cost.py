"""Pricing remote accesses against a node-distance matrix.

Static mode walks a behaviour term; dynamic mode sums the labels of a
trace. Both return a `CostReport`. Choice is priced three ways (cheapest
branch, dearest branch, and the mean of the two), so `expected` is exact
rational arithmetic. Parallel branches add to the total traffic; the
separate `makespan_bound` charges only the slower branch.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .effects import locations, subst_locations
from .syntax.nodes import Choice, Eps, Loop, NodeId, Par, RemAccess, UnmappedLocation

KINDS = ("read", "write", "msg")


class CostError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CostMatrix:
    matrix: np.ndarray
    weights: tuple = (1, 1, 1)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise CostError(f"cost matrix must be square, got shape {m.shape}")
        if (m < 0).any():
            raise CostError("cost matrix entries must be nonnegative")
        if np.diagonal(m).any():
            raise CostError("cost matrix diagonal must be zero")
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise CostError("weights are three nonnegative numbers: read write msg")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def uniform(cls, k: int, cost: int = 1, weights=(1, 1, 1)) -> "CostMatrix":
        m = np.full((k, k), cost, dtype=np.int64)
        np.fill_diagonal(m, 0)
        return cls(m, weights)

    @classmethod
    def random(cls, k: int, rng: np.random.Generator, high: int = 20) -> "CostMatrix":
        m = rng.integers(1, high + 1, size=(k, k))
        np.fill_diagonal(m, 0)
        return cls(m)

    @classmethod
    def parse(cls, text: str) -> "CostMatrix":
        lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise CostError("empty cost matrix file")
        try:
            k = int(lines[0][0])
            rows = [[int(x) for x in ln] for ln in lines[1:k + 1]]
        except ValueError as err:
            raise CostError(f"bad cost matrix: {err}") from None
        if len(lines[0]) != 1 or len(rows) != k or any(len(r) != k for r in rows):
            raise CostError(f"expected {k} rows of {k} integers")
        weights = (1, 1, 1)
        rest = lines[k + 1:]
        if rest:
            head = rest[0]
            if head[0] != "weights" or len(head) != 4 or len(rest) > 1:
                raise CostError("only an optional 'weights r w m' line may follow the matrix")
            try:
                weights = tuple(int(x) for x in head[1:])
            except ValueError:
                raise CostError("weights must be integers") from None
        return cls(np.array(rows, dtype=np.int64).reshape(k, k), weights)

    @classmethod
    def load(cls, path: str) -> "CostMatrix":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def weight(self, kind: str) -> int:
        return self.weights[KINDS.index(kind)]

    def price(self, access: RemAccess) -> int:
        src, dst = _node(access.src), _node(access.dst)
        if max(src, dst) >= self.size:
            raise CostError(f"cost matrix has {self.size} nodes, access {src}->{dst} "
                            f"needs {max(src, dst) + 1}")
        return self.weight(access.kind) * int(self.matrix[src, dst])


def _node(loc) -> int:
    if not isinstance(loc, NodeId):
        raise UnmappedLocation(loc)
    return loc.id


def _num(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass
class CostReport:
    total: object = 0
    by_pair: dict = field(default_factory=dict)
    by_kind: dict = field(default_factory=dict)
    min: object = None
    max: object = None
    expected: object = None
    makespan_bound: object = None

    def records(self) -> list:
        out = [("total", _num(self.total))]
        for name in ("min", "max", "expected", "makespan_bound"):
            v = getattr(self, name)
            if v is not None:
                out.append((name, _num(v)))
        for kind in KINDS:
            if kind in self.by_kind:
                out.append((f"kind.{kind}", _num(self.by_kind[kind])))
        for (s, d), v in sorted(self.by_pair.items()):
            out.append((f"pair.{s}->{d}", _num(v)))
        return out

    def table(self) -> str:
        rows = self.records()
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


@dataclass
class _Price:
    lo: int
    hi: int
    mean: Fraction
    span: Fraction
    pairs: Counter
    kinds: Counter


def _zero() -> _Price:
    return _Price(0, 0, Fraction(0), Fraction(0), Counter(), Counter())


def _scaled(c: Counter, k) -> Counter:
    return Counter({key: v * k for key, v in c.items()})


def _price(b, M: CostMatrix) -> _Price:
    if isinstance(b, Eps):
        return _zero()
    if isinstance(b, Par):
        l, r = _price(b.left, M), _price(b.right, M)
        return _Price(l.lo + r.lo, l.hi + r.hi, l.mean + r.mean, max(l.span, r.span),
                      l.pairs + r.pairs, l.kinds + r.kinds)
    head = _op_price(b.op, M)
    rest = _price(b.rest, M)
    return _Price(head.lo + rest.lo, head.hi + rest.hi, head.mean + rest.mean,
                  head.span + rest.span, head.pairs + rest.pairs, head.kinds + rest.kinds)


def _op_price(op, M: CostMatrix) -> _Price:
    if isinstance(op, RemAccess):
        c = M.price(op)
        pair = (_node(op.src), _node(op.dst))
        return _Price(c, c, Fraction(c), Fraction(c), Counter({pair: Fraction(c)}),
                      Counter({op.kind: Fraction(c)}))
    if isinstance(op, Choice):
        l, r = _price(op.left, M), _price(op.right, M)
        half = Fraction(1, 2)
        return _Price(min(l.lo, r.lo), max(l.hi, r.hi), (l.mean + r.mean) * half,
                      (l.span + r.span) * half,
                      _scaled(l.pairs, half) + _scaled(r.pairs, half),
                      _scaled(l.kinds, half) + _scaled(r.kinds, half))
    assert isinstance(op, Loop)
    body = _price(op.body, M)
    n = op.count
    return _Price(n * body.lo, n * body.hi, n * body.mean, n * body.span,
                  _scaled(body.pairs, n), _scaled(body.kinds, n))


def resolve(b, mapping: dict):
    """Substitute named locations through a `{name: node}` map."""
    if not mapping:
        return b
    table = {loc: NodeId(mapping[str(loc)]) for loc in locations(b)
             if not isinstance(loc, NodeId) and str(loc) in mapping}
    return subst_locations(b, table)


def static_cost(b, mapping: dict, M: CostMatrix) -> CostReport:
    """Price a behaviour; `total` is the expected cost with every parallel
    branch counted."""
    p = _price(resolve(b, mapping), M)
    return CostReport(
        total=_num(p.mean),
        by_pair={k: _num(v) for k, v in p.pairs.items() if v},
        by_kind={k: _num(v) for k, v in p.kinds.items() if v},
        min=p.lo, max=p.hi, expected=_num(p.mean), makespan_bound=_num(p.span),
    )


def trace_cost(trace, M: CostMatrix) -> CostReport:
    total = 0
    pairs, kinds = Counter(), Counter()
    for ev in trace:
        label = getattr(ev, "label", ev)
        if label is None:
            continue
        c = M.price(label)
        total += c
        pairs[(_node(label.src), _node(label.dst))] += c
        kinds[label.kind] += c
    return CostReport(total=total, by_pair=dict(pairs), by_kind=dict(kinds))
