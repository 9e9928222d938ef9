"""Instrumented arithmetic for degree and branch-predicate accounting.

A :class:`Trace` interprets a program restricted to {+, -, *, /} and
"is v >= 0?" branches.  Every value caries conservative numerator and
denominator degree bounds (no rational-function reduction is attempted),
and every branch records a canonical fingerprint of its predicate's
expression DAG, so structurally identical predicates are counted once.
The trace is execution-path-faithful: the ``numeric`` field follows plain
float arithmetic exactly.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TracedValue:
    """A value in the expression DAG with degree bounds and its concrete
    float, used for branching.  Inputs carry degrees (1, 0), constants
    (0, 0)."""

    trace: "Trace"
    node: int
    num_deg: int
    den_deg: int
    numeric: float

    @property
    def degree(self) -> int:
        return max(self.num_deg, self.den_deg)

    def _coerce(self, other):
        if isinstance(other, TracedValue):
            if other.trace is not self.trace:
                raise ValueError("cannot mix values from different traces")
            return other
        return self.trace.const(other)

    def __add__(self, other):
        return self.trace.op(self, self._coerce(other), "+")

    def __radd__(self, other):
        return self.trace.op(self._coerce(other), self, "+")

    def __sub__(self, other):
        return self.trace.op(self, self._coerce(other), "-")

    def __rsub__(self, other):
        return self.trace.op(self._coerce(other), self, "-")

    def __mul__(self, other):
        return self.trace.op(self, self._coerce(other), "*")

    def __rmul__(self, other):
        return self.trace.op(self._coerce(other), self, "*")

    def __truediv__(self, other):
        return self.trace.op(self, self._coerce(other), "/")

    def __rtruediv__(self, other):
        return self.trace.op(self._coerce(other), self, "/")

    def __neg__(self):
        return self.trace.const(-1.0) * self


class Trace:
    """Accumulates degree bounds and distinct branch predicates.

    Expression nodes are hash-consed: the canonical key of ``a + b`` and
    ``b + a`` coincides (operands of commutative ops are sorted by node
    id), so re-branching on a structurally identical expression does not
    grow the predicate set.  Algebraically equal but structurally distinct
    expressions may still be counted twice; the count is a conservative
    upper bound, which is the direction the dimension bound needs.
    """

    def __init__(self):
        self._node_ids: dict[tuple, int] = {}
        self._input_names: set[str] = set()
        self.predicate_nodes: set[int] = set()
        self.max_degree = 0

    def _intern(self, key: tuple) -> int:
        node = self._node_ids.get(key)
        if node is None:
            node = len(self._node_ids)
            self._node_ids[key] = node
        return node

    def _make(self, key, num_deg, den_deg, numeric) -> TracedValue:
        self.max_degree = max(self.max_degree, num_deg, den_deg)
        return TracedValue(self, self._intern(key), num_deg, den_deg, float(numeric))

    def input(self, name: str, value: float) -> TracedValue:
        """Register a named input (degree 1) with its concrete value."""
        if name in self._input_names:
            raise ValueError(f"duplicate input name: {name!r}")
        self._input_names.add(name)
        return self._make(("in", name), 1, 0, value)

    def const(self, value) -> TracedValue:
        """A constant of the program (degree 0)."""
        return self._make(("const", float(value)), 0, 0, value)

    def op(self, a: TracedValue, b: TracedValue, kind: str) -> TracedValue:
        """Apply one arithmetic operation; degree bounds compose
        conservatively (no cancellation is assumed)."""
        if kind == "+":
            numeric = a.numeric + b.numeric
            degs = (max(a.num_deg + b.den_deg, b.num_deg + a.den_deg),
                    a.den_deg + b.den_deg)
        elif kind == "-":
            numeric = a.numeric - b.numeric
            degs = (max(a.num_deg + b.den_deg, b.num_deg + a.den_deg),
                    a.den_deg + b.den_deg)
        elif kind == "*":
            numeric = a.numeric * b.numeric
            degs = (a.num_deg + b.num_deg, a.den_deg + b.den_deg)
        elif kind == "/":
            numeric = a.numeric / b.numeric  # ZeroDivisionError on 0 is intended
            degs = (a.num_deg + b.den_deg, a.den_deg + b.num_deg)
        else:
            raise ValueError(f"unknown operation kind: {kind!r}")
        if kind in ("+", "*"):
            key = (kind,) + tuple(sorted((a.node, b.node)))
        else:
            key = (kind, a.node, b.node)
        return self._make(key, degs[0], degs[1], numeric)

    def branch(self, v: TracedValue) -> bool:
        """Record the predicate "v >= 0" and return its concrete outcome."""
        self.predicate_nodes.add(v.node)
        return v.numeric >= 0.0

    @property
    def n_inputs(self) -> int:
        return len(self._input_names)

    @property
    def predicate_count(self) -> int:
        return len(self.predicate_nodes)

    def report(self, n_params: int) -> dict:
        """JSON-ready summary of the trace."""
        return {
            "n_inputs": self.n_inputs,
            "max_degree": self.max_degree,
            "predicate_count": self.predicate_count,
            "pdim_bound": pdim_bound(n_params, self),
        }


def pdim_bound(n_params: int, trace: Trace) -> float:
    """Pseudo-dimension bound ``n_params * log2(max(2, degree * predicates))``,
    reported up to the framework's hidden constant."""
    delta = max(1, trace.max_degree)
    p = max(1, trace.predicate_count)
    return float(n_params) * math.log2(max(2.0, float(delta) * float(p)))


def gj_argmin(trace, values) -> int:
    """Index of the minimum via branches on all pairwise differences.

    Branches on ``v_i - v_j`` for every i < j, so the predicate set grows
    by exactly C(r, 2) structurally distinct entries; the winner is read
    off the recorded outcomes without further branching.
    """
    r = len(values)
    if r == 0:
        raise ValueError("need at least one value")
    # ge[i][j] == True means v_i >= v_j.
    ge = [[False] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            out = trace.branch(values[i] - values[j])
            ge[i][j] = out
            ge[j][i] = not out
    best = 0
    for i in range(1, r):
        if ge[best][i]:
            best = i
    return best


def gj_min(trace, values):
    """Minimum of traced values; see :func:`gj_argmin`."""
    return values[gj_argmin(trace, values)]


class FloatBackend:
    """Drop-in stand-in for :class:`Trace` running on plain floats.

    Drivers written against the trace API can be replayed bit-for-bit on
    raw floats to check that instrumentation never perturbs execution.
    """

    n_inputs = 0
    max_degree = 0
    predicate_count = 0

    def input(self, name: str, value: float) -> float:
        return float(value)

    def const(self, value) -> float:
        return float(value)

    def branch(self, v: float) -> bool:
        return v >= 0.0
