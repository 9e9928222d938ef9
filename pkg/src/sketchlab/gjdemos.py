"""Demo drivers for the complexity tracer.

Each driver runs a concrete arithmetic-and-branches program against the
trace API and returns both the numeric result and the populated trace.
Passing a :class:`~sketchlab.gjtrace.FloatBackend` instead of a fresh
trace replays the identical execution on plain floats.

Rank tests inside the traced routines branch on exact zero (the sign test
pair ``c >= 0`` and ``-c >= 0``), matching the arithmetic-only model; the
numeric modules use thresholded surrogates instead.  Drivers are meant for
generic inputs where the two agree.
"""

import math
from itertools import combinations

import numpy as np

from .gjtrace import Trace, gj_argmin, gj_min
from .proxy import q_iterations


def _num(v):
    return v.numeric if hasattr(v, "numeric") else float(v)


def _num_mat(m):
    return np.array([[_num(v) for v in row] for row in m])


def _lift_inputs(tr, arr, prefix):
    arr = np.asarray(arr, dtype=np.float64)
    return [
        [tr.input(f"{prefix}{i}_{j}", arr[i, j]) for j in range(arr.shape[1])]
        for i in range(arr.shape[0])
    ]


def _lift_consts(tr, arr):
    arr = np.asarray(arr, dtype=np.float64)
    return [[tr.const(v) for v in row] for row in arr]


def _identity(tr, k):
    return [[tr.const(1.0 if i == j else 0.0) for j in range(k)] for i in range(k)]


def _mat_mul(x, y):
    rows, inner, cols = len(x), len(y), len(y[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = x[i][0] * y[0][j]
            for t in range(1, inner):
                acc = acc + x[i][t] * y[t][j]
            row.append(acc)
        out.append(row)
    return out


def _mat_transpose(x):
    return [[x[i][j] for i in range(len(x))] for j in range(len(x[0]))]


def _mat_vec(m, v):
    out = []
    for row in m:
        acc = row[0] * v[0]
        for t in range(1, len(v)):
            acc = acc + row[t] * v[t]
        out.append(acc)
    return out


def _sum_squares(m):
    acc = None
    for row in m:
        for v in row:
            sq = v * v
            acc = sq if acc is None else acc + sq
    return acc


def _fl_last(tr, m):
    """Free coefficient ``c_k`` and final matrix ``B_k`` of the
    Faddeev-LeVerrier recurrence, all divisions by loop constants only."""
    k = len(m)
    b = _identity(tr, k)
    c = None
    for i in range(1, k + 1):
        mb = _mat_mul(m, b)
        trace_val = mb[0][0]
        for t in range(1, k):
            trace_val = trace_val + mb[t][t]
        c = (-trace_val) / float(i)
        if i < k:
            b = [
                [mb[r][s] + c if r == s else mb[r][s] for s in range(k)]
                for r in range(k)
            ]
    return c, b


def _nonzero_test(tr, c):
    """Exact rank test: c != 0, via the sign-test pair (both always run)."""
    ge = tr.branch(c)
    le = tr.branch(-c)
    return not (ge and le)


def _traced_projection(tr, rows, width):
    """Greedy row basis plus row-space projector, division performed last.

    Returns (projector matrix, numerator matrix, denominator scalar); for
    an empty basis the projector is all zeros and the denominator is 1.
    """
    kept = []
    for row in rows:
        candidate = kept + [row]
        gram = _mat_mul(candidate, _mat_transpose(candidate))
        c, _ = _fl_last(tr, gram)
        if _nonzero_test(tr, c):
            kept = candidate
    if not kept:
        zero = [[tr.const(0.0) for _ in range(width)] for _ in range(width)]
        return zero, zero, tr.const(1.0)
    gram = _mat_mul(kept, _mat_transpose(kept))
    c, b_last = _fl_last(tr, gram)
    neg_b = [[-v for v in row] for row in b_last]
    numer = _mat_mul(_mat_mul(_mat_transpose(kept), neg_b), kept)
    proj = [[v / c for v in row] for row in numer]
    return proj, numer, c


def power_trace(m, pi, q, tr=None):
    """Trace ``M^q @ pi`` on traced inputs; entry degrees reach q + 1."""
    tr = tr if tr is not None else Trace()
    m_t = _lift_inputs(tr, m, "m")
    pi = np.asarray(pi, dtype=np.float64)
    x = [tr.input(f"p{i}", pi[i]) for i in range(pi.size)]
    for _ in range(q):
        x = _mat_vec(m_t, x)
    return np.array([_num(v) for v in x]), tr


def min_trace(values, tr=None):
    """Trace the all-pairs minimum of ``r`` inputs; C(r, 2) predicates."""
    tr = tr if tr is not None else Trace()
    lifted = [tr.input(f"v{i}", v) for i, v in enumerate(values)]
    return _num(gj_min(tr, lifted)), tr


def rowspace_projection_trace(z, tr=None):
    """Trace the greedy-basis row-space projector of ``z``.

    On a k-by-k input the reported degree bound is exactly ``2k``: Gram
    entries are quadratic, the recurrence multiplies degree by the basis
    size, and the single final division pairs numerator and denominator of
    matching degree.
    """
    tr = tr if tr is not None else Trace()
    z = np.asarray(z, dtype=np.float64)
    rows = _lift_inputs(tr, z, "z")
    proj, _, _ = _traced_projection(tr, rows, z.shape[1])
    return _num_mat(proj), tr


def knapsack_trace(values, costs, capacity, rho, tr=None):
    """Trace the greedy knapsack heuristic with item rank ``v / c^rho``.

    Only ``rho`` is a traced input; every pairwise rank comparison reduces
    to ``rho >= log(v_j/v_i) / log(c_j/c_i)``, a degree-1 predicate, so the
    predicate count is C(#items, 2) (for distinct thresholds) and the
    degree stays 1.  Capacity checks involve instance constants only.
    """
    tr = tr if tr is not None else Trace()
    values = [float(v) for v in values]
    costs = [float(c) for c in costs]
    if min(values) <= 0 or min(costs) <= 0:
        raise ValueError("item values and costs must be positive")
    if len(set(costs)) != len(costs):
        raise ValueError("demo requires pairwise distinct costs")
    rho_v = tr.input("rho", rho)
    r = len(values)

    ge = [[False] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            t_ij = math.log(values[j] / values[i]) / math.log(costs[j] / costs[i])
            rho_at_least = tr.branch(rho_v - t_ij)
            out = rho_at_least if costs[j] > costs[i] else not rho_at_least
            ge[i][j] = out
            ge[j][i] = not out

    order = sorted(range(r), key=lambda i: sum(ge[i][j] for j in range(r)),
                   reverse=True)
    total, used = 0.0, 0.0
    for idx in order:
        if used + costs[idx] <= capacity:
            used += costs[idx]
            total += values[idx]
    return total, tr


def proxy_pipeline_trace(sketch, a, k, epsilon, q_constant=1.0,
                         loss_threshold=0.5, tr=None):
    """Trace the full proxy-loss pipeline on a tiny instance.

    The sketch slot values are the traced inputs; the data matrix, the
    pattern, and the candidate subsets are constants.  All projectors are
    computed division-last, so the degree stays proportional to
    ``m * k * q`` instead of compounding through nested quotients.
    Returns the numeric proxy loss and the trace (the final comparison
    against ``loss_threshold`` is included).
    """
    tr = tr if tr is not None else Trace()
    a = np.asarray(a, dtype=np.float64)
    n, d = a.shape

    s_t = [[tr.const(0.0) for _ in range(sketch.n)] for _ in range(sketch.m)]
    for j in range(sketch.n):
        for t in range(sketch.s):
            s_t[int(sketch.pattern[j, t])][j] = tr.input(
                f"s{j}_{t}", sketch.values[j, t]
            )
    a_t = _lift_consts(tr, a)

    sa = _mat_mul(s_t, a_t)
    _, proj_num, proj_den = _traced_projection(tr, sa, d)
    bn = _mat_mul(a_t, proj_num)  # numerator of B; denominator is proj_den

    q = q_iterations(epsilon, d, q_constant)
    bbt = _mat_mul(bn, _mat_transpose(bn))
    w = bn
    for _ in range(q):
        w = _mat_mul(bbt, w)

    candidates = list(combinations(range(d), k))
    losses, parts = [], []
    for cols in candidates:
        z_cols = [[w[i][c] for c in cols] for i in range(n)]
        _, z_num, z_den = _traced_projection(tr, _mat_transpose(z_cols), n)
        nzb = _mat_mul(z_num, bn)
        resid = [
            [z_den * bn[i][j] - nzb[i][j] for j in range(d)] for i in range(n)
        ]
        den = z_den * proj_den
        losses.append(_sum_squares(resid) / (den * den))
        parts.append((nzb, den))
    best = gj_argmin(tr, losses)

    nzb, den = parts[best]
    final = [
        [den * a_t[i][j] - nzb[i][j] for j in range(d)] for i in range(n)
    ]
    proxy = _sum_squares(final) / (den * den)
    tr.branch(proxy - loss_threshold)
    return _num(proxy), tr
