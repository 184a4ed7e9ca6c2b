"""Exact solver for small dense linear programs over box-bounded variables.

Bounded-variable primal simplex, two phases, Bland's rule throughout (the
programs here have at most a handful of general rows, so anti-cycling safety
costs nothing).  Terminates at a vertex optimum; the only approximation is
floating-point arithmetic itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError

_DTOL = 1e-10  # reduced-cost threshold for entering candidates
_PTOL = 1e-11  # pivot / ratio-test threshold
_FEAS_TOL = 1e-9
_MAX_PIVOTS = 20000


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible"
    x: np.ndarray | None
    objective: float | None


def lp_solve(
    objective,
    rows=None,
    senses=None,
    rhs=None,
    lower=None,
    upper=None,
    maximize: bool = False,
) -> LpSolution:
    """Optimize objective . x subject to general rows and box bounds.

    Constraints read ``rows[i] . x  senses[i]  rhs[i]`` with senses drawn
    from ``"<="``, ``">="``, ``"=="``.  Bounds default to the unit box.
    Returns a vertex optimum or an infeasibility verdict; unboundedness
    cannot occur under finite box bounds.
    """
    c = np.asarray(objective, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ParameterError("objective must be a non-empty vector")
    n = c.size
    if rows is None or len(rows) == 0:
        a = np.zeros((0, n))
        senses = []
        b = np.zeros(0)
    else:
        a = np.asarray(rows, dtype=float).reshape(len(rows), -1)
        b = np.atleast_1d(np.asarray(rhs, dtype=float))
        senses = list(senses)
        if a.shape[1] != n or b.shape != (a.shape[0],) or len(senses) != a.shape[0]:
            raise ParameterError("rows, senses and rhs shapes are inconsistent")
    lb = np.zeros(n) if lower is None else np.asarray(lower, dtype=float).copy()
    ub = np.ones(n) if upper is None else np.asarray(upper, dtype=float).copy()
    if lb.shape != (n,) or ub.shape != (n,):
        raise ParameterError("bounds must match the number of variables")
    if not (np.all(np.isfinite(lb)) and np.all(np.isfinite(ub))):
        raise ParameterError("box bounds must be finite")
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ParameterError("coefficients must be finite")
    if np.any(lb > ub + _PTOL):
        return LpSolution("infeasible", None, None)
    ub = np.maximum(ub, lb)

    sign = -1.0 if maximize else 1.0
    x = _simplex(sign * c, a, senses, b, lb, ub)
    if x is None:
        return LpSolution("infeasible", None, None)
    return LpSolution("optimal", x, float(np.dot(c, x)))


def _simplex(c, a, senses, b, lb, ub):
    """Minimize c.x; returns an optimal x or None when infeasible."""
    m, n = a.shape
    if m == 0:
        # pure box problem: each variable sits at the bound its cost prefers
        return np.where(c < 0.0, ub, lb)

    # normalize >= rows to <=, then give every row a slack column
    a = a.copy()
    b = b.copy()
    eq = np.zeros(m, dtype=bool)
    for i, sense in enumerate(senses):
        if sense == ">=":
            a[i] *= -1.0
            b[i] = -b[i]
        elif sense == "==":
            eq[i] = True
        elif sense != "<=":
            raise ParameterError(f"unknown constraint sense {sense!r}")

    inf = math.inf
    resid = b - a @ lb  # row slack when every structural variable is at lower bound
    basis = np.empty(m, dtype=np.int64)
    art_cols = []
    for i in range(m):
        if resid[i] >= 0.0 and (not eq[i] or resid[i] == 0.0):
            basis[i] = n + i  # slack starts basic and in bounds
        else:
            col = np.zeros(m)
            col[i] = 1.0 if resid[i] >= 0.0 else -1.0
            basis[i] = n + m + len(art_cols)
            art_cols.append(col)

    n_art = len(art_cols)
    blocks = [a, np.eye(m)] + ([np.column_stack(art_cols)] if n_art else [])
    full = np.hstack(blocks)
    lo = np.concatenate([lb, np.zeros(m), np.zeros(n_art)])
    hi = np.concatenate([ub, np.where(eq, 0.0, inf), np.full(n_art, inf)])
    total = full.shape[1]

    val = lo.copy()
    at_upper = np.zeros(total, dtype=bool)
    in_basis = np.zeros(total, dtype=bool)
    in_basis[basis] = True
    val[basis] = 0.0
    val[basis] = np.linalg.solve(full[:, basis], b - full @ val)

    if n_art:
        phase1 = np.zeros(total)
        phase1[n + m :] = 1.0
        _pivot_loop(phase1, full, basis, in_basis, val, at_upper, lo, hi)
        if math.fsum(np.abs(val[n + m :]).tolist()) > _FEAS_TOL:
            return None
        hi[n + m :] = 0.0  # freeze artificials so phase 2 cannot revive them

    cost = np.zeros(total)
    cost[:n] = c
    _pivot_loop(cost, full, basis, in_basis, val, at_upper, lo, hi)

    x = np.clip(val[:n], lb, ub)
    _verify(a, eq, b, x)
    return x


def _pivot_loop(cost, full, basis, in_basis, val, at_upper, lo, hi):
    m = full.shape[0]
    for _ in range(_MAX_PIVOTS):
        b_mat = full[:, basis]
        y = np.linalg.solve(b_mat.T, cost[basis])
        reduced = cost - y @ full
        movable = ~in_basis & (hi > lo)
        eligible = movable & (
            (~at_upper & (reduced < -_DTOL)) | (at_upper & (reduced > _DTOL))
        )
        candidates = np.nonzero(eligible)[0]
        if candidates.size == 0:
            return
        j = int(candidates[0])  # Bland: smallest index enters
        delta = -1.0 if at_upper[j] else 1.0
        w = np.linalg.solve(b_mat, full[:, j])
        rate = -delta * w  # d(basic values)/dt as x_j moves into the box

        t_min = math.inf
        leave_pos = -1
        for i in range(m):
            bcol = basis[i]
            if rate[i] < -_PTOL:
                t_i = (val[bcol] - lo[bcol]) / (-rate[i])
            elif rate[i] > _PTOL:
                if math.isinf(hi[bcol]):
                    continue
                t_i = (hi[bcol] - val[bcol]) / rate[i]
            else:
                continue
            t_i = max(t_i, 0.0)
            if t_i < t_min - _PTOL:
                t_min, leave_pos = t_i, i
            elif t_i <= t_min + _PTOL and leave_pos >= 0 and bcol < basis[leave_pos]:
                t_min, leave_pos = min(t_min, t_i), i  # Bland: smallest column leaves

        span = hi[j] - lo[j]
        if span <= t_min:
            if math.isinf(span):
                raise AssertionError("unbounded ray in a box-bounded program")
            # entering variable crosses the box: bound flip, basis unchanged
            val[basis] += rate * span
            at_upper[j] = not at_upper[j]
            val[j] = hi[j] if at_upper[j] else lo[j]
            continue
        if leave_pos < 0:
            raise AssertionError("unbounded ray in a box-bounded program")

        val[basis] += rate * t_min
        val[j] = lo[j] + t_min if delta > 0 else hi[j] - t_min
        out = basis[leave_pos]
        # snap the leaving variable onto the bound it hit
        if rate[leave_pos] < 0.0:
            val[out] = lo[out]
            at_upper[out] = False
        else:
            val[out] = hi[out]
            at_upper[out] = True
        in_basis[out] = False
        basis[leave_pos] = j
        in_basis[j] = True
    raise ConvergenceError("simplex pivot limit exceeded")


def _verify(a, eq, b, x):
    lhs = a @ x
    for i in range(a.shape[0]):
        slack = b[i] - lhs[i]
        if (abs(slack) if eq[i] else max(-slack, 0.0)) > 1e-7:
            raise ConvergenceError(f"solver left row {i} violated by {abs(slack):.2e}")
