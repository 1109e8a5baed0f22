"""Dense two-phase primal simplex with Bland's rule.

Runs either on Fractions (exact, no tolerance) or on floats with a 1e-9
tolerance. Meant for small LPs: a few hundred rows and columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

FLOAT_TOL = 1e-9


class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


@dataclass
class LpResult:
    value: object
    x: list
    pivots: int


def simplex_solve(objective: Sequence, rows: Sequence[Sequence], senses: Sequence[str],
                  rhs: Sequence, maximize: bool = False, upper: Sequence | None = None,
                  exact: bool = True) -> LpResult:
    """Optimize objective . x subject to rows[i] . x (<=|>=|=) rhs[i], x >= 0.

    `upper` gives optional per-variable upper bounds (None entries mean
    unbounded); they are added as ordinary <= rows.
    """
    n = len(objective)
    num = Fraction if exact else float
    eps = 0 if exact else FLOAT_TOL
    rows = [list(r) for r in rows]
    senses = list(senses)
    rhs = list(rhs)
    if upper is not None:
        for j, ub in enumerate(upper):
            if ub is not None:
                row = [0] * n
                row[j] = 1
                rows.append(row)
                senses.append("<=")
                rhs.append(ub)
    m = len(rows)
    for s in senses:
        if s not in ("<=", ">=", "="):
            raise ValueError(f"unknown constraint sense {s!r}")

    # flip rows so every right-hand side is non-negative
    for i in range(m):
        if num(rhs[i]) < 0:
            rows[i] = [-a for a in rows[i]]
            rhs[i] = -rhs[i]
            senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]

    n_slack = sum(1 for s in senses if s != "=")
    n_art = sum(1 for s in senses if s != "<=")
    width = n + n_slack + n_art
    dtype = object if exact else float
    T = np.zeros((m + 1, width + 1), dtype=dtype)
    if exact:
        T[:, :] = Fraction(0)
    basis = [0] * m
    artificial = []
    s_col, a_col = n, n + n_slack
    for i in range(m):
        for j in range(n):
            T[i, j] = num(rows[i][j])
        T[i, width] = num(rhs[i])
        if senses[i] == "<=":
            T[i, s_col] = num(1)
            basis[i] = s_col
            s_col += 1
        else:
            if senses[i] == ">=":
                T[i, s_col] = num(-1)
                s_col += 1
            T[i, a_col] = num(1)
            basis[i] = a_col
            artificial.append(a_col)
            a_col += 1

    pivots = 0

    def run(cost: np.ndarray, allowed: int) -> None:
        nonlocal pivots
        T[m, :] = cost
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0:
                T[m, :] = T[m, :] - cb * T[i, :]
        while True:
            enter = -1
            for j in range(allowed):
                if T[m, j] < -eps:
                    enter = j
                    break
            if enter < 0:
                return
            leave, best = -1, None
            for i in range(m):
                a = T[i, enter]
                if a > eps:
                    ratio = T[i, width] / a
                    if best is None or ratio < best - eps or (abs(ratio - best) <= eps and basis[i] < basis[leave]):
                        leave, best = i, ratio
            if leave < 0:
                raise Unbounded("objective is unbounded")
            pivot(leave, enter)
            pivots += 1

    def pivot(r: int, c: int) -> None:
        T[r, :] = T[r, :] / T[r, c]
        col = T[:, c].copy()
        for i in range(m + 1):
            if i != r and col[i] != 0:
                T[i, :] = T[i, :] - col[i] * T[r, :]
        basis[r] = c

    zero = np.zeros(width + 1, dtype=dtype)
    if exact:
        zero[:] = Fraction(0)
    if artificial:
        cost = zero.copy()
        for a in artificial:
            cost[a] = num(1)
        run(cost, width)
        if -T[m, width] > eps:
            raise Infeasible("constraints are infeasible")
        # drive artificial variables out of the basis where possible
        art = set(artificial)
        keep = []
        for i in range(m):
            if basis[i] in art:
                for j in range(n + n_slack):
                    if abs(T[i, j]) > eps:
                        pivot(i, j)
                        break
            if basis[i] not in art:
                keep.append(i)
        if len(keep) < m:
            T = np.vstack([T[keep, :], T[m:m + 1, :]])
            basis = [basis[i] for i in keep]
            m = len(keep)

    cost = zero.copy()
    sign = -1 if maximize else 1
    for j in range(n):
        cost[j] = num(objective[j]) * sign
    run(cost, n + n_slack)
    x = [num(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, width]
    if not exact:
        x = [float(v) for v in x]
    value = sum((num(objective[j]) * x[j] for j in range(n)), num(0))
    return LpResult(value, x, pivots)
