"""
Dense two-phase primal simplex.

Solves ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and ``x >= 0`` on a full tableau,
with Bland's smallest-index rule for both the entering and the leaving variable, so degenerate
problems (the gauge LPs are full of them) cannot cycle.
"""
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_TOL
from .errors import LPError


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LPResult(NamedTuple):
    status: LPStatus
    x: np.ndarray
    objective: float
    duals: np.ndarray
    """
    Multipliers of the ``A_ub`` rows followed by those of the ``A_eq`` rows (``b.y == objective``).
    Reported for callers that need an optimality certificate; the Steiner placement does not use them,
    its edge weights being fixed gauges.
    """
    iterations: int


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])


def _iterate(tableau: np.ndarray, basis: List[int], n_cols: int, tol: float, max_iter: int) -> Tuple[LPStatus, int]:
    for it in range(max_iter):
        reduced = tableau[-1, :n_cols]
        entering = np.flatnonzero(reduced < -tol)
        if not entering.size:
            return LPStatus.OPTIMAL, it
        col = int(entering[0])
        column = tableau[:-1, col]
        rows = np.flatnonzero(column > tol)
        if not rows.size:
            return LPStatus.UNBOUNDED, it
        ratios = tableau[rows, -1] / column[rows]
        tied = rows[ratios <= ratios.min() + tol]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(tableau, row, col)
        basis[row] = col
    raise LPError(f"linprog: no convergence after {max_iter} pivots")


def _matrix(a: Optional[Sequence[Sequence[float]]], n: int) -> np.ndarray:
    return np.zeros((0, n)) if a is None else np.asarray(a, dtype=float).reshape(-1, n)


def linprog(c: Sequence[float], A_ub: Optional[Sequence[Sequence[float]]] = None,
            b_ub: Optional[Sequence[float]] = None, A_eq: Optional[Sequence[Sequence[float]]] = None,
            b_eq: Optional[Sequence[float]] = None, tol: float = DEFAULT_TOL, max_iter: int = 50_000) -> LPResult:
    """
    Minimize a linear objective over a polyhedron in the nonnegative orthant.

    :param c:        Objective coefficients.
    :param A_ub:     Inequality rows (``A_ub x <= b_ub``).
    :param b_ub:     Inequality right-hand sides.
    :param A_eq:     Equality rows.
    :param b_eq:     Equality right-hand sides.
    :param tol:      Pivoting and feasibility tolerance.
    :param max_iter: Pivot cap per phase.

    :return:         Status, primal point, objective and dual multipliers.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    a_ub, a_eq = _matrix(A_ub, n), _matrix(A_eq, n)
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    rows = m_ub + m_eq
    b = np.concatenate([np.asarray(b_ub if b_ub is not None else [], dtype=float),
                        np.asarray(b_eq if b_eq is not None else [], dtype=float)])
    if b.size != rows:
        raise LPError("linprog: constraint rows and right-hand sides differ in length")

    # structural and slack columns, every row then scaled to a nonnegative right-hand side
    cols = n + m_ub
    a = np.zeros((rows, cols))
    a[:m_ub, :n] = a_ub
    a[:m_ub, n:] = np.eye(m_ub)
    a[m_ub:, :n] = a_eq
    sign = np.where(b < 0, -1.0, 1.0)
    a *= sign[:, None]
    b = b * sign

    tableau = np.zeros((rows + 1, cols + rows + 1))
    tableau[:rows, :cols] = a
    tableau[:rows, cols:cols + rows] = np.eye(rows)
    tableau[:rows, -1] = b
    tableau[-1, :cols] = -a.sum(axis=0)
    tableau[-1, -1] = -b.sum()
    basis = list(range(cols, cols + rows))

    _, it1 = _iterate(tableau, basis, cols, tol, max_iter)
    if -tableau[-1, -1] > tol * max(1.0, float(np.abs(b).sum())):
        return LPResult(LPStatus.INFEASIBLE, np.zeros(n), float("inf"), np.zeros(rows), it1)

    for r in range(rows):
        if basis[r] >= cols:
            candidates = np.flatnonzero(np.abs(tableau[r, :cols]) > tol)
            if candidates.size:
                _pivot(tableau, r, int(candidates[0]))
                basis[r] = int(candidates[0])

    cost = np.zeros(cols + rows)
    cost[:n] = c
    tableau[-1] = 0.0
    tableau[-1, :n] = c
    for r in range(rows):
        tableau[-1] -= cost[basis[r]] * tableau[r]

    status, it2 = _iterate(tableau, basis, cols, tol, max_iter)
    if status is LPStatus.UNBOUNDED:
        return LPResult(status, np.zeros(n), float("-inf"), np.zeros(rows), it1 + it2)

    x = np.zeros(cols + rows)
    for r in range(rows):
        x[basis[r]] = tableau[r, -1]
    x = np.maximum(x[:n], 0.0)
    duals = (cost[basis] @ tableau[:rows, cols:cols + rows]) * sign
    return LPResult(LPStatus.OPTIMAL, x, float(c @ x), duals, it1 + it2)
