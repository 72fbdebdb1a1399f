"""Dense two-phase primal simplex for small LPs.

Solves  max c.x  s.t.  A x <= b,  x >= 0  on dense tableaus.  Pivoting
uses Bland's rule throughout (entering: lowest eligible column index;
leaving: minimum ratio, ties broken by lowest basic variable index),
which is anti-cycling and makes results deterministic across platforms.
Negative right-hand sides are handled by a phase-1 artificial objective.

Problem sizes in this package are tiny (tens of rows/columns), so the
implementation favours clarity over sparse-matrix tricks.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import SolverError

ENTER_TOL = 1e-9
PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
MAX_PIVOTS = 20_000


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and abs(T[i, col]) > 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _bland_iterate(T: np.ndarray, basis: np.ndarray, ncols: int, budget: list[int]) -> None:
    """Run primal simplex pivots to optimality on the current tableau."""
    m = T.shape[0] - 1
    while True:
        obj = T[-1, :ncols]
        candidates = np.flatnonzero(obj < -ENTER_TOL)
        if candidates.size == 0:
            return
        col = int(candidates[0])
        ratios_row = -1
        best_ratio = np.inf
        best_basis = None
        for i in range(m):
            a = T[i, col]
            if a > PIVOT_TOL:
                ratio = T[i, -1] / a
                if ratio < best_ratio - PIVOT_TOL or (
                    abs(ratio - best_ratio) <= PIVOT_TOL
                    and (best_basis is None or basis[i] < best_basis)
                ):
                    best_ratio = ratio
                    best_basis = basis[i]
                    ratios_row = i
        if ratios_row < 0:
            raise SolverError("LP is unbounded (no valid leaving row)", iterations=budget[0])
        _pivot(T, basis, ratios_row, col)
        budget[0] += 1
        if budget[0] > MAX_PIVOTS:
            raise SolverError("simplex pivot budget exhausted", iterations=budget[0])


def simplex_maximize(
    A: np.ndarray, b: np.ndarray, c: np.ndarray
) -> Optional[tuple[np.ndarray, float]]:
    """Maximize c.x over {A x <= b, x >= 0}; None when infeasible."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).copy()
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape if A.ndim == 2 else (0, c.shape[0])
    if m == 0:
        # No rows: with x >= 0 the problem is only bounded for c <= 0.
        if np.any(c > ENTER_TOL):
            raise SolverError("LP is unbounded (no constraints)")
        return np.zeros(n), 0.0

    rows = A.copy()
    neg = b < 0
    rows[neg] *= -1.0
    b[neg] *= -1.0
    slack = np.eye(m)
    slack[neg] *= -1.0
    art_rows = np.flatnonzero(neg)
    k = art_rows.size
    art = np.zeros((m, k))
    for j, i in enumerate(art_rows):
        art[i, j] = 1.0

    ncols = n + m + k
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :n] = rows
    T[:m, n : n + m] = slack
    T[:m, n + m : ncols] = art
    T[:m, -1] = b
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = n + i if not neg[i] else n + m + int(np.flatnonzero(art_rows == i)[0])

    budget = [0]
    if k > 0:
        # Phase 1: minimize the artificial total, i.e. maximize -sum(art).
        T[-1, n + m : ncols] = 1.0
        for i in range(m):
            if basis[i] >= n + m:
                T[-1] -= T[i]
        _bland_iterate(T, basis, ncols, budget)
        if T[-1, -1] < -FEAS_TOL:
            return None
        for i in range(m):
            if basis[i] >= n + m:  # artificial stuck basic at value ~0
                pivot_col = next(
                    (j for j in range(n + m) if abs(T[i, j]) > PIVOT_TOL), None
                )
                if pivot_col is None:
                    T[i, :] = 0.0  # redundant row
                    basis[i] = -1
                else:
                    _pivot(T, basis, i, pivot_col)
                    budget[0] += 1
        T[:, n + m : ncols] = 0.0

    # Phase 2 objective row, consistent with the current basis.
    T[-1, :] = 0.0
    T[-1, :n] = -c
    for i in range(m):
        if basis[i] >= 0 and abs(T[-1, basis[i]]) > 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    _bland_iterate(T, basis, n + m, budget)

    x = np.zeros(n)
    for i in range(m):
        if 0 <= basis[i] < n:
            x[basis[i]] = T[i, -1]
    return x, float(T[-1, -1])
