"""Dense two-phase simplex for small LPs in standard form.

Solves  max c.x  subject to  A x = b, x >= 0  with deterministic pivoting:
Dantzig pricing with lowest-index tie-breaks, falling back to Bland's
anti-cycling rule after a run of degenerate pivots.  Artificial columns are
kept (ineligible) through phase II so the dual vector can be read off the
final tableau.

Problem sizes here are a few hundred rows/columns, so a dense tableau is
simpler and faster than sparse machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "solve_lp"]

_EPS = 1e-9
_DEGENERATE_RUN = 60


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded", "stalled"
    x: np.ndarray | None
    objective: float
    duals: np.ndarray | None
    iterations: int

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    piv = tab[row, col]
    tab[row] /= piv
    colvals = tab[:, col].copy()
    colvals[row] = 0.0
    tab -= np.outer(colvals, tab[row])
    tab[:, col] = 0.0
    tab[row, col] = 1.0
    basis[row] = col


def _run_simplex(
    tab: np.ndarray,
    basis: np.ndarray,
    cost: np.ndarray,
    eligible: np.ndarray,
    max_iter: int,
) -> tuple[str, int]:
    m = tab.shape[0]
    it = 0
    degen_run = 0
    while it < max_iter:
        it += 1
        cb = cost[basis]
        reduced = cost - cb @ tab[:, :-1]
        reduced[~eligible] = 0.0
        reduced[basis] = 0.0
        if degen_run < _DEGENERATE_RUN:
            col = int(np.argmax(reduced))
            if reduced[col] <= _EPS:
                return "optimal", it
        else:
            # Bland: first improving column by index
            pos = np.nonzero(reduced > _EPS)[0]
            if len(pos) == 0:
                return "optimal", it
            col = int(pos[0])
        colvals = tab[:, col]
        ratios = np.full(m, np.inf)
        mask = colvals > _EPS
        ratios[mask] = tab[mask, -1] / colvals[mask]
        row = int(np.argmin(ratios))
        if not np.isfinite(ratios[row]):
            return "unbounded", it
        # deterministic tie-break: among minimal ratios pick the row whose
        # basic variable has the smallest index (Bland-compatible)
        near = np.nonzero(np.abs(ratios - ratios[row]) <= 1e-12)[0]
        if len(near) > 1:
            row = int(near[np.argmin(basis[near])])
        degen_run = degen_run + 1 if tab[row, -1] <= _EPS else 0
        _pivot(tab, basis, row, col)
    return "stalled", it


def solve_lp(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    max_iter: int = 20000,
) -> LPResult:
    """max c.x s.t. a x = b, x >= 0.

    Returns the optimal x, objective and duals y (y = c_B B^-1, so that
    y.b = objective and c - y.A <= 0 on all columns).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    sign = np.where(b < 0, -1.0, 1.0)
    a = a * sign[:, None]
    b = b * sign

    tab = np.zeros((m, n + m + 1))
    tab[:, :n] = a
    tab[:, n:n + m] = np.eye(m)
    tab[:, -1] = b
    basis = np.arange(n, n + m)

    # phase I: drive artificials out
    phase1_cost = np.zeros(n + m)
    phase1_cost[n:] = -1.0
    eligible = np.ones(n + m, dtype=bool)
    status, it1 = _run_simplex(tab, basis, phase1_cost, eligible, max_iter)
    if status != "optimal":
        return LPResult("stalled", None, np.nan, None, it1)
    resid = -float(phase1_cost[basis] @ tab[:, -1])
    if resid > 1e-7:
        return LPResult("infeasible", None, np.nan, None, it1)
    # pivot any artificial still basic (degenerate) out where possible
    for r in range(m):
        if basis[r] >= n:
            cols = np.nonzero(np.abs(tab[r, :n]) > 1e-9)[0]
            if len(cols):
                _pivot(tab, basis, r, int(cols[0]))

    # phase II: artificials stay in the tableau but never re-enter
    eligible = np.zeros(n + m, dtype=bool)
    eligible[:n] = True
    cost = np.concatenate([c, np.zeros(m)])
    status, it2 = _run_simplex(tab, basis, cost, eligible, max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, np.inf, None, it1 + it2)
    if status != "optimal":
        return LPResult("stalled", None, np.nan, None, it1 + it2)

    x = np.zeros(n)
    in_orig = basis < n
    x[basis[in_orig]] = tab[in_orig, -1]
    # duals: y = c_B B^{-1}; B^{-1} sits in the artificial columns, which
    # were scaled by `sign` on entry
    binv = tab[:, n:n + m]
    y = (cost[basis] @ binv) * sign
    return LPResult("optimal", x, float(c @ x), y, it1 + it2)
