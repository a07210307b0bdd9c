"""Small dense linear programs.

Two-phase tableau simplex with Bland's anti-cycling rule. Meant for the
handful-of-variables programs that appear in this package (independent cost,
region membership), not as a general LP library.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["LPResult", "lp_solve", "OPTIMAL", "INFEASIBLE", "UNBOUNDED"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

MAX_VARIABLES = 200


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[np.ndarray] = None
    fun: Optional[float] = None

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    colv = t[:, col].copy()
    colv[row] = 0.0
    t -= np.outer(colv, t[row])


def _run_simplex(t: np.ndarray, basis: list, n_cols: int, tol: float) -> bool:
    """Minimise the objective held in the last row. Returns False if unbounded."""
    m = t.shape[0] - 1
    max_iter = 50 * (m + n_cols) + 100
    for _ in range(max_iter):
        reduced = t[-1, :n_cols]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return True
        col = int(entering[0])
        column = t[:m, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            return False
        ratios = t[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(t, row, col)
        basis[row] = col
    raise RuntimeError("simplex iteration limit reached")


def _standardise_bounds(n: int, bounds):
    if bounds is None:
        return [(0.0, None)] * n
    if len(bounds) == 2 and not isinstance(bounds[0], (tuple, list)):
        return [tuple(bounds)] * n
    if len(bounds) != n:
        raise ValueError(f"expected {n} bounds, got {len(bounds)}")
    return [tuple(b) for b in bounds]


def lp_solve(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    bounds=None,
    maximize: bool = False,
    tol: float = 1e-9,
) -> LPResult:
    """Optimise ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x == b_eq`` and box ``bounds``.

    ``bounds`` is one ``(lo, hi)`` pair per variable (``None`` for an infinite
    side) or a single pair applied to all; the default is ``x >= 0``.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    if n > MAX_VARIABLES:
        raise ValueError(f"lp_solve handles at most {MAX_VARIABLES} variables, got {n}")
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape != (b_ub.size, n) or A_eq.shape != (b_eq.size, n):
        raise ValueError("constraint matrix shapes do not match c / b")
    sign = -1.0 if maximize else 1.0

    # x = offset + T @ u, u >= 0; T has one or two columns per original variable
    bnds = _standardise_bounds(n, bounds)
    cols = []  # (var index, coefficient)
    offset = np.zeros(n)
    extra_ub = []
    for v, (lo, hi) in enumerate(bnds):
        lo = None if lo is None or lo == -math.inf else float(lo)
        hi = None if hi is None or hi == math.inf else float(hi)
        if lo is not None and hi is not None and hi < lo - tol:
            return LPResult(INFEASIBLE)
        if lo is not None:
            offset[v] = lo
            cols.append((v, 1.0))
            if hi is not None:
                extra_ub.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            offset[v] = hi
            cols.append((v, -1.0))
        else:
            cols.append((v, 1.0))
            cols.append((v, -1.0))
    nu = len(cols)
    T = np.zeros((n, nu))
    for u, (v, coef) in enumerate(cols):
        T[v, u] = coef

    cu = sign * (c @ T)
    Aub_u = A_ub @ T
    bub_u = b_ub - A_ub @ offset
    if extra_ub:
        rows = np.zeros((len(extra_ub), nu))
        for r, (u, cap) in enumerate(extra_ub):
            rows[r, u] = 1.0
        Aub_u = np.vstack([Aub_u, rows])
        bub_u = np.concatenate([bub_u, [cap for _, cap in extra_ub]])
    Aeq_u = A_eq @ T
    beq_u = b_eq - A_eq @ offset

    m_ub, m_eq = Aub_u.shape[0], Aeq_u.shape[0]
    m = m_ub + m_eq
    n_std = nu + m_ub
    A = np.zeros((m, n_std))
    A[:m_ub, :nu] = Aub_u
    A[:m_ub, nu:] = np.eye(m_ub)
    A[m_ub:, :nu] = Aeq_u
    b = np.concatenate([bub_u, beq_u])
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # phase 1: an artificial for every row whose slack cannot start basic
    basis = []
    art_rows = []
    for r in range(m):
        if r < m_ub and not flip[r]:
            basis.append(nu + r)
        else:
            basis.append(None)
            art_rows.append(r)
    n_art = len(art_rows)
    t = np.zeros((m + 1, n_std + n_art + 1))
    t[:m, :n_std] = A
    t[:m, -1] = b
    for a_idx, r in enumerate(art_rows):
        t[r, n_std + a_idx] = 1.0
        basis[r] = n_std + a_idx
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if n_art:
        for r in art_rows:
            t[-1] -= t[r]
        t[-1, n_std:n_std + n_art] = 0.0
        _run_simplex(t, basis, n_std + n_art, tol)
        if -t[-1, -1] > tol * scale * 10:
            return LPResult(INFEASIBLE)
        # drive remaining artificials out of the basis
        keep = []
        for r in range(m):
            if basis[r] >= n_std:
                nz = np.flatnonzero(np.abs(t[r, :n_std]) > tol)
                if nz.size:
                    _pivot(t, r, int(nz[0]))
                    basis[r] = int(nz[0])
                    keep.append(r)
            else:
                keep.append(r)
        t = np.vstack([t[keep], t[-1:]])
        basis = [basis[r] for r in keep]
        t = np.delete(t, np.s_[n_std:n_std + n_art], axis=1)

    t[-1] = 0.0
    t[-1, :nu] = cu
    for r, bv in enumerate(basis):
        if t[-1, bv] != 0.0:
            t[-1] -= t[-1, bv] * t[r]
    if not _run_simplex(t, basis, n_std, tol):
        return LPResult(UNBOUNDED)
    ustd = np.zeros(n_std)
    for r, bv in enumerate(basis):
        ustd[bv] = t[r, -1]
    x = offset + T @ ustd[:nu]
    return LPResult(OPTIMAL, x, float(c @ x))
