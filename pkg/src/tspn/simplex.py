"""Dense two-phase simplex over free variables.

Minimizes c.x subject to A_ub x <= b_ub and A_eq x = b_eq with x free.
Free variables are split into positive/negative parts internally, slack and
artificial columns are appended, and both phases use Bland's smallest-index
rule with a pivot-magnitude floor and right-hand-side clamping; heavily
degenerate models that still stall numerically are re-solved through scipy's
HiGHS as a guarded fallback. The final basic solution is re-solved from the
original constraint data so tableau round-off does not accumulate into the
reported point.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure

PIVOT_TOL = 1e-9
PIVOT_FLOOR = 1e-7  # smallest pivot magnitude accepted while a safer one exists
FEAS_TOL = 1e-7

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray | None
    objective: float | None


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run(T, basis, ncols, tol):
    """Bland-rule pivoting on tableau T until optimal or unbounded."""
    m = T.shape[0] - 1
    max_iter = 2000 + 200 * (m + ncols)
    stall = 0
    best_obj = np.inf
    for _ in range(max_iter):
        costs = T[-1, :ncols]
        cscale = max(1.0, float(np.abs(costs).max(initial=0.0)))
        candidates = np.flatnonzero(costs < -tol * cscale)
        if candidates.size == 0:
            return OPTIMAL
        col = int(candidates[0])
        colvals = T[:m, col]
        rows = np.flatnonzero(colvals > PIVOT_FLOOR)
        if rows.size == 0:
            rows = np.flatnonzero(colvals > tol)
            if rows.size == 0:
                return UNBOUNDED
        rhs = np.maximum(T[rows, -1], 0.0)  # negatives below are round-off
        ratios = rhs / colvals[rows]
        best = float(ratios.min())
        tied = rows[np.flatnonzero(ratios <= best + tol * (1.0 + best))]
        row = int(min(tied, key=lambda i: basis[i]))
        _pivot(T, basis, row, col)
        drift = T[:m, -1]
        bad = drift < 0
        if bad.any():
            if float(drift[bad].min()) < -1e-6 * (1.0 + float(np.abs(drift).max())):
                raise NumericalFailure("tableau lost primal feasibility")
            drift[bad] = 0.0
        obj = float(-T[-1, -1])
        if obj < best_obj - 1e-12 * (1.0 + abs(best_obj)):
            best_obj = obj
            stall = 0
        else:
            stall += 1
            if stall > 20 * (m + 2):
                raise NumericalFailure("simplex stalled on a degenerate vertex")
    raise NumericalFailure("simplex iteration limit exceeded")


def _solve_own(c, A_ub, b_ub, A_eq, b_eq, tol):
    n = c.size
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # Standard form: split x = u - v, one slack per inequality row.
    nsplit = 2 * n
    nslack = m_ub
    A = np.zeros((m, nsplit + nslack))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:nsplit] = -A_ub
    A[m_ub:, :n] = A_eq
    A[m_ub:, n:nsplit] = -A_eq
    A[:m_ub, nsplit:] = np.eye(m_ub)
    b = np.concatenate([b_ub, b_eq])

    neg = b < 0
    A[neg] *= -1.0
    b = np.abs(b)

    # Slack columns of non-negated inequality rows start in the basis;
    # everything else gets an artificial.
    basis = np.full(m, -1, dtype=int)
    needs_art = np.ones(m, dtype=bool)
    for i in range(m_ub):
        if not neg[i]:
            basis[i] = nsplit + i
            needs_art[i] = False
    art_rows = np.flatnonzero(needs_art)
    nart = art_rows.size
    ncols = nsplit + nslack
    total = ncols + nart
    T = np.zeros((m + 1, total + 1))
    T[:m, :ncols] = A
    T[:m, -1] = b
    for k, i in enumerate(art_rows):
        T[i, ncols + k] = 1.0
        basis[i] = ncols + k

    if nart:
        # Phase 1: minimize the artificial sum; eliminate basic artificials
        # from the cost row.
        T[-1, ncols:total] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        status = _run(T, basis, total, tol)
        if status != OPTIMAL or T[-1, -1] < -FEAS_TOL:
            return SimplexResult(INFEASIBLE, None, None)
        # Drive leftover artificials out of the basis or drop their rows.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= ncols:
                pivots = np.flatnonzero(np.abs(T[i, :ncols]) > tol)
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
                else:
                    keep[i] = False
        if not keep.all():
            T = np.vstack([T[:m][keep], T[-1:]])
            basis = basis[keep]
            A = A[keep]
            b = b[keep]
            m = int(keep.sum())
        T[:, ncols:total] = 0.0

    # Phase 2 cost row from the split objective.
    cost = np.zeros(total + 1)
    cost[:n] = c
    cost[n:nsplit] = -c
    T[-1] = cost
    for i in range(m):
        if abs(T[-1, basis[i]]) > 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    status = _run(T, basis, ncols, tol)
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, None, None)

    x_std = _refine(A, b, basis[:m], T[:m, -1], ncols)
    x = x_std[:n] - x_std[n:nsplit]
    residual = _max_violation(x, A_ub, b_ub, A_eq, b_eq)
    if residual > FEAS_TOL * (1.0 + float(np.abs(x).max(initial=0.0))):
        raise NumericalFailure(f"basic solution violates constraints by {residual:.2e}")
    return SimplexResult(OPTIMAL, x, float(c @ x))


def _max_violation(x, A_ub, b_ub, A_eq, b_eq):
    worst = 0.0
    if A_ub.size:
        worst = max(worst, float((A_ub @ x - b_ub).max(initial=0.0)))
    if A_eq.size:
        worst = max(worst, float(np.abs(A_eq @ x - b_eq).max(initial=0.0)))
    return worst


def _solve_scipy(c, A_ub, b_ub, A_eq, b_eq):
    from scipy.optimize import linprog

    res = linprog(c, A_ub=A_ub if A_ub.size else None, b_ub=b_ub if A_ub.size else None,
                  A_eq=A_eq if A_eq.size else None, b_eq=b_eq if A_eq.size else None,
                  bounds=(None, None), method="highs")
    if res.status == 0:
        return SimplexResult(OPTIMAL, np.asarray(res.x, dtype=float), float(c @ res.x))
    if res.status == 2:
        return SimplexResult(INFEASIBLE, None, None)
    if res.status == 3:
        return SimplexResult(UNBOUNDED, None, None)
    raise NumericalFailure(f"fallback LP solver failed with status {res.status}")


def solve_lp_arrays(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol=PIVOT_TOL):
    """Solve min c.x, A_ub x <= b_ub, A_eq x = b_eq, x free."""
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, dtype=float))
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, dtype=float))
    try:
        return _solve_own(c, A_ub, b_ub, A_eq, b_eq, tol)
    except NumericalFailure:
        return _solve_scipy(c, A_ub, b_ub, A_eq, b_eq)


def _refine(A, b, basis, tableau_rhs, ncols):
    """Re-solve the basic system from original data to kill pivot drift."""
    x = np.zeros(ncols)
    cols = np.asarray(basis, dtype=int)
    B = A[:, cols]
    try:
        xb = np.linalg.solve(B, b)
        if not np.all(np.isfinite(xb)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        xb, *_ = np.linalg.lstsq(B, b, rcond=None)
    if np.linalg.norm(B @ xb - b) > 1e-6 * (1.0 + np.linalg.norm(b)):
        xb = tableau_rhs
    x[cols] = xb
    return x
