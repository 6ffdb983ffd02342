"""Dense two-phase primal simplex with Bland's rule.

Problems here are small (a few hundred variables), so a full tableau is kept
in memory and pivots are plain numpy row operations. The pivot rule is fixed
(smallest eligible column enters; min-ratio row leaves, ties to the smallest
basic variable) which makes every solve deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateNumericsError, LPStructureError

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-12
COST_TOL = 1e-9
NOISE_TOL = 1e-14
MAX_ITER = 100_000

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = {LE, EQ, GE}

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass
class LinearProgram:
    """``maximize objective @ x`` subject to row constraints and box bounds.

    ``constraints`` is a list of ``(coefficients, relation, rhs)`` with
    relation one of ``"<="``, ``"="``, ``">="``. ``bounds`` defaults to
    ``[0, inf)`` for every variable.
    """

    objective: Sequence[float]
    constraints: list = field(default_factory=list)
    bounds: list | None = None

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def arrays(self):
        c = np.asarray(self.objective, dtype=float)
        if c.ndim != 1:
            raise LPStructureError("objective must be a vector")
        n = c.shape[0]
        rows, rels, rhs = [], [], []
        for k, con in enumerate(self.constraints):
            try:
                coeffs, rel, b = con
            except (TypeError, ValueError):
                raise LPStructureError(f"constraint {k} must be (coefficients, relation, rhs)") from None
            a = np.asarray(coeffs, dtype=float)
            if a.shape != (n,):
                raise LPStructureError(
                    f"constraint {k} has {a.size} coefficients, objective has {n}"
                )
            if rel not in _RELATIONS:
                raise LPStructureError(f"constraint {k}: unknown relation {rel!r}")
            rows.append(a)
            rels.append(rel)
            rhs.append(float(b))
        A = np.array(rows, dtype=float).reshape(len(rows), n)
        b = np.array(rhs, dtype=float)
        if self.bounds is None:
            lo = np.zeros(n)
            hi = np.full(n, np.inf)
        else:
            if len(self.bounds) != n:
                raise LPStructureError(f"{len(self.bounds)} bounds given for {n} variables")
            lo = np.array([bd[0] for bd in self.bounds], dtype=float)
            hi = np.array([bd[1] for bd in self.bounds], dtype=float)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise LPStructureError("objective and constraint data must be finite")
        if not np.all(np.isfinite(lo)) or np.any(np.isnan(hi)) or np.any(hi == -np.inf):
            raise LPStructureError("lower bounds must be finite and upper bounds not NaN")
        if np.any(lo > hi):
            raise LPStructureError("lower bound exceeds upper bound")
        return c, A, rels, b, lo, hi


@dataclass
class LpSolution:
    status: str
    values: np.ndarray | None = None
    objective_value: float | None = None
    duals: np.ndarray | None = None
    bound_duals: np.ndarray | None = None
    dual_objective: float | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, T, basis):
        self.T = T  # m constraint rows + 1 reduced-cost row; last column is rhs / -objective
        self.basis = basis
        self.iterations = 0

    @property
    def m(self):
        return self.T.shape[0] - 1

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        # Only rows with a nonzero entry in the pivot column change.
        nz = np.nonzero(col)[0]
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.iterations += 1

    def set_costs(self, c_full):
        m = self.m
        cb = c_full[self.basis]
        self.T[m, :-1] = c_full - cb @ self.T[:m, :-1]
        self.T[m, -1] = -(cb @ self.T[:m, -1])

    def run(self, allowed, cost_tol):
        m = self.m
        T = self.T
        while True:
            if self.iterations >= MAX_ITER:
                raise DegenerateNumericsError(f"simplex exceeded {MAX_ITER} pivots")
            red = T[m, :-1]
            candidates = np.nonzero((red > cost_tol) & allowed)[0]
            if candidates.size == 0:
                return OPTIMAL
            j = int(candidates[0])
            col = T[:m, j]
            positive = col > PIVOT_TOL
            if not positive.any():
                noise = NOISE_TOL * max(1.0, float(np.max(np.abs(col), initial=0.0)))
                if (col > noise).any():
                    raise DegenerateNumericsError(
                        f"entering column {j} has only pivots below {PIVOT_TOL}"
                    )
                return UNBOUNDED
            rows = np.nonzero(positive)[0]
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(tied, key=lambda k: self.basis[k]))
            self.pivot(r, j)


def _implied_upper(A_eq_rows, b_eq, k, u):
    for a, b in zip(A_eq_rows, b_eq):
        if a[k] > 0 and b / a[k] <= u + FEAS_TOL:
            return True
    return False


def solve(lp: LinearProgram) -> LpSolution:
    c, A, rels, b, lo, hi = lp.arrays()
    n = c.shape[0]
    n_orig = A.shape[0]

    # Shift x = lo + y so that y >= 0.
    b_shift = b - A @ lo
    width = hi - lo

    # Upper bounds become explicit rows unless an all-nonnegative equality row implies them.
    eq_rows = [
        (A[r], b_shift[r])
        for r in range(n_orig)
        if rels[r] == EQ and np.all(A[r] >= 0) and b_shift[r] >= 0
    ]
    ub_vars = []
    for k in range(n):
        if np.isinf(width[k]):
            continue
        if eq_rows and _implied_upper([r[0] for r in eq_rows], [r[1] for r in eq_rows], k, width[k]):
            continue
        ub_vars.append(k)

    rows = [A[r] for r in range(n_orig)]
    row_rel = list(rels)
    row_rhs = list(b_shift)
    for k in ub_vars:
        e = np.zeros(n)
        e[k] = 1.0
        rows.append(e)
        row_rel.append(LE)
        row_rhs.append(width[k])
    m = len(rows)
    S = np.array(rows, dtype=float).reshape(m, n)
    rhs = np.array(row_rhs, dtype=float)
    sign = np.ones(m)
    for r in range(m):
        if rhs[r] < 0:
            sign[r] = -1.0
            S[r] *= -1.0
            rhs[r] *= -1.0
            if row_rel[r] == LE:
                row_rel[r] = GE
            elif row_rel[r] == GE:
                row_rel[r] = LE

    n_slack = sum(1 for rel in row_rel if rel != EQ)
    n_art = sum(1 for rel in row_rel if rel != LE)
    n_cols = n + n_slack + n_art
    T = np.zeros((m + 1, n_cols + 1))
    T[:m, :n] = S
    T[:m, -1] = rhs
    basis = [0] * m
    s_col = n
    a_col = n + n_slack
    art_cols = []
    for r, rel in enumerate(row_rel):
        if rel == LE:
            T[r, s_col] = 1.0
            basis[r] = s_col
            s_col += 1
        elif rel == GE:
            T[r, s_col] = -1.0
            s_col += 1
            T[r, a_col] = 1.0
            basis[r] = a_col
            art_cols.append(a_col)
            a_col += 1
        else:
            T[r, a_col] = 1.0
            basis[r] = a_col
            art_cols.append(a_col)
            a_col += 1
    standard = T[:m, :-1].copy()

    tab = _Tableau(T, basis)
    is_art = np.zeros(n_cols, dtype=bool)
    is_art[art_cols] = True

    if art_cols:
        c1 = np.zeros(n_cols)
        c1[is_art] = -1.0
        tab.set_costs(c1)
        tab.run(np.ones(n_cols, dtype=bool), COST_TOL)
        if -tab.T[tab.m, -1] < -FEAS_TOL:
            return LpSolution(INFEASIBLE, iterations=tab.iterations)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        keep = list(range(m))
        while r < tab.m:
            if is_art[tab.basis[r]]:
                row = tab.T[r, :-1]
                cand = np.nonzero((np.abs(row) > PIVOT_TOL) & ~is_art)[0]
                if cand.size:
                    tab.pivot(r, int(cand[0]))
                else:
                    tab.T = np.delete(tab.T, r, axis=0)
                    del tab.basis[r]
                    del keep[r]
                    continue
            r += 1
    else:
        keep = list(range(m))

    c2 = np.zeros(n_cols)
    c2[:n] = c
    tab.set_costs(c2)
    scale = float(np.max(np.abs(c))) if n else 0.0
    cost_tol = COST_TOL * scale if scale > 0 else COST_TOL
    status = tab.run(~is_art, cost_tol)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=tab.iterations)

    y_shift = np.zeros(n_cols)
    for r, j in enumerate(tab.basis):
        y_shift[j] = tab.T[r, -1]
    x = lo + np.clip(y_shift[:n], 0.0, None)
    x = np.minimum(x, hi)
    objective = float(c @ x)

    # Dual certificate from the final basis: B^T u = c_B on the standardized rows.
    B = standard[np.ix_(keep, tab.basis)]
    u_kept = np.linalg.solve(B.T, c2[tab.basis]) if keep else np.zeros(0)
    u = np.zeros(m)
    u[keep] = u_kept
    u *= sign
    duals = u[:n_orig]
    bound_duals = np.zeros(n)
    for pos, k in enumerate(ub_vars):
        bound_duals[k] = u[n_orig + pos]
    v = A.T @ duals + bound_duals - c
    hi_term = np.where(bound_duals != 0, hi, 0.0)
    dual_objective = float(b @ duals + hi_term @ bound_duals - lo @ v)

    return LpSolution(
        OPTIMAL,
        values=x,
        objective_value=objective,
        duals=duals,
        bound_duals=bound_duals,
        dual_objective=dual_objective,
        iterations=tab.iterations,
    )


def certify_dual(lp: LinearProgram, sol: LpSolution, tol: float = 1e-6) -> bool:
    """Check that ``sol``'s dual vector is feasible and bounds the primal."""
    if not sol.optimal:
        return False
    c, A, rels, b, lo, hi = lp.arrays()
    y = sol.duals
    w = sol.bound_duals
    if np.any(w < -tol) or np.any((w > tol) & np.isinf(hi)):
        return False
    for r, rel in enumerate(rels):
        if rel == LE and y[r] < -tol:
            return False
        if rel == GE and y[r] > tol:
            return False
    v = A.T @ y + w - c
    if np.any(v < -tol):
        return False
    return sol.objective_value <= sol.dual_objective + tol


def check_feasible(lp: LinearProgram, x, tol: float = FEAS_TOL) -> bool:
    c, A, rels, b, lo, hi = lp.arrays()
    x = np.asarray(x, dtype=float)
    if np.any(x < lo - 1e-9) or np.any(x > hi + 1e-9):
        return False
    lhs = A @ x
    for r, rel in enumerate(rels):
        if rel == LE and lhs[r] > b[r] + tol:
            return False
        if rel == GE and lhs[r] < b[r] - tol:
            return False
        if rel == EQ and abs(lhs[r] - b[r]) > tol:
            return False
    return True
