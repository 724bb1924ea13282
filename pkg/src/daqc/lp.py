"""Self-contained solver for  min ||t||_1  s.t.  M t = b,  t >= 0.

Since every variable carries unit cost, the objective is the total analog
time of the schedule.  The solver is a dense two-phase primal simplex with
Bland's anti-cycling rule; it returns vertex solutions, re-solved against the
original constraint matrix with one step of iterative refinement so the
reported times satisfy the equations to near machine precision.

A brute-force vertex enumerator doubles as an independent test oracle for
small instances.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InternalConsistencyError, LpSolverStallError, OracleLimitError, ValidationError

FEASIBILITY_TOL = 1e-9
PIVOT_TOL = 1e-10
MAX_PIVOTS = 10**6

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LinearProgram:
    """Equality-constrained program with implicit all-ones objective."""

    constraint_matrix: np.ndarray
    rhs: np.ndarray

    def __init__(self, constraint_matrix, rhs):
        matrix = np.array(constraint_matrix, dtype=float)
        rhs = np.array(rhs, dtype=float).ravel()
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise ValidationError(f"constraint matrix must be 2-D and nonempty, got shape {matrix.shape}")
        if rhs.shape[0] != matrix.shape[0]:
            raise ValidationError(
                f"rhs length {rhs.shape[0]} does not match {matrix.shape[0]} constraint rows"
            )
        if not np.all(np.isfinite(matrix)) or not np.all(np.isfinite(rhs)):
            raise ValidationError("linear program contains non-finite entries")
        matrix.setflags(write=False)
        rhs.setflags(write=False)
        object.__setattr__(self, "constraint_matrix", matrix)
        object.__setattr__(self, "rhs", rhs)

    @property
    def n_rows(self) -> int:
        return self.constraint_matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.constraint_matrix.shape[1]

    def dump_debug(self) -> str:
        """Plain-text dump (matrix rows, then the rhs) for bug reports."""
        lines = [" ".join(f"{v:.17g}" for v in row) for row in self.constraint_matrix]
        lines.append("rhs: " + " ".join(f"{v:.17g}" for v in self.rhs))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LpSolution:
    times: np.ndarray
    objective_value: float
    status: str

    @property
    def is_optimal(self) -> bool:
        return self.status == STATUS_OPTIMAL


def _infeasible(n_cols: int) -> LpSolution:
    return LpSolution(np.zeros(n_cols), math.inf, STATUS_INFEASIBLE)


class _PivotBudget:
    def __init__(self, limit: int = MAX_PIVOTS):
        self.left = limit

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise LpSolverStallError(f"simplex exceeded {MAX_PIVOTS} pivots")


def _bland_iterate(tableau: np.ndarray, basis: list[int], n_scan: int, budget: _PivotBudget) -> None:
    """Run Bland-rule pivots until the reduced costs over n_scan columns are nonnegative."""
    m = tableau.shape[0] - 1
    while True:
        reduced = tableau[m, :n_scan]
        candidates = np.nonzero(reduced < -PIVOT_TOL)[0]
        if candidates.size == 0:
            return
        enter = int(candidates[0])  # smallest index: Bland's entering rule
        column = tableau[:m, enter]
        positive = np.nonzero(column > PIVOT_TOL)[0]
        if positive.size == 0:
            # cannot happen for these programs (objective bounded below by 0)
            raise InternalConsistencyError("simplex detected an unbounded direction")
        ratios = tableau[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios == best]
        leave = int(min(ties, key=lambda r: basis[r]))  # smallest basis var: Bland's leaving rule
        budget.spend()
        pivot = tableau[leave, enter]
        tableau[leave, :] /= pivot
        factors = tableau[:, enter].copy()
        factors[leave] = 0.0
        tableau -= np.outer(factors, tableau[leave, :])
        tableau[:, enter] = 0.0
        tableau[leave, enter] = 1.0
        basis[leave] = enter


def _refined_basis_solution(matrix: np.ndarray, rhs: np.ndarray, rows: list[int], basis: list[int], n_cols: int) -> np.ndarray:
    """Re-solve the final basis system from the original data, with one refinement step."""
    sub = matrix[np.ix_(rows, basis)]
    sub_rhs = rhs[rows]
    try:
        x_basis = np.linalg.solve(sub, sub_rhs)
        x_basis += np.linalg.solve(sub, sub_rhs - sub @ x_basis)
    except np.linalg.LinAlgError:
        x_basis = np.linalg.lstsq(sub, sub_rhs, rcond=None)[0]
    x = np.zeros(n_cols)
    x[basis] = x_basis
    return x


def solve(lp: LinearProgram, tol: float = FEASIBILITY_TOL) -> LpSolution:
    """Two-phase primal simplex; optimal solutions are global LP minima.

    Returns status ``infeasible`` when the phase-one artificial objective
    cannot be driven below ``tol``.  Raises on non-finite input (at program
    construction) and when the pivot budget runs out.
    """
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    matrix = lp.constraint_matrix
    rhs = lp.rhs
    m, n = matrix.shape
    budget = _PivotBudget()

    # normalize rows so the rhs is nonnegative
    flip = np.where(rhs < 0, -1.0, 1.0)
    a_norm = matrix * flip[:, None]
    b_norm = rhs * flip

    # ---- phase one: minimize the sum of artificial variables ----
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a_norm
    tableau[:m, n:n + m] = np.eye(m)
    tableau[:m, -1] = b_norm
    tableau[m, :] = -tableau[:m, :].sum(axis=0)
    tableau[m, n:n + m] = 0.0
    basis = list(range(n, n + m))

    _bland_iterate(tableau, basis, n + m, budget)
    phase_one = -tableau[m, -1]
    if phase_one > tol:
        return _infeasible(n)

    # drive leftover artificials out of the basis; rows with no real pivot are
    # redundant (pick the largest entry, not Bland: this is a one-shot cleanup)
    drop_rows: set[int] = set()
    for r in range(m):
        if basis[r] < n:
            continue
        row = tableau[r, :n]
        enter = int(np.argmax(np.abs(row)))
        if abs(row[enter]) <= PIVOT_TOL:
            drop_rows.add(r)
            continue
        budget.spend()
        pivot = tableau[r, enter]
        tableau[r, :] /= pivot
        factors = tableau[:, enter].copy()
        factors[r] = 0.0
        tableau -= np.outer(factors, tableau[r, :])
        tableau[:, enter] = 0.0
        tableau[r, enter] = 1.0
        basis[r] = enter

    keep = [r for r in range(m) if r not in drop_rows]

    if not keep:
        # every row was redundant against zero rhs: the origin is optimal
        return LpSolution(np.zeros(n), 0.0, STATUS_OPTIMAL)

    # ---- phase two: original unit-cost objective on the surviving rows ----
    k = len(keep)
    phase_two = np.zeros((k + 1, n + 1))
    phase_two[:k, :n] = tableau[keep, :n]
    phase_two[:k, -1] = tableau[keep, -1]
    basis2 = [basis[r] for r in keep]
    # unit cost on every structural variable, and all basis vars are structural here
    phase_two[k, :n] = np.ones(n) - phase_two[:k, :n].sum(axis=0)
    phase_two[k, -1] = -phase_two[:k, -1].sum()

    _bland_iterate(phase_two, basis2, n, budget)

    times = np.zeros(n)
    for r, bv in enumerate(basis2):
        times[bv] = phase_two[r, -1]

    refined = _refined_basis_solution(matrix, rhs, keep, basis2, n)
    residual_refined = np.abs(matrix @ refined - rhs).max()
    residual_tableau = np.abs(matrix @ times - rhs).max()
    if residual_refined <= residual_tableau:
        times, residual = refined, residual_refined
    else:
        residual = residual_tableau
    if residual > tol:
        raise InternalConsistencyError(
            f"optimal basis violates the constraints: residual {residual:.3e} > {tol:.1e}"
        )
    if times.min() < -tol:
        raise InternalConsistencyError(
            f"optimal vertex has a negative time {times.min():.3e} beyond tolerance"
        )
    times = np.clip(times, 0.0, None)
    return LpSolution(times, float(times.sum()), STATUS_OPTIMAL)


BRUTE_FORCE_MAX_COLS = 12
BRUTE_FORCE_MAX_ROWS = 6


def brute_force_optimum(lp: LinearProgram, tol: float = FEASIBILITY_TOL) -> LpSolution:
    """Enumerate every basic feasible solution; test oracle for tiny instances."""
    m, n = lp.constraint_matrix.shape
    if n > BRUTE_FORCE_MAX_COLS or m > BRUTE_FORCE_MAX_ROWS:
        raise OracleLimitError(
            f"instance {m}x{n} exceeds the brute-force limits "
            f"{BRUTE_FORCE_MAX_ROWS}x{BRUTE_FORCE_MAX_COLS}"
        )
    matrix = lp.constraint_matrix
    rhs = lp.rhs
    rank = int(np.linalg.matrix_rank(matrix))
    if rank == 0:
        if np.abs(rhs).max() <= tol:
            return LpSolution(np.zeros(n), 0.0, STATUS_OPTIMAL)
        return _infeasible(n)
    best_obj = math.inf
    best_x = None
    for cols in combinations(range(n), rank):
        sub = matrix[:, cols]
        if np.linalg.matrix_rank(sub) < rank:
            continue
        x_sub = np.linalg.lstsq(sub, rhs, rcond=None)[0]
        if np.abs(sub @ x_sub - rhs).max() > tol:
            continue
        if x_sub.min() < -tol:
            continue
        x = np.zeros(n)
        x[list(cols)] = np.clip(x_sub, 0.0, None)
        obj = float(x.sum())
        if obj < best_obj:
            best_obj = obj
            best_x = x
    if best_x is None:
        return _infeasible(n)
    return LpSolution(best_x, best_obj, STATUS_OPTIMAL)
