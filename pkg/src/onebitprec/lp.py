"""Dense primal simplex for linear programs with per-variable bounds.

Solves

    maximize  c @ v   subject to   A @ v >= rhs,   lower <= v <= upper

where bound entries may be -inf/+inf.  Two phases on an explicit tableau:
phase 1 prices artificial variables out with unit costs, phase 2 optimizes
the real objective.  Dantzig pricing by default; Bland's rule takes over
after a run of degenerate pivots, which guarantees termination.  All pivot
rules are fixed, so repeated solves of one instance are bit-identical.

``build_relaxation`` maps a margin system to its box relaxation: variables
(x_real..., t), objective t, constraints lam_i @ x - t * (1 + lam_b_i) >= 0,
bounds -1 <= x_j <= 1 and t >= 0.  ``check_optimality`` re-derives a primal
and dual certificate for a returned vertex from scratch, so it does not
trust the solver's tableau.

``solve`` is reentrant and single-threaded; distinct instances may be solved
concurrently.  Solutions are plain immutable records.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .feasibility import FeasibilitySystem

_FEAS_TOL = 1e-9    # feasibility declarations
_OPT_TOL = 1e-9     # reduced-cost optimality
_PIVOT_TOL = 1e-11  # smallest usable pivot element
_DEGEN_TOL = 1e-12  # a step this small counts as a degenerate pivot

# column states
_BASIC, _AT_LOWER, _AT_UPPER, _FREE = 0, 1, 2, 3


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective @ v subject to constraint_matrix @ v >= rhs and bounds."""

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "objective", np.asarray(self.objective, dtype=float))
        object.__setattr__(self, "constraint_matrix", np.atleast_2d(np.asarray(self.constraint_matrix, dtype=float)))
        object.__setattr__(self, "rhs", np.asarray(self.rhs, dtype=float))
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))

    def validate(self):
        m, nv = self.constraint_matrix.shape
        if m < 1 or nv < 1:
            raise ValueError("need at least one constraint and one variable")
        if self.objective.shape != (nv,):
            raise ValueError(f"objective shape {self.objective.shape} != ({nv},)")
        if self.rhs.shape != (m,):
            raise ValueError(f"rhs shape {self.rhs.shape} != ({m},)")
        if self.lower.shape != (nv,) or self.upper.shape != (nv,):
            raise ValueError("bound vectors must match the variable count")
        if not (np.all(np.isfinite(self.constraint_matrix)) and np.all(np.isfinite(self.rhs))
                and np.all(np.isfinite(self.objective))):
            raise ValueError("objective, constraint matrix and rhs must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("every lower bound must be <= its upper bound")


@dataclass(frozen=True)
class LpSolution:
    """Solver output.  ``values`` are the structural variables only.

    The remaining fields are the vertex certificate consumed by
    :func:`check_optimality`: basis column indices into [structural | slack |
    artificial], per-column states, the rows that received artificials, and
    the full variable vector.
    """

    status: LpStatus
    values: np.ndarray | None
    objective_value: float
    iterations: int
    basis: np.ndarray | None = field(default=None, repr=False)
    col_status: np.ndarray | None = field(default=None, repr=False)
    art_rows: np.ndarray | None = field(default=None, repr=False)
    full_values: np.ndarray | None = field(default=None, repr=False)


class _State:
    """Mutable tableau state shared by the two phases."""

    __slots__ = ("W", "xB", "basis", "colstat", "nbval", "lower", "upper",
                 "bland", "stall", "iterations", "max_iterations", "bland_threshold")

    def __init__(self, W, xB, basis, colstat, nbval, lower, upper,
                 max_iterations, bland_threshold):
        self.W = W
        self.xB = xB
        self.basis = basis
        self.colstat = colstat
        self.nbval = nbval
        self.lower = lower
        self.upper = upper
        self.bland = False
        self.stall = 0
        self.iterations = 0
        self.max_iterations = max_iterations
        self.bland_threshold = bland_threshold


_PHASE_OPTIMAL, _PHASE_UNBOUNDED, _PHASE_LIMIT = 0, 1, 2


def _run_phase(st: _State, cost: np.ndarray) -> int:
    W = st.W
    m, n_all = W.shape
    movable = (st.upper - st.lower) > 0.0
    while True:
        if st.iterations >= st.max_iterations:
            return _PHASE_LIMIT
        r = cost - W.T @ cost[st.basis]
        imp = np.full(n_all, -np.inf)
        lowm = (st.colstat == _AT_LOWER) & movable
        upm = (st.colstat == _AT_UPPER) & movable
        frm = st.colstat == _FREE
        imp[lowm] = r[lowm]
        imp[upm] = -r[upm]
        imp[frm] = np.abs(r[frm])
        if st.bland:
            elig = np.flatnonzero(imp > _OPT_TOL)
            if elig.size == 0:
                return _PHASE_OPTIMAL
            j = int(elig[0])
        else:
            j = int(np.argmax(imp))
            if imp[j] <= _OPT_TOL:
                return _PHASE_OPTIMAL

        if st.colstat[j] == _AT_UPPER or (st.colstat[j] == _FREE and r[j] < 0):
            d = -1.0
        else:
            d = 1.0
        col = W[:, j]
        step = d * col

        lowB = st.lower[st.basis]
        upB = st.upper[st.basis]
        ratios = np.full(m, np.inf)
        dec = step > _PIVOT_TOL
        if dec.any():
            ratios[dec] = (st.xB[dec] - lowB[dec]) / step[dec]
        inc = step < -_PIVOT_TOL
        if inc.any():
            ratios[inc] = (st.xB[inc] - upB[inc]) / step[inc]
        np.maximum(ratios, 0.0, out=ratios)  # absorb tiny feasibility drift

        rmin = float(np.min(ratios))
        flip_gap = st.upper[j] - st.lower[j]
        if not (np.isfinite(rmin) or np.isfinite(flip_gap)):
            return _PHASE_UNBOUNDED
        st.iterations += 1

        if flip_gap <= rmin:
            # entering variable jumps to its other bound; basis unchanged
            st.xB -= flip_gap * step
            if st.colstat[j] == _AT_LOWER:
                st.colstat[j] = _AT_UPPER
                st.nbval[j] = st.upper[j]
            else:
                st.colstat[j] = _AT_LOWER
                st.nbval[j] = st.lower[j]
            st.stall = 0
            continue

        ties = np.flatnonzero(ratios == rmin)
        if st.bland:
            i_star = int(ties[np.argmin(st.basis[ties])])
        elif ties.size > 1:
            i_star = int(ties[np.argmax(np.abs(col[ties]))])
        else:
            i_star = int(ties[0])

        piv = float(col[i_star])
        leave = int(st.basis[i_star])
        enter_val = float(st.nbval[j]) + d * rmin
        st.xB -= rmin * step
        if step[i_star] > 0:
            st.colstat[leave] = _AT_LOWER
            st.nbval[leave] = st.lower[leave]
        else:
            st.colstat[leave] = _AT_UPPER
            st.nbval[leave] = st.upper[leave]
        st.xB[i_star] = enter_val
        st.basis[i_star] = j
        st.colstat[j] = _BASIC

        row = W[i_star] / piv
        colv = W[:, j].copy()
        colv[i_star] = 0.0
        W -= np.outer(colv, row)
        W[i_star] = row
        W[:, j] = 0.0
        W[i_star, j] = 1.0

        if rmin <= _DEGEN_TOL:
            st.stall += 1
            if st.stall >= st.bland_threshold:
                st.bland = True
        else:
            st.stall = 0


def _pivot_out_artificials(st: _State, nv: int, m: int):
    """Degenerate pivots replacing basic artificials with real columns where possible."""
    art_start = nv + m
    movable = (st.upper - st.lower) > 0.0
    for i in range(m):
        if st.basis[i] < art_start:
            continue
        row = np.abs(st.W[i, :art_start])
        row = np.where(movable[:art_start], row, 0.0)
        j = int(np.argmax(row))
        if row[j] <= 1e-7:
            continue  # dependent row; artificial stays pinned at zero
        leave = int(st.basis[i])
        st.colstat[leave] = _AT_LOWER
        st.nbval[leave] = 0.0
        st.xB[i] = float(st.nbval[j])
        st.basis[i] = j
        st.colstat[j] = _BASIC
        piv = float(st.W[i, j])
        rw = st.W[i] / piv
        colv = st.W[:, j].copy()
        colv[i] = 0.0
        st.W -= np.outer(colv, rw)
        st.W[i] = rw
        st.W[:, j] = 0.0
        st.W[i, j] = 1.0


def solve(lp: LinearProgram, *, max_iterations: int | None = None,
          bland_threshold: int = 1000) -> LpSolution:
    """Two-phase bounded-variable primal simplex."""
    lp.validate()
    A = lp.constraint_matrix
    rhs = lp.rhs
    c = lp.objective
    m, nv = A.shape
    if max_iterations is None:
        max_iterations = 50 * (nv + m)

    lo_s, up_s = lp.lower, lp.upper
    start = np.where(np.isfinite(lo_s), lo_s, np.where(np.isfinite(up_s), up_s, 0.0))
    stat_s = np.where(np.isfinite(lo_s), _AT_LOWER,
                      np.where(np.isfinite(up_s), _AT_UPPER, _FREE)).astype(np.int8)

    slack0 = A @ start - rhs
    art_rows = np.flatnonzero(slack0 < 0)
    n_art = art_rows.size
    n_all = nv + m + n_art

    lower = np.concatenate([lo_s, np.zeros(m), np.zeros(n_art)])
    upper = np.concatenate([up_s, np.full(m, np.inf), np.full(n_art, np.inf)])

    colstat = np.empty(n_all, dtype=np.int8)
    colstat[:nv] = stat_s
    colstat[nv:] = _AT_LOWER
    nbval = np.zeros(n_all)
    nbval[:nv] = start

    basis = np.empty(m, dtype=np.int64)
    scale = np.ones(m)
    slack_basic = slack0 >= 0
    basis[slack_basic] = nv + np.flatnonzero(slack_basic)
    basis[~slack_basic] = nv + m + np.arange(n_art)
    scale[slack_basic] = -1.0
    colstat[basis] = _BASIC

    A_full = np.zeros((m, n_all))
    A_full[:, :nv] = A
    A_full[np.arange(m), nv + np.arange(m)] = -1.0
    if n_art:
        A_full[art_rows, nv + m + np.arange(n_art)] = 1.0

    st = _State(W=scale[:, None] * A_full, xB=scale * (rhs - A @ start),
                basis=basis, colstat=colstat, nbval=nbval, lower=lower, upper=upper,
                max_iterations=max_iterations, bland_threshold=bland_threshold)

    def _failed(status):
        return LpSolution(status=status, values=None, objective_value=np.nan,
                          iterations=st.iterations)

    if n_art:
        cost1 = np.zeros(n_all)
        cost1[nv + m:] = -1.0
        out = _run_phase(st, cost1)
        if out == _PHASE_LIMIT:
            return _failed(LpStatus.ITERATION_LIMIT)
        if out == _PHASE_UNBOUNDED:
            raise RuntimeError("phase-1 objective cannot be unbounded; numerical failure")
        infeas = float(np.sum(st.xB[st.basis >= nv + m]))
        rhs_scale = 1.0 + float(np.max(np.abs(rhs)))
        if infeas > _FEAS_TOL * rhs_scale * max(1, m):
            return _failed(LpStatus.INFEASIBLE)
        _pivot_out_artificials(st, nv, m)
        st.upper[nv + m:] = 0.0

    cost2 = np.zeros(n_all)
    cost2[:nv] = c
    out = _run_phase(st, cost2)
    if out == _PHASE_LIMIT:
        return _failed(LpStatus.ITERATION_LIMIT)
    if out == _PHASE_UNBOUNDED:
        return _failed(LpStatus.UNBOUNDED)

    full = st.nbval.copy()
    full[st.basis] = st.xB
    values = full[:nv].copy()
    return LpSolution(status=LpStatus.OPTIMAL, values=values,
                      objective_value=float(c @ values), iterations=st.iterations,
                      basis=st.basis.copy(), col_status=st.colstat.copy(),
                      art_rows=art_rows.copy(), full_values=full)


def check_optimality(lp: LinearProgram, sol: LpSolution, tol: float = 1e-7) -> bool:
    """Independent primal/dual certificate for an OPTIMAL solution.

    Verifies, from scratch: the vertex data are internally consistent, the
    point is feasible, every nonbasic variable sits on its claimed bound, and
    the reduced costs derived from a fresh factorization of the basis admit
    no improving feasible direction.
    """
    if sol.status is not LpStatus.OPTIMAL or sol.basis is None:
        return False
    lp.validate()
    A = lp.constraint_matrix
    m, nv = A.shape
    art_rows = sol.art_rows if sol.art_rows is not None else np.array([], dtype=np.int64)
    n_art = art_rows.size
    n_all = nv + m + n_art
    x = sol.full_values
    stat = sol.col_status
    if x is None or stat is None or x.shape != (n_all,) or stat.shape != (n_all,):
        return False
    if sol.basis.shape != (m,) or np.any(stat[sol.basis] != _BASIC):
        return False
    if int(np.sum(stat == _BASIC)) != m:
        return False
    if sol.values is None or np.max(np.abs(sol.values - x[:nv])) > tol:
        return False

    A_full = np.zeros((m, n_all))
    A_full[:, :nv] = A
    A_full[np.arange(m), nv + np.arange(m)] = -1.0
    if n_art:
        A_full[art_rows, nv + m + np.arange(n_art)] = 1.0
    lower = np.concatenate([lp.lower, np.zeros(m), np.zeros(n_art)])
    upper = np.concatenate([lp.upper, np.full(m, np.inf), np.zeros(n_art)])

    scale = 1.0 + float(np.max(np.abs(lp.rhs)))
    if np.max(np.abs(A_full @ x - lp.rhs)) > tol * scale:
        return False
    if np.any(x < lower - tol) or np.any(x > upper + tol):
        return False
    if np.any(A @ x[:nv] < lp.rhs - tol * scale):
        return False
    at_low = stat == _AT_LOWER
    at_up = stat == _AT_UPPER
    if np.any(np.abs(x[at_low] - lower[at_low]) > tol):
        return False
    if np.any(np.abs(x[at_up] - upper[at_up]) > tol):
        return False

    cost = np.zeros(n_all)
    cost[:nv] = lp.objective
    B = A_full[:, sol.basis]
    try:
        y = np.linalg.solve(B.T, cost[sol.basis])
    except np.linalg.LinAlgError:
        return False
    r = cost - A_full.T @ y
    movable = (upper - lower) > tol
    if np.max(np.abs(r[sol.basis])) > tol:
        return False
    if np.any(r[at_low & movable] > tol):
        return False
    if np.any(r[at_up & movable] < -tol):
        return False
    free = stat == _FREE
    if np.any(np.abs(r[free]) > tol):
        return False
    if abs(float(lp.objective @ x[:nv]) - sol.objective_value) > tol * (1.0 + abs(sol.objective_value)):
        return False
    return True


def build_relaxation(sys: FeasibilitySystem) -> LinearProgram:
    """Box relaxation of the coupled sign/decision-size problem.

    Variables are (x_1, ..., x_{2Nt}, t); the objective maximizes t under
    lam_i @ x - t * (1 + lam_b_i) >= 0, -1 <= x_j <= 1 and t >= 0.  The
    undivided row form stays correct even where 1 + lam_b_i <= 0.
    """
    m = sys.num_rows
    d = 2 * sys.num_tx
    A = np.empty((m, d + 1))
    A[:, :d] = sys.lam
    A[:, d] = -sys.weights()
    c = np.zeros(d + 1)
    c[d] = 1.0
    lower = np.full(d + 1, -1.0)
    lower[d] = 0.0
    upper = np.full(d + 1, 1.0)
    upper[d] = np.inf
    return LinearProgram(objective=c, constraint_matrix=A, rhs=np.zeros(m),
                         lower=lower, upper=upper)


def format_lp(lp: LinearProgram) -> str:
    """Human-readable dump, one constraint per line, round-trippable floats."""
    nv = lp.objective.size
    names = [f"v{j}" for j in range(nv)]
    lines = ["maximize " + " + ".join(f"{float(c)!r}*{nm}" for c, nm in zip(lp.objective, names))]
    for a_row, b in zip(lp.constraint_matrix, lp.rhs):
        lhs = " + ".join(f"{float(a)!r}*{nm}" for a, nm in zip(a_row, names))
        lines.append(f"{lhs} >= {float(b)!r}")
    for nm, lo, up in zip(names, lp.lower, lp.upper):
        lines.append(f"{float(lo)!r} <= {nm} <= {float(up)!r}")
    return "\n".join(lines)
