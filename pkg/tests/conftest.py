"""Shared instance generators and oracles for the test suite."""

import itertools
from functools import lru_cache

import numpy as np

import onebitprec as ob
from onebitprec.sim import STREAM_CHANNEL, STREAM_MESSAGE, sample_channel, stream_rng


def suite_instance(seed, i, k, nt, n):
    """Deterministic (channel, message) pair, index i of a seeded suite."""
    H = sample_channel(k, nt, stream_rng(seed, i, STREAM_CHANNEL))
    msg = stream_rng(seed, i, STREAM_MESSAGE).integers(0, 4, (k, n))
    return H, msg


@lru_cache(maxsize=None)
def oracle_suite(seed=1, count=200):
    """Exhaustive-oracle comparison suite at nt=4, k=2, n=2 (computed once)."""
    spec = ob.qam_spec(2)
    rows = []
    for i in range(count):
        H, msg = suite_instance(seed, i, 2, 4, 2)
        sysm = ob.build_system(H, msg, spec)
        orc = ob.exhaustive_milp(sysm)
        sol = ob.solve(ob.build_relaxation(sysm))
        rows.append({
            "i": i, "H": H, "msg": msg, "sys": sysm,
            "t_star": orc.tau, "x_star": orc.x_real,
            "t_lp": float(sol.values[-1]),
            "fg": ob.fgreedy(sysm), "ql": ob.qlp(sysm), "qz": ob.qzf(H, msg, spec),
        })
    return rows


def random_lp(rng):
    """A small box-bounded LP; roughly a third of draws are infeasible."""
    nv = int(rng.integers(2, 7))
    m = int(rng.integers(1, 7))
    A = rng.standard_normal((m, nv))
    lower = rng.uniform(-2.0, -0.5, nv)
    upper = rng.uniform(0.5, 2.0, nv)
    rhs = rng.uniform(-3.0, 2.5, m)
    c = rng.standard_normal(nv)
    return ob.LinearProgram(objective=c, constraint_matrix=A, rhs=rhs,
                            lower=lower, upper=upper)


def brute_force_lp(lp, tol=1e-9):
    """Enumerate all candidate vertices; returns the best objective or None.

    Every vertex of a box-bounded feasible region is the solution of some
    square subsystem of active rows/bounds, so the maximum over feasible
    solutions of those subsystems is the LP optimum (None when no candidate
    is feasible, i.e. the LP is infeasible).
    """
    A, b = lp.constraint_matrix, lp.rhs
    lo, up, c = lp.lower, lp.upper, lp.objective
    m, nv = A.shape
    rows = [(A[i], b[i]) for i in range(m)]
    for j in range(nv):
        e = np.zeros(nv)
        e[j] = 1.0
        rows.append((e.copy(), lo[j]))
        rows.append((e.copy(), up[j]))
    best = None
    for combo in itertools.combinations(range(len(rows)), nv):
        M = np.array([rows[i][0] for i in combo])
        q = np.array([rows[i][1] for i in combo])
        try:
            v = np.linalg.solve(M, q)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(v)) or np.max(np.abs(M @ v - q)) > 1e-7:
            continue
        if np.any(A @ v < b - tol) or np.any(v < lo - tol) or np.any(v > up + tol):
            continue
        val = float(c @ v)
        if best is None or val > best:
            best = val
    return best
