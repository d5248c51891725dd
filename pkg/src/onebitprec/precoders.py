"""Transmit-vector construction strategies.

* ``fgreedy``  -- box-relaxation LP, then one greedy sign pass per coordinate
                  (the proposed method).
* ``qlp``      -- plain sign quantization of the LP point.
* ``zf``       -- infinite-resolution zero forcing, power-matched to the 1-bit
                  vectors (|x|^2 = 2 Nt).
* ``qzf``      -- sign quantization of the ZF point.
* ``exhaustive_milp`` -- exact enumeration over all sign vectors, usable up
                  to 2*Nt <= 24; the ground truth for the coupled problem.

Every result records the real sign/amplitude vector, the decision size tau it
was produced with, and the worst-case margin at that pair, evaluated on the
system the precoder saw.  All precoders are pure functions, safe to call from
parallel trials.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import lp as lp_mod
from ._kernels import greedy_coordinate_pass
from .constellation import QamSpec, g_inv, g_map, symbol_from_index
from .feasibility import FeasibilitySystem, build_system, compute_margins, max_tau_for

_ENUM_BIT_LIMIT = 24


class Method(enum.Enum):
    FGREEDY = "fgreedy"
    QLP = "qlp"
    QZF = "qzf"
    ZF = "zf"
    EXHAUSTIVE_MILP = "milp"


class PrecodingError(RuntimeError):
    """Raised when a precoder cannot produce a result; carries an LP dump."""

    def __init__(self, message: str, lp_dump: str | None = None):
        super().__init__(message)
        self.lp_dump = lp_dump


@dataclass(frozen=True)
class PrecodeResult:
    x: np.ndarray       # complex transmit vector, length Nt
    x_real: np.ndarray  # its real expansion, length 2 Nt
    tau: float
    objective: float    # min margin at (x_real, tau)
    quantized: bool     # every entry of x_real is exactly +-1
    method: Method


def _solve_relaxation(sys: FeasibilitySystem):
    prob = lp_mod.build_relaxation(sys)
    sol = lp_mod.solve(prob)
    if sol.status is not lp_mod.LpStatus.OPTIMAL:
        raise PrecodingError(
            f"box relaxation ended with status {sol.status.value}",
            lp_dump=lp_mod.format_lp(prob),
        )
    return sol


def _finish(sys, x_real, tau, quantized, method):
    objective = float(np.min(compute_margins(sys, x_real, tau)))
    return PrecodeResult(x=g_inv(x_real), x_real=x_real, tau=float(tau),
                         objective=objective, quantized=quantized, method=method)


def fgreedy(sys: FeasibilitySystem) -> PrecodeResult:
    """Greedy sign refinement of the LP point with the decision size frozen.

    The LP optimum fixes tau once; a single pass then visits the coordinates
    in natural order and fixes each to the sign leaving the larger minimum
    margin (ties go to +1).  The per-step invariant -- the chosen sign never
    scores below the rejected one -- is enforced on every call.
    """
    sol = _solve_relaxation(sys)
    x = np.ascontiguousarray(sol.values[:-1])
    tau = max(float(sol.values[-1]), 0.0)
    lam_t = np.ascontiguousarray(sys.lam.T)
    margins = sys.lam @ x - tau * sys.lam_b
    chosen, rejected = greedy_coordinate_pass(lam_t, margins, x)
    if not np.all(chosen >= rejected):
        raise RuntimeError("sign refinement selected a dominated candidate")
    return _finish(sys, x, tau, True, Method.FGREEDY)


def qlp(sys: FeasibilitySystem) -> PrecodeResult:
    """Sign quantization of the LP point at the LP's decision size."""
    sol = _solve_relaxation(sys)
    tau = max(float(sol.values[-1]), 0.0)
    x = np.where(sol.values[:-1] >= 0.0, 1.0, -1.0)
    return _finish(sys, x, tau, True, Method.QLP)


def _zf_point(H, message, spec: QamSpec, tau_ref: float):
    """Unquantized ZF vector scaled to |x|^2 = 2 Nt, plus its decision size."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    msg = np.atleast_2d(np.asarray(message, dtype=np.int64))
    num_users, num_tx = H.shape
    if tau_ref <= 0:
        raise ValueError(f"reference decision size must be positive, got {tau_ref}")
    target = np.array([symbol_from_index(msg[k], tau_ref) for k in range(num_users)])
    gram = H @ H.conj().T
    try:
        x_raw = H.conj().T @ np.linalg.solve(gram, target)
    except np.linalg.LinAlgError as exc:
        raise ValueError("channel matrix is rank deficient") from exc
    scale = np.sqrt(2.0 * num_tx) / np.linalg.norm(x_raw)
    if not np.isfinite(scale):
        raise ValueError("channel matrix is rank deficient")
    return scale * x_raw, float(tau_ref * scale)


def zf(H, message, spec: QamSpec, tau_ref: float = 1.0) -> PrecodeResult:
    """Infinite-resolution zero forcing, the lower-bound baseline.

    The pseudoinverse steers each user exactly onto its intended point; the
    whole vector is then rescaled so its instantaneous power matches the
    1-bit vectors' (|x|^2 = 2 Nt), and the reported decision size absorbs the
    same factor so detection stays consistent.  The result is invariant to
    ``tau_ref``.
    """
    x, tau = _zf_point(H, message, spec, tau_ref)
    sys = build_system(H, message, spec)
    x_real = g_map(x)
    objective = float(np.min(compute_margins(sys, x_real, tau)))
    return PrecodeResult(x=x, x_real=x_real, tau=tau, objective=objective,
                         quantized=False, method=Method.ZF)


def qzf(H, message, spec: QamSpec, tau_ref: float = 1.0) -> PrecodeResult:
    """Entrywise signs of the ZF vector, with the best consistent decision size.

    tau is chosen as the largest value the quantized point still supports
    (zero when the signs are infeasible at every positive size; the harness
    then counts the whole trial as errored).
    """
    x_zf, _ = _zf_point(H, message, spec, tau_ref)
    x_real = np.where(g_map(x_zf) >= 0.0, 1.0, -1.0)
    sys = build_system(H, message, spec)
    tau = max_tau_for(sys, x_real)
    return _finish(sys, x_real, tau, True, Method.QZF)


def exhaustive_milp(sys: FeasibilitySystem, chunk_size: int = 1 << 14) -> PrecodeResult:
    """Exact maximizer of the coupled decision-size problem by enumeration.

    Scans all 2^(2 Nt) sign vectors in lexicographic order (-1 before +1) and
    keeps the first one attaining the largest supported decision size, so
    ties resolve to the lexicographically smallest vector.
    """
    d = 2 * sys.num_tx
    if d > _ENUM_BIT_LIMIT:
        raise ValueError(f"enumeration is limited to 2*Nt <= {_ENUM_BIT_LIMIT}, got {d}")
    w = sys.weights()
    pos = w > 0.0
    neg = w < 0.0
    zero = w == 0.0
    lam_t = sys.lam.T  # (d, m)
    shifts = np.arange(d - 1, -1, -1, dtype=np.int64)

    total = 1 << d
    best_t = -1.0
    best_code = 0
    for start in range(0, total, chunk_size):
        codes = np.arange(start, min(start + chunk_size, total), dtype=np.int64)
        signs = (((codes[:, None] >> shifts) & 1) * 2 - 1).astype(float)
        a = signs @ lam_t  # (chunk, m)
        ub = np.min(a[:, pos] / w[pos], axis=1) if pos.any() else np.full(codes.size, np.inf)
        lb = np.maximum(np.max(a[:, neg] / w[neg], axis=1), 0.0) if neg.any() else 0.0
        ok = np.all(a[:, zero] >= 0.0, axis=1) if zero.any() else True
        t = np.where(ok & (ub >= lb) & (ub > 0.0), ub, 0.0)
        k = int(np.argmax(t))
        if t[k] > best_t:
            best_t = float(t[k])
            best_code = int(codes[k])

    x_real = (((best_code >> shifts) & 1) * 2 - 1).astype(float)
    return _finish(sys, x_real, max(best_t, 0.0), True, Method.EXHAUSTIVE_MILP)
