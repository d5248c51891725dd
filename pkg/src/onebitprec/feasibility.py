"""Stacked margin system for multiuser QAM precoding.

For a channel H (K x Nt), per-user digit vectors and a shared decision size
tau, the noiseless receive point of every user lies strictly inside its
intended decision region iff all entries of

    margins = lam @ x_real - tau * lam_b

are positive, where x_real is the real expansion of the transmit vector.
Each margin is the signed distance of one user's receive point to one
bounding hyperplane of its region, in the nested-cone decomposition of the
constellation.  Rows are ordered user-major, then constellation level, then
(first, second) cone coordinate.

Construction and evaluation are pure; systems are freely shareable across
threads once built.
"""

from dataclasses import dataclass

import numpy as np

from .constellation import BASIS_SYMBOLS, QamSpec, as_digits, phi_expand, region_offsets


@dataclass(frozen=True)
class FeasibilitySystem:
    """The pair (lam, lam_b) plus its dimensions."""

    lam: np.ndarray    # (2 n K, 2 Nt)
    lam_b: np.ndarray  # (2 n K,)
    n: int
    num_users: int
    num_tx: int

    @property
    def num_rows(self) -> int:
        return 2 * self.n * self.num_users

    def weights(self) -> np.ndarray:
        """Per-row load 1 + lam_b of the decision size in the coupled problem."""
        return 1.0 + self.lam_b

    def nonpositive_weight_rows(self) -> np.ndarray:
        """Rows where 1 + lam_b <= 0.

        On these rows the textbook division by (1 + lam_b) would flip or
        destroy the inequality, so everything here keeps the undivided form
        lam_i @ x - t * (1 + lam_b_i) >= 0.  Exposed for diagnostics.
        """
        return np.flatnonzero(self.weights() <= 0.0)


def basis_matrix(i: int) -> np.ndarray:
    """diag(Re c_i, Im c_i) for basis symbol i: orthogonal, symmetric, self-inverse."""
    if not 0 <= int(i) <= 3:
        raise ValueError(f"basis matrix index must be in [0:3], got {i}")
    c = BASIS_SYMBOLS[int(i)]
    return np.diag([c.real, c.imag])


def bias_vector(digits) -> np.ndarray:
    """Real expansion of the per-level region shifts at unit tau, length 2n."""
    return region_offsets(as_digits(digits), 1.0).reshape(-1)


def build_system(H, message, spec: QamSpec) -> FeasibilitySystem:
    """Assemble the margin system for channel H and one message per user.

    ``message`` is a (K, n) array of quaternary digits.  The k-th user's block
    stacks n copies of the real-expanded channel row, each premultiplied by
    the level's sign matrix; the bias gets the same signs.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    msg = np.atleast_2d(np.asarray(message, dtype=np.int64))
    num_users, num_tx = H.shape
    n = spec.n
    if msg.shape != (num_users, n):
        raise ValueError(
            f"message shape {msg.shape} does not match {num_users} users of {n} digits"
        )
    if np.any((msg < 0) | (msg > 3)):
        raise ValueError("message digits must lie in [0:3]")

    Ht = phi_expand(H)  # (2K, 2Nt)
    rows = 2 * n * num_users
    lam = np.empty((rows, 2 * num_tx))
    lam_b = np.empty(rows)
    for k in range(num_users):
        c = BASIS_SYMBOLS[msg[k]]
        # diagonal of the user's block sign matrix: (Re c_l, Im c_l) per level
        dk = np.column_stack([c.real, c.imag]).reshape(-1)
        blk = slice(2 * n * k, 2 * n * (k + 1))
        lam[blk] = dk[:, None] * np.tile(Ht[2 * k:2 * k + 2], (n, 1))
        lam_b[blk] = dk * bias_vector(msg[k])
    return FeasibilitySystem(lam=lam, lam_b=lam_b, n=n, num_users=num_users, num_tx=num_tx)


def compute_margins(sys: FeasibilitySystem, x_real, tau: float) -> np.ndarray:
    """Evaluate lam @ x_real - tau * lam_b."""
    x = np.asarray(x_real, dtype=float)
    if x.shape != (2 * sys.num_tx,):
        raise ValueError(f"expected real transmit vector of length {2 * sys.num_tx}, got shape {x.shape}")
    if tau < 0:
        raise ValueError(f"decision size tau must be nonnegative, got {tau}")
    return sys.lam @ x - tau * sys.lam_b


def is_feasible(margins) -> bool:
    """Strict positivity of every margin."""
    return bool(np.min(margins) > 0.0)


def largest_tau(a, w) -> float:
    """Largest t >= 0 with a - t * w >= 0 componentwise; 0.0 when none exists.

    Rows with w > 0 cap t above, rows with w < 0 bound it below, rows with
    w == 0 must already be nonnegative.  Returns +inf only if no row caps t,
    which cannot happen for systems built here (level-1 rows have w == 1).
    """
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    zero = w == 0.0
    if np.any(a[zero] < 0.0):
        return 0.0
    pos = w > 0.0
    ub = float(np.min(a[pos] / w[pos])) if pos.any() else np.inf
    neg = w < 0.0
    lb = max(0.0, float(np.max(a[neg] / w[neg]))) if neg.any() else 0.0
    if ub < lb or ub <= 0.0:
        return 0.0
    return ub


def max_tau_for(sys: FeasibilitySystem, x_real) -> float:
    """Best decision size for a fixed transmit vector.

    Maximizes t >= 0 subject to lam_i @ x - t * (1 + lam_b_i) >= 0 for every
    row, i.e. all margins at tau = t stay at least t.  Returns 0.0 when no
    positive t qualifies.
    """
    x = np.asarray(x_real, dtype=float)
    return largest_tau(sys.lam @ x, sys.weights())
