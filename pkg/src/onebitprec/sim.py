"""Monte Carlo symbol-error-rate harness.

Randomness is split into deterministic streams keyed by (seed, trial,
purpose[, snr index]): channel, message, CSI error, noise.  Every method in a
sweep therefore faces identical channel/message/noise realizations, adding or
removing methods never shifts anyone else's draws, and trials could be
executed in any order or in parallel without changing the result.

Precoders only ever see the (possibly corrupted) channel estimate; the true
channel carries the transmission.  The receiver is genie-aided with the
per-transmission decision size and power, which isolates precoder quality.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .constellation import QamSpec, nearest_symbol, nearest_symbols, qam_spec
from .feasibility import build_system
from .precoders import Method, PrecodeResult, PrecodingError, exhaustive_milp, fgreedy, qlp, qzf, zf

STREAM_CHANNEL, STREAM_MESSAGE, STREAM_CSI, STREAM_NOISE = range(4)

DEFAULT_METHODS = (Method.FGREEDY, Method.QLP, Method.QZF, Method.ZF)


def stream_rng(seed: int, trial: int, purpose: int, *extra: int) -> np.random.Generator:
    """Independent generator for one (trial, purpose[, index]) stream."""
    key = (trial, purpose) + tuple(extra)
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def sample_channel(num_users: int, num_tx: int, rng: np.random.Generator) -> np.ndarray:
    """Rayleigh channel: i.i.d. complex Gaussian entries, unit variance each."""
    sd = np.sqrt(0.5)
    return (rng.normal(0.0, sd, (num_users, num_tx))
            + 1j * rng.normal(0.0, sd, (num_users, num_tx)))


def corrupt_csi(H, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Mix the channel with an independent error matrix of the same statistics.

    Returns sqrt(1 - eps) * H + sqrt(eps) * E; eps = 0 reproduces H exactly,
    eps = 1 is pure error, and the per-entry variance is 1 for every eps.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    H = np.asarray(H, dtype=complex)
    if epsilon == 0.0:
        return H.copy()
    err = sample_channel(H.shape[0], H.shape[1], rng)
    return np.sqrt(1.0 - epsilon) * H + np.sqrt(epsilon) * err


def transmit(H_true, x, rho: float, rng: np.random.Generator,
             noiseless: bool = False) -> np.ndarray:
    """y = sqrt(rho) * H x + z with unit-variance complex Gaussian z per user."""
    H_true = np.asarray(H_true, dtype=complex)
    y = np.sqrt(rho) * (H_true @ np.asarray(x, dtype=complex))
    if not noiseless:
        num_users = H_true.shape[0]
        sd = np.sqrt(0.5)
        y = y + (rng.normal(0.0, sd, num_users) + 1j * rng.normal(0.0, sd, num_users))
    return y


def detect(y_k: complex, tau: float, rho: float, spec: QamSpec) -> np.ndarray:
    """Genie-aided minimum-distance detection of one receive value."""
    if tau <= 0:
        raise ValueError(f"decision size tau must be positive, got {tau}")
    if rho <= 0:
        raise ValueError(f"power rho must be positive, got {rho}")
    return nearest_symbol(y_k / np.sqrt(rho), tau, spec)


@dataclass(frozen=True)
class SimConfig:
    """A sweep: system dimensions, SNR grid, trial count, CSI error, seed."""

    nt: int = 64
    k: int = 8
    n: int = 2
    snr_db: tuple = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0)
    trials: int = 10_000
    epsilon: float = 0.0
    seed: int = 1
    methods: tuple = DEFAULT_METHODS
    noiseless: bool = False

    def validate(self):
        if not (self.nt >= self.k >= 1):
            raise ValueError(f"need nt >= k >= 1, got nt={self.nt}, k={self.k}")
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"need at least one trial, got {self.trials}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if len(self.snr_db) == 0:
            raise ValueError("SNR grid is empty")
        if len(self.methods) == 0:
            raise ValueError("method list is empty")
        for mth in self.methods:
            if not isinstance(mth, Method):
                raise ValueError(f"unknown method {mth!r}")


@dataclass
class SerStats:
    """Accumulated per-(method, snr) error counts and per-method summaries."""

    config: SimConfig
    errors: np.ndarray         # (num_methods, num_snr) int64
    objective_sum: np.ndarray  # (num_methods,)
    infeasible: np.ndarray     # (num_methods,) trials with objective <= 0
    wall_ms: np.ndarray        # (num_methods,) total precoding time

    @property
    def symbols_sent(self) -> int:
        return self.config.trials * self.config.k

    @property
    def ser(self) -> np.ndarray:
        return self.errors / float(self.symbols_sent)

    def rows(self, include_timing: bool = True) -> list:
        """CSV-ready dict rows, method-major, SNR ascending."""
        out = []
        cfg = self.config
        for mi, method in enumerate(cfg.methods):
            mean_obj = float(self.objective_sum[mi] / cfg.trials)
            wall = float(self.wall_ms[mi]) if include_timing else 0.0
            for si, snr in enumerate(cfg.snr_db):
                out.append({
                    "method": method.value,
                    "snr_db": float(snr),
                    "epsilon": float(cfg.epsilon),
                    "trials": int(cfg.trials),
                    "symbol_errors": int(self.errors[mi, si]),
                    "ser": float(self.errors[mi, si]) / self.symbols_sent,
                    "mean_objective": mean_obj,
                    "infeasible_count": int(self.infeasible[mi]),
                    "wall_time_ms": wall,
                })
        return out


def _precode(method: Method, H_seen, msg, spec, sys_seen) -> PrecodeResult:
    if method is Method.FGREEDY:
        return fgreedy(sys_seen)
    if method is Method.QLP:
        return qlp(sys_seen)
    if method is Method.QZF:
        return qzf(H_seen, msg, spec)
    if method is Method.ZF:
        return zf(H_seen, msg, spec)
    if method is Method.EXHAUSTIVE_MILP:
        return exhaustive_milp(sys_seen)
    raise ValueError(f"unknown method {method!r}")


def run_sweep(cfg: SimConfig) -> SerStats:
    """Run the Monte Carlo sweep described by ``cfg``.

    Per trial: draw channel and messages, corrupt the CSI, precode once per
    method on the estimate, then transmit over the true channel at every SNR
    with noise shared across methods.  A result with tau <= 0 cannot be
    detected against and counts as k symbol errors for that trial.
    """
    cfg.validate()
    spec = qam_spec(cfg.n)
    num_methods = len(cfg.methods)
    num_snr = len(cfg.snr_db)
    rho = 10.0 ** (np.asarray(cfg.snr_db, dtype=float) / 10.0)

    errors = np.zeros((num_methods, num_snr), dtype=np.int64)
    objective_sum = np.zeros(num_methods)
    infeasible = np.zeros(num_methods, dtype=np.int64)
    wall_ms = np.zeros(num_methods)

    for trial in range(cfg.trials):
        H = sample_channel(cfg.k, cfg.nt, stream_rng(cfg.seed, trial, STREAM_CHANNEL))
        msg = stream_rng(cfg.seed, trial, STREAM_MESSAGE).integers(0, 4, size=(cfg.k, cfg.n))
        if cfg.epsilon > 0.0:
            H_seen = corrupt_csi(H, cfg.epsilon, stream_rng(cfg.seed, trial, STREAM_CSI))
        else:
            H_seen = H
        sys_seen = build_system(H_seen, msg, spec)
        noise = None
        if not cfg.noiseless:
            sd = np.sqrt(0.5)
            noise = [
                (lambda g: g.normal(0.0, sd, cfg.k) + 1j * g.normal(0.0, sd, cfg.k))(
                    stream_rng(cfg.seed, trial, STREAM_NOISE, si))
                for si in range(num_snr)
            ]

        for mi, method in enumerate(cfg.methods):
            t0 = time.perf_counter()
            try:
                res = _precode(method, H_seen, msg, spec, sys_seen)
            except Exception as exc:
                raise PrecodingError(
                    f"{method.value} failed on trial {trial} (seed {cfg.seed}): {exc}",
                    lp_dump=getattr(exc, "lp_dump", None),
                ) from exc
            wall_ms[mi] += (time.perf_counter() - t0) * 1e3

            objective_sum[mi] += res.objective
            if res.objective <= 0.0:
                infeasible[mi] += 1

            y0 = H @ res.x
            for si in range(num_snr):
                if res.tau <= 0.0:
                    errors[mi, si] += cfg.k
                    continue
                y = np.sqrt(rho[si]) * y0
                if noise is not None:
                    y = y + noise[si]
                digits = nearest_symbols(y / np.sqrt(rho[si]), res.tau, spec)
                errors[mi, si] += int(np.sum(np.any(digits != msg, axis=1)))

    return SerStats(config=cfg, errors=errors, objective_sum=objective_sum,
                    infeasible=infeasible, wall_ms=wall_ms)
