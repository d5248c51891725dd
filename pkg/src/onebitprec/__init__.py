"""1-bit DAC transmit-signal construction for the multiuser MISO downlink.

Feasibility-condition construction for square QAM, a bounded-variable simplex
LP solver, greedy sign refinement, baseline precoders, an exact enumeration
oracle for small systems, and a deterministic Monte Carlo SER harness.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .constellation import (BASIS_SYMBOLS, QamSpec, basis_symbol, g_inv, g_map,
                            nearest_symbol, nearest_symbols, phi_expand, qam_spec,
                            region_decomposition_check, symbol_from_index)
from .feasibility import (FeasibilitySystem, basis_matrix, bias_vector, build_system,
                          compute_margins, is_feasible, max_tau_for)
from .lp import (LinearProgram, LpSolution, LpStatus, build_relaxation,
                 check_optimality, format_lp, solve)
from .precoders import (Method, PrecodeResult, PrecodingError, exhaustive_milp,
                        fgreedy, qlp, qzf, zf)
from .sim import (SerStats, SimConfig, corrupt_csi, detect, run_sweep,
                  sample_channel, transmit)

__all__ = [
    "BASIS_SYMBOLS", "FeasibilitySystem", "KERNEL_BACKEND", "LinearProgram",
    "LpSolution", "LpStatus", "Method", "PrecodeResult", "PrecodingError",
    "QamSpec", "SerStats", "SimConfig", "__version__", "basis_matrix",
    "basis_symbol", "bias_vector", "build_relaxation", "build_system",
    "check_optimality", "compute_margins", "corrupt_csi", "detect",
    "exhaustive_milp", "fgreedy", "format_lp", "g_inv", "g_map", "is_feasible",
    "max_tau_for", "nearest_symbol", "nearest_symbols", "phi_expand", "qam_spec",
    "qlp", "qzf", "region_decomposition_check", "run_sweep", "sample_channel",
    "solve", "symbol_from_index", "transmit", "zf",
]
