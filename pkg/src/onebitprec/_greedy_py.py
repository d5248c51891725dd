"""Pure-numpy fallback for the sign-refinement inner loop.

Must stay arithmetically identical to the compiled kernel in
``_greedy_cy.pyx``: same operation order, no fused multiply-adds, so both
backends produce bit-identical results.
"""

import numpy as np


def greedy_coordinate_pass(lam_t, margins, x):
    """One full coordinate pass fixing every entry of x to -1 or +1.

    lam_t    : (d, m) transposed margin matrix, C-contiguous float64
    margins  : (m,) margins at the incoming x; updated in place
    x        : (d,) incoming point; updated in place to the chosen signs

    For each coordinate, both candidate signs are scored by the minimum
    margin they leave; the larger wins, ties go to +1.  Returns the per-step
    (chosen, rejected) minima so callers can assert the step invariant.
    """
    d, m = lam_t.shape
    if margins.shape != (m,) or x.shape != (d,):
        raise ValueError("kernel input shapes are inconsistent")
    min_chosen = np.empty(d)
    min_rejected = np.empty(d)
    for i in range(d):
        col = lam_t[i]
        v = x[i]
        cand_minus = margins + col * (-1.0 - v)
        cand_plus = margins + col * (1.0 - v)
        lo_minus = cand_minus.min()
        lo_plus = cand_plus.min()
        if lo_plus >= lo_minus:
            x[i] = 1.0
            margins[:] = cand_plus
            min_chosen[i] = lo_plus
            min_rejected[i] = lo_minus
        else:
            x[i] = -1.0
            margins[:] = cand_minus
            min_chosen[i] = lo_minus
            min_rejected[i] = lo_plus
    return min_chosen, min_rejected
