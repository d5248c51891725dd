# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled sign-refinement inner loop.

Mirror of ``_greedy_py.greedy_coordinate_pass`` with identical arithmetic
(explicit multiply-then-add, compiled with contraction disabled), so the two
backends are bit-identical.
"""

import numpy as np

from libc.math cimport INFINITY


def greedy_coordinate_pass(double[:, ::1] lam_t, double[::1] margins, double[::1] x):
    """See the fallback in ``_greedy_py`` for the contract."""
    cdef Py_ssize_t d = lam_t.shape[0]
    cdef Py_ssize_t m = lam_t.shape[1]
    if margins.shape[0] != m or x.shape[0] != d:
        raise ValueError("kernel input shapes are inconsistent")

    min_chosen_arr = np.empty(d)
    min_rejected_arr = np.empty(d)
    cand_minus_arr = np.empty(m)
    cand_plus_arr = np.empty(m)
    cdef double[::1] min_chosen = min_chosen_arr
    cdef double[::1] min_rejected = min_rejected_arr
    cdef double[::1] cand_minus = cand_minus_arr
    cdef double[::1] cand_plus = cand_plus_arr

    cdef Py_ssize_t i, r
    cdef double v, dv_minus, dv_plus, lv, t_minus, t_plus, a, b, lo_minus, lo_plus
    for i in range(d):
        v = x[i]
        dv_minus = -1.0 - v
        dv_plus = 1.0 - v
        lo_minus = INFINITY
        lo_plus = INFINITY
        for r in range(m):
            lv = lam_t[i, r]
            t_minus = lv * dv_minus
            a = margins[r] + t_minus
            t_plus = lv * dv_plus
            b = margins[r] + t_plus
            cand_minus[r] = a
            cand_plus[r] = b
            if a < lo_minus:
                lo_minus = a
            if b < lo_plus:
                lo_plus = b
        if lo_plus >= lo_minus:
            x[i] = 1.0
            for r in range(m):
                margins[r] = cand_plus[r]
            min_chosen[i] = lo_plus
            min_rejected[i] = lo_minus
        else:
            x[i] = -1.0
            for r in range(m):
                margins[r] = cand_minus[r]
            min_chosen[i] = lo_minus
            min_rejected[i] = lo_plus
    return min_chosen_arr, min_rejected_arr
