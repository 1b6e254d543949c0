# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pair-scatter inner loop.

Mirrors _pair_numpy.coag_pair_scatter operation for operation: per-pair
rate r = ((kp * dd) * xi[i]) * xi[j], low and high targets accumulated in
separate arrays in pair order, overflow mass accumulated in pair order.
This keeps the result bitwise identical to the numpy fallback.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def coag_pair_scatter(double[::1] kp, double[::1] pair_dd,
                      double[::1] wlo_dk, double[::1] whi_dk,
                      long[::1] klo, long[::1] khi,
                      double[::1] mass_w, long[::1] ii, long[::1] jj,
                      double[::1] xi, int n_cells):
    cdef Py_ssize_t m, n = kp.shape[0]
    cdef cnp.ndarray[double, ndim=1] lo_arr = np.zeros(n_cells + 1)
    cdef cnp.ndarray[double, ndim=1] hi_arr = np.zeros(n_cells + 1)
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef double r, ovf = 0.0
    for m in range(n):
        r = ((kp[m] * pair_dd[m]) * xi[ii[m]]) * xi[jj[m]]
        lo[klo[m]] += r * wlo_dk[m]
        hi[khi[m]] += r * whi_dk[m]
        ovf += r * mass_w[m]
    return lo_arr[:n_cells] + hi_arr[:n_cells], ovf
