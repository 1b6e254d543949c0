"""Pure-numpy fallback for the pair-scatter inner loop.

Accumulation order matters: np.bincount adds weights in input (pair)
order, and the low/high target passes are kept separate and combined
elementwise afterwards.  The compiled backend replicates exactly this
order, so both produce bitwise-identical results.
"""

import numpy as np


def coag_pair_scatter(kp, pair_dd, wlo_dk, whi_dk, klo, khi, mass_w, ii, jj, xi, n_cells):
    """Scatter pairwise merge rates onto target pivots.

    kp       - kernel values per pair
    pair_dd  - (1 - delta_ij/2) * width_i * width_j per pair
    wlo_dk   - low-target number weight / target width (0 for overflow)
    whi_dk   - high-target weight / width (0 for overflow)
    klo, khi - target cell indices (sentinel n_cells for overflow)
    mass_w   - aggregate size for overflow pairs, else 0
    ii, jj   - source cells, i <= j
    xi       - per-cell number densities

    Returns (gain density rate per cell, overflow mass rate).
    """
    r = kp * pair_dd * xi[ii] * xi[jj]
    lo = np.bincount(klo, weights=r * wlo_dk, minlength=n_cells + 1)
    hi = np.bincount(khi, weights=r * whi_dk, minlength=n_cells + 1)
    ovf = float(np.bincount(np.zeros(r.size, dtype=np.int64),
                            weights=r * mass_w, minlength=1)[0])
    return lo[:n_cells] + hi[:n_cells], ovf
