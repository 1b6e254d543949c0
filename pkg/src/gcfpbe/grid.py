"""Finite-volume size partition of [0, U_max] and the pair-allocation
tables of the fixed-pivot merge discretization.

The allocation distributes each aggregate size x_i + x_j to the two
neighboring pivots so that particle number and mass are preserved
simultaneously; pairs landing past the last pivot are flagged as overflow
and their mass is routed to a ledger instead of a cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GEOMETRIC_RATIO_DEFAULT = 2.0 ** (1.0 / 3.0)


@dataclass(frozen=True)
class SizeGrid:
    """Cell edges e_0 = 0 < e_1 < ... < e_N = u_max with midpoint pivots.

    Attributes:
    edges - array of N+1 edges, edges[0] == 0.
    pivots - cell midpoints, strictly increasing.
    widths - cell widths, all positive.
    scheme - "uniform" or "geometric".
    ratio - width ratio for geometric grids, None otherwise.
    """

    edges: np.ndarray
    scheme: str
    ratio: float | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if edges.ndim != 1 or edges.size < 3:
            raise ValueError("grid: need at least 2 cells")
        if edges[0] != 0.0:
            raise ValueError("grid: first edge must be 0")
        if np.any(np.diff(edges) <= 0.0):
            raise ValueError("grid: edges must be strictly increasing")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "pivots", 0.5 * (edges[:-1] + edges[1:]))
        object.__setattr__(self, "widths", np.diff(edges))

    @property
    def n_cells(self):
        return self.edges.size - 1

    @property
    def u_max(self):
        return float(self.edges[-1])

    def locate(self, u):
        """Index i of the cell with e_i < u <= e_{i+1} (0-based)."""
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0.0) or np.any(u > self.u_max):
            raise ValueError("locate: size must lie in (0, u_max]")
        return np.searchsorted(self.edges, u, side="left") - 1

    def same_as(self, other):
        return (self.n_cells == other.n_cells
                and np.array_equal(self.edges, other.edges))


def build_grid(u_max, n_cells, scheme="geometric", ratio=None) -> SizeGrid:
    """Build a uniform or geometric partition of [0, u_max].

    Geometric grids solve the first width from
    u_max = delta0 * (ratio^N - 1) / (ratio - 1); the default ratio
    doubles cell volume every three cells.
    """
    if not u_max > 0.0:
        raise ValueError(f"grid: u_max must be > 0, got {u_max}")
    if n_cells < 2:
        raise ValueError(f"grid: need at least 2 cells, got {n_cells}")
    if scheme == "uniform":
        edges = np.linspace(0.0, u_max, n_cells + 1)
        return SizeGrid(edges, "uniform")
    if scheme == "geometric":
        rho = GEOMETRIC_RATIO_DEFAULT if ratio is None else float(ratio)
        if not rho > 1.0:
            raise ValueError(f"grid: geometric ratio must be > 1, got {rho}")
        delta0 = u_max * (rho - 1.0) / (rho ** n_cells - 1.0)
        widths = delta0 * rho ** np.arange(n_cells)
        edges = np.concatenate(([0.0], np.cumsum(widths)))
        edges[-1] = u_max  # kill cumulative roundoff at the top edge
        return SizeGrid(edges, "geometric", rho)
    raise ValueError(f"grid: unknown scheme {scheme!r}")


@dataclass(frozen=True)
class PairAllocation:
    """Fixed-pivot split tables for every unordered cell pair i <= j.

    Flat arrays indexed by pair number m:
    ii, jj - source cell indices (i <= j).
    klo, khi - target pivot indices; both equal n_cells for overflow pairs.
    w_lo, w_hi - number weights solving the two-moment preservation system
                 w_lo + w_hi = 1,  w_lo*x_klo + w_hi*x_khi = x_i + x_j.
    overflow - pairs with x_i + x_j beyond the last pivot.
    smass - aggregate size x_i + x_j.

    Solver-ready derived arrays (sentinel slot n_cells holds zeros):
    pair_dd - (1 - delta_ij/2) * width_i * width_j.
    wlo_dk, whi_dk - number weights divided by the target cell width.
    mass_w - smass for overflow pairs, 0 otherwise.
    """

    grid: SizeGrid
    ii: np.ndarray
    jj: np.ndarray
    klo: np.ndarray
    khi: np.ndarray
    w_lo: np.ndarray
    w_hi: np.ndarray
    overflow: np.ndarray
    smass: np.ndarray
    pair_dd: np.ndarray
    wlo_dk: np.ndarray
    whi_dk: np.ndarray
    mass_w: np.ndarray

    @property
    def n_pairs(self):
        return self.ii.size

    def lookup(self, i, j):
        """(k, w_lo, w_hi, overflow) for the unordered pair {i, j}."""
        i, j = (i, j) if i <= j else (j, i)
        n = self.grid.n_cells
        m = i * n - i * (i - 1) // 2 + (j - i)
        return (int(self.klo[m]), float(self.w_lo[m]), float(self.w_hi[m]),
                bool(self.overflow[m]))


def build_pair_allocation(grid: SizeGrid) -> PairAllocation:
    """Precompute target indices and preservation weights for all pairs."""
    x = grid.pivots
    dx = grid.widths
    n = grid.n_cells
    ii, jj = np.triu_indices(n)
    s = x[ii] + x[jj]

    # largest k with x_k <= s; s >= 2*x_0 > x_0 so k >= 0 always
    k = np.searchsorted(x, s, side="right") - 1
    over = s > x[-1]
    k = np.where(over, n - 1, k)

    khi = np.minimum(k + 1, n - 1)
    gap = np.where(khi > k, x[khi] - x[k], 1.0)
    w_hi = np.where(khi > k, (s - x[k]) / gap, 0.0)
    w_lo = 1.0 - w_hi

    klo_s = np.where(over, n, k).astype(np.int64)
    khi_s = np.where(over, n, khi).astype(np.int64)
    dk = np.concatenate((dx, [1.0]))  # sentinel width, weights there are 0
    w_lo_s = np.where(over, 0.0, w_lo)
    w_hi_s = np.where(over, 0.0, w_hi)

    fac = np.where(ii == jj, 0.5, 1.0)
    return PairAllocation(
        grid=grid,
        ii=ii.astype(np.int64), jj=jj.astype(np.int64),
        klo=klo_s, khi=khi_s,
        w_lo=w_lo_s, w_hi=w_hi_s,
        overflow=over, smass=s,
        pair_dd=fac * dx[ii] * dx[jj],
        wlo_dk=w_lo_s / dk[klo_s],
        whi_dk=w_hi_s / dk[khi_s],
        mass_w=np.where(over, s, 0.0),
    )
