"""Discrete right-hand side of the evolution equation on a size grid:
pairwise merging (fixed-pivot, number- and mass-preserving), breakup with
closed-form daughter integrals and an exact mass-correction column,
first-order upwind transport with renewal inflow at the left boundary,
and pointwise death.  Also the cutoff map producing the truncated
coefficient families used by the convergence experiment.

Mass bookkeeping is exact by construction: merge events past the last
pivot and transport through the top edge feed an overflow rate instead of
silently vanishing, and the spurious mass carried by renewal inflow into
the first cell is reported separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .coefficients import (CoagulationKernel, CoefficientSet, DaughterDistribution,
                           FragmentationRate, Rate)
from .grid import PairAllocation, SizeGrid, build_pair_allocation


@dataclass
class StateVector:
    """Time stamp plus per-cell number-density averages.

    overflow_mass accumulates mass that left the domain past u_max.
    """

    t: float
    xi: np.ndarray
    grid: SizeGrid
    overflow_mass: float = 0.0

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi.shape != (self.grid.n_cells,):
            raise ValueError("state: xi must have one entry per cell")
        if not np.all(np.isfinite(xi)):
            raise ValueError("state: xi must be finite")
        if np.any(xi < 0.0):
            raise ValueError("state: xi must be nonnegative")
        self.xi = xi

    def copy(self):
        return StateVector(self.t, self.xi.copy(), self.grid, self.overflow_mass)


@dataclass
class RhsTerms:
    """Per-cell rate breakdown of one right-hand-side evaluation.

    Gain-type arrays are nonnegative, loss-type arrays nonpositive.
    renewal_inflow is zero except in the first cell.  loss_coeff holds the
    per-cell total loss-rate coefficient used by the stable-step bound.
    """

    coag_gain: np.ndarray
    coag_loss: np.ndarray
    frag_gain: np.ndarray
    frag_loss: np.ndarray
    growth_div: np.ndarray
    death: np.ndarray
    renewal_inflow: np.ndarray
    overflow_mass_rate: float
    # ledger rates and stability diagnostics
    coag_overflow_mass_rate: float = 0.0
    growth_outflow_mass_rate: float = 0.0
    growth_mass_gain_rate: float = 0.0
    renewal_number_rate: float = 0.0
    renewal_mass_rate: float = 0.0
    death_number_rate: float = 0.0
    death_mass_rate: float = 0.0
    loss_coeff: np.ndarray | None = None

    def total(self):
        return (self.coag_gain + self.coag_loss + self.frag_gain + self.frag_loss
                + self.growth_div + self.death + self.renewal_inflow)


def _zeros_like_grid(grid):
    return np.zeros(grid.n_cells)


def empty_terms(grid) -> RhsTerms:
    z = _zeros_like_grid(grid)
    return RhsTerms(z.copy(), z.copy(), z.copy(), z.copy(), z.copy(), z.copy(),
                    z.copy(), 0.0, loss_coeff=z.copy())


# ---------------------------------------------------------------------------
# Precomputed tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorTables:
    """Everything precomputable from (grid, coefficients).

    kernel_matrix is symmetric K(x_i, x_j); kernel_pair its values on the
    unordered pair list.  frag_gain_matrix column j redistributes the
    daughters of parent pivot x_j; the diagonal carries a correction so
    each column's pivot-weighted mass equals x_j exactly.  Diagonal
    entries may turn negative for strongly singular daughter densities;
    the negative part is treated as extra loss so gains stay nonnegative.
    """

    grid: SizeGrid
    coeffs: CoefficientSet
    alloc: PairAllocation
    kernel_matrix: np.ndarray
    kernel_pair: np.ndarray
    frag_gain_matrix: np.ndarray
    frag_diag_neg: np.ndarray  # max(0, -B_jj) per cell
    alpha_piv: np.ndarray
    mu_piv: np.ndarray
    a_piv: np.ndarray
    g_right_edges: np.ndarray  # growth speed at each cell's right edge


def _daughter_matrix(grid: SizeGrid, daughter: DaughterDistribution):
    """Column j: daughter-number density received by each cell from a
    breakup at parent pivot x_j, with the column mass made exact by
    adjusting the parent's own entry."""
    n = grid.n_cells
    x = grid.pivots
    e = grid.edges
    B = np.zeros((n, n))
    for j in range(n):
        lim = x[j]
        lo = e[: j + 1]
        hi = np.minimum(e[1: j + 2], lim)
        num = daughter.number_integral(lo, hi, lim)
        mass_alloc = float(np.dot(x[: j + 1], num))
        num[j] += (lim - mass_alloc) / lim
        B[: j + 1, j] = num / grid.widths[: j + 1]
    return B


def build_tables(grid: SizeGrid, coeffs: CoefficientSet,
                 alloc: PairAllocation | None = None) -> OperatorTables:
    if alloc is None:
        alloc = build_pair_allocation(grid)
    if not alloc.grid.same_as(grid):
        raise ValueError("tables: pair allocation built for a different grid")
    x = grid.pivots
    X, Y = np.meshgrid(x, x, indexing="ij")
    kernel_matrix = np.asarray(coeffs.coag(X, Y), dtype=float)
    kernel_pair = kernel_matrix[alloc.ii, alloc.jj]
    B = _daughter_matrix(grid, coeffs.daughter)
    diag = np.diagonal(B).copy()
    frag_diag_neg = np.maximum(0.0, -diag)
    # keep only the nonnegative part in the gain matrix
    Bpos = B.copy()
    np.fill_diagonal(Bpos, np.maximum(diag, 0.0))
    return OperatorTables(
        grid=grid, coeffs=coeffs, alloc=alloc,
        kernel_matrix=kernel_matrix, kernel_pair=kernel_pair,
        frag_gain_matrix=Bpos, frag_diag_neg=frag_diag_neg,
        alpha_piv=np.asarray(coeffs.frag(x), dtype=float),
        mu_piv=np.asarray(coeffs.death(x), dtype=float),
        a_piv=np.asarray(coeffs.birth(x), dtype=float),
        g_right_edges=np.asarray(coeffs.growth(grid.edges[1:]), dtype=float),
    )


def _check_grid(state: StateVector, tables: OperatorTables):
    if not state.grid.same_as(tables.grid):
        raise ValueError("rhs: state grid does not match operator tables")


# ---------------------------------------------------------------------------
# Individual operators
# ---------------------------------------------------------------------------

def coagulation_rhs(state: StateVector, tables: OperatorTables,
                    out: RhsTerms | None = None) -> RhsTerms:
    """Merge terms: loss_i = xi_i * sum_j K_ij xi_j w_j, gain via the
    fixed-pivot split; overflow pairs route their mass rate to the
    overflow ledger."""
    _check_grid(state, tables)
    grid, alloc = tables.grid, tables.alloc
    terms = out if out is not None else empty_terms(grid)
    xi = state.xi
    w = xi * grid.widths
    loss_coef = tables.kernel_matrix @ w
    terms.coag_loss = -xi * loss_coef
    gain, ovf = backend.coag_pair_scatter(
        tables.kernel_pair, alloc.pair_dd, alloc.wlo_dk, alloc.whi_dk,
        alloc.klo, alloc.khi, alloc.mass_w, alloc.ii, alloc.jj, xi,
        grid.n_cells)
    terms.coag_gain = gain
    terms.coag_overflow_mass_rate = ovf
    terms.overflow_mass_rate += ovf
    if terms.loss_coeff is None:
        terms.loss_coeff = np.zeros(grid.n_cells)
    terms.loss_coeff += loss_coef
    return terms


def fragmentation_rhs(state: StateVector, tables: OperatorTables,
                      out: RhsTerms | None = None) -> RhsTerms:
    """Breakup terms: loss_i = alpha(x_i) xi_i plus any negative diagonal
    correction; gain_i = sum_{j>=i} alpha(x_j) xi_j w_j B_ij."""
    _check_grid(state, tables)
    grid = tables.grid
    terms = out if out is not None else empty_terms(grid)
    xi = state.xi
    src = tables.alpha_piv * xi * grid.widths
    terms.frag_gain = tables.frag_gain_matrix @ src
    terms.frag_loss = -tables.alpha_piv * xi - tables.frag_diag_neg * src
    if terms.loss_coeff is None:
        terms.loss_coeff = np.zeros(grid.n_cells)
    terms.loss_coeff += tables.alpha_piv * (1.0 + tables.frag_diag_neg * grid.widths)
    return terms


def growth_rhs(state: StateVector, tables: OperatorTables,
               out: RhsTerms | None = None) -> RhsTerms:
    """First-order upwind transport with renewal inflow.

    Interior flux over a cell's right edge is g(edge) * xi_cell; the
    boundary inflow is the birth integral sum_j a(x_j) xi_j w_j entering
    the first cell; the top-edge outflow leaves the domain with mass
    weight u_max.  The discrete mass gained from transport (each edge
    crossing moves a particle from one pivot to the next) is reported for
    the run ledgers.
    """
    _check_grid(state, tables)
    grid = tables.grid
    terms = out if out is not None else empty_terms(grid)
    xi = state.xi
    dx = grid.widths
    x = grid.pivots
    flux = tables.g_right_edges * xi
    inflow = np.concatenate(([0.0], flux[:-1]))
    terms.growth_div = (inflow - flux) / dx

    renewal_flux = float(np.dot(tables.a_piv, xi * dx))
    terms.renewal_inflow = np.zeros(grid.n_cells)
    terms.renewal_inflow[0] = renewal_flux / dx[0]
    terms.renewal_number_rate = renewal_flux
    terms.renewal_mass_rate = x[0] * renewal_flux

    out_rate = flux[-1]
    terms.growth_outflow_mass_rate = grid.u_max * out_rate
    terms.overflow_mass_rate += terms.growth_outflow_mass_rate
    terms.growth_mass_gain_rate = (float(np.dot(flux[:-1], np.diff(x)))
                                   + out_rate * (grid.u_max - x[-1]))
    if terms.loss_coeff is None:
        terms.loss_coeff = np.zeros(grid.n_cells)
    terms.loss_coeff += tables.g_right_edges / dx
    return terms


def death_rhs(state: StateVector, tables: OperatorTables,
              out: RhsTerms | None = None) -> RhsTerms:
    """Pointwise removal at rate mu(x_i)."""
    _check_grid(state, tables)
    grid = tables.grid
    terms = out if out is not None else empty_terms(grid)
    xi = state.xi
    terms.death = -tables.mu_piv * xi
    removed = tables.mu_piv * xi * grid.widths
    terms.death_number_rate = float(np.sum(removed))
    terms.death_mass_rate = float(np.dot(grid.pivots, removed))
    if terms.loss_coeff is None:
        terms.loss_coeff = np.zeros(grid.n_cells)
    terms.loss_coeff += tables.mu_piv
    return terms


def total_rhs(state: StateVector, tables: OperatorTables) -> RhsTerms:
    """All four operators assembled with a shared per-term breakdown."""
    terms = empty_terms(tables.grid)
    coagulation_rhs(state, tables, terms)
    fragmentation_rhs(state, tables, terms)
    growth_rhs(state, tables, terms)
    death_rhs(state, tables, terms)
    return terms


# ---------------------------------------------------------------------------
# Truncated coefficient families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedRate(Rate):
    """base(u) on [0, cutoff], zero above."""

    kind = "truncated"
    base: Rate = None
    cutoff: float = 1.0

    def _eval(self, u):
        return np.where(np.asarray(u, dtype=float) <= self.cutoff, self.base(u), 0.0)

    def linear_bound(self):
        return self.base.linear_bound()


@dataclass(frozen=True)
class ShiftedRate(Rate):
    """base(u) + shift, used for the growth floor of the cutoff family."""

    kind = "shifted"
    base: Rate = None
    shift: float = 0.0

    def _eval(self, u):
        return self.base(u) + self.shift

    def linear_bound(self):
        p, q = self.base.linear_bound()
        return p, q + self.shift


@dataclass(frozen=True)
class TruncatedKernel(CoagulationKernel):
    """base(u, u1) when both sizes lie in [0, cutoff], zero otherwise."""

    kind = "truncated"
    base: CoagulationKernel = None
    cutoff: float = 1.0

    def _eval(self, u, u1):
        inside = (np.asarray(u, dtype=float) <= self.cutoff) & \
                 (np.asarray(u1, dtype=float) <= self.cutoff)
        return np.where(inside, self.base(u, u1), 0.0)


@dataclass(frozen=True)
class TruncatedFragmentation:
    """Breakup rate cut off above `cutoff`, preserving the linear bound."""

    base: FragmentationRate
    cutoff: float

    def __call__(self, u):
        return np.where(np.asarray(u, dtype=float) <= self.cutoff, self.base(u), 0.0)

    def linear_bound(self):
        return self.base.linear_bound()


def truncate_coefficients(coeffs: CoefficientSet, level: float,
                          growth_floor: bool = True) -> CoefficientSet:
    """Cutoff family at level n: death, breakup and merge rates vanish
    above n (the kernel when either argument exceeds n); growth gains a
     1/n floor unless disabled; birth and daughter terms are unchanged.
    """
    n = float(level)
    if not n > 0.0:
        raise ValueError(f"truncation level must be > 0, got {level}")
    growth = ShiftedRate(base=coeffs.growth, shift=1.0 / n) if growth_floor else coeffs.growth
    return CoefficientSet(
        coag=TruncatedKernel(base=coeffs.coag, cutoff=n),
        frag=TruncatedFragmentation(base=coeffs.frag, cutoff=n),
        daughter=coeffs.daughter,
        growth=growth,
        death=TruncatedRate(base=coeffs.death, cutoff=n),
        birth=coeffs.birth,
    )
